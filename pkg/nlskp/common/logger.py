"""
Logging utility. Adapted from https://github.com/skypilot-org/skypilot/blob/master/sky/sky_logging.py

Every nlskp module logs below the "nlskp" logger, which writes to stdout at
the level named by NLSKP_LOG_LEVEL (default INFO).
"""

import logging
import os
import sys
from typing import Optional, Union

_FORMAT = "%(levelname)s %(asctime)s %(filename)s:%(lineno)d] %(message)s"
_DATE_FORMAT = "%m-%d %H:%M:%S"
_ROOT_NAME = "nlskp"
LOG_LEVEL_ENV = "NLSKP_LOG_LEVEL"


class NewLineFormatter(logging.Formatter):
    """Adds logging prefix to newlines to align multi-line messages."""

    def __init__(self, fmt, datefmt=None):
        logging.Formatter.__init__(self, fmt, datefmt)

    def format(self, record):
        msg = logging.Formatter.format(self, record)
        if record.message != "":
            parts = msg.split(record.message)
            msg = msg.replace("\n", "\r\n" + parts[0])
        return msg


def resolve_level(level: Union[int, str]) -> int:
    """Maps a level name such as "debug" or a number to a level number."""
    if isinstance(level, int):
        return level
    number = logging.getLevelName(level.strip().upper())
    if not isinstance(number, int):
        raise ValueError(f"Unknown log level: {level!r}")
    return number


_root_logger = logging.getLogger(_ROOT_NAME)
_default_handler: Optional[logging.StreamHandler] = None


def _setup_logger():
    _root_logger.setLevel(logging.DEBUG)
    global _default_handler
    if _default_handler is None:
        _default_handler = logging.StreamHandler(sys.stdout)
        _default_handler.flush = sys.stdout.flush  # type: ignore
        try:
            level = resolve_level(os.environ.get(LOG_LEVEL_ENV, "INFO"))
        except ValueError:
            level = logging.INFO
        _default_handler.setLevel(level)
        _root_logger.addHandler(_default_handler)
    fmt = NewLineFormatter(_FORMAT, datefmt=_DATE_FORMAT)
    _default_handler.setFormatter(fmt)
    # Setting this will avoid the message
    # being propagated to the parent logger.
    _root_logger.propagate = False


# The logger is initialized when the module is imported.
_setup_logger()


def init_logger(name: str,
                level: Optional[Union[int, str]] = None) -> logging.Logger:
    """Returns the logger `name`. A given `level` becomes the level of the
    shared stdout handler, so it applies to every nlskp logger."""
    if level is not None:
        assert _default_handler is not None
        _default_handler.setLevel(resolve_level(level))
    return logging.getLogger(name)


def get_log_level() -> int:
    assert _default_handler is not None
    return _default_handler.level
