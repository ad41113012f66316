"""Utils."""
import contextlib
import os
import random
import tempfile
from typing import Iterator, Optional

import filelock
import numpy as np
import psutil
import torch

from nlskp.common.logger import init_logger

logger = init_logger(__name__)

_GB = 1 << 30


def set_random_seed(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def set_num_threads(num_threads: Optional[int]) -> None:
    if num_threads is not None and num_threads > 0:
        torch.set_num_threads(num_threads)


def get_cpu_memory() -> int:
    """Returns the total CPU memory of the node in bytes."""
    return psutil.virtual_memory().total


def get_available_memory() -> int:
    """Returns the currently available CPU memory in bytes."""
    return psutil.virtual_memory().available


def check_memory(num_bytes: int, what: str) -> None:
    """Warns when an allocation would take most of the available memory."""
    available = get_available_memory()
    if num_bytes > 0.8 * available:
        logger.warning(f"{what} needs {num_bytes / _GB:.2f} GiB, "
                       f"{available / _GB:.2f} GiB available.")


def get_lock(path: str) -> filelock.FileLock:
    lock_dir = tempfile.gettempdir()
    lock_file_name = os.path.abspath(path).replace("/", "-") + ".lock"
    return filelock.FileLock(os.path.join(lock_dir, lock_file_name))


@contextlib.contextmanager
def atomic_open(path: str, mode: str = "w") -> Iterator:
    """Opens a temp file next to `path` and renames it over `path` on
    success. Concurrent writers of the same path are serialized."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise OSError(f"Cannot create output directory {directory}: {e}") from e
    with get_lock(path):
        fd, tmp_path = tempfile.mkstemp(dir=directory,
                                        prefix=".tmp-",
                                        suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, mode) as f:
                yield f
            os.replace(tmp_path, path)
        except BaseException:
            with contextlib.suppress(OSError):
                os.remove(tmp_path)
            raise
