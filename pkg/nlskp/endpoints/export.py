"""Writers for reports and fields.

Field dumps (NLSKP1), little-endian:

    6 bytes   b"NLSKP1"
    u8        dimension n
    u8        1 if complex else 0
    n x u32   N_i, x first
    n x f64   L_i, x first
    f64 ...   samples, x fastest, re/im interleaved when complex

Tables are CSV (pandas, round-trip precision) or plotdata: whitespace
separated numeric columns under a "#" header line naming each column.
"""
import enum
import os
import struct
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd
import torch

from nlskp.common.errors import ConfigError
from nlskp.common.logger import init_logger
from nlskp.common.outputs import BranchReport, ConvergenceReport
from nlskp.common.utils import atomic_open
from nlskp.modeling.grid import COMPLEX_DTYPE, DTYPE, Field, PeriodicGrid

logger = init_logger(__name__)

MAGIC = b"NLSKP1"
FLOAT_FORMAT = "%.17g"


class ExportFormat(enum.Enum):
    CSV = enum.auto()
    NLSKP1 = enum.auto()
    PLOTDATA = enum.auto()

    @classmethod
    def parse(cls, value: Union["ExportFormat", str]) -> "ExportFormat":
        if isinstance(value, cls):
            return value
        try:
            return cls[value.upper()]
        except KeyError as e:
            raise ConfigError(
                f"Unknown export format {value!r}. Supported: "
                f"{[m.name.lower() for m in cls]}.") from e

    @property
    def suffix(self) -> str:
        return {
            ExportFormat.CSV: ".csv",
            ExportFormat.NLSKP1: ".nlskp",
            ExportFormat.PLOTDATA: ".dat",
        }[self]


def _header(grid: PeriodicGrid, is_complex: bool) -> bytes:
    n = grid.dim
    return (MAGIC + struct.pack("<BB", n, int(is_complex)) +
            struct.pack(f"<{n}I", *grid.points) +
            struct.pack(f"<{n}d", *grid.lengths))


def write_field(field: Field, path: str) -> None:
    samples = field.samples.detach().cpu()
    if field.is_complex:
        samples = torch.view_as_real(samples.to(COMPLEX_DTYPE))
    payload = samples.to(DTYPE).numpy().astype("<f8").tobytes()
    try:
        with atomic_open(path, "wb") as f:
            f.write(_header(field.grid, field.is_complex))
            f.write(payload)
    except OSError as e:
        raise OSError(f"Cannot write field dump {path}: {e}") from e


def read_field(path: str) -> Field:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise OSError(f"Cannot read field dump {path}: {e}") from e
    if data[:len(MAGIC)] != MAGIC:
        raise ValueError(f"{path} is not an NLSKP1 field dump.")
    offset = len(MAGIC)
    n, is_complex = struct.unpack_from("<BB", data, offset)
    offset += 2
    points = struct.unpack_from(f"<{n}I", data, offset)
    offset += 4 * n
    lengths = struct.unpack_from(f"<{n}d", data, offset)
    offset += 8 * n
    grid = PeriodicGrid(lengths, points)
    values = np.frombuffer(data, dtype="<f8", offset=offset)
    expected = grid.num_points * (2 if is_complex else 1)
    if values.size != expected:
        raise ValueError(
            f"{path} holds {values.size} values, expected {expected} for "
            f"{grid}.")
    samples = torch.from_numpy(values.astype(np.float64))
    if is_complex:
        samples = torch.view_as_complex(samples.reshape(grid.shape + (2,)))
    else:
        samples = samples.reshape(grid.shape)
    return Field(grid, samples.clone())


def write_table(frame: pd.DataFrame, path: str,
                fmt: Union[ExportFormat, str] = ExportFormat.CSV) -> None:
    fmt = ExportFormat.parse(fmt)
    try:
        if fmt == ExportFormat.CSV:
            with atomic_open(path, "w") as f:
                frame.to_csv(f, index=False, float_format=FLOAT_FORMAT)
        elif fmt == ExportFormat.PLOTDATA:
            numeric = frame.select_dtypes(include=["number", "bool"])
            with atomic_open(path, "w") as f:
                np.savetxt(f,
                           numeric.to_numpy(dtype=np.float64),
                           fmt=FLOAT_FORMAT,
                           header=" ".join(numeric.columns),
                           comments="# ")
        else:
            raise ConfigError("Tables cannot be written as NLSKP1 dumps.")
    except OSError as e:
        raise OSError(f"Cannot write table {path}: {e}") from e
    logger.debug(f"Wrote {path}")


def read_plotdata(path: str) -> pd.DataFrame:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
    if not header.startswith("#"):
        raise ValueError(f"{path} has no '#' header line.")
    columns = header.lstrip("#").split()
    values = np.loadtxt(path, comments="#", ndmin=2)
    return pd.DataFrame(values, columns=columns)


def branch_file_name(eps: float) -> str:
    return f"branch_eps={eps:g}"


def export_report(report: ConvergenceReport, out_dir: str,
                  formats: Sequence[Union[ExportFormat, str]]) -> List[str]:
    """Writes summary, orders and one series table per branch; returns the
    paths written."""
    tables: Dict[str, pd.DataFrame] = {
        "summary": report.to_summary_frame(),
        "orders": report.to_orders_frame(),
    }
    for branch in report.branches:
        if branch.ok:
            tables[branch_file_name(branch.eps)] = branch.to_frame()
    written = []
    for fmt in (ExportFormat.parse(f) for f in formats):
        for name, frame in tables.items():
            path = os.path.join(out_dir, name + fmt.suffix)
            write_table(frame, path, fmt)
            written.append(path)
    return written


def export(obj: Union[ConvergenceReport, BranchReport, pd.DataFrame, Field],
           path: str,
           fmt: Union[ExportFormat, str] = ExportFormat.CSV) -> None:
    """Writes a report, a table or a field. A ConvergenceReport goes to the
    directory `path`; everything else to the file `path`."""
    fmt = ExportFormat.parse(fmt)
    if isinstance(obj, Field):
        if fmt != ExportFormat.NLSKP1:
            raise ConfigError("Fields are written as NLSKP1 dumps only.")
        write_field(obj, path)
    elif isinstance(obj, ConvergenceReport):
        export_report(obj, path, [fmt])
    elif isinstance(obj, BranchReport):
        write_table(obj.to_frame(), path, fmt)
    elif isinstance(obj, pd.DataFrame):
        write_table(obj, path, fmt)
    else:
        raise TypeError(f"Cannot export {type(obj).__name__}.")
