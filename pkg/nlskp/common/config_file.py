"""TOML config files: one table per config section, validated field by
field before any config object is built.

    [model]
    nonlinearity = "gp"

    [grid]
    lengths = [100.53096491487338]
    points = [1024]

    [sweep]
    eps_list = [0.2, 0.1, 0.05]
"""
from typing import Any, Dict, List, Optional

import tomli
from pydantic import (BaseModel, Extra, NonNegativeFloat, PositiveFloat,
                      PositiveInt, ValidationError, confloat, conlist,
                      root_validator)

from nlskp.common.errors import ConfigError

Eps = confloat(gt=0.0, lt=1.0)


class _Section(BaseModel):

    class Config:
        extra = Extra.forbid


class ModelSection(_Section):
    nonlinearity: str = "gp"


class GridSection(_Section):
    lengths: conlist(PositiveFloat, min_items=1, max_items=2) = None
    points: conlist(PositiveInt, min_items=1, max_items=2) = None
    resolution_coupling: Optional[PositiveFloat] = None

    @root_validator
    def check_axes(cls, values):
        lengths, points = values.get("lengths"), values.get("points")
        if lengths is not None and points is not None and len(lengths) != len(
                points):
            raise ValueError("lengths and points must name the same axes")
        return values


class RunSection(_Section):
    eps: Optional[Eps] = None
    T: NonNegativeFloat = 1.0
    dt: Optional[PositiveFloat] = None
    output_interval: Optional[PositiveFloat] = None
    splitting: str = "strang"
    vortex_floor: Eps = 0.25
    use_drift: bool = True
    threads: Optional[PositiveInt] = None


class InitialDataSection(_Section):
    profile: str = "sech2"
    preparedness: str = "well_prepared"
    amplitude: float = -0.5
    width: PositiveFloat = 1.0
    transverse_width: PositiveFloat = 4.0
    num_modes: PositiveInt = 8
    seed: int = 0
    theta: float = 1.0
    phase_profile: str = "gaussian"
    phase_amplitude: float = 0.0


class SweepSection(_Section):
    eps_list: conlist(Eps, min_items=1) = [0.2, 0.1, 0.05]
    sobolev_index: NonNegativeFloat = 1.0
    worker_use_ray: bool = False
    ray_address: Optional[str] = None


class OutputSection(_Section):
    out: str = "out"
    formats: List[str] = ["csv", "plotdata"]
    snapshots: bool = True
    disable_tqdm: bool = False


class ConfigFile(_Section):
    model: ModelSection = ModelSection()
    grid: GridSection = GridSection()
    run: RunSection = RunSection()
    initial_data: InitialDataSection = InitialDataSection()
    sweep: SweepSection = SweepSection()
    output: OutputSection = OutputSection()

    def flatten(self) -> Dict[str, Any]:
        """Keys set in the file, without their section names."""
        values: Dict[str, Any] = {}
        for section in self.__fields__:
            values.update(getattr(self, section).dict(exclude_unset=True))
        return values


def parse_config_text(text: str, source: str = "<string>") -> ConfigFile:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"Cannot parse config file {source}: {e}") from e
    try:
        return ConfigFile.parse_obj(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid config file {source}:\n{e}") from e


def load_config_file(path: str) -> ConfigFile:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_config_text(text, path)
