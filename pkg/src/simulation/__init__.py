"""
Simulation package

File stores, demand generation, scheme description files and the payload
engine that runs delivery and decoding over real bytes.
"""

from .demands import distinct_demand, exhaustive_demands, parse_demand, random_demands
from .description import SchemeDescription, build_scheme, load_description
from .prng import SplitMix64
from .simulator import DemandMode, SimulationResult, SweepResult, run, sweep_demands
from .store import FileStore, pack, random_files, unpack

__all__ = [
    "DemandMode",
    "FileStore",
    "SchemeDescription",
    "SimulationResult",
    "SplitMix64",
    "SweepResult",
    "build_scheme",
    "distinct_demand",
    "exhaustive_demands",
    "load_description",
    "pack",
    "parse_demand",
    "random_demands",
    "random_files",
    "run",
    "sweep_demands",
    "unpack",
]
