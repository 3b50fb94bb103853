"""Cycle-based two-valued simulation and the equivalence oracle."""

from ccrs.sim.stimulus import Stimulus, Trace, SimulationError
from ccrs.sim.hdl_sim import HdlSimulator
from ccrs.sim.doc_sim import DocSimulator
from ccrs.sim.equivalence import EquivalenceVerdict, build_simulator, check_equivalence

__all__ = [
    "Stimulus",
    "Trace",
    "SimulationError",
    "HdlSimulator",
    "DocSimulator",
    "EquivalenceVerdict",
    "build_simulator",
    "check_equivalence",
]
