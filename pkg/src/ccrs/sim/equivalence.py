"""Bounded input-output trace equivalence.

Exhaustive when it fits the budget: combinational designs sweep every input
vector, sequential designs sweep every input sequence up to the configured
depth, and "Equivalent" means proven within that bound.  Otherwise a seeded
random campaign runs, and a clean pass is reported as inconclusive with the
evaluation count rather than overclaimed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ccrs.hdl.elaborate import ElaboratedDesign
from ccrs.ir.model import CcrsDocument
from ccrs.sim.doc_sim import DocSimulator
from ccrs.sim.hdl_sim import HdlSimulator
from ccrs.sim.stimulus import SimulationError, Stimulus, Trace

EQUIVALENT = "equivalent"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EquivalenceVerdict:
    kind: str
    mode: str  # "exhaustive" or "random"
    evaluations: int  # cycles simulated per side
    stimulus: Stimulus | None = None
    cycle: int | None = None
    port: str | None = None
    value_a: int | None = None
    value_b: int | None = None

    @property
    def is_equivalent(self) -> bool:
        return self.kind == EQUIVALENT

    def describe(self) -> str:
        if self.kind == EQUIVALENT:
            return f"equivalent (exhaustive, {self.evaluations} evaluations)"
        if self.kind == INCONCLUSIVE:
            return (f"inconclusive-pass (random, {self.evaluations} evaluations, "
                    f"no mismatch found)")
        return (f"counterexample at cycle {self.cycle}, port '{self.port}': "
                f"{self.value_a} vs {self.value_b}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "mode": self.mode,
                     "evaluations": self.evaluations}
        if self.kind == COUNTEREXAMPLE:
            out.update({
                "cycle": self.cycle, "port": self.port,
                "valueA": self.value_a, "valueB": self.value_b,
                "stimulus": [dict(c) for c in self.stimulus.cycles],
            })
        return out


Design = ElaboratedDesign | CcrsDocument | HdlSimulator | DocSimulator


def build_simulator(design: Design, top: str | None = None):
    if isinstance(design, (HdlSimulator, DocSimulator)):
        return design
    if isinstance(design, ElaboratedDesign):
        return HdlSimulator(design, top)
    if isinstance(design, CcrsDocument):
        return DocSimulator(design)
    raise TypeError(f"cannot simulate {type(design).__name__}")


def check_equivalence(a: Design, b: Design, budget: int = 1 << 20, depth: int = 4,
                      vectors: int = 1000, cycles: int = 32, seed: int = 0,
                      mode: str = "auto") -> EquivalenceVerdict:
    sim_a = build_simulator(a)
    sim_b = build_simulator(b)
    _check_interfaces(sim_a, sim_b)

    inputs = sim_a.inputs()
    names = sorted(inputs)
    bits = sum(inputs.values())
    sequential = sim_a.is_sequential() or sim_b.is_sequential()

    if mode == "auto":
        cost = (1 << bits) if not sequential else (1 << (bits * depth)) * depth
        mode = "exhaustive" if cost <= budget else "random"

    if mode == "exhaustive":
        return _exhaustive(sim_a, sim_b, names, inputs, bits,
                           depth if sequential else 1)
    return _random(sim_a, sim_b, names, inputs, vectors,
                   cycles if sequential else 1, seed)


def _check_interfaces(sim_a, sim_b) -> None:
    if sorted(sim_a.ports()) != sorted(sim_b.ports()):
        raise SimulationError(
            f"port interfaces differ: {sorted(sim_a.ports())} vs "
            f"{sorted(sim_b.ports())}")
    if sim_a.inputs() != sim_b.inputs():
        raise SimulationError(
            "designs disagree about which ports are clocks; stimuli would not "
            "be comparable")


def _unpack(value: int, names: list[str], inputs: dict[str, int]) -> dict[str, int]:
    row = {}
    for name in names:
        width = inputs[name]
        row[name] = value & ((1 << width) - 1)
        value >>= width
    return row


def _compare(sim_a, sim_b, stim: Stimulus, evaluations: int,
             mode: str) -> EquivalenceVerdict | None:
    trace_a: Trace = sim_a.run(stim)
    trace_b: Trace = sim_b.run(stim)
    mismatch = trace_a.first_mismatch(trace_b)
    if mismatch is None:
        return None
    cycle, port = mismatch
    return EquivalenceVerdict(
        COUNTEREXAMPLE, mode, evaluations, stim, cycle, port,
        trace_a.cycles[cycle].get(port), trace_b.cycles[cycle].get(port))


def _exhaustive(sim_a, sim_b, names, inputs, bits, depth) -> EquivalenceVerdict:
    evaluations = 0
    per_cycle = 1 << bits
    for seq in range(per_cycle ** depth):
        rows = []
        v = seq
        for _ in range(depth):
            rows.append(_unpack(v % per_cycle, names, inputs))
            v //= per_cycle
        stim = Stimulus(tuple(rows))
        evaluations += depth
        verdict = _compare(sim_a, sim_b, stim, evaluations, "exhaustive")
        if verdict is not None:
            return verdict
    return EquivalenceVerdict(EQUIVALENT, "exhaustive", evaluations)


def _random(sim_a, sim_b, names, inputs, vectors, cycles, seed) -> EquivalenceVerdict:
    rng = random.Random(seed)
    evaluations = 0
    for _ in range(vectors):
        rows = [{name: rng.getrandbits(inputs[name]) for name in names}
                for _ in range(cycles)]
        stim = Stimulus(tuple(rows))
        evaluations += cycles
        verdict = _compare(sim_a, sim_b, stim, evaluations, "random")
        if verdict is not None:
            return verdict
    return EquivalenceVerdict(INCONCLUSIVE, "random", evaluations)
