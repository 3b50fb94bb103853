"""Stimulus and trace containers for cycle-based simulation.

A stimulus covers the data inputs only; clocks are structural and every
clock ticks once per cycle, after the cycle's outputs are sampled.
Registers start at 0, so trace row 0 shows the reset state.
"""

from __future__ import annotations

from dataclasses import dataclass


class SimulationError(Exception):
    pass


@dataclass(frozen=True)
class Stimulus:
    cycles: tuple[dict[str, int], ...]

    def __post_init__(self) -> None:
        if len(self.cycles) < 1:
            raise SimulationError("stimulus needs at least one cycle")

    @staticmethod
    def of(rows: list[dict[str, int]]) -> "Stimulus":
        return Stimulus(tuple(dict(r) for r in rows))

    def check_against(self, inputs: dict[str, int]) -> None:
        """inputs: name -> width.  Every input, every cycle, in range."""
        for k, row in enumerate(self.cycles):
            for name, width in inputs.items():
                if name not in row:
                    raise SimulationError(f"cycle {k} misses input '{name}'")
                v = row[name]
                if not (0 <= v < (1 << width)):
                    raise SimulationError(
                        f"cycle {k}: value {v} does not fit input '{name}' "
                        f"of width {width}")
            for name in row:
                if name not in inputs:
                    raise SimulationError(f"cycle {k} drives unknown input '{name}'")


@dataclass(frozen=True)
class Trace:
    cycles: tuple[dict[str, int], ...]

    def to_json(self) -> list[dict[str, int]]:
        return [dict(c) for c in self.cycles]

    def first_mismatch(self, other: "Trace") -> tuple[int, str] | None:
        for k, (a, b) in enumerate(zip(self.cycles, other.cycles)):
            for port in sorted(set(a) | set(b)):
                if a.get(port) != b.get(port):
                    return (k, port)
        return None
