"""Gate-level circuit representation.

Wire ``x`` carries bit ``x`` of the basis-state integer (little-endian), so
``q0`` is the least-significant bit.  Gates and circuits are immutable;
every builder method returns a new object.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union


class CircuitError(ValueError):
    """Raised for malformed gates or gates that do not fit a circuit."""


class Polarity(Enum):
    POSITIVE = 1  # fires on |1>
    NEGATIVE = 0  # fires on |0> (anti-control)

    @property
    def bit(self) -> int:
        return self.value


def _check_theta(theta: float) -> None:
    if not math.isfinite(theta):
        raise CircuitError(f"rotation angle must be finite, got {theta!r}")


def _check_distinct(wires: tuple[int, ...]) -> None:
    if any(w < 0 for w in wires):
        raise CircuitError(f"negative wire index in {wires}")
    if len(set(wires)) != len(wires):
        raise CircuitError(f"duplicate wires within one gate: {wires}")


@dataclass(frozen=True)
class RY:
    theta: float
    target: int

    def __post_init__(self):
        _check_theta(self.theta)
        _check_distinct(self.wires)

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target,)

    def inverse(self) -> "RY":
        return RY(-self.theta, self.target)


@dataclass(frozen=True)
class CRY:
    theta: float
    control: int
    target: int
    polarity: Polarity = Polarity.POSITIVE

    def __post_init__(self):
        _check_theta(self.theta)
        _check_distinct(self.wires)

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def inverse(self) -> "CRY":
        return CRY(-self.theta, self.control, self.target, self.polarity)


@dataclass(frozen=True)
class X:
    target: int

    def __post_init__(self):
        _check_distinct(self.wires)

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target,)

    def inverse(self) -> "X":
        return self


@dataclass(frozen=True)
class H:
    target: int

    def __post_init__(self):
        _check_distinct(self.wires)

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target,)

    def inverse(self) -> "H":
        return self


@dataclass(frozen=True)
class MCX:
    """Multi-controlled X; each control is a ``(wire, Polarity)`` pair."""

    controls: tuple[tuple[int, Polarity], ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple((int(w), Polarity(p)) for w, p in self.controls))
        if not self.controls:
            raise CircuitError("MCX needs at least one control")
        _check_distinct(self.wires)

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(w for w, _ in self.controls) + (self.target,)

    def inverse(self) -> "MCX":
        return self


Gate = Union[RY, CRY, X, H, MCX]


def relocate_gate(gate: Gate, mapping) -> Gate:
    """Return ``gate`` with every wire ``w`` replaced by ``mapping[w]``."""
    if isinstance(gate, RY):
        return RY(gate.theta, mapping[gate.target])
    if isinstance(gate, CRY):
        return CRY(gate.theta, mapping[gate.control], mapping[gate.target], gate.polarity)
    if isinstance(gate, X):
        return X(mapping[gate.target])
    if isinstance(gate, H):
        return H(mapping[gate.target])
    if isinstance(gate, MCX):
        return MCX(tuple((mapping[w], p) for w, p in gate.controls), mapping[gate.target])
    raise TypeError(f"not a gate: {gate!r}")


@dataclass(frozen=True)
class Circuit:
    wire_count: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        if self.wire_count < 0:
            raise CircuitError("wire_count must be non-negative")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            self._check_fits(g)

    @classmethod
    def empty(cls, wire_count: int) -> "Circuit":
        return cls(wire_count)

    def _check_fits(self, gate: Gate) -> None:
        bad = [w for w in gate.wires if w >= self.wire_count]
        if bad:
            raise CircuitError(
                f"wire(s) {bad} out of range for a {self.wire_count}-wire circuit"
            )

    def append(self, gate: Gate) -> "Circuit":
        return Circuit(self.wire_count, self.gates + (gate,))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.wire_count, self.gates + tuple(gates))

    def compose(self, other: "Circuit") -> "Circuit":
        """``self`` followed by ``other``; wire counts must match."""
        if other.wire_count != self.wire_count:
            raise CircuitError(
                f"cannot compose {self.wire_count}-wire and {other.wire_count}-wire circuits"
            )
        return Circuit(self.wire_count, self.gates + other.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return self.compose(other)

    def inverse(self) -> "Circuit":
        return Circuit(self.wire_count, tuple(g.inverse() for g in reversed(self.gates)))

    def relocate(self, mapping, wire_count: int) -> "Circuit":
        """Embed into a ``wire_count``-wire circuit, sending wire ``w`` to ``mapping[w]``.

        ``mapping`` may be any indexable (list, dict) or an integer offset.
        """
        if isinstance(mapping, int):
            offset = mapping
            mapping = [offset + w for w in range(self.wire_count)]
        return Circuit(wire_count, tuple(relocate_gate(g, mapping) for g in self.gates))

    def two_wire_gate_count(self) -> int:
        return two_wire_gate_count(self)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return circuit.append(gate)


def inverse(circuit: Circuit) -> Circuit:
    return circuit.inverse()


def two_wire_gate_count(circuit: Circuit) -> int:
    """Number of gates acting on two or more wires (CRY and MCX)."""
    return sum(1 for g in circuit.gates if len(g.wires) >= 2)
