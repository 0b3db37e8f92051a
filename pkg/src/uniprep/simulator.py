"""Dense statevector simulation and seeded measurement sampling.

Amplitudes live in a complex128 array of length ``2**w``.  Gates are applied
in place through an ``(2,)*w`` tensor view, where wire ``x`` is tensor axis
``w - 1 - x``.  Practical ceiling is :data:`MAX_WIRES` wires.

Sampling uses numpy's PCG64 generator (``numpy.random.default_rng``), whose
output stream is fixed by specification, so histograms reproduce exactly for
a given seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import CRY, H, MCX, RY, Circuit, X

MAX_WIRES = 26
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class SimulatorCapacityError(RuntimeError):
    """The requested register is wider than the simulator supports."""


class StateVector:
    __slots__ = ("wire_count", "amplitudes")

    def __init__(self, wire_count: int, amplitudes: np.ndarray | None = None):
        if wire_count > MAX_WIRES:
            raise SimulatorCapacityError(
                f"{wire_count} wires exceeds the {MAX_WIRES}-wire simulator ceiling"
            )
        self.wire_count = wire_count
        if amplitudes is None:
            amplitudes = np.zeros(1 << wire_count, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (1 << wire_count,):
                raise ValueError(
                    f"expected {1 << wire_count} amplitudes, got shape {amplitudes.shape}"
                )
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, wire_count: int) -> "StateVector":
        return cls(wire_count)

    def copy(self) -> "StateVector":
        return StateVector(self.wire_count, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def marginal(self, wires) -> np.ndarray:
        """Probabilities over ``wires``; ``wires[k]`` becomes bit ``k`` of the index."""
        wires = list(wires)
        idx = np.arange(1 << self.wire_count)
        reg = np.zeros_like(idx)
        for k, wire in enumerate(wires):
            reg |= ((idx >> wire) & 1) << k
        return np.bincount(reg, weights=self.probabilities(), minlength=1 << len(wires))

    def __repr__(self):
        return f"StateVector(wire_count={self.wire_count})"


def _sel(w: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * w
    for wire, bit in fixed.items():
        idx[w - 1 - wire] = bit
    return tuple(idx)


def _rotate(t: np.ndarray, w: int, target: int, theta: float, fixed: dict[int, int]) -> None:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    i0 = _sel(w, {**fixed, target: 0})
    i1 = _sel(w, {**fixed, target: 1})
    a = t[i0].copy()
    b = t[i1]
    t[i0] = c * a - s * b
    t[i1] = s * a + c * b


def apply_gate(state: StateVector, gate) -> None:
    """Apply one gate to ``state`` in place."""
    w = state.wire_count
    t = state.amplitudes.reshape((2,) * w)
    if isinstance(gate, RY):
        _rotate(t, w, gate.target, gate.theta, {})
    elif isinstance(gate, CRY):
        _rotate(t, w, gate.target, gate.theta, {gate.control: gate.polarity.bit})
    elif isinstance(gate, X):
        i0, i1 = _sel(w, {gate.target: 0}), _sel(w, {gate.target: 1})
        a = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = a
    elif isinstance(gate, H):
        i0, i1 = _sel(w, {gate.target: 0}), _sel(w, {gate.target: 1})
        a = t[i0].copy()
        b = t[i1]
        t[i0] = (a + b) * _INV_SQRT2
        t[i1] = (a - b) * _INV_SQRT2
    elif isinstance(gate, MCX):
        fixed = {wire: pol.bit for wire, pol in gate.controls}
        i0 = _sel(w, {**fixed, gate.target: 0})
        i1 = _sel(w, {**fixed, gate.target: 1})
        a = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = a
    else:
        raise TypeError(f"unsupported gate {gate!r}")


def simulate(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Run ``circuit`` from ``initial`` (default ``|0...0>``); the input is not mutated."""
    if initial is None:
        state = StateVector.zero(circuit.wire_count)
    else:
        if initial.wire_count != circuit.wire_count:
            raise ValueError(
                f"state has {initial.wire_count} wires, circuit has {circuit.wire_count}"
            )
        state = initial.copy()
    for gate in circuit.gates:
        apply_gate(state, gate)
    return state


@dataclass
class Histogram:
    shots: int
    counts: dict[int, int] = field(default_factory=dict)

    def count(self, index: int) -> int:
        return self.counts.get(index, 0)


def sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    p = p / p.sum()
    return rng.choice(p.size, size=shots, p=p)


def sample(state: StateVector, shots: int, seed: int) -> Histogram:
    """Draw ``shots`` full-register measurements with a PCG64 stream seeded by ``seed``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    draws = sample_indices(state.probabilities(), shots, rng)
    values, counts = np.unique(draws, return_counts=True)
    return Histogram(shots, {int(v): int(c) for v, c in zip(values, counts)})
