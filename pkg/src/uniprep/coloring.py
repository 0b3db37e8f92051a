"""Grover search for graph colorings with a restricted or Hadamard initializer.

Each vertex with ``N_v`` colors owns a register of ``ceil(log2 N_v)`` wires.
Registers occupy the low wires in vertex order, followed by one conflict
ancilla per edge and a single phase wire, for ``E + 1 + sum(widths)`` wires.

The oracle only checks edge constraints.  Register values ``>= N_v`` are
rejected by the classical verifier after measurement, which is what makes
the Hadamard initializer pay for its larger search space.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circuit import MCX, H, Circuit, Polarity, X
from .prep import generate, is_power_of_two, wire_count
from .simulator import MAX_WIRES, SimulatorCapacityError, StateVector, apply_gate, sample_indices


class ProblemError(ValueError):
    pass


class Mode(str, enum.Enum):
    RESTRICTED = "restricted"
    HADAMARD = "hadamard"


@dataclass(frozen=True)
class ColoringProblem:
    colors: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        for k, c in enumerate(self.colors):
            if c < 2:
                raise ProblemError(f"vertex {k}: colors must be >= 2, got {c}")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ProblemError(f"edge [{u}, {v}]: self-loop")
            for a in (u, v):
                if not 0 <= a < len(self.colors):
                    raise ProblemError(f"edge [{u}, {v}]: vertex {a} out of range")
            key = frozenset((u, v))
            if key in seen:
                raise ProblemError(f"edge [{u}, {v}]: duplicate edge")
            seen.add(key)

    @classmethod
    def line(cls, nodes: int, colors: int) -> "ColoringProblem":
        """Path graph on ``nodes`` vertices, each with ``colors`` colors."""
        if nodes < 1:
            raise ProblemError("a line graph needs at least one node")
        return cls((colors,) * nodes, tuple((k, k + 1) for k in range(nodes - 1)))

    def is_valid(self, assignment) -> bool:
        if any(a >= c for a, c in zip(assignment, self.colors)):
            return False
        return all(assignment[u] != assignment[v] for u, v in self.edges)


@dataclass(frozen=True)
class WireLayout:
    registers: tuple[tuple[int, int], ...]  # (offset, width) per vertex
    ancillas: tuple[int, ...]  # one per edge
    phase: int

    @property
    def total(self) -> int:
        return self.phase + 1

    @property
    def register_wires(self) -> list[int]:
        return [off + b for off, width in self.registers for b in range(width)]

    def register(self, vertex: int) -> list[int]:
        off, width = self.registers[vertex]
        return list(range(off, off + width))

    def decode(self, index: int) -> tuple[int, ...]:
        """Split a register-space index into per-vertex color values."""
        return tuple((index >> off) & ((1 << width) - 1) for off, width in self.registers)


def layout(problem: ColoringProblem) -> WireLayout:
    regs = []
    off = 0
    for c in problem.colors:
        width = wire_count(c)
        regs.append((off, width))
        off += width
    ancillas = tuple(range(off, off + len(problem.edges)))
    return WireLayout(tuple(regs), ancillas, off + len(problem.edges))


def search_space_sizes(problem: ColoringProblem) -> tuple[int, int]:
    """``(hadamard, restricted)`` search-space sizes as exact integers."""
    hadamard = math.prod(1 << wire_count(c) for c in problem.colors)
    restricted = math.prod(problem.colors)
    return hadamard, restricted


def _register_prep(n: int, wires: list[int], total: int, mode: Mode) -> Circuit:
    # power-of-two registers are left on Hadamards in both modes
    if mode is Mode.HADAMARD or is_power_of_two(n):
        return Circuit(total, tuple(H(w) for w in wires))
    return generate(n).relocate(wires, total)


def initializer(problem: ColoringProblem, lay: WireLayout, mode: Mode) -> Circuit:
    mode = Mode(mode)
    circ = Circuit.empty(lay.total)
    for v, c in enumerate(problem.colors):
        circ = circ + _register_prep(c, lay.register(v), lay.total, mode)
    return circ


def _comparator(lay: WireLayout, u: int, v: int, ancilla: int) -> list:
    """Set ``ancilla`` to 1 iff registers ``u`` and ``v`` hold equal values."""
    ru, rv = lay.register(u), lay.register(v)
    if len(ru) > len(rv):
        ru, rv = rv, ru
    xors = [MCX(((a, Polarity.POSITIVE),), b) for a, b in zip(ru, rv)]
    # rv is the wider register; its surplus high bits compare against constant 0
    compared = rv
    test = MCX(tuple((w, Polarity.NEGATIVE) for w in compared), ancilla)
    return xors + [test] + xors[::-1]


def oracle(problem: ColoringProblem, lay: WireLayout) -> Circuit:
    """Phase oracle; assumes the phase wire already holds ``|->``."""
    compute = []
    for (u, v), anc in zip(problem.edges, lay.ancillas):
        compute += _comparator(lay, u, v, anc)
    if lay.ancillas:
        kick = MCX(tuple((a, Polarity.NEGATIVE) for a in lay.ancillas), lay.phase)
    else:
        kick = X(lay.phase)
    gates = compute + [kick]
    for (u, v), anc in reversed(list(zip(problem.edges, lay.ancillas))):
        gates += _comparator(lay, u, v, anc)
    return Circuit(lay.total, tuple(gates))


def phase_prep(lay: WireLayout) -> Circuit:
    return Circuit(lay.total, (X(lay.phase), H(lay.phase)))


def _zero_reflection(wires: list[int], total: int) -> Circuit:
    # phase flip on |0...0> of `wires`: X-conjugate, then H-MCX-H on the top wire
    target, rest = wires[-1], wires[:-1]
    flip = MCX(tuple((w, Polarity.NEGATIVE) for w in rest), target) if rest else X(target)
    gates = [X(target), H(target), flip, H(target), X(target)]
    return Circuit(total, tuple(gates))


def diffuser(problem: ColoringProblem, lay: WireLayout, mode: Mode) -> Circuit:
    prep = initializer(problem, lay, mode)
    return prep.inverse() + _zero_reflection(lay.register_wires, lay.total) + prep


def grover_circuit(problem: ColoringProblem, mode: Mode, repetitions: int) -> Circuit:
    """Full run: initializer, phase-wire prep, then ``repetitions`` oracle+diffuser blocks."""
    lay = layout(problem)
    circ = initializer(problem, lay, mode) + phase_prep(lay)
    step = oracle(problem, lay) + diffuser(problem, lay, mode)
    for _ in range(repetitions):
        circ = circ + step
    return circ


@dataclass
class GrowthPolicy:
    """Randomized repetition schedule: ceiling ``m`` grows by ``lam`` after each miss."""

    lam: float = 6 / 5
    m: float = 1.0
    cap: float = math.inf

    def __post_init__(self):
        if self.lam <= 1:
            raise ValueError("growth factor must be > 1")
        if self.m < 1:
            raise ValueError("initial ceiling must be >= 1")
        self.m = min(self.m, self.cap)

    def draw(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, math.ceil(self.m)))

    def grow(self) -> None:
        self.m = min(self.lam * self.m, self.cap)


@dataclass
class SearchStats:
    mode: Mode
    repetitions: list[int] = field(default_factory=list)
    runs: list[int] = field(default_factory=list)
    success: list[bool] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.repetitions)

    @property
    def mean_repetitions(self) -> float:
        done = [r for r, ok in zip(self.repetitions, self.success) if ok]
        return sum(done) / len(done) if done else math.nan


class GroverRunner:
    """Caches measurement distributions of the vertex registers per repetition count.

    Simulating ``initializer + r * (oracle + diffuser)`` from scratch gives the
    same state as extending the cached state after ``r - 1`` repetitions, so
    each distribution is computed once per runner.
    """

    def __init__(self, problem: ColoringProblem, mode: Mode, max_wires: int = MAX_WIRES):
        self.problem = problem
        self.mode = Mode(mode)
        self.layout = layout(problem)
        if self.layout.total > max_wires:
            raise SimulatorCapacityError(
                f"problem needs {self.layout.total} wires (E + 1 + sum ceil(log2 N_v)), "
                f"limit is {max_wires}"
            )
        self._step = oracle(problem, self.layout) + diffuser(problem, self.layout, self.mode)
        start = initializer(problem, self.layout, self.mode) + phase_prep(self.layout)
        state = StateVector.zero(self.layout.total)
        for g in start.gates:
            apply_gate(state, g)
        self._state = state
        self._dists: list[np.ndarray] = [self._marginal()]

    def _marginal(self) -> np.ndarray:
        return self._state.marginal(self.layout.register_wires)

    @cached_property
    def search_space(self) -> int:
        had, res = search_space_sizes(self.problem)
        return had if self.mode is Mode.HADAMARD else res

    def distribution(self, repetitions: int) -> np.ndarray:
        while len(self._dists) <= repetitions:
            for g in self._step.gates:
                apply_gate(self._state, g)
            self._dists.append(self._marginal())
        return self._dists[repetitions]

    def trial(self, rng: np.random.Generator, policy: GrowthPolicy, max_runs: int = 10_000):
        """One search; returns ``(repetitions consumed, runs, success)``."""
        used = 0
        for run in range(1, max_runs + 1):
            r = policy.draw(rng)
            used += r
            index = int(sample_indices(self.distribution(r), 1, rng)[0])
            if self.problem.is_valid(self.layout.decode(index)):
                return used, run, True
            policy.grow()
        return used, max_runs, False


def default_policy(problem: ColoringProblem, mode: Mode) -> GrowthPolicy:
    had, res = search_space_sizes(problem)
    size = had if Mode(mode) is Mode.HADAMARD else res
    return GrowthPolicy(cap=math.sqrt(size))


def run_search(
    problem: ColoringProblem,
    mode: Mode,
    policy: GrowthPolicy | None = None,
    trials: int = 100,
    seed: int = 0,
    max_wires: int = MAX_WIRES,
    max_runs: int = 10_000,
) -> SearchStats:
    """Run ``trials`` independent searches; trial ``t`` draws from ``default_rng([seed, t])``."""
    mode = Mode(mode)
    runner = GroverRunner(problem, mode, max_wires=max_wires)
    template = policy or default_policy(problem, mode)
    stats = SearchStats(mode)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        pol = GrowthPolicy(template.lam, template.m, template.cap)
        used, runs, ok = runner.trial(rng, pol, max_runs=max_runs)
        stats.repetitions.append(used)
        stats.runs.append(runs)
        stats.success.append(ok)
    return stats
