"""OpenQASM 2.0 export and problem-file loading.

Exported programs use only ``ry``, ``cx``, ``x``, ``h`` and, for
multi-controlled X gates, ``ccx`` from ``qelib1.inc``.  ``CRY`` becomes the
usual four-gate ry/cx sandwich; anti-controls are wrapped in ``x``.  Larger
MCX gates are lowered to ``ccx`` with borrowed (dirty) workspace wires.

:func:`parse_qasm` reads back only the subset this module writes.
"""
from __future__ import annotations

import json
import math
import re

from .circuit import CRY, H, MCX, RY, Circuit, Polarity, X
from .coloring import ColoringProblem, ProblemError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


class QasmError(ValueError):
    pass


def format_angle(theta: float) -> str:
    for num, text in ((1, "pi"), (0.5, "pi/2"), (0.25, "pi/4")):
        if theta == math.pi * num:
            return text
        if theta == -math.pi * num:
            return "-" + text
    return repr(float(theta))


def _q(w: int) -> str:
    return f"q[{w}]"


def _toffoli(a: int, b: int, t: int) -> str:
    return f"ccx {_q(a)},{_q(b)},{_q(t)};"


def _vchain(controls: list[int], target: int, work: list[int]) -> list[str]:
    # k controls, k-2 dirty workspace wires; 4(k-2) Toffolis, workspace restored
    k = len(controls)
    a = work[: k - 2]
    down = [_toffoli(controls[k - 1 - s], a[k - 3 - s], a[k - 2 - s]) for s in range(1, k - 2)]
    ladder = down + [_toffoli(controls[0], controls[1], a[0])] + down[::-1]
    top = _toffoli(controls[k - 1], a[k - 3], target)
    return [top] + ladder + [top] + ladder


def _mcx_lines(controls: list[int], target: int, free: list[int]) -> list[str]:
    k = len(controls)
    if k == 0:
        return [f"x {_q(target)};"]
    if k == 1:
        return [f"cx {_q(controls[0])},{_q(target)};"]
    if k == 2:
        return [_toffoli(controls[0], controls[1], target)]
    if len(free) >= k - 2:
        return _vchain(controls, target, free)
    if not free:
        raise QasmError(
            f"cannot lower a {k}-control X without at least one spare wire in the register"
        )
    # split across one borrowed wire; each half then has the other half as workspace
    anc = free[0]
    first, second = controls[: (k + 1) // 2], controls[(k + 1) // 2 :]
    rest = free[1:]
    a = _mcx_lines(first, anc, second + [target] + rest)
    b = _mcx_lines(second + [anc], target, first + rest)
    return a + b + a + b


def _mcx_statements(gate: MCX, wire_count: int) -> list[str]:
    controls = [w for w, _ in gate.controls]
    negs = [w for w, p in gate.controls if p is Polarity.NEGATIVE]
    used = set(gate.wires)
    free = [w for w in range(wire_count) if w not in used]
    flips = [f"x {_q(w)};" for w in negs]
    body = _mcx_lines(controls, gate.target, free)
    k = len(controls)
    if k >= 3:
        how = "v-chain" if len(free) >= k - 2 else "split on one borrowed wire"
        note = [f"// mcx {k} controls -> {_q(gate.target)}: ccx {how}, dirty workspace restored"]
    else:
        note = []
    return note + flips + body + flips


def gate_statements(gate, wire_count: int) -> list[str]:
    if isinstance(gate, RY):
        return [f"ry({format_angle(gate.theta)}) {_q(gate.target)};"]
    if isinstance(gate, X):
        return [f"x {_q(gate.target)};"]
    if isinstance(gate, H):
        return [f"h {_q(gate.target)};"]
    if isinstance(gate, CRY):
        c, t = gate.control, gate.target
        flip = [f"x {_q(c)};"] if gate.polarity is Polarity.NEGATIVE else []
        body = [
            f"ry({format_angle(gate.theta / 2)}) {_q(t)};",
            f"cx {_q(c)},{_q(t)};",
            f"ry({format_angle(-gate.theta / 2)}) {_q(t)};",
            f"cx {_q(c)},{_q(t)};",
        ]
        return flip + body + flip
    if isinstance(gate, MCX):
        return _mcx_statements(gate, wire_count)
    raise TypeError(f"unsupported gate {gate!r}")


def export_qasm(circuit: Circuit) -> str:
    lines = [HEADER.rstrip("\n")]
    if circuit.wire_count:
        lines.append(f"qreg q[{circuit.wire_count}];")
    for g in circuit.gates:
        lines.extend(gate_statements(g, circuit.wire_count))
    return "\n".join(lines) + "\n"


_ANGLE = re.compile(r"^(-)?(?:(pi)(?:/(\d+))?|([0-9.eE+-]+))$")
_STMT = re.compile(r"^(ry|cx|x|h|ccx)(?:\(([^)]*)\))?\s+(.+);$")


def _parse_angle(text: str) -> float:
    m = _ANGLE.match(text.replace(" ", ""))
    if not m:
        raise QasmError(f"unsupported angle expression {text!r}")
    sign = -1.0 if m.group(1) else 1.0
    if m.group(2):
        return sign * math.pi / (int(m.group(3)) if m.group(3) else 1)
    return sign * float(m.group(4))


def parse_qasm(text: str) -> Circuit:
    """Read back exported programs as a circuit of RY, X, H and MCX gates."""
    wire_count = 0
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\];$", line)
        if m:
            wire_count = int(m.group(1))
            continue
        m = _STMT.match(line)
        if not m:
            raise QasmError(f"line {lineno}: unsupported statement {line!r}")
        op, arg, operands = m.groups()
        wires = [int(w) for w in re.findall(r"q\[(\d+)\]", operands)]
        if op == "ry":
            gates.append(RY(_parse_angle(arg), wires[0]))
        elif op == "x":
            gates.append(X(wires[0]))
        elif op == "h":
            gates.append(H(wires[0]))
        else:
            *ctrl, tgt = wires
            gates.append(MCX(tuple((w, Polarity.POSITIVE) for w in ctrl), tgt))
    return Circuit(wire_count, tuple(gates))


def decompose(circuit: Circuit) -> Circuit:
    """The circuit as exported: ry/cx/x/h/ccx only."""
    return parse_qasm(export_qasm(circuit))


def parse_problem(text: str) -> ColoringProblem:
    """Load ``{"vertices": [{"colors": int}, ...], "edges": [[u, v], ...]}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ProblemError("top level must be a JSON object")
    vertices = data.get("vertices")
    if not isinstance(vertices, list) or not vertices:
        raise ProblemError("'vertices' must be a non-empty list")
    colors = []
    for k, v in enumerate(vertices):
        c = v.get("colors") if isinstance(v, dict) else None
        if isinstance(c, bool) or not isinstance(c, int):
            raise ProblemError(f"vertices[{k}].colors must be an integer")
        colors.append(c)
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise ProblemError("'edges' must be a list")
    pairs = []
    for k, e in enumerate(edges):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or any(isinstance(a, bool) or not isinstance(a, int) for a in e)
        ):
            raise ProblemError(f"edges[{k}] must be a pair of integers, got {e!r}")
        pairs.append((e[0], e[1]))
    return ColoringProblem(tuple(colors), tuple(pairs))
