"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capacity error.
Every report starts with a ``#`` line naming the version and the full
configuration, so identical invocations produce identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np
from scipy import stats as sps

from . import __version__
from .circuit import CRY, Polarity
from .coloring import (
    ColoringProblem,
    GrowthPolicy,
    Mode,
    ProblemError,
    layout,
    run_search,
    search_space_sizes,
)
from .prep import eq5_summation, generate, predicted_two_wire_count, steps, wire_count
from .qasm import export_qasm, parse_problem
from .simulator import MAX_WIRES, SimulatorCapacityError, sample, simulate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
DEFAULT_SEED = 0
DEFAULT_GROVER_WIRES = 20


class UsageError(Exception):
    pass


def _config_line(command: str, **cfg) -> str:
    parts = " ".join(f"{k}={v}" for k, v in cfg.items())
    return f"# uniprep {__version__} {command} {parts}".rstrip()


def _num(x: float) -> str:
    return repr(float(x))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _positive_n(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"N must be >= 1, got {n}")
    return n


def _node_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad node range {text!r}")
    return lo, hi


def _check_capacity(n: int) -> None:
    if wire_count(n) > MAX_WIRES:
        raise SimulatorCapacityError(
            f"N={n} needs {wire_count(n)} wires; simulator ceiling is {MAX_WIRES}"
        )


# ---- prep -----------------------------------------------------------------

def _gate_record(step) -> dict:
    g = step.gate
    rec = {"kind": type(g).__name__, "target": g.target}
    if isinstance(g, CRY):
        rec["control"] = g.control
        rec["polarity"] = "negative" if g.polarity is Polarity.NEGATIVE else "positive"
    rec["theta"] = g.theta
    rec["closed_form"] = step.closed_form
    rec["arc"] = step.arc
    return rec


def cmd_prep(args) -> tuple[str, int]:
    n = args.n
    st = steps(n)
    circ = generate(n)
    if args.qasm:
        with open(args.qasm, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(export_qasm(circ))
    if args.json:
        doc = {
            "version": __version__,
            "command": "prep",
            "n": n,
            "wires": circ.wire_count,
            "two_wire_count": circ.two_wire_gate_count(),
            "gates": [_gate_record(s) for s in st],
        }
        return json.dumps(doc, indent=2) + "\n", EXIT_OK

    lines = [_config_line("prep", n=n, qasm=args.qasm or "-")]
    lines.append(f"# wires={circ.wire_count} gates={len(circ)} two_wire={circ.two_wire_gate_count()}")
    if not st:
        lines.append("empty circuit: |0> on 0 wires is already the uniform state over 1 element")
    for k, s in enumerate(st):
        g = s.gate
        if isinstance(g, CRY):
            ctrl = ("anti-ctrl" if g.polarity is Polarity.NEGATIVE else "ctrl") + f"=q{g.control}"
            kind = "CRY"
        else:
            ctrl, kind = "", "RY"
        lines.append(
            f"{k:3d}  {kind:<3s}  {ctrl:<12s} target=q{g.target}  "
            f"theta={g.theta:.17g}  {s.closed_form}"
        )
    return "\n".join(lines) + "\n", EXIT_OK


# ---- verify ---------------------------------------------------------------

def cmd_verify(args) -> tuple[str, int]:
    n, tol = args.n, args.tol
    _check_capacity(n)
    circ = generate(n)
    amps = simulate(circ).amplitudes
    inside = float(np.max(np.abs(np.abs(amps[:n]) ** 2 - 1.0 / n)))
    outside = float(np.max(np.abs(amps[n:]))) if amps.size > n else 0.0
    ok = inside <= tol and outside <= tol
    report = {
        "version": __version__,
        "command": "verify",
        "n": n,
        "tol": tol,
        "wires": circ.wire_count,
        "two_wire_count": circ.two_wire_gate_count(),
        "max_prob_deviation": inside,
        "max_outside_amplitude": outside,
        "pass": ok,
    }
    if args.json:
        out = json.dumps(report, indent=2) + "\n"
    else:
        out = "\n".join(
            [
                _config_line("verify", n=n, tol=tol),
                f"wires: {circ.wire_count}",
                f"two-wire gates: {circ.two_wire_gate_count()}",
                f"max | |amp|^2 - 1/N | over k < N: {inside:.3e}",
                f"max |amp| over k >= N: {outside:.3e}",
                "PASS" if ok else "FAIL",
            ]
        ) + "\n"
    return out, EXIT_OK if ok else EXIT_FAIL


# ---- count ----------------------------------------------------------------

def count_rows(max_n: int) -> list[tuple]:
    rows = []
    for n in range(2, max_n + 1):
        actual = generate(n).two_wire_gate_count()
        closed = predicted_two_wire_count(n)
        eq5 = eq5_summation(n)
        agree = actual == closed == eq5
        rows.append((n, actual, closed, eq5, "true" if agree else "false"))
    return rows


def cmd_count(args) -> tuple[str, int]:
    if args.max < 2:
        raise UsageError("--max must be >= 2")
    rows = count_rows(args.max)
    mismatches = sum(1 for r in rows if r[4] == "false")
    body = _csv(rows, ["N", "actual_two_wire", "closed_form", "eq5_sum", "agree"])
    head = _config_line("count", max=args.max)
    tail = f"# disagreements={mismatches} of {len(rows)}\n"
    return head + "\n" + body + tail, EXIT_OK


# ---- sample ---------------------------------------------------------------

def sample_report(n: int, shots: int, seed: int) -> dict:
    hist = sample(simulate(generate(n)), shots, seed)
    counts = [hist.count(k) for k in range(n)]
    outside = shots - sum(counts)
    expected = shots / n
    if n > 1:
        chi2, p = sps.chisquare(counts)
        chi2, p = float(chi2), float(p)
    else:
        chi2, p = 0.0, 1.0
    return {
        "counts": counts,
        "outside": outside,
        "expected": expected,
        "min": min(counts),
        "max": max(counts),
        "chi2": chi2,
        "p_value": p,
    }


def cmd_sample(args) -> tuple[str, int]:
    n = args.n
    _check_capacity(n)
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    rep = sample_report(n, args.shots, args.seed)
    head = _config_line("sample", n=n, shots=args.shots, seed=args.seed)
    body = _csv(enumerate(rep["counts"]), ["state", "count"])
    tail = (
        f"# summary min={rep['min']} max={rep['max']} expected={_num(rep['expected'])} "
        f"chi2={_num(rep['chi2'])} p={_num(rep['p_value'])} outside={rep['outside']}\n"
    )
    return head + "\n" + body + tail, EXIT_OK


# ---- grover / sweep -------------------------------------------------------

def _load_problem(args) -> ColoringProblem:
    if args.graph:
        with open(args.graph, encoding="utf-8") as fh:
            return parse_problem(fh.read())
    if args.line is None or args.colors is None:
        raise UsageError("give --graph PATH or both --line K and --colors C")
    return ColoringProblem.line(args.line, args.colors)


def _policy(problem, mode, lam) -> GrowthPolicy:
    had, res = search_space_sizes(problem)
    size = had if mode is Mode.HADAMARD else res
    return GrowthPolicy(lam=lam, cap=size ** 0.5)


def cmd_grover(args) -> tuple[str, int]:
    problem = _load_problem(args)
    mode = Mode(args.mode)
    lay = layout(problem)
    had, res = search_space_sizes(problem)
    st = run_search(
        problem, mode, _policy(problem, mode, args.lam), trials=args.trials,
        seed=args.seed, max_wires=args.max_wires,
    )
    src = args.graph if args.graph else f"line:{args.line}x{args.colors}"
    head = [
        _config_line(
            "grover", problem=src, mode=mode.value, trials=args.trials, seed=args.seed,
            lam=args.lam, max_wires=args.max_wires,
        ),
        f"# wires={lay.total} search_space hadamard={had} restricted={res}",
    ]
    rows = [
        (t, r, runs, "true" if ok else "false")
        for t, (r, runs, ok) in enumerate(zip(st.repetitions, st.runs, st.success))
    ]
    body = _csv(rows, ["trial", "repetitions", "runs", "success"])
    tail = f"# summary mean_repetitions={_num(st.mean_repetitions)} successes={sum(st.success)}\n"
    return "\n".join(head) + "\n" + body + tail, EXIT_OK


def sweep_rows(colors: int, lo: int, hi: int, trials: int, seed: int, lam: float, max_wires: int):
    rows, skipped = [], []
    for nodes in range(lo, hi + 1):
        problem = ColoringProblem.line(nodes, colors)
        total = layout(problem).total
        if total > max_wires:
            skipped.append((nodes, total))
            continue
        for mode in (Mode.RESTRICTED, Mode.HADAMARD):
            st = run_search(
                problem, mode, _policy(problem, mode, lam), trials=trials, seed=seed,
                max_wires=max_wires,
            )
            rows.append((nodes, mode.value, _num(st.mean_repetitions), trials))
    return rows, skipped


def cmd_sweep(args) -> tuple[str, int]:
    lo, hi = args.nodes
    rows, skipped = sweep_rows(args.colors, lo, hi, args.trials, args.seed, args.lam, args.max_wires)
    head = _config_line(
        "sweep", colors=args.colors, nodes=f"{lo}..{hi}", trials=args.trials, seed=args.seed,
        lam=args.lam, max_wires=args.max_wires,
    )
    tail = "".join(
        f"# skipped nodes={n}: needs {w} wires (E + 1 + sum ceil(log2 N_v)) > {args.max_wires}\n"
        for n, w in skipped
    )
    for n, w in skipped:
        print(f"warning: skipping nodes={n}, needs {w} wires", file=sys.stderr)
    return head + "\n" + _csv(rows, ["nodes", "mode", "mean_repetitions", "trials"]) + tail, EXIT_OK


# ---- entry ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniprep",
        description="Uniform superposition circuits over N states, verified by simulation.",
    )
    parser.add_argument("--version", action="version", version=f"uniprep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_opt(p):
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    p = sub.add_parser("prep", help="print the preparation circuit for N")
    p.add_argument("n", type=_positive_n, metavar="N")
    p.add_argument("--qasm", metavar="PATH", help="also write OpenQASM 2.0")
    p.add_argument("--json", action="store_true")
    out_opt(p)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("verify", help="simulate and check the uniform amplitudes")
    p.add_argument("n", type=_positive_n, metavar="N")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--json", action="store_true")
    out_opt(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="two-wire gate counts for N = 2..M (CSV)")
    p.add_argument("--max", type=int, required=True, metavar="M")
    out_opt(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="seeded measurement histogram (CSV)")
    p.add_argument("n", type=_positive_n, metavar="N")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    out_opt(p)
    p.set_defaults(func=cmd_sample)

    def grover_opts(p):
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--lam", type=float, default=6 / 5, help="iteration-ceiling growth factor")
        p.add_argument("--max-wires", type=int, default=DEFAULT_GROVER_WIRES)
        out_opt(p)

    p = sub.add_parser("grover", help="Grover graph-coloring trials (CSV)")
    p.add_argument("--graph", metavar="PATH", help="problem JSON file")
    p.add_argument("--line", type=int, metavar="K", help="line graph with K nodes")
    p.add_argument("--colors", type=int, metavar="C")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.RESTRICTED.value)
    grover_opts(p)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("sweep", help="mean repetitions vs line-graph size, both modes (CSV)")
    p.add_argument("--colors", type=int, required=True, metavar="C")
    p.add_argument("--nodes", type=_node_range, required=True, metavar="A..B")
    grover_opts(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulatorCapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
