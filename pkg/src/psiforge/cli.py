"""Command-line front end.

Input files are chosen by extension: ``.es`` event structures, ``.dcr``
DCR graphs, ``.pi`` pi-terms.  Exit codes: 1 for parse or validation
errors, 2 for failed checks, 3 when the unfolding budget runs out.
"""

from __future__ import annotations

import argparse
import inspect
import sys
from pathlib import Path
from typing import Any, TextIO

from psiforge.canonical import canonical
from psiforge.checks import ALIASES, SUITES, CheckReport
from psiforge.dcr import Marking, dcr_execute, dcr_transitions, es_to_dcr
from psiforge.dcrpsi import DCR_PSI, UNIT, dcrpsi
from psiforge.eventpsi import EMPTY, EVENT_PSI, InvalidConfiguration, ShapeError, espsi, refine_psi
from psiforge.events import (
    EventStructure,
    InvalidEventStructure,
    MissingLabel,
    TooLarge,
    es_enabled,
    es_step,
    refine_es,
)
from psiforge.lts import Lts, explore
from psiforge.pi import make_pi_instance
from psiforge.process import In, drop_nils
from psiforge.semantics import Budget, BudgetExceeded, transitions
from psiforge.syntax import ParseError, ValidationError, parse_dcr, parse_es, parse_pi, serialize_es

EXIT_INPUT = 1
EXIT_CHECK = 2
EXIT_BUDGET = 3


class InputError(Exception):
    pass


def _kind(path: Path, encode: str | None) -> str:
    ext = path.suffix.lower()
    if ext in (".es", ".dcr", ".pi"):
        kind = ext[1:]
    else:
        raise InputError(f"{path}: unknown file type (expected .es, .dcr or .pi)")
    if encode == "espsi" and kind != "es":
        raise InputError(f"{path}: --encode espsi needs an event structure file")
    if encode == "dcrpsi" and kind == "pi":
        raise InputError(f"{path}: --encode dcrpsi needs a DCR or event structure file")
    return kind


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _fmt_set(s) -> str:
    return "{" + ",".join(sorted(s)) + "}"


def _fmt_marking(m: Marking) -> str:
    return " ".join(f"{p}={_fmt_set(s)}" for p, s in zip(Marking._fields, m))


def _load(path: Path, encode: str | None):
    """Parse ``path``; returns (instance, env, process, is-dcr-encoding)."""
    kind = _kind(path, encode)
    text = _read(path)
    if kind == "pi":
        pi = make_pi_instance()
        return pi, pi.unit, parse_pi(text), False
    if kind == "es":
        doc = parse_es(text)
        if encode == "dcrpsi":
            g, m = es_to_dcr(doc.es)
            return DCR_PSI, UNIT, dcrpsi(g, m), True
        return EVENT_PSI, EMPTY, espsi(doc.es, doc.config or EMPTY), False
    doc = parse_dcr(text)
    return DCR_PSI, UNIT, dcrpsi(doc.graph, doc.marking), True


def _explore(args) -> Lts:
    inst, env, p, is_dcr = _load(Path(args.file), args.encode)
    budget = Budget(args.budget)
    if is_dcr:
        # the encoding has a free output on m at every state; only tau moves are followed
        return explore(inst, env, p, args.depth, args.max_states, tau_only=True, budget=budget, absorb=True)
    return explore(inst, env, p, args.depth, args.max_states, budget=budget)


def _dot(lts: Lts) -> str:
    return lts.to_dot(render=lambda p: str(drop_nils(p)))


def _lts_text(lts: Lts) -> str:
    lines = [
        f"states: {len(lts.states)}",
        f"edges: {len(lts.edges)}",
        f"truncated: {'yes' if lts.truncated else 'no'}",
    ]
    for i, p in enumerate(lts.states):
        lines.append(f"s{i} [depth {lts.depth[i]}] {drop_nils(p)}")
    for s, a, t in lts.edges:
        lines.append(f"s{s} --{a}--> s{t}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def cmd_encode(args, out: TextIO) -> int:
    _, _, p, _ = _load(Path(args.file), args.encode)
    out.write(f"{p}\n")
    return 0


def cmd_lts(args, out: TextIO) -> int:
    lts = _explore(args)
    out.write(_dot(lts) if args.format == "dot" else _lts_text(lts))
    return 0


def cmd_dot(args, out: TextIO) -> int:
    out.write(_dot(_explore(args)))
    return 0


def _suite_kwargs(fn, args) -> dict[str, Any]:
    params = inspect.signature(fn).parameters
    wanted = {
        "seed": args.seed,
        "count": args.random,
        "max_events": args.max_events,
        "depth": args.depth,
        "max_states": args.max_states,
    }
    kw = {k: v for k, v in wanted.items() if v is not None and k in params}
    if args.random is not None and "count" not in params and "samples" in params:
        kw["samples"] = args.random
    return kw


def resolve_checks(names: list[str]) -> list[str]:
    out: list[str] = []
    for n in names:
        if n == "all":
            picked = list(SUITES)
        elif n in SUITES:
            picked = [n]
        elif n in ALIASES:
            picked = [ALIASES[n]]
        else:
            known = ", ".join(sorted(set(SUITES) | set(ALIASES) | {"all"}))
            raise InputError(f"unknown check {n!r} (known: {known})")
        out += [p for p in picked if p not in out]
    return out


def cmd_check(args, out: TextIO) -> int:
    reports: list[CheckReport] = []
    for n in resolve_checks(args.checks):
        fn = SUITES[n]
        report = fn(**_suite_kwargs(fn, args))
        reports.append(report)
        out.write(report.render() + "\n")
    return 0 if all(r.passed for r in reports) else EXIT_CHECK


def _step_choices(state, kind: str, doc, inst, env):
    """(label, successor) pairs available from ``state``."""
    if kind == "es":
        return [(e, es_step(doc.es, state, e)) for e in es_enabled(doc.es, state)]
    if kind == "dcr":
        return sorted(((e, m) for e, m in dcr_transitions(doc.graph, state)), key=lambda x: x[0])
    moves = [(a, q) for a, q in transitions(inst, env, state) if not isinstance(a, In)]
    moves.sort(key=lambda x: (str(x[0]), canonical(x[1], inst)))
    return [(str(a), q) for a, q in moves]


def _show_state(state, kind: str) -> str:
    if kind == "es":
        return f"configuration {_fmt_set(state)}"
    if kind == "dcr":
        return f"marking {_fmt_marking(state)}"
    return f"process {drop_nils(state)}"


def cmd_step(args, out: TextIO, inp: TextIO) -> int:
    path = Path(args.file)
    kind = _kind(path, None)
    text = _read(path)
    inst = env = doc = None
    if kind == "es":
        doc = parse_es(text)
        state = doc.config or EMPTY
    elif kind == "dcr":
        doc = parse_dcr(text)
        state = doc.marking
    else:
        inst = make_pi_instance()
        env = inst.unit
        state = parse_pi(text)
    while True:
        out.write(_show_state(state, kind) + "\n")
        choices = _step_choices(state, kind, doc, inst, env)
        if not choices:
            out.write("no moves\n")
            return 0
        for i, (label, _) in enumerate(choices):
            out.write(f"  [{i}] {label}\n")
        out.write("> ")
        out.flush()
        line = inp.readline()
        if not line or line.strip() in ("q", "quit"):
            out.write("\n")
            return 0
        pick = line.strip()
        chosen = None
        if pick.isdigit() and int(pick) < len(choices):
            chosen = choices[int(pick)]
        else:
            chosen = next((c for c in choices if c[0] == pick), None)
        if chosen is None:
            out.write(f"no move {pick!r}\n")
            continue
        if kind == "dcr":
            state = dcr_execute(doc.graph, state, chosen[0])
        else:
            state = chosen[1]


def _load_refinement(path: Path) -> dict[str, EventStructure]:
    """Lines ``label = file.es``; paths are relative to the mapping file."""
    ref: dict[str, EventStructure] = {}
    for no, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label, eq, target = (s.strip() for s in line.partition("="))
        if not eq or not label or not target:
            raise ParseError(no, f"expected 'label = file.es', got {line!r}")
        if label in ref:
            raise ParseError(no, f"label {label} mapped twice")
        doc = parse_es(_read(path.parent / target))
        ref[label] = doc.es
    return ref


def cmd_refine(args, out: TextIO) -> int:
    doc = parse_es(_read(Path(args.file)))
    ref = _load_refinement(Path(args.mapping))
    refined = refine_es(doc.es, ref)
    out.write(serialize_es(refined))
    left = espsi(refined, EMPTY)
    right = refine_psi(espsi(doc.es, EMPTY), ref, doc.es.label_map())
    same = canonical(left, EVENT_PSI) == canonical(right, EVENT_PSI)
    out.write(f"# encoding commutes with refinement: {'yes' if same else 'no'}\n")
    return 0 if same else EXIT_CHECK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psiforge", description="Psi-calculus encodings of event structures and DCR graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def explore_flags(p):
        p.add_argument("file")
        p.add_argument("--encode", choices=["espsi", "dcrpsi"], default=None)
        p.add_argument("--depth", type=int, default=8)
        p.add_argument("--max-states", type=int, default=10_000)
        p.add_argument("--budget", type=int, default=1_000_000, help="unfolding budget per exploration")

    p = sub.add_parser("encode", help="print the encoded process")
    p.add_argument("file")
    p.add_argument("--encode", choices=["espsi", "dcrpsi"], default=None)

    p = sub.add_parser("lts", help="explore the transition graph")
    explore_flags(p)
    p.add_argument("--format", choices=["text", "dot"], default="text")

    p = sub.add_parser("dot", help="explore and print Graphviz DOT")
    explore_flags(p)

    p = sub.add_parser("check", help="run property suites")
    p.add_argument("checks", nargs="+", metavar="CHECK")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--random", type=int, default=None, metavar="N", help="number of random inputs")
    p.add_argument("--max-events", type=int, default=None, metavar="K")
    p.add_argument("--depth", type=int, default=None, metavar="D")
    p.add_argument("--max-states", type=int, default=None, metavar="S")

    p = sub.add_parser("step", help="step through a model interactively")
    p.add_argument("file")

    p = sub.add_parser("refine", help="refine an event structure")
    p.add_argument("file")
    p.add_argument("mapping", help="file of 'label = image.es' lines")
    return ap


def main(argv: list[str] | None = None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    inp = inp or sys.stdin
    try:
        match args.command:
            case "encode":
                return cmd_encode(args, out)
            case "lts":
                return cmd_lts(args, out)
            case "dot":
                return cmd_dot(args, out)
            case "check":
                return cmd_check(args, out)
            case "step":
                return cmd_step(args, out, inp)
            case "refine":
                return cmd_refine(args, out)
    except BudgetExceeded as exc:
        print(f"psiforge: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ParseError, ValidationError, InvalidEventStructure, InvalidConfiguration,
            ShapeError, MissingLabel, TooLarge, ValueError) as exc:
        print(f"psiforge: {exc}", file=sys.stderr)
        return EXIT_INPUT
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
