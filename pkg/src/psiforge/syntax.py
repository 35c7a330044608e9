"""Text formats for event structures, DCR graphs and pi-terms.

Both model formats are line based.  Each line is ``key: body``; blank lines
and lines starting with ``#`` are ignored, and a trailing ``# ...`` ends a
line.  In ``conflict:`` bodies ``#`` is also the conflict operator, so there
a comment may only start after a complete ``x # y`` pair.

Names are runs of letters, digits, ``_``, ``-`` and ``'``.  Dots are
reserved for refined pair names and rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from psiforge.dcr import RELATIONS, DcrGraph, InvalidGraph, Marking
from psiforge.events import EventStructure, is_configuration, transitive_closure, validate_es
from psiforge.process import Bang, Input, Nil, Output, Par, Process, Restrict
from psiforge.terms import Name, Var, name


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(ValueError):
    pass


NAME_RE = re.compile(r"[A-Za-z0-9_'\-]+")
_KEY_RE = re.compile(r"^\s*([A-Za-z]+)\s*:(.*)$")


def _name(tok: str, line: int) -> Name:
    if "." in tok:
        raise ParseError(line, f"name {tok!r} contains a dot (reserved for refinement pairs)")
    if not NAME_RE.fullmatch(tok):
        raise ParseError(line, f"bad name {tok!r}")
    return name(tok)


def _drop_comment(body: str) -> str:
    i = body.find("#")
    return body if i < 0 else body[:i]


def _conflict_body(body: str, line: int) -> list[tuple[Name, Name]]:
    """Pairs ``x # y`` separated by ``;``; a later ``#`` starts a comment."""
    pairs = []
    rest = body
    while True:
        m = re.match(r"\s*([^\s#;]+)\s*#\s*([^\s#;]+)\s*", rest)
        if not m:
            if rest.strip() and not rest.lstrip().startswith("#"):
                raise ParseError(line, f"expected 'x # y', got {rest.strip()!r}")
            return pairs
        pairs.append((_name(m.group(1), line), _name(m.group(2), line)))
        rest = rest[m.end():]
        if rest.startswith(";"):
            rest = rest[1:]
        elif rest and not rest.startswith("#"):
            raise ParseError(line, f"expected ';' or end of line, got {rest.strip()!r}")
        else:
            return pairs


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _KEY_RE.match(raw)
        if not m:
            raise ParseError(no, f"expected 'key: ...', got {stripped!r}")
        yield no, m.group(1), m.group(2)


def _names(body: str, line: int) -> list[Name]:
    return [_name(t, line) for t in _drop_comment(body).split()]


def _items(body: str) -> list[str]:
    return [s.strip() for s in _drop_comment(body).split(";") if s.strip()]


def _labels(body: str, line: int) -> dict[Name, str]:
    out: dict[Name, str] = {}
    for tok in _drop_comment(body).split():
        e, eq, lab = tok.partition("=")
        if not eq or not lab:
            raise ParseError(line, f"expected 'event=label', got {tok!r}")
        e = _name(e, line)
        if e in out:
            raise ParseError(line, f"duplicate label for {e}")
        out[e] = lab
    return out


def _once(seen: set[str], key: str, line: int) -> None:
    if key in seen:
        raise ParseError(line, f"duplicate '{key}' declaration")
    seen.add(key)


def _declare_events(body: str, line: int) -> list[Name]:
    evs = _names(body, line)
    dup = {e for e in evs if evs.count(e) > 1}
    if dup:
        raise ParseError(line, f"event {sorted(dup)[0]} declared twice")
    return evs


# ---------------------------------------------------------------- event structures


@dataclass(frozen=True)
class EsDocument:
    es: EventStructure
    config: frozenset[Name] | None = None


def parse_es(text: str) -> EsDocument:
    """Parse the event-structure format; causality is transitively closed.

    Conflict is taken as written: a missing inherited conflict is reported
    as a heredity violation rather than silently added.
    """
    seen: set[str] = set()
    events: list[Name] = []
    causes: dict[tuple[Name, Name], int] = {}
    conflict: dict[frozenset, int] = {}
    labels: dict[Name, str] = {}
    config: list[Name] | None = None
    for no, key, body in _lines(text):
        match key:
            case "events":
                _once(seen, key, no)
                events = _declare_events(body, no)
            case "causes":
                for item in _items(body):
                    parts = [p.strip() for p in item.split("<")]
                    if len(parts) != 2 or not all(parts):
                        raise ParseError(no, f"expected 'a < b', got {item!r}")
                    pair = (_name(parts[0], no), _name(parts[1], no))
                    if pair in causes:
                        raise ParseError(no, f"duplicate cause {pair[0]} < {pair[1]}")
                    causes[pair] = no
            case "conflict":
                for a, b in _conflict_body(body, no):
                    pair = frozenset((a, b))
                    if pair in conflict:
                        raise ParseError(no, f"duplicate conflict {a} # {b}")
                    conflict[pair] = no
            case "labels":
                _once(seen, key, no)
                labels = _labels(body, no)
            case "config":
                _once(seen, key, no)
                config = _names(body, no)
            case _:
                raise ParseError(no, f"unknown key {key!r}")
    if "events" not in seen:
        raise ParseError(1, "missing 'events' declaration")
    evs = frozenset(events)
    mentioned = [e for a, b in causes for e in (a, b)] + [e for p in conflict for e in p]
    mentioned += list(labels) + list(config or [])
    for e in mentioned:
        if e not in evs:
            raise ValidationError(f"undeclared event {e}")
    for a, b in causes:
        if a == b:
            raise ValidationError(f"causality-irreflexive: {a} < {a}")
    lt = transitive_closure(causes)
    es = EventStructure(evs, frozenset(lt), frozenset(conflict), labels)
    bad = validate_es(es)
    if bad:
        raise ValidationError("; ".join(str(v) for v in bad))
    c = None
    if config is not None:
        c = frozenset(config)
        if not is_configuration(es, c):
            raise ValidationError(f"config {{{','.join(sorted(c))}}} is not a configuration")
    return EsDocument(es, c)


def serialize_es(es: EventStructure, config: frozenset[Name] | None = None) -> str:
    lines = ["events: " + " ".join(es.sorted_events()) if es.events else "events:"]
    if es.causes:
        lines.append("causes: " + "; ".join(f"{a} < {b}" for a, b in sorted(es.causes)))
    conf = sorted(tuple(sorted(p)) for p in es.conflict if len(p) == 2)
    if conf:
        lines.append("conflict: " + "; ".join(f"{a} # {b}" for a, b in conf))
    labs = [f"{e}={es.label(e)}" for e in es.sorted_events() if es.label(e) != e]
    if labs:
        lines.append("labels: " + " ".join(labs))
    if config is not None:
        lines.append("config: " + " ".join(sorted(config)) if config else "config:")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- DCR graphs

ARROWS = {
    "condition": ("conditions", "->*"),
    "response": ("responses", "*->"),
    "milestone": ("milestones", "-><"),
    "include": ("includes", "->+"),
    "exclude": ("excludes", "->%"),
}
_REL_KEY = {rel: key for key, (rel, _) in ARROWS.items()}


@dataclass(frozen=True)
class DcrDocument:
    graph: DcrGraph
    marking: Marking


def _marking_body(body: str, line: int) -> dict[str, list[Name]]:
    out: dict[str, list[Name]] = {}
    rest = _drop_comment(body).strip()
    for m in re.finditer(r"(\w+)\s*=\s*\{([^}]*)\}|(\S+)", rest):
        if m.group(3) is not None:
            raise ParseError(line, f"expected 'part={{...}}', got {m.group(3)!r}")
        part = m.group(1)
        if part not in Marking._fields:
            raise ParseError(line, f"unknown marking part {part!r}")
        if part in out:
            raise ParseError(line, f"duplicate marking part {part!r}")
        out[part] = [_name(t.strip(), line) for t in m.group(2).split(",") if t.strip()]
    missing = [p for p in Marking._fields if p not in out]
    if missing:
        raise ParseError(line, f"marking lacks {missing[0]!r}")
    return out


def parse_dcr(text: str) -> DcrDocument:
    """Parse the DCR format.  An omitted marking means nothing executed,
    nothing pending, everything included."""
    seen: set[str] = set()
    events: list[Name] = []
    rels: dict[str, set] = {rel: set() for rel in RELATIONS}
    labels: dict[Name, str] = {}
    mark: dict[str, list[Name]] | None = None
    for no, key, body in _lines(text):
        if key in ARROWS:
            rel, arrow = ARROWS[key]
            for item in _items(body):
                parts = [p.strip() for p in item.split(arrow)]
                if len(parts) != 2 or not all(parts):
                    raise ParseError(no, f"expected 'a {arrow} b', got {item!r}")
                pair = (_name(parts[0], no), _name(parts[1], no))
                if pair in rels[rel]:
                    raise ParseError(no, f"duplicate {key} {pair[0]} {arrow} {pair[1]}")
                rels[rel].add(pair)
            continue
        match key:
            case "events":
                _once(seen, key, no)
                events = _declare_events(body, no)
            case "marking":
                _once(seen, key, no)
                mark = _marking_body(body, no)
            case "labels":
                _once(seen, key, no)
                labels = _labels(body, no)
            case _:
                raise ParseError(no, f"unknown key {key!r}")
    if "events" not in seen:
        raise ParseError(1, "missing 'events' declaration")
    evs = frozenset(events)
    for e in labels:
        if e not in evs:
            raise ValidationError(f"label for undeclared event {e}")
    try:
        g = DcrGraph(evs, labels=labels, **{rel: frozenset(v) for rel, v in rels.items()})
    except InvalidGraph as exc:
        raise ValidationError(str(exc)) from None
    if mark is None:
        m = g.initial_marking()
    else:
        m = Marking(*(frozenset(mark[p]) for p in Marking._fields))
        for part, s in zip(Marking._fields, m):
            if not s <= evs:
                raise ValidationError(f"marking {part} mentions undeclared event {sorted(s - evs)[0]}")
    return DcrDocument(g, m)


def _set(s) -> str:
    return "{" + ",".join(sorted(s)) + "}"


def serialize_dcr(g: DcrGraph, m: Marking | None = None) -> str:
    if m is None:
        m = g.initial_marking()
    lines = ["events: " + " ".join(sorted(g.events)) if g.events else "events:"]
    lines.append("marking: " + " ".join(f"{p}={_set(s)}" for p, s in zip(Marking._fields, m)))
    for rel in RELATIONS:
        key = _REL_KEY[rel]
        arrow = ARROWS[key][1]
        for a, b in sorted(getattr(g, rel)):
            lines.append(f"{key}: {a} {arrow} {b}")
    labs = [f"{e}={g.label(e)}" for e in sorted(g.events) if g.label(e) != e]
    if labs:
        lines.append("labels: " + " ".join(labs))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- pi-terms

_PI_TOKEN = re.compile(r"\s*(new\b|[A-Za-z_][A-Za-z0-9_']*|[0!|().<>])")


class _PiParser:
    """Recursive descent over ``P ::= S ('|' S)*`` with

    ``S ::= 0 | !S | new a. S | a<b>[.S] | a(x)[.S] | (P)``.
    """

    def __init__(self, text: str):
        self.toks: list[str] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _PI_TOKEN.match(text, pos)
            if not m:
                raise ParseError(1, f"unexpected character {text[pos:].strip()[:1]!r} at column {pos + 1}")
            self.toks.append(m.group(1))
            pos = m.end()
        self.i = 0
        self.var_ids: set[str] = set()

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ParseError(1, f"expected {want or 'a token'}, got {tok or 'end of input'}")
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok == "new":
            raise ParseError(1, f"expected a name, got {tok!r}")
        return tok

    def term(self, scope: dict[str, Var]):
        x = self.ident()
        return scope.get(x, name(x))

    def process(self, scope: dict[str, Var]) -> Process:
        procs = [self.single(scope)]
        while self.peek() == "|":
            self.take()
            procs.append(self.single(scope))
        out = procs[-1]
        for p in reversed(procs[:-1]):
            out = Par(p, out)
        return out

    def cont(self, scope: dict[str, Var]) -> Process:
        if self.peek() == ".":
            self.take()
            return self.single(scope)
        return Nil()

    def single(self, scope: dict[str, Var]) -> Process:
        tok = self.peek()
        match tok:
            case "0":
                self.take()
                return Nil()
            case "!":
                self.take()
                return Bang(self.single(scope))
            case "(":
                self.take()
                p = self.process(scope)
                self.take(")")
                return p
            case "new":
                self.take()
                a = self.ident()
                self.take(".")
                inner = {k: v for k, v in scope.items() if k != a}
                return Restrict(name(a), self.single(inner))
        chan = self.term(scope)
        if self.peek() == "<":
            self.take()
            payload = self.term(scope)
            self.take(">")
            return Output(chan, payload, self.cont(scope))
        if self.peek() == "(":
            self.take()
            x = self.ident()
            self.take(")")
            # nested inputs may reuse a name; keep variable ids unique
            vid, k = x, 1
            while vid in self.var_ids:
                vid, k = f"{x}_{k}", k + 1
            self.var_ids.add(vid)
            v = Var(vid)
            return Input(chan, (v,), v, self.cont({**scope, x: v}))
        raise ParseError(1, f"expected '<' or '(' after {tok!r}")


def parse_pi(text: str) -> Process:
    """Parse ``a<b>.P``, ``a(x).P``, ``P|Q``, ``new a. P``, ``!P`` and ``0``.

    ``|`` binds loosest; prefixes, ``new`` and ``!`` extend over a single
    prefix chain, so ``new a. P | Q`` is ``(new a. P) | Q``.
    """
    p = _PiParser(text)
    out = p.process({})
    if p.peek() is not None:
        raise ParseError(1, f"unexpected {p.peek()!r}")
    return out
