"""Line-based text formats: EGF v1 games, payoff sets, distributions, certificates.

All formats are UTF-8, ``#`` starts a comment, blank lines are ignored and
rationals are written ``num`` or ``num/den``.  Strategy indices are 1-based
on disk and 0-based in memory.  Writers are deterministic: the same object
always produces the same bytes.

EGF v1::

    egf 1
    players 2
    strategies 2 2
    payoff 1 1 : 1 1
    payoff 1 2 : 0 0
    ...

Polytope: one vertex per line.  Rectangle union: one ``a b c d`` line per
rectangle.  Distribution: ``mass i1 ... in : w`` lines; a list of
distributions separates entries with ``vertex k`` lines.  Certificates:
``cert <kind>`` followed by ``key : values`` lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from eqpayoffs.core import (
    CorrelatedDistribution,
    Game,
    GameError,
    MixedProfile,
    Point,
    Polytope,
    RectangleUnion,
)


class FormatError(GameError):
    """Malformed input; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<text>") -> None:
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source


def fmt(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


def _lines(text: str) -> Iterator[tuple[int, list[_Token]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            tokens.append(_Token(part, no, col + 1))
            col += len(part)
        if tokens:
            yield no, tokens


def _rational(tok: _Token, source: str) -> Fraction:
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"expected a rational number, got {tok.text!r}", tok.line, tok.column,
                          source) from None


def _int(tok: _Token, source: str, lo: int = 1) -> int:
    try:
        v = int(tok.text)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok.text!r}", tok.line, tok.column,
                          source) from None
    if v < lo:
        raise FormatError(f"expected an integer >= {lo}, got {v}", tok.line, tok.column, source)
    return v


def _keyword(tokens: list[_Token], word: str, source: str) -> None:
    if tokens[0].text != word:
        raise FormatError(f"expected {word!r}, got {tokens[0].text!r}", tokens[0].line,
                          tokens[0].column, source)


def _split_colon(tokens: list[_Token], source: str) -> tuple[list[_Token], list[_Token]]:
    marks = [k for k, t in enumerate(tokens) if t.text == ":"]
    if len(marks) != 1:
        t = tokens[marks[1]] if len(marks) > 1 else tokens[-1]
        raise FormatError("expected exactly one ':' separated by spaces", t.line, t.column, source)
    k = marks[0]
    return tokens[1:k], tokens[k + 1:]


# -- games ---------------------------------------------------------------------


def parse_game(text: str, source: str = "<text>") -> Game:
    lines = list(_lines(text))
    if len(lines) < 3:
        raise FormatError("an EGF file needs header, players and strategies lines",
                          lines[-1][0] if lines else 1, 1, source)
    (no, head), (_, players), (_, strategies) = lines[:3]
    if [t.text for t in head] != ["egf", "1"]:
        raise FormatError("expected header 'egf 1'", no, head[0].column, source)
    _keyword(players, "players", source)
    if len(players) != 2:
        raise FormatError("expected 'players n'", players[0].line, players[0].column, source)
    n = _int(players[1], source, lo=2)
    _keyword(strategies, "strategies", source)
    if len(strategies) != n + 1:
        raise FormatError(f"expected {n} strategy counts", strategies[0].line,
                          strategies[0].column, source)
    counts = tuple(_int(t, source) for t in strategies[1:])
    probe = Game(counts, tuple((Fraction(0),) * n for _ in range(math.prod(counts))))
    table: list[Point | None] = [None] * probe.num_profiles
    for no, tokens in lines[3:]:
        _keyword(tokens, "payoff", source)
        idx, vals = _split_colon(tokens, source)
        if len(idx) != n:
            raise FormatError(f"expected {n} strategy indices", no, tokens[0].column, source)
        if len(vals) != n:
            t = vals[0] if vals else tokens[-1]
            raise FormatError(f"expected {n} payoffs", no, t.column, source)
        prof = []
        for t, k in zip(idx, counts):
            v = _int(t, source)
            if v > k:
                raise FormatError(f"strategy {v} out of range 1..{k}", no, t.column, source)
            prof.append(v - 1)
        at = probe.index(prof)
        if table[at] is not None:
            raise FormatError(f"profile {' '.join(t.text for t in idx)} given twice", no,
                              idx[0].column, source)
        table[at] = tuple(_rational(t, source) for t in vals)
    missing = [k for k, u in enumerate(table) if u is None]
    if missing:
        prof = " ".join(str(s + 1) for s in probe.profile_at(missing[0]))
        last = lines[-1][0]
        raise FormatError(f"{len(missing)} profiles have no payoff, first {prof}", last, 1, source)
    return Game(counts, tuple(table))  # type: ignore[arg-type]


def format_game(g: Game) -> str:
    out = ["egf 1", f"players {g.num_players}",
           "strategies " + " ".join(str(k) for k in g.strategy_counts)]
    for prof, u in zip(g.profiles(), g.table):
        out.append("payoff " + " ".join(str(s + 1) for s in prof) + " : "
                   + " ".join(fmt(v) for v in u))
    return "\n".join(out) + "\n"


# -- payoff sets ---------------------------------------------------------------


def _point_lines(text: str, source: str) -> list[tuple[int, Point]]:
    out = []
    for no, tokens in _lines(text):
        out.append((no, tuple(_rational(t, source) for t in tokens)))
    return out


def parse_points(text: str, source: str = "<text>") -> list[Point]:
    rows = _point_lines(text, source)
    if not rows:
        raise FormatError("no points given", 1, 1, source)
    dim = len(rows[0][1])
    for no, p in rows:
        if len(p) != dim:
            raise FormatError(f"expected {dim} coordinates, got {len(p)}", no, 1, source)
    return [p for _, p in rows]


def parse_polytope(text: str, source: str = "<text>") -> Polytope:
    return Polytope(tuple(parse_points(text, source)))


def format_points(points: Iterable[Sequence[Fraction]]) -> str:
    return "".join(" ".join(fmt(v) for v in p) + "\n" for p in points)


def format_polytope(p: Polytope) -> str:
    return format_points(p.vertices)


def parse_rectangle_union(text: str, source: str = "<text>") -> RectangleUnion:
    rects = []
    for no, r in _point_lines(text, source):
        if len(r) != 4:
            raise FormatError(f"a rectangle line needs 'a b c d', got {len(r)} numbers", no, 1,
                              source)
        if r[0] > r[1] or r[2] > r[3]:
            raise FormatError("rectangle bounds must satisfy a <= b and c <= d", no, 1, source)
        rects.append(r)
    if not rects:
        raise FormatError("no rectangles given", 1, 1, source)
    return RectangleUnion(tuple(rects))


def format_rectangle_union(u: RectangleUnion) -> str:
    return format_points(sorted(u.rectangles))


# -- distributions and Nash sets -----------------------------------------------


def format_distribution(mu: CorrelatedDistribution) -> str:
    return "".join("mass " + " ".join(str(s + 1) for s in prof) + " : " + fmt(w) + "\n"
                   for prof, w in mu.weights)


def format_distributions(mus: Sequence[CorrelatedDistribution]) -> str:
    return "".join(f"vertex {k}\n" + format_distribution(mu) for k, mu in enumerate(mus, 1))


def parse_distributions(text: str, source: str = "<text>") -> list[CorrelatedDistribution]:
    groups: list[list[tuple[tuple[int, ...], Fraction]]] = []
    starts: list[int] = []
    for no, tokens in _lines(text):
        if tokens[0].text == "vertex":
            groups.append([])
            starts.append(no)
            continue
        _keyword(tokens, "mass", source)
        idx, vals = _split_colon(tokens, source)
        if len(vals) != 1:
            raise FormatError("expected one probability after ':'", no, tokens[-1].column, source)
        if not groups:
            groups.append([])
            starts.append(no)
        groups[-1].append((tuple(_int(t, source) - 1 for t in idx), _rational(vals[0], source)))
    out = []
    for start, items in zip(starts, groups):
        try:
            out.append(CorrelatedDistribution(tuple(items)))
        except GameError as exc:
            raise FormatError(str(exc), start, 1, source) from None
    return out


def format_mixed_profile(p: MixedProfile) -> str:
    return "".join(f"player {i + 1} : " + " ".join(fmt(v) for v in s) + "\n"
                   for i, s in enumerate(p.strategies))


def format_nash_set(es) -> str:
    """Components of a :class:`~eqpayoffs.equilibria.NashEquilibriumSet`."""
    out = [f"# {len(es.components)} components, {es.method}"]
    for k, c in enumerate(es.components, 1):
        out.append(f"component {k}")
        for i, sup in enumerate(c.supports):
            out.append(f"support {i + 1} : " + " ".join(str(s + 1) for s in sup))
        for i, poly in enumerate(c.strategies):
            for v in poly.vertices:
                out.append(f"vertex {i + 1} : " + " ".join(fmt(x) for x in v))
        for i, (lo, hi) in enumerate(c.payoff_box):
            out.append(f"payoff {i + 1} : {fmt(lo)} {fmt(hi)}")
    return "\n".join(out) + "\n"


# -- certificates ----------------------------------------------------------------


def format_certificate(kind: str, fields: Sequence[tuple[str, object]]) -> str:
    """``cert kind`` then one ``key : values`` line per field.

    Values may be rationals, ints, strings or sequences of those; ``None``
    fields are skipped.
    """
    out = [f"cert {kind}"]
    for key, value in fields:
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            text = " ".join(str(v) for v in value)
        else:
            text = str(value)
        out.append(f"{key} : {text}".rstrip())
    return "\n".join(out) + "\n"


def parse_certificate(text: str, source: str = "<text>") -> tuple[str, dict[str, list[str]]]:
    lines = list(_lines(text))
    if not lines or lines[0][1][0].text != "cert" or len(lines[0][1]) != 2:
        raise FormatError("expected 'cert <kind>'", lines[0][0] if lines else 1, 1, source)
    kind = lines[0][1][1].text
    fields: dict[str, list[str]] = {}
    for no, tokens in lines[1:]:
        if len(tokens) < 2 or tokens[1].text != ":":
            raise FormatError("expected 'key : values'", no, tokens[0].column, source)
        fields[tokens[0].text] = [t.text for t in tokens[2:]]
    return kind, fields


def lp_certificate(result) -> str:
    """Text form of an :class:`~eqpayoffs.lp.LPResult`."""
    return format_certificate("lp", [
        ("status", result.status.value),
        ("value", result.value),
        ("x", result.x),
        ("dual", result.dual),
        ("farkas", result.farkas),
        ("ray", result.ray),
    ])


def read_file(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_file(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
