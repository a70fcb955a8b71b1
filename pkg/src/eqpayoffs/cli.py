"""``eqpayoffs``: build games with prescribed equilibrium payoffs and verify them.

Exit codes: 0 verified (or nothing to verify), 1 verification failed,
2 input error, 3 budget exceeded.

Every command that writes ``--out FILE`` also writes ``FILE.report.json``
and, for each verdict, ``FILE.<verdict>.cert``.  Reports hold sha256
digests of all inputs and outputs so reruns can be diffed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from eqpayoffs import constructors as C
from eqpayoffs import formats as F
from eqpayoffs.core import BudgetExceeded, Game, GameError, Polytope, RectangleUnion, rational
from eqpayoffs.equilibria import (
    ce_payoff_polytope,
    ce_vertex_enumeration,
    nash_equilibria,
    nep_rectangles,
    verify_perturbation_budget,
)
from eqpayoffs.geometry import (
    convex_hull,
    polytope_contains,
    polytope_equal,
    rectangle_union_equal,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_BUDGET = 2**24


class InputError(Exception):
    pass


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    verdicts: list[dict[str, object]] = field(default_factory=list)
    details: dict[str, object] = field(default_factory=dict)
    seconds: float = 0.0

    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def to_json(self) -> str:
        return json.dumps({
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "verdicts": self.verdicts,
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }, indent=2, sort_keys=True) + "\n"


class _Run:
    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.report = RunReport(args.command + (f" {args.kind}" if getattr(args, "kind", None) else ""))
        self.pending: list[tuple[Path, str]] = []

    # inputs
    def read(self, path: str | None, what: str) -> str:
        if path is None:
            raise InputError(f"--{what} is required here")
        p = Path(path)
        try:
            data = p.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.report.inputs[str(p)] = _digest(data)
        return data.decode("utf-8")

    def game(self) -> Game:
        return F.parse_game(self.read(self.args.game, "game"), self.args.game)

    def polytope(self) -> Polytope:
        return F.parse_polytope(self.read(self.args.polytope, "polytope"), self.args.polytope)

    def union(self) -> RectangleUnion:
        return F.parse_rectangle_union(self.read(self.args.union, "union"), self.args.union)

    def points(self, flag: str = "points"):
        path = getattr(self.args, flag)
        return F.parse_points(self.read(path, flag), path)

    # outputs
    def out_path(self) -> Path | None:
        return None if self.args.out is None else Path(self.args.out)

    def emit(self, text: str, suffix: str = "") -> None:
        out = self.out_path()
        if out is None:
            if not suffix:
                sys.stdout.write(text)
            return
        self.pending.append((Path(str(out) + suffix), text))

    def verdict(self, name: str, passed: bool, cert: str) -> None:
        entry: dict[str, object] = {"name": name, "passed": bool(passed)}
        out = self.out_path()
        if out is not None:
            path = Path(f"{out}.{name}.cert")
            self.pending.append((path, cert))
            entry["certificate"] = str(path)
        self.report.verdicts.append(entry)

    def commit(self, started: float) -> None:
        out = self.out_path()
        if out is None:
            self.report.seconds = time.perf_counter() - started
            sys.stderr.write(self.report.to_json())
            return
        targets = [p for p, _ in self.pending] + [Path(f"{out}.report.json")]
        if not self.args.force:
            clash = [str(p) for p in targets if p.exists()]
            if clash:
                raise InputError(f"refusing to overwrite {', '.join(clash)} (use --force)")
        for p, text in self.pending:
            F.write_file(p, text)
            self.report.outputs[str(p)] = _digest(text.encode("utf-8"))
        self.report.seconds = time.perf_counter() - started
        F.write_file(Path(f"{out}.report.json"), self.report.to_json())


# -- verification helpers --------------------------------------------------------


def _set_cert(kind: str, computed: Sequence[Sequence[Fraction]], target: Sequence[Sequence[Fraction]],
              equal: bool) -> str:
    fields: list[tuple[str, object]] = [("equal", "yes" if equal else "no")]
    fields += [("computed", tuple(v)) for v in computed]
    fields += [("target", tuple(v)) for v in target]
    return F.format_certificate(kind, fields)


def _check_cep(run: _Run, g: Game, target: Polytope, budget: int) -> None:
    cep = ce_payoff_polytope(g, budget=budget)
    ok = polytope_equal(cep, target)
    run.verdict("cep", ok, _set_cert("cep-equality", cep.vertices, target.vertices, ok))


def _check_nep(run: _Run, g: Game, target: RectangleUnion, budget: int) -> None:
    nep = nep_rectangles(g, budget)
    ok = rectangle_union_equal(nep, target)
    run.verdict("nep", ok, _set_cert("nep-equality", nep.canonical().rectangles,
                                     target.canonical().rectangles, ok))


def _nash_boxes(g: Game, budget: int) -> list[tuple[Fraction, ...]]:
    es = nash_equilibria(g, budget)
    return sorted({tuple(x for lo_hi in c.payoff_box for x in lo_hi) for c in es.components})


def _check_nep_preserved(run: _Run, base: Game, g: Game, budget: int) -> None:
    if g.num_players == 2:
        _check_nep(run, g, nep_rectangles(base, budget), budget)
        return
    got, want = _nash_boxes(g, budget), _nash_boxes(base, budget)
    run.verdict("nep", got == want, _set_cert("nep-boxes", got, want, got == want))


# -- commands ---------------------------------------------------------------------


def cmd_construct(run: _Run) -> int:
    a = run.args
    auto = not a.strict
    budget = a.budget
    if a.kind == "diagonal":
        verts = run.points("polytope") if a.polytope else run.points()
        g = C.diagonal_game(verts, auto_shift=auto) if len(verts[0]) == 2 else \
            C.diagonal_game_n(verts, auto_shift=auto)
        if a.verify:
            _check_cep(run, g, Polytope(tuple(verts)), budget)
            if g.num_players == 2:
                _check_nep(run, g, RectangleUnion.from_points(verts), budget)
            else:
                want = sorted({tuple(x for c in v for x in (c, c)) for v in verts})
                got = _nash_boxes(g, budget)
                run.verdict("nep", got == want, _set_cert("nep-boxes", got, want, got == want))
    elif a.kind == "rectangles":
        u = run.union()
        g = C.rectangle_union_game(u, auto_shift=auto)
        if a.verify:
            _check_nep(run, g, u, budget)
            _check_cep(run, g, convex_hull(u.corners(), 2), budget)
    elif a.kind == "adjoin":
        base = run.game()
        pts = run.points()
        if len(pts) != 1:
            raise InputError("--points must hold exactly one point for adjoin")
        g = C.adjoin_ce_point(base, pts[0], auto_shift=auto)
        if a.verify:
            _check_nep_preserved(run, base, g, budget)
            cep = ce_payoff_polytope(base, budget=budget)
            _check_cep(run, g, Polytope(cep.vertices + (pts[0],)), budget)
    elif a.kind in ("prescribe", "prescribe-n"):
        base, target = run.game(), run.polytope()
        g = C.prescribe_payoffs(base, target, budget=budget) if a.kind == "prescribe" else \
            C.prescribe_payoffs_n(base, target)
        if a.verify:
            _check_nep_preserved(run, base, g, budget)
            _check_cep(run, g, target, budget)
    elif a.kind == "perturbed":
        if a.alpha is None:
            raise InputError("--alpha is required for perturbed")
        family = C.GammaFamily(run.points(), run.points("polytope"), auto_shift=auto)
        g = family.game(a.alpha)
        if a.verify:
            cert = verify_perturbation_budget(family, a.alpha)
            run.verdict("budget", cert.certified, _budget_cert(cert))
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError(f"unknown kind {a.kind}")
    run.emit(F.format_game(g))
    run.report.details["strategy_counts"] = list(g.strategy_counts)
    return EXIT_OK if run.report.passed() else EXIT_FAILED


def _budget_cert(cert) -> str:
    w = cert.witness
    return F.format_certificate("perturbation-budget", [
        ("certified", "yes" if cert.certified else "no"),
        ("alpha", cert.alpha),
        ("required_radius", cert.required),
        ("safe_radius", cert.radius),
        ("limiting_kind", w.kind),
        ("limiting_equilibrium", w.index + 1),
        ("limiting_player", w.player + 1),
        ("recommended", w.recommended + 1),
        ("deviation", w.deviation + 1),
        ("slack", w.slack),
        ("weight", w.weight),
    ])


def cmd_analyze(run: _Run) -> int:
    a = run.args
    g = run.game()
    if a.what == "nash":
        run.emit(F.format_nash_set(nash_equilibria(g, a.budget)))
    elif a.what == "ce-payoffs":
        run.emit(F.format_polytope(ce_payoff_polytope(g, budget=a.budget)))
    elif a.what == "ce-vertices":
        run.emit(F.format_distributions(ce_vertex_enumeration(g, budget=a.budget)))
    else:
        if g.num_players != 2:
            raise InputError("rectangles are defined for two-player games")
        run.emit(F.format_rectangle_union(nep_rectangles(g, a.budget).canonical()))
    return EXIT_OK


def cmd_perturb(run: _Run) -> int:
    from eqpayoffs.genericity import run_trials, summarize

    a = run.args
    if a.alpha is None:
        raise InputError("--alpha is required")
    family = C.GammaFamily(run.points(), run.points("polytope"), auto_shift=not a.strict)
    if len(family.u_points[0]) != 2:
        raise InputError("perturbation trials are for planar targets")
    target = Polytope(family.p_vertices)
    outside = [u for u in family.u_points if not polytope_contains(target, u)]
    if outside:
        raise C.ContainmentError("Nash target lies outside the correlated target", outside[0])
    alpha = rational(a.alpha)
    radius = alpha / 2 if a.radius is None else rational(a.radius)
    cert = verify_perturbation_budget(family, alpha)
    run.report.details["budget"] = {"certified": cert.certified, "safe_radius": str(cert.radius)}
    if not cert.certified and not a.force:
        raise InputError(f"alpha = {alpha} is not certified (safe radius {cert.radius}); "
                         "use --force to run anyway")
    if radius > cert.radius and not a.force:
        raise InputError(f"radius {radius} exceeds the certified radius {cert.radius}")
    verdicts = run_trials(family, alpha, radius, a.seed, a.trials, a.epsilon, a.budget)
    rows = []
    for v in verdicts:
        rows.append(("trial", (v.seed, "pass" if v.passed else "fail", "strict" if v.strict else "weak",
                               v.nep_distance, v.cep_distance)))
    cert_text = F.format_certificate("perturbation-trials", [
        ("alpha", alpha), ("radius", radius), ("epsilon", rational(a.epsilon)),
        ("columns", ("seed", "verdict", "strictness", "nep_distance", "cep_distance_bound")),
        *rows,
    ])
    counts = summarize(verdicts)
    run.report.details["counts"] = counts
    run.verdict("budget", cert.certified, _budget_cert(cert))
    run.verdict("trials", counts["passed"] == counts["trials"], cert_text)
    run.emit(F.format_certificate("perturbation-summary", sorted(counts.items())))
    return EXIT_OK if run.report.passed() else EXIT_FAILED


def cmd_plot(run: _Run) -> int:
    from eqpayoffs.plot import Layer, render_svg

    a = run.args
    layers = []
    for path in a.polytope or ():
        layers.append(Layer(Path(path).name, F.parse_polytope(run.read(path, "polytope"), path)))
    for path in a.union or ():
        layers.append(Layer(Path(path).name, F.parse_rectangle_union(run.read(path, "union"), path)))
    for path in a.points or ():
        layers.append(Layer(Path(path).name, tuple(F.parse_points(run.read(path, "points"), path))))
    if not layers:
        raise InputError("nothing to plot: give --polytope, --union or --points")
    try:
        run.emit(render_svg(layers))
    except GameError as exc:
        raise InputError(str(exc)) from None
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file; report and certificates go next to it")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="enumeration budget (support pairs, LP probes, rays)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqpayoffs", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a game from payoff-set targets")
    c.add_argument("kind", choices=["diagonal", "rectangles", "adjoin", "prescribe", "prescribe-n",
                                    "perturbed"])
    c.add_argument("--polytope")
    c.add_argument("--union")
    c.add_argument("--game")
    c.add_argument("--points")
    c.add_argument("--alpha")
    c.add_argument("--verify", action="store_true", help="check the targets with the engine")
    c.add_argument("--strict", action="store_true", help="reject nonpositive data instead of shifting")
    _common(c)

    an = sub.add_parser("analyze", help="compute equilibrium sets of a game")
    an.add_argument("--game", required=True)
    an.add_argument("--what", required=True, choices=["nash", "ce-payoffs", "ce-vertices", "rectangles"])
    _common(an)

    pe = sub.add_parser("perturb", help="sample games near Gamma_alpha and check closeness")
    pe.add_argument("--points", required=True, help="Nash payoff targets U")
    pe.add_argument("--polytope", required=True, help="correlated payoff target P")
    pe.add_argument("--alpha")
    pe.add_argument("--radius", help="ball radius (default alpha/2)")
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--trials", type=int, default=1)
    pe.add_argument("--epsilon", default="1/10")
    pe.add_argument("--force", action="store_true",
                    help="overwrite outputs and allow uncertified alpha or radius")
    pe.add_argument("--out")
    pe.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    pe.add_argument("--strict", action="store_true", help="build Gamma_alpha without shifting")

    pl = sub.add_parser("plot", help="draw planar payoff sets as SVG")
    pl.add_argument("--polytope", action="append")
    pl.add_argument("--union", action="append")
    pl.add_argument("--points", action="append")
    pl.add_argument("--out")
    pl.add_argument("--force", action="store_true")
    return parser


COMMANDS = {"construct": cmd_construct, "analyze": cmd_analyze, "perturb": cmd_perturb,
            "plot": cmd_plot}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    run = _Run(args)
    started = time.perf_counter()
    try:
        for flag in ("alpha", "radius", "epsilon"):
            value = getattr(args, flag, None)
            if value is not None:
                try:
                    rational(value)
                except ValueError as exc:
                    raise InputError(f"--{flag}: {exc}") from None
        code = COMMANDS[args.command](run)
        run.commit(started)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except C.ContainmentError as exc:
        witness = " ".join(str(v) for v in exc.witness)
        print(f"error: {exc} (witness {witness})", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, GameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
