import json

import pytest

from eqpayoffs.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from eqpayoffs.formats import parse_certificate, parse_game, parse_polytope, parse_rectangle_union

PENNIES = """egf 1
players 2
strategies 2 2
payoff 1 1 : 1 -1
payoff 1 2 : -1 1
payoff 2 1 : -1 1
payoff 2 2 : 1 -1
"""


@pytest.fixture
def files(tmp_path):
    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return put


def test_construct_diagonal(files, tmp_path):
    poly = files("P.txt", "1 2\n3 4\n")
    out = str(tmp_path / "D.egf")
    assert main(["construct", "diagonal", "--polytope", poly, "--verify", "--out", out]) == EXIT_OK
    g = parse_game(open(out).read())
    assert g.strategy_counts == (2, 2)
    assert g[(0, 1)] == (0, 2)
    report = json.loads(open(out + ".report.json").read())
    assert report["command"] == "construct diagonal"
    assert {v["name"] for v in report["verdicts"]} == {"cep", "nep"}
    assert all(v["passed"] for v in report["verdicts"])
    assert poly in report["inputs"]
    kind, fields = parse_certificate(open(out + ".cep.cert").read())
    assert fields["equal"] == ["yes"]


def test_construct_rectangles_round_trip(files, tmp_path, capsys):
    union = files("U.txt", "1 2 3 4\n")
    out = str(tmp_path / "R.egf")
    assert main(["construct", "rectangles", "--union", union, "--verify", "--out", out]) == EXIT_OK
    capsys.readouterr()
    assert main(["analyze", "--game", out, "--what", "rectangles"]) == EXIT_OK
    printed = capsys.readouterr().out
    assert parse_rectangle_union(printed).rectangles == ((1, 2, 3, 4),)


def test_prescribe_outside_point_is_an_input_error(files, capsys):
    game = files("G.egf", "egf 1\nplayers 2\nstrategies 1 1\npayoff 1 1 : 2 2\n")
    far = files("far.txt", "5 5\n6 6\n")
    assert main(["construct", "prescribe", "--game", game, "--polytope", far]) == EXIT_INPUT
    assert "witness 2 2" in capsys.readouterr().err


def test_analyze_ce_payoffs_and_nash(files, capsys):
    game = files("D.egf", "egf 1\nplayers 2\nstrategies 2 2\npayoff 1 1 : 1 2\npayoff 1 2 : 0 2\n"
                          "payoff 2 1 : 1 0\npayoff 2 2 : 3 4\n")
    assert main(["analyze", "--game", game, "--what", "ce-payoffs"]) == EXIT_OK
    assert len(parse_polytope(capsys.readouterr().out).vertices) == 2
    mp = files("MP.egf", PENNIES)
    assert main(["analyze", "--game", mp, "--what", "nash"]) == EXIT_OK
    text = capsys.readouterr().out
    assert text.count("component ") == 1
    assert "vertex 1 : 1/2 1/2" in text


def test_bad_file_reports_line_and_column(files, capsys):
    bad = files("bad.egf", "egf 1\nplayers 2\nstrategies 1 1\npayoff 1 1 : 1 q\n")
    assert main(["analyze", "--game", bad, "--what", "nash"]) == EXIT_INPUT
    assert "bad.egf:4:16:" in capsys.readouterr().err


def test_refuses_to_overwrite_without_force(files, tmp_path):
    poly = files("P.txt", "1 2\n3 4\n")
    out = str(tmp_path / "D.egf")
    args = ["construct", "diagonal", "--polytope", poly, "--out", out]
    assert main(args) == EXIT_OK
    assert main(args) == EXIT_INPUT
    assert main(args + ["--force"]) == EXIT_OK


def test_budget_exceeded_exit_code(files):
    game = files("D.egf", "egf 1\nplayers 2\nstrategies 2 2\npayoff 1 1 : 1 2\npayoff 1 2 : 0 2\n"
                          "payoff 2 1 : 1 0\npayoff 2 2 : 3 4\n")
    assert main(["analyze", "--game", game, "--what", "ce-vertices", "--budget", "0"]) == EXIT_BUDGET


def test_perturb(files, tmp_path):
    u = files("u.txt", "1 1\n")
    p = files("p.txt", "1 1\n3 3\n")
    out = str(tmp_path / "T")
    assert main(["perturb", "--points", u, "--polytope", p, "--alpha", "1/100", "--radius", "0",
                 "--trials", "1", "--out", out]) == EXIT_OK
    report = json.loads(open(out + ".report.json").read())
    assert report["details"]["counts"]["passed"] == 1
    kind, fields = parse_certificate(open(out + ".trials.cert").read())
    assert kind == "perturbation-trials" and fields["trial"][1] == "pass"


def test_perturb_refusal_and_failed_closeness(files, tmp_path):
    u = files("u.txt", "1 1\n")
    p = files("p.txt", "1 1\n3 3\n")
    assert main(["perturb", "--points", u, "--polytope", p, "--alpha", "0"]) == EXIT_INPUT
    # at alpha = epsilon the perturbed correlated set is too far from P
    out = str(tmp_path / "T")
    assert main(["perturb", "--points", u, "--polytope", p, "--alpha", "1/10", "--radius", "0",
                 "--out", out]) == EXIT_FAILED


def test_perturb_checks_containment(files):
    u = files("u.txt", "1 1\n")
    p = files("p.txt", "3 3\n")
    assert main(["perturb", "--points", u, "--polytope", p, "--alpha", "1/10"]) == EXIT_INPUT


def test_failed_verification_exit_code(files, monkeypatch):
    import eqpayoffs.cli as cli

    poly = files("P.txt", "1 2\n3 4\n")
    monkeypatch.setattr(cli, "ce_payoff_polytope", lambda g, budget=None: parse_polytope("0 0\n"))
    assert main(["construct", "diagonal", "--polytope", poly, "--verify"]) == EXIT_FAILED


def test_plot_is_byte_identical(files, tmp_path):
    seg = files("seg.txt", "1 1\n3 3\n")
    union = files("U.txt", "1 2 1 2\n")
    a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    for out in (a, b):
        assert main(["plot", "--polytope", seg, "--union", union, "--out", out]) == EXIT_OK
    assert open(a, "rb").read() == open(b, "rb").read()
    cube = files("cube.txt", "0 0 0\n1 1 1\n")
    assert main(["plot", "--polytope", cube]) == EXIT_INPUT
