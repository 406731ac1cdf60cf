# tests/test_cli.py

"""
Unit tests for the command-line interface.
"""

import json
from fractions import Fraction

import pytest

from coarsedecomp import cli
from coarsedecomp.cli import CLI, build_parser, main
from coarsedecomp.config import RunConfig
from coarsedecomp.errors import EXIT_BAD_INPUT, EXIT_INVALID, EXIT_MALFORMED, EXIT_OK, EXIT_STUCK


def run(capsys, *argv):
    """Runs the command line and returns (exit code, parsed stdout or None)."""
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def z2_space(tmp_path, capsys):
    """
    Fixture providing a space file holding the radius 8 ball in Z^2.
    """
    path = tmp_path / "z2.json"
    assert main(["space", "gen", "--group", "zn", "--n", "2", "--radius", "8",
                 "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    return path


def path_certificate(part0, part1):
    """A one-round certificate on the path8 fixture at r = 3."""
    return {"ambient": "path8", "initial": [list(range(8))],
            "steps": [{"r": "3/1", "members": [{"part0": part0, "part1": part1}]}],
            "bound": "1/1"}


def test_space_gen_z2_ball(capsys):
    """
    Test that the radius 4 ball in Z^2 has 41 points.
    """
    code, document = run(capsys, "space", "gen", "--group", "zn", "--n", "2", "--radius", "4")
    assert code == EXIT_OK
    assert document["size"] == 41
    assert document["generator"] == {"type": "free_abelian", "n": 2, "weights": ["1", "1"]}


def test_space_gen_lamplighter(capsys):
    """
    Test that the radius 2 ball in Z/2 wr Z has 10 points.
    """
    code, document = run(capsys, "space", "gen", "--group", "lamplighter", "--lamp", "z2",
                         "--radius", "2")
    assert code == EXIT_OK
    assert document["size"] == 10


def test_space_gen_negative_radius(capsys):
    """
    Test that radius -1 exits 2 with a diagnostic on stderr.
    """
    code = main(["space", "gen", "--group", "zn", "--n", "2", "--radius", "-1"])
    captured = capsys.readouterr()
    assert code == EXIT_BAD_INPUT
    assert captured.out == ""
    assert "BAD_RADIUS" in captured.err


def test_space_gen_ball_too_large(capsys):
    """
    Test that a ball above the budget exits 5.
    """
    code = main(["space", "gen", "--group", "zn", "--n", "2", "--radius", "10",
                 "--budget", "50"])
    assert code == EXIT_STUCK
    assert "BALL_TOO_LARGE" in capsys.readouterr().err


def test_space_show_fixture(capsys):
    """
    Test the summary of a bundled space.
    """
    code, document = run(capsys, "space", "show", "--space", "grid5")
    assert code == EXIT_OK
    assert document == {"name": "grid5", "size": 25, "diameter": "8/1", "denominator": 1}


def test_missing_space_file(capsys, tmp_path):
    """
    Test that a missing input file exits 2.
    """
    code = main(["space", "show", "--space", str(tmp_path / "nowhere.json")])
    assert code == EXIT_BAD_INPUT
    assert "FILE_NOT_FOUND" in capsys.readouterr().err


def test_decompose_and_verify(capsys, tmp_path, z2_space):
    """
    Test slabs on a Z^2 ball with challenges 3,3, then verification.
    """
    cert = tmp_path / "cert.json"
    code = main(["decompose", "run", "--space", str(z2_space), "--strategy", "slabs",
                 "--challenges", "3,3", "--out", str(cert)])
    assert code == EXIT_OK
    assert len(json.loads(cert.read_text())["steps"]) == 2
    code, report = run(capsys, "decompose", "verify", str(cert))
    assert code == EXIT_OK
    assert report == {"valid": True, "depth": 2, "violations": []}


def test_challenges_exhausted_exits_5(capsys, z2_space):
    """
    Test that one challenge is not enough for slabs on Z^2.
    """
    code = main(["decompose", "run", "--space", str(z2_space), "--challenges", "3"])
    assert code == EXIT_STUCK
    assert "CHALLENGES_EXHAUSTED" in capsys.readouterr().err


def test_verify_corrupted_certificate(capsys, tmp_path):
    """
    Test that moving one point between pieces exits 3 and names the close pair.
    """
    good = tmp_path / "good.json"
    good.write_text(json.dumps(path_certificate([[0, 1], [4, 5]], [[2, 3], [6, 7]])))
    assert run(capsys, "decompose", "verify", str(good))[0] == EXIT_OK
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(path_certificate([[0, 1], [4]], [[2, 3], [5, 6, 7]])))
    code, report = run(capsys, "decompose", "verify", str(bad))
    assert code == EXIT_INVALID
    close = [v for v in report["violations"] if v["code"] == "R_DISJOINT_VIOLATION"]
    assert close[0]["points"] == [3, 5]


def test_verify_malformed_certificate(capsys, tmp_path):
    """
    Test that a certificate without a bound exits 4.
    """
    document = path_certificate([[0, 1], [4, 5]], [[2, 3], [6, 7]])
    del document["bound"]
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(document))
    assert main(["decompose", "verify", str(path)]) == EXIT_MALFORMED


def test_strategy_tree(capsys, tmp_path):
    """
    Test that two certificates sharing their first round merge into one tree.
    """
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    first.write_text(json.dumps(path_certificate([[0, 1], [4, 5]], [[2, 3], [6, 7]])))
    second.write_text(json.dumps(path_certificate([[0, 1], [4, 5]], [[2, 3], [6, 7]])))
    code, document = run(capsys, "decompose", "tree", str(first), str(second))
    assert code == EXIT_OK
    assert document["rank"] == 1
    assert document["tree"].splitlines()[1].strip() == "- r=3/1: 4 members, bound 1/1"


def test_asdim_on_path(capsys):
    """
    Test a (1, 2)-decomposition of the path with bounded pieces.
    """
    code, document = run(capsys, "decompose", "asdim", "--space", "path8", "--d", "1",
                         "--r", "2", "--bound", "1")
    assert code == EXIT_OK
    assert document["success"]


def test_norms_len_wreath(capsys):
    """
    Test that (X, X^2; 0, X^-1) has degree length 2.
    """
    code, document = run(capsys, "norms", "len", "--norm", "degree",
                         "--matrix", "wreath:n=1,p=X^2")
    assert code == EXIT_OK
    assert document["length"] == "2/1"


def test_norms_len_archimedean_is_tight(capsys):
    """
    Test that the evaluation length of the shear is log of the golden ratio to 1e-6.
    """
    code, document = run(capsys, "norms", "len", "--norm", "eval", "--t", "1", "--ring", "qx",
                         "--matrix", "1,1;0,1")
    assert code == EXIT_OK
    lo, hi = Fraction(document["length"]["lo"]), Fraction(document["length"]["hi"])
    golden_log = Fraction(0.48121182505960347)
    assert lo - Fraction(1, 10 ** 12) <= golden_log <= hi + Fraction(1, 10 ** 12)
    assert hi - lo < Fraction(1, 10 ** 6)


def test_norms_ball_f2x(capsys):
    """
    Test that the polynomials of degree <= 2 over F_2 are 8.
    """
    code, document = run(capsys, "norms", "ball", "--ring", "f2x", "--k", "2")
    assert code == EXIT_OK
    assert document["count"] == 8
    assert "0" in document["elements"]


def test_norms_eval_degree(capsys):
    """
    Test the degree norm of X^2 + X.
    """
    code, document = run(capsys, "norms", "eval", "--ring", "f2x", "--norm", "degree",
                         "--element", "X^2+X")
    assert code == EXIT_OK
    assert document["exponent"] == 2


def test_norms_unknown_ring(capsys):
    """
    Test that an unknown ring exits 2.
    """
    code = main(["norms", "eval", "--ring", "f4y", "--norm", "degree", "--element", "X"])
    assert code == EXIT_BAD_INPUT
    assert "DOMAIN_MISMATCH" in capsys.readouterr().err


def test_rips_build_relative(capsys):
    """
    Test the relative complex of path8 with its extra edge.
    """
    code, document = run(capsys, "rips", "build", "--space", "path8", "--kind", "relative",
                         "--a", "1", "--b", "7", "--marked", "[0, 7]")
    assert code == EXIT_OK
    assert document["space"] == "path8"
    assert document["tags"]["relative_only"] == [[0, 7]]
    assert document["dimension"] == 1


def test_rips_dist_path(capsys):
    """
    Test the bounds between the ends of the path.
    """
    code, document = run(capsys, "rips", "dist", "--space", "path8", "--d", "1",
                         "--x", "0", "--y", "7")
    assert code == EXIT_OK
    assert document["upper"] == "7/1"
    assert document["lower"] == "5/1"


def test_rips_verify_comparison_on_path(capsys):
    """
    Test a PASS report for the comparison lemma on the path.
    """
    code, document = run(capsys, "rips", "verify", "--lemma", "comparison", "--space", "path8",
                         "--a", "1")
    assert code == EXIT_OK
    assert document["status"] == "PASS"
    assert document["checked"] == 28


def test_rips_verify_missing_eps(capsys):
    """
    Test that the neighborhood lemma without eps exits 2.
    """
    code = main(["rips", "verify", "--lemma", "neighborhood", "--space", "path8",
                 "--C", "[0]"])
    assert code == EXIT_BAD_INPUT
    assert "BAD_PARAMS" in capsys.readouterr().err


@pytest.mark.slow
def test_rips_verify_comparison_on_grid(capsys):
    """
    Test the comparison lemma on P_2 of the 5x5 grid.
    """
    code, document = run(capsys, "rips", "verify", "--lemma", "comparison", "--space", "grid5",
                         "--a", "2")
    assert code == EXIT_OK
    assert document["status"] == "PASS"


def test_pou_build_and_verify(capsys, tmp_path):
    """
    Test a tent witness from an r = 8 slab certificate on the radius 20 ball in Z.
    """
    space, cert, witness = (tmp_path / name for name in ("z.json", "cert.json", "pou.json"))
    assert main(["space", "gen", "--n", "1", "--radius", "20", "--out", str(space)]) == EXIT_OK
    assert main(["decompose", "run", "--space", str(space), "--challenges", "8",
                 "--out", str(cert)]) == EXIT_OK
    assert main(["pou", "build", str(cert), "--R", "1", "--eps", "1",
                 "--out", str(witness)]) == EXIT_OK
    capsys.readouterr()
    code, report = run(capsys, "pou", "verify", str(witness))
    assert code == EXIT_OK
    assert report["valid"]


def test_report_merge(capsys, tmp_path):
    """
    Test merging a passing and an inconclusive report.
    """
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    first.write_text(json.dumps({"status": "PASS"}))
    second.write_text(json.dumps({"status": "INCONCLUSIVE"}))
    code, document = run(capsys, "report", "merge", str(first), str(second))
    assert code == EXIT_OK
    assert document["count"] == 2
    assert not document["all_passed"]


def test_reports_are_deterministic(capsys):
    """
    Test that identical runs print identical bytes.
    """
    argv = ["rips", "verify", "--lemma", "comparison", "--space", "path8", "--a", "1"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_timings_are_opt_in(capsys):
    """
    Test that runtimes appear only with --timings.
    """
    _, plain = run(capsys, "space", "show", "--space", "path8")
    _, timed = run(capsys, "space", "show", "--space", "path8", "--timings")
    assert "runtime_seconds" not in plain
    assert timed["runtime_seconds"] >= 0


def test_text_format(capsys):
    """
    Test the key: value output.
    """
    assert main(["space", "show", "--space", "path8", "--format", "text"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "size: 8" in lines
    assert "name: path8" in lines


def test_config_from_args():
    """
    Test that parsed flags reach the RunConfig.
    """
    args = build_parser().parse_args(["rips", "dist", "--space", "path8", "--x", "0", "--y", "1",
                                      "--seed", "7", "--subdivision", "2", "--workers", "3"])
    config = RunConfig.from_args(args)
    assert config.command == "rips dist"
    assert config.seed == 7
    assert config.subdivision == 2
    assert config.workers == 3


def test_workers_reach_verify_lemma(mocker, capsys):
    """
    Test that --workers and --subdivision are passed to the lemma check.
    """
    spy = mocker.spy(cli, "verify_lemma")
    main(["rips", "verify", "--lemma", "comparison", "--space", "path8", "--workers", "2",
          "--subdivision", "2"])
    capsys.readouterr()
    assert spy.call_args.kwargs["workers"] == 2
    assert spy.call_args.kwargs["level"] == 2


def test_unexpected_handler_errors_propagate(mocker):
    """
    Test that only package errors are turned into exit codes.
    """
    mocker.patch.object(CLI, "cmd_space_show", side_effect=RuntimeError("boom"))
    with pytest.raises(RuntimeError):
        main(["space", "show", "--space", "path8"])


def test_unparsable_number_exits_2(capsys):
    """
    Test that a radius that is not a number exits 2.
    """
    assert main(["space", "gen", "--radius", "four"]) == EXIT_BAD_INPUT
    assert "bad value" in capsys.readouterr().err
