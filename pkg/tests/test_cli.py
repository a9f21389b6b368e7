import json

from pfoliation.algebra import PolyRing
from pfoliation.cli import main
from pfoliation.derivation import Derivation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


class TestPClosed:
    def test_cover_generator(self, capsys):
        code, report = run_json(
            capsys, "pclosed", "-p", "3", "d/dz", "--hypersurface", "z^3 - x*y"
        )
        assert code == 0
        assert report["results"]["p_closed"] is True
        assert report["results"]["p_power"] == "0"

    def test_shear_field(self, capsys):
        code, report = run_json(capsys, "pclosed", "-p", "2", "d/dx + x*d/dy")
        assert code == 0
        assert report["results"]["p_closed"] is False
        assert report["results"]["p_power"] == "d/dy"

    def test_euler_witness(self, capsys):
        code, report = run_json(capsys, "pclosed", "-p", "5", "x*d/dx")
        assert code == 0
        assert report["results"]["p_closed"] is True
        assert report["results"]["witness"] == "1"

    def test_inputs_round_trip(self, capsys):
        code, report = run_json(
            capsys, "pclosed", "-p", "5", "x*d/dx + 3*y^2*d/dy", "--vars", "x,y"
        )
        assert code == 0
        ring = PolyRing(5, report["inputs"]["variables"])
        echoed = Derivation.parse(ring, report["inputs"]["derivation"])
        original = Derivation.parse(ring, "x*d/dx + 3*y^2*d/dy")
        assert echoed == original

    def test_zero_derivation_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "pclosed", "-p", "3", "0", "--vars", "x")
        assert code == 2

    def test_parse_error_annotated(self, capsys):
        code, _, err = run(capsys, "pclosed", "-p", "3", "d/dx + %")
        assert code == 2
        assert "position" in err and "^" in err


class TestPPowerAndBracket:
    def test_ppower(self, capsys):
        code, report = run_json(capsys, "ppower", "-p", "3", "x*d/dx")
        assert code == 0
        assert report["results"]["p_power"] == "x*d/dx"

    def test_bracket(self, capsys):
        code, report = run_json(capsys, "bracket", "-p", "5", "x*d/dx", "d/dx")
        assert code == 0
        assert report["results"]["bracket"] == "4*d/dx"


class TestCover:
    def test_spec_example(self, capsys):
        code, report = run_json(
            capsys, "cover", "-p", "2", "-d", "2", "-f", "x*y", "-q", "4"
        )
        assert code == 0
        crit = report["results"]["critical_points"]
        assert len(crit) == 1 and crit[0]["nondegenerate"] is True
        assert report["results"]["singular_cover_points"] == [[0, 0, 0]]

    def test_budget_exceeded_surfaces_cleanly(self, capsys):
        vars30 = ",".join(f"x{i}" for i in range(30))
        code, _, err = run(
            capsys, "cover", "-p", "2", "-d", "2", "-f", "x0*x1", "-q", "2",
            "--vars", vars30,
        )
        assert code == 2
        assert "budget" in err

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cover.json"
        cfg.write_text(
            json.dumps(
                {
                    "p": 3,
                    "degree": 3,
                    "section": "x^2*y",
                    "variables": ["x", "y"],
                    "q": 9,
                }
            )
        )
        code, report = run_json(capsys, "cover", "--config", str(cfg))
        assert code == 0
        sing = report["results"]["singular_cover_points"]
        crit = report["results"]["critical_points"]
        assert sorted(tuple(s[:-1]) for s in sing) == sorted(
            tuple(c["location"]) for c in crit
        )


class TestDiscrepancy:
    def test_spec_example(self, capsys):
        code, report = run_json(
            capsys, "discrepancy", "--weights", "1,3", "-p", "3",
            "--foliation", "d/dx",
        )
        assert code == 0
        assert report["results"]["canonical"] == 3
        assert report["results"]["foliated"] == 0

    def test_tower_config(self, capsys, tmp_path):
        cfg = tmp_path / "tower.json"
        cfg.write_text(
            json.dumps(
                {
                    "p": 5,
                    "tower": [{"weights": [1, 1]}, {"weights": [1, 2]}],
                    "foliation": "d/dx",
                }
            )
        )
        code, report = run_json(capsys, "discrepancy", "--config", str(cfg))
        assert code == 0
        assert report["results"]["ledger"]["E1"] == {"canonical": 1, "foliated": 1}


class TestQuotient:
    def test_constants_and_ramification(self, capsys):
        code, report = run_json(
            capsys, "quotient", "-p", "3", "--derivation", "d/dz",
            "--vars", "x,y,z", "--ramification", "all",
        )
        assert code == 0
        assert sorted(report["results"]["generators"]) == ["x", "y", "z^3"]
        assert report["results"]["degree"] == 3
        cases = {c["case"]: c for c in report["results"]["ramification_cases"]}
        assert cases["projective_line_frobenius"]["lhs"] == -4
        assert all(c["equal"] for c in cases.values())


class TestCone:
    def test_irrational_report(self, capsys):
        code, report = run_json(capsys, "cone", "--matrix", "[[2,5],[5,2]]")
        assert code == 0
        boundary = report["results"]["boundary"]
        assert boundary["rational_rays"] is None
        assert boundary["irrational"]["discriminant"] == 84
        assert any("no Mori fibre space" in n for n in boundary["notes"])

    def test_round_cone(self, capsys):
        code, report = run_json(
            capsys, "cone", "--matrix", "[[1,0,0],[0,-1,0],[0,0,-1]]"
        )
        assert code == 0
        assert report["results"]["boundary"]["polyhedral"] is False
        assert len(report["results"]["boundary"]["witnesses"]) >= 25

    def test_pushforward(self, capsys):
        code, report = run_json(
            capsys, "cone", "--pushforward", "3,4", "-p", "2", "--exponent", "1"
        )
        assert code == 0
        assert report["results"]["pushforward"] == [6, 8]

    def test_bad_matrix_is_error(self, capsys):
        code, _, err = run(capsys, "cone", "--matrix", "[[1,0],[0,1]]")
        assert code == 2
        assert "signature" in err


class TestSuiteCommand:
    def test_subset_runs_clean(self, capsys):
        code, report = run_json(
            capsys, "paper-suite", "--only", "blowup_ledger,kf_series,ordinary_blowup"
        )
        assert code == 0
        assert all(c["passed"] for c in report["certificates"])

    def test_deterministic_output(self, capsys):
        args = ("paper-suite", "--only", "blowup_ledger", "--json")
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        r1, r2 = json.loads(out1), json.loads(out2)
        for r in (r1, r2):
            for v in r["results"].values():
                if isinstance(v, dict):
                    v.pop("seconds", None)
            r["results"].pop("total_seconds", None)
        assert (code1, r1) == (code2, r2)

    def test_unknown_suite_rejected(self, capsys):
        code, _, err = run(capsys, "paper-suite", "--only", "nonsense")
        assert code == 2
        assert "unknown suite" in err


class TestHumanRendering:
    def test_pclosed_text(self, capsys):
        code, out, _ = run(capsys, "pclosed", "-p", "5", "x*d/dx")
        assert code == 0
        assert "p_closed: true" in out
        assert "certificate witness_identity: PASS" in out
        assert out.strip().endswith("exit: 0")
