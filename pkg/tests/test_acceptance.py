"""Acceptance criteria, one test per criterion, each at its stated budget.

Every test prints a single [PASS]/[FAIL] line; the suite functions they call
are the same ones behind the CLI's `paper-suite` command, with key values
re-verified here independently.
"""

import subprocess
import sys
import time

import pytest

from pfoliation.algebra import PolyRing
from pfoliation.birational import Tower, foliation_discrepancy, weighted_blowup_chart
from pfoliation.cone import kf_square
from pfoliation.cover import CoverDatum, hessian_normal_form_check, induced_foliation
from pfoliation.derivation import Derivation, FoliationChart
from pfoliation.quotient import inseparable_degree, verify_ramification
from pfoliation.suites import PROPERTY_SUITES, run_suites


def _report(name, cert, limit=None):
    verdict = "PASS" if cert.passed else "FAIL"
    budget = f" ({cert.seconds:.2f}s of {limit}s)" if limit else f" ({cert.seconds:.2f}s)"
    print(f"[{verdict}] {name}{budget}")
    assert cert.passed, cert.failures[:5]
    if limit is not None:
        assert cert.seconds < limit, f"{name} exceeded {limit}s"


def _suite(name):
    return run_suites([name])[0]


def test_criterion_cover_foliations_p_closed():
    cert = _suite("cover_pclosed")
    assert cert.checks == 40  # 10 random sections for each p in {2,3,5,7}
    _report("p-closedness of cover foliations", cert, limit=5)


def test_criterion_weighted_blowup_ledger():
    cert = _suite("blowup_ledger")
    _report("weighted blow-up ledger (canonical p, foliated 0)", cert, limit=1)


def test_criterion_ordinary_blowup_discrepancy():
    cert = _suite("ordinary_blowup")
    # hand-checkable 2x2 Jacobian solve, re-derived here
    t = Tower((weighted_blowup_chart((1, 1), 5),))
    gen = Derivation.partial(t.charts[0].target_ring, "x")
    assert foliation_discrepancy(t, FoliationChart(gen, True)) == 1
    _report("ordinary blow-up of the coordinate foliation: a(E,F) = 1", cert, limit=1)


def test_criterion_cover_singularity_correspondence():
    cert = _suite("cover_singularities")
    assert cert.checks >= 20
    _report("cover-singularity correspondence over q in {4,8,9,25,49}", cert, limit=60)


def test_criterion_hessian_normal_form():
    cert = _suite("hessian_normal_form")
    for p in (3, 5, 7):
        ring = PolyRing(p, ("x", "y"))
        cls = hessian_normal_form_check(ring.parse("x*y"), (0, 0))
        assert cls.nondegenerate and cls.witness is not None
    ring5 = PolyRing(5, ("x", "y"))
    assert not hessian_normal_form_check(ring5.parse("x^3 + y^3"), (0, 0)).nondegenerate
    _report("Hessian normal form with explicit witnesses", cert)


def test_criterion_ramification_formula():
    cert = _suite("ramification")
    for p in (2, 3, 5, 7, 11):
        case = verify_ramification("projective_line_frobenius", p)
        assert case.lhs == -2 * p + 2 == case.rhs
    _report("ramification formula: -2p + 2 = (p-1)(-2), p in {2,3,5,7,11}", cert)


def test_criterion_jacobson_degree():
    cert = _suite("jacobson_degree")
    for p in (2, 3, 5):
        base = PolyRing(p, ("x", "y"))
        chart = induced_foliation(CoverDatum(p, p, base.parse("x*y")))
        assert inseparable_degree(chart.generator.detach(), 3 * p) == p
    _report("Jacobson degree p with the binomial kernel-dimension oracle", cert)


def test_criterion_cone_arithmetic():
    cert = _suite("cone_arithmetic")
    assert cert.checks > 500  # several hundred signature-(1,1) forms
    _report("cone arithmetic vs height-10^4 oracle; roundness; pushforward",
            cert, limit=30)


def test_criterion_kf_square_series():
    cert = _suite("kf_series")
    for p in (2, 3):
        assert [kf_square(2, p, m) for m in range(1, 11)] == [
            2 * p * m * m for m in range(1, 11)
        ]
    _report("unbounded K_F^2 series: kf_square(2, p, m) = 2 p m^2", cert)


@pytest.mark.parametrize("name", sorted(PROPERTY_SUITES))
def test_criterion_property_suite(name):
    cert = _suite(name)
    assert cert.checks >= 500 * 4  # 500 cases for each characteristic
    assert not cert.failures
    _report(f"{name} (>=500 cases x 4 characteristics)", cert)


def test_criterion_cli_suite_runs_clean_in_budget():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pfoliation", "paper-suite"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    elapsed = time.perf_counter() - start
    passed = proc.returncode == 0 and elapsed < 180
    print(f"[{'PASS' if passed else 'FAIL'}] paper-suite CLI exits 0 "
          f"({elapsed:.1f}s of 180s)")
    assert proc.returncode == 0, proc.stdout[-2000:]
    assert elapsed < 180
