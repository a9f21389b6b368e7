"""Command-line front end.

Subcommands parse the text grammar, dispatch to the library, and emit a
report either as human-readable lines or as JSON (``--json``); both render
the same report object, whose echoed inputs are canonical forms that parse
back to identical values.  Exit status is 0 exactly when every certificate
attached to the report passed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field

from . import parsing
from .algebra import HypersurfaceRing, PolyRing
from .cover import EnumerationBudgetError
from .birational import (
    Tower,
    canonical_discrepancy,
    foliation_discrepancy,
    tower_ledger,
    weighted_blowup_chart,
)
from .cone import (
    Lattice,
    boundary_rays_rank2,
    kf_square,
    numeric_bpf_shell,
    polyhedrality_check,
    pushforward_inseparable,
)
from .cover import (
    CoverDatum,
    build_cover,
    critical_points,
    hessian_normal_form_check,
    induced_foliation,
    nondegenerate_section_fraction,
    singular_points_of_cover,
)
from .derivation import Derivation, is_invariant, is_p_closed
from .quotient import (
    RAMIFICATION_CASES,
    inseparable_degree,
    ring_of_constants,
    verify_ramification,
)
from .suites import run_suites, suite_names

__all__ = ["main"]


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)

    def certify(self, name: str, passed: bool, statement: str):
        self.certificates.append(
            {"name": name, "passed": bool(passed), "statement": statement}
        )

    @property
    def status(self) -> int:
        return 0 if all(c["passed"] for c in self.certificates) else 1

    def to_dict(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "certificates": self.certificates,
            "status": self.status,
        }

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.to_dict(), indent=2)
        lines = [f"command: {self.command}"]
        for k, v in self.inputs.items():
            lines.append(f"input {k}: {_fmt(v)}")
        for k, v in self.results.items():
            lines.append(f"{k}: {_fmt(v)}")
        for c in self.certificates:
            verdict = "PASS" if c["passed"] else "FAIL"
            lines.append(f"certificate {c['name']}: {verdict}  [{c['statement']}]")
        lines.append(f"exit: {self.status}")
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    return str(v)


def _infer_ring(p, texts, vars_opt):
    if vars_opt:
        names = [v.strip() for v in vars_opt.split(",") if v.strip()]
    else:
        names = []
        for text in texts:
            for name in parsing.identifiers_in(text):
                if name not in names:
                    names.append(name)
    if not names:
        raise parsing.ParseError("no variables found", texts[0] if texts else "", 0)
    return PolyRing(p, names)


def _derivation_context(args, exprs):
    """(ring, hypersurface) for a derivation command."""
    if getattr(args, "hypersurface", None):
        hyp = HypersurfaceRing.from_relation(args.p, args.hypersurface)
        if args.vars:
            base = [v.strip() for v in args.vars.split(",") if v.strip()]
            ordered = [v for v in base if v != hyp.cover_var] + [hyp.cover_var]
            ambient = PolyRing(args.p, ordered)
            hyp = HypersurfaceRing(
                ambient, hyp.degree, hyp.section.cast(ambient)
            )
        return hyp.ambient, hyp
    texts = list(exprs)
    return _infer_ring(args.p, texts, args.vars), None


# ---------------------------------------------------------------------------
# subcommands


def cmd_pclosed(args) -> Report:
    ring, hyp = _derivation_context(args, [args.derivation])
    d = Derivation.parse(ring, args.derivation, hyp)
    if d.is_zero():
        raise SystemExit(_usage_error("the zero derivation generates no foliation"))
    report = Report("pclosed")
    report.inputs["derivation"] = str(d)
    report.inputs["p"] = ring.p
    report.inputs["variables"] = list(ring.variables)
    if hyp is not None:
        report.inputs["hypersurface"] = str(hyp.relation)
    verdict = is_p_closed(d)
    report.results["p_power"] = str(verdict.power)
    report.results["p_closed"] = verdict.closed
    if verdict.witness is not None:
        report.results["witness"] = str(verdict.witness)
    if verdict.closed and verdict.witness is not None:
        recheck = d.scale(verdict.witness)
        report.certify(
            "witness_identity",
            all(a == b for a, b in _reduced_pairs(verdict.power, recheck)),
            "D^[p] = g*D re-verified coordinatewise",
        )
    else:
        report.certify(
            "minor_vanishing_decided",
            True,
            "all 2x2 minors of (D^[p], D) tested exactly",
        )
    return report


def _reduced_pairs(d1, d2):
    hyp = d1.hypersurface
    for a, b in zip(d1.coeffs, d2.coeffs):
        if hyp is None:
            yield a, b
        else:
            yield hyp.reduce_fn(a), hyp.reduce_fn(b)


def cmd_ppower(args) -> Report:
    ring, hyp = _derivation_context(args, [args.derivation])
    d = Derivation.parse(ring, args.derivation, hyp)
    report = Report("ppower")
    report.inputs["derivation"] = str(d)
    report.inputs["p"] = ring.p
    power = d.p_power()
    report.results["p_power"] = str(power)
    rng = random.Random(0)
    from .suites import random_poly

    ok = True
    for _ in range(5):
        a = random_poly(rng, ring)
        b = random_poly(rng, ring)
        lhs = power.apply(a * b)
        rhs = power.apply(a) * b + power.apply(b) * a
        if lhs != rhs:
            ok = False
    report.certify("leibniz_sampled", ok, "D^[p] obeys Leibniz on sampled products")
    return report


def cmd_bracket(args) -> Report:
    ring, hyp = _derivation_context(args, [args.left, args.right])
    d1 = Derivation.parse(ring, args.left, hyp)
    d2 = Derivation.parse(ring, args.right, hyp)
    report = Report("bracket")
    report.inputs["left"] = str(d1)
    report.inputs["right"] = str(d2)
    report.inputs["p"] = ring.p
    br = d1.lie_bracket(d2)
    report.results["bracket"] = str(br)
    report.certify(
        "antisymmetry",
        br == -(d2.lie_bracket(d1)),
        "[D1,D2] = -[D2,D1] re-verified",
    )
    return report


def cmd_cover(args) -> Report:
    cfg = _load_config(args)
    p = cfg.get("p", args.p)
    degree = cfg.get("degree", args.degree)
    section_text = cfg.get("section", args.section)
    variables = cfg.get("variables")
    q = cfg.get("q", args.q)
    if p is None or degree is None or section_text is None:
        raise SystemExit(_usage_error("cover needs -p, -d and -f (or a config file)"))
    if variables:
        ring = PolyRing(p, variables)
    else:
        ring = _infer_ring(p, [section_text], args.vars)
    section = ring.parse(section_text)
    datum = CoverDatum(p, degree, section)
    hyp = build_cover(datum)
    report = Report("cover")
    report.inputs["p"] = p
    report.inputs["degree"] = degree
    report.inputs["section"] = str(section)
    report.inputs["variables"] = list(ring.variables)
    report.results["cover_ring"] = f"{hyp.cover_var}^{degree} = {section}"
    report.results["p_divides_degree"] = datum.p_divides_degree
    if datum.p_divides_degree:
        chart = induced_foliation(datum)
        verdict = is_p_closed(chart.generator)
        invariant = is_invariant(chart.generator.detach(), hyp.relation)
        report.results["foliation_generator"] = str(chart.generator)
        report.certify("generator_p_closed", verdict.closed, "D^[p] on the line of D")
        report.certify(
            "cover_invariant", invariant is True, "D(relation) lies in the relation ideal"
        )
    if q:
        crit = critical_points(datum, q, jobs=args.jobs)
        sing = singular_points_of_cover(datum, q, jobs=args.jobs)
        report.inputs["q"] = q
        report.results["critical_points"] = [
            {
                "location": list(c.location),
                "hessian_rank": c.hessian_rank,
                "nondegenerate": c.nondegenerate,
            }
            for c in crit
        ]
        report.results["singular_cover_points"] = [list(s) for s in sing]
        report.certify(
            "singularities_over_critical_points",
            sorted(s[:-1] for s in sing) == sorted(c.location for c in crit),
            "projection of the singular locus matches the critical locus",
        )
        if args.classify and p > 2:
            classes = []
            for c in crit:
                cls = hessian_normal_form_check(section, c.location, q)
                classes.append(
                    {
                        "location": list(c.location),
                        "nondegenerate": cls.nondegenerate,
                        "rank": cls.rank,
                        "witness": [list(r) for r in cls.witness] if cls.witness else None,
                        "witness_field_order": cls.witness_field_order,
                    }
                )
            report.results["classification"] = classes
    if args.sample_genericity:
        frac = nondegenerate_section_fraction(
            p, q or p, ring.nvars, samples=args.sample_genericity
        )
        report.results["nondegenerate_section_fraction"] = frac
    return report


def cmd_discrepancy(args) -> Report:
    cfg = _load_config(args)
    p = cfg.get("p", args.p)
    if p is None:
        raise SystemExit(_usage_error("discrepancy needs -p"))
    if "tower" in cfg:
        weight_list = [tuple(entry["weights"]) for entry in cfg["tower"]]
    elif args.weights:
        weight_list = [
            tuple(int(x) for x in chunk.split(","))
            for chunk in args.weights.split(";")
        ]
    else:
        raise SystemExit(_usage_error("discrepancy needs --weights or a config tower"))
    tower = Tower.weighted(weight_list, p)
    report = Report("discrepancy")
    report.inputs["p"] = p
    report.inputs["weights"] = [list(w) for w in weight_list]
    foliation = None
    foliation_text = cfg.get("foliation", args.foliation)
    if foliation_text:
        top = tower.charts[0].target_ring
        gen = Derivation.parse(top, foliation_text)
        from .derivation import saturate

        foliation = saturate(gen)
        report.inputs["foliation"] = str(foliation.generator)
        if foliation.primitive is not True:
            raise SystemExit(
                _usage_error("foliation generator could not be certified primitive")
            )
    ledger = tower_ledger(tower, foliation)
    report.results["ledger"] = ledger
    last = f"E{len(tower.charts)}"
    report.results["canonical"] = ledger[last]["canonical"]
    if foliation is not None:
        report.results["foliated"] = ledger[last]["foliated"]
    # functoriality cross-check: the composite chart reproduces the ledger
    composite = Tower((tower.composite(),))
    ok = canonical_discrepancy(composite) == ledger[last]["canonical"]
    if foliation is not None:
        ok = ok and foliation_discrepancy(composite, foliation) == ledger[last]["foliated"]
    report.certify(
        "composite_cross_check",
        ok,
        "discrepancies along the composed chart match the chart-by-chart ledger",
    )
    return report


def cmd_quotient(args) -> Report:
    cfg = _load_config(args)
    p = cfg.get("p", args.p)
    report = Report("quotient")
    derivation_text = cfg.get("derivation", args.derivation)
    if derivation_text:
        if p is None:
            raise SystemExit(_usage_error("quotient needs -p with --derivation"))
        ring = _infer_ring(p, [derivation_text], cfg.get("variables") and
                           ",".join(cfg["variables"]) or args.vars)
        d = Derivation.parse(ring, derivation_text)
        bound = cfg.get("bound", args.bound) or 3 * p
        basis = ring_of_constants(d, bound)
        report.inputs["derivation"] = str(d)
        report.inputs["p"] = p
        report.inputs["bound"] = bound
        report.results["generators"] = [str(g) for g in basis.generators]
        report.results["kernel_dimension"] = basis.kernel_dimension
        degree = inseparable_degree(d, bound)
        report.results["degree"] = degree if degree else "undetermined at this bound"
        report.certify(
            "generators_are_constants",
            all(d.apply(g).is_zero() for g in basis.generators),
            "every reported generator is annihilated by D",
        )
    cases = cfg.get("ramification", args.ramification)
    if cases:
        todo = sorted(RAMIFICATION_CASES) if cases == "all" else [cases]
        if p is None:
            raise SystemExit(_usage_error("quotient needs -p"))
        out = []
        for name in todo:
            case = verify_ramification(name, p)
            out.append(
                {"case": name, "lhs": case.lhs, "rhs": case.rhs, "equal": case.equal}
            )
            report.certify(
                f"ramification_{name}",
                case.equal,
                "pi*K_quotient - K_X = (p-1) K_F as exact integers",
            )
        report.results["ramification_cases"] = out
        report.inputs.setdefault("p", p)
    if not report.results:
        raise SystemExit(_usage_error("quotient needs --derivation or --ramification"))
    return report


def cmd_cone(args) -> Report:
    cfg = _load_config(args)
    report = Report("cone")
    matrix = cfg.get("matrix")
    if matrix is None and args.matrix:
        matrix = json.loads(args.matrix)
    if matrix is not None:
        lattice = Lattice(matrix)
        report.inputs["matrix"] = [list(r) for r in lattice.form]
        report.results["signature"] = list(lattice.signature)
        if lattice.rank == 2:
            rays = boundary_rays_rank2(lattice)
            report.results["boundary"] = rays.to_dict()
            ok = True
            if rays.rational_rays:
                ok = all(lattice.q(r) == 0 for r in rays.rational_rays)
            report.certify(
                "rays_exactly_null", ok, "returned rays satisfy v^T Q v = 0 exactly"
            )
        else:
            rays = polyhedrality_check(lattice)
            report.results["boundary"] = rays.to_dict()
            report.certify(
                "witnesses_exactly_null",
                all(lattice.q(w) == 0 for w in rays.witnesses),
                "every witness ray satisfies v^T Q v = 0 exactly",
            )
    push = cfg.get("pushforward")
    if push is None and args.pushforward:
        if args.p is None:
            raise SystemExit(_usage_error("--pushforward needs -p"))
        push = {
            "vector": [int(x) for x in args.pushforward.split(",")],
            "p": args.p,
            "exponent": args.exponent,
        }
    if push:
        image = pushforward_inseparable(push["vector"], push["p"], push["exponent"])
        report.results["pushforward"] = list(image)
        report.certify(
            "pushforward_fixes_ray",
            _same_ray(push["vector"], image),
            "p^l scaling maps every ray to itself",
        )
    if cfg.get("kf_square"):
        params = cfg["kf_square"]
        report.results["kf_square"] = kf_square(
            params["l_squared"], params["p"], params["m"]
        )
    bpf = cfg.get("bpf")
    if bpf is None and args.bpf:
        parts = json.loads(args.bpf)
        bpf = {"d": parts[0], "kf": parts[1]}
    if bpf and matrix is not None:
        shell = numeric_bpf_shell(bpf["d"], bpf["kf"], lattice)
        report.results["bpf_shell"] = shell.to_dict()
    if not report.results:
        raise SystemExit(_usage_error("cone needs --matrix, --pushforward or a config"))
    return report


def _same_ray(v, w):
    import math

    g1 = 0
    g2 = 0
    for a, b in zip(v, w):
        g1 = math.gcd(g1, abs(int(a)))
        g2 = math.gcd(g2, abs(int(b)))
    if g1 == 0 or g2 == 0:
        return g1 == g2
    return all(int(a) // g1 == int(b) // g2 for a, b in zip(v, w))


def cmd_suite(args) -> Report:
    names = args.only.split(",") if args.only else None
    certs = run_suites(
        names, seed=args.seed, property_cases=args.cases, jobs=args.jobs
    )
    report = Report("paper-suite")
    report.inputs["seed"] = args.seed
    report.inputs["property_cases"] = args.cases
    total = 0.0
    for cert in certs:
        report.certify(cert.name, cert.passed, cert.statement)
        total += cert.seconds
        report.results[cert.name] = {
            "checks": cert.checks,
            "seconds": round(cert.seconds, 2),
            "failures": cert.failures[:5],
        }
    report.results["total_seconds"] = round(total, 2)
    return report


# ---------------------------------------------------------------------------
# plumbing


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _add_common(sub, *, needs_p=True):
    if needs_p:
        sub.add_argument("-p", type=int, default=None, help="characteristic (prime)")
    sub.add_argument("--vars", default=None, help="comma-separated variable order")
    sub.add_argument("--json", action="store_true", help="emit the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfoliation",
        description=(
            "Exact characteristic-p foliation calculus: p-th powers and "
            "p-closedness of vector fields, cyclic covers and their "
            "singularities, blow-up discrepancies, constants of derivations, "
            "and intersection-lattice cone arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pclosed", help="decide p-closedness of a vector field")
    sp.add_argument("derivation")
    sp.add_argument("--hypersurface", default=None, help="relation w^d - f")
    _add_common(sp)
    sp.set_defaults(fn=cmd_pclosed)

    sp = sub.add_parser("ppower", help="compute the p-th power of a vector field")
    sp.add_argument("derivation")
    sp.add_argument("--hypersurface", default=None)
    _add_common(sp)
    sp.set_defaults(fn=cmd_ppower)

    sp = sub.add_parser("bracket", help="Lie bracket of two vector fields")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--hypersurface", default=None)
    _add_common(sp)
    sp.set_defaults(fn=cmd_bracket)

    sp = sub.add_parser("cover", help="cyclic cover, its foliation and singularities")
    sp.add_argument("-d", "--degree", type=int, default=None)
    sp.add_argument("-f", "--section", default=None)
    sp.add_argument("-q", type=int, default=None, help="enumeration field size p^k")
    sp.add_argument("--classify", action="store_true",
                    help="Hessian normal-form classification (p > 2)")
    sp.add_argument("--sample-genericity", type=int, default=0, metavar="N",
                    help="sample N random sections for nondegeneracy statistics")
    sp.add_argument("--config", default=None, help="JSON config file")
    sp.add_argument("--jobs", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(fn=cmd_cover)

    sp = sub.add_parser("discrepancy", help="blow-up discrepancies along a tower")
    sp.add_argument("--weights", default=None,
                    help="semicolon-separated weight pairs, e.g. '1,3' or '1,1;1,2'")
    sp.add_argument("--foliation", default=None, help="vector field on the base chart")
    sp.add_argument("--config", default=None, help="JSON config file")
    _add_common(sp)
    sp.set_defaults(fn=cmd_discrepancy)

    sp = sub.add_parser("quotient", help="constants of a derivation; ramification cases")
    sp.add_argument("--derivation", default=None)
    sp.add_argument("--bound", type=int, default=None)
    sp.add_argument("--ramification", default=None,
                    help=f"a case name or 'all'; cases: {sorted(RAMIFICATION_CASES)}")
    sp.add_argument("--config", default=None, help="JSON config file")
    _add_common(sp)
    sp.set_defaults(fn=cmd_quotient)

    sp = sub.add_parser("cone", help="intersection-lattice cone arithmetic")
    sp.add_argument("--matrix", default=None, help="symmetric integer matrix as JSON")
    sp.add_argument("--pushforward", default=None, help="comma-separated class")
    sp.add_argument("--exponent", type=int, default=1, help="Frobenius exponent l")
    sp.add_argument("--bpf", default=None,
                    help="JSON pair [D, KF] for the base-point-free shell")
    sp.add_argument("--config", default=None, help="JSON config file")
    _add_common(sp)
    sp.set_defaults(fn=cmd_cone)

    sp = sub.add_parser(
        "paper-suite",
        help="run every bundled worked-example and property suite",
    )
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=500,
                    help="random cases per property per characteristic")
    sp.add_argument("--only", default=None,
                    help=f"comma-separated suite names; available: {suite_names()}")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.fn(args)
    except parsing.ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except EnumerationBudgetError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    print(report.render(args.json))
    return report.status


if __name__ == "__main__":
    sys.exit(main())
