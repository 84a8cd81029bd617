"""Command-line front end.

Each subcommand runs one scenario and writes a JSON report; ``suite`` runs
the whole acceptance battery.  Exit status: 0 when every check passes, 1
when a check fails or the scenario is infeasible, 2 for usage and parse
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import acceptance as acc
from .acceptance import Check
from .fock import RadiusExceeded, TruncatedFock, ccr_defect
from .hilbert import ComplexSpace, random_standard
from .modular import NotStandard
from .seqmodel import (
    AngleSequenceModel,
    ApproachHalfPi,
    Constant,
    GoalInfeasible,
    Interleave,
    PowerLaw,
    Table,
    Weight,
    construct_extension,
    itpfi_classify,
    weighted_sum_test,
)
from .skeleton import (
    DegeneratePairing,
    InvolutionInfeasible,
    MissingInvolutions,
    SkeletonTower,
    check_axioms,
    skeleton_build,
    skeleton_verify,
)
from .tower import (
    TOWER_TOL,
    NotStandardAtStep,
    commutativity_residual,
    b_space,
    crossproduct_checks,
    extend_tower,
    b_identity_report,
    truncated_tower,
)

MODES = ("lattice", "modular", "tower", "skeleton", "seqmodel", "classify", "fock", "suite")
COMMON = {"mode": None, "seed": acc.DEFAULT_SEED, "tol": None, "out": None}

DEFAULTS = {
    "lattice": {"cases": 200, "d_max": 6},
    "modular": {"cases": 100, "d_max": 6, "points": 50, "sums": 20},
    "tower": {"regime": "constant", "d": 4, "D": 16, "dims": [1, 1, 1, 1, 1, 1],
              "origin": 3, "k": 0, "p": 1, "k_min": -2, "k_max": 4},
    "skeleton": {"dims": [1, 1, 1, 1], "pairings": None, "with_involutions": False, "p": None},
    "seqmodel": {"angles": {"kind": "PowerLaw", "c": 1.0, "alpha": 1.0}, "goal": "Standard"},
    "classify": {"angles": {"kind": "Constant", "value": float(np.pi / 3)}},
    "fock": {"d": 1, "cutoff": 32, "radius": 1.0, "samples": 50},
    "suite": {"determinism": True},
}

INFEASIBLE = (DegeneratePairing, InvolutionInfeasible, MissingInvolutions, GoalInfeasible,
              NotStandardAtStep, NotStandard, RadiusExceeded)


class ParseError(ValueError):
    def __init__(self, message, field=None, position=None):
        self.field = field
        self.position = position
        where = []
        if position is not None:
            where.append(f"line {position[0]}, column {position[1]}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(message + (f" ({'; '.join(where)})" if where else ""))


class ScenarioInfeasible(RuntimeError):
    pass


# -- scenarios -------------------------------------------------------------------

def load_scenario(text, mode=None):
    """Parse scenario JSON, reject unknown fields and materialize defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", position=(exc.lineno, exc.colno)) from None
    if not isinstance(raw, dict):
        raise ParseError("scenario must be a JSON object")
    m = raw.get("mode", mode)
    if mode is not None and m != mode:
        raise ParseError(f"scenario mode {m!r} does not match subcommand {mode!r}", field="mode")
    if m not in MODES:
        raise ParseError(f"unknown mode {m!r}", field="mode")
    return materialize(m, raw)


def materialize(mode, fields):
    allowed = dict(COMMON, **DEFAULTS[mode])
    for key in fields:
        if key not in allowed:
            raise ParseError("unknown field", field=key)
    sc = {k: v for k, v in allowed.items()}
    sc.update({k: v for k, v in fields.items()})
    sc["mode"] = mode
    return sc


def parse_descriptor(obj):
    if isinstance(obj, (int, float)):
        return Constant(float(obj))
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("angle descriptor needs a 'kind'", field="angles")
    kind = obj["kind"]
    try:
        if kind == "Constant":
            return Constant(float(obj["value"]))
        if kind == "PowerLaw":
            return PowerLaw(float(obj["c"]), float(obj["alpha"]))
        if kind == "ApproachHalfPi":
            return ApproachHalfPi(float(obj["c"]), float(obj["alpha"]))
        if kind == "Table":
            tail = parse_descriptor(obj["tail"]) if obj.get("tail") is not None else None
            return Table(tuple(float(v) for v in obj["values"]), tail)
        if kind == "Interleave":
            return Interleave(parse_descriptor(obj["odd"]), parse_descriptor(obj["even"]))
    except KeyError as exc:
        raise ParseError(f"descriptor {kind} is missing a parameter", field=str(exc.args[0])) from None
    raise ParseError(f"unknown descriptor kind {kind!r}", field="angles")


# -- mode runners -------------------------------------------------------------------

def run_lattice(sc):
    return acc.lattice_checks(sc["seed"], sc["cases"], sc["d_max"])


def run_modular(sc):
    return (acc.modular_checks(sc["seed"], sc["cases"], sc["d_max"])
            + acc.fiber_checks(sc["points"])
            + acc.two_angle_checks(sc["seed"], sc["points"], sc["sums"]))


def _identity_checks(rep, exact_items, tol):
    out = []
    for name, item in sorted(rep.items.items()):
        if item.residual is None:
            continue
        details = {"measure": item.measure, "note": item.note, "regime": rep.regime,
                   "k": rep.k, "p": rep.p}
        if name in exact_items:
            out.append(Check(f"tower.item_{name}", "b-decomposition", item.residual, tol, details))
        else:
            out.append(Check(f"tower.item_{name}", "b-decomposition", item.residual, None, details))
    return out


def run_tower(sc):
    regime = sc["regime"]
    k, p = sc["k"], sc["p"]
    if regime == "constant":
        M = random_standard(ComplexSpace(2 * (sc["d"] // 2) or 2), sc["seed"])
        t = extend_tower(M, M, sc["k_min"], sc["k_max"])
        checks = [Check("tower.recursion", "tower-recursion", t.defects["recursion"], TOWER_TOL)]
        checks += _identity_checks(b_identity_report(t, k, p), {"i", "ii", "iii", "iv", "v", "vi", "vii"},
                                   TOWER_TOL)
    elif regime == "skeleton":
        sk = skeleton_build(sc["dims"], seed=sc["seed"], with_involutions=True)
        t = SkeletonTower(sk, sc["origin"])
        checks = _identity_checks(b_identity_report(t, k, p), {"i", "ii", "iii", "iv", "v"}, 0.0)
    elif regime == "truncated":
        t = truncated_tower(acc.standard_extension_model(), sc["D"], sc["k_min"], sc["k_max"])
        checks = [Check("tower.b0_commutative", "b-decomposition",
                        commutativity_residual(b_space(t, 0)), 0.0),
                  Check("tower.recursion", "tower-recursion", t.defects["recursion"], TOWER_TOL)]
        checks += _identity_checks(b_identity_report(t, k, p), {"iii"}, 0.0)
    else:
        raise ParseError(f"unknown regime {regime!r}", field="regime")
    cp = crossproduct_checks(t)
    checks.append(Check("tower.pairing_nondegenerate", "crossed-product",
                        0.0 if cp["pairing_nondegenerate"] else 1.0, 0.0,
                        {"rank": cp["pairing_rank"], "fixedpoint_residual": cp["fixedpoint_residual"],
                         "regime": cp["regime"]}))
    return checks


def run_skeleton(sc):
    dims = sc["dims"]
    sk = skeleton_build(dims, sc["pairings"], seed=sc["seed"], with_involutions=sc["with_involutions"])
    ax = check_axioms(sk)
    checks = [Check(f"skeleton.axiom.{name}", "b-decomposition", float(len(f)), 0.0, {"failures": f})
              for name, f in sorted(ax.items())]
    v = skeleton_verify(sk, sc["p"])
    checks.append(Check("skeleton.iii_commutative", "b-decomposition", 0.0 if v.iii_ok else 1.0, 0.0))
    if v.iv_radical_dim is not None:
        checks.append(Check("skeleton.iv_radical", "b-decomposition", float(v.iv_radical_dim), 0.0))
    if v.v_center_dim is not None:
        checks.append(Check("skeleton.v_center", "b-decomposition",
                            0.0 if v.v_proof_relation_ok else 1.0, 0.0,
                            {"center_dim": v.v_center_dim, "literal_sum": v.v_stated_formula,
                             "notes": list(v.notes)}))
    return checks


def run_seqmodel(sc):
    desc = parse_descriptor(sc["angles"])
    model = AngleSequenceModel(desc)
    y = construct_extension(model, sc["goal"])
    checks = []
    kinds = {"Standard": ["delta"], "Irreducible": ["d"], "Both": ["delta", "d"]}[sc["goal"]]
    for kind in kinds:
        v = weighted_sum_test(y, Weight(kind, model))
        checks.append(Check(f"seqmodel.{kind}_weighted_diverges", "extension-domain",
                            0.0 if v.verdict == "Diverges" else 1.0, 0.0, {"terms": v.terms}))
    v = weighted_sum_test(y, Weight("unit", model))
    checks.append(Check("seqmodel.norm_converges", "extension-domain",
                        0.0 if v.verdict == "Converges" else 1.0, 0.0, {"terms": v.terms}))
    return checks


def run_classify(sc):
    lab = itpfi_classify(AngleSequenceModel(parse_descriptor(sc["angles"])))
    details = {"label": str(lab), "kind": lab.kind, "lambda": lab.lam, "note": lab.note}
    return [Check("classify.label", "itpfi-type", 0.0, 0.0, details)]


def run_fock(sc):
    if sc["d"] != 1:
        fock = TruncatedFock(sc["d"], sc["cutoff"], sc["radius"])
        rng = np.random.default_rng(sc["seed"])
        checks = []
        worst, tol = 0.0, 0.0
        for _ in range(sc["samples"]):
            h = rng.standard_normal(sc["d"]) + 1j * rng.standard_normal(sc["d"])
            k = rng.standard_normal(sc["d"]) + 1j * rng.standard_normal(sc["d"])
            h *= 0.5 * sc["radius"] / np.linalg.norm(h)
            k *= 0.5 * sc["radius"] / np.linalg.norm(k)
            rep = ccr_defect(h, k, fock, report=True)
            worst, tol = max(worst, rep.defect), max(tol, rep.tolerance)
        checks.append(Check("fock.ccr_defect", "ccr-phase", worst, 10 * tol,
                            {"d": sc["d"], "N": sc["cutoff"], "sector": fock.N // 2}))
        return checks
    return acc.fock_checks(sc["seed"], sc["cutoff"], sc["radius"], sc["samples"])


RUNNERS = {"lattice": run_lattice, "modular": run_modular, "tower": run_tower,
           "skeleton": run_skeleton, "seqmodel": run_seqmodel, "classify": run_classify,
           "fock": run_fock}


def run_scenario(sc, timing=False):
    """Run a materialized scenario and return its report dictionary."""
    start = time.perf_counter()
    if sc["mode"] == "suite":
        report = acc.run_suite(sc["seed"], sc["tol"], sc["determinism"])
        report["scenario"] = sc
    else:
        try:
            checks = RUNNERS[sc["mode"]](sc)
        except INFEASIBLE as exc:
            raise ScenarioInfeasible(f"{type(exc).__name__}: {exc}") from exc
        report = acc.build_report(checks, sc, sc["tol"])
    if timing:
        report["wall_time"] = time.perf_counter() - start
    return report


# -- argument parsing -------------------------------------------------------------------

def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="stdsub", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="mode", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="override every tolerance")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--scenario", help="JSON scenario file")
    common.add_argument("--timing", action="store_true", help="add the wall time to the report")
    parsers = {m: sub.add_parser(m, parents=[common]) for m in MODES}
    parsers["lattice"].add_argument("--cases", type=int)
    parsers["lattice"].add_argument("--d-max", dest="d_max", type=int)
    parsers["modular"].add_argument("--cases", type=int)
    parsers["tower"].add_argument("--regime", choices=["constant", "skeleton", "truncated"])
    parsers["tower"].add_argument("--D", dest="D", type=int)
    parsers["tower"].add_argument("--k", type=int)
    parsers["tower"].add_argument("--p", type=int)
    parsers["skeleton"].add_argument("--dims", type=_int_list)
    parsers["skeleton"].add_argument("--with-involutions", dest="with_involutions",
                                     action="store_true", default=None)
    parsers["skeleton"].add_argument("--p", type=int)
    parsers["seqmodel"].add_argument("--goal", choices=["Standard", "Irreducible", "Both"])
    parsers["classify"].add_argument("--angle", type=float)
    parsers["fock"].add_argument("action", nargs="?", choices=["verify"], default="verify")
    parsers["fock"].add_argument("--d", type=int)
    parsers["fock"].add_argument("--cutoff", type=int)
    parsers["fock"].add_argument("--radius", type=float)
    parsers["fock"].add_argument("--samples", type=int)
    parsers["suite"].add_argument("--no-determinism", dest="determinism",
                                  action="store_false", default=None)
    return ap


def scenario_from_args(args):
    mode = args.mode
    if args.scenario:
        try:
            with open(args.scenario) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read scenario: {exc.strerror}", field="scenario") from None
        sc = load_scenario(text, mode)
    else:
        sc = materialize(mode, {})
    skip = {"mode", "scenario", "timing", "action", "angle"}
    for key, val in vars(args).items():
        if key in skip or val is None:
            continue
        sc[key] = val
    if getattr(args, "angle", None) is not None:
        sc["angles"] = {"kind": "Constant", "value": args.angle}
    return sc


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        sc = scenario_from_args(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_scenario(sc, timing=args.timing)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScenarioInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        report = {"scenario": sc, "error": str(exc), "checks": [], "all_pass": False}
        _emit(report, sc["out"])
        return 1
    _emit(report, sc["out"])
    print(acc.summary_table(report), file=sys.stderr)
    return 0 if report["all_pass"] else 1


def _emit(report, out):
    text = acc.dumps(report) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
