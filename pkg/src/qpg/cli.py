"""Command-line frontend and report pipeline.

Subcommands: ``group analyze``, ``hadamard validate|build|deform``,
``model build|check|character|orbits``, ``weyl run``, ``suite acceptance``.
Reports are JSON, echo their full configuration, and are byte-identical for
identical configurations (timings are only added under ``--timings``).
Exit codes: 0 all checks passed, 2 a check failed, 3 input error, 4 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import acceptance as acc
from . import hadamard as hd
from . import models as me
from . import permgroup as pg
from . import weyl as wy
from .errors import CapExceededError, CheckFailedError, InvalidInputError
from .linalg import DEFAULT_TOL, haar_unitaries, load_matrix, max_abs, mc_tolerance

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_INPUT_ERROR = 3
EXIT_CAP_EXCEEDED = 4


@dataclass
class ExperimentConfig:
    command: str
    inputs: dict
    seed: int | None = None
    samples: int | None = None
    p_max: int | None = None
    r_max: int | None = None
    tolerances: dict | None = None
    output: str | None = None

    def require_seed(self):
        if self.seed is None:
            raise InvalidInputError("a --seed is mandatory for stochastic runs")


def _emit(report: dict, out_path: str | None, timings: dict | None = None):
    if timings is not None:
        report["timings"] = timings
    text = json.dumps(report, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_record(name, verdict, tolerance, **extra):
    rec = {"name": name, "verdict": bool(verdict), "tolerance": tolerance}
    rec.update(extra)
    return rec


def _fractions(measure: pg.SpectralMeasure) -> list[str]:
    return [f"{w.numerator}/{w.denominator}" for w in measure.weights]


def _load_group_arg(args) -> pg.PermGroup:
    if getattr(args, "family", None):
        return pg.group_from_family(args.family)
    if getattr(args, "input", None):
        return pg.load_group(args.input)
    raise InvalidInputError("need --family or --input")


# -- group analyze ---------------------------------------------------------------


def cmd_group_analyze(args) -> int:
    G = _load_group_arg(args)
    cfg = ExperimentConfig(
        "group analyze",
        {"family": args.family, "input": args.input, "level": args.level},
        output=args.out,
    )
    transitive = pg.is_transitive(G)
    cert = pg.strongest_transitive_certificate(G) if transitive else None
    report = {
        "config": asdict(cfg),
        "degree": G.degree,
        "order": G.order,
        "transitive": transitive,
        "orbits": [list(o) for o in pg.orbits(G)],
        "derangement_count": len(pg.derangements(G)),
        "character_measure": _fractions(pg.character_measure(G)),
        "certificate_found": cert is not None,
        "certificate": [list(s.images) for s in cert] if cert else None,
    }
    if args.level:
        report["transitivity_level"] = pg.transitivity_level(G) if transitive else None
    if G.order % G.degree == 0:
        found = pg.deranging_subgroups(G, G.degree)
        report["deranging_subgroups_of_order_degree"] = {
            "order": G.degree,
            "count": len(found),
            "subgroups": [[list(s.images) for s in H.elements] for H in found],
        }
    _emit(report, args.out)
    return EXIT_OK


# -- hadamard ---------------------------------------------------------------------


def _build_hadamard(args) -> hd.HadamardMatrix:
    fam = args.family
    if fam.startswith("fourier:"):
        sizes = [int(x) for x in fam.split(":", 1)[1].split("x")]
        return hd.fourier_matrix(sizes)
    if fam.startswith("dita:"):
        left_s, _, right_s = fam.split(":", 1)[1].partition("|")
        left = [int(x) for x in left_s.split("x")]
        right = [int(x) for x in right_s.split("x")]
        return _deform(left, right, args)
    raise InvalidInputError(f"unknown hadamard family {fam!r}")


def _deform(left, right, args) -> hd.HadamardMatrix:
    m = int(np.prod(left))
    n = int(np.prod(right))
    if args.q:
        Q = load_matrix(args.q)
    elif args.random_q:
        cfg = ExperimentConfig("hadamard deform", {}, seed=args.seed)
        cfg.require_seed()
        Q = hd.random_unimodular((m, n), args.seed)
    else:
        Q = np.ones((m, n))
    return hd.dita_deform(left, right, Q)


def cmd_hadamard_validate(args) -> int:
    with open(args.input) as fh:
        H = hd.hadamard_from_json_dict(json.load(fh))
    ok, diag = hd.validate_hadamard(H.matrix, args.tol)
    report = {
        "config": asdict(ExperimentConfig("hadamard validate", {"input": args.input},
                                          tolerances={"hadamard": args.tol}, output=args.out)),
        "checks": [_check_record("hadamard invariants", ok, args.tol, **diag)],
    }
    _emit(report, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_hadamard_build(args) -> int:
    H = _build_hadamard(args)
    with open(args.out, "w") as fh:
        json.dump(hd.hadamard_to_json_dict(H), fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_hadamard_deform(args) -> int:
    left = [int(x) for x in args.left.split("x")]
    right = [int(x) for x in args.right.split("x")]
    H = _deform(left, right, args)
    with open(args.out, "w") as fh:
        json.dump(hd.hadamard_to_json_dict(H), fh, indent=2)
        fh.write("\n")
    return EXIT_OK


# -- model ------------------------------------------------------------------------


def _build_model(args) -> me.FlatModel:
    kind = args.kind
    if kind == "regular":
        return me.regular_model(_load_group_arg(args))
    if kind == "regular-translation":
        return me.regular_model(pg.regular_action(_load_group_arg(args)))
    if kind == "classical":
        return me.classical_model(_load_group_arg(args))
    if kind == "fourier":
        sizes = [int(x) for x in args.cycles.split("x")]
        return me.model_from_basis(hd.magic_from_hadamard(hd.fourier_matrix(sizes)))
    if kind == "hadamard":
        with open(args.input) as fh:
            H = hd.hadamard_from_json_dict(json.load(fh))
        return me.model_from_basis(hd.magic_from_hadamard(H))
    if kind == "latin-square":
        G = _load_group_arg(args)
        cfg = ExperimentConfig("model build", {}, seed=args.seed, samples=args.frames)
        cfg.require_seed()
        frames = haar_unitaries(G.degree, args.frames, args.seed)
        return me.universal_classical_model(G, frames)
    if kind == "tensor":
        return me.tensor_model(me.load_model(args.a), me.load_model(args.b))
    raise InvalidInputError(f"unknown model kind {kind!r}")


def cmd_model_build(args) -> int:
    model = _build_model(args)
    me.save_model(args.out, model)
    return EXIT_OK


def cmd_model_check(args) -> int:
    model = me.load_model(args.input)
    tol = args.tol
    checks = []
    diag = me.validate_model(model, tol)
    checks.append(
        _check_record(
            "magic invariants", diag.passed, tol,
            worst_projection_defect=diag.worst_projection_defect,
            worst_row_sum_defect=diag.worst_row_sum_defect,
            worst_col_sum_defect=diag.worst_col_sum_defect,
        )
    )
    fl = me.model_flatness(model)
    checks.append(
        _check_record("flatness", fl.verdict == "flat", None, verdict_name=fl.verdict)
    )
    if args.stationary:
        rep = me.stationarity_test(model, args.p_max, tol)
        checks.append(
            _check_record(
                "stationary on image", rep.stationary, tol,
                defects=list(rep.defects), p_max=args.p_max,
            )
        )
    report = {
        "config": asdict(ExperimentConfig(
            "model check", {"input": args.input, "stationary": args.stationary},
            p_max=args.p_max, tolerances={"tol": tol}, output=args.out)),
        "size": model.size,
        "dim": model.dim,
        "points": model.n_points,
        "checks": checks,
    }
    _emit(report, args.out)
    asserted = [c for c in checks if c["name"] != "flatness"]
    return EXIT_OK if all(c["verdict"] for c in asserted) else EXIT_CHECK_FAILED


def cmd_model_character(args) -> int:
    model = me.load_model(args.input)
    law = me.character_law(model, args.r, args.p_max)
    report = {
        "config": asdict(ExperimentConfig(
            "model character", {"input": args.input}, r_max=args.r,
            p_max=args.p_max, output=args.out)),
        "r": law.r,
        "moments": list(law.moments),
        "stderrs": [s if s is None else float(s) for s in law.stderrs],
        "gram_cross_check": None if law.gram_moments is None else {
            "moments": list(law.gram_moments),
            "max_deviation": law.cross_check_deviation,
        },
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_model_orbits(args) -> int:
    model = me.load_model(args.input)
    rep = me.orbit_relations(model, args.k)
    report = {
        "config": asdict(ExperimentConfig(
            "model orbits", {"input": args.input, "k": args.k}, output=args.out)),
        "k": args.k,
        "is_equivalence": rep.is_equivalence,
        "class_count": None if rep.classes is None else len(rep.classes),
        "classes": None if rep.classes is None else [[list(t) for t in c] for c in rep.classes],
    }
    _emit(report, args.out)
    return EXIT_OK


# -- weyl ---------------------------------------------------------------------------


def cmd_weyl_run(args) -> int:
    start = time.perf_counter()
    sizes = [int(x) for x in args.group.split("x")]
    cfg = ExperimentConfig(
        "weyl run", {"group": args.group, "check_stationary": args.check_stationary},
        seed=args.seed, samples=args.samples, p_max=args.p_max, output=args.out,
    )
    cfg.require_seed()
    B = wy.weyl_basis(sizes)
    sigma = wy.extract_cocycle(B)
    xs = haar_unitaries(B.n, args.samples, args.seed)
    moments, stderrs = wy.weyl_character_moments(B, sigma, xs, args.p_max)
    checks = []
    defects = []
    if args.check_stationary:
        tol = mc_tolerance(args.samples)
        for p in range(1, args.p_max + 1):
            T = wy.t_matrix_closed_form(B, sigma, xs, p).matrix
            defects.append(max_abs(T @ T - T))
        checks.append(
            _check_record(
                "stationary on image (Monte Carlo)", max(defects) <= tol, tol,
                defects=defects, samples=args.samples,
            )
        )
    report = {
        "config": asdict(cfg),
        "n": B.n,
        "size": B.size,
        "cocycle_table": [[[z.real, z.imag] for z in row] for row in sigma.table],
        "cocycle_identity_residual": sigma.identity_residual(B.mul, B.inv),
        "character_moments": [
            {"p": p + 1, "estimate": m, "stderr": s}
            for p, (m, s) in enumerate(zip(moments, stderrs))
        ],
        "checks": checks,
    }
    timings = {"total_s": round(time.perf_counter() - start, 3)} if args.timings else None
    _emit(report, args.out, timings=timings)
    return EXIT_OK if all(c["verdict"] for c in checks) else EXIT_CHECK_FAILED


# -- acceptance suite ------------------------------------------------------------------


def cmd_suite_acceptance(args) -> int:
    results = acc.run_all(echo=print)
    report = {
        "config": asdict(ExperimentConfig("suite acceptance", {}, output=args.out)),
        "criteria": [
            {"name": r.name, "passed": r.passed, "details": _jsonable(r.details)}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    if args.out:
        _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="classical permutation group analysis")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    ga = gsub.add_parser("analyze")
    ga.add_argument("--family", help="cyclic:N | symmetric:N | pgl2:p | hyperoctahedral-segments:n")
    ga.add_argument("--input", help="group JSON file")
    ga.add_argument("--level", action="store_true", help="also compute the exact transitivity level")
    ga.add_argument("--out")
    ga.set_defaults(func=cmd_group_analyze)

    h = sub.add_parser("hadamard", help="complex Hadamard matrices")
    hsub = h.add_subparsers(dest="subcommand", required=True)
    hv = hsub.add_parser("validate")
    hv.add_argument("--input", required=True)
    hv.add_argument("--tol", type=float, default=DEFAULT_TOL)
    hv.add_argument("--out")
    hv.set_defaults(func=cmd_hadamard_validate)
    hb = hsub.add_parser("build")
    hb.add_argument("--family", required=True, help="fourier:N1xN2... | dita:G|H")
    hb.add_argument("--q", help="Q matrix JSON file for dita families")
    hb.add_argument("--random-q", action="store_true")
    hb.add_argument("--seed", type=int)
    hb.add_argument("--out", required=True)
    hb.set_defaults(func=cmd_hadamard_build)
    hman = hsub.add_parser("deform")
    hman.add_argument("--left", required=True, help="left group cycles, e.g. 2x2")
    hman.add_argument("--right", required=True)
    hman.add_argument("--q")
    hman.add_argument("--random-q", action="store_true")
    hman.add_argument("--seed", type=int)
    hman.add_argument("--out", required=True)
    hman.set_defaults(func=cmd_hadamard_deform)

    m = sub.add_parser("model", help="flat matrix models")
    msub = m.add_subparsers(dest="subcommand", required=True)
    mb = msub.add_parser("build")
    mb.add_argument("--kind", required=True,
                    choices=["regular", "regular-translation", "classical", "fourier",
                             "hadamard", "latin-square", "tensor"])
    mb.add_argument("--family")
    mb.add_argument("--input")
    mb.add_argument("--cycles", help="for --kind fourier, e.g. 2x3")
    mb.add_argument("--frames", type=int, default=20)
    mb.add_argument("--seed", type=int)
    mb.add_argument("--a")
    mb.add_argument("--b")
    mb.add_argument("--out", required=True)
    mb.set_defaults(func=cmd_model_build)
    mc = msub.add_parser("check")
    mc.add_argument("--input", required=True)
    mc.add_argument("--stationary", action="store_true")
    mc.add_argument("--p-max", type=int, default=2)
    mc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    mc.add_argument("--out")
    mc.set_defaults(func=cmd_model_check)
    mch = msub.add_parser("character")
    mch.add_argument("--input", required=True)
    mch.add_argument("--r", type=int, default=1)
    mch.add_argument("--p-max", type=int, default=4)
    mch.add_argument("--out")
    mch.set_defaults(func=cmd_model_character)
    mo = msub.add_parser("orbits")
    mo.add_argument("--input", required=True)
    mo.add_argument("--k", type=int, default=1, choices=[1, 2, 3])
    mo.add_argument("--out")
    mo.set_defaults(func=cmd_model_orbits)

    w = sub.add_parser("weyl", help="Weyl matrix models")
    wsub = w.add_subparsers(dest="subcommand", required=True)
    wr = wsub.add_parser("run")
    wr.add_argument("--group", required=True, help="cycle sizes of H, e.g. 2 or 2x2")
    wr.add_argument("--samples", type=int, required=True)
    wr.add_argument("--seed", type=int)
    wr.add_argument("--p-max", type=int, default=2)
    wr.add_argument("--check-stationary", action="store_true")
    wr.add_argument("--timings", action="store_true")
    wr.add_argument("--out")
    wr.set_defaults(func=cmd_weyl_run)

    s = sub.add_parser("suite", help="batteries")
    ssub = s.add_subparsers(dest="subcommand", required=True)
    sa = ssub.add_parser("acceptance")
    sa.add_argument("--out")
    sa.set_defaults(func=cmd_suite_acceptance)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        _emit({"error": {"type": "cap-exceeded", "message": str(exc)}}, None)
        return EXIT_CAP_EXCEEDED
    except CheckFailedError as exc:
        _emit({"error": {"type": "check-failed", "message": str(exc)}}, None)
        return EXIT_CHECK_FAILED
    except (InvalidInputError, ValueError, OSError, json.JSONDecodeError) as exc:
        _emit({"error": {"type": "input-error", "message": str(exc)}}, None)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
