"""Command-line interface.

Every command reads matrices in the JSON format of :mod:`pseudolie.matio`,
writes JSON (or CSV for ``pspec grid``) to stdout or ``--output``, and echoes
its resolved configuration. Exit codes: 0 success, 1 usage or input error,
2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import classify as cls
from . import cubiclemma, matio, preserve, pseudo
from .matcore import FAMILIES, DimensionError, random_matrix, random_unitary

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for failed verification here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(threads=False, probes=False, pairs=False):
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--eps", type=float, default=1.0,
                   help="pseudospectrum level epsilon, > 0 (default: 1.0)")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"random seed (default: {DEFAULT_SEED})")
    g.add_argument("--tol", type=float, default=1e-10,
                   help="absolute tolerance of boundary root finding (default: 1e-10)")
    g.add_argument("--rays", type=int, default=pseudo.DEFAULT_RAYS,
                   help=f"number of rays for radius sweeps (default: {pseudo.DEFAULT_RAYS})")
    g.add_argument("--resolution", type=int, default=101,
                   help="grid points per axis (default: 101)")
    g.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    g.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp so repeated runs are byte-identical")
    if threads:
        g.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker threads; results do not depend on it (default: all cores)")
    if probes:
        g.add_argument("--probes", type=int, default=20,
                       help="random rank-one nilpotent probes (default: 20)")
    if pairs:
        g.add_argument("--pairs", type=int, default=100, help="random matrix pairs (default: 100)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudolie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("pspec", help="pseudospectra of a single matrix")
    pss = ps.add_subparsers(dest="action", required=True, parser_class=_Parser)
    g = pss.add_parser("grid", parents=[_common(threads=True)],
                       help="CSV of re,im,smin,member over a square grid")
    g.add_argument("matrix", help="matrix JSON file")
    g.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0), metavar=("RE", "IM"),
                   help="grid center (default: 0 0)")
    g.add_argument("--half-width", type=float, default=None,
                   help="half side length of the grid (default: ||A|| + 2 eps)")
    r = pss.add_parser("radius", parents=[_common()], help="pseudospectral radius r_eps")
    r.add_argument("matrix")
    s = pss.add_parser("symmetry", parents=[_common(probes=True)],
                       help="probe whether sigma_eps(A) = -sigma_eps(A)")
    s.add_argument("matrix")
    s.add_argument("--samples", type=int, default=512, help="probe points (default: 512)")

    c = sub.add_parser("classify", parents=[_common(probes=True)],
                       help="two-eigenvalue-normal test with probe and witness")
    c.add_argument("matrix")
    c.add_argument("--samples", type=int, default=256, help="points per probe (default: 256)")
    w = sub.add_parser("witness", parents=[_common()],
                       help="rank-one nilpotent B with asymmetric sigma_eps([A, B])")
    w.add_argument("matrix")
    w.add_argument("--budget", type=int, default=200, help="random fallback budget (default: 200)")

    lm = sub.add_parser("lemt", help="cubic Gram polynomial test on a 3x3 block")
    lms = lm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    lc = lms.add_parser("coeffs", parents=[_common()], help="p2, p1, p0 coefficients")
    lc.add_argument("matrix")
    lt = lms.add_parser("certify", parents=[_common()], help="coefficients plus t0 certificate")
    lt.add_argument("matrix")

    vm = sub.add_parser("verify-map", parents=[_common(pairs=True)],
                        help="check a canonical map preserves f([A, B]) or sigma_eps([A, B])")
    vm.add_argument("--map", required=True, dest="map_path",
                    help='map JSON: {"U", "tau", "scalar_rule": {"kind", "params"}, '
                         '"exceptional": {"kind"}, "swap", optional "test_pairs"}')
    vm.add_argument("--f", default="reps:0.5",
                    help="radial function: reps:<eps>, frobenius, s1, spectral_radius "
                         "(default: reps:0.5)")
    vm.add_argument("--check", choices=("lie", "sigma"), default="lie",
                    help="lie: f values; sigma: sampled sigma_eps sets at --eps (default: lie)")
    vm.add_argument("--samples", type=int, default=512, help="sigma samples per pair (default: 512)")

    ms = sub.add_parser("match-spectra", parents=[_common()],
                        help="rigid motion taking lambdas to gammas")
    ms.add_argument("--lambdas", required=True, help="JSON list of [re, im]")
    ms.add_argument("--gammas", required=True, help="JSON list of [re, im]")

    gn = sub.add_parser("gen", parents=[_common()], help="random matrix as JSON")
    gn.add_argument("--family", choices=FAMILIES, default="dense")
    gn.add_argument("--n", type=int, default=3, help="dimension (default: 3)")
    return parser


# ----------------------------------------------------------------- helpers

def _config(args) -> dict:
    skip = {"output", "no_timestamp"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _envelope(args, result: dict) -> dict:
    out = {"config": _config(args)}
    if not args.no_timestamp:
        out["timestamp"] = datetime.now(timezone.utc).isoformat()
    out.update(result)
    return out


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, result: dict):
    _emit(args, matio.dumps(_envelope(args, result)) + "\n")


def _cplx(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _matrix(path) -> np.ndarray:
    return matio.matrix_from_json(_load_json(path))


def _check_eps(args):
    if not args.eps > 0:
        raise UsageError("--eps must be positive")


# ---------------------------------------------------------------- commands

def _pspec_grid(args):
    A = _matrix(args.matrix)
    _check_eps(args)
    hw = args.half_width
    if hw is None:
        hw = float(np.linalg.norm(A, 2)) + 2 * args.eps
    spec = pseudo.GridSpec(complex(*args.center), hw, args.resolution)
    sample = pseudo.grid(A, args.eps, spec, threads=max(1, args.threads))
    lines = []
    cfg = _config(args)
    cfg.pop("threads", None)
    cfg["half_width"] = hw
    lines.append("# config: " + matio.dumps(cfg, indent=None))
    if not args.no_timestamp:
        lines.append("# timestamp: " + datetime.now(timezone.utc).isoformat())
    lines.append("re,im,smin,member")
    for re, im, s, m in sample.rows():
        lines.append(f"{re:.17g},{im:.17g},{s:.17g},{int(m)}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _pspec_radius(args):
    A = _matrix(args.matrix)
    _check_eps(args)
    res = pseudo.radius(A, args.eps, n_rays=args.rays, tol=args.tol)
    _emit_json(args, {"value": res.value, "argmax": _cplx(res.argmax),
                      "residual": res.certificate_residual, "rays": res.rays_used})
    return EXIT_OK


def _pspec_symmetry(args):
    A = _matrix(args.matrix)
    _check_eps(args)
    v = pseudo.symmetric(A, args.eps, n_probes=args.samples, seed=args.seed, tol=args.tol)
    _emit_json(args, {"verdict": v.kind.value,
                      "witness": None if v.witness is None else _cplx(v.witness),
                      "margin": v.margin, "probes_used": v.probes_used})
    return EXIT_OK


def _witness_json(w: cls.Witness | None):
    if w is None:
        return None
    return {"x": [_cplx(z) for z in w.nilpotent.x], "y": [_cplx(z) for z in w.nilpotent.y],
            "route": w.route, "epsilon": w.epsilon, "point": _cplx(w.point),
            "margin": w.margin}


def _classify(args):
    A = _matrix(args.matrix)
    _check_eps(args)
    rep = cls.classify(A, args.eps, args.probes, args.samples, seed=args.seed)
    _emit_json(args, {
        "direct": rep.direct,
        "probe": {"symmetric": rep.probe.symmetric, "probes_used": rep.probe.probes_used,
                  "witness": None if rep.probe.witness is None else _cplx(rep.probe.witness)},
        "agree": rep.agree,
        "case_tag": rep.case_tag,
        "witness": _witness_json(rep.witness),
        "normality_residual": rep.normality_residual,
        "min_gap": rep.min_gap,
    })
    return EXIT_OK


def _witness(args):
    A = _matrix(args.matrix)
    _check_eps(args)
    try:
        w = cls.construct_witness(A, args.eps, args.budget, seed=args.seed)
    except cls.InvalidTarget as exc:
        _emit_json(args, {"witness": None, "error": str(exc)})
        return EXIT_FAIL
    except cls.BudgetExhausted as exc:
        _emit_json(args, {"witness": None, "error": str(exc)})
        return EXIT_FAIL
    _emit_json(args, {"witness": _witness_json(w)})
    return EXIT_OK


def _lemt(args):
    C = _matrix(args.matrix)
    coeffs = cubiclemma.extract_polynomials(C)
    out = {"p2": coeffs.p2, "p1": coeffs.p1, "p0": coeffs.p0,
           "odd_linear_a": coeffs.odd_linear_a,
           "applicable": cubiclemma.lemt_applicable(coeffs)}
    code = EXIT_OK
    if args.action == "certify":
        _check_eps(args)
        cert = cubiclemma.asymmetry_certificate(C, args.eps)
        if cert is None:
            out.update({"t0": None, "margin": None})
            code = EXIT_FAIL
        else:
            out.update({"t0": cert.t0, "margin": cert.margin,
                        "witness": _cplx(cert.witness), "witness_margin": cert.witness_margin})
    _emit_json(args, out)
    return code


def _parse_map(data, seed) -> preserve.CanonicalMap:
    if not isinstance(data, dict):
        raise UsageError("map JSON must be an object")
    U = data.get("U", "identity")
    n = data.get("n")
    if isinstance(U, dict) and "random" in U:
        U = random_unitary(int(U.get("n", n)), int(U["random"]))
    elif U == "identity":
        if not isinstance(n, int):
            raise UsageError('map with U = "identity" needs an integer "n"')
        U = np.eye(n)
    else:
        U = matio.matrix_from_json(U)
    try:
        tau = preserve.Tau(data.get("tau", "identity"))
        swap = preserve.Swap(data.get("swap", "adjoint"))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    rule = data.get("scalar_rule", {"kind": "constant"})
    params = rule.get("params", {})
    if rule.get("kind") == "constant":
        mu = complex(*params.get("mu", [1.0, 0.0]))
        nu = complex(*params.get("nu", [0.0, 0.0]))
        scalars = preserve.ConstantScalars(mu, nu)
    elif rule.get("kind") == "random":
        scalars = preserve.RandomScalars(int(params.get("seed", seed)),
                                         float(params.get("nu_scale", 1.0)))
    else:
        raise UsageError(f"unknown scalar_rule kind {rule.get('kind')!r}")

    exc_spec = data.get("exceptional", {"kind": "none"})
    kind = exc_spec.get("kind", "none")
    if kind == "none":
        pred = preserve.never
    elif kind == "two-eig-normal":
        pred = preserve.two_eig_normal_predicate()
    elif kind == "explicit":
        pred = preserve.matches_any([matio.matrix_from_json(m) for m in exc_spec.get("matrices", [])])
    else:
        raise UsageError(f"unknown exceptional kind {kind!r}")
    return preserve.CanonicalMap(U, tau, scalars, pred, swap)


def _verify_map(args):
    data = _load_json(args.map_path)
    m = _parse_map(data, args.seed)
    n = m.U.shape[0]
    extra = []
    for k, pair in enumerate(data.get("test_pairs", [])):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise UsageError(f"test_pairs[{k}] must be a list of two matrices")
        extra.append(tuple(matio.matrix_from_json(M) for M in pair))
    pairs = preserve.random_pairs(n, args.pairs, args.seed, engineered=args.check == "sigma") + extra
    if args.check == "lie":
        try:
            f = preserve.parse_function(args.f, n_rays=args.rays, tol=args.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rep = preserve.verify_lie_invariance(m, f, seed=args.seed, tol=max(1e-8, 2 * args.tol),
                                             pairs=pairs)
    else:
        _check_eps(args)
        rep = preserve.verify_sigma_invariance(m, args.eps, samples=args.samples, seed=args.seed,
                                               pairs=pairs)
    bad = []
    for ce in rep.counterexamples[:5]:
        bad.append({k: (matio.matrix_to_json(v) if isinstance(v, np.ndarray) and v.ndim == 2
                        else [_cplx(z) for z in v] if k == "points" else v)
                    for k, v in ce.items()})
    _emit_json(args, {"passed": rep.passed, "pairs": rep.pairs,
                      "max_deviation": rep.max_deviation, "counterexamples": bad,
                      "n_counterexamples": len(rep.counterexamples)})
    return EXIT_OK if rep.passed else EXIT_FAIL


def _match_spectra(args):
    lam = matio.complex_list_from_json(_load_json(args.lambdas))
    gam = matio.complex_list_from_json(_load_json(args.gammas))
    if lam.shape != gam.shape:
        raise UsageError("lambdas and gammas differ in length")
    try:
        m = preserve.match_spectra(lam, gam)
    except (preserve.NoIsometry, preserve.NoSolution) as exc:
        _emit_json(args, {"match": None, "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_FAIL
    out = {"mode": m.mode.value, "mu": _cplx(m.mu), "nu": _cplx(m.nu),
           "max_residual": m.max_residual}
    if m.conj_mu is not None:
        out.update({"conj_mu": _cplx(m.conj_mu), "conj_nu": _cplx(m.conj_nu)})
    _emit_json(args, out)
    return EXIT_OK


def _gen(args):
    if args.n < 1:
        raise UsageError("--n must be positive")
    A = random_matrix(args.n, args.seed, args.family)
    out = matio.matrix_to_json(A)
    out["config"] = _config(args)
    if not args.no_timestamp:
        out["timestamp"] = datetime.now(timezone.utc).isoformat()
    _emit(args, matio.dumps(out) + "\n")
    return EXIT_OK


_DISPATCH = {
    ("pspec", "grid"): _pspec_grid,
    ("pspec", "radius"): _pspec_radius,
    ("pspec", "symmetry"): _pspec_symmetry,
    ("classify", None): _classify,
    ("witness", None): _witness,
    ("lemt", "coeffs"): _lemt,
    ("lemt", "certify"): _lemt,
    ("verify-map", None): _verify_map,
    ("match-spectra", None): _match_spectra,
    ("gen", None): _gen,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = _DISPATCH[(args.command, getattr(args, "action", None))]
    try:
        return handler(args)
    except (UsageError, matio.MatrixFormatError, DimensionError, preserve.MapError) as exc:
        print(f"pseudolie: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"pseudolie: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
