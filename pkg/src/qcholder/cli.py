"""Command-line front end.

Exit codes: 0 success, 2 when a pipeline ran but its hypothesis or verdict
fails, 1 on errors, 64 on usage errors.  Numbers are printed with 17
significant digits; a TOML file passed with ``--config`` supplies defaults
for any long flag (dashes or underscores), and explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import beltrami, certificates, harness, means
from .certificates import dumps
from .doubling import parse_doubling_spec
from .errors import QCError, Refusal, UnsupportedMapError
from .fields import load_grid_field, parse_field_spec, parse_map_spec

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_ERROR, EXIT_FAILS, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complex(text: str) -> complex:
    v = _vector(text) if "," in text else None
    if v is not None:
        if len(v) != 2:
            raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
        return complex(v[0], v[1])
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a complex number, got {text!r}") from None


def _floats(text: str) -> list[float]:
    """``lo:hi:count`` (linearly spaced) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}")
        try:
            lo, hi, k = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from None
        return np.linspace(lo, hi, k).tolist()
    return _vector(text)


# ---------------------------------------------------------------- output helpers


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else _g(v) for v in r])
    return buf.getvalue()


def _field(args):
    if args.grid:
        return load_grid_field(args.grid, args.grid_mode)
    if not args.field:
        raise UsageError("a field is required: pass --field or --grid")
    return parse_field_spec(args.field)


def _center(args, Q):
    if args.center is None:
        return np.zeros(Q.n)
    return np.asarray(args.center, dtype=float)


# ---------------------------------------------------------------- commands


def cmd_mean(args) -> int:
    Q = _field(args)
    prof = means.mean_profile(Q, _center(args, Q), args.radii, args.resolution, args.seed)
    if args.json:
        _emit(args, dumps({"center": list(prof.center), "r": prof.radii, "q": prof.values}) + "\n")
    else:
        _emit(args, prof.to_csv())
    return EXIT_OK


def cmd_condition(args) -> int:
    which = args.which
    if which == "boundary":
        K = beltrami.parse_mu_spec(args.mu).as_field() if args.mu else _field(args)
        rep = certificates.boundary_condition(K, args.eps0)
    else:
        Q = _field(args)
        c = _center(args, Q)
        if which == "dini":
            rep = certificates.dini_condition(Q, c, args.alpha, args.eps0, resolution=args.resolution)
        elif which == "fmv":
            rep = certificates.fmv_integral_condition(Q, args.eps0, x0=c, resolution=args.resolution)
        elif which == "ballmean":
            rep = certificates.ball_mean_condition(Q, c, args.eps0, resolution=args.resolution)
        else:
            rep = certificates.weighted_ball_condition(
                Q, c, parse_doubling_spec(args.phi), args.eps0, resolution=args.resolution
            )
    if args.out:
        Path(args.out).write_text(dumps(rep.to_dict()) + "\n" if args.out.endswith(".json") else rep.to_csv())
    if args.json:
        sys.stdout.write(dumps(rep.to_dict()) + "\n")
    else:
        sys.stdout.write(f"condition={rep.condition} verdict={rep.verdict} estimate={_g(rep.estimate)}\n")
    return EXIT_FAILS if rep.verdict == "fails" else EXIT_OK


def cmd_certificate(args) -> int:
    which = args.which
    if which == "boundary":
        cert = certificates.boundary_holder_certificate(args.C, args.eps0)
        _emit(args, cert.to_json() + "\n")
        return EXIT_OK
    if which == "cor3":
        Q = _field(args) if (args.field or args.grid) else None
        z0 = args.center if args.center is not None else None
        cert = certificates.cor3_certificate(args.Delta, args.C, args.eps0, Q, z0)
    else:
        Q = _field(args)
        c = _center(args, Q)
        if which == "interior":
            cert = certificates.holder_certificate_interior(
                Q, c, args.alpha, args.eps0, args.alpha_n, args.r0, resolution=args.resolution
            )
        else:
            delta = args.Delta if args.mode == "homeo" else args.r0
            cert = certificates.ball_mean_certificate(
                Q, c, args.C, delta, args.eps0, args.mode, resolution=args.resolution
            )
    _emit(args, cert.to_json() + "\n")
    return EXIT_OK


def cmd_beltrami(args) -> int:
    which = args.which
    if which == "coeff":
        f = beltrami.parse_planar_map_spec(args.map)
        z = args.z
        fz, fzb = beltrami.wirtinger_derivatives(f, z, args.h)
        mu = beltrami.coefficient_of_map(f, z, args.h)
        rec = {
            "z": z,
            "f_z": fz,
            "f_zbar": fzb,
            "mu": mu,
            "K": beltrami.max_dilatation(mu),
            "jacobian": beltrami.jacobian(f, z, args.h),
        }
    elif which == "reflect":
        f = beltrami.parse_planar_map_spec(args.map)
        F = beltrami.reflect_map(f)
        z = args.z
        rec = {"z": z, "F": complex(F(z)), "mu_F": beltrami.coefficient_of_map(F, z, args.h)}
        if args.mu:
            mu = beltrami.parse_mu_spec(args.mu)
            rec["mu_F_formula"] = beltrami.reflect_coefficient(mu, z)
        rec.update(F.check_invariants(seed=args.seed))
    else:
        mu = beltrami.parse_mu_spec(args.mu or "mu-const 0 0")
        zeta = args.zeta
        lens = []
        for e in args.eps:
            w = beltrami.inversion_weight_max(e, zeta)
            m = beltrami.reflected_mass_bound(mu, zeta, e)
            lens.append({"eps": e, "weight_max": w.sampled_max, "weight_bound": w.bound, "lhs": m.lhs, "rhs": m.rhs,
                         "ratio": m.ratio, "holds": m.holds})
        ann = []
        for R in args.R:
            m = beltrami.annulus_mass_bound(mu, R)
            ann.append({"R": R, "lhs": m.lhs, "rhs": m.rhs, "holds": m.holds})
        rec = {"mu": args.mu, "zeta": zeta, "factor17": lens, "annulus": ann}
        ok = all(r["holds"] for r in lens + ann)
        _emit(args, dumps(rec) + "\n")
        return EXIT_OK if ok else EXIT_FAILS
    _emit(args, dumps(rec) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    which = args.which
    if which == "ring":
        Q = parse_field_spec(args.Q)
        f = parse_map_spec(args.map, Q.n)
        eta0 = harness.extremal_eta(args.r1, args.r2)
        s = args.eta_scale
        res = harness.verify_ring_inequality(f, Q, args.r1, args.r2, lambda r: s * eta0(r))
        rec = {"lhs": res.lhs, "rhs": res.rhs, "holds": res.holds, "eta_integral": res.eta_integral,
               "relative_gap": res.equality_gap}
        if args.json or args.out:
            _emit(args, dumps(rec) + "\n")
        else:
            verdict = "holds" if res.holds else "fails"
            sys.stdout.write(f"ring inequality {verdict}: lhs={_g(res.lhs)} rhs={_g(res.rhs)}\n")
        return EXIT_OK if res.holds else EXIT_FAILS
    if which == "exponent":
        f = parse_map_spec(args.map, args.n)
        fit = harness.empirical_holder_exponent(f, 0 if args.center is None else args.center, args.radii, args.seed)
        if args.json:
            _emit(args, dumps({"slope": fit.slope, "intercept": fit.intercept, "residual_rms": fit.residual_rms,
                               "r": fit.radii, "displacement": fit.displacements}) + "\n")
        else:
            body = _csv(["r", "displacement"], zip(fit.radii, fit.displacements))
            _emit(args, body)
            if args.out:
                sys.stdout.write(f"slope={_g(fit.slope)} intercept={_g(fit.intercept)}\n")
        return EXIT_OK
    Q = _field(args)
    c = tuple(_center(args, Q).tolist())
    if args.region == "ball":
        region = harness.BallRegion(c, args.r)
    elif args.region == "annulus":
        region = harness.AnnulusRegion(c, args.r1, args.r2)
    else:
        region = harness.LensRegion(args.zeta, args.eps_region, not args.outside)
    est = harness.oracle_integral(Q, region, args.samples, args.seed)
    _emit(args, dumps({"value": est.value, "stderr": est.stderr, "samples": est.samples, "seed": est.seed}) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", "-f", help="field-spec string, e.g. 'const 1' or 'power 0.5'")
    p.add_argument("--grid", help="CSV lattice x1..xn,q used as the field")
    p.add_argument("--grid-mode", default="nearest", choices=("nearest", "multilinear"))
    p.add_argument("--center", type=_vector, help="comma-separated coordinates")
    p.add_argument("--eps0", type=float, default=0.25)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=None, help="sphere quadrature resolution")
    p.add_argument("--out", help="write the report to this path")
    p.add_argument("--json", action="store_true", help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcholder", description="Hölder continuity toolkit for ring Q-mappings.")
    parser.add_argument("--config", help="TOML file with defaults for long flags")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mean", help="spherical-mean profile q(r) as CSV")
    _common(p)
    p.add_argument("--radii", type=_floats, default=[0.1, 0.2, 0.3, 0.4, 0.5], help="lo:hi:count or a comma list")
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("condition", help="evaluate an integral condition on the dilatation")
    p.add_argument("which", choices=("dini", "fmv", "ballmean", "weighted", "boundary"))
    _common(p)
    p.add_argument("--phi", default="const", help="doubling weight spec for 'weighted'")
    p.add_argument("--mu", help="Beltrami coefficient spec for 'boundary'")
    p.set_defaults(func=cmd_condition)

    p = sub.add_parser("certificate", help="issue a Hölder certificate as JSON")
    p.add_argument("which", choices=("interior", "ballmean", "cor3", "boundary"))
    _common(p)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--Delta", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--alpha-n", type=float, default=None)
    p.add_argument("--mode", choices=("homeo", "open-discrete"), default="homeo")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("beltrami", help="planar Beltrami coefficients and reflection bounds")
    p.add_argument("which", choices=("coeff", "reflect", "bounds"))
    _common(p)
    p.add_argument("--map", default="identity", help="identity, conj, radial:<a> or scale:<c>")
    p.add_argument("--mu", help="mu-const re im, mu-radial a or mu-grid path")
    p.add_argument("--z", type=_complex, default=complex(0.5, 0.25), help="point as x,y or a complex literal")
    p.add_argument("--zeta", type=_complex, default=1 + 0j)
    p.add_argument("--eps", type=_vector, default=[0.05, 0.1, 0.2])
    p.add_argument("--R", type=_vector, default=[1.5, 2.0])
    p.add_argument("--h", type=float, default=beltrami.DEFAULT_STEP)
    p.set_defaults(func=cmd_beltrami)

    p = sub.add_parser("verify", help="ring inequality, empirical exponents and the Monte Carlo oracle")
    p.add_argument("which", choices=("ring", "exponent", "oracle"))
    _common(p)
    p.add_argument("--map", default="identity", help="identity, radial:<a> or grid:<path>")
    p.add_argument("--Q", default="const 1", help="field spec of Q for 'ring'")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r1", type=float, default=0.1)
    p.add_argument("--r2", type=float, default=0.5)
    p.add_argument("--r", type=float, default=1.0, help="ball radius for the oracle")
    p.add_argument("--eta-scale", type=float, default=1.0)
    p.add_argument("--radii", type=_floats, default=None)
    p.add_argument("--region", choices=("ball", "annulus", "lens"), default="ball")
    p.add_argument("--zeta", type=_complex, default=1 + 0j)
    p.add_argument("--eps-region", type=float, default=0.1)
    p.add_argument("--outside", action="store_true")
    p.add_argument("--samples", type=int, default=200_000)
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known_dests = set()
    for sp in subs.choices.values():
        for action in sp._actions:
            known_dests.add(action.dest)
            if action.dest in cfg:
                v = cfg[action.dest]
                if isinstance(v, (int, float)) and not isinstance(v, bool) and action.type in (_vector, _floats):
                    v = [float(v)]
                elif isinstance(v, list):
                    v = [float(x) for x in v]
                elif isinstance(v, str) and action.type is not None:
                    v = action.type(v)
                action.default = v
    unknown = set(cfg) - known_dests - {"config"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qcholder: error: {exc}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"qcholder: error: {exc}\n")
        return EXIT_USAGE
    except (Refusal, UnsupportedMapError) as exc:
        sys.stderr.write(f"qcholder: refused: {exc}\n")
        return EXIT_FAILS
    except (QCError, OSError) as exc:
        sys.stderr.write(f"qcholder: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
