"""Command-line front end.

    r2opuc zeros --example ex3 --n 3
    r2opuc weights --input data.json --n 8 --output json
    r2opuc verify --example ex4 --lambda 1 --eta 1 --n 8

Input files are JSON objects {"c": [...], "d": [...]} where ``c[0]`` is c_1
and ``d[0]`` is d_2 (the chain sequence starts at d_2).  Exit status: 0 on
success, 1 if a verification failed, 2 for invalid input, 3 for a
numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import fixtures, opuc, pencil, spectral
from .errors import InputError, NumericalError
from .recurrence import CoefficientData

COMMANDS = ("zeros", "weights", "verblunsky", "nu", "sfamily", "moments", "verify", "fixtures")


def _num(v):
    # shortest round-trip decimal; -0.0 printed as 0.0
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


class Table:
    def __init__(self, columns, rows, extra=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.extra = extra or {}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            out = {"columns": self.columns, "rows": [[_json(v) for v in r] for r in self.rows]}
            out.update({k: _json(v) for k, v in self.extra.items()})
            return json.dumps(out, indent=2)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_num(v) for v in r])
        for k, v in self.extra.items():
            buf.write(f"# {k}={_num(v)}\n")
        return buf.getvalue().rstrip("\n")


def _json(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v) + 0.0
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _example(args) -> fixtures.ExampleSpec:
    ex = args.example
    s = 0.0 if args.s is None else args.s
    if ex == "ex1":
        return fixtures.ExampleSpec.ex1(s)
    if ex == "ex2":
        if args.kappa is None:
            raise InputError("ex2 needs --kappa")
        return fixtures.ExampleSpec.ex2(args.kappa, s)
    if ex == "ex3":
        return fixtures.ExampleSpec.ex3(s)
    if args.lam is None or args.eta is None:
        raise InputError("ex4 needs --lambda and --eta")
    return fixtures.ExampleSpec.ex4(args.lam, args.eta, args.s)


def _random_data(seed: int, N: int) -> CoefficientData:
    rng = np.random.default_rng(seed)
    ell = np.concatenate([[0.0], rng.uniform(0.05, 0.95, N)])
    c = rng.uniform(-5.0, 5.0, N + 1)
    return CoefficientData.from_ell(c, ell)


def _load(args, N: int):
    """Coefficient data holding at least degree N (and ℓ_{N+1})."""
    if args.example is not None and args.input is not None:
        raise InputError("give either --example or --input, not both")
    if args.example is not None:
        return fixtures.example_sequences(_example(args), N), _example(args)
    if args.input is not None:
        try:
            with open(args.input) as fh:
                raw = json.load(fh)
            c, d = raw["c"], raw["d"]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        cd = CoefficientData.from_arrays(c, d)
        if len(cd.c) < N or len(cd.d) < N:
            raise InputError(f"input needs at least {N} entries of c and of d")
        return cd, None
    if args.seed is not None:
        return _random_data(args.seed, N), None
    raise InputError("give --example, --input or --seed")


def _need_n(args):
    if args.n is None or args.n < 2:
        raise InputError("--n must be at least 2")
    return args.n


def cmd_zeros(args):
    n = _need_n(args)
    cd, _ = _load(args, n)
    sd = pencil.solve(pencil.build_pencil(cd, n), vectors=False)
    z = np.exp(1j * np.angle((sd.x + 1j) / (sd.x - 1j)))
    rows = [(r + 1, x, w.real, w.imag) for r, (x, w) in enumerate(zip(sd.x, z))]
    return Table(["r", "x", "zeta_re", "zeta_im"], rows), 0


def cmd_weights(args):
    n = _need_n(args)
    cd, _ = _load(args, n)
    q = spectral.quadrature(cd, n)
    rows = [(r + 1, x, a, b) for r, (x, a, b) in enumerate(zip(q.x, q.lam, q.lambda_hat))]
    extra = {"sum_lambda": float(np.sum(q.lam)), "sum_lambda_hat": float(np.sum(q.lambda_hat))}
    return Table(["r", "x", "lambda", "lambda_hat"], rows, extra), 0


def cmd_verblunsky(args):
    n = _need_n(args)
    cd, _ = _load(args, n + 1)
    v = opuc.verblunsky_from_cd(cd, n)
    rows = [(k, a.real, a.imag, t.real, t.imag) for k, (a, t) in enumerate(zip(v.alpha, v.tau))]
    return Table(["k", "alpha_re", "alpha_im", "tau_re", "tau_im"], rows), 0


def cmd_nu(args):
    n = _need_n(args)
    cd, _ = _load(args, n + 1)
    nd = opuc.nu_data(cd, n)
    rows = [(k, b.real, b.imag, m, g) for k, (b, m, g) in enumerate(zip(nd.beta, nd.M, nd.gamma[1:]))]
    return Table(["k", "beta_re", "beta_im", "M_k+1", "gamma_k+1"], rows, {"gamma_residual": nd.gamma_residual}), 0


def cmd_sfamily(args):
    n = _need_n(args)
    s = 0.0 if args.s is None else args.s
    if args.example is not None:
        ex = _example(args)
        if ex.id is fixtures.ExampleId.EX2:
            cd = fixtures.example_sequences(fixtures.ExampleSpec.ex2(ex.kappa, 0.0), n + 1)
            alpha = opuc.verblunsky_from_cd(cd, n).alpha
        else:
            alpha = fixtures.closed_form_alpha(ex, n)
        I = fixtures.example_I(fixtures.ExampleSpec(ex.id, ex.kappa, ex.lam, ex.eta, 0.0))
    else:
        cd, _ = _load(args, n + 1)
        alpha = opuc.verblunsky_from_cd(cd, n).alpha
        # the data are taken as the s = 0 member unless Im I is given
        im = -cd.c[0] / 2 if args.imag_i is None else args.imag_i
        I = complex(0.5, im)
    fam = opuc.s_family(alpha, I, s, n)
    rows = [(k + 1, fam.c_s[k], fam.d_s[k] if k < len(fam.d_s) else "", fam.ell_s[k]) for k in range(n)]
    return Table(["k", "c_k", "d_k+1", "ell_k"], rows, {"s": s}), 0


def cmd_moments(args):
    n = _need_n(args)
    cd, _ = _load(args, n)
    q = spectral.quadrature(cd, n)
    rows = []
    for k in range(-(n - 1), n):
        m = spectral.discrete_moment(q, k)
        rows.append((k, m.real, m.imag))
    return Table(["k", "re", "im"], rows), 0


def verify_checks(cd: CoefficientData, n: int, ex=None):
    """List of (name, value, tolerance) for the standard consistency checks."""
    out = []
    p = pencil.build_pencil(cd, n)
    sd = pencil.solve(p)
    bis = pencil.zeros_by_bisection(cd, n)
    scale = np.maximum(1.0, np.abs(bis))
    out.append(("eigen_vs_bisection", float(np.max(np.abs(sd.x - bis) / scale)), 1e-10))
    q = spectral.quadrature(cd, n, spectral=sd)
    out.append(("wronskian_vs_eigvec_weights", float(np.max(np.abs(q.lam / sd.eig_weights - 1.0))), 1e-9))
    out.append(("sum_lambda_hat", abs(float(np.sum(q.lambda_hat)) - 1.0), 1e-10))
    out.append(("sum_lambda_wall", abs(float(np.sum(q.lam)) / spectral.wall_partial_sum(cd, n) - 1.0), 1e-9))
    signs = pencil.interlacing_signs(cd, n, sd.x)
    out.append(("interlacing_sign_defects", float(np.sum(signs < 0)), 0.0))
    if len(cd.d) >= n and len(cd.ell) >= n + 1:
        out.append(("discrete_orthogonality", spectral.verify_discrete_orthogonality(cd, n, q).deviation, 1e-9))
        out.append(("phi_orthogonality", spectral.verify_phi_orthogonality(cd, n, q).deviation, 1e-9))
    if len(cd.c) >= n + 1 and len(cd.ell) >= n + 1:
        v = opuc.verblunsky_from_cd(cd, n)
        back = opuc.cd_from_verblunsky(v.alpha, v.tau1, n)
        err = max(np.max(np.abs(back.c[: n + 1] - cd.c[: n + 1])), np.max(np.abs(back.d[:n] - cd.d[:n])))
        out.append(("round_trip_cd", float(err), 1e-10))
        if ex is not None and ex.id is not fixtures.ExampleId.EX2:
            out.append(("alpha_closed_form", float(np.max(np.abs(v.alpha - fixtures.closed_form_alpha(ex, n)))), 1e-10))
    return out


def cmd_verify(args):
    n = _need_n(args)
    cd, ex = _load(args, n + 1)
    rows = [(name, val, tol, val <= tol) for name, val, tol in verify_checks(cd, n, ex)]
    status = 0 if all(r[3] for r in rows) else 1
    return Table(["check", "value", "tolerance", "pass"], rows), status


def cmd_fixtures(args):
    n = _need_n(args)
    if args.example is None:
        raise InputError("fixtures needs --example")
    return fixtures.export_json(_example(args), n), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="r2opuc", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", choices=["ex1", "ex2", "ex3", "ex4"])
    common.add_argument("--kappa", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--eta", type=float)
    common.add_argument("--s", type=float)
    common.add_argument("--imag-i", dest="imag_i", type=float, help="Im I(μ) for sfamily on file input")
    common.add_argument("--n", type=int)
    common.add_argument("--input", help='JSON file {"c": [c_1, ...], "d": [d_2, ...]}')
    common.add_argument("--output", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, help="random instance when no example or input is given")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = globals()[f"cmd_{args.command}"]
    try:
        result, status = handler(args)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text = result if isinstance(result, str) else result.render(args.output)
    print(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
