"""Batch command line front-end.

Every subcommand prints a deterministic report (JSON by default, CSV on
request).  Exit codes: 0 ok, 1 selftest failure, 2 precision cap, 3 memory
guard, 64 usage error, 65 precondition violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import admissibility as adm
from . import exponent_pairs as ep
from . import expsum_lab as lab
from . import harmonic as hm
from . import ps_verify as ps
from . import selftest
from . import sieve as sv

EXIT_SELFTEST = 1
EXIT_PRECISION = 2
EXIT_MEMORY = 3
EXIT_USAGE = 64
EXIT_PRECONDITION = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- rendering

def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def to_json(obj) -> str:
    """Compact-but-readable JSON; Fractions become "p/q", floats keep 17 digits."""
    out: list[str] = []
    _emit(obj, out, 0)
    return "".join(out) + "\n"


def _emit(obj, out, depth):
    pad = "  " * (depth + 1)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, Fraction):
        out.append('"%s"' % obj)
    elif isinstance(obj, (complex, np.complexfloating)):
        _emit({"re": obj.real, "im": obj.imag}, out, depth)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f'{pad}"{k}": ')
            _emit(v, out, depth + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append("  " * depth + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
        elif all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            parts = []
            for v in items:
                buf: list[str] = []
                _emit(v, buf, depth + 1)
                parts.append("".join(buf))
            out.append("[" + ", ".join(parts) + "]")
        else:
            out.append("[\n")
            for i, v in enumerate(items):
                out.append(pad)
                _emit(v, out, depth + 1)
                out.append(",\n" if i < len(items) - 1 else "\n")
            out.append("  " * depth + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


class Report:
    """A payload plus an optional tabular view for CSV mode."""

    def __init__(self, data, header=None, rows=None, text=None):
        self.data, self.header, self.rows, self.text = data, header, rows, text

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            if self.text is not None:
                return self.text
            if self.header is None:
                # flat key/value view; nested values are inlined as JSON
                rows = []
                for k, v in self.data.items():
                    if isinstance(v, (list, tuple, dict, complex)):
                        v = json.dumps(json.loads(to_json(v)), separators=(",", ":"))
                    rows.append((k, v))
                return to_csv(["key", "value"], rows)
            return to_csv(self.header, self.rows)
        return to_json(self.data)


# ---------------------------------------------------------------- arguments

def _rational(text: str) -> Fraction:
    try:
        return ep.as_fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _pair_from(args) -> tuple[str | None, ep.ExponentPair]:
    if args.word is not None:
        if args.kappa is not None or args.lam is not None:
            raise UsageError("give either --word or --kappa/--lambda, not both")
        return ep.normalize_word(args.word), ep.apply_word(args.word)
    if args.kappa is None or args.lam is None:
        raise UsageError("need --word or both --kappa and --lambda")
    return None, ep.ExponentPair(args.kappa, args.lam)


# ---------------------------------------------------------------- commands

def cmd_pairs(args) -> Report:
    L = 6 if args.max_len is None else args.max_len
    if L < 0:
        raise ValueError("--max-len must be >= 0")
    items = ep.enumerate_pairs(L)
    rows = []
    for word, p in items:
        row = {"word": word, "kappa": p.kappa, "lambda": p.lam}
        if args.thresholds:
            row["gamma_threshold"] = adm.gamma_threshold(p)
        rows.append(row)
    data = {"max_len": L, "count": len(rows), "pairs": rows}
    if args.best:
        word, p, g0 = adm.search_best_pair(L, workers=args.workers)
        data["best"] = {"word": word, "kappa": p.kappa, "lambda": p.lam,
                        "gamma_threshold": g0, "c_threshold": 1 / g0}
    header = list(rows[0].keys())
    return Report(data, header, [list(r.values()) for r in rows])


def cmd_admissible(args) -> Report:
    word, pair = _pair_from(args)
    data = adm.pair_report(word, pair)
    if args.gamma is not None:
        delta = adm.max_delta(pair, args.gamma)
        data["gamma"] = args.gamma
        if delta:
            res = adm.solve_lp(adm.build_constraints(pair), args.gamma)
            data["delta_max"] = res.delta
            data["q_opt"] = res.q
            data["binding_at_gamma"] = list(res.binding)
            data["prime_factor_count"] = adm.prime_factor_count_from_delta(args.gamma, res.delta)
        else:
            data["delta_max"] = None
            data["infeasible"] = True
    return Report(data)


def cmd_bound(args) -> Report:
    _need(args, "c")
    return Report({"c": args.c, "bound": adm.prime_factor_bound(args.c)},
                  ["c", "bound"], [[args.c, adm.prime_factor_bound(args.c)]])


def cmd_vaaler(args) -> Report:
    _need(args, "H")
    va = hm.vaaler(args.H)
    n = args.points
    x = np.arange(n) / n
    curve = hm.vaaler_curve(args.H, x)
    gap = curve[:, 3] - np.abs(curve[:, 1] - curve[:, 2])
    coeffs = []
    for h in range(0, args.H + 1):
        a, b = va.coef(h)
        coeffs.append({"h": h, "a_re": a.real, "a_im": a.imag, "b": b})
    data = {"H": args.H, "points": n, "min_majorant_gap": float(gap.min()), "coefficients": coeffs}
    return Report(data, ["x", "psi", "approx", "majorant"], curve.tolist())


def cmd_theta(args) -> Report:
    _need(args, "Z", "r")
    fam = hm.theta_family(args.Z, args.r)
    n = args.points
    x = np.arange(n) / n - 0.5
    members = np.array([fam.member(z, x) for z in range(fam.size)])
    total = members.sum(axis=0)
    data = {"Z": args.Z, "r": args.r, "Delta": fam.base.Delta, "points": n,
            "partition_max_error": float(np.max(np.abs(total - 1)))}
    if args.M is not None:
        err = max(float(np.max(np.abs(fam.partial_sum(z, x, args.M) - members[z]))) for z in range(fam.size))
        data["M"] = args.M
        data["truncation_max_error"] = err
    header = ["x"] + [f"theta_{z}" for z in range(fam.size)] + ["total"]
    rows = np.column_stack([x, members.T, total]).tolist()
    return Report(data, header, rows)


def cmd_sieve(args) -> Report:
    _need(args, "D", "z")
    ctx = sv.SieveContext(args.D, args.z)
    table = sv.rosser_weights(ctx)
    sums = sv.sieve_sums(ctx, table)
    data = sums.as_dict()
    data["B_exact"] = sums.B
    data["N_plus_exact"] = sums.N_plus
    data["N_minus_exact"] = sums.N_minus
    data["support_size"] = len(table)
    data["in_linear_range"] = ctx.in_linear_range
    if args.check is not None:
        bad = sv.sandwich_violations(args.check, table, ctx)
        data["sandwich_checked_upto"] = args.check
        data["sandwich_violations"] = [n for n, _ in bad[:20]]
    return Report(data, ["d", "lambda_plus", "lambda_minus"], sv.weight_rows(table))


def cmd_vaughan(args) -> Report:
    _need(args, "P")
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=2 * args.P + 1) + 1j * rng.normal(size=2 * args.P + 1)
    f = lambda n: vals[n]  # noqa: E731
    vp = lab.vaughan_decompose(args.P, f)
    direct = lab.direct_lambda_sum(args.P, f)
    data = {"P": args.P, "seed": seed, "u": vp.u, "S1": vp.S1, "S2": vp.S2, "S3": vp.S3,
            "S1_minus_S2_minus_S3": vp.total, "direct": direct, "abs_error": abs(vp.total - direct)}
    return Report(data)


def cmd_expsum(args) -> Report:
    kind = args.kind
    if kind is None:
        raise UsageError("--kind is required")
    if kind == "probe":
        word = args.word or ""
        pair = ep.apply_word(word)
        lam1 = 1.0 if args.lambda1 is None else args.lambda1
        a = 10_000 if args.a is None else args.a
        return Report(lab.exponent_pair_probe(pair, lam1, a))
    if kind == "weyl":
        L = 100 if args.a is None else args.a
        Q = 10 if args.Q is None else args.Q
        rng = np.random.default_rng(0 if args.seed is None else args.seed)
        z = rng.normal(size=L) + 1j * rng.normal(size=L)
        lhs, rhs = lab.weyl_vdc_check(z, Q)
        return Report({"length": L, "Q": Q, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs * (1 + 1e-12)})
    _need(args, "N", "c")
    if kind in ("W", "U", "supU"):
        P = args.P if args.P is not None else ps.default_P(args.N, args.c)
        ctx = lab.ExpSumContext(args.N, args.c, P, j=args.j, d=args.d, h=args.h, r=args.r, T=args.T)
        data = {"kind": kind, "N": args.N, "c": ctx.c, "P": P, "j": ctx.j, "d": ctx.d, "h": ctx.h, "r": ctx.r}
        if kind == "W":
            data["value"] = lab.eval_W(ctx)
        elif kind == "U":
            data["T"] = ctx.T
            data["value"] = lab.eval_U(ctx)
        else:
            best, at = lab.sup_U(ctx)
            data["sup_abs"] = best
            data["argmax_T"] = at
        return Report(data)
    _need(args, "z")
    if kind == "Gamma":
        return Report({"kind": kind, "N": args.N, "c": ep.as_fraction(args.c), "z": args.z,
                       "value": lab.eval_Gamma(args.N, args.c, args.z, args.P)})
    _need(args, "D")
    if kind == "Sigma":
        return Report({"kind": kind, "N": args.N, "c": ep.as_fraction(args.c), "D": args.D, "j": args.j,
                       "value": lab.eval_Sigma(args.N, args.c, args.D, args.j, args.z, args.P)})
    if kind == "lower":
        return Report(lab.gamma_lower_bound(args.N, args.c, args.D, args.z, args.P))
    raise UsageError(f"unknown --kind {kind!r}")


def _ps_config(args) -> ps.PSConfig:
    _need(args, "c", "n_lo", "n_hi")
    return ps.PSConfig(args.c, args.n_lo, args.n_hi, segment=args.segment,
                       witnesses=args.witnesses, workers=args.workers)


def cmd_scan(args) -> Report:
    cfg = _ps_config(args)
    if args.format == "csv":
        return Report(None, text=ps.scan_csv(cfg))
    recs = [{"N": r.N, "count": r.count, "min_omega": r.min_omega, "bound": r.bound,
             "satisfied": r.satisfied, "witnesses": [list(w) for w in r.witnesses]}
            for r in ps.scan(cfg)]
    return Report({"c": cfg.c, "range": [cfg.n_lo, cfg.n_hi], "records": recs})


def cmd_verify(args) -> Report:
    return Report(ps.verify_theorem(_ps_config(args)))


def cmd_gamma0(args) -> Report:
    _need(args, "N", "c", "z", "D")
    return Report(ps.gamma0_diagnostic(args.N, args.c, args.z, args.D, args.P))


COMMANDS = {
    "pairs": (cmd_pairs, "enumerate exponent pairs reachable by A/B words"),
    "admissible": (cmd_admissible, "threshold and sieve level LP for one exponent pair"),
    "bound": (cmd_bound, "almost-prime bound for a given c"),
    "vaaler": (cmd_vaaler, "Vaaler approximation coefficients and curves"),
    "theta": (cmd_theta, "smooth partition of unity"),
    "sieve": (cmd_sieve, "Rosser weights and sieve sums"),
    "vaughan": (cmd_vaughan, "Vaughan decomposition on random coefficients"),
    "expsum": (cmd_expsum, "exponential sums and sieve-weighted counts"),
    "scan": (cmd_scan, "per-N representation records"),
    "verify": (cmd_verify, "exception summary over a range of N"),
    "gamma0": (cmd_gamma0, "main term diagnostic"),
}

_DEFAULT_FORMAT = {"scan": "csv"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", metavar="PATH", default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--selftest", action="store_true", help="run this module's quick property checks")

    parser = _Parser(prog="pshapiro", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sps = {name: sub.add_parser(name, parents=[common], help=help_)
           for name, (_, help_) in COMMANDS.items()}

    p = sps["pairs"]
    p.add_argument("--max-len", type=int)
    p.add_argument("--thresholds", action="store_true", help="add each pair's gamma threshold")
    p.add_argument("--best", action="store_true", help="report the pair with the smallest threshold")

    p = sps["admissible"]
    p.add_argument("--word")
    p.add_argument("--kappa", type=_rational)
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--gamma", type=_rational)

    sps["bound"].add_argument("--c", type=_rational)

    p = sps["vaaler"]
    p.add_argument("H", type=int, nargs="?")
    p.add_argument("--points", type=int, default=1000)

    p = sps["theta"]
    p.add_argument("Z", type=int, nargs="?")
    p.add_argument("r", type=int, nargs="?")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--M", type=int, help="also report the Fourier truncation error at order M")

    p = sps["sieve"]
    p.add_argument("D", type=int, nargs="?")
    p.add_argument("z", type=int, nargs="?")
    p.add_argument("--check", type=int, metavar="LIMIT", help="verify the sandwich for n <= LIMIT")

    p = sps["vaughan"]
    p.add_argument("P", type=int, nargs="?")
    p.add_argument("seed", type=int, nargs="?")

    p = sps["expsum"]
    p.add_argument("kind", nargs="?", choices=("W", "U", "supU", "Gamma", "Sigma", "lower", "probe", "weyl"))
    for name in ("N", "P", "D", "z", "a", "Q", "seed"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--c", type=_rational)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--T", type=float)
    p.add_argument("--word")
    p.add_argument("--lambda1", type=float)

    for name in ("scan", "verify"):
        p = sps[name]
        p.add_argument("--c", type=_rational)
        p.add_argument("--n-lo", type=int)
        p.add_argument("--n-hi", type=int)
        p.add_argument("--segment", type=int, default=2**16)
        p.add_argument("--witnesses", choices=("best", "all", "none"), default="best")

    p = sps["gamma0"]
    for name in ("N", "z", "D", "P"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--c", type=_rational)
    return parser


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a parse error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.format is None:
        args.format = _DEFAULT_FORMAT.get(args.command, "json")
    if args.workers < 1:
        print("pshapiro: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    if args.selftest:
        results = selftest.run(args.command)
        _write("".join(f"{'PASS' if ok else 'FAIL'} {label}\n" for label, ok in results), args.out)
        return 0 if all(ok for _, ok in results) else EXIT_SELFTEST

    handler = COMMANDS[args.command][0]
    try:
        report = handler(args)
    except UsageError as exc:
        print(f"pshapiro {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ps.PrecisionCapError as exc:
        print(f"pshapiro: precision cap reached: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except sv.MemoryGuardError as exc:
        print(f"pshapiro: memory guard: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except (ValueError, ZeroDivisionError) as exc:
        print(f"pshapiro {args.command}: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _write(report.render(args.format), args.out)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
