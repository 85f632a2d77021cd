"""Command-line entry point: ``bbdigits {spectrum,sample,digits,rng,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
The default seed can be overridden with the ``BBDIGITS_SEED`` environment
variable; an explicit ``--seed`` wins over both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import distributions as dist
from . import samplers as smp
from . import verify as ver
from .stats import ALPHAS

SEED_ENV = "BBDIGITS_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def resolve_seed(flag):
    if flag is not None:
        seed = flag
    else:
        env = os.environ.get(SEED_ENV)
        if env is None or env.strip() == "":
            return smp.DEFAULT_SEED
        try:
            seed = int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer")
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return seed


def resolve_beta(args, allow_zero: bool = False) -> float:
    has_beta = args.beta is not None
    has_mode = args.nu is not None or args.temperature is not None
    if has_beta == has_mode:
        raise UsageError("give exactly one of --beta or (--nu and --temperature)")
    if has_mode:
        if args.nu is None or args.temperature is None:
            raise UsageError("--nu and --temperature must be given together")
        try:
            return dist.beta_of(args.nu, args.temperature)
        except dist.DomainError as exc:
            raise UsageError(str(exc))
    beta = args.beta
    if not np.isfinite(beta) or beta < 0.0 or (beta == 0.0 and not allow_zero):
        need = ">= 0" if allow_zero else "> 0"
        raise UsageError(f"--beta must be finite and {need} for this command, got {beta}")
    return beta


@contextmanager
def open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def emit_table(rows, columns, fmt, path, config):
    rows = list(rows)
    with open_output(path) as fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in columns])
        else:
            json.dump({"config": config, "rows": rows}, fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args):
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if not (args.nu_min > 0 and args.nu_max >= args.nu_min):
        raise UsageError("need 0 < --nu-min <= --nu-max")
    if not args.temperature or args.temperature <= 0:
        raise UsageError("--temperature must be > 0")
    if args.steps == 1:
        grid = np.array([args.nu_min])
    elif args.log:
        grid = np.geomspace(args.nu_min, args.nu_max, args.steps)
    else:
        grid = np.linspace(args.nu_min, args.nu_max, args.steps)
    rows = []
    for nu in grid:
        p = dist.spectral_point(float(nu), args.temperature)
        rows.append(
            {
                "nu": p.nu,
                "temperature": p.temperature,
                "u_nu": p.u_nu,
                "mean_energy": p.mean_energy,
                "occupation": p.occupation,
                "beta": p.beta,
            }
        )
    config = {
        "command": "spectrum",
        "nu_min": args.nu_min,
        "nu_max": args.nu_max,
        "steps": args.steps,
        "log": args.log,
        "temperature": args.temperature,
    }
    emit_table(rows, list(rows[0]), args.format, args.output, config)
    return EXIT_OK


def cmd_sample(args):
    if args.route not in smp.ROUTES:
        raise UsageError(f"invalid route {args.route!r}; valid routes: {', '.join(smp.ROUTES)}")
    beta = resolve_beta(args)
    seed = resolve_seed(args.seed)
    rng = smp.RngStream(seed)
    if args.route == "amplitude":
        sample = smp.sample_eta_via_amplitudes(rng, beta, args.count)
    elif args.route == "direct":
        sample = smp.sample_eta_direct(rng, beta, args.count)
    else:
        zeta, digits = smp.sample_zeta_via_digits(rng, beta, args.depth, args.count)
        xi, _ = smp.sample_xi_via_binary_photons(rng, beta, size=args.count)
        # re-split the float sum so eta == xi + zeta holds exactly per row
        sample = smp.EnergySample.from_eta(xi + zeta, "digits")
    columns = ["index", "eta", "xi", "zeta", "route"]
    if sample.theta is not None:
        columns.insert(4, "theta")
    rows = ({"index": i, **row} for i, row in enumerate(sample.rows()))
    config = {"command": "sample", "beta": beta, "seed": seed, "count": args.count, "route": args.route}
    if args.route == "digits":
        config["depth"] = args.depth
    emit_table(rows, columns, args.format, args.output, config)
    return EXIT_OK


def cmd_digits(args):
    beta = resolve_beta(args, allow_zero=True)
    seed = resolve_seed(args.seed)
    rng = smp.RngStream(seed)
    if args.source == "sampled":
        _, digits = smp.sample_zeta_via_digits(rng, beta, args.depth, args.count)
    else:
        zeta = smp.sample_zeta_truncexp(rng, beta, args.count)
        digits = dist.DigitVector(dist.digits_of(zeta, args.depth), "fractional")
    values = np.atleast_1d(smp.reconstruct_zeta(digits))
    strings = ["".join("1" if b else "0" for b in row) for row in digits.bits.reshape(-1, args.depth)]
    rows = ({"index": i, "bits": s, "zeta": float(v)} for i, (s, v) in enumerate(zip(strings, values)))
    config = {
        "command": "digits",
        "beta": beta,
        "seed": seed,
        "count": args.count,
        "depth": args.depth,
        "source": args.source,
    }
    emit_table(rows, ["index", "bits", "zeta"], args.format, args.output, config)
    return EXIT_OK


def cmd_rng(args):
    seed = resolve_seed(args.seed)
    rng = smp.RngStream(seed)
    buf = io.StringIO()
    if args.mode == "bits":
        bits = smp.zero_point_bits(rng, args.count)
        text = "".join("1" if b else "0" for b in bits)
        for i in range(0, len(text), 64):
            buf.write(text[i : i + 64] + "\n")
    else:
        for u in np.atleast_1d(smp.zero_point_uniform(rng, args.count)):
            buf.write(fmt_float(u) + "\n")
    with open_output(args.output) as fh:
        fh.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args):
    seed = resolve_seed(args.seed)
    betas = args.beta if args.beta else list(ver.DEFAULT_BETAS)
    if any(not np.isfinite(b) or b <= 0 for b in betas):
        raise UsageError("every --beta must be > 0 for verification")
    if not args.exact_only and args.count < 10_000:
        raise UsageError("--count must be >= 10000 for the Monte Carlo suite")
    result = ver.run(betas, seed, args.count, args.alpha, args.exact_only)
    with open_output(args.output) as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    return EXIT_OK if result["summary"]["failed"] == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _depth(text):
    value = int(text)
    if not 1 <= value <= 64:
        raise argparse.ArgumentTypeError(f"depth must be in [1, 64], got {value}")
    return value


def _alpha(text):
    value = float(text)
    if value not in ALPHAS:
        raise argparse.ArgumentTypeError(f"alpha must be one of {', '.join(map(str, ALPHAS))}")
    return value


def _seed(text):
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bbdigits",
        description="Integer/dyadic-digit decomposition of thermal mode energy: "
        "tabulate, sample, extract digits, generate ideal bits, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=True):
        p.add_argument("--seed", type=_seed, default=None, help=f"64-bit seed (env {SEED_ENV})")
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    def mode(p):
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--nu", type=float, default=None, help="frequency, Hz")
        p.add_argument("--temperature", type=float, default=None, help="temperature, K")

    p = sub.add_parser("spectrum", help="tabulate Planck's law on a frequency grid")
    p.add_argument("--nu-min", type=float, required=True)
    p.add_argument("--nu-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--temperature", type=float, required=True)
    p.add_argument("--log", action="store_true", help="geometric instead of linear grid")
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sample", help="energy samples split into integer and fractional parts")
    mode(p)
    common(p)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--route", default="direct", help=f"one of {', '.join(smp.ROUTES)}")
    p.add_argument("--depth", type=_depth, default=smp.DEFAULT_DEPTH)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("digits", help="dyadic digits of the fractional part")
    mode(p)
    common(p)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--depth", type=_depth, default=smp.DEFAULT_DEPTH)
    p.add_argument("--source", choices=("sampled", "extracted"), default="sampled")
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("rng", help="zero-point ideal bits or uniforms")
    common(p, formats=False)
    p.add_argument("--count", type=_positive_int, required=True)
    p.add_argument("--mode", choices=("bits", "uniform"), default="bits")
    p.set_defaults(func=cmd_rng)

    p = sub.add_parser("verify", help="exact identities and Monte Carlo tests, JSON report")
    p.add_argument("--beta", type=float, nargs="+", default=None)
    common(p, formats=False)
    p.add_argument("--count", type=_positive_int, default=ver.DEFAULT_COUNT)
    p.add_argument("--alpha", type=_alpha, default=0.01)
    p.add_argument("--exact-only", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, dist.DomainError) as exc:
        print(f"bbdigits {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
