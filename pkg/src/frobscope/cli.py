"""
Command-line front end.

Every command accepts ``--config FILE`` with ``key = value`` lines using the
flag names (dashes or underscores); flags given on the command line win.
Exit status is 0 on success, 2 on usage or precondition errors, and 1 when
a certificate or checked property fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .discrepancy import (
    ExperimentConfig,
    random_theta_boxes,
    report_from_dict,
    run_effective_deligne,
    run_joint,
    weil_trace_check,
)
from .erdos_turan import build_majorants, log_exponent_fit, loglog_slope, scn_sum, symmetrize_to_S
from .errors import CertificateViolation, FrobscopeError
from .exp_sums import SumKind, angle_sweep
from .finite_field import make_ext_field
from .io import atomic_write_text, dumps, fmt_float
from .kernels import KernelMode, KernelSpec
from .root_system import (
    BoxSpec,
    build_root_system,
    character_inner_product,
    dominant_weights_up_to,
    wrap_box_indicator,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class PropertyFailure(Exception):
    """A checked numerical property did not hold."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_usage()}")


# -- parsing helpers -----------------------------------------------------------

def _box(text: str) -> tuple[tuple[float, float], ...]:
    """``"a,b"`` or ``"a,b;c,d"``."""
    try:
        ivs = []
        for part in text.split(";"):
            a, b = (float(v) for v in part.split(","))
            ivs.append((a, b))
        return tuple(ivs)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad box {text!r}; expected lo,hi[;lo,hi]") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, values: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, raw in values.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r} for {sub.prog}")
        act = actions[key]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        conv = act.type or str
        try:
            defaults[key] = conv(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
        if act.choices is not None and defaults[key] not in act.choices:
            raise UsageError(f"bad value for {key}: {raw!r}")
        act.required = False
    sub.set_defaults(**defaults)


def _config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _out(path: str | None, text: str) -> None:
    if path:
        atomic_write_text(Path(path), text)
    else:
        sys.stdout.write(text)


def _write_report(rep, out: str | None, plot: str | None) -> None:
    if out:
        base = Path(out)
        atomic_write_text(base, dumps(rep.to_dict()))
        rep.to_csv(base.with_suffix(".csv"))
    else:
        sys.stdout.write(rep.to_csv())
    if plot:
        atomic_write_text(Path(plot), rep.plot_data())
    print(f"max deviation {fmt_float(rep.max_deviation)}; runtime {rep.runtime:.2f} s", file=sys.stderr)


# -- commands ------------------------------------------------------------------

def cmd_gen_angles(args) -> int:
    field = make_ext_field(args.p, args.m)
    sweep = angle_sweep(field, SumKind(args.kind), method=args.method, workers=args.threads)
    _out(args.out, sweep.to_csv())
    return EXIT_OK


def cmd_verify_majorant(args) -> int:
    box = BoxSpec(args.box)
    spec = KernelSpec(KernelMode(args.kernel), box.rank)
    pair = build_majorants(box, args.M, spec)
    rng = np.random.default_rng(args.seed)
    x = (np.arange(args.grid) + 0.5)[:, None] / args.grid if box.rank == 1 else rng.random((args.grid, box.rank))
    chi = wrap_box_indicator(box, x).astype(float)
    low = float(np.min(chi - pair.b_minus(x)))
    high = float(np.min(pair.b_plus(x) - chi))
    result = {"M": args.M, "box": [list(iv) for iv in box.intervals], "mode": spec.mode.value,
              "min_chi_minus_bminus": low, "min_bplus_minus_chi": high, "majorant": pair.to_dict()}
    if args.type:
        sp, sm = symmetrize_to_S(build_root_system(args.type), pair)
        result["S_plus"], result["S_minus"] = sp.to_dict(), sm.to_dict()
    _out(args.out, dumps(result))
    print(f"violation lower {fmt_float(min(low, 0.0))} upper {fmt_float(min(high, 0.0))}", file=sys.stderr)
    if min(low, high) < -args.tol:
        raise PropertyFailure("majorization failed on the sample grid")
    return EXIT_OK


def _theta_boxes(args, joint=False):
    if args.box:
        return tuple(args.box)
    return random_theta_boxes(args.boxes, args.seed, joint=joint) if args.boxes else ()


def cmd_verify_et(args) -> int:
    cfg = ExperimentConfig(p=args.p, m=args.m, source=args.source, boxes=_theta_boxes(args), M=args.M,
                           kernel=args.kernel, N=args.N, seed=args.seed, workers=args.threads, check=False)
    rep = run_effective_deligne(cfg)
    _write_report(rep, args.out, None)
    bad = [r for r in rep.rows if r.deviation > r.certificate]
    if bad:
        raise CertificateViolation(f"{len(bad)} boxes exceed their certificate")
    return EXIT_OK


def cmd_char_orthonormality(args) -> int:
    rs = build_root_system(args.type)
    weights = [(0,) * rs.rank] + dominant_weights_up_to(rs, args.max_norm)
    worst = 0.0
    lines = []
    for i, a in enumerate(weights):
        for b in weights[i:]:
            val = character_inner_product(rs, a, b, args.points)
            err = abs(val - (1.0 if a == b else 0.0))
            worst = max(worst, err)
            lines.append(f"{list(a)} {list(b)} {fmt_float(val.real)} {fmt_float(val.imag)}\n")
    _out(args.out, "".join(lines))
    print(f"max deviation from delta {fmt_float(worst)}", file=sys.stderr)
    if worst > args.tol:
        raise PropertyFailure("characters are not orthonormal to the requested tolerance")
    return EXIT_OK


def cmd_weil_check(args) -> int:
    rows = weil_trace_check(make_ext_field(args.p, args.m), args.k_max, args.threads)
    text = "k,magnitude,bound,ratio\n" + "".join(
        f"{r.k},{fmt_float(r.magnitude)},{fmt_float(r.bound)},{fmt_float(r.ratio)}\n" for r in rows
    )
    _out(args.out, text)
    if any(r.violation for r in rows):
        raise PropertyFailure("trace bound violated")
    return EXIT_OK


def cmd_deligne(args) -> int:
    cfg = ExperimentConfig(p=args.p, m=args.m, source=args.source, boxes=_theta_boxes(args), M=args.M,
                           kernel=args.kernel, N=args.N, seed=args.seed, workers=args.threads)
    _write_report(run_effective_deligne(cfg), args.out, args.plot_data)
    return EXIT_OK


def cmd_joint(args) -> int:
    cfg = ExperimentConfig(p=args.p, m=1, source="joint", boxes=_theta_boxes(args, joint=True), M=args.M,
                           kernel=args.kernel, seed=args.seed, workers=args.threads)
    _write_report(run_joint(cfg), args.out, args.plot_data)
    return EXIT_OK


def cmd_scn(args) -> int:
    rs = build_root_system(args.type)
    Ms = args.m_list
    vals = [scn_sum(rs, M, args.r, args.norm) for M in Ms]
    lines = "".join(f"{M} {fmt_float(v)}\n" for M, v in zip(Ms, vals))
    if len(Ms) >= 2:
        slope = loglog_slope(Ms, vals)
        lines += f"# slope {fmt_float(slope)}\n"
        if len(Ms) >= 3 and args.r != 0:
            lines += f"# log exponent {fmt_float(log_exponent_fit(Ms, vals, args.r))}\n"
    _out(args.out, lines)
    return EXIT_OK


def cmd_report(args) -> int:
    rep = report_from_dict(json.loads(Path(args.input).read_text()))
    _out(args.out, rep.to_csv())
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _common(sub):
    sub.add_argument("--config", help="key = value file; flags override it")
    sub.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker cap")
    sub.add_argument("--seed", type=int, default=0, help="seed for random boxes and samples")
    sub.add_argument("--out", help="output path (stdout when absent)")


def _experiment(sub, joint=False):
    sub.add_argument("--p", type=int, required=True, help="field characteristic")
    if not joint:
        sub.add_argument("--m", type=int, default=1, help="extension degree")
        sub.add_argument("--source", choices=["kloosterman", "synthetic", "clustered"], default="kloosterman")
        sub.add_argument("--N", type=int, default=10_000, help="sample count for synthetic sources")
    sub.add_argument("--boxes", type=int, default=0, help="number of seeded random boxes (0: default partition)")
    sub.add_argument("--box", type=_box, action="append", help="explicit angle box lo,hi[;lo,hi] (repeatable)")
    sub.add_argument("--M", type=int, help="override the optimal truncation degree")
    sub.add_argument("--kernel", choices=[m.value for m in KernelMode], default=KernelMode.PRODUCT_JACKSON.value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frobscope", description="Equidistribution of Frobenius angles with explicit certificates.")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = subs.add_parser("gen-angles", help="Kloosterman or Airy angle sweep as CSV")
    _common(s)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--kind", choices=[k.value for k in SumKind], default=SumKind.KLOOSTERMAN.value)
    s.add_argument("--method", choices=["fft", "direct"], default="fft")
    s.set_defaults(func=cmd_gen_angles)

    s = subs.add_parser("verify-majorant", help="build B+- for a torus box and check majorization")
    _common(s)
    s.add_argument("--box", type=_box, required=True, help="torus box lo,hi[;lo,hi]")
    s.add_argument("--M", type=int, default=16)
    s.add_argument("--kernel", choices=[m.value for m in KernelMode], default=KernelMode.PRODUCT_JACKSON.value)
    s.add_argument("--grid", type=int, default=10_000)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--type", help="also symmetrize over this root system")
    s.set_defaults(func=cmd_verify_majorant)

    s = subs.add_parser("verify-et", help="check the discrepancy certificate on one sample source")
    _common(s)
    _experiment(s)
    s.set_defaults(func=cmd_verify_et)

    s = subs.add_parser("char-orthonormality", help="Gram matrix of Weyl characters by torus quadrature")
    _common(s)
    s.add_argument("--type", required=True)
    s.add_argument("--max-norm", type=float, default=2)
    s.add_argument("--points", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-3)
    s.set_defaults(func=cmd_char_orthonormality)

    s = subs.add_parser("weil-check", help="trace sums of Chebyshev characters against (k+1) q^{m/2}")
    _common(s)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k-max", type=int, default=30)
    s.set_defaults(func=cmd_weil_check)

    s = subs.add_parser("deligne", help="single-family equidistribution experiment")
    _common(s)
    _experiment(s)
    s.add_argument("--plot-data", help="two-column measure/deviation file")
    s.set_defaults(func=cmd_deligne)

    s = subs.add_parser("joint", help="joint Kloosterman x Airy experiment")
    _common(s)
    _experiment(s, joint=True)
    s.add_argument("--plot-data", help="two-column measure/deviation file")
    s.set_defaults(func=cmd_joint)

    s = subs.add_parser("scn", help="lattice sums sum c(lambda) ||lambda||^r")
    _common(s)
    s.add_argument("--type", required=True)
    s.add_argument("--r", type=float, default=0.0)
    s.add_argument("--m-list", type=_int_list, default=[64, 128, 256, 512])
    s.add_argument("--norm", choices=["sup", "l1", "l2"], default="sup")
    s.set_defaults(func=cmd_scn)

    s = subs.add_parser("report", help="rebuild the CSV table from a JSON report")
    _common(s)
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_report)
    return parser


def _subparser(parser, name):
    for act in parser._actions:
        if isinstance(act, argparse._SubParsersAction):
            return act.choices.get(name)
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cfg = _config_path(argv)
        if cfg and argv and _subparser(parser, argv[0]) is not None:
            _apply_config(_subparser(parser, argv[0]), read_config(cfg))
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be positive")
        return args.func(args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except (CertificateViolation, PropertyFailure) as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (FrobscopeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
