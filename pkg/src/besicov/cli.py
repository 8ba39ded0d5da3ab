"""Command-line front end.

Every subcommand takes --out {csv|json} and --config PATH (a JSON file whose
keys are flag names; explicit flags win).  Rationals are printed as
"numerator/denominator" strings, big integers as decimal strings; outputs are
byte-identical for identical configurations.  Exit codes: 0 success, 1 usage
error, 2 certificate failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import mp

from . import dimension as dim_mod
from . import dynamics as dyn_mod
from .audit import audit as run_audit
from .audit import window as window_of
from .cf import IrrationalSpec, convergent, gap_bounds_check
from .cocycle import CocycleSpec, eval_level, make_cocycle, phi, phi_m, birkhoff, term
from .errors import BesicovError, ValidationFailure
from .levels import Profile, profile_to_dict, select_levels, validate_levels
from .targets import (
    FAMILY_CODES,
    canonical_family,
    family_kind,
    interval,
    interval_rows,
    sample_point,
)

USAGE_ERROR = 1
CERT_FAILURE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; the contract is 1
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_alpha(text: str) -> IrrationalSpec:
    """--alpha accepts golden | sqrt2m1 | quotients=a1,a2,... | periodic=head;tail."""
    if text in ("golden", "sqrt2m1"):
        return IrrationalSpec.from_preset(text)
    if text.startswith("quotients="):
        tail = tuple(int(v) for v in text[len("quotients="):].split(",") if v)
        return IrrationalSpec(head=(0,), tail=tail)
    if text.startswith("periodic="):
        body = text[len("periodic="):]
        head_s, _, tail_s = body.partition(";")
        head = (0,) + tuple(int(v) for v in head_s.split(",") if v)
        tail = tuple(int(v) for v in tail_s.split(",") if v)
        return IrrationalSpec(head=head, tail=tail)
    raise ValueError(f"cannot parse --alpha {text!r}")


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


@dataclass
class RunConfig:
    """Everything a subcommand needs, merged from defaults, --config, flags."""

    alpha: str = "golden"
    strategy: str = "greedy"
    variant: str = "main"
    n: int = 4
    depth: Optional[int] = None
    alpha_depth: Optional[int] = None
    trunc: Optional[int] = None
    precision_bits: int = 128
    m: Optional[int] = None
    m_range: Optional[str] = None
    family: str = "pp"
    x: Optional[str] = None
    grid: int = 1000
    horizon: int = 1000
    eps: str = "1/10"
    delta: str = "1/1000"
    seed: int = 0
    out: str = "csv"
    upto: int = 10
    mode: str = "formula"
    policy: str = "center"
    j: Optional[int] = None
    t0: str = "0"
    steps: int = 100
    store_every: int = 1
    kind: str = "sensitivity"
    height: str = "3"
    samples: int = 8
    extra: dict = field(default_factory=dict)

    def spec(self) -> IrrationalSpec:
        return parse_alpha(self.alpha)

    def profile(self, n: Optional[int] = None) -> Profile:
        return select_levels(self.spec(), self.strategy, self.variant, n or self.n)

    def cocycle(self) -> CocycleSpec:
        return make_cocycle(
            self.spec(),
            self.strategy,
            self.variant,
            self.n,
            n_levels=self.trunc,
            alpha_depth=self.alpha_depth,
        )

    def m_values(self) -> list[int]:
        if self.m_range:
            lo_s, _, hi_s = self.m_range.partition(":")
            lo, hi = int(lo_s), int(hi_s)
            return list(range(lo, hi + 1))
        if self.m is None:
            raise ValueError("provide --m or --m-range lo:hi")
        return [self.m]


def _emit_csv(rows: list[dict], stream) -> None:
    if not rows:
        stream.write("\n")
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _emit(cfg: RunConfig, rows: list[dict], payload: dict, stream) -> None:
    if cfg.out == "json":
        json.dump(payload, stream, indent=2, sort_keys=True)
        stream.write("\n")
    else:
        _emit_csv(rows, stream)


# ---------------------------------------------------------------- subcommands


def cmd_cf(cfg: RunConfig, stream) -> int:
    spec = cfg.spec()
    rows = []
    for n in range(cfg.upto + 1):
        c = convergent(spec, n)
        row = {"n": n, "p": str(c.p), "q": str(c.q), "side": "below" if c.sign > 0 else "above"}
        if cfg.extra.get("check"):
            row["gap_ok"] = gap_bounds_check(spec, n).passed if n >= 1 else ""
        rows.append(row)
    _emit(cfg, rows, {"convergents": rows}, stream)
    if cfg.extra.get("check") and any(r["gap_ok"] is False for r in rows):
        return CERT_FAILURE
    return 0


def cmd_levels(cfg: RunConfig, stream) -> int:
    profile = cfg.profile()
    report = validate_levels(profile)
    rows = [
        {
            "n": lv.n,
            "k": lv.k,
            "p": str(lv.p),
            "q": str(lv.q),
            "q_next": str(lv.q_next),
            "A": str(lv.a),
        }
        for lv in profile.levels
    ]
    payload = {"profile": profile_to_dict(profile), "validation": report.as_dict()}
    _emit(cfg, rows, payload, stream)
    if not report.passed:
        print(f"validation failed: {report.first_failure()}", file=sys.stderr)
        return CERT_FAILURE
    return 0


def cmd_eval(cfg: RunConfig, stream) -> int:
    if cfg.x is None:
        raise ValueError("--x is required")
    cspec = cfg.cocycle()
    x = parse_rational(cfg.x) % 1
    rows = []
    for lv in cspec.levels:
        value = eval_level(lv, cspec.variant, x)
        t = term(lv, cspec.variant, x, cspec.alpha_hat)
        rows.append({"l": lv.n, "f_l": str(value), "term": str(t)})
    total = phi(cspec, x)
    payload = {
        "x": str(x),
        "levels": rows,
        "phi": str(total),
        "tail_bound": str(cspec.tail_bound),
        "alpha_depth": cspec.alpha_depth,
    }
    rows.append({"l": "phi", "f_l": "", "term": str(total)})
    _emit(cfg, rows, payload, stream)
    return 0


def cmd_sum(cfg: RunConfig, stream) -> int:
    if cfg.x is None:
        raise ValueError("--x is required")
    cspec = cfg.cocycle()
    x = parse_rational(cfg.x) % 1
    rows = []
    ok = True
    for m in cfg.m_values():
        a = phi_m(cspec, x, m)
        b = birkhoff(cspec, x, m)
        ok = ok and a == b
        rows.append({"m": m, "phi_m": str(a), "birkhoff": str(b), "equal": a == b})
    _emit(cfg, rows, {"x": str(x), "sums": rows}, stream)
    return 0 if ok else CERT_FAILURE


def cmd_target(cfg: RunConfig, stream) -> int:
    profile = cfg.profile()
    fam = canonical_family(cfg.family)
    if cfg.depth is not None:
        x, path = sample_point(profile, fam, cfg.policy, cfg.depth)
        payload = {
            "family": fam,
            "x": str(x),
            "indices": list(path.indices),
            "reductions": [str(r) for r in path.reductions],
        }
        rows = [{"family": fam, "depth": path.depth, "x": str(x),
                 "indices": " ".join(map(str, path.indices))}]
        _emit(cfg, rows, payload, stream)
        return 0
    n = cfg.extra.get("level") or 1
    if cfg.j is not None:
        iv = interval(profile, fam, n, cfg.j)
        rows = [{
            "n": n, "j": cfg.j, "family": fam,
            "a_num": str(iv.a.numerator), "a_den": str(iv.a.denominator),
            "b_num": str(iv.b.numerator), "b_den": str(iv.b.denominator),
        }]
    else:
        lv = profile.level(n)
        if lv.cell_count > cfg.extra.get("max_rows", 100000):
            raise ValueError(
                f"level {n} has {lv.cell_count} intervals; pass --j or raise --max-rows"
            )
        rows = list(interval_rows(profile, fam, n))
    _emit(cfg, rows, {"intervals": rows}, stream)
    return 0


def cmd_audit(cfg: RunConfig, stream) -> int:
    cspec = cfg.cocycle()
    fam = canonical_family(cfg.family)
    kind = family_kind(fam)
    ms = [m for m in cfg.m_values() if m != 0]
    if not ms:
        raise ValueError("no nonzero m requested")
    n_needed = max(
        window_of(cspec.profile, kind, m, n_limit=cspec.n_levels).n for m in ms
    )
    depth = cfg.depth or min(cspec.n_levels, n_needed + (3 if kind == "mixed" else 2))
    _, path = sample_point(cspec.profile, fam, cfg.policy, depth)
    reports = [run_audit(cspec, path, m) for m in ms]
    rows = [r for rep in reports for r in rep.csv_rows()]
    payload = {"reports": [rep.as_dict() for rep in reports]}
    _emit(cfg, rows, payload, stream)
    if any(rep.status == "fail" for rep in reports):
        return CERT_FAILURE
    return 0


def cmd_dimension(cfg: RunConfig, stream) -> int:
    profile = cfg.profile()
    fam = canonical_family(cfg.family)
    stats = dim_mod.nesting_stats(profile, mode=cfg.mode, family=fam)
    bounds = dim_mod.falconer_bounds(stats)
    rows = dim_mod.nesting_rows_csv(stats, bounds)
    payload: dict = {
        "mode": cfg.mode,
        "rows": rows,
        "product_set_dimension": None,
    }
    finite = [b for b in bounds.rows if b.lower is not None]
    if finite:
        best = finite[-1]
        payload["product_set_dimension"] = f"{1 + float(best.lower.mid):.12g}"
    if cfg.extra.get("box"):
        res = dim_mod.box_count(profile, fam, cfg.extra.get("box_level", 1), cfg.grid)
        payload["box"] = {
            "counts": [[g, c] for g, c in res.counts],
            "slope": f"{res.slope:.12g}",
        }
    _emit(cfg, rows, payload, stream)
    return 0


def cmd_orbit(cfg: RunConfig, stream) -> int:
    if cfg.x is None:
        raise ValueError("--x is required")
    cspec = cfg.cocycle()
    x = parse_rational(cfg.x)
    marks = range(0, cfg.steps + 1, cfg.store_every)
    rec = dyn_mod.orbit(
        cspec,
        x,
        parse_rational(cfg.t0),
        steps=cfg.steps,
        precision_bits=cfg.precision_bits,
        store_every=cfg.store_every,
        checkpoints=marks,
    )
    dps = int(cfg.precision_bits * 0.302) + 2
    with mp.workprec(cfg.precision_bits):
        rows = [
            {
                "step": i,
                "x": mp.nstr(dyn_mod._frac_to_mpf((x + i * cspec.alpha_hat) % 1), dps),
                "t": rec.checkpoints[i],
            }
            for i in marks
        ]
    payload = {
        "steps": rec.steps,
        "precision_bits": rec.precision_bits,
        "error_bound": f"{rec.error_bound_float():.6g}",
        "points": rows,
    }
    _emit(cfg, rows, payload, stream)
    return 0


def cmd_probe(cfg: RunConfig, stream) -> int:
    cspec = cfg.cocycle()
    x = parse_rational(cfg.x) if cfg.x else Fraction(1, 4)
    if cfg.kind == "sensitivity":
        res = dyn_mod.sensitivity_probe(
            cspec,
            x,
            parse_rational(cfg.delta),
            parse_rational(cfg.eps),
            cfg.horizon,
            samples=cfg.samples,
            seed=cfg.seed,
            precision_bits=cfg.precision_bits,
        )
    elif cfg.kind == "nonrecurrence":
        res = dyn_mod.nonrecurrence_test(
            cspec,
            x,
            parse_rational(cfg.t0),
            parse_rational(cfg.eps),
            cfg.horizon,
            precision_bits=cfg.precision_bits,
        )
    elif cfg.kind == "coverage":
        rec = dyn_mod.orbit(
            cspec, x, parse_rational(cfg.t0), steps=cfg.horizon,
            precision_bits=cfg.precision_bits,
        )
        frac = dyn_mod.coverage(rec, float(parse_rational(cfg.height)), cfg.grid)
        res = dyn_mod.ProbeResult(
            kind="coverage",
            params={"horizon": cfg.horizon, "grid": cfg.grid, "height": cfg.height,
                    "x": str(x % 1)},
            outcome=f"{frac:.6f}",
            error_bound=rec.error_bound_float(),
        )
    elif cfg.kind == "classify":
        label = dyn_mod.classify_orbit(cspec, x, cfg.horizon, precision_bits=cfg.precision_bits)
        res = dyn_mod.ProbeResult(
            kind="classification",
            params={"horizon": cfg.horizon, "x": str(x % 1)},
            outcome=label,
        )
    else:
        raise ValueError(f"unknown probe kind {cfg.kind!r}")
    json.dump(res.as_dict(), stream, indent=2, sort_keys=True)
    stream.write("\n")
    return 0


COMMANDS = {
    "cf": cmd_cf,
    "levels": cmd_levels,
    "eval": cmd_eval,
    "sum": cmd_sum,
    "target": cmd_target,
    "audit": cmd_audit,
    "dimension": cmd_dimension,
    "orbit": cmd_orbit,
    "probe": cmd_probe,
}


def build_parser() -> _Parser:
    p = _Parser(prog="besicov", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--alpha", default=None)
        sp.add_argument("--strategy", choices=("fixed", "greedy"), default=None)
        sp.add_argument("--variant", choices=("main", "tent"), default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--alpha-depth", type=int, default=None, dest="alpha_depth")
        sp.add_argument("--trunc", type=int, default=None)
        sp.add_argument("--precision-bits", type=int, default=None, dest="precision_bits")
        sp.add_argument("--family", choices=tuple(FAMILY_CODES), default=None)
        sp.add_argument("--x", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", choices=("csv", "json"), default=None)
        sp.add_argument("--config", default=None)

    sp = sub.add_parser("cf", help="convergent table")
    common(sp)
    sp.add_argument("--upto", type=int, default=None)
    sp.add_argument("--check", action="store_true")

    sp = sub.add_parser("levels", help="level profile and validation certificates")
    common(sp)

    sp = sub.add_parser("eval", help="cocycle values at a point")
    common(sp)

    sp = sub.add_parser("sum", help="phi_m / birkhoff cross-check")
    common(sp)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--m-range", default=None, dest="m_range")

    sp = sub.add_parser("target", help="interval tables and certified samples")
    common(sp)
    sp.add_argument("--level", type=int, default=None)
    sp.add_argument("--j", type=int, default=None)
    sp.add_argument("--policy", choices=("center", "leftmost"), default=None)
    sp.add_argument("--max-rows", type=int, default=None, dest="max_rows")

    sp = sub.add_parser("audit", help="divergence reports")
    common(sp)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--m-range", default=None, dest="m_range")
    sp.add_argument("--policy", choices=("center", "leftmost"), default=None)

    sp = sub.add_parser("dimension", help="nesting stats and dimension bounds")
    common(sp)
    sp.add_argument("--mode", choices=("formula", "measured"), default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--box", action="store_true")
    sp.add_argument("--box-level", type=int, default=None, dest="box_level")

    sp = sub.add_parser("orbit", help="simulate the cylinder map")
    common(sp)
    sp.add_argument("--t0", default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--store-every", type=int, default=None, dest="store_every")

    sp = sub.add_parser("probe", help="chaos diagnostics")
    common(sp)
    sp.add_argument("--kind", choices=("sensitivity", "nonrecurrence", "coverage", "classify"),
                    default=None)
    sp.add_argument("--eps", default=None)
    sp.add_argument("--delta", default=None)
    sp.add_argument("--horizon", type=int, default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--height", default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--t0", default=None)
    return p


_EXTRA_KEYS = ("check", "level", "max_rows", "box", "box_level")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    file_vals: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_vals = json.load(fh)
    for key, value in file_vals.items():
        if key in _EXTRA_KEYS:
            cfg.extra[key] = value
        elif hasattr(cfg, key):
            setattr(cfg, key, value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None or value is False:
            continue
        if key in _EXTRA_KEYS:
            cfg.extra[key] = value
        elif hasattr(cfg, key):
            setattr(cfg, key, value)
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        out = io.StringIO()
        code = COMMANDS[args.command](cfg, out)
        sys.stdout.write(out.getvalue())
        return code
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except ValidationFailure as e:
        print(f"certificate failure: {e}", file=sys.stderr)
        return CERT_FAILURE
    except (BesicovError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
