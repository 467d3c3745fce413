"""Command-line front end: ``juliadir <subcommand> [--config PATH] [--out DIR] ...``.

Exit status: 0 success, 2 some verification report failed, 1 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from .config import (
    DEFAULTS,
    ConfigError,
    RunConfig,
    load_config,
    parse_annuli,
    parse_number,
    parse_range,
    plan_from_kv,
    plan_to_kv,
    read_kv,
    write_kv,
)
from .construction import (
    build_m_sequence,
    choose_coefficients,
    count_growth_ties,
    gap_start_index,
    partition_interval,
)
from .directions import (
    estimate_order_entire,
    estimate_order_from_poles,
    estimate_TD,
    lower_bound_measure,
    sample_growth_profile,
    write_direction_set_csv,
)
from .dynamics import estimate_L, render_fate_grid, set_threads, track_real_orbit_log
from .numerics import Arc
from .verification import (
    check_coefficient_constraints,
    check_component_bounds,
    check_lemma5,
    check_pole_invariants,
    component_sweep,
    format_reports,
    write_reports_csv,
)
from .zoo import PoleSeries, is_entire

FUNCTION_KEYS = ["function.variant", "function.lambda", "function.alpha", "function.c_bound", "function.plan",
                 "function.terms", "function.E", "function.rho", "function.K", "function.configuration"]
ESCAPE_KEYS = ["escape.max_iter", "escape.exp_re", "escape.radius", "escape.left_re", "escape.parabolic_re",
               "escape.pole_eps", "escape.tol"]

KEYS = {
    "render": FUNCTION_KEYS + ESCAPE_KEYS + ["render.center", "render.width", "render.height", "render.W", "render.H"],
    "td": FUNCTION_KEYS + ["radii.r0", "radii.multiplier", "radii.count", "bins", "tau"],
    "ld": FUNCTION_KEYS + ESCAPE_KEYS[1:] + ["bins", "ld.annuli", "ld.mode", "ld.radial_samples", "ld.max_iter"],
    "order": FUNCTION_KEYS + ["radii.r0", "radii.multiplier", "radii.count", "order.radii", "bins"],
    "construct": ["construct.directions", "construct.c_bound", "construct.E", "construct.rho", "construct.K",
                  "construct.configuration", "construct.J", "construct.rho_partition"],
    "verify": ["verify.R_grid", "verify.t_fractions", "verify.R", "verify.t", "verify.curve", "verify.R_min",
               "verify.plan", "verify.n_grid", "construct.directions", "construct.c_bound", "construct.E",
               "construct.rho", "construct.K"],
    "measure-bound": ["measure.mu", "measure.delta"],
    "orbit": ["orbit.x0", "orbit.n", "orbit.switch"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _epilog(name: str) -> str:
    lines = ["config keys read (flat key = value file, dotted names; defaults in brackets):"]
    for k in KEYS[name]:
        d = DEFAULTS.get(k)
        lines.append(f"  {k} [{'required' if d is None else d or 'unset'}]")
    return "\n".join(lines)


def _summary(path: Path, what: str) -> None:
    print(f"wrote {path}: {what}")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_report(path: Path, pairs: dict) -> None:
    with open(path, "w") as fh:
        for k, v in pairs.items():
            fh.write(f"{k}={v}\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_render(cfg: RunConfig, out: Path, args) -> int:
    spec = cfg.function_spec()
    W, H = cfg.integer("render.W"), cfg.integer("render.H")
    grid = render_fate_grid(spec, cfg.cplx("render.center"), cfg.num("render.width"), cfg.num("render.height"),
                            W, H, cfg.integer("escape.max_iter"), cfg.escape())
    grid.to_ppm(out / "render.ppm")
    _summary(out / "render.ppm", f"{W}x{H} fate image")
    grid.to_csv(out / "render.csv")
    counts = ", ".join(f"{k}={v}" for k, v in grid.counts().items())
    _summary(out / "render.csv", counts)
    return 0


def cmd_td(cfg: RunConfig, out: Path, args) -> int:
    spec = cfg.function_spec()
    prof = sample_growth_profile(spec, cfg.radii(), cfg.integer("bins"))
    ds = estimate_TD(prof, cfg.num("tau"))
    write_direction_set_csv(ds, out / "td.csv")
    _summary(out / "td.csv", f"{len(ds.arcs)} arcs, measure {ds.measure:.8f}")
    if args.profile:
        prof.to_csv(out / "td_profile.csv")
        _summary(out / "td_profile.csv", f"{prof.bins} bins x {len(prof.radii)} radii")
    return 0


def cmd_ld(cfg: RunConfig, out: Path, args) -> int:
    spec = cfg.function_spec()
    annuli = parse_annuli(cfg.raw("ld.annuli"))
    mode = cfg.text("ld.mode")
    ds = estimate_L(spec, annuli, cfg.integer("bins"), mode, cfg.integer("ld.radial_samples"),
                    cfg.integer("ld.max_iter"), cfg.escape())
    write_direction_set_csv(ds, out / "ld.csv")
    _summary(out / "ld.csv", f"{len(ds.arcs)} arcs, measure {ds.measure:.8f}")
    return 0


def cmd_order(cfg: RunConfig, out: Path, args) -> int:
    spec = cfg.function_spec()
    radii = parse_range(cfg.raw("order.radii")) if cfg.has("order.radii") else cfg.radii()
    if isinstance(spec, PoleSeries):
        est = estimate_order_from_poles(cfg.pole_config("function"), radii)
    elif is_entire(spec):
        est = estimate_order_entire(spec, radii, cfg.integer("bins"))
    else:
        raise ConfigError("order estimation needs an entire spec or a pole series")
    with open(out / "order.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ln_r", "ln_growth"])
        for x, y in est.samples:
            w.writerow([_fmt(x), _fmt(y)])
    _summary(out / "order.csv", f"{len(est.samples)} samples")
    _write_report(out / "order.report", {"rho": _fmt(est.rho), "method": est.method})
    _summary(out / "order.report", f"rho={est.rho:.6f} ({est.method})")
    return 0


def cmd_construct(cfg: RunConfig, out: Path, args) -> int:
    what = args.what
    if what == "coeffs":
        plan = choose_coefficients(cfg.lst("construct.directions"), cfg.num("construct.c_bound"))
        write_kv(plan_to_kv(plan), out / "coeffs.plan")
        _summary(out / "coeffs.plan", f"{len(plan.directions)} coefficients, R0={plan.r0:.6f}, R'={plan.r_prime:.6f}")
        return 0
    if what == "poles":
        pc = cfg.pole_config("construct")
        with open(out / "poles.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "theta", "log_r", "log_m", "m"])
            for k in range(len(pc)):
                m = pc.m[k]
                w.writerow([k + 1, _fmt(pc.thetas[k]), _fmt(pc.log_r[k]), _fmt(pc.log_m[k]),
                            "" if m is None else str(m)])
        _summary(out / "poles.csv", f"{len(pc)} poles ({pc.label}, rho={pc.rho})")
        pairs = {"k0": gap_start_index(pc)}
        if pc.label == "canonical":
            pairs["m_exact"] = ",".join(str(m) for m in build_m_sequence(min(len(pc), 4)))
        _write_report(out / "poles.report", pairs)
        _summary(out / "poles.report", f"k0={pairs['k0']}")
        return 0
    # partition
    bits = cfg.raw("construct.J").split(":")
    if len(bits) != 2:
        raise ConfigError("construct.J must look like lo:hi")
    J = Arc(parse_number(bits[0]), parse_number(bits[1]))
    rho = cfg.num("construct.rho_partition")
    dec = partition_interval(J, rho)
    with open(out / "partition.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "lo", "hi", "theta_offset", "ties"])
        for p in dec.pieces:
            ties = count_growth_ties(rho, p.theta_offset) if p.kind == "partial" else 0
            w.writerow([p.kind, _fmt(p.arc.lo), _fmt(p.arc.hi), _fmt(p.theta_offset), ties])
    _summary(out / "partition.csv", f"{len(dec.pieces)} pieces")
    return 0


def cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    suite = args.suite_opt or args.suite
    if suite is None:
        raise UsageError("verify needs a suite: lemma5, components, coeffs or poles")
    extra = {}
    if suite == "lemma5":
        res = check_lemma5(parse_range(cfg.raw("verify.R_grid")), cfg.lst("verify.t_fractions"))
        reports = list(res.reports)
        extra["l0"] = "none" if res.l0 is None else _fmt(res.l0)
        for k, v in res.l0_per.items():
            extra[f"l0.{k}"] = "none" if v is None else _fmt(v)
        ok = res.l0 is not None
    elif suite == "components":
        if cfg.has("verify.R") and cfg.has("verify.t"):
            reports = check_component_bounds(cfg.num("verify.R"), cfg.num("verify.t"), cfg.integer("verify.curve"))
        else:
            reports = component_sweep(parse_range(cfg.raw("verify.R_grid")), cfg.lst("verify.t_fractions"),
                                      cfg.num("verify.R_min"))
        ok = all(r.passed for r in reports)
    elif suite == "coeffs":
        if cfg.has("verify.plan"):
            plan = plan_from_kv(read_kv(cfg.text("verify.plan")))
        else:
            plan = choose_coefficients(cfg.lst("construct.directions"), cfg.num("construct.c_bound"))
        reports = check_coefficient_constraints(plan, cfg.integer("verify.n_grid"))
        ok = all(r.passed for r in reports)
    else:
        pc = cfg.pole_config("construct")
        reports = check_pole_invariants(pc)
        ok = all(r.passed for r in reports)
    path = out / f"{suite}.report"
    with open(path, "w") as fh:
        fh.write(format_reports(reports))
        for k, v in extra.items():
            fh.write(f"{k}={v}\n")
        fh.write(f"passed={str(ok).lower()}\n")
    failed = [r.name for r in reports if not r.passed]
    _summary(path, f"{len(reports)} reports, {len(failed)} failed" + (f" ({', '.join(failed)})" if failed else ""))
    write_reports_csv(reports, out / f"{suite}.csv")
    _summary(out / f"{suite}.csv", f"{len(reports)} rows")
    if "l0" in extra:
        print(f"l0={extra['l0']}")
    return 0 if ok else 2


def cmd_measure(cfg: RunConfig, out: Path | None, args) -> int:
    if not (cfg.has("measure.mu") and cfg.has("measure.delta")):
        raise UsageError("measure-bound needs --mu and --delta")
    v = lower_bound_measure(cfg.num("measure.mu"), cfg.num("measure.delta"))
    print(f"{v:.8f}")
    return 0


def cmd_orbit(cfg: RunConfig, out: Path, args) -> int:
    orb = track_real_orbit_log(cfg.num("orbit.x0"), cfg.integer("orbit.n"), cfg.num("orbit.switch"))
    with open(out / "orbit.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "sign", "log_abs_level", "log_abs_top", "d_level", "d_top"])
        for i, (s, la) in enumerate(zip(orb.signs, orb.log_abs)):
            d = orb.d[i] if i < len(orb.d) else None
            w.writerow([i, s, la.level, _fmt(la.top), "" if d is None else d.level, "" if d is None else _fmt(d.top)])
    _summary(out / "orbit.csv", f"{len(orb.signs)} iterates, log mode from {orb.log_mode_start}")
    inc = orb.increasing_in_log_mode(10)
    _write_report(out / "orbit.report", {"log_mode_start": orb.log_mode_start,
                                         "d_increasing_first_10": str(inc).lower()})
    _summary(out / "orbit.report", f"d_n increasing over 10 log-mode steps: {inc}")
    return 0 if inc else 2


COMMANDS = {
    "render": cmd_render,
    "td": cmd_td,
    "ld": cmd_ld,
    "order": cmd_order,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "measure-bound": cmd_measure,
    "orbit": cmd_orbit,
}

HELP = {
    "render": "classify a window of starting points and write a PPM image and CSV",
    "td": "estimate transcendental directions from a growth profile",
    "ld": "estimate Julia limiting directions from orbit fates on annuli",
    "order": "estimate the order of growth",
    "construct": "build a coefficient plan, pole configuration or interval partition",
    "verify": "run a verification suite and write slack reports",
    "measure-bound": "print the lower bound min(2pi, (4/mu) arcsin sqrt(delta/2))",
    "orbit": "follow the real orbit of the Theorem-4 map toward -infinity",
}

# flag -> config key, per subcommand
OVERRIDES = {
    "render": {"max_iter": "escape.max_iter", "width": "render.width", "height": "render.height",
               "W": "render.W", "H": "render.H", "center": "render.center"},
    "td": {"r0": "radii.r0", "multiplier": "radii.multiplier", "count": "radii.count"},
    "ld": {"annuli": "ld.annuli", "mode": "ld.mode", "max_iter": "ld.max_iter"},
    "order": {"radii": "order.radii"},
    "construct": {"directions": "construct.directions", "rho": "construct.rho", "K": "construct.K"},
    "verify": {"R": "verify.R", "t": "verify.t", "curve": "verify.curve", "plan": "verify.plan"},
    "measure-bound": {"mu": "measure.mu", "delta": "measure.delta"},
    "orbit": {"x0": "orbit.x0", "n": "orbit.n"},
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="juliadir", description="Julia limiting directions and transcendental directions toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, fn in COMMANDS.items():
        s = sub.add_parser(name, help=HELP[name], description=HELP[name], epilog=_epilog(name),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        s.add_argument("--config", help="flat key = value configuration file")
        s.add_argument("--out", default=".", help="output directory (created if missing)")
        s.add_argument("--threads", type=int, default=None,
                       help="worker thread cap (default: $JULIADIR_THREADS, else all cores)")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
        if name in ("td", "ld", "order"):
            s.add_argument("--bins", help="number of angular bins B")
        if name == "td":
            s.add_argument("--tau", help="growth threshold tau")
            s.add_argument("--profile", action="store_true", help="also write the sampled growth profile")
        if name in ("render", "td", "ld", "order"):
            s.add_argument("--variant", help="function.variant")
            s.add_argument("--lambda", dest="lam", help="function.lambda")
            s.add_argument("--alpha", help="function.alpha")
        if name == "construct":
            s.add_argument("what", choices=["coeffs", "poles", "partition"])
        if name == "verify":
            s.add_argument("suite", nargs="?", choices=["lemma5", "components", "coeffs", "poles"])
            s.add_argument("--suite", dest="suite_opt", choices=["lemma5", "components", "coeffs", "poles"])
        for flag in OVERRIDES[name]:
            s.add_argument(f"--{flag}", dest=f"ov_{flag}", help=OVERRIDES[name][flag])
        s.set_defaults(func=fn)
    return p


def _overrides(args) -> dict[str, str]:
    ov = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in DEFAULTS:
            raise UsageError(f"unknown config key {k!r}")
        ov[k] = v.strip()
    for attr, key in (("bins", "bins"), ("tau", "tau"), ("variant", "function.variant"), ("lam", "function.lambda"),
                      ("alpha", "function.alpha")):
        v = getattr(args, attr, None)
        if v is not None:
            ov[key] = v
    for flag, key in OVERRIDES[args.command].items():
        v = getattr(args, f"ov_{flag}", None)
        if v is not None:
            ov[key] = v
    return ov


def _threads(args) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("JULIADIR_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"JULIADIR_THREADS must be an integer, got {env!r}") from exc
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        set_threads(_threads(args))
        cfg = load_config(args.config, _overrides(args))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with np.errstate(all="ignore"):
            return args.func(cfg, out, args)
    except (UsageError, ConfigError, ValueError, TypeError, OSError, KeyError) as exc:
        print(f"juliadir {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
