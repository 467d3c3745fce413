"""Flat key=value run configuration and builders for function specs.

Files hold ``key = value`` lines with dotted keys (``function.variant``,
``radii.multiplier``); ``#`` and ``;`` start comments.  Parsing goes through
configparser with an implicit section.  Angles and lists accept simple
arithmetic with ``pi`` (``2*pi/3``).
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .construction import (
    CoefficientPlan,
    build_pole_configuration,
    mild_pole_configuration,
)
from .dynamics import EscapeParams
from .zoo import (
    E0Model,
    Exponential,
    MittagLeffler,
    PoleSeries,
    Theorem4,
)

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_number", "parse_list", "parse_annuli",
           "write_kv", "read_kv", "plan_to_kv", "plan_from_kv"]

_SECTION = "run"


class ConfigError(ValueError):
    """Malformed configuration or a value outside an operation's preconditions."""


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}
_NAMES = {"pi": math.pi, "inf": math.inf, "e": math.e, "j": 1j}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.operand))
    raise ConfigError("unsupported expression")


def parse_number(text: str, complex_ok: bool = False):
    """A number or arithmetic expression in pi, e, inf (and j when complex_ok)."""
    s = str(text).strip()
    try:
        v = _eval(ast.parse(s, mode="eval"))
    except (SyntaxError, ConfigError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc
    if isinstance(v, complex):
        if not complex_ok:
            if v.imag != 0:
                raise ConfigError(f"expected a real number, got {text!r}")
            return float(v.real)
        return v
    return complex(v) if complex_ok else float(v)


def parse_list(text: str) -> list[float]:
    s = str(text).strip()
    if not s:
        return []
    return [parse_number(p) for p in s.split(",")]


def parse_annuli(text: str) -> list[tuple[float, float]]:
    """``lo:hi, lo:hi`` pairs."""
    out = []
    for part in str(text).split(","):
        if not part.strip():
            continue
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError(f"annulus {part.strip()!r} must look like lo:hi")
        out.append((parse_number(bits[0]), parse_number(bits[1])))
    if not out:
        raise ConfigError("no annuli given")
    return out


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma list."""
    s = str(text).strip()
    if ":" in s:
        bits = [parse_number(b) for b in s.split(":")]
        if len(bits) != 3 or bits[2] <= 0:
            raise ConfigError(f"range {text!r} must be start:stop:step with step > 0")
        n = int(math.floor((bits[1] - bits[0]) / bits[2] + 1e-9)) + 1
        return [bits[0] + i * bits[2] for i in range(max(n, 0))]
    return parse_list(s)


def read_kv(path) -> dict[str, str]:
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
                                   delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return dict(cp[_SECTION])


def write_kv(pairs: dict, path) -> None:
    with open(path, "w") as fh:
        for k, v in pairs.items():
            fh.write(f"{k} = {v}\n")


def plan_to_kv(plan: CoefficientPlan) -> dict[str, str]:
    return {
        "plan.directions": ", ".join(repr(float(t)) for t in plan.directions),
        "plan.coeff_logs": ", ".join(repr(float(a)) for a in plan.coeff_logs),
        "plan.c_bound": repr(plan.c_bound),
        "plan.r0": repr(plan.r0),
        "plan.log_lam0": repr(plan.log_lam0),
        "plan.r_prime": repr(plan.r_prime),
        "plan.lam_log": repr(plan.lam_log),
    }


def plan_from_kv(kv: dict[str, str]) -> CoefficientPlan:
    try:
        return CoefficientPlan(
            directions=tuple(parse_list(kv["plan.directions"])),
            coeff_logs=tuple(parse_list(kv["plan.coeff_logs"])),
            c_bound=parse_number(kv["plan.c_bound"]),
            r0=parse_number(kv["plan.r0"]),
            log_lam0=parse_number(kv["plan.log_lam0"]),
            r_prime=parse_number(kv["plan.r_prime"]),
            lam_log=parse_number(kv["plan.lam_log"]),
        )
    except KeyError as exc:
        raise ConfigError(f"plan file lacks key {exc.args[0]}") from exc


# every key the CLI reads, with its default (None means required when used)
DEFAULTS: dict[str, str | None] = {
    "function.variant": None,
    "function.lambda": "1",
    "function.alpha": "1",
    "function.c_bound": "1",
    "function.plan": "",
    "function.terms": "",
    "function.E": "0, pi",
    "function.rho": "1",
    "function.K": "6",
    "function.configuration": "canonical",
    "radii.r0": "1e6",
    "radii.multiplier": "2",
    "radii.count": "3",
    "bins": "3600",
    "tau": "20",
    "escape.max_iter": "500",
    "escape.exp_re": "50",
    "escape.radius": "1e6",
    "escape.left_re": "-50",
    "escape.parabolic_re": "10",
    "escape.pole_eps": "1e-9",
    "escape.tol": "1e-12",
    "ld.annuli": "20:110, 110:200",
    "ld.mode": "boundary",
    "ld.radial_samples": "4",
    "ld.max_iter": "2000",
    "render.center": "0",
    "render.width": "8",
    "render.height": "8",
    "render.W": "256",
    "render.H": "256",
    "order.radii": "",
    "verify.R_grid": "5:200:5",
    "verify.t_fractions": "0, 0.1, 0.2, 0.3, 0.4, 0.5",
    "verify.R": "",
    "verify.t": "",
    "verify.curve": "1",
    "verify.R_min": "30",
    "verify.plan": "",
    "verify.n_grid": "2000",
    "construct.directions": "0, 2*pi/3, 4*pi/3",
    "construct.c_bound": "1",
    "construct.E": "0, pi",
    "construct.rho": "1",
    "construct.K": "6",
    "construct.configuration": "canonical",
    "construct.J": "0:2*pi",
    "construct.rho_partition": "1",
    "measure.mu": "",
    "measure.delta": "",
    "orbit.x0": "0",
    "orbit.n": "100",
    "orbit.switch": "500",
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def raw(self, key: str) -> str:
        if key in self.values:
            return self.values[key]
        d = DEFAULTS.get(key)
        if d is None:
            raise ConfigError(f"missing required key {key}")
        return d

    def has(self, key: str) -> bool:
        return bool(str(self.values.get(key, DEFAULTS.get(key) or "")).strip())

    def num(self, key: str) -> float:
        return parse_number(self.raw(key))

    def integer(self, key: str) -> int:
        v = self.num(key)
        if v != int(v):
            raise ConfigError(f"{key} must be an integer")
        return int(v)

    def cplx(self, key: str) -> complex:
        return parse_number(self.raw(key), complex_ok=True)

    def lst(self, key: str) -> list[float]:
        return parse_list(self.raw(key))

    def text(self, key: str) -> str:
        return str(self.raw(key)).strip()

    def escape(self) -> EscapeParams:
        return EscapeParams(
            exp_re=self.num("escape.exp_re"),
            radius=self.num("escape.radius"),
            left_re=self.num("escape.left_re"),
            parabolic_re=self.num("escape.parabolic_re"),
            pole_eps=self.num("escape.pole_eps"),
            tol=self.num("escape.tol"),
        )

    def radii(self) -> list[float]:
        r0 = self.num("radii.r0")
        mult = self.num("radii.multiplier")
        count = self.integer("radii.count")
        if not r0 > 0 or not mult > 1 or count < 1:
            raise ConfigError("radii need r0 > 0, multiplier > 1, count >= 1")
        return [r0 * mult ** k for k in range(count)]

    def pole_config(self, prefix: str = "function"):
        E = self.lst(f"{prefix}.E")
        rho = self.num(f"{prefix}.rho")
        K = self.integer(f"{prefix}.K")
        which = self.text(f"{prefix}.configuration")
        if which == "canonical":
            return build_pole_configuration(E, rho, K)
        if which == "mild":
            return mild_pole_configuration(E, rho, K)
        raise ConfigError(f"{prefix}.configuration must be canonical or mild")

    def function_spec(self):
        v = self.text("function.variant").lower()
        if v == "exponential":
            return Exponential(self.cplx("function.lambda"))
        if v in ("mittag_leffler", "mittag-leffler", "ml"):
            a = self.num("function.alpha")
            if not a > 0:
                raise ConfigError("function.alpha must be positive")
            return MittagLeffler(a)
        if v == "theorem4":
            return Theorem4()
        if v == "e0":
            return E0Model(self.num("function.c_bound"))
        if v == "series":
            if not self.has("function.plan"):
                raise ConfigError("series variant needs function.plan (a file written by construct coeffs)")
            plan = plan_from_kv(read_kv(self.text("function.plan")))
            n = self.integer("function.terms") if self.has("function.terms") else None
            return plan.to_series(n)
        if v == "poles":
            cfg = self.pole_config("function").representable()
            lam = self.text("function.lambda")
            return PoleSeries(cfg, parse_number(lam))
        raise ConfigError(f"unknown function.variant {v!r}")


def load_config(path, overrides: dict[str, str] | None = None) -> RunConfig:
    values = read_kv(path) if path else {}
    unknown = [k for k in values if k not in DEFAULTS]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values.update(overrides or {})
    return RunConfig(values)

