"""Scenario configuration files.

Flat ``key = value`` lines under ``[scenario]``, ``[verification]`` and
``[output]`` headers.  Expressions may be quoted.  ``load`` normalises every
value (expressions are re-printed canonically, numbers as floats), and
``emit`` writes the normalised form so that ``parse(emit(c)) == c``.

Two ways to describe a scenario:

* ``builtin = <name>`` plus optional overrides (``n``, ``exponent``,
  ``sigma``, ``beta``, ``alpha``, ...), or
* a custom definition: ``domain`` with its bounds, ``exponent``, either a
  radial ``profile`` (optionally ``profile_dv``, ``profile_d2v``) or a
  general ``u``, ``sigma``, ``beta`` and ``phi_mode``/``phi``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import fieldexpr as fe
from . import geometry, testfn
from .exponent import ExponentField
from .fields import RadialProfile, ScalarField
from .plaplace import plaplacian_general
from .scenario import CATALOG, Scenario, builtin, radial_scenario

__all__ = ["ConfigError", "Config", "parse", "load", "emit", "build_scenario", "SCHEMA"]

SECTIONS = ("scenario", "verification", "output")
DOMAINS = ("interval", "box", "orthant_box", "annulus")
PHI_MODES = ("from_radial_pde", "expression", "printed")

# key -> value kind
SCHEMA = {
    "scenario": {
        "builtin": "name", "n": "int", "domain": "name", "lo": "floats", "hi": "floats",
        "r_in": "float", "r_out": "float", "side": "float",
        "exponent": "expr", "profile": "expr", "profile_dv": "expr", "profile_d2v": "expr",
        "u": "expr", "sigma": "expr", "beta": "float", "phi_mode": "name", "phi": "expr",
        "alpha": "float", "C_L": "float", "C_e": "float", "M": "float",
        "as_printed": "bool", "family_tag": "name", "measures": "name",
    },
    "verification": {
        "family": "name", "count": "int", "seed": "int", "resolution": "int",
        "refinement": "int", "power": "int", "budget": "int", "samples": "int",
    },
    "output": {"csv": "path", "plot": "path"},
}

VERIFICATION_DEFAULTS = {"family": "auto", "count": 20, "seed": 0, "resolution": 4,
                         "refinement": 3, "power": 3, "budget": 200, "samples": 33}


class ConfigError(ValueError):
    """Malformed configuration; the message names the line and key."""


@dataclass(frozen=True)
class Config:
    scenario: dict
    verification: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    source: str = field(default="", compare=False)

    def setting(self, key):
        return self.verification.get(key, VERIFICATION_DEFAULTS[key])


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.fullmatch(r"\[(.+)\]", s)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


def _unquote(raw: str) -> str:
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    return raw


def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError("not finite")
    return x


def _normalise(kind: str, raw: str):
    v = _unquote(raw)
    if kind == "int":
        return int(v)
    if kind == "float":
        return _finite(float(v))
    if kind == "floats":
        return tuple(_finite(float(t)) for t in v.split(","))
    if kind == "bool":
        low = v.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError("expected true or false")
    if kind == "expr":
        return fe.to_string(fe.parse(v))
    if kind == "name":
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ValueError("expected a bare name")
        return v
    return v  # path


def parse(text: str, source: str = "<string>") -> Config:
    """Parse and normalise configuration text."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(_parser_message(exc, source)) from None
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"{source}, line {_line_of_section(text, sec)}: "
                              f"unknown section [{sec}]")
    if not cp.has_section("scenario"):
        raise ConfigError(f"{source}: missing [scenario] section")
    out = {}
    for sec in SECTIONS:
        values = {}
        if cp.has_section(sec):
            for key, raw in cp.items(sec):
                where = f"{source}, line {_line_of(text, sec, key)}, key '{sec}.{key}'"
                kind = SCHEMA[sec].get(key)
                if kind is None:
                    raise ConfigError(f"{where}: unknown key")
                try:
                    values[key] = _normalise(kind, raw)
                except (ValueError, fe.ExprError) as exc:
                    raise ConfigError(f"{where}: {exc}") from None
        out[sec] = values
    cfg = Config(out["scenario"], out["verification"], out["output"], source)
    _check(cfg, text)
    return cfg


def _parser_message(exc: configparser.Error, source: str) -> str:
    if isinstance(exc, configparser.MissingSectionHeaderError):
        return f"{source}, line {exc.lineno}: expected a [section] header"
    if isinstance(exc, configparser.DuplicateOptionError):
        return (f"{source}, line {exc.lineno}, key '{exc.section}.{exc.option}': "
                "duplicate key")
    if isinstance(exc, configparser.DuplicateSectionError):
        return f"{source}, line {exc.lineno}: duplicate section [{exc.section}]"
    if isinstance(exc, configparser.ParsingError) and exc.errors:
        lineno, line = exc.errors[0]
        return f"{source}, line {lineno}: cannot parse {line.strip()}"
    return f"{source}: {exc.message if hasattr(exc, 'message') else exc}"


def _line_of_section(text, sec):
    for i, line in enumerate(text.splitlines(), 1):
        if line.strip() == f"[{sec}]":
            return i
    return None


def _check(cfg: Config, text: str) -> None:
    sc = cfg.scenario

    def fail(key, msg):
        line = _line_of(text, "scenario", key)
        raise ConfigError(f"{cfg.source}, line {line}, key 'scenario.{key}': {msg}")

    if "beta" in sc and sc["beta"] <= 0:
        fail("beta", "beta must be positive")
    if "builtin" in sc:
        if sc["builtin"] not in CATALOG:
            fail("builtin", f"unknown built-in scenario; known: {sorted(CATALOG)}")
    else:
        for key in ("domain", "exponent", "sigma", "beta"):
            if key not in sc:
                raise ConfigError(f"{cfg.source}: custom scenario needs 'scenario.{key}'")
        if sc["domain"] not in DOMAINS:
            fail("domain", f"expected one of {DOMAINS}")
        if ("profile" in sc) == ("u" in sc):
            raise ConfigError(f"{cfg.source}: give exactly one of 'scenario.profile' "
                              "and 'scenario.u'")
    if "phi_mode" in sc and sc["phi_mode"] not in PHI_MODES:
        fail("phi_mode", f"expected one of {PHI_MODES}")
    if "measures" in sc and sc["measures"] not in ("theorem", "family"):
        fail("measures", "expected theorem or family")
    fam = cfg.verification.get("family")
    if fam is not None and fam != "auto" and fam not in testfn.FAMILIES:
        line = _line_of(text, "verification", "family")
        raise ConfigError(f"{cfg.source}, line {line}, key 'verification.family': "
                          f"expected auto or one of {testfn.FAMILIES}")


def load(path) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse(text, str(path))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    return str(value)


def emit(cfg: Config) -> str:
    """Normalised text; expressions are quoted, keys follow the schema order."""
    lines = []
    for sec in SECTIONS:
        values = getattr(cfg, sec)
        if not values and sec != "scenario":
            continue
        if lines:
            lines.append("")
        lines.append(f"[{sec}]")
        for key, kind in SCHEMA[sec].items():
            if key in values:
                v = values[key]
                text = f'"{v}"' if kind == "expr" else _fmt(v)
                lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


# -- scenario construction ---------------------------------------------------

_BUILTIN_KEYS = {"n": "n", "exponent": "p", "sigma": "sigma", "beta": "beta",
                 "alpha": "alpha", "C_L": "C_L", "C_e": "C_e", "M": "M",
                 "as_printed": "as_printed", "side": "side", "r_in": "r_in",
                 "r_out": "r_out"}


def _domain(sc: dict, n: int):
    kind = sc["domain"]
    if kind == "annulus":
        return geometry.Annulus(n, sc["r_in"], sc["r_out"])
    lo, hi = list(sc["lo"]), list(sc["hi"])
    if len(lo) == 1 and n > 1:
        lo, hi = lo * n, hi * n
    if kind == "interval":
        return geometry.interval(lo[0], hi[0])
    return geometry.box(lo, hi) if kind == "box" else geometry.orthant_box(lo, hi)


def _dim(sc: dict) -> int:
    if "n" in sc:
        return sc["n"]
    if sc.get("domain") == "interval":
        return 1
    if "lo" in sc:
        return len(sc["lo"])
    raise ConfigError("cannot infer the dimension: set 'scenario.n'")


def build_scenario(cfg: Config) -> Scenario:
    """Materialise the scenario a configuration describes."""
    sc = cfg.scenario
    try:
        if "builtin" in sc:
            return _build_builtin(sc)
        return _build_custom(sc)
    except (fe.ExprError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{cfg.source}: {exc}") from None


def _build_builtin(sc: dict) -> Scenario:
    params = {_BUILTIN_KEYS[k]: v for k, v in sc.items() if k in _BUILTIN_KEYS}
    if "domain" in sc:
        params["domain"] = _domain(sc, _dim(sc))
    elif sc["builtin"] in ("power_linear", "piecewise_1d") and "lo" in sc:
        params["a"], params["b"] = sc["lo"][0], sc["hi"][0]
    if sc.get("phi_mode") == "printed":
        params["phi_mode"] = "printed"
    s = builtin(sc["builtin"], **params)
    return _apply_common(s, sc)


def _apply_common(s: Scenario, sc: dict) -> Scenario:
    from dataclasses import replace
    changes = {}
    if sc.get("phi_mode") == "expression":
        changes["phi"] = ScalarField.from_expr(sc["phi"])
    if "measures" in sc:
        changes["measure_mode"] = sc["measures"]
    if "family_tag" in sc:
        changes["family_tag"] = sc["family_tag"]
    return replace(s, **changes) if changes else s


def _build_custom(sc: dict) -> Scenario:
    n = _dim(sc)
    domain = _domain(sc, n)
    for key in ("exponent", "sigma", "u", "phi", "profile"):
        if key in sc and fe.max_var_index(fe.parse(sc[key])) > n:
            raise ConfigError(f"'scenario.{key}' uses a coordinate beyond x{n}")
    exponent = ExponentField.coerce(sc["exponent"])
    mode = sc.get("phi_mode", "from_radial_pde")
    tag = sc.get("family_tag", "custom")
    if mode == "expression" and "phi" not in sc:
        raise ConfigError("phi_mode = expression needs 'scenario.phi'")
    if mode == "printed":
        raise ConfigError("phi_mode = printed is only defined for built-in scenarios")
    if "profile" in sc:
        profile = RadialProfile.from_expr(sc["profile"], sc.get("profile_dv"),
                                          sc.get("profile_d2v"))
        phi = sc["phi"] if mode == "expression" else None
        s = radial_scenario(domain, exponent, profile, sc["sigma"], sc["beta"], tag, phi=phi)
    else:
        u = ScalarField.from_expr(sc["u"])
        if mode == "expression":
            phi = ScalarField.from_expr(sc["phi"])
        else:
            # no radial closed form: difference the flux
            phi = ScalarField(lambda X: -plaplacian_general(u, exponent, X),
                              label="-Delta_p u (finite difference)")
        s = Scenario(domain, exponent, u, phi, ScalarField.coerce(sc["sigma"]),
                     sc["beta"], tag)
    # phi is already in place
    return _apply_common(s, {k: v for k, v in sc.items() if k != "phi_mode"})
