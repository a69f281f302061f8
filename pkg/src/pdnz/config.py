"""Line-oriented plain-text PDN config files.

Grammar (one directive per line, keys case-insensitive, '#' comments):

    topology <two|three|three-symmetric>
    branch <name> R=<value> L=<value> C=<value>
    extra <name> R=<value> L=<value> C=<value>
    supply vdd=<value> ripple=<value> current=<value>
    sweep fmin=<value> fmax=<value> points=<n>

Values take SI suffixes f, p, n, u, m, k, meg, g (case-insensitive; "meg"
is mega, "m" alone is milli).  Bare numbers are base units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import TargetSpec
from .errors import ParseError
from .pdn import (PdnSystem, RlcBranch, SymmetricThreeSupplyPdn,
                  ThreeSupplyPdn, TwoSupplyPdn)

_SUFFIXES = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "m": 1e-3,
    "k": 1e3, "meg": 1e6, "g": 1e9,
}

_TOPOLOGY_BRANCHES = {
    "two": ("z1", "z12", "z2"),
    "three": ("z1", "z2", "z3", "z12", "z23", "z31"),
    "three-symmetric": ("z1", "z2", "z3", "z0"),
}


def parse_si(token: str) -> float:
    """Number with optional SI suffix; raises ValueError on bad input."""
    try:
        return float(token)
    except ValueError:
        pass
    low = token.lower()
    if low.endswith("meg"):
        stem, mult = token[:-3], 1e6
    elif low and low[-1] in _SUFFIXES:
        stem, mult = token[:-1], _SUFFIXES[low[-1]]
    else:
        raise ValueError(f"unknown suffix {token.lstrip('0123456789.eE+-') or token!r}"
                         if token else "empty value")
    try:
        return float(stem) * mult
    except ValueError:
        raise ValueError(f"bad number {token!r}") from None


@dataclass(frozen=True)
class PdnConfig:
    topology: str
    branches: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    supply: TargetSpec | None = None
    sweep_fmin: float | None = None
    sweep_fmax: float | None = None
    sweep_points: int | None = None

    def to_system(self) -> PdnSystem:
        b = self.branches
        if self.topology == "two":
            base = TwoSupplyPdn(b["z1"], b["z12"], b["z2"])
        elif self.topology == "three":
            base = ThreeSupplyPdn(b["z1"], b["z2"], b["z3"],
                                  b["z12"], b["z23"], b["z31"])
        else:
            base = SymmetricThreeSupplyPdn(b["z1"], b["z2"], b["z3"], b["z0"])
        return PdnSystem(base, tuple(self.extras.values()))


def _kv_pairs(tokens, expected, line_no):
    got = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(line_no, f"expected key=value, got {tok!r}")
        key, _, value = tok.partition("=")
        key = key.lower()
        if key not in expected:
            raise ParseError(line_no, f"unknown key {key!r}")
        if key in got:
            raise ParseError(line_no, f"duplicate key {key!r}")
        try:
            got[key] = parse_si(value)
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None
    missing = [k for k in expected if k not in got]
    if missing:
        raise ParseError(line_no, f"missing {', '.join(missing)}")
    return got


def parse_config(text: str) -> PdnConfig:
    topology = None
    topology_line = None
    branches: dict = {}
    extras: dict = {}
    supply = None
    sweep_vals = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].lower()
        if key == "topology":
            if topology is not None:
                raise ParseError(line_no, "duplicate topology")
            if len(tokens) != 2 or tokens[1].lower() not in _TOPOLOGY_BRANCHES:
                raise ParseError(line_no,
                                 "topology must be two, three or three-symmetric")
            topology = tokens[1].lower()
            topology_line = line_no
        elif key in ("branch", "extra"):
            if len(tokens) < 2:
                raise ParseError(line_no, f"{key} needs a name")
            name = tokens[1].lower()
            target = branches if key == "branch" else extras
            if name in branches or name in extras:
                raise ParseError(line_no, f"duplicate branch {name!r}")
            vals = _kv_pairs(tokens[2:], ("r", "l", "c"), line_no)
            try:
                target[name] = RlcBranch(vals["r"], vals["l"], vals["c"])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
        elif key == "supply":
            if supply is not None:
                raise ParseError(line_no, "duplicate supply")
            vals = _kv_pairs(tokens[1:], ("vdd", "ripple", "current"), line_no)
            try:
                supply = TargetSpec(vals["vdd"], vals["ripple"], vals["current"])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
        elif key == "sweep":
            if sweep_vals is not None:
                raise ParseError(line_no, "duplicate sweep")
            vals = _kv_pairs(tokens[1:], ("fmin", "fmax", "points"), line_no)
            if vals["points"] != int(vals["points"]) or vals["points"] < 2:
                raise ParseError(line_no, "points must be an integer >= 2")
            sweep_vals = (vals["fmin"], vals["fmax"], int(vals["points"]))
        else:
            raise ParseError(line_no, f"unknown key {key!r}")

    if topology is None:
        raise ParseError(None, "missing topology line")
    required = _TOPOLOGY_BRANCHES[topology]
    missing = [n for n in required if n not in branches]
    if missing:
        raise ParseError(topology_line,
                         f"topology {topology} needs branch {', '.join(missing)}")
    unexpected = [n for n in branches if n not in required]
    if unexpected:
        raise ParseError(topology_line,
                         f"branch {', '.join(unexpected)} not part of topology {topology}")
    ordered = {n: branches[n] for n in required}
    cfg = PdnConfig(topology, ordered, extras, supply)
    if sweep_vals is not None:
        cfg = PdnConfig(topology, ordered, extras, supply, *sweep_vals)
    return cfg


def _fmt(x: float) -> str:
    # shortest representation that round-trips the float exactly
    return repr(float(x))


def dump_config(cfg: PdnConfig) -> str:
    """Canonical config text; parse_config(dump_config(cfg)) == cfg."""
    lines = [f"topology {cfg.topology}"]
    for name, b in cfg.branches.items():
        lines.append(f"branch {name} R={_fmt(b.r)} L={_fmt(b.l)} C={_fmt(b.c)}")
    for name, b in cfg.extras.items():
        lines.append(f"extra {name} R={_fmt(b.r)} L={_fmt(b.l)} C={_fmt(b.c)}")
    if cfg.supply is not None:
        lines.append(f"supply vdd={_fmt(cfg.supply.vdd)} "
                     f"ripple={_fmt(cfg.supply.ripple)} "
                     f"current={_fmt(cfg.supply.current)}")
    if cfg.sweep_points is not None:
        lines.append(f"sweep fmin={_fmt(cfg.sweep_fmin)} "
                     f"fmax={_fmt(cfg.sweep_fmax)} points={cfg.sweep_points}")
    return "\n".join(lines) + "\n"
