"""Run configuration for the verification suite and the dump tool."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .dirac import GeometryData


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


_KNOWN_KEYS = {
    "n", "r", "N", "b", "tau", "sides", "parities", "checks",
    "tolerance", "tolerance_overrides", "seed", "output",
}

_SIDE_NAMES = {"plus": 1, "minus": -1, "+": 1, "-": -1, 1: 1, -1: -1}


@dataclass
class SuiteConfig:
    n: int = 2
    r: int = 1
    N: int = 12
    b_re: tuple = None
    b_im: tuple = None
    tau: tuple = None
    sides: tuple = (1, -1)
    parities: tuple = ("even", "odd")
    checks: tuple = None
    tolerance: float = 1e-9
    tolerance_overrides: dict = field(default_factory=dict)
    seed: int = 0
    output: str = None

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.r < 1:
            raise ConfigError("r must be at least 1")
        if self.N < 4:
            raise ConfigError("truncation N must be at least 4")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        for v in self.tolerance_overrides.values():
            if not v > 0:
                raise ConfigError("tolerance overrides must be positive")
        if self.tau is None:
            self.tau = (1.0,) * (self.n - 1)
        else:
            taus = tuple(float(t) for t in self.tau)
            if len(taus) == 1:
                taus = taus * (self.n - 1)
            if len(taus) != self.n - 1:
                raise ConfigError("tau must have one width or one per mode")
            if any(t <= 0 for t in taus):
                raise ConfigError("tau widths must be positive")
            self.tau = taus
        self.sides = tuple(_SIDE_NAMES[s] for s in self.sides)
        for p in self.parities:
            if p not in ("even", "odd"):
                raise ConfigError(f"unknown parity {p!r}")
        if self.b_re is not None:
            self._check_square(self.b_re, "b.re")
        if self.b_im is not None:
            self._check_square(self.b_im, "b.im")

    def _check_square(self, mat, label):
        if len(mat) != self.n or any(len(row) != self.n for row in mat):
            raise ConfigError(f"{label} must be an {self.n} x {self.n} matrix")

    def geometry(self) -> GeometryData:
        if self.b_re is None and self.b_im is None:
            return GeometryData(n=self.n, r=self.r)
        b = []
        for j in range(self.n):
            row = []
            for k in range(self.n):
                re = self.b_re[j][k] if self.b_re is not None else 0
                im = self.b_im[j][k] if self.b_im is not None else 0
                row.append((_to_fraction(re), _to_fraction(im)))
            b.append(tuple(row))
        return GeometryData(n=self.n, r=self.r, b=tuple(b))

    def effective_tolerance(self, check_name: str, pinned: float = None) -> float:
        if check_name in self.tolerance_overrides:
            return float(self.tolerance_overrides[check_name])
        if pinned is not None:
            return pinned
        return self.tolerance

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "N": self.N,
            "b": None
            if self.b_re is None and self.b_im is None
            else {
                "re": [[str(v) for v in row] for row in (self.b_re or [[0] * self.n] * self.n)],
                "im": [[str(v) for v in row] for row in (self.b_im or [[0] * self.n] * self.n)],
            },
            "tau": list(self.tau),
            "sides": ["plus" if s > 0 else "minus" for s in self.sides],
            "parities": list(self.parities),
            "checks": None if self.checks is None else list(self.checks),
            "tolerance": self.tolerance,
            "tolerance_overrides": dict(sorted(self.tolerance_overrides.items())),
            "seed": self.seed,
        }


def _to_fraction(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    raise ConfigError(f"cannot read rational value {v!r}")


def parse_config(text: str) -> SuiteConfig:
    """Parse a JSON configuration; defaults fill in, unknown keys rejected."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key in ("n", "r", "N", "seed"):
        if key in raw:
            if not isinstance(raw[key], int):
                raise ConfigError(f"{key} must be an integer")
            kwargs[key] = raw[key]
    if "tolerance" in raw:
        kwargs["tolerance"] = float(raw["tolerance"])
    if "tolerance_overrides" in raw:
        if not isinstance(raw["tolerance_overrides"], dict):
            raise ConfigError("tolerance_overrides must be an object")
        kwargs["tolerance_overrides"] = {
            k: float(v) for k, v in raw["tolerance_overrides"].items()
        }
    if "tau" in raw:
        if not isinstance(raw["tau"], list) or not raw["tau"]:
            raise ConfigError("tau must be a nonempty list")
        kwargs["tau"] = tuple(raw["tau"])
    if "sides" in raw:
        try:
            kwargs["sides"] = tuple(_SIDE_NAMES[s] for s in raw["sides"])
        except KeyError as exc:
            raise ConfigError(f"unknown side {exc.args[0]!r}") from exc
    if "parities" in raw:
        kwargs["parities"] = tuple(raw["parities"])
    if "checks" in raw:
        if not isinstance(raw["checks"], list):
            raise ConfigError("checks must be a list of names")
        kwargs["checks"] = tuple(raw["checks"])
    if "output" in raw:
        kwargs["output"] = raw["output"]
    if "b" in raw and raw["b"] is not None:
        b = raw["b"]
        if not isinstance(b, dict) or set(b) - {"re", "im"}:
            raise ConfigError("b must be an object with 're' and/or 'im'")
        if "re" in b:
            kwargs["b_re"] = tuple(tuple(row) for row in b["re"])
        if "im" in b:
            kwargs["b_im"] = tuple(tuple(row) for row in b["im"])
    return SuiteConfig(**kwargs)
