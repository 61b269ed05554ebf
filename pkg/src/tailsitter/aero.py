"""Lift/drag coefficient providers, aerodynamic forces and the best-L/D search."""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

import numpy as np

HEADER = ("alpha_deg", "cl", "cd")


class PolarError(ValueError):
    """Malformed polar data."""


class PolarRangeError(PolarError):
    """Angle of attack outside the tabulated range."""


class CoefficientProvider(Protocol):
    def coefficients(self, alpha: float) -> tuple[float, float]: ...


@dataclass(frozen=True)
class PolarTable:
    """Tabulated polar, linearly interpolated in angle of attack.

    Rows are stored in degrees; :meth:`coefficients` takes radians.
    """

    alpha_deg: tuple[float, ...]
    cl: tuple[float, ...]
    cd: tuple[float, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.alpha_deg)
        if n < 2:
            raise PolarError(f"polar needs at least 2 rows, got {n}")
        if not (len(self.cl) == len(self.cd) == n):
            raise PolarError("alpha_deg, cl and cd must have equal length")
        for i in range(n):
            if not all(math.isfinite(v) for v in (self.alpha_deg[i], self.cl[i], self.cd[i])):
                raise PolarError(f"row {i}: non-finite value")
            if self.cd[i] <= 0:
                raise PolarError(f"row {i} (alpha={self.alpha_deg[i]} deg): cd must be > 0, got {self.cd[i]}")
            if i and self.alpha_deg[i] <= self.alpha_deg[i - 1]:
                kind = "duplicate" if self.alpha_deg[i] == self.alpha_deg[i - 1] else "unsorted"
                raise PolarError(f"row {i}: {kind} alpha_deg {self.alpha_deg[i]} "
                                 f"(previous {self.alpha_deg[i - 1]}); alpha must be strictly increasing")

    @classmethod
    def from_rows(cls, rows, metadata=None) -> PolarTable:
        rows = list(rows)
        return cls(tuple(float(r[0]) for r in rows), tuple(float(r[1]) for r in rows),
                   tuple(float(r[2]) for r in rows), dict(metadata or {}))

    @property
    def bounds_deg(self) -> tuple[float, float]:
        return self.alpha_deg[0], self.alpha_deg[-1]

    def rows(self):
        return list(zip(self.alpha_deg, self.cl, self.cd))

    def coefficients_deg(self, alpha_deg: float) -> tuple[float, float]:
        a = self.alpha_deg
        lo, hi = a[0], a[-1]
        if not (lo <= alpha_deg <= hi):
            raise PolarRangeError(f"alpha={alpha_deg:.6g} deg outside polar range [{lo:g}, {hi:g}] deg")
        i = bisect.bisect_right(a, alpha_deg) - 1
        if i >= len(a) - 1:
            return self.cl[-1], self.cd[-1]
        if alpha_deg == a[i]:
            return self.cl[i], self.cd[i]
        s = (alpha_deg - a[i]) / (a[i + 1] - a[i])
        return (self.cl[i] + s * (self.cl[i + 1] - self.cl[i]),
                self.cd[i] + s * (self.cd[i + 1] - self.cd[i]))

    def coefficients(self, alpha: float) -> tuple[float, float]:
        return self.coefficients_deg(math.degrees(alpha))

    def covers(self, lo_deg: float = -10.0, hi_deg: float = 90.0) -> bool:
        return self.alpha_deg[0] <= lo_deg and self.alpha_deg[-1] >= hi_deg

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {v}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        for a, cl, cd in self.rows():
            writer.writerow([repr(a), repr(cl), repr(cd)])
        return buf.getvalue()


@dataclass(frozen=True)
class AnalyticPolar:
    """Full-envelope symmetric-airfoil model.

    ``C_L = c1 * sin(2 alpha)``, ``C_D = cd0 + cd90 * sin(alpha)**2``. Defined
    for every angle, so it never raises.
    """

    c1: float = 0.8
    cd0: float = 0.02
    cd90: float = 1.0

    def __post_init__(self):
        if self.cd0 <= 0 or self.cd90 < 0:
            raise PolarError(f"need cd0 > 0 and cd90 >= 0, got cd0={self.cd0}, cd90={self.cd90}")

    def coefficients(self, alpha: float) -> tuple[float, float]:
        s = math.sin(alpha)
        return self.c1 * math.sin(2.0 * alpha), self.cd0 + self.cd90 * s * s


def coefficients(provider: CoefficientProvider, alpha: float) -> tuple[float, float]:
    """``(C_L, C_D)`` at angle of attack ``alpha`` (rad)."""
    return provider.coefficients(alpha)


@dataclass(frozen=True)
class AeroModel:
    """Air density, reference area and a coefficient provider.

    Forces are mass-normalized, so ``S`` is the wing area per unit vehicle
    mass (m^2/kg) and ``K = rho * S / 2`` has units of 1/m.
    """

    rho: float
    S: float
    provider: CoefficientProvider = field(default_factory=AnalyticPolar)

    def __post_init__(self):
        if not (self.rho > 0 and self.S > 0):
            raise ValueError(f"rho and S must be positive, got rho={self.rho}, S={self.S}")

    @property
    def K(self) -> float:
        return self.rho * self.S / 2.0

    @classmethod
    def from_K(cls, K: float, provider: CoefficientProvider | None = None, rho: float = 1.225) -> AeroModel:
        return cls(rho=rho, S=2.0 * K / rho, provider=provider or AnalyticPolar())

    def forces(self, V: float, alpha: float) -> tuple[float, float]:
        cl, cd = self.provider.coefficients(alpha)
        q = self.K * V * V
        return q * cl, q * cd


def aero_forces(model: AeroModel, V: float, alpha: float, airspeed_floor: float = 0.0) -> tuple[float, float]:
    """Lift and drag ``(K C_L V^2, K C_D V^2)``; zero below ``airspeed_floor``."""
    if V < 0:
        raise ValueError(f"airspeed must be >= 0, got {V}")
    if V < airspeed_floor or V == 0.0:
        return 0.0, 0.0
    return model.forces(V, alpha)


def optimal_aoa(provider: CoefficientProvider, search_range: tuple[float, float],
                resolution_deg: float = 0.01) -> float:
    """Angle (rad) maximizing ``C_L / C_D`` on a uniform grid over ``search_range``.

    The grid step is ``resolution_deg``. Ties go to the smallest angle.
    """
    lo, hi = search_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"degenerate search range {search_range!r}")
    if not resolution_deg > 0:
        raise ValueError(f"resolution must be positive, got {resolution_deg}")
    lo_deg, hi_deg = math.degrees(lo), math.degrees(hi)
    n = int(math.floor((hi_deg - lo_deg) / resolution_deg + 1e-9)) + 1
    grid = lo_deg + resolution_deg * np.arange(n)
    best_ratio, best_alpha = None, float(grid[0])
    for a in grid:
        cl, cd = provider.coefficients(math.radians(float(a)))
        r = cl / cd
        # a rounding-level gain does not displace an earlier (smaller) angle
        if best_ratio is None or r > best_ratio + 1e-12 * abs(best_ratio):
            best_ratio, best_alpha = r, float(a)
    return math.radians(best_alpha)


def parse_polar_csv(text: str, source: str = "<string>") -> PolarTable:
    metadata = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep and not header_seen:
                metadata[key.strip()] = value.strip()
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if not header_seen:
            if tuple(fields) != HEADER:
                raise PolarError(f"{source}:{lineno}: expected header {','.join(HEADER)!r}, got {stripped!r}")
            header_seen = True
            continue
        if len(fields) != 3:
            raise PolarError(f"{source}:{lineno}: expected 3 columns, got {len(fields)}")
        try:
            rows.append(tuple(float(f) for f in fields))
        except ValueError:
            raise PolarError(f"{source}:{lineno}: non-numeric value in {stripped!r}") from None
    if not header_seen:
        raise PolarError(f"{source}: missing header {','.join(HEADER)!r}")
    try:
        return PolarTable.from_rows(rows, metadata)
    except PolarError as exc:
        raise PolarError(f"{source}: {exc}") from None


def load_polar_csv(path: str | Path) -> PolarTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise PolarError(f"cannot read polar {path}: {exc}") from exc
    return parse_polar_csv(text, source=str(path))


def _smoothstep(x: float) -> float:
    x = min(1.0, max(0.0, x))
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def naca0020_like_coefficients(alpha_deg: float) -> tuple[float, float]:
    """Smooth symmetric full-envelope polar behind the shipped table.

    Attached flow: ``C_L = 0.1 alpha_deg`` with the parabolic drag polar
    ``C_D = 0.012 + C_L^2 / 30``, whose L/D optimum is ``C_L = 0.6`` at
    exactly 6 deg. Post-stall: flat plate, ``C_L = 1.05 sin 2a`` and
    ``C_D = 0.05 + 1.8 sin^2 a``. A quintic smoothstep over 8..20 deg blends
    the two, so the curves are C2 everywhere.
    """
    m = abs(alpha_deg)
    r = math.radians(m)
    w = _smoothstep((m - 8.0) / 12.0)
    cl_att = 0.1 * m
    cd_att = 0.012 + cl_att * cl_att / 30.0
    cl = (1 - w) * cl_att + w * 1.05 * math.sin(2 * r)
    cd = (1 - w) * cd_att + w * (0.05 + 1.8 * math.sin(r) ** 2)
    return math.copysign(cl, alpha_deg), cd


def naca0020_like_rows(step_deg: float = 0.25) -> list[tuple[float, float, float]]:
    """Tabulate :func:`naca0020_like_coefficients` over [-180, 180] deg."""
    n = int(round(360.0 / step_deg))
    rows = []
    for i in range(n + 1):
        a = -180.0 + i * step_deg
        cl, cd = naca0020_like_coefficients(a)
        rows.append((a, round(cl, 7) + 0.0, round(cd, 7)))
    return rows


def default_polar() -> PolarTable:
    """The shipped NACA-0020-like polar (``data/naca0020_default.csv``)."""
    text = resources.files("tailsitter").joinpath("data/naca0020_default.csv").read_text(encoding="utf-8")
    return parse_polar_csv(text, source="naca0020_default.csv")
