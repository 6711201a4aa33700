"""Step-law catalogue.

Every family is a location/scale transform ``X = loc + scale * Y`` of a
standardized base law ``Y``.  Bases provide closed forms for the cdf, the
tail, the density and the partial moments ``int_{(a,b]} y^k dF(y)`` for
``k = 0, 1, 2``; everything the criteria and validation modules need is
derived from those.

Draws are produced by fixed inverse-cdf recipes from the uniforms of an
:class:`~reflectlab.rng.RngStream` and then rounded to the dyadic grid
``2**-GRID_BITS``.  On that grid path sums are exact integers, which is what
lets the walker compare the recursive and definitional reflected processes
bit for bit.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Optional

import numpy as np
from scipy import special

from .errors import BlanketAssumptionViolation, DomainError, ParseError
from .quadrature import integrate_1d
from .rng import RngStream

GRID_BITS = 32
_GRID = float(2 ** GRID_BITS)
INF = math.inf


class MomentStatus(str, enum.Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"
    BOUNDARY = "Boundary"


# ---------------------------------------------------------------------------
# standardized bases


def _arr(t):
    return np.asarray(t, dtype=float)


def _ret(x, like):
    return float(x) if np.ndim(like) == 0 else x


class _Base:
    name = ""
    atoms: tuple = ()
    breaks: tuple = ()
    neg_index = INF        # sup{p : E(Y^-)^p < inf}
    pos_index = INF
    words_per_draw = 1

    def cdf(self, t):
        return 1.0 - self.tail(t)

    def cdf_left(self, t):
        return self.cdf(t)

    def tail(self, t):
        raise NotImplementedError

    def pdf(self, t):
        return np.zeros_like(_arr(t))

    def upper(self, k, t):
        """int_{(t, inf)} y^k dF(y)."""
        raise NotImplementedError

    def lower(self, k, t):
        """int_{(-inf, t]} y^k dF(y)."""
        raise NotImplementedError

    def partial(self, k, a, b):
        """int_{(a, b]} y^k dF(y) for scalars a <= b."""
        if b <= a:
            return 0.0
        if math.isinf(b):
            return float(self.upper(k, a))
        if math.isinf(a):
            return float(self.lower(k, b))
        return float(self.lower(k, b) - self.lower(k, a))

    def draw(self, stream: RngStream, n: int) -> np.ndarray:
        raise NotImplementedError


class _Normal(_Base):
    name = "normal"
    _c = 1.0 / math.sqrt(2.0 * math.pi)

    def tail(self, t):
        return special.ndtr(-_arr(t))

    def cdf(self, t):
        return special.ndtr(_arr(t))

    def pdf(self, t):
        t = _arr(t)
        return self._c * np.exp(-0.5 * t * t)

    def _tpdf(self, t):
        with np.errstate(invalid="ignore"):
            v = t * self.pdf(t)
        return np.where(np.isinf(t), 0.0, v)

    def upper(self, k, t):
        t = _arr(t)
        if k == 0:
            return self.tail(t)
        if k == 1:
            return self.pdf(t)
        return self.tail(t) + self._tpdf(t)

    def lower(self, k, t):
        t = _arr(t)
        if k == 0:
            return self.cdf(t)
        if k == 1:
            return -self.pdf(t)
        return self.cdf(t) - self._tpdf(t)

    def draw(self, stream, n):
        return special.ndtri(stream.uniforms(n))


class _Exp(_Base):
    name = "shiftexp"
    breaks = (0.0,)
    _totals = (1.0, 1.0, 2.0)

    def tail(self, t):
        return np.exp(-np.maximum(_arr(t), 0.0))

    def cdf(self, t):
        return -np.expm1(-np.maximum(_arr(t), 0.0))

    def pdf(self, t):
        t = _arr(t)
        return np.where(t >= 0.0, np.exp(-np.maximum(t, 0.0)), 0.0)

    def upper(self, k, t):
        s = np.maximum(_arr(t), 0.0)
        e = np.exp(-s)
        if k == 0:
            return e
        if k == 1:
            return e * (s + 1.0)
        return e * (s * s + 2.0 * s + 2.0)

    def lower(self, k, t):
        t = _arr(t)
        if k == 0:
            return self.cdf(t)
        # the upper tail at t (clamped at 0) already carries the whole mass when t <= 0
        return self._totals[k] - self.upper(k, t)

    def draw(self, stream, n):
        return -np.log1p(-stream.uniforms(n))


class _Cauchy(_Base):
    name = "cauchy"
    neg_index = 1.0
    pos_index = 1.0

    def tail(self, t):
        return np.arctan2(1.0, _arr(t)) / math.pi

    def cdf(self, t):
        return np.arctan2(1.0, -_arr(t)) / math.pi

    def pdf(self, t):
        t = _arr(t)
        return 1.0 / (math.pi * (1.0 + t * t))

    def upper(self, k, t):
        t = _arr(t)
        if k == 0:
            return self.tail(t)
        return np.where(np.isposinf(t), 0.0, INF)

    def lower(self, k, t):
        t = _arr(t)
        if k == 0:
            return self.cdf(t)
        val = -INF if k == 1 else INF
        return np.where(np.isneginf(t), 0.0, val)

    def partial(self, k, a, b):
        if b <= a:
            return 0.0
        if k == 0 or math.isinf(a) or math.isinf(b):
            return super().partial(k, a, b)
        if k == 1:
            return (math.log1p(b * b) - math.log1p(a * a)) / (2.0 * math.pi)
        return ((b - math.atan(b)) - (a - math.atan(a))) / math.pi

    def draw(self, stream, n):
        return np.tan(math.pi * (stream.uniforms(n) - 0.5))


class _Lattice(_Base):
    name = "lattice"

    def __init__(self, p):
        self.p = p
        self.atoms = ((-1.0, 1.0 - p), (1.0, p))
        self.breaks = (-1.0, 1.0)

    def tail(self, t):
        t = _arr(t)
        return np.where(t < -1.0, 1.0, np.where(t < 1.0, self.p, 0.0))

    def cdf(self, t):
        t = _arr(t)
        return np.where(t < -1.0, 0.0, np.where(t < 1.0, 1.0 - self.p, 1.0))

    def cdf_left(self, t):
        t = _arr(t)
        return np.where(t <= -1.0, 0.0, np.where(t <= 1.0, 1.0 - self.p, 1.0))

    def upper(self, k, t):
        t = _arr(t)
        out = np.zeros_like(t)
        for loc, mass in self.atoms:
            out = out + np.where(loc > t, mass * loc ** k, 0.0)
        return out

    def lower(self, k, t):
        t = _arr(t)
        out = np.zeros_like(t)
        for loc, mass in self.atoms:
            out = out + np.where(loc <= t, mass * loc ** k, 0.0)
        return out

    def draw(self, stream, n):
        return np.where(stream.uniforms(n) < self.p, 1.0, -1.0)


def _pareto_upper(alpha, k, v):
    """int_{(v, inf)} w^k dP(w) for a unit-scale Pareto(alpha); v is clamped at 1."""
    v = np.maximum(_arr(v), 1.0)
    if alpha <= k:
        return np.where(np.isposinf(v), 0.0, INF)
    with np.errstate(divide="ignore", over="ignore"):
        return alpha * v ** (k - alpha) / (alpha - k)


def _pareto_lower(alpha, k, v):
    """int_{[1, v]} w^k dP(w); zero below 1."""
    v = np.maximum(_arr(v), 1.0)
    if k == alpha:
        return alpha * np.log(v)
    with np.errstate(over="ignore"):
        return alpha * (v ** (k - alpha) - 1.0) / (k - alpha)


def _pareto_partial(alpha, k, lo, hi):
    """int_{(lo, hi]} w^k dP(w), scalar."""
    lo, hi = max(lo, 1.0), max(hi, 1.0)
    if hi <= lo:
        return 0.0
    if math.isinf(hi):
        return float(_pareto_upper(alpha, k, lo))
    return float(_pareto_lower(alpha, k, hi) - _pareto_lower(alpha, k, lo))


class _Pareto2(_Base):
    """Mass ``q`` on ``-V`` (index a), mass ``1 - q`` on ``+V'`` (index b), unit scale."""

    name = "pareto2"
    breaks = (-1.0, 1.0)
    words_per_draw = 2

    def __init__(self, a, b, q):
        self.a, self.b, self.q = a, b, q
        self.neg_index, self.pos_index = a, b

    def tail(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore", over="ignore"):
            pos = (1.0 - self.q) * np.maximum(t, 1.0) ** -self.b
            neg = 1.0 - self.q * np.maximum(-t, 1.0) ** -self.a
        return np.where(t >= 1.0, pos, np.where(t >= -1.0, 1.0 - self.q, neg))

    def cdf(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore", over="ignore"):
            neg = self.q * np.maximum(-t, 1.0) ** -self.a
            pos = 1.0 - (1.0 - self.q) * np.maximum(t, 1.0) ** -self.b
        return np.where(t < -1.0, neg, np.where(t < 1.0, self.q, pos))

    def pdf(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore", over="ignore"):
            pos = (1.0 - self.q) * self.b * np.maximum(t, 1.0) ** (-self.b - 1.0)
            neg = self.q * self.a * np.maximum(-t, 1.0) ** (-self.a - 1.0)
        return np.where(t > 1.0, pos, np.where(t < -1.0, neg, 0.0))

    def upper(self, k, t):
        t = _arr(t)
        sign = (-1.0) ** k
        pos = (1.0 - self.q) * _pareto_upper(self.b, k, t)
        # negative part: x = -v with 1 <= v < -t
        neg = self.q * sign * _pareto_lower(self.a, k, -t)
        return _safe_add(pos, neg)

    def lower(self, k, t):
        t = _arr(t)
        sign = (-1.0) ** k
        neg = self.q * sign * _pareto_upper(self.a, k, -t)
        pos = (1.0 - self.q) * _pareto_lower(self.b, k, t)
        return _safe_add(neg, pos)

    def partial(self, k, a, b):
        if b <= a:
            return 0.0
        sign = (-1.0) ** k
        pos = (1.0 - self.q) * _pareto_partial(self.b, k, a, b)
        neg = self.q * sign * _pareto_partial(self.a, k, -b, -a)
        return pos + neg

    def draw(self, stream, n):
        u = stream.uniforms(2 * n).reshape(n, 2)
        neg = u[:, 0] < self.q
        return np.where(neg, -u[:, 1] ** (-1.0 / self.a), u[:, 1] ** (-1.0 / self.b))


def _safe_add(x, y):
    with np.errstate(invalid="ignore"):
        s = np.asarray(x + y, dtype=float)
    # inf + (-inf) cannot occur for a single-signed tail piece; guard anyway
    return np.where(np.isnan(s), np.where(np.isinf(x), x, y), s)


# ---------------------------------------------------------------------------
# metadata


@dataclass(frozen=True)
class DistributionMetadata:
    mean: Optional[float]
    mean_abs_finite: bool
    variance: Optional[float]
    second_plus_moment: Optional[float]
    neg_moment_order_sup: float
    pos_moment_order_sup: float
    second_moment: Optional[float] = None
    first_plus_moment: float = INF
    first_minus_moment: float = INF
    # pure power tails have an infinite moment exactly at the tail index
    neg_moment_at_sup_finite: Optional[bool] = None
    pos_moment_at_sup_finite: Optional[bool] = None
    j_minus_known: Optional[bool] = None
    lambda_star_known: Optional[float] = None

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# the public distribution type

_FAMILY_KEYS = {
    "normal": {"mu": 0.0, "sigma": 1.0},
    "lattice": {"p": None},
    "shiftexp": {"rate": 1.0},
    "cauchy": {"x0": 0.0, "gamma": 1.0},
    "pareto2": {"alpha_neg": None, "alpha_pos": None, "p_neg": None, "scale": 1.0},
}
_GENERIC_KEYS = {"shift": 0.0, "center": 0.0}


@dataclass(frozen=True)
class StepDistribution:
    """An immutable step law ``X`` with its analytic metadata."""

    family: str
    parameters: tuple          # sorted (key, value) pairs, family keys only
    shift: float = 0.0
    _base: _Base = field(init=False, repr=False, compare=False)
    loc: float = field(init=False, repr=False, compare=False)
    scale: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = dict(self.parameters)
        if self.family == "normal":
            if not p["sigma"] > 0:
                raise DomainError("normal: sigma must be > 0")
            base, loc, scale = _Normal(), p["mu"], p["sigma"]
        elif self.family == "lattice":
            if not 0.0 <= p["p"] <= 1.0:
                raise DomainError("lattice: p must lie in [0, 1]")
            base, loc, scale = _Lattice(p["p"]), 0.0, 1.0
        elif self.family == "shiftexp":
            if not p["rate"] > 0:
                raise DomainError("shiftexp: rate must be > 0")
            base, loc, scale = _Exp(), 0.0, 1.0 / p["rate"]
        elif self.family == "cauchy":
            if not p["gamma"] > 0:
                raise DomainError("cauchy: gamma must be > 0")
            base, loc, scale = _Cauchy(), p["x0"], p["gamma"]
        elif self.family == "pareto2":
            if not (p["alpha_neg"] > 0 and p["alpha_pos"] > 0):
                raise DomainError("pareto2: tail indices must be > 0")
            if not 0.0 < p["p_neg"] < 1.0:
                raise DomainError("pareto2: p_neg must lie in (0, 1)")
            if not p["scale"] > 0:
                raise DomainError("pareto2: scale must be > 0")
            base = _Pareto2(p["alpha_neg"], p["alpha_pos"], p["p_neg"])
            loc, scale = 0.0, p["scale"]
        else:
            raise ParseError(f"unknown family {self.family!r}")
        if not math.isfinite(self.shift):
            raise DomainError("shift must be finite")
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "loc", loc + self.shift)
        object.__setattr__(self, "scale", scale)
        f0m, f0 = float(self.cdf_left(0.0)), float(self.cdf(0.0))
        if not f0m > 0.0:
            raise BlanketAssumptionViolation(f"{self.spec}: F(0-) = {f0m:g}, need F(0-) > 0")
        if not f0 < 1.0:
            raise BlanketAssumptionViolation(f"{self.spec}: F(0) = {f0:g}, need F(0) < 1")

    # -- identity -----------------------------------------------------------

    @property
    def spec(self) -> str:
        parts = [f"{k}={v!r}" for k, v in self.parameters]
        if self.shift != 0.0:
            parts.append(f"shift={self.shift!r}")
        return f"{self.family}({','.join(parts)})"

    def __str__(self):
        return self.spec

    def param(self, key):
        return dict(self.parameters)[key]

    # -- distribution functions ----------------------------------------------

    def _t(self, x):
        return (_arr(x) - self.loc) / self.scale

    def cdf(self, x):
        return _ret(self._base.cdf(self._t(x)), x)

    def cdf_left(self, x):
        """F(x-)."""
        return _ret(self._base.cdf_left(self._t(x)), x)

    def tail(self, x):
        """F̄(x) = P(X > x), evaluated directly."""
        return _ret(self._base.tail(self._t(x)), x)

    def pdf(self, x):
        """Density of the absolutely continuous part."""
        return _ret(self._base.pdf(self._t(x)) / self.scale, x)

    @property
    def atoms(self):
        return tuple((self.loc + self.scale * a, m) for a, m in self._base.atoms)

    @property
    def breakpoints(self):
        return tuple(self.loc + self.scale * b for b in self._base.breaks)

    @property
    def is_atomic(self) -> bool:
        return bool(self._base.atoms)

    def _mix(self, terms, k):
        # terms[j] multiplies C(k, j) loc^(k-j) scale^j; a divergent top term dominates
        top = terms[k]
        acc = 0.0
        for j, term in enumerate(terms):
            coef = comb(k, j) * self.loc ** (k - j) * self.scale ** j
            if coef != 0.0:
                acc = acc + coef * np.where(np.isinf(top), 0.0, term)
        return np.where(np.isinf(top), top, acc)

    def upper_moment(self, k: int, x):
        """int_{(x, inf)} y^k dF(y)."""
        t = self._t(x)
        return _ret(self._mix([self._base.upper(j, t) for j in range(k + 1)], k), x)

    def lower_moment(self, k: int, x):
        """int_{(-inf, x]} y^k dF(y)."""
        t = self._t(x)
        return _ret(self._mix([self._base.lower(j, t) for j in range(k + 1)], k), x)

    def partial_moment(self, k: int, a: float, b: float) -> float:
        """int_{(a, b]} y^k dF(y)."""
        ta, tb = (a - self.loc) / self.scale, (b - self.loc) / self.scale
        terms = [self._base.partial(j, ta, tb) for j in range(k + 1)]
        return float(self._mix([np.float64(t) for t in terms], k))

    def integrated_tail(self, a: float, b: float) -> float:
        """int_a^b F̄(y) dy by parts: b F̄(b) - a F̄(a) + int_{(a,b]} y dF."""
        if b <= a:
            return 0.0
        if math.isinf(b):
            u1 = self.upper_moment(1, a)
            return u1 - a * self.tail(a) if math.isfinite(u1) else INF
        return b * self.tail(b) - a * self.tail(a) + self.partial_moment(1, a, b)

    def integrated_weighted_tail(self, x):
        """int_x^inf y F̄(y) dy = (int_{(x,inf)} y^2 dF - x^2 F̄(x)) / 2; vectorized."""
        return _ret(0.5 * (_arr(self.upper_moment(2, x)) - _arr(x) ** 2 * _arr(self.tail(x))), x)

    def moment(self, k: int) -> float:
        return float(self.upper_moment(k, -INF))

    # -- sampling -------------------------------------------------------------

    def draw(self, stream: RngStream, n: int) -> np.ndarray:
        """``n`` draws as floats on the dyadic grid 2**-GRID_BITS."""
        x = self.loc + self.scale * self._base.draw(stream, n)
        return np.rint(x * _GRID) / _GRID

    def draw_units(self, stream: RngStream, n: int) -> np.ndarray:
        """``n`` draws as exact integer multiples of 2**-GRID_BITS."""
        return to_units(self.draw(stream, n))

    @property
    def words_per_draw(self) -> int:
        return self._base.words_per_draw

    # -- metadata -------------------------------------------------------------

    @cached_property
    def metadata(self) -> DistributionMetadata:
        a, b = self._base.neg_index, self._base.pos_index
        pure_power = self.family in ("cauchy", "pareto2")
        mean_abs_finite = a > 1.0 and b > 1.0
        ex_plus = float(self.upper_moment(1, 0.0))
        ex_minus = -float(self.lower_moment(1, 0.0))
        mean = self.moment(1) if mean_abs_finite else None
        if mean is not None and abs(mean) <= 1e-12 * (ex_plus + ex_minus):
            mean = 0.0      # centring leaves rounding noise; the drift is zero by construction
        second = self.moment(2) if (a > 2.0 and b > 2.0) else None
        variance = second - mean * mean if second is not None else None
        sp = float(self.upper_moment(2, 0.0)) if b > 2.0 else None
        return DistributionMetadata(
            mean=mean,
            mean_abs_finite=mean_abs_finite,
            variance=variance,
            second_plus_moment=sp,
            neg_moment_order_sup=a,
            pos_moment_order_sup=b,
            second_moment=second,
            first_plus_moment=ex_plus,
            first_minus_moment=ex_minus,
            neg_moment_at_sup_finite=False if pure_power else None,
            pos_moment_at_sup_finite=False if pure_power else None,
        )


def to_units(x: np.ndarray) -> np.ndarray:
    """Exact integer multiples of 2**-GRID_BITS for grid-valued floats.

    int64 when every value is small enough that sums of a few million of them
    cannot overflow, Python ints (object dtype) otherwise.
    """
    x = np.asarray(x, dtype=float)
    scaled = x * _GRID
    if x.size == 0 or np.max(np.abs(scaled)) < 2.0 ** 40:
        return scaled.astype(np.int64)
    return np.array([int(v) for v in scaled], dtype=object)


def from_units(u: np.ndarray) -> np.ndarray:
    if u.dtype == object:
        return np.array([math.ldexp(float(v), -GRID_BITS) for v in u], dtype=float)
    return u.astype(np.float64) / _GRID


# ---------------------------------------------------------------------------
# construction and queries

_SPEC_RE = re.compile(r"^([a-z_][a-z0-9_]*)\((.*)\)$")
_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def make_distribution(spec: str) -> StepDistribution:
    """Parse ``name(key=value, ...)`` into a validated distribution."""
    if not isinstance(spec, str):
        raise ParseError("distribution spec must be a string")
    text = re.sub(r"\s+", "", spec)
    m = _SPEC_RE.match(text)
    if not m:
        raise ParseError(f"malformed distribution spec {spec!r}; expected name(key=value,...)")
    name, body = m.group(1), m.group(2)
    if name not in _FAMILY_KEYS:
        raise ParseError(f"unknown family {name!r}; choose from {sorted(_FAMILY_KEYS)}")
    given = {}
    if body:
        for item in body.split(","):
            key, sep, val = item.partition("=")
            if not sep or not key:
                raise ParseError(f"malformed parameter {item!r} in {spec!r}")
            if key in given:
                raise ParseError(f"duplicate parameter {key!r} in {spec!r}")
            if not _NUM_RE.match(val):
                raise ParseError(f"parameter {key!r} needs a decimal real, got {val!r}")
            given[key] = float(val)
    allowed = {**_FAMILY_KEYS[name], **_GENERIC_KEYS}
    unknown = set(given) - set(allowed)
    if unknown:
        raise ParseError(f"{name}: unknown parameter(s) {sorted(unknown)}")
    params = {}
    for key, default in _FAMILY_KEYS[name].items():
        if key in given:
            params[key] = given[key]
        elif default is None:
            raise ParseError(f"{name}: missing required parameter {key!r}")
        else:
            params[key] = default
    shift = given.get("shift", 0.0)
    center = given.get("center", 0.0)
    if center not in (0.0, 1.0):
        raise DomainError("center must be 0 or 1")
    if center and "shift" in given:
        raise ParseError("give either shift or center=1, not both")
    if name == "shiftexp" and "shift" not in given and not center:
        raise ParseError("shiftexp: missing required parameter 'shift'")
    if center:
        raw = StepDistribution(name, tuple(sorted(params.items())), 0.0) if name != "shiftexp" else None
        shift = -_uncentred_mean(name, params, raw)
    return StepDistribution(name, tuple(sorted(params.items())), shift)


def _uncentred_mean(name, params, raw):
    if name == "shiftexp":
        return 1.0 / params["rate"]
    md = raw.metadata
    if md.mean is None:
        raise DomainError(f"{name}: cannot centre a law without a finite mean")
    return md.mean


def sample(dist: StepDistribution, stream: RngStream) -> float:
    return float(dist.draw(stream, 1)[0])


def cdf(dist: StepDistribution, x) -> float:
    return dist.cdf(x)


def tail(dist: StepDistribution, x) -> float:
    return dist.tail(x)


def nu_plus(dist: StepDistribution, x: float, method: str = "closed") -> float:
    """Truncated first moment int_{[0,x]} y dF(y)."""
    if x < 0:
        raise DomainError("nu_plus needs x >= 0")
    if method == "closed":
        return dist.partial_moment(1, 0.0, x)
    # quadrature of the density plus exact atom sums
    atom_part = sum(loc * m for loc, m in dist.atoms if 0.0 <= loc <= x)
    if dist.is_atomic:
        return atom_part
    return atom_part + integrate_1d(lambda y: y * dist.pdf(y), 0.0, x, dist.breakpoints)


def moment_order_check(dist: StepDistribution, p: float, side: str) -> MomentStatus:
    """Compare ``p`` with the side's moment-order supremum."""
    if not p > 0:
        raise DomainError("moment order must be > 0")
    md = dist.metadata
    if side == "neg":
        sup = md.neg_moment_order_sup
    elif side == "pos":
        sup = md.pos_moment_order_sup
    else:
        raise DomainError("side must be 'neg' or 'pos'")
    if p < sup:
        return MomentStatus.FINITE
    if p > sup:
        return MomentStatus.INFINITE
    return MomentStatus.BOUNDARY


def moment_is_finite(dist: StepDistribution, p: float, side: str) -> Optional[bool]:
    """Resolve finiteness of E(X^side)^p, using family metadata at the boundary."""
    status = moment_order_check(dist, p, side)
    if status is MomentStatus.FINITE:
        return True
    if status is MomentStatus.INFINITE:
        return False
    md = dist.metadata
    return md.neg_moment_at_sup_finite if side == "neg" else md.pos_moment_at_sup_finite
