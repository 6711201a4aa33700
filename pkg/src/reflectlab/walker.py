"""Path-level engine for the walk reflected at its maximum.

All path arithmetic runs on exact integers: a step ``x`` is held as
``x * 2**bits`` (``bits = GRID_BITS`` for sampled paths), so partial sums,
running maxima and reflected values carry no rounding.  That makes the
recursive form ``R_n = max(R_{n-1} - X_n, 0)`` and the definitional form
``S*_n - S_n`` agree bit for bit, and the float views of both are identical.

Exceedance is strict and uses no epsilon: ``R_n > r * n**kappa`` is decided
by comparing the exact integer ``R_n * 2**bits`` with ``floor(b_n * 2**bits)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .distributions import GRID_BITS, StepDistribution
from .errors import DomainError
from .rng import RngStream

_INT64_ROOM = 2 ** 62
_FIRST_BLOCK = 64
_MAX_BLOCK = 1 << 16


# ---------------------------------------------------------------------------
# exact integer helpers


def _units_to_float(u: np.ndarray, bits: int) -> np.ndarray:
    if u.dtype == object:
        return np.array([math.ldexp(float(v), -bits) for v in u], dtype=float)
    return np.ldexp(u.astype(np.float64), -bits)


def _as_int64_if_safe(u: np.ndarray) -> np.ndarray:
    if u.dtype != object or u.size == 0:
        return u
    if max(abs(int(v)) for v in u) * u.size < _INT64_ROOM:
        return u.astype(np.int64)
    return u


def steps_to_units(steps) -> tuple[np.ndarray, int]:
    """Exact integer representation of arbitrary float steps: ``(units, bits)``."""
    xs = [float(x) for x in steps]
    bits = 0
    for x in xs:
        if not math.isfinite(x):
            raise DomainError("steps must be finite")
        den = x.as_integer_ratio()[1]
        bits = max(bits, den.bit_length() - 1)
    units = []
    for x in xs:
        num, den = x.as_integer_ratio()
        units.append(num << (bits - (den.bit_length() - 1)))
    units = np.array(units, dtype=object)
    return _as_int64_if_safe(units), bits


class _Accumulator:
    """Carries ``(S, S*)`` in exact units across blocks of steps."""

    def __init__(self):
        self.s = 0
        self.smax = 0

    def push(self, units: np.ndarray):
        n = units.size
        if units.dtype != object:
            peak = int(np.max(np.abs(units))) if n else 0
            if abs(self.s) + abs(self.smax) + peak * n < _INT64_ROOM:
                s = np.cumsum(units) + np.int64(self.s)
                smax = np.maximum(np.maximum.accumulate(s), np.int64(self.smax))
                self.s, self.smax = int(s[-1]), int(smax[-1])
                return s, smax, smax - s
            units = np.array([int(v) for v in units], dtype=object)
        s = np.cumsum(units) + self.s
        smax = np.maximum.accumulate(np.concatenate([np.array([self.smax], dtype=object), s]))[1:]
        self.s, self.smax = s[-1], smax[-1]
        return s, smax, smax - s


def _block_sizes(total: int):
    size = _FIRST_BLOCK
    done = 0
    while done < total:
        m = min(size, total - done)
        yield done, m
        done += m
        size = min(size * 2, _MAX_BLOCK)


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Boundary:
    """The curve ``r * n**kappa``."""

    r: float
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.kappa)):
            raise DomainError("boundary parameters must be finite")
        if self.kappa < 0:
            raise DomainError("kappa must be >= 0")
        if self.kappa > 0 and not self.r > 0:
            raise DomainError("r must be > 0 when kappa > 0")
        if self.kappa == 0 and self.r < 0:
            raise DomainError("r must be >= 0")

    def values(self, n) -> np.ndarray:
        """Boundary heights at step indices ``n >= 1`` as ``r * exp(kappa * log n)``."""
        n = np.asarray(n, dtype=np.float64)
        out = self.r * np.exp(self.kappa * np.log(np.maximum(n, 1.0)))
        return np.where(n == 1.0, self.r, out)

    def value(self, n: int) -> float:
        return float(self.values(n))

    def thresholds(self, n, bits: int, dtype) -> np.ndarray:
        """``floor(b_n * 2**bits)``; R exceeds the curve iff ``R_units > threshold``."""
        scaled = np.floor(np.ldexp(self.values(n), bits))
        if dtype == object:
            return np.array([int(v) if math.isfinite(v) else math.inf for v in scaled], dtype=object)
        return np.minimum(scaled, float(_INT64_ROOM)).astype(np.int64)


@dataclass(frozen=True)
class ReflectedPath:
    steps: np.ndarray
    s: np.ndarray
    s_star: np.ndarray
    reflected: np.ndarray
    stream_id: Optional[tuple]
    bits: int
    # exact integer views (value * 2**bits)
    steps_units: np.ndarray
    s_units: np.ndarray
    s_star_units: np.ndarray
    reflected_units: np.ndarray
    recursion_units: np.ndarray
    delta_units: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.steps.size

    @property
    def reflected_by_recursion(self) -> np.ndarray:
        return _units_to_float(self.recursion_units, self.bits)

    @property
    def deltas(self) -> np.ndarray:
        return _units_to_float(self.delta_units, self.bits)

    def to_rows(self):
        """``(n, x, s, s_star, r)`` rows, starting at n = 1."""
        for i in range(self.n_steps):
            yield i + 1, self.steps[i], self.s[i], self.s_star[i], self.reflected[i]


@dataclass(frozen=True)
class PassageOutcome:
    kind: str                      # "finite" or "censored"
    n: int                         # passage index, or the cap when censored
    exceed_value: Optional[float] = None
    boundary_value: Optional[float] = None

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        if self.finite:
            return f"Finite({self.n})"
        return f"Censored({self.n})"


@dataclass(frozen=True)
class LadderDecomposition:
    ladder_times: tuple
    depths: tuple
    complete: bool
    open_depth: float = 0.0        # depth of the unfinished excursion at the horizon


# ---------------------------------------------------------------------------
# operations


def reflect_step(r_prev: float, x: float) -> tuple[float, float]:
    """One step of the reflected process: ``(R_i, Delta_i)`` from ``R_{i-1}`` and ``X_i``."""
    if r_prev < 0:
        raise DomainError("reflected value must be >= 0")
    r_prev, x = float(r_prev), float(x)
    if x <= r_prev:
        return r_prev - x, 0.0 - x
    return 0.0, 0.0 - r_prev


def _recursion(units: np.ndarray):
    r = 0
    rec, deltas = [], []
    for x in units.tolist():
        if x <= r:
            d = -x
        else:
            d = -r
        r = r + d
        rec.append(r)
        deltas.append(d)
    dtype = object if units.dtype == object else np.int64
    return np.array(rec, dtype=dtype), np.array(deltas, dtype=dtype)


def _build_path(units: np.ndarray, bits: int, stream_id) -> ReflectedPath:
    acc = _Accumulator()
    s, smax, r = acc.push(units)
    rec, deltas = _recursion(units)
    return ReflectedPath(
        steps=_units_to_float(units, bits),
        s=_units_to_float(s, bits),
        s_star=_units_to_float(smax, bits),
        reflected=_units_to_float(r, bits),
        stream_id=stream_id,
        bits=bits,
        steps_units=units,
        s_units=s,
        s_star_units=smax,
        reflected_units=r,
        recursion_units=rec,
        delta_units=deltas,
    )


def simulate_path(dist: StepDistribution, n_steps: int, stream: RngStream) -> ReflectedPath:
    """Materialize ``n_steps`` steps with S, S*, R computed both ways."""
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    units = dist.draw_units(stream, n_steps)
    return _build_path(units, GRID_BITS, (stream.master_seed, stream.stream_index))


def path_from_steps(steps: Iterable[float]) -> ReflectedPath:
    units, bits = steps_to_units(list(steps))
    if units.size == 0:
        raise DomainError("path needs at least one step")
    return _build_path(units, bits, None)


def _scan(blocks, kappa: float, rs, cap: int, bits: int) -> np.ndarray:
    """First exceedance index for each r (0 when none up to ``cap``)."""
    bounds = [Boundary(r, kappa) for r in rs]
    tau = np.zeros(len(bounds), dtype=np.int64)
    acc = _Accumulator()
    for start, units in blocks:
        _, _, r_units = acc.push(units)
        n = np.arange(start + 1, start + units.size + 1)
        for i, b in enumerate(bounds):
            if tau[i]:
                continue
            hit = r_units > b.thresholds(n, bits, r_units.dtype)
            if hit.any():
                tau[i] = start + 1 + int(np.argmax(hit))
        if tau.all():
            break
    return tau


def _stream_blocks(dist, stream, cap):
    for start, m in _block_sizes(cap):
        yield start, dist.draw_units(stream, m)


def passage_times(dist: StepDistribution, kappa: float, rs, cap: int,
                  stream: RngStream) -> np.ndarray:
    """tau_kappa(r) for several r on one path; 0 marks censoring at ``cap``.

    Steps are drawn in growing blocks and only the running ``(S, S*)`` pair is
    carried between blocks.
    """
    if cap < 1:
        raise DomainError("cap must be >= 1")
    return _scan(_stream_blocks(dist, stream, cap), kappa, rs, cap, GRID_BITS)


def _outcome(tau: int, boundary: Boundary, cap: int, r_value) -> PassageOutcome:
    if tau == 0:
        return PassageOutcome("censored", cap)
    return PassageOutcome("finite", tau, r_value, boundary.value(tau))


def passage_time(dist: StepDistribution, boundary: Boundary, cap: int,
                 stream: RngStream) -> PassageOutcome:
    """First ``n`` in ``[1, cap]`` with ``R_n > r n**kappa``, else ``Censored(cap)``."""
    if cap < 1:
        raise DomainError("cap must be >= 1")
    acc = _Accumulator()
    for start, m in _block_sizes(cap):
        units = dist.draw_units(stream, m)
        _, _, r_units = acc.push(units)
        n = np.arange(start + 1, start + m + 1)
        hit = r_units > boundary.thresholds(n, GRID_BITS, r_units.dtype)
        if hit.any():
            j = int(np.argmax(hit))
            rv = float(_units_to_float(r_units[j:j + 1], GRID_BITS)[0])
            return _outcome(start + 1 + j, boundary, cap, rv)
    return PassageOutcome("censored", cap)


def first_passage(steps: Iterable[float], boundary: Boundary) -> PassageOutcome:
    """Passage time along a fixed step sequence; censored at its length."""
    path = path_from_steps(steps)
    n = np.arange(1, path.n_steps + 1)
    hit = path.reflected_units > boundary.thresholds(n, path.bits, path.reflected_units.dtype)
    if hit.any():
        j = int(np.argmax(hit))
        return _outcome(j + 1, boundary, path.n_steps, float(path.reflected[j]))
    return PassageOutcome("censored", path.n_steps)


def ladder_decompose(path: ReflectedPath) -> LadderDecomposition:
    """Strict ascending ladder epochs and excursion depths of a path."""
    if path.n_steps == 0:
        raise DomainError("path must be nonempty")
    s = path.s_units.tolist()
    times = []
    depths = []
    record = 0          # S at the previous ladder epoch (T_0 = 0, S_0 = 0)
    deepest = 0         # max over the current excursion of record - S_j, j >= T_{k-1}
    for j, sj in enumerate(s, start=1):
        if sj > record:
            times.append(j)
            depths.append(deepest)
            record = sj
            deepest = 0
        else:
            deepest = max(deepest, record - sj)
    complete = bool(times) and times[-1] == path.n_steps
    scale = 2.0 ** -path.bits
    return LadderDecomposition(
        ladder_times=tuple(times),
        depths=tuple(math.ldexp(float(d), -path.bits) for d in depths),
        complete=complete,
        open_depth=0.0 if complete else float(deepest) * scale,
    )


def ladder_depth_units(path: ReflectedPath) -> list:
    """Exact integer depths D_k in path units, in ladder order."""
    s = path.s_units.tolist()
    out, record, deepest = [], 0, 0
    for sj in s:
        if sj > record:
            out.append(deepest)
            record, deepest = sj, 0
        else:
            deepest = max(deepest, record - sj)
    return out


def dual_reflect(steps: Iterable[float]) -> np.ndarray:
    """``r_n = S_n - min_{j<=n} S_j`` via the recursion ``r_n = max(r_{n-1} + X_n, 0)``."""
    units, bits = steps_to_units(list(steps))
    r = 0
    out = []
    for x in units.tolist():
        r = max(r + x, 0)
        out.append(r)
    return _units_to_float(np.array(out, dtype=object), bits)


def dual_reflect_definition(steps: Iterable[float]) -> np.ndarray:
    """``r_n`` computed as ``S_n - min(0, S_1, ..., S_n)``."""
    units, bits = steps_to_units(list(steps))
    s = np.cumsum(units.astype(object))
    smin = np.minimum.accumulate(np.concatenate([np.array([0], dtype=object), s]))[1:]
    return _units_to_float(s - smin, bits)


# ---------------------------------------------------------------------------
# batches of independent paths (validation harness)


def simulate_batch(dist: StepDistribution, n_steps: int, reps: int, stream: RngStream,
                   negate: bool = False) -> dict:
    """``reps`` independent paths of length ``n_steps`` drawn row by row from one stream.

    Returns float arrays of shape ``(reps, n_steps)``: ``s``, ``reflected``,
    ``dual`` (S - running min) and ``neg_min`` (-min_{j<=n} S_j).
    """
    x = dist.draw(stream, reps * n_steps).reshape(reps, n_steps)
    if negate:
        x = -x
    scaled = x * 2.0 ** GRID_BITS
    if np.max(np.abs(scaled)) * n_steps < _INT64_ROOM:
        u = scaled.astype(np.int64)
        zero = np.zeros((reps, 1), dtype=np.int64)
    else:
        u = np.array([[int(v) for v in row] for row in scaled], dtype=object)
        zero = np.zeros((reps, 1), dtype=object)
    s = np.cumsum(u, axis=1)
    s0 = np.concatenate([zero, s], axis=1)
    smax = np.maximum.accumulate(s0, axis=1)[:, 1:]
    smin = np.minimum.accumulate(s0, axis=1)[:, 1:]
    conv = (lambda a: np.ldexp(a.astype(np.float64), -GRID_BITS)) if u.dtype != object else \
        (lambda a: np.vectorize(lambda v: math.ldexp(float(v), -GRID_BITS), otypes=[float])(a))
    return {
        "s": conv(s),
        "reflected": conv(smax - s),
        "dual": conv(s - smin),
        "neg_min": conv(-smin),
    }
