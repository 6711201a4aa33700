"""Finiteness criteria for passage of the reflected walk over ``r n**kappa``.

The quantities here are functionals of the step law:

* ``A+(x)``: the integrated positive tail ``int_0^x P(X > y) dy``;
* ``J-``: the negative-side integral ``int x |dF(-x)| / A+(x)``;
* ``W(y)``: a truncated second moment of ``X+``;
* ``I_kappa(lambda)`` and its critical value ``lambda*``;
* the ``kappa > 1`` integral against ``|dF(-x)|`` with integrand
  ``x**(1/kappa) / (1 + x**(1/kappa - 1) A+(x))``.

Each finiteness question is answered analytically when the tail metadata of
the family settles it (every catalogued family has either a light tail or a
pure power tail on each side), and otherwise by a labelled growth heuristic
over truncated integrals at geometric cutoffs.

:func:`classify` combines these into the verdicts on passage, on the upper
limit of ``R_n / n**kappa`` and on the lower limit of ``S_n / n**kappa``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distributions import MomentStatus, StepDistribution, moment_order_check
from .errors import DomainError, PreconditionViolation
from .quadrature import integrate_1d

INF = math.inf

CLAUSES = ("2.2", "2.3", "2.8", "2.9", "2.10", "2.11", "2.12", "2.13", "T2.1a")

# growth heuristic settings
N_CUTOFFS = 24
REL_STABLE = 1e-6
STABLE_RUN = 4
GROWTH_FACTOR = 10.0
SLOPE_WINDOW = 8
SLOPE_DIVERGENT = -0.1


class Verdict(str, enum.Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"
    UNDETERMINED = "Undetermined"

    def negate(self) -> "Verdict":
        if self is Verdict.FINITE:
            return Verdict.INFINITE
        if self is Verdict.INFINITE:
            return Verdict.FINITE
        return self


class Source(str, enum.Enum):
    ANALYTIC = "Analytic"
    NUMERIC = "NumericHeuristic"


@dataclass(frozen=True)
class FinitenessVerdict:
    verdict: Verdict
    evidence: dict
    source: Source

    def to_dict(self):
        return {"verdict": self.verdict.value, "evidence": _plain(self.evidence),
                "source": self.source.value}


@dataclass(frozen=True)
class LambdaStar:
    """Critical parameter of the integral test, with how it was obtained."""

    value: float
    source: Source
    trace: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value": self.value, "source": self.source.value, "trace": _plain(self.trace)}


@dataclass(frozen=True)
class CriteriaReport:
    dist: str
    kappa: float
    tau_all_r_as_finite: FinitenessVerdict
    limsup_Rn_over_nk_finite: FinitenessVerdict
    liminf_Sn_over_nk_neg_infinite: FinitenessVerdict
    fired_clause: str
    kappa1_drift_threshold: Optional[float] = None
    r0_bound: Optional[float] = None
    liminf_clause: Optional[str] = None
    lambda_star: Optional[float] = None
    notes: tuple = ()

    def to_dict(self):
        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            out[k] = v.to_dict() if isinstance(v, FinitenessVerdict) else _plain(v)
        return out


def _plain(obj):
    """Turn numpy scalars, tuples and enums into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _analytic(verdict: Verdict, rule: str, **extra) -> FinitenessVerdict:
    return FinitenessVerdict(verdict, {"rule": rule, **extra}, Source.ANALYTIC)


# ---------------------------------------------------------------------------
# A+ and W


def _jumps(dist: StepDistribution, lo: float, hi: float):
    """Jump and kink points inside ``(lo, hi)`` plus powers of two.

    The powers of two keep adaptive quadrature from sampling only the flat
    far end of a long range whose integrand lives near the origin.
    """
    pts = list(dist.breakpoints) + [a for a, _ in dist.atoms]
    if math.isfinite(hi):
        k = -10
        while 2.0 ** k < hi:
            pts.append(2.0 ** k)
            k += 1
    return sorted(set(p for p in pts if lo < p < hi))


def a_plus(dist: StepDistribution, x: float, method: str = "quadrature") -> float:
    """``int_0^x P(X > y) dy``; ``x = inf`` gives ``E X+``.

    ``method="quadrature"`` integrates the tail adaptively (split at jumps);
    ``method="closed"`` uses the by-parts identity with closed-form moments.
    """
    if not x >= 0:
        raise DomainError("a_plus needs x >= 0")
    if x == 0:
        return 0.0
    if method == "closed":
        return float(dist.integrated_tail(0.0, x))
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    if math.isinf(x) and not _pos_mean_finite(dist):
        return INF
    return integrate_1d(lambda y: float(dist.tail(y)), 0.0, x, _jumps(dist, 0.0, x))


def a_plus_ratio(dist: StepDistribution, x: float) -> float:
    """``A+(x) / x`` with its limiting value ``1 - F(0)`` at ``x = 0``."""
    if x == 0:
        return 1.0 - float(dist.cdf(0.0))
    return a_plus(dist, x, method="closed") / x


def _pos_mean_finite(dist: StepDistribution) -> bool:
    md = dist.metadata
    return md.pos_moment_order_sup > 1.0


def w_func(dist: StepDistribution, y: float, form: str = "closed") -> float:
    """Truncated second moment ``W(y)`` of the positive part.

    ``form="closed"`` evaluates ``y E[X; X > y] + E[X^2; 0 <= X <= y]``;
    ``form="quadrature"`` integrates ``z -> E[X; X > z]`` over ``[0, y]``.
    """
    if not y >= 0:
        raise DomainError("w_func needs y >= 0")
    if not _pos_mean_finite(dist):
        raise PreconditionViolation("W is defined only when E X+ is finite")
    if y == 0:
        return 0.0
    if form == "closed":
        if math.isinf(y):
            return float(dist.upper_moment(2, 0.0))
        return y * float(dist.upper_moment(1, y)) + dist.partial_moment(2, 0.0, y)
    if form != "quadrature":
        raise DomainError(f"unknown form {form!r}")
    return integrate_1d(lambda z: float(dist.upper_moment(1, z)), 0.0, y, _jumps(dist, 0.0, y))


# ---------------------------------------------------------------------------
# growth heuristic over truncated integrals


def growth_verdict(cutoffs, partials) -> FinitenessVerdict:
    """Label a sequence of truncated integrals as converging or diverging.

    Finite when the last few increments are negligible relative to the total;
    Infinite when increments never shrink and the total grew tenfold, or when
    the increments decay too slowly to be summable (log2-increment slope per
    doubling of the cutoff at least ``SLOPE_DIVERGENT``); else Undetermined.
    """
    partials = np.asarray(partials, dtype=float)
    inc = np.diff(partials)
    total = partials[-1]
    evidence = {"cutoffs": list(map(float, cutoffs)), "partials": partials.tolist()}
    if not np.all(np.isfinite(partials)):
        evidence["rule"] = "truncated integral overflowed"
        return FinitenessVerdict(Verdict.INFINITE, evidence, Source.NUMERIC)
    if np.all(np.abs(inc[-STABLE_RUN:]) <= REL_STABLE * abs(total)):
        evidence["rule"] = "last increments below relative 1e-6"
        return FinitenessVerdict(Verdict.FINITE, evidence, Source.NUMERIC)
    first = partials[0] if partials[0] > 0 else (partials[partials > 0][0] if np.any(partials > 0) else 0.0)
    if np.all(np.diff(inc) >= 0) and first > 0 and total > GROWTH_FACTOR * first:
        evidence["rule"] = "nondecreasing increments and tenfold growth"
        return FinitenessVerdict(Verdict.INFINITE, evidence, Source.NUMERIC)
    tail_inc = inc[-SLOPE_WINDOW:]
    if np.all(tail_inc > 0):
        slope = float(np.polyfit(np.arange(tail_inc.size), np.log2(tail_inc), 1)[0])
        evidence["slope"] = slope
        if slope >= SLOPE_DIVERGENT:
            evidence["rule"] = "increments decay too slowly to be summable"
            return FinitenessVerdict(Verdict.INFINITE, evidence, Source.NUMERIC)
    evidence["rule"] = "no decision"
    return FinitenessVerdict(Verdict.UNDETERMINED, evidence, Source.NUMERIC)


def _negative_side_partials(dist: StepDistribution, weight, x1: float, start: float):
    """Truncated ``int_start^X weight(x) |dF(-x)|`` at ``X = 2^k x1``, k = 1..N."""
    cutoffs = [x1 * 2.0 ** k for k in range(1, N_CUTOFFS + 1)]
    atoms = [(-a, m) for a, m in dist.atoms if -a >= start and -a > 0]
    continuous = not dist.is_atomic
    edges = [start, *cutoffs]
    partials, acc = [], 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if continuous:
            acc += integrate_1d(lambda x: weight(x) * float(dist.pdf(-x)), lo, hi,
                                sorted(-b for b in dist.breakpoints if lo < -b < hi))
        first_edge = lo == start
        acc += sum(weight(x) * m for x, m in atoms if (lo <= x if first_edge else lo < x) and x <= hi)
        partials.append(acc)
    return cutoffs, partials


# ---------------------------------------------------------------------------
# power-tail rules


def _indices(dist: StepDistribution):
    """(negative tail index, positive tail index); ``inf`` for a light tail."""
    md = dist.metadata
    return md.neg_moment_order_sup, md.pos_moment_order_sup


def _analytic_tails(dist: StepDistribution) -> bool:
    """Each side of the law is either light or exactly power-law."""
    a, b = _indices(dist)
    md = dist.metadata
    return ((math.isinf(a) or md.neg_moment_at_sup_finite is False)
            and (math.isinf(b) or md.pos_moment_at_sup_finite is False))


def _j_minus_rule(dist: StepDistribution) -> Optional[FinitenessVerdict]:
    if not _analytic_tails(dist):
        return None
    a, b = _indices(dist)
    if a > 1.0:
        return _analytic(Verdict.FINITE, "E X- finite and A+ bounded below away from 0",
                         neg_index=a, pos_index=b)
    if b > 1.0:
        return _analytic(Verdict.INFINITE, "E X- infinite while A+ stays below E X+",
                         neg_index=a, pos_index=b)
    verdict = Verdict.INFINITE if a <= b else Verdict.FINITE
    return _analytic(verdict, "both means infinite: integrand ~ x^(b-1-a), diverges iff a <= b",
                     neg_index=a, pos_index=b)


def j_minus(dist: StepDistribution, method: str = "auto") -> FinitenessVerdict:
    """Finiteness of ``J- = int_0^inf x |dF(-x)| / A+(x)``.

    ``method``: ``"auto"`` (analytic when the tails decide it), ``"analytic"``
    or ``"numeric"``.
    """
    if method in ("auto", "analytic"):
        rule = _j_minus_rule(dist)
        if rule is not None:
            return rule
        if method == "analytic":
            return _analytic(Verdict.UNDETERMINED, "tail metadata does not decide J-")
    elif method != "numeric":
        raise DomainError(f"unknown method {method!r}")

    def weight(x):
        return 1.0 / a_plus_ratio(dist, x)

    cutoffs, partials = _negative_side_partials(dist, weight, 1.0, 0.0)
    return growth_verdict(cutoffs, partials)


def erickson_integral(dist: StepDistribution, kappa: float, method: str = "auto") -> FinitenessVerdict:
    """Finiteness of ``int_[1,inf) x^(1/k) / (1 + x^(1/k - 1) A+(x)) |dF(-x)|`` for ``kappa > 1``."""
    if not kappa > 1:
        raise PreconditionViolation("this integral is used only for kappa > 1")
    p = 1.0 / kappa
    if method in ("auto", "analytic"):
        status = moment_order_check(dist, p, "neg")
        if status is MomentStatus.FINITE:
            return _analytic(Verdict.FINITE, "E(X-)^(1/kappa) finite bounds the integrand", order=p)
        if _analytic_tails(dist):
            a, b = _indices(dist)
            verdict = Verdict.INFINITE if b >= a else Verdict.FINITE
            return _analytic(verdict, "power tails with E(X-)^(1/kappa) infinite: diverges iff pos index >= neg index",
                             neg_index=a, pos_index=b, order=p)
        if method == "analytic":
            return _analytic(Verdict.UNDETERMINED, "tail metadata does not decide the integral")
    elif method != "numeric":
        raise DomainError(f"unknown method {method!r}")

    def weight(x):
        return x ** p / (1.0 + x ** (p - 1.0) * a_plus(dist, x, method="closed"))

    cutoffs, partials = _negative_side_partials(dist, weight, 1.0, 1.0)
    return growth_verdict(cutoffs, partials)


# ---------------------------------------------------------------------------
# I_kappa and lambda*


def _check_kappa_mid(kappa):
    if not 0.5 < kappa < 1.0:
        raise PreconditionViolation("needs 1/2 < kappa < 1")


def _log_g(dist: StepDistribution, kappa: float, log_y: float) -> float:
    """log G(y) with G(y) = (y^((2k-1)/k) / W(y))^(k/(1-k))."""
    w = w_func(dist, math.exp(log_y))
    if not w > 0:
        raise PreconditionViolation("W(y) must be positive for y > 0")
    return kappa / (1.0 - kappa) * ((2.0 * kappa - 1.0) / kappa * log_y - math.log(w))


def i_kappa(dist: StepDistribution, kappa: float, lam: float, cutoff: float) -> float:
    """``int_1^cutoff exp(-lam G(y)) dy / y`` integrated in ``u = log y``."""
    _check_kappa_mid(kappa)
    if not lam > 0:
        raise PreconditionViolation("lambda must be > 0")
    if not cutoff > 1:
        raise PreconditionViolation("cutoff must be > 1")
    if not _pos_mean_finite(dist):
        raise PreconditionViolation("needs E X+ finite")

    def integrand(u):
        lg = _log_g(dist, kappa, u)
        return math.exp(-lam * math.exp(lg)) if lg < 700 else 0.0

    top = math.log(cutoff)
    edges = list(np.arange(0.0, top, math.log(2.0))) + [top]
    return sum(integrate_1d(integrand, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo)


LAMBDA_GRID = range(4, 201)
_TREND_RUN = 20


def lambda_star(dist: StepDistribution, kappa: float, method: str = "auto") -> LambdaStar:
    """Critical ``lambda`` at which ``I_kappa(lambda)`` turns finite.

    For power or light positive tails this is 0 when ``E(X+)^(1/kappa)`` is
    finite and ``inf`` otherwise.  The numeric route takes the upper limit of
    ``log log y / G(y)`` along ``y = 2^k``.
    """
    _check_kappa_mid(kappa)
    if not _pos_mean_finite(dist):
        raise PreconditionViolation("needs E X+ finite")
    p = 1.0 / kappa
    if method in ("auto", "analytic") and _analytic_tails(dist):
        status = moment_order_check(dist, p, "pos")
        finite = status is MomentStatus.FINITE
        value = 0.0 if finite else INF
        return LambdaStar(value, Source.ANALYTIC,
                          {"rule": "power or light positive tail: 0 iff E(X+)^(1/kappa) finite",
                           "pos_index": _indices(dist)[1], "order": p})
    if method not in ("auto", "numeric", "analytic"):
        raise DomainError(f"unknown method {method!r}")
    ks = np.array(list(LAMBDA_GRID))
    log_y = ks * math.log(2.0)
    log_ratio = np.array([math.log(math.log(ly)) - _log_g(dist, kappa, ly) for ly in log_y])
    trace = {"log2_y": ks.tolist(), "log_ratio": log_ratio.tolist()}
    steps = np.diff(log_ratio[-_TREND_RUN:])
    if np.all(steps < 0) and log_ratio[-1] < math.log(1e-8):
        value = 0.0
    elif np.all(steps > 0) and log_ratio[-1] > math.log(1e8):
        value = INF
    else:
        value = float(np.exp(np.max(log_ratio[len(log_ratio) // 2:])))
    return LambdaStar(value, Source.NUMERIC, trace)


def r0_bound(kappa: float, lambda_star_value: float) -> float:
    """Almost-sure bound ``9 2^k (6 lambda* 2^k)^(1-k)`` on ``limsup R_n / n^k``."""
    _check_kappa_mid(kappa)
    if not (0.0 <= lambda_star_value < INF):
        raise PreconditionViolation("lambda* must lie in [0, inf)")
    two_k = 2.0 ** kappa
    return 9.0 * two_k * (6.0 * lambda_star_value * two_k) ** (1.0 - kappa)


# ---------------------------------------------------------------------------
# classification


def _moment(dist: StepDistribution, p: float, side: str) -> Optional[bool]:
    """True/False for finite/infinite; None at the boundary order."""
    status = moment_order_check(dist, p, side)
    if status is MomentStatus.BOUNDARY:
        return None
    return status is MomentStatus.FINITE


def _from_bool(flag: Optional[bool], true_means: Verdict) -> Verdict:
    if flag is None:
        return Verdict.UNDETERMINED
    return true_means if flag else true_means.negate()


def _liminf(dist: StepDistribution, kappa: float, notes: list):
    """Verdict on ``liminf S_n / n^kappa = -inf`` and the clause that decided it.

    Returns ``(verdict, clause, evidence, source, lambda*)``.
    """
    md = dist.metadata
    p = 1.0 / kappa if kappa > 0 else INF
    if kappa > 1:
        v = erickson_integral(dist, kappa)
        return v.verdict, "2.8", v.evidence, v.source, None
    if kappa <= 0.5:
        if md.mean_abs_finite and md.mean <= 0:
            return (Verdict.INFINITE, "2.10",
                    {"rule": "E|X| finite and E X <= 0", "mean": md.mean}, Source.ANALYTIC, None)
        v = j_minus(dist)
        ev = dict(v.evidence, rule_clause="J- infinite (E X > 0 or E|X| infinite)")
        return v.verdict, "2.10", ev, v.source, None
    if kappa == 1 or not md.mean_abs_finite:
        v = j_minus(dist)
        return v.verdict, "2.9", v.evidence, v.source, None
    if md.mean != 0:
        verdict = Verdict.INFINITE if md.mean < 0 else Verdict.FINITE
        return verdict, "2.11", {"rule": "sign of E X", "mean": md.mean}, Source.ANALYTIC, None
    # zero drift, 1/2 < kappa < 1
    neg = _moment(dist, p, "neg")
    if neg is None:
        return (Verdict.UNDETERMINED, "2.12",
                {"rule": "E(X-)^(1/kappa) at the boundary order", "order": p}, Source.ANALYTIC, None)
    if not neg:
        return (Verdict.INFINITE, "2.12",
                {"rule": "E(X-)^(1/kappa) infinite", "order": p}, Source.ANALYTIC, None)
    pos = _moment(dist, p, "pos")
    if pos is None:
        return (Verdict.UNDETERMINED, "2.13",
                {"rule": "E(X+)^(1/kappa) at the boundary order", "order": p}, Source.ANALYTIC, None)
    if pos:
        notes.append("E|X|^(1/kappa) finite: S_n / n^kappa -> 0 a.s.")
        return (Verdict.FINITE, "2.13",
                {"rule": "E|X|^(1/kappa) finite", "order": p}, Source.ANALYTIC, None)
    ls = lambda_star(dist, kappa)
    if ls.value == 0.0:
        notes.append("lambda* = 0: liminf S_n / n^kappa = 0 a.s.")
    if ls.value == INF:
        verdict = Verdict.INFINITE
    elif ls.source is Source.ANALYTIC or ls.value == 0.0:
        verdict = Verdict.FINITE
    else:
        verdict = Verdict.FINITE
        notes.append("lambda* estimated numerically; finite positive estimate")
    ev = {"rule": "E(X-)^(1/kappa) finite, E(X+)^(1/kappa) infinite: decided by lambda*",
          "lambda_star": ls.to_dict()}
    return verdict, "2.13", ev, ls.source, ls.value


def classify(dist: StepDistribution, kappa: float) -> CriteriaReport:
    """Decide passage, upper-limit and lower-limit questions for ``(dist, kappa)``."""
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise DomainError("kappa must be a finite number >= 0")
    kappa = float(kappa)
    md = dist.metadata
    notes: list = []
    drift = None
    r0 = None
    lam = None

    if kappa == 0:
        tau = _analytic(Verdict.FINITE,
                        "flat boundary: the walk eventually makes r consecutive-step excursions, exponential moment")
        clause = "T2.1a"
        if md.mean_abs_finite and md.mean <= 0:
            liminf = _analytic(Verdict.INFINITE, "E|X| finite and E X <= 0", mean=md.mean)
        else:
            v = j_minus(dist)
            liminf = v
        liminf_clause = "2.10"
    elif kappa > 1:
        p = 1.0 / kappa
        neg = _moment(dist, p, "neg")
        tau = _analytic(_from_bool(neg, Verdict.INFINITE),
                        "steep boundary: finite for all r iff E(X-)^(1/kappa) infinite", order=p,
                        status=moment_order_check(dist, p, "neg").value)
        clause = "2.2"
        verdict, liminf_clause, ev, src, _ = _liminf(dist, kappa, notes)
        liminf = FinitenessVerdict(verdict, ev, src)
    else:
        p = 1.0 / kappa
        verdict, liminf_clause, ev, src, lam = _liminf(dist, kappa, notes)
        liminf = FinitenessVerdict(verdict, ev, src)
        neg = _moment(dist, p, "neg")
        if verdict is Verdict.INFINITE:
            tau = FinitenessVerdict(Verdict.FINITE, {"rule": "liminf S_n / n^kappa = -inf", "via": liminf_clause},
                                    src)
            clause = liminf_clause
        elif neg is False:
            tau = _analytic(Verdict.FINITE, "E(X-)^(1/kappa) infinite", order=p)
            clause = "2.3"
        elif verdict is Verdict.FINITE and neg is True:
            tau = FinitenessVerdict(Verdict.INFINITE,
                                    {"rule": "E(X-)^(1/kappa) finite and liminf S_n / n^kappa > -inf",
                                     "via": liminf_clause}, src)
            clause = liminf_clause
        else:
            tau = FinitenessVerdict(Verdict.UNDETERMINED,
                                    {"rule": "a sub-verdict is undetermined", "via": liminf_clause,
                                     "neg_moment": None if neg is None else bool(neg)}, src)
            clause = "2.3" if neg is None else liminf_clause
        if kappa == 1 and md.mean_abs_finite and md.mean < 0:
            drift = abs(md.mean)
            notes.append("E tau(r) finite for r < |E X|; P(tau(r) = inf) > 0 for r > |E X|")
        if (0.5 < kappa < 1 and md.mean_abs_finite and md.mean == 0
                and _moment(dist, p, "neg") is True and _moment(dist, p, "pos") is False
                and lam is not None and lam < INF):
            r0 = r0_bound(kappa, lam)

    limsup = FinitenessVerdict(tau.verdict.negate(), {"rule": "negation of the passage verdict"}, tau.source)
    return CriteriaReport(
        dist=dist.spec,
        kappa=kappa,
        tau_all_r_as_finite=tau,
        limsup_Rn_over_nk_finite=limsup,
        liminf_Sn_over_nk_neg_infinite=liminf,
        fired_clause=clause,
        kappa1_drift_threshold=drift,
        r0_bound=r0,
        liminf_clause=liminf_clause,
        lambda_star=lam,
        notes=tuple(notes),
    )
