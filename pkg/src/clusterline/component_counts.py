"""Distributions of cluster counts on an interval and on a circle.

Covers the probability mass function and moments of the number of complete
clusters on [0, L], the full-coverage probability, the incomplete-cluster
count (clusters touching the interval at all), and the cluster count on a
circle of circumference L.

All the pmf sums are alternating and are accumulated exactly with
math.fsum while tracking the total absolute term mass; when the implied
cancellation estimate exceeds 1e-9 a PrecisionWarning fires with the
estimate attached and the returned value is clamped to [0, 1]. The
documented double-precision validity regime is
lam * L * e^{-lam*eps} <= 30 with floor(L/eps) <= 60.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._pn import count_prob, count_prob_mp, floor_ratio
from .cluster_laws import ModelParams, cluster_length_law
from .errors import NormalizationError, PrecisionWarning
from .quadrature import PanelCdf, integrate_adaptive
from .special_fn import partial_exp_sum, stirling_row

_CANCEL_TOL = 1e-9
_TABLE_TOL = 1e-9
COVERAGE_MISMATCH_TOL = 1e-6


@dataclass(frozen=True)
class IntervalModel:
    """A deployment model together with the observed domain length."""

    params: ModelParams
    length: float

    def __post_init__(self):
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise ValueError(f"length must be positive and finite, got {self.length}")


@dataclass(frozen=True)
class DistributionTable:
    """Finite pmf over counts 0..support_max.

    tail_mass is 1 minus the summed probabilities and must be ~0; table
    builders raise NormalizationError when it is not.
    """

    support_max: int
    probs: tuple[float, ...]
    tail_mass: float


def _fsum_pair(terms: list, mags: list) -> tuple[float, float]:
    """Exact sums of terms and magnitudes; (nan, inf) on overflowed terms."""
    if not all(map(math.isfinite, terms)):
        return math.nan, math.inf
    return math.fsum(terms), math.fsum(mags)


def _finish_pmf(value: float, abs_sum: float, what: str, mp_eval=None) -> float:
    """Stabilize an alternating pmf sum, then clamp to [0, 1].

    The cancellation estimate is working-epsilon * sum|term| / |value|,
    where sum|term| counts every intermediate magnitude the evaluation
    pushed through the significand. When the double-precision pass cannot
    guarantee ~1e-13 absolute and ~1e-10 relative accuracy, the sum is
    re-evaluated at escalating precision (30, 60, 120 digits). A
    PrecisionWarning carrying the final estimate fires only if the
    deepest pass still sits above the 1e-9 reliability threshold; the
    value is clamped either way.
    """
    eps_work = math.ulp(1.0)
    if math.isfinite(value) and math.isfinite(abs_sum):
        estimate = eps_work * abs_sum / max(abs(value), 1e-300)
    else:
        estimate = math.inf
    if mp_eval is not None and math.isfinite(value):
        if estimate > 1e-10 or eps_work * abs_sum > 1e-13:
            for dps in (30, 60, 120):
                value, abs_sum = mp_eval(dps)
                eps_work = 10.0 ** (1 - dps)
                estimate = eps_work * abs_sum / max(abs(value), 1e-300)
                if estimate <= 1e-10 and eps_work * abs_sum <= 1e-13:
                    break
    if not math.isfinite(value) or estimate > _CANCEL_TOL:
        warnings.warn(
            PrecisionWarning(
                f"{what}: cancellation estimate {estimate:.3e} exceeds {_CANCEL_TOL:.0e}; "
                "value clamped but unreliable",
                estimate=estimate,
            ),
            stacklevel=3,
        )
    if not math.isfinite(value):
        return math.nan
    return min(1.0, max(0.0, value))


def pmf_complete(model: IntervalModel, n: int) -> float:
    """Probability of exactly n complete clusters on [0, length].

    A cluster is complete when its span (last point plus one radius) ends
    inside the interval. Zero for n above floor(length / radius).
    """
    if n < 0:
        raise ValueError(f"count must be non-negative, got {n}")
    lam, eps = model.params.intensity, model.params.radius
    value, abs_sum = count_prob(lam, eps, model.length, n)
    return _finish_pmf(
        value,
        abs_sum,
        f"pmf_complete(n={n})",
        mp_eval=lambda dps: count_prob_mp(lam, eps, model.length, n, dps),
    )


def pmf_incomplete(model: IntervalModel, n: int) -> float:
    """Probability of exactly n incomplete clusters on [0, length].

    A cluster counts as soon as any of its points lies in the interval,
    so the support extends one step past the complete-count bound.
    """
    if n < 0:
        raise ValueError(f"count must be non-negative, got {n}")
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    upper = floor_ratio(L, eps) + 1
    if n > upper:
        return 0.0

    values, masses = _incomplete_g_table(lam, eps, L, upper)
    terms = []
    mags = []
    for i in range(n, upper + 1):
        comb = math.comb(i, n)
        t = comb * (values[i] + values[i + 1])  # slot i holds G(i-1)
        terms.append(-t if (i + n) % 2 else t)
        mags.append(comb * (masses[i] + masses[i + 1]))
    value = math.fsum(terms)
    return _finish_pmf(
        value,
        math.fsum(mags),
        f"pmf_incomplete(n={n})",
        mp_eval=lambda dps: _incomplete_mp(lam, eps, L, n, upper, dps),
    )


@lru_cache(maxsize=128)
def _incomplete_g_table(lam: float, eps: float, L: float, upper: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Signed incomplete-count summands G(-1)..G(upper), index shifted by 1.

    Alongside each value comes the magnitude its evaluation pushed through
    the significand: the exponential partial sum cancels internally, so
    its positive-argument twin measures the working mass.
    """
    empty = math.exp(-lam * L)
    values = [empty]
    masses = [empty]
    for k in range(upper + 1):
        if not L > k * eps:
            values.append(0.0)
            masses.append(0.0)
            continue
        y = lam * (k * eps - L)
        damp = math.exp(-k * lam * eps)
        val = damp * partial_exp_sum(k, y) - empty
        values.append(-val if k % 2 else val)
        masses.append(damp * partial_exp_sum(k, abs(y)) + empty)
    return tuple(values), tuple(masses)


@lru_cache(maxsize=16)
def _incomplete_g_table_mp(lam: float, eps: float, L: float, upper: int, dps: int) -> tuple:
    """Extended-precision twin of _incomplete_g_table (values only)."""
    import mpmath as mp

    with mp.workdps(dps):
        lam_mp, eps_mp, len_mp = mp.mpf(lam), mp.mpf(eps), mp.mpf(L)
        empty = mp.exp(-lam_mp * len_mp)
        values = [empty]
        for k in range(upper + 1):
            if not L > k * eps:
                values.append(mp.mpf(0))
                continue
            y = lam_mp * (k * eps_mp - len_mp)
            partial = mp.mpf(1)
            term = mp.mpf(1)
            for j in range(1, k + 1):
                term *= y / j
                partial += term
            val = mp.exp(-k * lam_mp * eps_mp) * partial - empty
            values.append(-val if k % 2 else val)
        return tuple(values)


def _incomplete_mp(lam: float, eps: float, L: float, n: int, upper: int, dps: int) -> tuple[float, float]:
    """Extended-precision re-evaluation of the incomplete-count pmf."""
    import mpmath as mp

    values = _incomplete_g_table_mp(lam, eps, L, upper, dps)
    with mp.workdps(dps):
        total = mp.mpf(0)
        mass = mp.mpf(0)
        for i in range(n, upper + 1):
            t = math.comb(i, n) * (values[i] + values[i + 1])
            signed = -t if (i + n) % 2 else t
            total += signed
            mass += abs(signed)
        cap = mp.mpf("1e300")
        return float(total), float(min(mass, cap))


def pmf_circle(model: IntervalModel, n: int) -> float:
    """Probability of exactly n disjoint covered arcs on a circle.

    length is read as the circumference. The count is zero both for an
    empty circle and when a single cluster wraps the whole circle. The
    law is

        (lam e^{-lam eps} / n!) * sum_i ((-1)^i / i!)
            * L * ([L - (n+i) eps] lam e^{-lam eps})^{n+i-1}

    over i with (n+i) eps < L, where the (n+i) = 0 summand is defined by
    its algebraic limit (exactly 1 after the prefactor) and absorbs the
    empty-circle mass. This form is derived by mixing the classical
    circular-spacings count over the Poisson point total and is validated
    against simulation; it telescopes to total mass 1 exactly.
    """
    if n < 0:
        raise ValueError(f"count must be non-negative, got {n}")
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    i_max = floor_ratio(L, eps) - n
    if i_max < 0:
        return 0.0
    a = lam * math.exp(-eps * lam)
    prefactor = a / float(math.factorial(n)) if n <= 170 else a * math.exp(-math.lgamma(n + 1))
    terms = []
    mags = []
    for i in range(i_max + 1):
        k = n + i
        if k == 0:
            body = 1.0 / a  # algebraic limit of L b^{-1}: exactly 1 after prefactor
        else:
            b = (L - k * eps) * a
            try:
                body = b ** (k - 1) * L
            except OverflowError:
                body = math.inf
        inv_ifact = 1.0 / float(math.factorial(i)) if i <= 170 else math.exp(-math.lgamma(i + 1))
        t = prefactor * inv_ifact * body
        terms.append(-t if i % 2 else t)
        mags.append(abs(t))
    value, mass = _fsum_pair(terms, mags)
    return _finish_pmf(
        value,
        mass,
        f"pmf_circle(n={n})",
        mp_eval=lambda dps: _circle_mp(lam, eps, L, n, i_max, dps),
    )


def _circle_mp(lam: float, eps: float, L: float, n: int, i_max: int, dps: int) -> tuple[float, float]:
    """Extended-precision re-evaluation of the circle-count pmf."""
    import mpmath as mp

    with mp.workdps(dps):
        lam_mp, eps_mp, len_mp = mp.mpf(lam), mp.mpf(eps), mp.mpf(L)
        a = lam_mp * mp.exp(-eps_mp * lam_mp)
        prefactor = a / mp.factorial(n)
        total = mp.mpf(0)
        mass = mp.mpf(0)
        for i in range(i_max + 1):
            k = n + i
            if k == 0:
                body = 1 / a
            else:
                b = (len_mp - k * eps_mp) * a
                body = b ** (k - 1) * len_mp
            t = prefactor * body / mp.factorial(i)
            total += -t if i % 2 else t
            mass += abs(t)
        cap = mp.mpf("1e300")
        return float(total), float(min(mass, cap))


def _build_table(pmf, support_max: int, what: str) -> DistributionTable:
    probs = []
    cum = 0.0
    zero_run = 0
    for n in range(support_max + 1):
        p = pmf(n)
        probs.append(p)
        cum += p
        # once the mass is exhausted the remaining entries are all zero
        zero_run = zero_run + 1 if p == 0.0 else 0
        if zero_run >= 3 and cum >= 1.0 - 1e-13:
            probs.extend([0.0] * (support_max - n))
            break
    tail = 1.0 - math.fsum(probs)
    if not abs(tail) <= _TABLE_TOL:
        raise NormalizationError(
            f"{what} table off normalization by {tail:.3e} (tolerance {_TABLE_TOL:.0e}); "
            "model is outside the stable evaluation regime"
        )
    return DistributionTable(support_max=support_max, probs=tuple(probs), tail_mass=tail)


def pmf_complete_table(model: IntervalModel) -> DistributionTable:
    """Full complete-count pmf for n = 0..floor(length / radius).

    Raises:
        NormalizationError: If the table misses normalization by more
            than 1e-9, signalling the unstable evaluation regime.
    """
    support = floor_ratio(model.length, model.params.radius)
    return _build_table(lambda n: pmf_complete(model, n), support, "complete-count")


def pmf_incomplete_table(model: IntervalModel) -> DistributionTable:
    """Full incomplete-count pmf for n = 0..floor(length / radius) + 1."""
    support = floor_ratio(model.length, model.params.radius) + 1
    return _build_table(lambda n: pmf_incomplete(model, n), support, "incomplete-count")


def pmf_circle_table(model: IntervalModel) -> DistributionTable:
    """Full circle-count pmf for n = 0..floor(length / radius)."""
    support = floor_ratio(model.length, model.params.radius)
    return _build_table(lambda n: pmf_circle(model, n), support, "circle-count")


def moment_complete(model: IntervalModel, m: int) -> float:
    """m-th raw moment of the complete-cluster count, 1 <= m <= 64.

    Stirling numbers enter as exact integers and become floats only at
    the final multiply, so the alternating structure cannot inherit
    integer overflow.
    """
    if m < 1:
        raise ValueError(f"moment order must be positive, got {m}")
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    a = lam * math.exp(-eps * lam)
    row = stirling_row(m)
    terms = []
    for k in range(1, m + 1):
        if not L > k * eps:
            break
        try:
            terms.append(float(row.values[k]) * ((L - k * eps) * a) ** k)
        except OverflowError:
            terms.append(math.inf)
    return math.fsum(terms)


def mean_complete(model: IntervalModel) -> float:
    """Mean complete-cluster count, (L - eps) lam e^{-lam eps} for L > eps."""
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    if not L > eps:
        return 0.0
    return (L - eps) * lam * math.exp(-eps * lam)


def var_complete(model: IntervalModel) -> float:
    """Variance of the complete-cluster count.

    Uses the compact closed form for L > 2 eps and the indicator form of
    the second moment otherwise; the two agree where both apply.
    """
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    if not L > eps:
        return 0.0
    mean = mean_complete(model)
    if L > 2.0 * eps:
        return mean + eps * (3.0 * eps - 2.0 * L) * lam**2 * math.exp(-2.0 * eps * lam)
    return mean * (1.0 - mean)


def mean_peak(model: IntervalModel) -> tuple[float, float]:
    """Intensity maximizing the mean count, and the maximum value.

    The peak sits where the mean inter-point gap equals the radius:
    intensity 1/eps, value (L/eps - 1) e^{-1}.

    Raises:
        ValueError: If length <= radius (the mean is identically zero).
    """
    eps = model.params.radius
    L = model.length
    if not L > eps:
        raise ValueError(f"no interior maximum: length {L} <= radius {eps}")
    return 1.0 / eps, (L / eps - 1.0) * math.exp(-1.0)


def _bisect(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if (flo <= 0.0) == (fm <= 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def var_critical_points(model: IntervalModel) -> tuple[float, ...]:
    """All critical intensities of the count variance, ascending.

    1/eps is always critical. For L > 2 eps two further roots of
    lam e^{-lam eps} = (L - eps) / (2 eps (2L - 3 eps)) may exist, one on
    each side of 1/eps; they disappear when the right-hand side exceeds
    the peak value e^{-1}/eps. Roots are located by bracketed bisection
    to 1e-10 on the intensity.
    """
    eps = model.params.radius
    L = model.length
    center = 1.0 / eps
    if not L > 2.0 * eps:
        return (center,)
    rhs = (L - eps) / (2.0 * eps * (2.0 * L - 3.0 * eps))
    peak = math.exp(-1.0) / eps
    if rhs >= peak * (1.0 - 1e-12):
        return (center,)

    def f(lam: float) -> float:
        return lam * math.exp(-lam * eps) - rhs

    low = _bisect(f, 1e-300, center)
    hi = center * 2.0
    while f(hi) > 0.0:
        hi *= 2.0
    high = _bisect(f, center, hi)
    return (low, center, high)


def coverage_prob(model: IntervalModel) -> float:
    """Probability that [0, L] is fully covered. Authoritative value.

    Integrates lam e^{-lam x} P(first cluster span >= L - x) over the
    first-point position x in [0, radius] by adaptive quadrature at
    absolute tolerance 1e-10. The span survival combines the atom at the
    radius with the integrated density of the span law; it is evaluated
    from the complementary CDF, whose truncation error is checked against
    the captured-mass identity inside the CDF builder.

    Raises:
        QuadratureError: If the adaptive integration cannot converge.
    """
    lam, eps = model.params.intensity, model.params.radius
    L = model.length
    if L <= eps:
        # span >= radius >= L - x for every first-point position in [0, eps],
        # so the survival factor is identically 1
        value, _, _ = integrate_adaptive(
            lambda xs: lam * np.exp(-lam * xs), 0.0, eps, abs_tol=1e-10
        )
        return min(1.0, max(0.0, value))

    # survival of the span needs only [radius, L]: complement of the
    # density mass below t plus the atom (total mass 1 is an identity of
    # the law, cross-checked by its own tests)
    law = cluster_length_law(model.params)
    lattice = [eps + k * eps for k in range(1, floor_ratio(L, eps) + 1)]
    partial = PanelCdf(law.density, eps, L, breakpoints=[t for t in lattice if t < L])

    def integrand(xs):
        t = L - xs
        below = np.where(t > eps, law.atom_mass + np.asarray(partial(t), dtype=float), 0.0)
        return lam * np.exp(-lam * xs) * (1.0 - below)

    cuts = [L - k * eps for k in range(1, floor_ratio(L, eps) + 2)]
    cuts = [c for c in cuts if 0.0 < c < eps]
    value, _, _ = integrate_adaptive(integrand, 0.0, eps, abs_tol=1e-10, breakpoints=cuts)
    return min(1.0, max(0.0, value))


def coverage_prob_closed(model: IntervalModel) -> float:
    """Experimental closed-form coverage value.

    Evaluates the printed finite-sum combination

        R_{0,1}(L) - e^{-lam eps} R_{0,1}(L - eps)
        - e^{-lam eps} R_{1,0}(L) + e^{-2 lam eps} R_{1,0}(L - eps)

    with R_{m,n}(x) = sum_{i=m}^{floor(x/eps)-1} e^{-lam eps (i+n)}
    * partial_exp_sum(i+n, lam ((1-i) eps - x)). The inner argument's sign
    is dubious, so this value is cross-checked against coverage_prob and
    reported with a mismatch flag rather than trusted.
    """
    lam, eps = model.params.intensity, model.params.radius
    L = model.length

    def r(m: int, n: int, x: float) -> float:
        upper = floor_ratio(x, eps) - 1 if x > 0 else -1
        terms = [
            math.exp(-lam * eps * (i + n)) * partial_exp_sum(i + n, lam * ((1 - i) * eps - x))
            for i in range(m, upper + 1)
        ]
        return math.fsum(terms)

    damp = math.exp(-lam * eps)
    return (
        r(0, 1, L)
        - damp * r(0, 1, L - eps)
        - damp * r(1, 0, L)
        + damp * damp * r(1, 0, L - eps)
    )


@dataclass(frozen=True)
class CoverageReport:
    """Authoritative coverage value next to the experimental closed form."""

    quadrature: float
    closed_form: float
    mismatch: bool


def coverage_report(model: IntervalModel) -> CoverageReport:
    """Both coverage routes plus the mismatch flag (|difference| > 1e-6)."""
    quad = coverage_prob(model)
    closed = coverage_prob_closed(model)
    return CoverageReport(
        quadrature=quad,
        closed_form=closed,
        mismatch=not abs(quad - closed) <= COVERAGE_MISMATCH_TOL,
    )
