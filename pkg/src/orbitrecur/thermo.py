"""Exact thermodynamic quantities for finite-alphabet systems.

Partition sums Z_n(t), Gurevich pressure of 2-block potentials, Renyi entropy
(three routes: closed form, squared-transition spectral radius, pressure
formula) and exact psi-mixing coefficients of Markov measures. These are the
oracles the empirical estimators are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CrossCheckError, DegenerateMeasureError, InvalidSystemError
from .symbolic import (
    BernoulliMeasure,
    GibbsMeasure,
    MarkovMeasure,
    MeasureSpec,
    TransitionSystem,
    _perron,
    stationary_distribution_exact,
    validate_system,
)

__all__ = [
    "PressureResult",
    "EntropyResult",
    "ZDecayResult",
    "transfer_matrix",
    "gurevich_pressure",
    "renyi_entropy_exact",
    "z_partition_sum",
    "z_partition_sum_log",
    "z_decay_check",
    "psi_mixing_exact",
    "psi_mixing_table",
]


@dataclass(frozen=True)
class PressureResult:
    """Log-scale pressure value with the method that produced it."""

    value: float
    method: str  # "spectral_radius" | "periodic_orbit_sum"
    iterations: int
    flagged: bool = False  # set when the system is not topologically mixing


@dataclass(frozen=True)
class EntropyResult:
    """Renyi entropy h2 >= 0 with alpha = h2 / 2."""

    h2: float
    alpha: float
    method: str  # "closed_form" | "q_matrix" | "pressure_formula"


def transfer_matrix(ts: TransitionSystem, potential) -> np.ndarray:
    """Weighted transfer matrix M_ab = A_ab exp(phi(a, b))."""
    phi = np.asarray(potential, dtype=np.float64)
    A = ts.admissible
    if phi.shape != A.shape:
        raise InvalidSystemError("potential table must match the transition matrix")
    if not np.all(np.isfinite(phi[A == 1])):
        raise InvalidSystemError("potential must be finite on admissible pairs")
    return np.where(A == 1, np.exp(phi), 0.0)


def _log_trace_power(M: np.ndarray, n: int) -> float:
    """log trace(M^n) with per-multiply normalization against overflow."""
    scale = 0.0
    acc = np.eye(M.shape[0])
    base = M.copy()
    base_scale = 0.0
    e = n
    while e:
        if e & 1:
            acc = acc @ base
            scale += base_scale
            m = acc.max()
            if m > 0:
                acc /= m
                scale += math.log(m)
        e >>= 1
        if e:
            base = base @ base
            base_scale *= 2
            m = base.max()
            if m > 0:
                base /= m
                base_scale += math.log(m)
    tr = float(np.trace(acc))
    if tr <= 0.0:
        return -math.inf
    return math.log(tr) + scale


def _pressure_periodic(M: np.ndarray, start_n: int = 40, tol: float = 1e-10,
                       max_n: int = 1 << 16) -> tuple[float, int]:
    """Pressure from closed-path sums: consecutive-trace log-ratio,
    with n doubled from start_n until the estimate stabilizes.

    trace(M^n) sums the potential weights over all closed admissible paths of
    length n, so this route never sees the spectral decomposition.
    """
    n = start_n
    prev = None
    while True:
        t_n = _log_trace_power(M, n)
        t_n1 = _log_trace_power(M, n + 1)
        est = t_n1 - t_n
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return est, n
        if n >= max_n:
            return est, n
        prev = est
        n *= 2


def gurevich_pressure(ts: TransitionSystem, potential, method: str = "spectral_radius",
                      cross_check_tol: float = 1e-6) -> PressureResult:
    """Growth rate of potential-weighted closed-path sums.

    For a 2-block potential the n-step sum with fixed start symbol a is
    (M^n)_aa, so the pressure is log of the Perron root of M. Both the power
    iteration route and the periodic-orbit (trace) route are computed and must
    agree within cross_check_tol. A non-mixing system still yields the
    spectral radius but the result is flagged.
    """
    M = transfer_matrix(ts, potential)
    diag = validate_system(ts)
    flagged = not diag.mixing
    lam, _, _, iters = _perron(M, tol=1e-13, max_iter=100_000)
    if lam <= 0:
        raise InvalidSystemError("transfer matrix has non-positive spectral radius")
    spectral = math.log(lam)
    if flagged:
        # closed-path traces vanish along non-multiples of the period, so
        # only the spectral route is available; result carries the flag
        if method == "periodic_orbit_sum":
            raise ValueError("periodic-orbit sums need a topologically mixing system")
        return PressureResult(spectral, "spectral_radius", iters, True)
    periodic, n_used = _pressure_periodic(M)
    if abs(spectral - periodic) > cross_check_tol:
        raise CrossCheckError(
            f"pressure methods disagree: spectral {spectral!r} vs periodic {periodic!r}"
        )
    if method == "spectral_radius":
        return PressureResult(spectral, method, iters, flagged)
    if method == "periodic_orbit_sum":
        return PressureResult(periodic, method, n_used, flagged)
    raise ValueError(f"unknown method {method!r}")


def _log_potential(m: MarkovMeasure) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(m.P > 0, np.log(np.where(m.P > 0, m.P, 1.0)), -np.inf)


def renyi_entropy_exact(m: MeasureSpec) -> EntropyResult:
    """Exact Renyi entropy of the measure.

    Bernoulli: -log sum p_i^2 (collision form). Markov: -log of the Perron
    root of Q, Q_ij = P_ij^2 (from Z_n(1) = (pi*pi)^T Q^(n-1) 1). 2-block
    Gibbs: pressure formula 2 P(phi) - P(2 phi). Whenever two routes apply
    they are compared to 1e-10.
    """
    if m.degenerate:
        raise DegenerateMeasureError("measure has an unreachable or zero-mass state")
    if isinstance(m, BernoulliMeasure):
        h2 = -math.log(float(np.sum(m.weights**2)))
        return EntropyResult(h2, h2 / 2.0, "closed_form")
    if isinstance(m, MarkovMeasure):
        Q = m.P**2
        lam_q, _, _, _ = _perron(Q, tol=1e-13)
        h2 = -math.log(lam_q)
        ts = m.system
        phi = _log_potential(m)
        p1 = gurevich_pressure(ts, phi).value
        p2 = gurevich_pressure(ts, 2.0 * phi).value
        h2_pressure = 2.0 * p1 - p2
        if abs(h2 - h2_pressure) > 1e-10:
            raise CrossCheckError(
                f"entropy routes disagree: q_matrix {h2!r} vs pressure {h2_pressure!r}"
            )
        return EntropyResult(h2, h2 / 2.0, "q_matrix")
    if isinstance(m, GibbsMeasure):
        phi = m.potential
        p1 = gurevich_pressure(m.system, phi).value
        p2 = gurevich_pressure(m.system, 2.0 * phi).value
        h2 = 2.0 * p1 - p2
        induced = m.as_markov()
        lam_q, _, _, _ = _perron(induced.P**2, tol=1e-13)
        if abs(h2 - (-math.log(lam_q))) > 1e-10:
            raise CrossCheckError("pressure formula disagrees with induced q_matrix route")
        return EntropyResult(h2, h2 / 2.0, "pressure_formula")
    raise TypeError(f"unsupported measure {type(m).__name__}")


def z_partition_sum_log(m: MeasureSpec, n: int, t: float) -> float:
    """log Z_n(t) = log sum over admissible n-words of mu(word)^(1+t)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    if isinstance(m, BernoulliMeasure):
        w = m.weights[m.weights > 0]
        return n * math.log(float(np.sum(w ** (1.0 + t))))
    mk = m.as_markov()
    pos = mk.pi > 0
    v = np.where(pos, mk.pi, 1.0) ** (1.0 + t) * pos
    W = mk.P ** (1.0 + t)
    scale = 0.0
    for _ in range(n - 1):
        v = v @ W
        mx = v.max()
        if mx <= 0:
            return -math.inf
        v /= mx
        scale += math.log(mx)
    s = float(v.sum())
    return math.log(s) + scale


def z_partition_sum(m: MeasureSpec, n: int, t: float) -> float:
    """Z_n(t), exact-domain for n <= 64 and log-domain (re-exponentiated)
    beyond, guarding against under/overflow. Z_n(0) = 1 up to n*1e-15."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    if n > 64:
        return math.exp(z_partition_sum_log(m, n, t))
    if isinstance(m, BernoulliMeasure):
        return float(np.sum(m.weights ** (1.0 + t))) ** n
    mk = m.as_markov()
    v = mk.pi ** (1.0 + t)
    W = mk.P ** (1.0 + t)
    for _ in range(n - 1):
        v = v @ W
    return float(v.sum())


@dataclass(frozen=True)
class ZDecayResult:
    """Decay table of Z_k(1) against e^(-2 k alpha)."""

    alpha: float
    rows: tuple[tuple[int, float], ...]  # (k, -log Z_k(1) / (2k))
    ratio_sup: float  # sup_k Z_k(1) e^(2 k alpha)
    ratio_inf: float


def z_decay_check(m: MeasureSpec, k_max: int) -> ZDecayResult:
    """Ratios Z_k(1) e^(2 k alpha) for k <= k_max; bounded iff the decay rate
    of squared cylinder masses is exactly 2 alpha."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    alpha = renyi_entropy_exact(m).alpha
    rows = []
    ratios = []
    for k in range(1, k_max + 1):
        log_z = z_partition_sum_log(m, k, 1.0)
        rows.append((k, -log_z / (2.0 * k)))
        ratios.append(math.exp(log_z + 2.0 * k * alpha))
    return ZDecayResult(alpha, tuple(rows), max(ratios), min(ratios))


# ---------------------------------------------------------------------------
# psi-mixing, exact in rational arithmetic
# ---------------------------------------------------------------------------


def _exact_chain(m: MarkovMeasure) -> tuple[list[list[Fraction]], list[Fraction]]:
    # Rows are renormalized exactly: float inputs carry ~1e-16 row-sum drift,
    # and an exactly-stochastic lift keeps psi(k) free of a spurious Perron
    # mode that would eventually dominate the exponentially small tail.
    P = []
    for row in m.P:
        frow = [Fraction(float(x)) for x in row]
        s = sum(frow)
        P.append([x / s for x in frow])
    pi = stationary_distribution_exact(P)
    return P, pi


def _mat_mul(A: list[list[Fraction]], B: list[list[Fraction]]) -> list[list[Fraction]]:
    d = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(d)) for j in range(d)] for i in range(d)]


def _psi_from_power(Pk1: list[list[Fraction]], pi: list[Fraction]) -> Fraction:
    worst = Fraction(0)
    d = len(pi)
    for a in range(d):
        for b in range(d):
            if pi[b] == 0:
                continue
            dev = abs(Pk1[a][b] / pi[b] - 1)
            if dev > worst:
                worst = dev
    return worst


def psi_mixing_table(m: MeasureSpec, k_max: int) -> tuple[list[float], list[float]]:
    """psi(k) for k = 0..k_max and its monotone envelope sup_{j>=k} psi(j).

    For a Markov measure the supremum over cylinder pairs of the mixing ratio
    deviation equals max_ab |(P^(k+1))_ab / pi_b - 1|; computed in exact
    rational arithmetic (float inputs are binary rationals). The envelope is
    taken over the computed range only.
    """
    if not isinstance(m, MarkovMeasure):
        raise TypeError("psi-mixing coefficients require a Markov measure")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    P, pi = _exact_chain(m)
    power = [row[:] for row in P]  # P^(k+1), starting at k = 0
    psi = []
    for k in range(k_max + 1):
        psi.append(float(_psi_from_power(power, pi)))
        if k < k_max:
            power = _mat_mul(power, P)
    env = psi[:]
    for k in range(k_max - 1, -1, -1):
        env[k] = max(env[k], env[k + 1])
    return psi, env


def _identity(d: int) -> list[list[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]


def psi_mixing_exact(m: MeasureSpec, k: int) -> float:
    """psi(k) = max_ab |(P^(k+1))_ab / pi_b - 1|, exactly."""
    if not isinstance(m, MarkovMeasure):
        raise TypeError("psi-mixing coefficients require a Markov measure")
    if k < 0:
        raise ValueError("k must be >= 0")
    P, pi = _exact_chain(m)
    power = _identity(len(pi))
    for _ in range(k + 1):
        power = _mat_mul(power, P)
    return float(_psi_from_power(power, pi))
