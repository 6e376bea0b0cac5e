"""Finite-alphabet topological Markov shifts and shift-invariant measures.

Provides transition systems (0/1 matrices), admissible words, exact cylinder
measures for Bernoulli / Markov / 2-block-potential Gibbs specifications, and
reproducible typical-sequence sampling. Everything here is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    IncompatibleMeasureError,
    InvalidSystemError,
    ReducibleChainError,
)
from .rng import make_rng

__all__ = [
    "TransitionSystem",
    "SystemDiagnostics",
    "Word",
    "SymbolSequence",
    "MeasureSpec",
    "BernoulliMeasure",
    "MarkovMeasure",
    "GibbsMeasure",
    "full_shift",
    "validate_system",
    "cylinder_measure",
    "stationary_distribution",
    "stationary_distribution_exact",
    "sample_sequence",
    "sample_sequences_batch",
    "admissible_words",
]


def _frozen_array(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Transition systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    """Square 0/1 transition matrix over a finite alphabet {0..d-1}."""

    admissible: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.admissible)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidSystemError(f"transition matrix must be square, got shape {a.shape}")
        vals = np.unique(a)
        if not np.all(np.isin(vals, (0, 1))):
            raise InvalidSystemError("transition matrix entries must be 0 or 1")
        object.__setattr__(self, "admissible", _frozen_array(a, np.uint8))

    @property
    def alphabet_size(self) -> int:
        return self.admissible.shape[0]

    def allows(self, a: int, b: int) -> bool:
        return bool(self.admissible[a, b])

    def word(self, symbols: Sequence[int]) -> "Word":
        return Word.over(self, symbols)


def full_shift(alphabet_size: int) -> TransitionSystem:
    """Full shift on the given alphabet (all transitions admissible)."""
    return TransitionSystem(np.ones((alphabet_size, alphabet_size), dtype=np.uint8))


@dataclass(frozen=True)
class SystemDiagnostics:
    """Report produced by validate_system."""

    alphabet_size: int
    strongly_connected: bool
    period: int | None  # gcd of cycle lengths; None when not strongly connected
    mixing: bool  # strongly connected and aperiodic
    dead_rows: tuple[int, ...]  # symbols with no outgoing edge
    dead_cols: tuple[int, ...]  # symbols with no incoming edge


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    d = adj.shape[0]
    seen = np.zeros(d, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(adj[u]):
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return seen


def _graph_period(adj: np.ndarray) -> int:
    # gcd of cycle lengths of a strongly connected graph, via BFS levels:
    # every edge (u, v) contributes depth(u) + 1 - depth(v).
    d = adj.shape[0]
    depth = np.full(d, -1, dtype=np.int64)
    depth[0] = 0
    queue = [0]
    g = 0
    while queue:
        nxt = []
        for u in queue:
            for v in np.flatnonzero(adj[u]):
                v = int(v)
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    nxt.append(v)
                else:
                    g = math.gcd(g, int(depth[u] + 1 - depth[v]))
        queue = nxt
    return g if g > 0 else 0


def validate_system(ts: TransitionSystem | Sequence) -> SystemDiagnostics:
    """Strong connectivity, period (gcd of cycle lengths) and dead symbols.

    Rejects non-square or non-0/1 input; mixing means strongly connected
    with period 1.
    """
    if not isinstance(ts, TransitionSystem):
        ts = TransitionSystem(np.asarray(ts))
    adj = ts.admissible
    d = ts.alphabet_size
    dead_rows = tuple(int(i) for i in np.flatnonzero(adj.sum(axis=1) == 0))
    dead_cols = tuple(int(j) for j in np.flatnonzero(adj.sum(axis=0) == 0))
    forward = _reachable(adj, 0)
    backward = _reachable(adj.T, 0)
    connected = bool(forward.all() and backward.all()) and d >= 1
    period = _graph_period(adj) if connected else None
    mixing = connected and period == 1
    return SystemDiagnostics(d, connected, period, mixing, dead_rows, dead_cols)


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Finite word over the alphabet, with its admissibility flag."""

    symbols: tuple[int, ...]
    admissible: bool

    @staticmethod
    def over(ts: TransitionSystem, symbols: Sequence[int]) -> "Word":
        sym = tuple(int(s) for s in symbols)
        d = ts.alphabet_size
        if any(s < 0 or s >= d for s in sym):
            raise InvalidSystemError(f"symbol out of range for alphabet size {d}")
        ok = all(ts.allows(a, b) for a, b in zip(sym, sym[1:]))
        return Word(sym, ok)

    def __len__(self) -> int:
        return len(self.symbols)


def admissible_words(ts: TransitionSystem, length: int) -> Iterator[tuple[int, ...]]:
    """Depth-first enumeration of admissible words of the given length."""
    d = ts.alphabet_size
    if length < 1:
        raise ValueError("length must be >= 1")
    adj = [tuple(int(v) for v in np.flatnonzero(ts.admissible[a])) for a in range(d)]
    stack: list[tuple[tuple[int, ...], int]] = [((a,), a) for a in range(d - 1, -1, -1)]
    while stack:
        word, last = stack.pop()
        if len(word) == length:
            yield word
            continue
        for b in reversed(adj[last]):
            stack.append((word + (b,), b))


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


class MeasureSpec:
    """Common interface of the three measure specifications."""

    system: TransitionSystem

    @property
    def alphabet_size(self) -> int:
        return self.system.alphabet_size

    def as_markov(self) -> "MarkovMeasure":
        raise NotImplementedError

    def word_measure(self, symbols: Sequence[int]) -> float:
        raise NotImplementedError

    @property
    def degenerate(self) -> bool:
        """True when some state carries zero mass or is unreachable."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class BernoulliMeasure(MeasureSpec):
    """Product measure with weights p_i; zero weights mark dead symbols."""

    weights: np.ndarray
    system: TransitionSystem = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) < 1:
            raise InvalidSystemError("weights must be a non-empty vector")
        if np.any(w < 0):
            raise InvalidSystemError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidSystemError(f"weights must sum to 1 (off by {w.sum() - 1.0:.3g})")
        if not np.any(w > 0):
            raise InvalidSystemError("at least one weight must be positive")
        object.__setattr__(self, "weights", _frozen_array(w, np.float64))
        if self.system is None:
            object.__setattr__(self, "system", full_shift(len(w)))
        elif self.system.alphabet_size != len(w):
            raise IncompatibleMeasureError("weights length does not match alphabet")
        elif not np.all(self.system.admissible == 1):
            raise IncompatibleMeasureError("Bernoulli measures live on the full shift")

    @property
    def degenerate(self) -> bool:
        return bool(np.any(self.weights == 0.0))

    def as_markov(self) -> "MarkovMeasure":
        d = len(self.weights)
        P = np.tile(self.weights, (d, 1))
        return MarkovMeasure(self.weights.copy(), P, self.system)

    def word_measure(self, symbols: Sequence[int]) -> float:
        m = 1.0
        for s in symbols:
            m *= float(self.weights[s])
        return m


@dataclass(frozen=True, eq=False)
class MarkovMeasure(MeasureSpec):
    """Stationary Markov chain (pi, P) compatible with the transition system."""

    pi: np.ndarray
    P: np.ndarray
    system: TransitionSystem = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        P = np.asarray(self.P, dtype=np.float64)
        d = len(pi)
        if P.shape != (d, d):
            raise InvalidSystemError("pi and P have inconsistent shapes")
        if np.any(P < 0) or np.any(pi < 0):
            raise InvalidSystemError("pi and P must be non-negative")
        rows = P.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise InvalidSystemError("P must be row-stochastic to 1e-12")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise InvalidSystemError("pi must sum to 1")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise InvalidSystemError("pi P = pi fails at 1e-10")
        object.__setattr__(self, "pi", _frozen_array(pi, np.float64))
        object.__setattr__(self, "P", _frozen_array(P, np.float64))
        if self.system is None:
            object.__setattr__(self, "system", TransitionSystem((P > 0).astype(np.uint8)))
        else:
            if self.system.alphabet_size != d:
                raise IncompatibleMeasureError("P does not match the alphabet size")
            if np.any((P > 0) & (self.system.admissible == 0)):
                raise IncompatibleMeasureError("P puts mass on inadmissible transitions")

    @property
    def degenerate(self) -> bool:
        if np.any(self.pi == 0.0):
            return True
        return not validate_system(TransitionSystem((self.P > 0).astype(np.uint8))).strongly_connected

    def as_markov(self) -> "MarkovMeasure":
        return self

    def word_measure(self, symbols: Sequence[int]) -> float:
        it = iter(symbols)
        try:
            prev = next(it)
        except StopIteration:
            raise ValueError("empty word") from None
        m = float(self.pi[prev])
        for s in it:
            m *= float(self.P[prev, s])
            prev = s
        return m


@dataclass(frozen=True, eq=False)
class GibbsMeasure(MeasureSpec):
    """Gibbs measure of a 2-block potential phi(a, b), finite exactly on
    admissible pairs.

    Cylinder masses are evaluated through the normalized transfer matrix:
    M_ab = A_ab exp(phi(a,b)) with Perron data (lam, r, l) induces the chain
    P_ab = M_ab r_b / (lam r_a), pi = l*r / <l, r>. Being a 2-block table the
    potential has var_k = 0 for k >= 2, so local Hoelderness is automatic.
    """

    potential: np.ndarray
    system: TransitionSystem

    def __post_init__(self):
        phi = np.asarray(self.potential, dtype=np.float64)
        A = self.system.admissible
        if phi.shape != A.shape:
            raise IncompatibleMeasureError("potential table must match the transition matrix")
        if not np.all(np.isfinite(phi[A == 1])):
            raise InvalidSystemError("potential must be finite on admissible pairs")
        if np.any(np.isfinite(phi[A == 0])):
            raise InvalidSystemError("potential must be -inf exactly on inadmissible pairs")
        diag = validate_system(self.system)
        if not diag.strongly_connected:
            raise InvalidSystemError("Gibbs measures require a strongly connected system")
        object.__setattr__(self, "potential", _frozen_array(phi, np.float64))
        object.__setattr__(self, "_induced", _induced_chain(self.system, phi))

    @property
    def degenerate(self) -> bool:
        return False

    def as_markov(self) -> "MarkovMeasure":
        return self._induced  # type: ignore[attr-defined]

    def word_measure(self, symbols: Sequence[int]) -> float:
        return self.as_markov().word_measure(symbols)

    @property
    def transfer_weights(self) -> np.ndarray:
        """Unnormalized transfer matrix A_ab exp(phi(a, b))."""
        W = np.where(self.system.admissible == 1, np.exp(self.potential), 0.0)
        W.setflags(write=False)
        return W


def _perron(M: np.ndarray, tol: float = 1e-15, max_iter: int = 100_000):
    """Perron root and right/left vectors of a non-negative irreducible matrix.

    Power iteration on the diagonally shifted matrix, which is primitive, from
    the deterministic uniform start.
    """
    d = M.shape[0]
    shift = float(M.max()) or 1.0
    Ms = M + shift * np.eye(d)
    v = np.full(d, 1.0 / d)
    w = np.full(d, 1.0 / d)
    lam = 0.0
    iters = 0
    for iters in range(1, max_iter + 1):
        v_new = Ms @ v
        w_new = w @ Ms
        lam_new = float(v_new.sum())
        v_new /= lam_new
        w_new /= w_new.sum()
        if abs(lam_new - lam) <= tol * abs(lam_new) and np.max(np.abs(v_new - v)) <= tol:
            v, w, lam = v_new, w_new, lam_new
            break
        v, w, lam = v_new, w_new, lam_new
    return lam - shift, v, w, iters


def _induced_chain(ts: TransitionSystem, phi: np.ndarray) -> MarkovMeasure:
    A = ts.admissible
    M = np.where(A == 1, np.exp(phi), 0.0)
    lam, r, l, _ = _perron(M)
    P = M * r[None, :] / (lam * r[:, None])
    P = P / P.sum(axis=1, keepdims=True)  # remove last-digit drift
    pi = l * r
    pi = pi / pi.sum()
    pi = _stationary_power(P, pi)  # polish to the 1e-10 contract
    return MarkovMeasure(pi, P, ts)


# ---------------------------------------------------------------------------
# Cylinder measures and stationary vectors
# ---------------------------------------------------------------------------


def cylinder_measure(m: MeasureSpec, w: Word | Sequence[int]) -> float:
    """Exact cylinder mass of the word under the measure; 0 when inadmissible."""
    if isinstance(w, Word):
        symbols = w.symbols
        admissible = w.admissible
    else:
        word = Word.over(m.system, w)
        symbols, admissible = word.symbols, word.admissible
    if len(symbols) == 0:
        raise ValueError("empty word rejected")
    if not admissible:
        return 0.0
    return m.word_measure(symbols)


def _stationary_power(P: np.ndarray, start: np.ndarray, tol: float = 1e-15,
                      max_iter: int = 100_000) -> np.ndarray:
    # Iterate the half-lazy kernel (I+P)/2: same fixed point, no period-2
    # oscillation on periodic chains.
    pi = np.array(start, dtype=np.float64)
    for _ in range(max_iter):
        nxt = 0.5 * (pi + pi @ P)
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) <= tol:
            return nxt
        pi = nxt
    raise ReducibleChainError("power iteration did not converge; chain may be reducible")


def stationary_distribution(P, tol: float = 1e-15, max_iter: int = 100_000) -> np.ndarray:
    """Stationary vector of a row-stochastic irreducible matrix.

    Power iteration from the uniform start; reducible inputs are rejected by a
    reachability check (power iteration alone can silently converge on them,
    e.g. the identity matrix).
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidSystemError("P must be square")
    if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
        raise InvalidSystemError("P must be row-stochastic")
    diag = validate_system(TransitionSystem((P > 0).astype(np.uint8)))
    if not diag.strongly_connected:
        raise ReducibleChainError("P is reducible; stationary vector not unique")
    d = P.shape[0]
    pi = _stationary_power(P, np.full(d, 1.0 / d), tol=tol, max_iter=max_iter)
    if np.max(np.abs(pi @ P - pi)) > 1e-10:
        raise ReducibleChainError("stationary vector failed the 1e-10 fixed-point check")
    return pi


def stationary_distribution_exact(P_rows: Sequence[Sequence]) -> list[Fraction]:
    """Exact stationary vector of an irreducible stochastic matrix.

    Entries are coerced to Fractions (binary floats convert exactly); solves
    pi (P - I) = 0 with sum pi = 1 by Gaussian elimination.
    """
    d = len(P_rows)
    P = [[Fraction(x) for x in row] for row in P_rows]
    # Build (P^T - I) with the last equation replaced by sum(pi) = 1.
    A = [[P[j][i] - (1 if i == j else 0) for j in range(d)] for i in range(d)]
    A[d - 1] = [Fraction(1)] * d
    b = [Fraction(0)] * (d - 1) + [Fraction(1)]
    for col in range(d):
        piv = next((r for r in range(col, d) if A[r][col] != 0), None)
        if piv is None:
            raise ReducibleChainError("singular system; chain may be reducible")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        b[col] *= inv
        for r in range(d):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] -= f * b[col]
    if any(x < 0 for x in b):
        raise ReducibleChainError("negative stationary entries; chain may be reducible")
    return b


# ---------------------------------------------------------------------------
# Sequence sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """A typical sample path: n statistic symbols plus a generated buffer."""

    symbols: np.ndarray
    n: int
    seed: int
    measure: MeasureSpec

    def __post_init__(self):
        object.__setattr__(self, "symbols", _frozen_array(self.symbols, np.int64))
        if not 1 <= self.n <= len(self.symbols):
            raise ValueError("declared horizon n must satisfy 1 <= n <= len(symbols)")

    @property
    def buffer(self) -> int:
        return len(self.symbols) - self.n

    def __len__(self) -> int:
        return len(self.symbols)


def _check_compatible(m: MeasureSpec, ts: TransitionSystem | None) -> None:
    if ts is None:
        return
    if ts.alphabet_size != m.alphabet_size:
        raise IncompatibleMeasureError("measure and transition system alphabet sizes differ")
    mk = m.as_markov()
    if np.any((mk.P > 0) & (ts.admissible == 0)):
        raise IncompatibleMeasureError("measure puts mass on transitions the system forbids")


def sample_sequence(m: MeasureSpec, ts: TransitionSystem | None, n: int,
                    buffer: int = 0, seed: int = 0) -> SymbolSequence:
    """Sample n + buffer symbols of the stationary chain, reproducibly.

    The initial symbol is drawn from pi (weights for Bernoulli), transitions
    from the rows of P. Identical (seed, parameters) give identical output.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if buffer < 0:
        raise ValueError("buffer must be >= 0")
    _check_compatible(m, ts)
    total = n + buffer
    rng = make_rng(seed)
    if isinstance(m, BernoulliMeasure):
        cum = np.cumsum(m.weights)
        cum[-1] = 1.0
        u = rng.random(total)
        sym = np.searchsorted(cum, u, side="right").astype(np.int64)
        np.clip(sym, 0, m.alphabet_size - 1, out=sym)
        return SymbolSequence(sym, n, seed, m)
    mk = m.as_markov()
    cum_pi = np.cumsum(mk.pi)
    cum_pi[-1] = 1.0
    cum_rows = [row.tolist() for row in np.cumsum(mk.P, axis=1)]
    for row in cum_rows:
        row[-1] = 1.0
    u = rng.random(total).tolist()
    out = [0] * total
    state = int(np.searchsorted(cum_pi, u[0], side="right"))
    state = min(state, mk.alphabet_size - 1)
    out[0] = state
    hi = mk.alphabet_size - 1
    for t in range(1, total):
        state = bisect.bisect_right(cum_rows[state], u[t])
        if state > hi:
            state = hi
        out[t] = state
    return SymbolSequence(np.asarray(out, dtype=np.int64), n, seed, m)


def sample_sequences_batch(m: MeasureSpec, count: int, length: int, seed: int) -> np.ndarray:
    """Sample `count` independent stationary paths of `length` symbols.

    Vectorized across paths; one step of every path is advanced per loop
    iteration. Returns an int64 array of shape (count, length).
    """
    if count < 1 or length < 1:
        raise ValueError("count and length must be >= 1")
    rng = make_rng(seed)
    if isinstance(m, BernoulliMeasure):
        cum = np.cumsum(m.weights)
        cum[-1] = 1.0
        u = rng.random((count, length))
        return np.searchsorted(cum, u.ravel(), side="right").reshape(count, length).astype(np.int64)
    mk = m.as_markov()
    cum_pi = np.cumsum(mk.pi)
    cum_pi[-1] = 1.0
    cum_P = np.cumsum(mk.P, axis=1)
    cum_P[:, -1] = 1.0
    u = rng.random((count, length))
    out = np.empty((count, length), dtype=np.int64)
    state = np.searchsorted(cum_pi, u[:, 0], side="right")
    np.clip(state, 0, mk.alphabet_size - 1, out=state)
    out[:, 0] = state
    for t in range(1, length):
        rows = cum_P[state]  # (count, d)
        # count of cumulative entries <= u, matching bisect_right in
        # sample_sequence; never selects a zero-probability transition
        state = (rows <= u[:, t : t + 1]).sum(axis=1)
        np.clip(state, 0, mk.alphabet_size - 1, out=state)
        out[:, t] = state
    return out
