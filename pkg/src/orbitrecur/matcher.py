"""Longest self-match statistic M_n and return-time-set measures.

M_n is the length of the longest block occurring at two distinct start
positions among the first n symbols. The fast path uses a doubling suffix
array plus Kasai's LCP scan; an O(n^2) brute force with the identical
contract serves as the testing oracle. Return-set measures mu(S_k(r)) are
computed exactly for Bernoulli/Markov measures and empirically by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationBudgetError
from .rng import derive_seed
from .symbolic import (
    MeasureSpec,
    SymbolSequence,
    TransitionSystem,
    admissible_words,
    sample_sequence,
    sample_sequences_batch,
)
from .tables import CurveRow
from .thermo import renyi_entropy_exact

__all__ = [
    "MatchResult",
    "ReturnSetEstimate",
    "suffix_array",
    "lcp_array",
    "longest_self_match",
    "longest_self_match_bruteforce",
    "match_curve",
    "return_set_measure",
]


@dataclass(frozen=True)
class MatchResult:
    """M_n with a witnessing index pair and the matched word.

    The witness pair is the lexicographically smallest (i, j) among all pairs
    achieving M_n; crossed_boundary reports whether the matched block runs
    past index n-1 into the buffer.
    """

    m_n: int
    witness_i: int
    witness_j: int
    word: tuple[int, ...]
    crossed_boundary: bool = False


def suffix_array(seq) -> np.ndarray:
    """Suffix array by prefix doubling with numpy lexsort (O(n log^2 n))."""
    s = np.asarray(seq, dtype=np.int64)
    n = len(s)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    # densify symbol ranks before sorting
    rank = np.unique(s, return_inverse=True)[1].astype(np.int64)
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    k = 1
    order = np.argsort(rank, kind="stable")
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:]
        order = np.lexsort((key2, rank))
        r1 = rank[order]
        r2 = key2[order]
        bumped = np.empty(n, dtype=np.int64)
        bumped[0] = 0
        bumped[1:] = np.cumsum((np.diff(r1) != 0) | (np.diff(r2) != 0))
        rank = np.empty(n, dtype=np.int64)
        rank[order] = bumped
        if bumped[-1] == n - 1 or k >= n:
            break
        k *= 2
    return order.astype(np.int64)


def lcp_array(seq, sa: np.ndarray) -> np.ndarray:
    """Kasai LCP array: lcp[i] = LCP(suffix sa[i-1], suffix sa[i]), lcp[0]=0."""
    s = list(np.asarray(seq).tolist())
    sa_l = list(sa.tolist())
    n = len(sa_l)
    rank = [0] * n
    for i, p in enumerate(sa_l):
        rank[p] = i
    lcp = [0] * n
    k = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            k = 0
            continue
        j = sa_l[r - 1]
        while i + k < n and j + k < n and s[i + k] == s[j + k]:
            k += 1
        lcp[r] = k
        if k:
            k -= 1
    return np.asarray(lcp, dtype=np.int64)


def _as_symbols(seq) -> np.ndarray:
    if isinstance(seq, SymbolSequence):
        return seq.symbols
    return np.asarray(seq, dtype=np.int64)


def longest_self_match(seq, n: int | None = None) -> MatchResult:
    """M_n via suffix array + LCP, restricted to start positions below n.

    Matched blocks may run into the generated buffer but never past the end
    of the data (containment rule). Witness tie-break: smallest i, then
    smallest j.
    """
    s = _as_symbols(seq)
    if n is None:
        n = seq.n if isinstance(seq, SymbolSequence) else len(s)
    L = len(s)
    if n > L:
        raise ValueError(f"n={n} exceeds generated length {L}")
    if n < 2:
        raise ValueError("need n >= 2")
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    pos = np.flatnonzero(sa < n)  # suffix-array slots whose start is < n
    # LCP of consecutive kept slots = min of lcp over (pos[t], pos[t+1]];
    # reduceat segments run [pos[t]+1, pos[t+1]+1), the trailing segment into
    # the sentinel is dropped
    padded = np.append(lcp, 0)
    gap_min = np.minimum.reduceat(padded, pos + 1)[:-1] if len(pos) > 1 else np.empty(0, np.int64)
    if len(gap_min) == 0:
        raise ValueError("need at least two start positions below n")
    m = int(gap_min.max())
    if m == 0:
        return MatchResult(0, 0, 1, (), False)
    # runs of kept slots connected by gaps achieving the maximum
    hit = gap_min == m
    best: tuple[int, int] | None = None
    t = 0
    n_gaps = len(gap_min)
    while t < n_gaps:
        if not hit[t]:
            t += 1
            continue
        u = t
        while u < n_gaps and hit[u]:
            u += 1
        starts = np.sort(sa[pos[t : u + 1]])
        cand = (int(starts[0]), int(starts[1]))
        if best is None or cand < best:
            best = cand
        t = u
    i, j = best  # type: ignore[misc]
    word = tuple(int(x) for x in s[i : i + m])
    return MatchResult(m, i, j, word, bool(j + m > n))


def longest_self_match_bruteforce(seq, n: int | None = None) -> MatchResult:
    """O(n^2 * M) triple-loop oracle with the identical contract."""
    s_arr = _as_symbols(seq)
    if n is None:
        n = seq.n if isinstance(seq, SymbolSequence) else len(s_arr)
    L = len(s_arr)
    if n > L:
        raise ValueError(f"n={n} exceeds generated length {L}")
    if n < 2:
        raise ValueError("need n >= 2")
    s = s_arr.tolist()
    best = 0
    bi, bj = 0, 1
    for i in range(n - 1):
        for j in range(i + 1, n):
            k = 0
            while j + k < L and s[i + k] == s[j + k]:
                k += 1
            if k > best:
                best, bi, bj = k, i, j
    word = tuple(s[bi : bi + best])
    return MatchResult(best, bi, bj, word, bool(bj + best > n))


def match_curve(m: MeasureSpec, ts: TransitionSystem | None, n_grid, replicates: int,
                seed: int, h2_lower_bound: float | None = None) -> list[CurveRow]:
    """M_n across a grid of n with independent replicates.

    Each (n, replicate) cell gets its own derived seed and its own sequence;
    the buffer holds ceil(8 log n / h2_lower_bound) extra symbols so the
    containment rule cannot truncate a match at the statistic's scale. When
    the bound is not supplied it is taken from the exact Renyi entropy.
    """
    n_grid = [int(x) for x in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be non-empty strictly increasing")
    if n_grid[0] < 2:
        raise ValueError("grid entries must be >= 2")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if h2_lower_bound is None:
        h2_lower_bound = renyi_entropy_exact(m).h2
    if h2_lower_bound <= 0:
        raise ValueError("h2_lower_bound must be positive")
    rows = []
    for n in n_grid:
        buffer = math.ceil(8.0 * math.log(n) / h2_lower_bound)
        for rep in range(replicates):
            cell_seed = derive_seed(seed, "match_curve", n, rep)
            seq = sample_sequence(m, ts, n, buffer, cell_seed)
            res = longest_self_match(seq, n)
            rows.append(
                CurveRow(
                    n=n,
                    replicate=rep,
                    seed=cell_seed,
                    value=res.m_n / math.log(n),
                    aux=float(res.m_n),
                    flag="ok",
                )
            )
    rows.sort(key=lambda r: (r.n, r.replicate))
    return rows


# ---------------------------------------------------------------------------
# Return-time sets S_k(r)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReturnSetEstimate:
    """mu of the lag-k return set of r-cylinders."""

    r: int
    k: int
    value: float
    method: str  # "exact_markov" | "empirical"
    sample_count: int = 0
    stderr: float = 0.0


def _exact_return_measure(m: MeasureSpec, r: int, k: int, cap: int) -> float:
    mk = m.as_markov()
    P = mk.P
    pi = mk.pi
    d = len(pi)
    if k >= r:
        # two identical r-blocks separated by k - r free symbols: pair-chain
        # over (start symbol, end symbol) with squared transition weights
        Q = P**2
        G = np.eye(d)
        for _ in range(r - 1):
            G = G @ Q
        T = np.linalg.matrix_power(P, k - r + 1)
        return float(np.sum(pi * np.sum(G * T.T, axis=1)))
    # k < r: the window of length r + k is k-periodic; enumerate k-words
    if d**k > cap:
        raise EnumerationBudgetError(
            f"exact mode needs {d}^{k} word enumerations; cap is {cap}"
        )
    total = 0.0
    length = r + k
    A = m.system.admissible
    for w in admissible_words(m.system, k):
        if not A[w[-1], w[0]]:
            continue
        mass = pi[w[0]]
        if mass == 0.0:
            continue
        prev = w[0]
        for idx in range(1, length):
            nxt = w[idx % k]
            mass *= P[prev, nxt]
            if mass == 0.0:
                break
            prev = nxt
        total += mass
    return float(total)


def return_set_measure(m: MeasureSpec, r: int, k: int, mode: str = "exact",
                       samples: int = 100_000, seed: int = 0,
                       cap: int = 1 << 20) -> ReturnSetEstimate:
    """mu(S_k(r)) = mu{x : the r-prefix of x recurs at lag k}.

    Exact mode (Bernoulli/Markov/2-block Gibbs): for k >= r an r-step
    pair-chain connected by a (k-r+1)-step transition power; for k < r a sum
    over admissible k-periodic words, capped by the enumeration budget.
    Empirical mode: frequency of the event over independently sampled paths
    of length r + k.
    """
    if r < 1 or k < 1:
        raise ValueError("need r >= 1 and k >= 1")
    if mode == "exact":
        value = _exact_return_measure(m, r, k, cap)
        return ReturnSetEstimate(r, k, value, "exact_markov")
    if mode == "empirical":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        paths = sample_sequences_batch(m, samples, r + k, seed)
        ok = np.all(paths[:, k : k + r] == paths[:, :r], axis=1)
        p_hat = float(ok.mean())
        stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / samples)
        return ReturnSetEstimate(r, k, p_hat, "empirical", samples, stderr)
    raise ValueError(f"unknown mode {mode!r}")
