"""Numerical verification of metric axioms and the mu-family inequalities.

Every checker is a pure function of its inputs (seed included) returning a
ViolationReport. The comparison convention throughout: an inequality
LHS <= RHS passes when

    LHS <= RHS + tol * max(1, |LHS|, |RHS|)

with ``tol`` defaulting to 1e-9. The inequalities are exact in real
arithmetic; the slack only absorbs floating-point error, so any violation
beyond it is a genuine bug (or a genuine counterexample, which is the
point of several of these checks).

Product-form inequalities (the 9^k split bound and the (27/2)^k
quasi-triangle family) are evaluated in the log domain so k up to the
dozens cannot overflow; their recorded lhs/rhs/slack values are in log
units.

Sampled checkers draw index tuples uniformly with a seeded PCG64 stream
and always prepend a fixed battery of degenerate tuples (repeated indices,
anchor coincidences) so the edge cases are never left to chance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cassinian import LOG2, PuncturedSpec, punctured_matrix
from .errors import InputError
from .spaces import DistanceMatrix, PointCloud, pairwise_distances

DEFAULT_TOL = 1e-9

_TRIANGLE_CHUNK = 32  # rows of x per broadcast block in the triangle sweep


@dataclass
class Violation:
    kind: str
    indices: tuple[int, ...]
    lhs: float
    rhs: float
    slack: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "indices": [int(i) for i in self.indices],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
        }


@dataclass
class ViolationReport:
    checked: int
    violations: list[Violation]
    tolerance: float
    worst_slack: float
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "violations": [v.to_dict() for v in self.violations],
            "tolerance": self.tolerance,
            "worst_slack": self.worst_slack,
            "meta": self.meta,
        }


class _Collector:
    """Accumulates vectorized LHS <= RHS comparisons into one report."""

    def __init__(self, tol: float):
        if tol <= 0.0:
            raise InputError("tolerance must be positive")
        self.tol = tol
        self.checked = 0
        self.worst = -math.inf
        self.violations: list[Violation] = []

    def compare(self, kind: str, index_cols: tuple[np.ndarray, ...], lhs, rhs) -> None:
        lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if lhs.size == 0:
            return
        with np.errstate(invalid="ignore"):
            slack = lhs - rhs
        # log-domain checks may produce -inf on both sides (zero products);
        # lhs = -inf passes vacuously instead of propagating NaN
        neg = np.isneginf(lhs)
        if neg.any():
            slack = np.where(neg, -np.inf, slack)
        self.checked += int(lhs.size)
        worst = float(slack.max())
        if worst > self.worst:
            self.worst = worst
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        bad = np.nonzero(slack > self.tol * scale)[0]
        for pos in bad:
            self.violations.append(
                Violation(
                    kind,
                    tuple(int(col[pos]) for col in index_cols),
                    float(lhs[pos]),
                    float(rhs[pos]),
                    float(slack[pos]),
                )
            )

    def report(self, **meta) -> ViolationReport:
        worst = self.worst if self.checked else -math.inf
        return ViolationReport(self.checked, self.violations, self.tol, worst, dict(meta))


def _entries(m) -> np.ndarray:
    if isinstance(m, DistanceMatrix):
        return m.entries
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError("expected a square distance matrix")
    return arr


def _degenerate_tuples(n: int, arity: int, anchors: tuple[int, ...]) -> np.ndarray:
    base = sorted({0, min(1, n - 1), n - 1} | {a for a in anchors if 0 <= a < n})
    if len(base) > 5:
        base = base[:5]
    rows = list(product(base, repeat=arity))
    return np.array(rows, dtype=np.int64).reshape(len(rows), arity)


def _sample_tuples(
    n: int, arity: int, samples: int, seed: int, anchors: tuple[int, ...] = ()
) -> np.ndarray:
    """Degenerate battery plus ``samples`` uniform index tuples."""
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    battery = _degenerate_tuples(n, arity, anchors)
    rnd = rng.integers(0, n, size=(int(samples), arity), dtype=np.int64)
    return np.vstack([battery, rnd])


# ---------------------------------------------------------------------------
# metric axioms and Ptolemy


def check_metric_axioms(m, tol: float = DEFAULT_TOL) -> ViolationReport:
    """Symmetry, zero diagonal, nonnegativity, and the triangle inequality
    over all ordered triples.

    ``meta["offdiagonal_positive"]`` flags whether every off-diagonal entry
    is strictly positive (duplicate points make it False without being a
    violation).
    """
    e = _entries(m)
    n = e.shape[0]
    col = _Collector(tol)

    iu, ju = np.triu_indices(n, k=1)
    col.compare("symmetry", (iu, ju), np.abs(e[iu, ju] - e[ju, iu]), np.zeros(iu.size))
    diag = np.arange(n)
    col.compare("diagonal", (diag,), np.abs(np.diagonal(e)), np.zeros(n))
    ii, jj = np.nonzero(np.ones_like(e, dtype=bool))
    col.compare("nonnegative", (ii, jj), -e[ii, jj], np.zeros(ii.size))

    for x0 in range(0, n, _TRIANGLE_CHUNK):
        x1 = min(x0 + _TRIANGLE_CHUNK, n)
        chunk = e[x0:x1]
        lhs = np.broadcast_to(chunk[:, :, None], (x1 - x0, n, n)).reshape(-1)
        rhs = (chunk[:, None, :] + e.T[None, :, :]).reshape(-1)
        xs, ys, zs = np.meshgrid(
            np.arange(x0, x1), np.arange(n), np.arange(n), indexing="ij"
        )
        col.compare(
            "triangle",
            (xs.reshape(-1), ys.reshape(-1), zs.reshape(-1)),
            lhs,
            rhs,
        )
    offdiag_positive = bool(np.all(e[iu, ju] > 0.0)) if iu.size else True
    return col.report(offdiagonal_positive=offdiag_positive)


def check_ptolemaic(m, tol: float = DEFAULT_TOL) -> ViolationReport:
    """The Ptolemy inequality d(x,y)d(z,w) <= d(x,z)d(y,w) + d(x,w)d(y,z)
    over all quadruples and all three pairings.

    Per quadruple the three pairing products P1, P2, P3 satisfy all three
    inequalities iff 2 max(P) <= P1 + P2 + P3, which is what the sweep
    evaluates.
    """
    e = _entries(m)
    n = e.shape[0]
    col = _Collector(tol)
    quads = 0
    for i in range(n - 3):
        row_i = e[i]
        for j in range(i + 1, n - 2):
            off = j + 1
            a = row_i[off:]
            b = e[j, off:]
            p1 = e[i, j] * e[off:, off:]
            p2 = a[:, None] * b[None, :]
            p3 = b[:, None] * a[None, :]
            tot = p1 + p2 + p3
            mx = np.maximum(np.maximum(p1, p2), p3)
            ku, lu = np.triu_indices(p1.shape[0], k=1)
            quads += ku.size
            col.compare(
                "ptolemy",
                (
                    np.full(ku.size, i),
                    np.full(ku.size, j),
                    ku + off,
                    lu + off,
                ),
                2.0 * mx[ku, lu],
                tot[ku, lu],
            )
    report = col.report(quadruples=quads)
    return report


# ---------------------------------------------------------------------------
# sandwich bounds


def check_sandwich(kind: str, target, tol: float = DEFAULT_TOL) -> ViolationReport:
    """Two-sided additive bounds between paired constructions.

    * ``kind="tau"``: with a one-point PuncturedSpec, checks
      tilde <= tau <= tilde + log 2 entrywise.
    * ``kind="avg"``: with any PuncturedSpec, the same bound between the
      averaged variants.
    * ``kind="taxicab"``: with a planar PointCloud, checks
      taxicab <= d1 + d2 <= taxicab + pi entrywise.
    """
    if kind in ("tau", "avg"):
        if not isinstance(target, PuncturedSpec):
            raise InputError(f"kind {kind!r} expects a PuncturedSpec")
        if kind == "tau":
            lo = punctured_matrix(target.with_variant("tilde_tau_p")).entries
            hi = punctured_matrix(target.with_variant("tau_p")).entries
        else:
            lo = punctured_matrix(target.with_variant("tilde_avg_tau")).entries
            hi = punctured_matrix(target.with_variant("avg_tau")).entries
        gap = LOG2
    elif kind == "taxicab":
        if not isinstance(target, PointCloud) or target.dim != 2:
            raise InputError("kind 'taxicab' expects a planar PointCloud")
        lo = pairwise_distances(target.points, "taxicab")
        hi = pairwise_distances(target.points, "d1+d2")
        gap = math.pi
    else:
        raise InputError(f"unknown sandwich kind {kind!r} (want tau, avg, or taxicab)")
    iu, ju = np.triu_indices(lo.shape[0], k=1)
    col = _Collector(tol)
    col.compare("sandwich_lower", (iu, ju), lo[iu, ju], hi[iu, ju])
    col.compare("sandwich_upper", (iu, ju), hi[iu, ju], lo[iu, ju] + gap)
    return col.report(kind=kind, gap=gap)


# ---------------------------------------------------------------------------
# mu-family checks


def _mu(e: np.ndarray, u: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    return e[u, v] + np.sqrt(e[u, p] * e[v, p])


def check_mu_bounds(
    m,
    p: int,
    q: int | None = None,
    samples: int = 100000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ViolationReport:
    """The displayed bounds tying mu to anchor distances.

    On sampled triples (x, y, z) with anchors p and q:

    * upper chain: mu_p(x,y) <= (3/2)[d(x,p)+d(y,p)] <= 3 max(d(x,p), d(y,p))
    * lower chain: mu_p(x,y) >= max(d(x,p), d(y,p)) >= (1/2)[d(x,p)+d(y,p)]
    * pair sum:    mu_p(x,z) + mu_q(y,z) >= d(x,z) + d(y,z) >= d(x,y)
    * pair max:    max(mu_p(x,z), mu_q(y,z)) >= d(x,y) / 2
    """
    e = _entries(m)
    n = e.shape[0]
    if not 0 <= p < n:
        raise InputError(f"anchor {p} out of range")
    q = p if q is None else q
    if not 0 <= q < n:
        raise InputError(f"anchor {q} out of range")
    t = _sample_tuples(n, 3, samples, seed, (p, q))
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    col = _Collector(tol)

    dxp, dyp = e[x, p], e[y, p]
    mu_xy = _mu(e, x, y, p)
    half_sum = 1.5 * (dxp + dyp)
    anchor_max = np.maximum(dxp, dyp)
    col.compare("mu_upper_halfsum", (x, y), mu_xy, half_sum)
    col.compare("mu_upper_max", (x, y), half_sum, 3.0 * anchor_max)
    col.compare("mu_lower_max", (x, y), anchor_max, mu_xy)
    col.compare("mu_lower_halfsum", (x, y), 0.5 * (dxp + dyp), anchor_max)

    mu_xz = _mu(e, x, z, p)
    mu_yz = _mu(e, y, z, q)
    col.compare("mu_pair_sum", (x, y, z), e[x, z] + e[y, z], mu_xz + mu_yz)
    col.compare("triangle_base", (x, y, z), e[x, y], e[x, z] + e[y, z])
    col.compare("mu_pair_max", (x, y, z), 0.5 * e[x, y], np.maximum(mu_xz, mu_yz))
    return col.report(anchors=[int(p), int(q)], seed=int(seed))


def check_lemma_nine(
    m, p: int, samples: int = 100000, seed: int = 0, tol: float = DEFAULT_TOL
) -> ViolationReport:
    """The factor-9 pairing bound
    mu_p(x,y) mu_p(z,w) <= 9 max(mu_p(x,z) mu_p(y,w), mu_p(x,w) mu_p(y,z))
    on sampled quadruples. ``meta["max_ratio"]`` records the largest
    observed LHS / max-product ratio (expected <= 9)."""
    e = _entries(m)
    n = e.shape[0]
    if not 0 <= p < n:
        raise InputError(f"anchor {p} out of range")
    t = _sample_tuples(n, 4, samples, seed, (p,))
    x, y, z, w = t[:, 0], t[:, 1], t[:, 2], t[:, 3]
    lhs = _mu(e, x, y, p) * _mu(e, z, w, p)
    cross = np.maximum(_mu(e, x, z, p) * _mu(e, y, w, p), _mu(e, x, w, p) * _mu(e, y, z, p))
    col = _Collector(tol)
    col.compare("mu_factor_nine", (x, y, z, w), lhs, 9.0 * cross)
    pos = cross > 0.0
    max_ratio = float((lhs[pos] / cross[pos]).max()) if np.any(pos) else 0.0
    return col.report(max_ratio=max_ratio, seed=int(seed))


def check_lemma_K(
    m,
    p: int,
    K: float,
    samples: int = 100000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ViolationReport:
    """The separated-pair bound: on triples where
    max(mu_p(x,z), mu_p(y,z)) >= K min(mu_p(x,z), mu_p(y,z)) with K > 3,

        mu_p(x,z) + mu_p(y,z) <= [3(K+3) / (2(K-3))] d(x,y).

    Triples failing the hypothesis are skipped and counted in
    ``meta["skipped"]``, never silently dropped.
    """
    if K <= 3.0:
        raise InputError(f"the separation factor must exceed 3, got K={K}")
    e = _entries(m)
    n = e.shape[0]
    if not 0 <= p < n:
        raise InputError(f"anchor {p} out of range")
    t = _sample_tuples(n, 3, samples, seed, (p,))
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    a = _mu(e, x, z, p)
    b = _mu(e, y, z, p)
    applies = np.maximum(a, b) >= K * np.minimum(a, b)
    const = 3.0 * (K + 3.0) / (2.0 * (K - 3.0))
    col = _Collector(tol)
    col.compare(
        "mu_separated_pair",
        (x[applies], y[applies], z[applies]),
        (a + b)[applies],
        const * e[x, y][applies],
    )
    return col.report(
        sampled=int(t.shape[0]),
        applicable=int(applies.sum()),
        skipped=int(t.shape[0] - applies.sum()),
        conclusion_constant=const,
        seed=int(seed),
    )


def _log_mu_rows(e: np.ndarray, u: np.ndarray, v: np.ndarray, P: np.ndarray) -> np.ndarray:
    """log mu_{p_i}(u, v) as an (N, k) array; -inf rows are legal (mu = 0)."""
    vals = e[u[:, None], v[:, None]] + np.sqrt(e[u[:, None], P] * e[v[:, None], P])
    with np.errstate(divide="ignore"):
        return np.log(vals)


def check_product_lemma(
    m,
    punctures,
    samples: int = 100000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ViolationReport:
    """The product splitting bound, evaluated in the log domain:

        prod_i [mu_i(x,z) + mu_i(y,z)] <= 9^k [prod_i mu_i(x,z) + prod_i mu_i(y,z)]

    Recorded lhs/rhs are logarithms; the 9^k constant enters as k log 9.
    """
    e = _entries(m)
    n = e.shape[0]
    P = np.asarray(list(punctures), dtype=np.int64)
    if P.size < 1:
        raise InputError("need at least one puncture")
    k = P.size
    t = _sample_tuples(n, 3, samples, seed, tuple(int(a) for a in P[:2]))
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    a = e[x[:, None], z[:, None]] + np.sqrt(e[x[:, None], P] * e[z[:, None], P])
    b = e[y[:, None], z[:, None]] + np.sqrt(e[y[:, None], P] * e[z[:, None], P])
    with np.errstate(divide="ignore"):
        lhs = np.log(a + b).sum(axis=1)
        log_pa = np.log(a).sum(axis=1)
        log_pb = np.log(b).sum(axis=1)
    rhs = k * math.log(9.0) + np.logaddexp(log_pa, log_pb)
    col = _Collector(tol)
    col.compare("mu_product_split", (x, y, z), lhs, rhs)
    return col.report(k=int(k), seed=int(seed), log_domain=True)


def check_quasi_ptolemy(r, K: float, tol: float = DEFAULT_TOL) -> ViolationReport:
    """Quasi-Ptolemy for one 4x4 array of quasi-distances r.

    Hypothesis (checked first, over every index triple): r is symmetric,
    nonnegative, and r_ij <= K (r_ik + r_jk) with K >= 1. If the hypothesis
    fails the report carries ``meta["hypothesis_satisfied"] = False`` and no
    conclusion is evaluated. Otherwise the conclusions

        sqrt(r12 r34) <= K [sqrt(r13 r24) + sqrt(r14 r23)]
        r12 r34 <= 2 K^2 (r13 r24 + r14 r23) <= 4 K^2 max(r13 r24, r14 r23)

    are verified for the labeling as given.
    """
    arr = np.asarray(r, dtype=float)
    if arr.shape != (4, 4):
        raise InputError(f"expected a 4x4 array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise InputError("quasi-distance array must be finite and nonnegative")
    if not np.array_equal(arr, arr.T):
        raise InputError("quasi-distance array must be symmetric")
    if K < 1.0:
        raise InputError(f"need K >= 1, got K={K}")
    col = _Collector(tol)
    hyp_failures = []
    for i in range(4):
        for j in range(4):
            for kk in range(4):
                lhs = arr[i, j]
                rhs = K * (arr[i, kk] + arr[j, kk])
                col.checked += 1
                if lhs - rhs > tol * max(1.0, abs(lhs), abs(rhs)):
                    hyp_failures.append((i, j, kk))
                col.worst = max(col.worst, lhs - rhs)
    if hyp_failures:
        return col.report(
            hypothesis_satisfied=False,
            hypothesis_failures=[list(f) for f in hyp_failures],
        )
    idx = (np.array([0]), np.array([1]), np.array([2]), np.array([3]))
    col.compare(
        "quasi_ptolemy_sqrt",
        idx,
        math.sqrt(arr[0, 1] * arr[2, 3]),
        K * (math.sqrt(arr[0, 2] * arr[1, 3]) + math.sqrt(arr[0, 3] * arr[1, 2])),
    )
    col.compare(
        "quasi_ptolemy_product",
        idx,
        arr[0, 1] * arr[2, 3],
        2.0 * K * K * (arr[0, 2] * arr[1, 3] + arr[0, 3] * arr[1, 2]),
    )
    col.compare(
        "quasi_ptolemy_max",
        idx,
        arr[0, 1] * arr[2, 3],
        4.0 * K * K * max(arr[0, 2] * arr[1, 3], arr[0, 3] * arr[1, 2]),
    )
    return col.report(hypothesis_satisfied=True)


def check_quasi_ptolemy_many(
    rs: np.ndarray, K: float, tol: float = DEFAULT_TOL
) -> ViolationReport:
    """Vectorized quasi-Ptolemy over a batch of 4x4 arrays (N, 4, 4).

    Rows whose hypothesis fails are skipped and counted in
    ``meta["hypothesis_skipped"]``; conclusions are checked on the rest.
    Violation indices are batch rows.
    """
    arr = np.asarray(rs, dtype=float)
    if arr.ndim != 3 or arr.shape[1:] != (4, 4):
        raise InputError(f"expected an (N, 4, 4) batch, got shape {arr.shape}")
    if K < 1.0:
        raise InputError(f"need K >= 1, got K={K}")
    col = _Collector(tol)
    ok = np.ones(arr.shape[0], dtype=bool)
    for i in range(4):
        for j in range(4):
            for kk in range(4):
                lhs = arr[:, i, j]
                rhs = K * (arr[:, i, kk] + arr[:, j, kk])
                scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
                ok &= lhs - rhs <= tol * scale
    rows = np.nonzero(ok)[0]
    a = arr[rows]
    p1 = a[:, 0, 1] * a[:, 2, 3]
    p2 = a[:, 0, 2] * a[:, 1, 3]
    p3 = a[:, 0, 3] * a[:, 1, 2]
    col.compare(
        "quasi_ptolemy_sqrt",
        (rows,),
        np.sqrt(p1),
        K * (np.sqrt(p2) + np.sqrt(p3)),
    )
    col.compare("quasi_ptolemy_product", (rows,), p1, 2.0 * K * K * (p2 + p3))
    col.compare("quasi_ptolemy_max", (rows,), p1, 4.0 * K * K * np.maximum(p2, p3))
    return col.report(
        hypothesis_skipped=int(arr.shape[0] - rows.size),
        hypothesis_checked=int(arr.shape[0]),
    )


def check_mu_P_quasi_triangle(
    m,
    punctures,
    triples: int = 100000,
    quadruples: int = 100000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ViolationReport:
    """The (27/2)^k quasi-triangle bounds for the product quantity mu_P,
    in the log domain:

        mu_P(x,y) <= (27/2)^k [mu_P(x,z) + mu_P(z,y)]
        mu_P(x,y) mu_P(z,w) <= 4 (27/2)^{2k} max(mu_P(x,z) mu_P(y,w),
                                                 mu_P(x,w) mu_P(y,z))
    """
    e = _entries(m)
    n = e.shape[0]
    P = np.asarray(list(punctures), dtype=np.int64)
    if P.size < 1:
        raise InputError("need at least one puncture")
    k = int(P.size)
    log_c = k * math.log(13.5)
    col = _Collector(tol)

    t = _sample_tuples(n, 3, triples, seed, tuple(int(a) for a in P[:2]))
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    lhs = _log_mu_rows(e, x, y, P).sum(axis=1)
    rhs = log_c + np.logaddexp(
        _log_mu_rows(e, x, z, P).sum(axis=1), _log_mu_rows(e, z, y, P).sum(axis=1)
    )
    col.compare("muP_triangle", (x, y, z), lhs, rhs)

    t4 = _sample_tuples(n, 4, quadruples, seed + 1, tuple(int(a) for a in P[:2]))
    x, y, z, w = t4[:, 0], t4[:, 1], t4[:, 2], t4[:, 3]
    lhs4 = _log_mu_rows(e, x, y, P).sum(axis=1) + _log_mu_rows(e, z, w, P).sum(axis=1)
    cross = np.maximum(
        _log_mu_rows(e, x, z, P).sum(axis=1) + _log_mu_rows(e, y, w, P).sum(axis=1),
        _log_mu_rows(e, x, w, P).sum(axis=1) + _log_mu_rows(e, y, z, P).sum(axis=1),
    )
    col.compare("muP_four_point", (x, y, z, w), lhs4, math.log(4.0) + 2.0 * log_c + cross)
    return col.report(k=k, seed=int(seed), log_domain=True)
