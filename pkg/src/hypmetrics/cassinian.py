"""Hyperbolic-type metric constructors over punctured spaces.

Given a base distance ``d`` on a finite set X and punctures
P = {p_1, ..., p_k}, this module builds the distance functions living on
D = X \\ P:

* ``tau_p``        -- log(1 + 2 d(x,y) / sqrt(d(x,p) d(y,p))); a metric on
                      any base space.
* ``tilde_tau_p``  -- log(1 + d(x,y) / sqrt(d(x,p) d(y,p))); the one-point
                      scale-invariant Cassinian distance. Not a metric in
                      general, a metric when the base space is Ptolemaic.
* ``avg_tau`` / ``tilde_avg_tau`` -- arithmetic means of the one-point
                      functions over P.
* ``sup_tau``      -- pointwise maximum over P.
* ``j_metric`` / ``j_tilde_metric`` -- boundary-distance variants using
                      dist(x, P) = min_i d(x, p_i).
* ``mu_p`` / ``mu_P`` -- the auxiliary quantities
                      d(x,y) + sqrt(d(x,p) d(y,p)) and their product over P,
                      which carry the quasi-triangle machinery the checkers
                      exercise.

All constructors are ratios of base distances (scale-invariant), except the
mu family, which keeps base units.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, PunctureDomainError
from .spaces import DistanceMatrix, PointCloud, METRIC_NAMES, pairwise_distances

LOG2 = math.log(2.0)

#: Variant selector strings accepted by PuncturedSpec and the CLI.
VARIANTS = ("tau_p", "tilde_tau_p", "avg_tau", "tilde_avg_tau", "sup_tau", "j", "j_tilde")

#: Variants that measure from a single anchor puncture.
ONE_POINT_VARIANTS = ("tau_p", "tilde_tau_p")

Oracle = Callable[[int, int], float]


def as_oracle(d) -> Oracle:
    """Normalize a DistanceMatrix, a square ndarray, or a callable to an
    ``(i, j) -> float`` evaluation."""
    if isinstance(d, DistanceMatrix):
        entries = d.entries
        return lambda i, j: float(entries[i, j])
    if isinstance(d, np.ndarray):
        return lambda i, j: float(d[i, j])
    if callable(d):
        return d
    raise InputError(f"expected a DistanceMatrix, ndarray, or callable oracle, got {type(d)!r}")


def mu_p(d, x: int, y: int, p: int) -> float:
    """d(x,y) + sqrt(d(x,p) d(y,p)). Defined everywhere, including x = p."""
    o = as_oracle(d)
    return o(x, y) + math.sqrt(o(x, p) * o(y, p))


def _anchor_gap(o: Oracle, x: int, p: int) -> float:
    g = o(x, p)
    if g <= 0.0:
        raise PunctureDomainError(f"point {x} lies on puncture {p}")
    return g


def tau_p(d, x: int, y: int, p: int) -> float:
    """log(1 + 2 d(x,y) / sqrt(d(x,p) d(y,p))), in natural-log units.

    A metric on the punctured set for any base metric.
    """
    o = as_oracle(d)
    g = math.sqrt(_anchor_gap(o, x, p) * _anchor_gap(o, y, p))
    return math.log1p(2.0 * o(x, y) / g)


def tilde_tau_p(d, x: int, y: int, p: int) -> float:
    """log(1 + d(x,y) / sqrt(d(x,p) d(y,p))).

    Symmetric, nonnegative, zero iff x = y, but the triangle inequality can
    fail unless the base space is Ptolemaic.
    """
    o = as_oracle(d)
    g = math.sqrt(_anchor_gap(o, x, p) * _anchor_gap(o, y, p))
    return math.log1p(o(x, y) / g)


def mu_P(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """Product of mu_p over the puncture list."""
    o = as_oracle(d)
    out = 1.0
    for p in punctures:
        out *= o(x, y) + math.sqrt(o(x, p) * o(y, p))
    return out


def _require_punctures(punctures: Sequence[int]) -> Sequence[int]:
    if len(punctures) < 1:
        raise InputError("need at least one puncture")
    return punctures


def avg_tau(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """Arithmetic mean of tau_p over the punctures; a metric on D."""
    punctures = _require_punctures(punctures)
    return sum(tau_p(d, x, y, p) for p in punctures) / len(punctures)


def tilde_avg_tau(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """Arithmetic mean of tilde_tau_p over the punctures."""
    punctures = _require_punctures(punctures)
    return sum(tilde_tau_p(d, x, y, p) for p in punctures) / len(punctures)


def sup_tau(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """Pointwise maximum of tau_p over the punctures; a metric on D.

    No hyperbolicity bound is asserted for this variant.
    """
    punctures = _require_punctures(punctures)
    return max(tau_p(d, x, y, p) for p in punctures)


def j_metric(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """(1/2)[log(1 + d(x,y)/dist(x,P)) + log(1 + d(x,y)/dist(y,P))]."""
    punctures = _require_punctures(punctures)
    o = as_oracle(d)
    gx = min(_anchor_gap(o, x, p) for p in punctures)
    gy = min(_anchor_gap(o, y, p) for p in punctures)
    dxy = o(x, y)
    return 0.5 * (math.log1p(dxy / gx) + math.log1p(dxy / gy))


def j_tilde_metric(d, x: int, y: int, punctures: Sequence[int]) -> float:
    """max of the two logs averaged by ``j_metric``."""
    punctures = _require_punctures(punctures)
    o = as_oracle(d)
    gx = min(_anchor_gap(o, x, p) for p in punctures)
    gy = min(_anchor_gap(o, y, p) for p in punctures)
    dxy = o(x, y)
    return max(math.log1p(dxy / gx), math.log1p(dxy / gy))


class PuncturedSpec:
    """A base space, a puncture set, and a metric-variant selection.

    ``base`` is a PointCloud (with a named base ``metric``) or a raw
    DistanceMatrix over X. ``punctures`` are either indices into X (removed
    from the domain) or, for cloud bases, explicit coordinate rows placed
    outside the cloud. ``anchor`` is a position in the puncture list and is
    required by the one-point variants when k > 1 (it defaults to 0 when
    k = 1).
    """

    __slots__ = ("base", "metric", "punctures", "variant", "anchor", "_by_index")

    def __init__(
        self,
        base: PointCloud | DistanceMatrix,
        punctures,
        variant: str = "tau_p",
        anchor: int | None = None,
        metric: str = "euclidean",
    ):
        if variant not in VARIANTS:
            raise InputError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        if not isinstance(base, (PointCloud, DistanceMatrix)):
            raise InputError("base must be a PointCloud or a DistanceMatrix")
        if isinstance(base, PointCloud) and metric not in METRIC_NAMES:
            raise InputError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")
        punctures = list(punctures)
        if len(punctures) == 0:
            raise InputError("need at least one puncture")

        by_index = all(isinstance(p, (int, np.integer)) for p in punctures)
        if by_index:
            n = base.n if isinstance(base, DistanceMatrix) else len(base)
            punctures = [int(p) for p in punctures]
            if len(set(punctures)) != len(punctures):
                raise InputError("puncture indices must be pairwise distinct")
            for p in punctures:
                if not 0 <= p < n:
                    raise InputError(f"puncture index {p} out of range for n={n}")
            if len(punctures) >= n:
                raise InputError("punctures exhaust the space: empty domain")
            self.punctures = tuple(punctures)
        else:
            if isinstance(base, DistanceMatrix):
                raise InputError("punctures over a raw matrix must be indices into it")
            coords = np.array(punctures, dtype=float)
            if coords.ndim == 1:
                coords = coords.reshape(-1, 1)
            if coords.ndim != 2 or coords.shape[1] != base.dim:
                raise InputError(
                    f"puncture coordinates must be k x {base.dim}, got shape {coords.shape}"
                )
            if not np.all(np.isfinite(coords)):
                raise InputError("puncture coordinates contain NaN or infinity")
            for a in range(coords.shape[0]):
                for b in range(a + 1, coords.shape[0]):
                    if np.array_equal(coords[a], coords[b]):
                        raise InputError(f"punctures {a} and {b} coincide")
            coords.setflags(write=False)
            self.punctures = coords

        k = len(self.punctures)
        if anchor is None and variant in ONE_POINT_VARIANTS:
            if k == 1:
                anchor = 0
            else:
                raise InputError(f"variant {variant!r} needs an anchor when k={k} > 1")
        if anchor is not None and not 0 <= int(anchor) < k:
            raise InputError(f"anchor {anchor} out of range for k={k} punctures")

        self.base = base
        self.metric = metric
        self.variant = variant
        self.anchor = None if anchor is None else int(anchor)
        self._by_index = by_index

    @property
    def k(self) -> int:
        return len(self.punctures)

    @property
    def punctures_are_indices(self) -> bool:
        return self._by_index

    def with_variant(self, variant: str, anchor: int | None = None) -> "PuncturedSpec":
        return PuncturedSpec(
            self.base,
            list(self.punctures) if self._by_index else np.asarray(self.punctures),
            variant,
            self.anchor if anchor is None else anchor,
            self.metric,
        )

    def to_dict(self) -> dict:
        base = self.base.to_dict()
        punctures = (
            list(self.punctures)
            if self._by_index
            else [[float(v) for v in row] for row in self.punctures]
        )
        return {
            "base": base,
            "metric": self.metric,
            "punctures": punctures,
            "variant": self.variant,
            "anchor": self.anchor,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PuncturedSpec":
        try:
            base_obj = obj["base"]
            punctures = obj["punctures"]
            variant = obj["variant"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed punctured-spec JSON: {exc}") from exc
        if isinstance(base_obj, dict) and "entries" in base_obj:
            base: PointCloud | DistanceMatrix = DistanceMatrix.from_dict(base_obj)
        elif isinstance(base_obj, dict):
            base = PointCloud.from_dict(base_obj)
        else:
            raise InputError("spec base must be an inline cloud or matrix object")
        return cls(
            base,
            punctures,
            variant,
            obj.get("anchor"),
            obj.get("metric", "euclidean"),
        )


def _materialize(spec: PuncturedSpec) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Base distances restricted to the domain.

    Returns ``(dom, gaps, domain_indices)`` where ``dom[i, j]`` is the base
    distance between surviving points and ``gaps[i, a]`` the distance from
    surviving point i to puncture a. Raises PunctureDomainError when a
    domain point touches a puncture.
    """
    if spec.punctures_are_indices:
        if isinstance(spec.base, DistanceMatrix):
            full = spec.base.entries
            n = spec.base.n
        else:
            full = pairwise_distances(spec.base.points, spec.metric)
            n = len(spec.base)
        pset = set(spec.punctures)
        dom_idx = [i for i in range(n) if i not in pset]
        p_idx = list(spec.punctures)
        for a in range(len(p_idx)):
            for b in range(a + 1, len(p_idx)):
                if full[p_idx[a], p_idx[b]] == 0.0:
                    raise InputError(
                        f"punctures {p_idx[a]} and {p_idx[b]} sit at distance zero"
                    )
        dom = full[np.ix_(dom_idx, dom_idx)]
        gaps = full[np.ix_(dom_idx, p_idx)]
    else:
        pts = spec.base.points
        n = pts.shape[0]
        ext = np.vstack([pts, np.asarray(spec.punctures, dtype=float)])
        full = pairwise_distances(ext, spec.metric)
        dom_idx = list(range(n))
        dom = full[:n, :n]
        gaps = full[:n, n:]
        sub = full[n:, n:]
        k = gaps.shape[1]
        for a in range(k):
            for b in range(a + 1, k):
                if sub[a, b] == 0.0:
                    raise InputError(f"punctures {a} and {b} sit at distance zero")
    if dom.shape[0] == 0:
        raise InputError("empty domain after removing punctures")
    hit = np.argwhere(gaps == 0.0)
    if hit.size:
        i, a = int(hit[0, 0]), int(hit[0, 1])
        raise PunctureDomainError(
            f"domain point {dom_idx[i]} lies on puncture {a} (base distance is zero)"
        )
    return dom, gaps, dom_idx


def _one_point_values(dom: np.ndarray, gap: np.ndarray, factor: float) -> np.ndarray:
    g = np.sqrt(np.outer(gap, gap))
    return np.log1p(factor * dom / g)


def punctured_matrix(spec: PuncturedSpec) -> DistanceMatrix:
    """Materialize the selected variant over the domain D = X minus P.

    Rows/columns follow the surviving points in their original order. The
    output satisfies the DistanceMatrix structural invariants by
    construction; whether it satisfies the triangle inequality is a theorem
    about the variant, not a guarantee of this function.
    """
    dom, gaps, _ = _materialize(spec)
    variant = spec.variant
    if variant == "tau_p":
        vals = _one_point_values(dom, gaps[:, spec.anchor], 2.0)
    elif variant == "tilde_tau_p":
        vals = _one_point_values(dom, gaps[:, spec.anchor], 1.0)
    elif variant in ("avg_tau", "tilde_avg_tau"):
        factor = 2.0 if variant == "avg_tau" else 1.0
        acc = np.zeros_like(dom)
        for a in range(spec.k):
            acc += _one_point_values(dom, gaps[:, a], factor)
        vals = acc / spec.k
    elif variant == "sup_tau":
        vals = _one_point_values(dom, gaps[:, 0], 2.0)
        for a in range(1, spec.k):
            np.maximum(vals, _one_point_values(dom, gaps[:, a], 2.0), out=vals)
    elif variant in ("j", "j_tilde"):
        near = gaps.min(axis=1)
        t1 = np.log1p(dom / near[:, None])
        t2 = np.log1p(dom / near[None, :])
        vals = 0.5 * (t1 + t2) if variant == "j" else np.maximum(t1, t2)
    else:  # unreachable; PuncturedSpec validates the selector
        raise InputError(f"unknown variant {variant!r}")
    return DistanceMatrix(vals)
