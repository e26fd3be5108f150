import math

import numpy as np
import pytest

from hypmetrics import (
    DistanceMatrix,
    InputError,
    PointCloud,
    PuncturedSpec,
    build_distance_matrix,
    check_lemma_K,
    check_lemma_nine,
    check_metric_axioms,
    check_mu_P_quasi_triangle,
    check_mu_bounds,
    check_product_lemma,
    check_ptolemaic,
    check_quasi_ptolemy,
    check_quasi_ptolemy_many,
    check_sandwich,
    mu_p,
    punctured_matrix,
    random_cloud,
)

COUNTEREXAMPLE = DistanceMatrix(
    [
        [0.0, 2.0, 1.0, 1.0],
        [2.0, 0.0, 1.0, 1.0],
        [1.0, 1.0, 0.0, 2.0],
        [1.0, 1.0, 2.0, 0.0],
    ]
)


def test_axioms_euclidean_clean():
    m = build_distance_matrix(random_cloud(20, 2, seed=3))
    rep = check_metric_axioms(m)
    assert rep.passed
    assert rep.meta["offdiagonal_positive"]
    assert rep.worst_slack <= 0.0 + 1e-12


def test_axioms_flag_duplicate_points():
    m = build_distance_matrix(PointCloud([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]))
    rep = check_metric_axioms(m)
    assert rep.passed  # duplicates are legal
    assert not rep.meta["offdiagonal_positive"]


def test_axioms_detect_violations_in_raw_array():
    bad = np.array([[0.0, 5.0, 1.0], [5.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    rep = check_metric_axioms(bad)  # 5 > 1 + 1 breaks the triangle
    kinds = {v.kind for v in rep.violations}
    assert kinds == {"triangle"}
    asym = np.array([[0.0, 1.0], [2.0, 0.0]])
    rep2 = check_metric_axioms(asym)
    assert "symmetry" in {v.kind for v in rep2.violations}


def test_axioms_counterexample_tilde_family():
    tilde = punctured_matrix(PuncturedSpec(COUNTEREXAMPLE, [0], variant="tilde_tau_p"))
    rep = check_metric_axioms(tilde)
    assert not rep.passed
    # domain order [x, y, z] = 0, 1, 2: exactly d(y,z) <= d(y,x) + d(x,z)
    # and its mirror fail
    assert sorted(v.indices for v in rep.violations) == [(1, 2, 0), (2, 1, 0)]
    slack = max(v.slack for v in rep.violations)
    assert slack == pytest.approx(0.029012295188969084, abs=1e-9)

    tau = punctured_matrix(PuncturedSpec(COUNTEREXAMPLE, [0], variant="tau_p"))
    assert check_metric_axioms(tau).passed


def test_ptolemy_euclidean_exhaustive():
    m = build_distance_matrix(random_cloud(18, 2, seed=5))
    rep = check_ptolemaic(m)
    assert rep.passed
    assert rep.meta["quadruples"] == math.comb(18, 4)


def test_ptolemy_equidistant_points():
    ones = np.ones((4, 4)) - np.eye(4)
    rep = check_ptolemaic(DistanceMatrix(ones))
    assert rep.passed
    # 1*1 vs 1*1 + 1*1: strictly slack, never equality
    assert rep.worst_slack == pytest.approx(-1.0)


def test_ptolemy_counterexample_matrix():
    # products: d(p,x)d(y,z) = 4 against 1 + 1 -> exactly one violating
    # quadruple, at the (p,x),(y,z) pairing
    rep = check_ptolemaic(COUNTEREXAMPLE)
    assert len(rep.violations) == 1
    v = rep.violations[0]
    assert v.indices == (0, 1, 2, 3)
    assert v.lhs == pytest.approx(8.0)  # 2 * max-product
    assert v.rhs == pytest.approx(6.0)  # sum of all three products


def test_sandwich_tau_and_avg():
    cloud = random_cloud(15, 2, seed=7)
    spec = PuncturedSpec(cloud, [[2.0, 2.0]], variant="tau_p")
    assert check_sandwich("tau", spec).passed
    multi = PuncturedSpec(
        cloud,
        np.array([[2.0, 2.0], [-1.0, 0.5], [0.5, 3.0], [3.0, -0.5], [1.5, 1.5]]),
        variant="avg_tau",
    )
    assert check_sandwich("avg", multi).passed


def test_sandwich_taxicab():
    cloud = random_cloud(40, 2, seed=9, low=-20.0, high=20.0)
    rep = check_sandwich("taxicab", cloud)
    assert rep.passed
    assert rep.meta["gap"] == pytest.approx(math.pi)


def test_sandwich_bad_inputs():
    with pytest.raises(InputError):
        check_sandwich("nope", random_cloud(5, 2, seed=1))
    with pytest.raises(InputError):
        check_sandwich("taxicab", random_cloud(5, 3, seed=1))
    with pytest.raises(InputError):
        check_sandwich("tau", random_cloud(5, 2, seed=1))


def test_mu_bounds_clean_and_degenerate():
    m = build_distance_matrix(random_cloud(30, 2, seed=11))
    rep = check_mu_bounds(m, p=0, q=1, samples=20000, seed=13)
    assert rep.passed
    assert rep.checked > 0
    # x = y makes the lower chain an equality; x = p collapses mu to d(p, y):
    # both live in the degenerate battery, so a pass covers them.


def test_mu_bounds_anchor_validation():
    m = build_distance_matrix(random_cloud(6, 2, seed=1))
    with pytest.raises(InputError):
        check_mu_bounds(m, p=17)


def test_lemma_nine_clean_with_ratio():
    m = build_distance_matrix(random_cloud(30, 2, seed=15))
    rep = check_lemma_nine(m, p=0, samples=20000, seed=17)
    assert rep.passed
    assert 0.0 < rep.meta["max_ratio"] <= 9.0 + 1e-9


def test_lemma_nine_all_points_equal():
    # quadruple of identical points: both sides reduce to products of
    # anchor distances; must pass via the degenerate battery
    m = build_distance_matrix(PointCloud([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]))
    rep = check_lemma_nine(m, p=0, samples=100, seed=1)
    assert rep.passed


def test_lemma_K_constant_and_skips():
    m = build_distance_matrix(random_cloud(30, 2, seed=19))
    rep = check_lemma_K(m, p=0, K=6.0, samples=20000, seed=21)
    assert rep.passed
    assert rep.meta["conclusion_constant"] == pytest.approx(4.5)
    assert rep.meta["applicable"] + rep.meta["skipped"] == rep.meta["sampled"]
    # equal-mu triples fail the hypothesis for any K > 3 and are skipped,
    # not checked: x = y tuples from the battery guarantee some skips
    assert rep.meta["skipped"] > 0


def test_lemma_K_rejects_small_K():
    m = build_distance_matrix(random_cloud(6, 2, seed=1))
    with pytest.raises(InputError):
        check_lemma_K(m, p=0, K=3.0)


def test_product_lemma_k1_and_degenerate():
    m = build_distance_matrix(random_cloud(20, 2, seed=23))
    rep = check_product_lemma(m, [0], samples=5000, seed=25)
    assert rep.passed
    rep8 = check_product_lemma(m, list(range(8)), samples=20000, seed=27)
    assert rep8.passed
    assert rep8.meta["k"] == 8


@pytest.mark.parametrize("k", [2, 4, 8])
def test_product_lemma_log_matches_direct_small_k(k):
    # cross-validation: log-domain evaluation against direct products
    m = build_distance_matrix(random_cloud(16, 2, seed=29)).entries
    P = list(range(k))
    rng = np.random.Generator(np.random.PCG64(31))
    for _ in range(200):
        # stay off the anchor indices so plain math.log is defined
        x, y, z = rng.integers(k, 16, size=3)
        a = [m[x, z] + math.sqrt(m[x, p] * m[z, p]) for p in P]
        b = [m[y, z] + math.sqrt(m[y, p] * m[z, p]) for p in P]
        lhs_direct = math.prod(ai + bi for ai, bi in zip(a, b))
        rhs_direct = 9.0 ** len(P) * (math.prod(a) + math.prod(b))
        lhs_log = sum(math.log(ai + bi) for ai, bi in zip(a, b))
        rhs_log = len(P) * math.log(9.0) + np.logaddexp(
            sum(math.log(v) for v in a), sum(math.log(v) for v in b)
        )
        assert lhs_log == pytest.approx(math.log(lhs_direct), rel=1e-9)
        assert rhs_log == pytest.approx(math.log(rhs_direct), rel=1e-9)
        assert lhs_direct <= rhs_direct * (1 + 1e-9)


def test_quasi_ptolemy_collinear():
    pts = PointCloud([0.0, 1.0, 2.0, 3.0])
    r = build_distance_matrix(pts).entries
    rep = check_quasi_ptolemy(r, K=1.0)
    assert rep.meta["hypothesis_satisfied"]
    assert rep.passed


def test_quasi_ptolemy_equal_distances():
    r = np.ones((4, 4)) - np.eye(4)
    rep = check_quasi_ptolemy(r, K=1.0)
    assert rep.passed


def test_quasi_ptolemy_hypothesis_failure_reported():
    r = np.zeros((4, 4))
    r[0, 1] = r[1, 0] = 100.0
    r[2, 3] = r[3, 2] = 1.0
    r[0, 2] = r[2, 0] = r[1, 3] = r[3, 1] = 1.0
    r[0, 3] = r[3, 0] = r[1, 2] = r[2, 1] = 1.0
    rep = check_quasi_ptolemy(r, K=1.0)
    assert rep.meta["hypothesis_satisfied"] is False
    assert rep.violations == []
    assert rep.meta["hypothesis_failures"]


def test_quasi_ptolemy_input_validation():
    with pytest.raises(InputError):
        check_quasi_ptolemy(np.zeros((3, 3)), K=1.0)
    with pytest.raises(InputError):
        check_quasi_ptolemy(np.zeros((4, 4)), K=0.5)
    bad = np.zeros((4, 4))
    bad[0, 1] = 1.0
    with pytest.raises(InputError):
        check_quasi_ptolemy(bad, K=1.0)


def test_quasi_ptolemy_from_mu_values():
    # mu_p between four cloud points satisfies the hypothesis with K = 3/2
    m = build_distance_matrix(random_cloud(25, 2, seed=33))
    rng = np.random.Generator(np.random.PCG64(35))
    for _ in range(50):
        pts = rng.choice(25, size=5, replace=False)
        p, quad = int(pts[0]), [int(v) for v in pts[1:]]
        r = np.zeros((4, 4))
        for i in range(4):
            for j in range(4):
                r[i, j] = mu_p(m, quad[i], quad[j], p)
        rep = check_quasi_ptolemy(r, K=1.5)
        assert rep.meta["hypothesis_satisfied"]
        assert rep.passed


def test_quasi_ptolemy_batch():
    m = build_distance_matrix(random_cloud(30, 2, seed=37)).entries
    rng = np.random.Generator(np.random.PCG64(39))
    quads = rng.integers(0, 30, size=(500, 4))
    rs = m[quads[:, :, None], quads[:, None, :]]
    rep = check_quasi_ptolemy_many(rs, K=1.0)
    assert rep.passed
    assert rep.meta["hypothesis_checked"] == 500


def test_mu_P_quasi_triangle():
    m = build_distance_matrix(random_cloud(25, 2, seed=41))
    rep = check_mu_P_quasi_triangle(m, [0, 1, 2, 3], triples=10000, quadruples=10000, seed=43)
    assert rep.passed
    rep1 = check_mu_P_quasi_triangle(m, [0], triples=2000, quadruples=2000, seed=45)
    assert rep1.passed
    rep2 = check_mu_P_quasi_triangle(m, [0, 1], triples=2000, quadruples=2000, seed=47)
    assert rep2.passed


def test_checkers_deterministic():
    m = build_distance_matrix(random_cloud(20, 2, seed=49))
    a = check_mu_bounds(m, p=0, q=1, samples=5000, seed=51)
    b = check_mu_bounds(m, p=0, q=1, samples=5000, seed=51)
    assert a.to_dict() == b.to_dict()
    a9 = check_lemma_nine(m, p=0, samples=5000, seed=53)
    b9 = check_lemma_nine(m, p=0, samples=5000, seed=53)
    assert a9.to_dict() == b9.to_dict()


def test_tolerance_must_be_positive():
    m = build_distance_matrix(random_cloud(6, 2, seed=1))
    with pytest.raises(InputError):
        check_metric_axioms(m, tol=0.0)


def test_report_serialization_shape():
    rep = check_metric_axioms(COUNTEREXAMPLE)
    d = rep.to_dict()
    assert set(d) == {"checked", "violations", "tolerance", "worst_slack", "meta"}
    assert d["violations"] == []
