import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from frobscope.errors import NonDominant, UnsupportedType
from frobscope.root_system import (
    BoxSpec,
    Smallness,
    box_measure,
    build_root_system,
    c_lambda,
    character_at,
    character_inner_product,
    density_normalization,
    distortion_constant,
    dominant_weights_up_to,
    is_small_box,
    n_functional,
    sato_tate_cdf,
    weyl_density,
    weyl_density_product,
    weyl_dimension,
    weyl_orbit,
)

TYPES = ["A1", "A2", "A3", "B2", "G2", "A1xA1", "A1xA2"]
ORDERS = {"A1": (2, 2), "A2": (6, 6), "A3": (12, 24), "B2": (8, 8), "G2": (12, 12), "A1xA1": (4, 4), "A1xA2": (8, 12)}


@pytest.mark.parametrize("name", TYPES)
def test_structure(name):
    rs = build_root_system(name)
    n_roots, n_w = ORDERS[name]
    assert len(rs.roots) == n_roots
    assert len(rs.positive_roots) == n_roots // 2
    assert rs.order == n_w
    assert np.all(rs.positive_coroots @ rs.rho > 0)
    # <alpha, alpha^vee> = 2
    assert np.all(np.einsum("ij,ij->i", rs.roots, rs.coroots) == 2)
    mats = {w.matrix.tobytes() for w in rs.weyl_elements}
    for u in rs.weyl_elements:
        assert round(np.linalg.det(u.matrix)) == u.sign
        assert np.rint(np.linalg.inv(u.matrix)).astype(np.int64).tobytes() in mats
        for v in rs.weyl_elements:
            prod = u.matrix @ v.matrix
            assert prod.tobytes() in mats
    # roots are a single W-stable set
    root_set = {tuple(r) for r in rs.roots.tolist()}
    for w in rs.weyl_elements:
        assert {tuple((w.matrix @ r).tolist()) for r in rs.roots} == root_set


def test_sign_homomorphism():
    for name in ["A3", "B2", "G2"]:
        rs = build_root_system(name)
        lookup = {w.matrix.tobytes(): w.sign for w in rs.weyl_elements}
        for u, v in itertools.product(rs.weyl_elements, repeat=2):
            assert lookup[(u.matrix @ v.matrix).tobytes()] == u.sign * v.sign


def test_examples():
    a1 = build_root_system("A1")
    assert a1.positive_roots.tolist() == [[2]]
    a2 = build_root_system("A2")
    assert a2.rho.tolist() == [1, 1]
    prod = build_root_system("A1xA1")
    assert prod.rank == 2
    for w in prod.weyl_elements:
        assert w.matrix[0, 1] == 0 and w.matrix[1, 0] == 0
    with pytest.raises(UnsupportedType):
        build_root_system("E8")


def test_weyl_orbit():
    a1 = build_root_system("A1")
    assert weyl_orbit(a1, (5,)) == [((5,), 1), ((-5,), -1)]
    a2 = build_root_system("A2")
    orb = weyl_orbit(a2, (1, 1))
    assert len({v for v, _ in orb}) == 6
    assert sum(s for _, s in orb) == 0
    for name in TYPES:
        rs = build_root_system(name)
        orb = weyl_orbit(rs, (0,) * rs.rank)
        assert len(orb) == rs.order and sum(s for _, s in orb) == 0


def test_n_functional_and_c_lambda():
    assert n_functional((0, 0, 0)) == 1
    assert n_functional((2, 3)) == 12
    assert n_functional((4, 2)) == 15 <= n_functional((1, 2)) * n_functional((3, 0))
    a1 = build_root_system("A1")
    for k in range(6):
        assert c_lambda(a1, (k,)) == pytest.approx(2 / (k + 1))
    g2 = build_root_system("G2")
    assert c_lambda(g2, (0, 0)) == 12
    # A2, omega_1: orbit {(1,0), (-1,1), (0,-1)}, each twice
    a2 = build_root_system("A2")
    assert c_lambda(a2, (1, 0)) == pytest.approx(2 * (1 / 2 + 1 / 4 + 1 / 2))


@settings(max_examples=1000)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=3), st.lists(st.integers(-50, 50), min_size=3, max_size=3))
def test_n_submultiplicative(a, b):
    s = [x + y for x, y in zip(a, b)]
    assert n_functional(s) <= n_functional(a) * n_functional(b)


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "G2"])
def test_bounded_distortion(name):
    rs = build_root_system(name)
    c = distortion_constant(rs)
    assert c <= distortion_constant(rs, uniform=True)
    rng = np.random.default_rng(0)
    for lam in rng.integers(-20, 21, (200, rs.rank)):
        sup = np.max(np.abs(lam))
        for A in rs.weight_matrices:
            assert np.max(np.abs(A @ lam)) <= c * sup


def test_dominant_enumeration():
    a1 = build_root_system("A1")
    assert dominant_weights_up_to(a1, 3) == [(1,), (2,), (3,)]
    a2 = build_root_system("A2")
    assert dominant_weights_up_to(a2, 1) == [(0, 1), (1, 0), (1, 1)]
    assert len(dominant_weights_up_to(a2, 10)) == 120
    assert len(dominant_weights_up_to(a2, 2, "l1")) == 5


def test_weyl_dimension():
    a2 = build_root_system("A2")
    assert weyl_dimension(a2, (1, 1)) == 8
    assert weyl_dimension(a2, (1, 0)) == 3
    for name in TYPES:
        assert weyl_dimension(build_root_system(name), (0,) * build_root_system(name).rank) == 1
    assert weyl_dimension(build_root_system("G2"), (1, 0)) == 7
    assert weyl_dimension(build_root_system("G2"), (0, 1)) == 14
    assert weyl_dimension(build_root_system("B2"), (1, 0)) == 5
    assert weyl_dimension(build_root_system("B2"), (0, 1)) == 4
    assert weyl_dimension(build_root_system("A3"), (0, 1, 0)) == 6
    with pytest.raises(NonDominant):
        weyl_dimension(a2, (-1, 0))


def test_character_examples():
    a1 = build_root_system("A1")
    theta = math.pi / 3
    assert character_at(a1, (1,), [theta / (2 * math.pi)]) == pytest.approx(1.0)
    for k in range(8):
        th = 0.77
        val = character_at(a1, (k,), [th / (2 * math.pi)])
        assert val.real == pytest.approx(math.sin((k + 1) * th) / math.sin(th), abs=1e-12)
    g2 = build_root_system("G2")
    for t in [(0.1, 0.37), (0.0, 0.0), (0.5, 0.25)]:
        assert character_at(g2, (0, 0), t) == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["A1", "A2", "B2", "G2", "A3"])
def test_character_near_identity(name):
    rs = build_root_system(name)
    t = 1e-4 * np.ones(rs.rank) / math.sqrt(rs.rank)
    for lam in dominant_weights_up_to(rs, 1):
        d = weyl_dimension(rs, lam)
        assert abs(character_at(rs, lam, t) - d) < 1e-6 * max(1, d) * 10
    # sup-norm <= 4 near the identity
    t = 1e-7 * np.arange(1, rs.rank + 1) / rs.rank
    for lam in dominant_weights_up_to(rs, 4 if rs.rank <= 2 else 2):
        d = weyl_dimension(rs, lam)
        assert abs(character_at(rs, lam, t) - d) <= 1e-5 * d


def test_character_at_identity_exact_singular():
    for name in ["A2", "G2"]:
        rs = build_root_system(name)
        for lam in dominant_weights_up_to(rs, 2):
            assert abs(character_at(rs, lam, np.zeros(rs.rank)) - weyl_dimension(rs, lam)) < 1e-6


def test_character_bounded_and_real():
    rs = build_root_system("B2")
    rng = np.random.default_rng(2)
    for t in rng.random((50, 2)):
        for lam in [(1, 0), (0, 1), (2, 1)]:
            v = character_at(rs, lam, t)
            assert abs(v.imag) < 1e-8
            assert abs(v) <= weyl_dimension(rs, lam) + 1e-9


def test_weyl_density_examples():
    a1 = build_root_system("A1")
    assert float(weyl_density(a1, [0.25])) == pytest.approx(4.0)
    assert float(weyl_density(a1, [0.0])) == pytest.approx(0.0, abs=1e-20)
    for name in ["A1", "A2", "A3", "B2", "G2", "A1xA1"]:
        rs = build_root_system(name)
        t = np.random.default_rng(1).random((500, rs.rank))
        d = weyl_density(rs, t)
        assert np.all(d >= -1e-12)
        assert np.max(np.abs(d - weyl_density_product(rs, t))) < 1e-9


def test_density_normalization():
    assert density_normalization(build_root_system("A1"), 2048) == pytest.approx(1, abs=1e-6)
    assert density_normalization(build_root_system("A2"), 512) == pytest.approx(1, abs=1e-6)
    for name in ["B2", "G2", "A1xA1"]:
        assert density_normalization(build_root_system(name), 64) == pytest.approx(1, abs=1e-12)


def test_orthonormality():
    a1 = build_root_system("A1")
    for j in range(11):
        for k in range(11):
            ip = character_inner_product(a1, (j,), (k,), 64)
            assert abs(ip - (j == k)) < 1e-8
    a2 = build_root_system("A2")
    ws = [(0, 0)] + dominant_weights_up_to(a2, 2)
    for lam in ws:
        for mu in ws:
            assert abs(character_inner_product(a2, lam, mu, 32) - (lam == mu)) < 1e-3


def test_box_measure_examples():
    a1 = build_root_system("A1")
    assert box_measure(a1, BoxSpec([(0.0, 0.5)])) == pytest.approx(1.0, abs=1e-12)
    assert box_measure(a1, BoxSpec([(0.0, 0.25)])) == pytest.approx(0.5, abs=1e-12)
    val = box_measure(a1, BoxSpec([(0.0, 1 / 6)]))
    assert val == pytest.approx(1 / 3 - math.sqrt(3) / (4 * math.pi), abs=1e-12)
    assert val == pytest.approx(0.1955, abs=1e-4)


def test_box_measure_matches_sato_tate_cdf():
    a1 = build_root_system("A1")
    rng = np.random.default_rng(4)
    for _ in range(50):
        t1, t2 = np.sort(rng.uniform(0, math.pi, 2))
        box = BoxSpec([(t1 / (2 * math.pi), t2 / (2 * math.pi))])
        assert box_measure(a1, box) == pytest.approx(sato_tate_cdf(t2) - sato_tate_cdf(t1), abs=1e-12)


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A1xA1"])
def test_box_measure_matches_adaptive_quadrature(name):
    rs = build_root_system(name)
    box = BoxSpec([(0.05, 0.21), (0.62, 0.93)])
    ref, err = integrate.nquad(
        lambda x, y: float(weyl_density_product(rs, np.array([x, y]))), [[0.05, 0.21], [0.62, 0.93]],
        opts={"epsabs": 1e-11},
    )
    assert box_measure(rs, box) == pytest.approx(ref, abs=1e-8)


def test_box_measure_wrapping_box():
    rs = build_root_system("A2")
    box = BoxSpec([(0.9, 1.1), (0.3, 0.4)])
    a = box_measure(rs, BoxSpec([(0.9, 0.9999999999999999), (0.3, 0.4)]))
    b = box_measure(rs, BoxSpec([(0.0, 0.1), (0.3, 0.4)]))
    assert box_measure(rs, box) == pytest.approx(a + b, abs=1e-12)


def test_is_small_examples():
    a1 = build_root_system("A1")
    assert is_small_box(a1, BoxSpec([(0.05, 0.45)])) is Smallness.SMALL
    assert is_small_box(a1, BoxSpec([(0.3, 0.7)])) is Smallness.NOT_SMALL
    with pytest.raises(ValueError):
        BoxSpec([(0.2, 0.2)])


def _sampled_overlap(rs, box, n=40000, seed=0):
    rng = np.random.default_rng(seed)
    pts = box.lo + rng.random((n, rs.rank)) * (box.hi - box.lo)
    lo, hi = box.lo, box.hi
    for B in rs.torus_matrices[1:]:
        img = pts @ B.T
        u = np.mod(img - lo, 1.0)
        if np.any(np.all(u < hi - lo, axis=1)):
            return True
    return False


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A1xA1", "A3"])
def test_is_small_agrees_with_sampling(name):
    rs = build_root_system(name)
    rng = np.random.default_rng(11)
    for _ in range(30 if rs.rank == 2 else 10):
        lo = rng.random(rs.rank)
        width = rng.uniform(0.02, 0.3, rs.rank)
        box = BoxSpec(list(zip(lo, lo + width)))
        verdict = is_small_box(rs, box)
        assert verdict is not Smallness.INCONCLUSIVE
        if _sampled_overlap(rs, box):
            assert verdict is Smallness.NOT_SMALL
        if verdict is Smallness.NOT_SMALL:
            assert _sampled_overlap(rs, box, n=400000, seed=1)


def test_small_box_near_wall_is_small():
    a2 = build_root_system("A2")
    # interior of the alcove region around (0.25, 0.25)
    assert is_small_box(a2, BoxSpec([(0.2, 0.3), (0.2, 0.3)])) is Smallness.SMALL
    # a box containing the identity is fixed by W
    assert is_small_box(a2, BoxSpec([(0.95, 1.05), (0.95, 1.05)])) is Smallness.NOT_SMALL
