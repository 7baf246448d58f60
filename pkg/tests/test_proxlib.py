import numpy as np
import pytest

from randpd.proxlib import (
    BoxIndicator,
    Hinge,
    L1,
    SqNorm,
    Zero,
    moreau_prox_conjugate,
    prox_conjugate,
)
from support import (
    all_scalar_kinds,
    assert_prox_optimal,
    brute_prox_1d,
    numeric_conjugate,
    scalar_value,
    value_grid,
)


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_value_grid_consistency(fn):
    # keep the oracle's textbook formulas in sync with the library values
    rng = np.random.default_rng(1)
    ts = rng.uniform(-4, 4, size=40)
    grid = value_grid(fn, ts)
    for t, v in zip(ts, grid):
        assert scalar_value(fn, float(t)) == pytest.approx(v, abs=1e-14)


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_prox_matches_brute_force(fn):
    rng = np.random.default_rng(42)
    for _ in range(25):
        z = float(rng.uniform(-8, 8))
        step = float(rng.uniform(1e-3, 10))
        p = float(fn.prox(np.array([z]), step)[0])
        assert abs(p - brute_prox_1d(fn, z, step)) < 1e-3
        assert_prox_optimal(fn, z, step, p)


def test_prox_examples():
    # inactive hinge region keeps the point
    assert Hinge(1.0).prox(np.array([2.0]), 1.0)[0] == 2.0
    # soft threshold
    assert L1(0.5).prox(np.array([2.0]), 1.0)[0] == pytest.approx(1.5, abs=1e-15)
    # ridge shrink: mu*x + (x - z) = 0
    assert SqNorm(1.0).prox(np.array([1.0]), 1.0)[0] == pytest.approx(0.5, abs=1e-15)
    # hinge kink region maps to 1
    assert Hinge(1.0).prox(np.array([0.5]), 1.0)[0] == 1.0
    # hinge active region moves up by step*w
    assert Hinge(1.0).prox(np.array([-2.0]), 0.5)[0] == -1.5


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_prox_rejects_nonpositive_step(fn):
    with pytest.raises(ValueError):
        fn.prox(np.array([1.0]), 0.0)
    with pytest.raises(ValueError):
        fn.prox(np.array([1.0]), -1.0)


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_prox_step_to_zero_limit(fn):
    z = np.array([0.37, -1.4])
    out = fn.prox(z, 1e-12)
    ref = fn.prox(z, 1e-15)
    assert np.allclose(out, ref, atol=1e-9)
    if not isinstance(fn, BoxIndicator):
        assert np.allclose(out, z, atol=1e-9)


def test_conj_value_examples():
    # weighted hinge conjugate is linear on [-w, 0]
    assert Hinge(0.1).conj_value(np.array([-0.05])) == pytest.approx(-0.05)
    # quadratic conjugate |v|^2/(2 mu)
    assert SqNorm(2.0).conj_value(np.array([2.0])) == pytest.approx(1.0)
    # outside the l1 box: +inf with distance 1
    val = L1(1.0).conj_value(np.array([2.0]))
    assert val == np.inf
    assert L1(1.0).conj_domain_distance(np.array([2.0])) == pytest.approx(1.0)
    # zero function: indicator of the origin
    assert Zero().conj_value(np.array([0.0, 0.0])) == 0.0
    assert Zero().conj_domain_distance(np.array([3.0, 4.0])) == pytest.approx(5.0)
    # box support function
    assert BoxIndicator(-1.0, 2.0).conj_value(np.array([3.0, -2.0])) == pytest.approx(6.0 + 2.0)


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_conjugate_matches_numeric_sup(fn):
    rng = np.random.default_rng(3)
    for _ in range(8):
        v = float(rng.uniform(-2, 2))
        val, dist = fn.conj_value_projected(np.array([v]))
        if dist == 0.0:
            assert val == pytest.approx(numeric_conjugate(fn, v), abs=2e-3)


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_moreau_identity(fn):
    rng = np.random.default_rng(11)
    for _ in range(20):
        z = rng.uniform(-6, 6, size=4)
        rho = float(rng.uniform(1e-2, 8))
        lhs = rho * fn.prox(z / rho, 1.0 / rho) + fn.prox_conj(z, rho)
        assert np.max(np.abs(lhs - z)) <= 1e-12 * max(1.0, np.max(np.abs(z)))


def test_prox_conjugate_closed_forms_match_moreau():
    # the closed-form conjugate proxes are an independent route; compare
    # against the generic Moreau computation
    rng = np.random.default_rng(7)
    for fn in [L1(0.8), L1(0.5, shift=1.3), Hinge(0.7), SqNorm(1.7), Zero()]:
        for _ in range(10):
            z = rng.uniform(-5, 5, size=3)
            rho = float(rng.uniform(0.05, 5))
            direct = fn.prox_conj(z, rho)
            generic = moreau_prox_conjugate(fn, z, rho)
            assert np.allclose(direct, generic, atol=1e-12)


def test_prox_conjugate_examples():
    assert prox_conjugate(Zero(), np.array([5.0]), 1.0)[0] == 0.0
    # conjugate of |.| is the indicator of [-1,1]; its prox is the projection
    assert prox_conjugate(L1(1.0), np.array([2.0]), 1.0)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        prox_conjugate(L1(1.0), np.array([2.0]), 0.0)


def test_prox_conjugate_output_in_domain():
    rng = np.random.default_rng(19)
    for fn in [L1(0.8), Hinge(0.7), Zero(), SqNorm(0.0)]:
        for _ in range(20):
            z = rng.uniform(-20, 20, size=5)
            rho = float(rng.uniform(1e-3, 30))
            out = fn.prox_conj(z, rho)
            assert fn.conj_domain_distance(out) == 0.0


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_firm_nonexpansiveness(fn):
    rng = np.random.default_rng(23)
    for _ in range(15):
        z1 = rng.uniform(-5, 5, size=6)
        z2 = rng.uniform(-5, 5, size=6)
        step = float(rng.uniform(1e-2, 5))
        d = np.linalg.norm(fn.prox(z1, step) - fn.prox(z2, step))
        assert d <= np.linalg.norm(z1 - z2) + 1e-12


@pytest.mark.parametrize("fn", all_scalar_kinds(), ids=repr)
def test_young_fenchel(fn):
    rng = np.random.default_rng(29)
    for _ in range(15):
        x = float(rng.uniform(-3, 3))
        v = float(rng.uniform(-2, 2))
        fx = scalar_value(fn, x)
        fv = fn.conj_value(np.array([v]))
        if np.isfinite(fv) and np.isfinite(fx):
            assert fx + fv >= x * v - 1e-10


def test_curved_hinge_conjugate_regions():
    fn = Hinge(0.4, curvature=0.9)
    w, mu = 0.4, 0.9
    # v >= mu: quadratic branch
    assert fn.conj_value(np.array([2.0])) == pytest.approx(4.0 / (2 * mu))
    # middle: linear branch
    v = 0.7
    assert fn.conj_value(np.array([v])) == pytest.approx(v - mu / 2)
    # v <= mu - w: shifted quadratic branch
    v = -1.0
    assert fn.conj_value(np.array([v])) == pytest.approx((v + w) ** 2 / (2 * mu) - w)
    assert fn.mu == mu


def test_conj_domain_gauge():
    assert L1(2.0).conj_domain_gauge(np.array([1.0, -3.0])) == pytest.approx(1.5)
    assert Hinge(0.5).conj_domain_gauge(np.array([-1.0])) == pytest.approx(2.0)
    assert Hinge(0.5).conj_domain_gauge(np.array([0.1])) == np.inf
    assert Hinge(0.5, curvature=1.0).conj_domain_gauge(np.array([9.0])) == 0.0
    assert SqNorm(2.0).conj_domain_gauge(np.array([9.0])) == 0.0
    assert Zero().conj_domain_gauge(np.array([0.0])) == 0.0
    assert Zero().conj_domain_gauge(np.array([1e-300])) == np.inf


def test_parameter_validation():
    with pytest.raises(ValueError):
        SqNorm(-1.0)
    with pytest.raises(ValueError):
        Hinge(0.0)
    with pytest.raises(ValueError):
        Hinge(1.0, curvature=-0.1)
    with pytest.raises(ValueError):
        L1(-0.5)
    with pytest.raises(ValueError):
        BoxIndicator(1.0, -1.0)
    with pytest.raises(ValueError):
        BoxIndicator(-np.inf, 0.0)
