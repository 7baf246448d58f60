import math

import numpy as np
import pytest
import scipy.sparse as sp

from randpd import metrics
from randpd.blockmat import BlockMatrix, Partition
from randpd.dataio import Dataset, gen_lad, gen_svm, partition
from randpd.metrics import (
    TraceRecord,
    bound_overlay,
    dual_value,
    dual_value_certified,
    dual_value_projected,
    fit_rate,
    primal_value,
    reference_solution,
)
from randpd.problems import ProblemSpec, build_lad, build_svm, constants
from randpd.proxlib import SqNorm, Zero
from randpd.schedules import make_schedule


def two_sample_svm(lam=1.0):
    data = Dataset(
        matrix=sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 1.0]])),
        labels=np.array([1.0, -1.0]),
    )
    return build_svm(data, lam, n_blocks=2, m_blocks=2)


def test_primal_value_examples():
    spec = two_sample_svm()
    assert primal_value(spec, np.zeros(2)) == pytest.approx(1.0)
    K_raw, b, _ = gen_lad(10, 5, density=0.7, noise_scale=0.1, seed=1)
    lad = build_lad(BlockMatrix(K_raw, partition(10, 2), partition(5, 5)), b, 0.1)
    assert primal_value(lad, np.zeros(5)) == pytest.approx(np.abs(b).sum())


def test_dual_value_examples():
    spec = two_sample_svm()
    G, viol = dual_value(spec, np.zeros(2))
    assert G == 0.0 and viol == 0.0
    K_raw, b, _ = gen_lad(6, 4, density=1.0, noise_scale=0.0, seed=2)
    lad = build_lad(BlockMatrix(K_raw, partition(6, 3), partition(4, 2)), b, 0.5)
    y = np.full(6, 2.0)  # outside the unit box of the l1 conjugate
    G, viol = dual_value(lad, y)
    assert G == math.inf
    assert viol >= 1.0
    # projected evaluation stays finite, certified is a true dual value
    Gp, violp = dual_value_projected(lad, y)
    assert np.isfinite(Gp) and violp == viol
    Gc, violc = dual_value_certified(lad, y)
    assert np.isfinite(Gc) and violc == viol
    assert primal_value(lad, np.zeros(4)) + Gc >= -1e-9


def test_certified_gap_nonnegative_everywhere():
    rng = np.random.default_rng(3)
    specs = [
        two_sample_svm(0.3),
        build_lad(
            BlockMatrix(gen_lad(12, 7, 0.6, seed=4)[0], partition(12, 4), partition(7, 3)),
            gen_lad(12, 7, 0.6, seed=4)[1],
            0.2,
        ),
    ]
    for spec in specs:
        for _ in range(30):
            x = rng.standard_normal(spec.K.p) * 3
            y = rng.standard_normal(spec.K.d) * 3
            G, _ = dual_value_certified(spec, y)
            assert primal_value(spec, x) + G >= -1e-9


def test_dual_grid_certifies_strong_duality():
    # minimize G over the dual box on a grid; matches -F* on a 2-D toy
    spec = two_sample_svm(lam=1.0)
    grid = np.linspace(-0.5, 0.0, 201)
    best_G = math.inf
    for y1 in grid:
        G, viol = dual_value(spec, np.array([y1, y1]))
        best_G = min(best_G, G)
    ys = np.meshgrid(grid, grid)
    G_all = []
    for y1 in grid[::10]:
        for y2 in grid[::10]:
            G, _ = dual_value(spec, np.array([y1, y2]))
            G_all.append(G)
    best_G = min(best_G, min(G_all))
    F_ref, _ = reference_solution(spec, 10_000)
    assert best_G == pytest.approx(-F_ref, abs=1e-2)


def test_fit_rate_power_laws():
    ks = np.arange(10, 2000)
    assert fit_rate(ks, 10.0 / ks).slope == pytest.approx(-1.0, abs=0.01)
    assert fit_rate(ks, 5.0 / ks**2).slope == pytest.approx(-2.0, abs=0.01)
    assert fit_rate(ks, np.full(len(ks), 3.0)).slope == pytest.approx(0.0, abs=0.01)
    # three-decade span
    ks = np.logspace(1, 4, 60)
    assert fit_rate(ks, 2.0 * ks**-1.5).slope == pytest.approx(-1.5, abs=0.01)


def test_fit_rate_validation():
    ks = np.arange(1, 30)
    with pytest.raises(ValueError, match="nonpositive"):
        fit_rate(ks, np.linspace(-1, 1, len(ks)))
    with pytest.raises(ValueError, match=">= 10"):
        fit_rate(np.arange(1, 6), np.ones(5))
    with pytest.raises(ValueError, match="tail"):
        fit_rate(ks, np.ones(len(ks)), tail_fraction=0.0)
    fit = fit_rate(ks, 1.0 / ks, tail_fraction=0.5)
    assert fit.k_lo >= 14


def test_reference_solution_contracts():
    K = BlockMatrix(np.array([[1.0]]), Partition([0, 1]), Partition([0, 1]))
    trivial = ProblemSpec(K=K, f_blocks=(Zero(),), g_blocks=(Zero(),))
    F_ref, _ = reference_solution(trivial, 10_000)
    assert F_ref == pytest.approx(0.0, abs=1e-9)
    quad = ProblemSpec(K=K, f_blocks=(SqNorm(1.0),), g_blocks=(Zero(),))
    F_ref, x_ref = reference_solution(quad, 10_000)
    assert abs(F_ref) <= 1e-6
    with pytest.raises(ValueError, match="1e4"):
        reference_solution(quad, 100)
    # refinement is monotone in the budget
    F2, _ = reference_solution(quad, 20_000)
    assert F2 <= F_ref + 1e-15


def test_trace_record_roundtrip():
    rec = TraceRecord(
        method="frpd", schedule="s1", seed=3, k=64, epoch=2,
        primal=1.25, dual=-0.5, gap=0.75, feas=1e-3, dual_violation=0.0,
        time_ms=12.5,
    )
    back = TraceRecord.from_csv_row(rec.csv_row())
    assert back == rec
    rec2 = TraceRecord(
        method="srpd", schedule="s3", seed=0, k=1, epoch=1,
        primal=1.0, dual=math.inf, gap=math.inf, feas=None, dual_violation=2.0,
        time_ms=0.0,
    )
    row = rec2.csv_row()
    assert ",," in row  # infinite dual is an empty cell
    back = TraceRecord.from_csv_row(row)
    assert back.dual == math.inf and back.feas is None
    with pytest.raises(ValueError):
        TraceRecord.from_csv_row("a,b,c")


def build_overlay_fixture():
    ds = gen_svm(40, 12, seed=3)
    spec = build_svm(ds, 0.05, n_blocks=4, m_blocks=4)
    co = constants(spec, D_phi=10.0, D_g=60.0)
    sched = make_schedule("s1", co, rho0=0.5)
    F_ref, x_ref = reference_solution(spec, 10_000)
    # long dual run for a reference multiplier
    from randpd import srpd

    s3 = make_schedule("s3", co, rho0=0.5)
    _, st = srpd.run(spec, s3, epochs=3000, seed=0, checkpoint_every=3000)
    return spec, co, sched, x_ref, st.y_bar


def test_bound_overlay_shapes_and_identities():
    spec, co, sched, x_star, y_star = build_overlay_fixture()
    x0 = np.zeros(12)
    y0 = np.zeros(40)
    ks = np.array([1.0, 10.0, 100.0, 1000.0, 2000.0])
    ov = bound_overlay(spec, co, sched, x0, y0, (x_star, y_star), ks)
    # at k = 1 the denominator tau0*k + 1 - tau0 equals 1
    E0_sq = ov.constants["E0_sq"]
    lip = ov.constants["lip"]
    expect = E0_sq + lip * np.sqrt(E0_sq) * np.sqrt(2.0 / sched.rho0)
    assert ov.primal_bound[0] == pytest.approx(expect)
    # asymptotically proportional to 1/k
    big = bound_overlay(spec, co, sched, x0, y0, (x_star, y_star),
                        np.array([1e5, 2e5]))
    assert big.primal_bound[0] / big.primal_bound[1] == pytest.approx(2.0, rel=1e-3)
    assert ov.dual_bound is not None and ov.gap_bound is not None
    assert np.all(ov.gap_bound >= ov.primal_bound)


def test_bound_overlay_requires_lipschitz_constant():
    spec, co, sched, x_star, y_star = build_overlay_fixture()
    co_no_mg = constants(spec)
    co_no_mg.M_g = None
    with pytest.raises(ValueError, match="M_g"):
        bound_overlay(spec, co_no_mg, sched, np.zeros(12), np.zeros(40),
                      (x_star, y_star), np.array([1.0]))


def test_observed_gap_below_overlay_median_of_seeds():
    spec, co, sched, x_star, y_star = build_overlay_fixture()
    from randpd import frpd

    gaps = []
    for seed in range(5):
        tr, _ = frpd.run(spec, sched, epochs=50, seed=seed, checkpoint_every=5)
        gaps.append([r.gap for r in tr])
    ks = np.array([r.k for r in tr], dtype=float)
    median = np.median(np.array(gaps), axis=0)
    ov = bound_overlay(spec, co, sched, np.zeros(12), np.zeros(40),
                       (x_star, y_star), ks)
    assert np.all(median <= ov.gap_bound)
