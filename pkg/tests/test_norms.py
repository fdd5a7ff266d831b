"""The five quasi-norm evaluators: exact bookkeeping cases and stability."""
from fractions import Fraction

import numpy as np
import pytest

from modemb.families import (
    family_annulus,
    family_modulated_train,
    family_single_box,
    grid_for,
    random_band_limited,
    smallest_box_point,
)
from modemb.grid import FREQUENCY, SPACE, BandLimitError, GridFunction, GridSpec, \
    lp_norm, transform
from modemb.norms import (
    besov_norm,
    fourier_lp_norm,
    modulation_norm,
    sobolev_norm,
    space_norm,
    triebel_norm,
)
from modemb.oracle import SpaceSpec
from modemb.partitions import build_dyadic, build_uniform

F = Fraction

BOX_SPEC = grid_for("single_box", level=6)


@pytest.fixture(scope="module")
def box_partitions():
    return build_uniform(BOX_SPEC), build_dyadic(BOX_SPEC)


@pytest.fixture(scope="module")
def small_spec():
    return GridSpec(d=1, n=2 ** 12, oversampling=8)


def _zero(spec):
    return GridFunction(spec, np.zeros(spec.shape()), SPACE)


@pytest.mark.parametrize("p,q", [(1, 1), (2, "1/2"), ("inf", 4), ("3/2", "inf")])
def test_modulation_single_box_equals_lp(box_partitions, p, q):
    uniform, _ = box_partitions
    f = family_single_box(BOX_SPEC, 6)
    assert modulation_norm(f, p, q, 0, uniform) == pytest.approx(
        lp_norm(f, p), rel=1e-10)


def test_modulation_single_box_weighted(box_partitions):
    uniform, _ = box_partitions
    f = family_single_box(BOX_SPEC, 6)
    k = abs(smallest_box_point(6, 1)[0])
    s = F(3, 2)
    expected = (1.0 + k) ** 1.5 * lp_norm(f, 2)
    assert modulation_norm(f, 2, 2, s, uniform) == pytest.approx(expected, rel=1e-10)


def test_modulation_zero(box_partitions):
    uniform, _ = box_partitions
    assert modulation_norm(_zero(BOX_SPEC), 2, 2, 0, uniform) == 0.0


ANNULUS_SPEC = grid_for("annulus", level=6)


@pytest.fixture(scope="module")
def annulus_partitions():
    return build_uniform(ANNULUS_SPEC), build_dyadic(ANNULUS_SPEC)


def test_modulation_annulus_growth(annulus_partitions):
    """||f_l||_{M_{p,q}} within a factor 4 of 2^{l d / q}."""
    uniform, _ = annulus_partitions
    ratios = []
    for level in (4, 5, 6):
        f = family_annulus(ANNULUS_SPEC, level)
        value = modulation_norm(f, 2, 1, 0, uniform)
        ratios.append(value / 2 ** level)
    assert max(ratios) / min(ratios) < 4.0


def test_besov_single_box(box_partitions):
    _, dyadic = box_partitions
    s = F(-1, 2)
    values = []
    for level in (4, 5, 6):
        f = family_single_box(BOX_SPEC, level)
        values.append(besov_norm(f, 2, 2, s, dyadic) / 2 ** (float(s) * level))
    # exactly one dyadic block is active, so the ratio is the constant ||f||_2
    assert max(values) / min(values) == pytest.approx(1.0, rel=1e-10)


def test_besov_zero(box_partitions):
    _, dyadic = box_partitions
    assert besov_norm(_zero(BOX_SPEC), 1, 1, 2, dyadic) == 0.0


def test_besov_annulus_growth(annulus_partitions):
    """||f_l||_{B_{p0}} tracks 2^{l(s + d(1 - 1/p0))}."""
    _, dyadic = annulus_partitions
    s, p0 = F(1, 2), 2
    ratios = []
    for level in (4, 5, 6):
        f = family_annulus(ANNULUS_SPEC, level)
        predicted = 2 ** (float(s + F(1, 2)) * level)
        ratios.append(besov_norm(f, p0, 1, s, dyadic) / predicted)
    assert max(ratios) / min(ratios) < 4.0


def test_triebel_single_block_equals_besov(box_partitions):
    _, dyadic = box_partitions
    f = family_single_box(BOX_SPEC, 5)
    for p, q, s in [(2, 1, F(1, 2)), (1, 4, 0), (4, "1/2", -1)]:
        assert triebel_norm(f, p, q, s, dyadic) == pytest.approx(
            besov_norm(f, p, q, s, dyadic), rel=1e-10)


def test_triebel_rejects_p_inf(box_partitions):
    _, dyadic = box_partitions
    f = family_single_box(BOX_SPEC, 5)
    with pytest.raises(ValueError, match="inf"):
        triebel_norm(f, "inf", 2, 0, dyadic)


def test_triebel_besov_sandwich(small_spec):
    """B_{p, p^q} -> F_{p,q} -> B_{p, p|q} with stable constants."""
    dyadic = build_dyadic(small_spec)
    rng = np.random.default_rng(51)
    band = 1.25 * 2 ** dyadic.levels
    low, high = [], []
    for _ in range(8):
        f = random_band_limited(small_spec, band_radius=band * 0.9, rng=rng)
        for p, q in [(2, 1), (F(3, 2), 4), (4, 2)]:
            pq_min = min(F(p), F(q))
            pq_max = max(F(p), F(q))
            tn = triebel_norm(f, p, q, 0, dyadic)
            low.append(tn / besov_norm(f, p, pq_min, 0, dyadic))
            high.append(besov_norm(f, p, pq_max, 0, dyadic) / tn)
    assert max(low) < 4.0 and max(high) < 4.0
    assert max(low) / min(low) < 4.0 and max(high) / min(high) < 4.0


def test_sobolev_s0_is_lp(small_spec):
    rng = np.random.default_rng(53)
    f = random_band_limited(small_spec, band_radius=40, rng=rng)
    for r in (1, 2, "inf"):
        assert sobolev_norm(f, 0, r) == pytest.approx(lp_norm(f, r), rel=1e-12)


def test_sobolev_lattice_mode():
    """A single modulated bump scales like <k>-weighted L^r."""
    k = 37
    spec = grid_for("modulated_train", max_abs_k=k)
    f = family_modulated_train(spec, {k: 1.0})
    for s in (1, -2):
        expected = (1.0 + k ** 2) ** (s / 2.0) * lp_norm(f, 2)
        assert sobolev_norm(f, s, 2) == pytest.approx(expected, rel=0.02)
    assert sobolev_norm(_zero(spec), 1, 2) == 0.0


def test_fourier_lp_plateau(small_spec):
    values = np.zeros(small_spec.n, dtype=complex)
    ax = small_spec.freq_axis()
    mask = np.abs(ax) <= 3.0
    values[mask] = 1.0
    f = transform(GridFunction(small_spec, values, FREQUENCY), SPACE)
    measure = small_spec.freq_cell_volume * mask.sum()
    for r in (1, 2, 4):
        assert fourier_lp_norm(f, r) == pytest.approx(measure ** (1.0 / r), rel=1e-9)
    assert fourier_lp_norm(_zero(small_spec), 2) == 0.0


def test_fourier_lp_modulated_train():
    """||fhat||_r proportional to the coefficient l^r norm, same constant."""
    rng = np.random.default_rng(59)
    spec = grid_for("modulated_train", max_abs_k=6)
    for r in (1, 2, 4):
        ratios = []
        for _ in range(5):
            coeffs = {k: rng.standard_normal() + 1j * rng.standard_normal()
                      for k in range(-6, 7)}
            f = family_modulated_train(spec, coeffs)
            seq = np.sum(np.abs(np.array(list(coeffs.values()))) ** r) ** (1 / r)
            ratios.append(fourier_lp_norm(f, r) / seq)
        assert max(ratios) == pytest.approx(min(ratios), rel=1e-9)


def test_norm_homogeneity(box_partitions):
    uniform, dyadic = box_partitions
    f = family_single_box(BOX_SPEC, 5)
    alpha = -3.7 + 0.9j
    g = GridFunction(BOX_SPEC, alpha * f.values, SPACE)
    checks = [
        (lambda h: modulation_norm(h, "3/2", "1/2", F(1, 2), uniform)),
        (lambda h: besov_norm(h, 2, 1, -1, dyadic)),
        (lambda h: triebel_norm(h, 2, 4, 1, dyadic)),
        (lambda h: sobolev_norm(h, 1, 2)),
        (lambda h: fourier_lp_norm(h, "1/2")),
    ]
    for norm in checks:
        assert norm(g) == pytest.approx(abs(alpha) * norm(f), rel=1e-10)


def test_modulation_monotone_embedding_constants(small_spec):
    """s0 <= s1, p1 <= p0, q1 <= q0: the M_{p1,q1}^{s1} norm dominates with a
    constant stable across random inputs."""
    uniform = build_uniform(small_spec)
    rng = np.random.default_rng(61)
    ratios = []
    for _ in range(50):
        f = random_band_limited(small_spec, band_radius=50, rng=rng)
        big = modulation_norm(f, 1, 1, 1, uniform)       # p1 = q1 = 1, s1 = 1
        small = modulation_norm(f, 2, 4, F(1, 2), uniform)
        ratios.append(small / big)
    assert max(ratios) / min(ratios) < 8.0


def test_modulation_q_smoothness_tradeoff(small_spec):
    """q1 < q with s + d/q > s1 + d/q1: the (q, s) norm dominates stably."""
    uniform = build_uniform(small_spec)
    rng = np.random.default_rng(67)
    s, q = F(2), 4          # s + 1/q = 9/4
    s1, q1 = F(1), 2        # s1 + 1/q1 = 3/2
    ratios = []
    for _ in range(50):
        f = random_band_limited(small_spec, band_radius=50, rng=rng)
        ratios.append(modulation_norm(f, 2, q1, s1, uniform)
                      / modulation_norm(f, 2, q, s, uniform))
    assert max(ratios) / min(ratios) < 8.0


def test_littlewood_paley_ratio(small_spec):
    """F_{p,2}^s and W^{s,p} agree up to stable constants for 1 < p < inf."""
    dyadic = build_dyadic(small_spec)
    rng = np.random.default_rng(71)
    for p in (F(4, 3), 2, 4):
        ratios = []
        for _ in range(10):
            f = random_band_limited(small_spec, band_radius=60, rng=rng)
            ratios.append(triebel_norm(f, p, 2, 1, dyadic) / sobolev_norm(f, 1, p))
        assert all(0.1 < r < 10.0 for r in ratios)
        assert max(ratios) / min(ratios) < 4.0


def test_band_violation_errors(small_spec):
    uniform = build_uniform(small_spec)
    dyadic = build_dyadic(small_spec, levels=3)
    values = np.zeros(small_spec.n, dtype=complex)
    ax = small_spec.freq_axis()
    values[np.argmin(np.abs(ax - (uniform.kmax + 5)))] = 1.0
    f = transform(GridFunction(small_spec, values, FREQUENCY), SPACE)
    with pytest.raises(BandLimitError):
        modulation_norm(f, 2, 2, 0, uniform)
    with pytest.raises(BandLimitError):
        besov_norm(f, 2, 2, 0, dyadic)


def test_nan_rejected(small_spec):
    bad = np.ones(small_spec.n, dtype=complex)
    bad[7] = np.nan
    f = GridFunction(small_spec, bad, SPACE)
    with pytest.raises(ValueError):
        sobolev_norm(f, 0, 2)


def test_space_norm_dispatch(box_partitions):
    uniform, dyadic = box_partitions
    f = family_single_box(BOX_SPEC, 5)
    pairs = [
        (SpaceSpec.modulation(2, 1, F(1, 2)),
         modulation_norm(f, 2, 1, F(1, 2), uniform)),
        (SpaceSpec.besov(2, 1, F(1, 2)), besov_norm(f, 2, 1, F(1, 2), dyadic)),
        (SpaceSpec.triebel(2, 1, F(1, 2)), triebel_norm(f, 2, 1, F(1, 2), dyadic)),
        (SpaceSpec.sobolev(2, F(1, 2)), sobolev_norm(f, F(1, 2), 2)),
        (SpaceSpec.fourier_l(2), fourier_lp_norm(f, 2)),
    ]
    for space, expected in pairs:
        assert space_norm(f, space, uniform, dyadic) == expected
