"""Discrete evaluators for the five function-space quasi-norms.

Modulation: l^q over lattice k of <k>^s-weighted L^p norms of the uniform
pieces, with <k> = 1 + |k| (Euclidean). Besov: l^q over dyadic levels j of
2^(js)-weighted L^p norms. Triebel: the same data with the L^p and l^q
norms interchanged (spatial norm outside). Sobolev: L^p of the Bessel
multiplier (1+|xi|^2)^(s/2). Fourier-L^p: the Riemann L^r norm of the
spectrum itself.
"""
from __future__ import annotations

import numpy as np

from .exponents import Exponent
from .grid import (
    FREQUENCY,
    BandLimitError,
    GridFunction,
    apply_multiplier,
    lp_norm,
    lq_seq_norm,
    transform,
    _riemann_lp,
)
from .oracle import Family, SpaceSpec
from .partitions import (
    DyadicPartition,
    UniformPartition,
    build_dyadic,
    build_uniform,
)

# Boxes whose windowed spectrum falls below this relative level contribute 0.
_NEGLIGIBLE = 1e-15
# Spectral magnitudes below this fraction of the peak are transform roundoff
# (the toolkit calls a function band-limited when it is < 1e-12 of peak
# outside its band); quasi-norm exponents below 1 would otherwise amplify
# that floor into the leading digits.
_SPECTRUM_FLOOR = 1e-13


def _spectrum_of(f: GridFunction) -> np.ndarray:
    values = f.in_frequency().values
    mags = np.abs(values)
    if not np.all(np.isfinite(mags)):
        raise ValueError("samples contain NaN or Inf")
    peak = mags.max()
    if peak == 0.0:
        return values
    return np.where(mags > _SPECTRUM_FLOOR * peak, values, 0.0)


def _check_uniform_band(f: GridFunction, partition: UniformPartition) -> None:
    spectrum = f.in_frequency().values
    peak = np.abs(spectrum).max()
    if peak == 0.0:
        return
    ax = f.spec.freq_axis()
    outside = np.abs(ax) > partition.kmax - 1
    mask = outside if f.spec.d == 1 else outside[:, None] | outside[None, :]
    if mask.any() and np.abs(spectrum[mask]).max() > 1e-12 * peak:
        raise BandLimitError(
            f"spectral content beyond |xi|_inf = {partition.kmax - 1}; "
            "the uniform partition does not cover this function"
        )


def _check_dyadic_band(f: GridFunction, partition: DyadicPartition) -> None:
    spectrum = f.in_frequency().values
    peak = np.abs(spectrum).max()
    if peak == 0.0:
        return
    outside = f.spec.freq_radius() > 1.25 * 2 ** partition.levels
    if outside.any() and np.abs(spectrum[outside]).max() > 1e-12 * peak:
        raise BandLimitError(
            f"spectral content beyond |xi| = {1.25 * 2 ** partition.levels:g}; "
            "the dyadic partition does not cover this function"
        )


def box_piece_norms(f: GridFunction, p, uniform: UniformPartition):
    """(lattice points, L^p norms of the uniform pieces), skipping boxes with
    negligible windowed spectrum.

    The inverse transform skips the centering shifts: a circular index shift
    only modulates the output by a unimodular factor, which the magnitudes
    in the L^p sum cannot see.
    """
    spec = f.spec
    spectrum = _spectrum_of(f)
    peak = np.abs(spectrum).max()
    points = uniform.lattice()
    norms = np.zeros(len(points))
    buf = np.zeros(spec.shape(), dtype=np.complex128)
    scale = (spec.n / spec.period) ** spec.d
    ifft = np.fft.ifftn if spec.d > 1 else np.fft.ifft
    parseval = Exponent.of(p) == 2  # ||piece||_2^2 = P^-d sum |patch|^2, exactly
    prev = None
    for i, k in enumerate(points):
        slices, patch = uniform.patch(spectrum, k)
        if peak == 0.0 or np.abs(patch).max() <= _NEGLIGIBLE * peak:
            continue
        if parseval:
            norms[i] = np.sqrt(np.sum(np.abs(patch) ** 2) / spec.period ** spec.d)
            continue
        if prev is not None:
            buf[prev] = 0.0
        buf[slices] = patch
        prev = slices
        mags = scale * np.abs(ifft(buf))
        norms[i] = _riemann_lp(mags, spec.cell_volume, p)
    return points, norms


def modulation_norm(f: GridFunction, p, q, s,
                    uniform: UniformPartition | None = None) -> float:
    """|| <k>^s ||box_k f||_p ||_{l^q} over the partition's lattice."""
    if uniform is None:
        uniform = build_uniform(f.spec)
    _check_uniform_band(f, uniform)
    points, norms = box_piece_norms(f, p, uniform)
    sf = float(s)
    weights = np.array([(1.0 + np.sqrt(sum(c * c for c in k))) ** sf for k in points])
    return lq_seq_norm(norms, q, weights)


def besov_norm(f: GridFunction, p, q, s,
               dyadic: DyadicPartition | None = None) -> float:
    """|| 2^(js) ||delta_j f||_p ||_{l^q} over j = 0..levels."""
    if dyadic is None:
        dyadic = build_dyadic(f.spec)
    _check_dyadic_band(f, dyadic)
    spectrum = _spectrum_of(f)
    sf = float(s)
    norms = []
    for j in range(dyadic.levels + 1):
        piece = transform(
            GridFunction(f.spec, dyadic.window(j) * spectrum, FREQUENCY), "space")
        norms.append(lp_norm(piece, p))
    weights = 2.0 ** (sf * np.arange(dyadic.levels + 1))
    return lq_seq_norm(norms, q, weights)


def triebel_norm(f: GridFunction, p, q, s,
                 dyadic: DyadicPartition | None = None) -> float:
    """|| || 2^(js) delta_j f ||_{l^q_j} ||_p : pointwise l^q across levels,
    then the spatial L^p norm. p = inf is not defined here and is rejected."""
    p = Exponent.of(p)
    if p.is_infinite:
        raise ValueError("triebel_norm does not define the p = inf scale")
    if dyadic is None:
        dyadic = build_dyadic(f.spec)
    _check_dyadic_band(f, dyadic)
    spectrum = _spectrum_of(f)
    q = Exponent.of(q)
    sf = float(s)
    stack_q = None
    stack_max = None
    qf = None if q.is_infinite else float(q.value)
    for j in range(dyadic.levels + 1):
        piece = transform(
            GridFunction(f.spec, dyadic.window(j) * spectrum, FREQUENCY), "space")
        mags = (2.0 ** (sf * j)) * np.abs(piece.values)
        if q.is_infinite:
            stack_max = mags if stack_max is None else np.maximum(stack_max, mags)
        else:
            contrib = mags ** qf
            stack_q = contrib if stack_q is None else stack_q + contrib
    pointwise = stack_max if q.is_infinite else stack_q ** (1.0 / qf)
    return _riemann_lp(pointwise, f.spec.cell_volume, p)


def sobolev_norm(f: GridFunction, s, r) -> float:
    """|| (I - Laplacian)^(s/2) f ||_r via the multiplier (1+|xi|^2)^(s/2)."""
    radius = f.spec.freq_radius()
    multiplier = (1.0 + radius ** 2) ** (float(s) / 2.0)
    return lp_norm(apply_multiplier(f, multiplier), r)


def fourier_lp_norm(f: GridFunction, r) -> float:
    """Riemann L^r norm of the frequency-side samples (delta^d per cell)."""
    return _riemann_lp(_spectrum_of(f), f.spec.freq_cell_volume, r)


def space_norm(f: GridFunction, space: SpaceSpec,
               uniform: UniformPartition | None = None,
               dyadic: DyadicPartition | None = None) -> float:
    """Evaluate the quasi-norm described by a SpaceSpec."""
    if space.family is Family.MODULATION:
        return modulation_norm(f, space.p, space.q, space.s, uniform)
    if space.family is Family.BESOV:
        return besov_norm(f, space.p, space.q, space.s, dyadic)
    if space.family is Family.TRIEBEL:
        return triebel_norm(f, space.p, space.q, space.s, dyadic)
    if space.family is Family.SOBOLEV_W:
        return sobolev_norm(f, space.s, space.r)
    if space.family is Family.FOURIER_L:
        return fourier_lp_norm(f, space.r)
    raise ValueError(f"unknown family {space.family}")
