"""Generators for the extremal function families driving the experiments.

Every family is synthesized exactly on the frequency side (compact spectral
support, so the grid function is the exact periodization of the continuum
object) and transformed to space once. Identical parameters yield
bit-identical samples.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exponents import as_fraction
from .grid import (
    FREQUENCY,
    SPACE,
    BandLimitError,
    GridFunction,
    GridSpec,
    transform,
)
from .partitions import (
    ResolutionError,
    build_dyadic,
    index_set,
    smooth_profile,
)


class PeriodError(ValueError):
    """Spatial period too small for the requested translates."""


def _skewed_bump(edge0: float, edge1: float, power: float):
    """C-infinity cutoff with an edge biased toward 1: the mollifier blend
    evaluated at ((t-edge0)/(edge1-edge0))^power. Wider effective plateau
    keeps the comb family's sup norms flat across the level range."""
    inner = smooth_profile(0.0, 1.0)

    def prof(t):
        t = np.asarray(t, dtype=float)
        x = np.clip((t - edge0) / (edge1 - edge0), 0.0, 1.0)
        return inner(x ** power)

    return prof


# eta-hat style per-axis bump: 1 on |t| <= 7/64 (in particular on the
# [-1/16, 1/16] core), 0 outside |t| < 1/8.
NARROW_BUMP = _skewed_bump(7.0 / 64.0, 1.0 / 8.0, 6.0)
# Wide kernel profile: 1 on |t| <= 1, 0 outside |t| < 9/8.
WIDE_BUMP = smooth_profile(1.0, 9.0 / 8.0)


def _empty_spectrum(spec: GridSpec) -> np.ndarray:
    return np.zeros(spec.shape(), dtype=np.complex128)


def _finish(spec: GridSpec, values: np.ndarray) -> GridFunction:
    _assert_margin(spec, values)
    return transform(GridFunction(spec, values, FREQUENCY), SPACE)


def _assert_margin(spec: GridSpec, freq_values: np.ndarray) -> None:
    peak = np.abs(freq_values).max()
    if peak == 0.0:
        return
    margin = float(spec.omega) * (1.0 - 2.0 / spec.n)
    outside = np.abs(spec.freq_axis()) > margin
    mask = outside if spec.d == 1 else outside[:, None] | outside[None, :]
    if mask.any() and np.abs(freq_values[mask]).max() > 1e-12 * peak:
        raise BandLimitError("family spectrum violates the grid band margin")


def _axis_offsets(spec: GridSpec, center_k: int, half_width: int) -> np.ndarray:
    """Sample indices center + o for o in [-w, w], or raise if off the grid."""
    center = spec.n // 2 + center_k * spec.oversampling
    lo, hi = center - half_width, center + half_width
    if lo < 0 or hi >= spec.n:
        raise BandLimitError(
            f"box at lattice point {center_k} (half-width {half_width} samples) "
            "leaves the frequency grid"
        )
    return np.arange(lo, hi + 1)


def _box_term_axis(spec: GridSpec, k: int, width: float, modulated: bool):
    """(indices, values) of one axis factor exp(-i k (xi - k)) * eta_hat((xi-k)/?).

    ``width`` rescales the bump: eta((x-k)/a) has spectrum a * eta_hat(a(xi-k))
    per axis, supported in |xi - k| < 1/(8a).
    """
    m = spec.oversampling
    a = float(width)
    w = int(np.ceil(m / (8.0 * a)))
    idx = _axis_offsets(spec, k, w)
    offsets = (idx - (spec.n // 2 + k * m)) / m
    vals = a * NARROW_BUMP(np.abs(a * offsets)).astype(np.complex128)
    if modulated:
        vals = vals * np.exp(-1j * k * offsets)
    return idx, vals


def _add_box(spectrum: np.ndarray, spec: GridSpec, k: tuple[int, ...],
             coeff: complex, width: float = 1.0, modulated: bool = True) -> None:
    axes = [_box_term_axis(spec, c, width, modulated) for c in k]
    if spec.d == 1:
        idx, vals = axes[0]
        spectrum[idx] += coeff * vals
    else:
        (ix, vx), (iy, vy) = axes
        spectrum[np.ix_(ix, iy)] += coeff * np.outer(vx, vy)


def _check_period(spec: GridSpec, points) -> None:
    max_k = max((max(abs(c) for c in k) for k in points), default=0)
    if spec.period < 4.0 * max_k - 1e-9:
        raise PeriodError(
            f"period {spec.period:.4g} < 4 * max|k| = {4 * max_k}; translates overlap"
        )


def dilation_spectrum(spec: GridSpec, lam) -> np.ndarray:
    lam = as_fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError(f"dilation parameter must satisfy 0 < lambda <= 1, got {lam}")
    if lam * spec.oversampling < 48:
        raise ResolutionError(
            f"lambda = {lam} leaves fewer than 6 samples across the bump; "
            f"need oversampling >= {int(np.ceil(48 / lam))}"
        )
    lf = float(lam)
    ax = spec.freq_axis()
    axis_vals = NARROW_BUMP(np.abs(ax) / lf)
    scale = lf ** (-spec.d)
    out = _empty_spectrum(spec)
    if spec.d == 1:
        out[:] = scale * axis_vals
    else:
        out[:] = scale * np.outer(axis_vals, axis_vals)
    return out


def family_dilation(spec: GridSpec, lam) -> GridFunction:
    """f_lambda(x) = f(lambda x) with spectrum lambda^-d eta(xi/lambda),
    supported in lambda [-1/8, 1/8]^d."""
    return _finish(spec, dilation_spectrum(spec, lam))


def smallest_box_point(level: int, d: int) -> tuple[int, ...]:
    members = index_set("A", level, d).members
    if not members:
        raise ValueError(f"A_{level} is empty in dimension {d}")
    return members[0]


def single_box_spectrum(spec: GridSpec, level: int) -> np.ndarray:
    if level < 2:
        raise ValueError(f"single-box family needs level >= 2, got {level}")
    k = smallest_box_point(level, spec.d)
    out = _empty_spectrum(spec)
    _add_box(out, spec, k, 1.0, width=1.0, modulated=False)
    return out


def family_single_box(spec: GridSpec, level: int) -> GridFunction:
    """Spectrum eta(xi - k_l) at the lexicographically smallest k_l in A_l:
    exactly one active uniform box, dyadic levels within |j - l| <= 3."""
    return _finish(spec, single_box_spectrum(spec, level))


def annulus_spectrum(spec: GridSpec, level: int) -> np.ndarray:
    dyadic = build_dyadic(spec, levels=max(level, 1))
    return dyadic.window(level).astype(np.complex128)


def family_annulus(spec: GridSpec, level: int) -> GridFunction:
    """Spectrum phi_level: the dyadic window itself."""
    return _finish(spec, annulus_spectrum(spec, level))


def comb_spectrum(spec: GridSpec, level: int, width=1, signs=None) -> np.ndarray:
    a = as_fraction(width)
    if not 0 < a <= 1:
        raise ValueError(f"comb width must satisfy 0 < a <= 1, got {a}")
    points = index_set("A", level, spec.d).members
    if not points:
        raise ValueError(f"A_{level} is empty in dimension {spec.d}")
    _check_period(spec, points)
    if signs is None:
        signs = [1.0] * len(points)
    if len(signs) != len(points):
        raise ValueError(f"expected {len(points)} coefficients, got {len(signs)}")
    out = _empty_spectrum(spec)
    for k, c in zip(points, signs):
        _add_box(out, spec, k, c, width=float(a), modulated=True)
    return out


def family_lattice_comb(spec: GridSpec, level: int, width=1,
                        signs=None) -> GridFunction:
    """f(x) = sum_{k in A_level} e^{ikx} eta((x-k)/a): modulated translates
    whose spectra tile the boxes k + [-1/(8a), 1/(8a)]^d."""
    return _finish(spec, comb_spectrum(spec, level, width, signs))


_SUM_KINDS = {
    "single_box": single_box_spectrum,
    "annulus": annulus_spectrum,
    "lattice_comb": comb_spectrum,
}


def family_weighted_sum(spec: GridSpec, kind: str, coefficients) -> GridFunction:
    """sum_l a_l f_l over distinct levels of a base family.

    ``coefficients`` is a sequence of (level, coefficient). Annulus members
    need a level gap >= 2 (adjacent dyadic windows overlap); the box and comb
    spectra are disjoint across distinct levels already.
    """
    if kind not in _SUM_KINDS:
        raise ValueError(f"unknown weighted-sum kind {kind!r}")
    pairs = sorted((int(level), coeff) for level, coeff in coefficients)
    levels = [level for level, _ in pairs]
    if len(set(levels)) != len(levels):
        raise ValueError(f"levels must be distinct, got {levels}")
    if kind == "annulus":
        gaps = [b - a for a, b in zip(levels, levels[1:])]
        if any(g < 2 for g in gaps):
            raise ValueError(
                f"annulus members at levels {levels} overlap beyond adjacency; "
                "need a gap of at least 2"
            )
    synth = _SUM_KINDS[kind]
    out = _empty_spectrum(spec)
    for level, coeff in pairs:
        out += complex(coeff) * synth(spec, level)
    return _finish(spec, out)


def family_modulated_train(spec: GridSpec, coefficients) -> GridFunction:
    """f(x) = sum_k a_k e^{ikx} eta(x - k) over a finite lattice support:
    box_k f = a_k e^{ikx} eta(x - k) exactly."""
    items = []
    for k, c in dict(coefficients).items():
        if isinstance(k, (int, np.integer)):
            k = (int(k),)
        items.append((tuple(int(c_) for c_ in k), complex(c)))
    items.sort(key=lambda kv: kv[0])
    for k, _ in items:
        if len(k) != spec.d:
            raise ValueError(f"lattice point {k} does not match dimension {spec.d}")
    _check_period(spec, [k for k, _ in items])
    out = _empty_spectrum(spec)
    for k, c in items:
        if c != 0:
            _add_box(out, spec, k, c, width=1.0, modulated=True)
    return _finish(spec, out)


def kernel_spectrum(spec: GridSpec, t) -> np.ndarray:
    t = as_fraction(t)
    if not 0 < t <= 1:
        raise ValueError(f"kernel parameter must satisfy 0 < t <= 1, got {t}")
    tf = float(t)
    ax = spec.freq_axis()
    axis_vals = WIDE_BUMP(np.abs(tf * ax))
    out = _empty_spectrum(spec)
    if spec.d == 1:
        out[:] = axis_vals
    else:
        out[:] = np.outer(axis_vals, axis_vals)
    return out


def family_dilated_kernel(spec: GridSpec, t) -> GridFunction:
    """f(x) = t^-d eta(x/t) with eta_hat = 1 on [-1,1]^d: the spectrum
    eta_hat(t xi) equals 1 on (1/t)[-1,1]^d."""
    return _finish(spec, kernel_spectrum(spec, t))


def random_band_limited(spec: GridSpec, band_radius: float, center=None,
                        rng=None, seed: int = 0) -> GridFunction:
    """Random trigonometric polynomial band-limited to the Euclidean ball
    B(center, band_radius): iid complex gaussian spectral coefficients."""
    if rng is None:
        rng = np.random.default_rng(seed)
    ax = spec.freq_axis()
    if spec.d == 1:
        cx = 0.0 if center is None else float(np.atleast_1d(center)[0])
        dist = np.abs(ax - cx)
    else:
        c = (0.0, 0.0) if center is None else tuple(float(v) for v in center)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        dist = np.sqrt((gx - c[0]) ** 2 + (gy - c[1]) ** 2)
    mask = dist <= band_radius
    margin = float(spec.omega) * (1.0 - 2.0 / spec.n)
    center_inf = 0.0 if center is None else float(np.abs(np.atleast_1d(center)).max())
    if band_radius + center_inf > margin:
        raise BandLimitError(
            f"band radius {band_radius} at center offset {center_inf} exceeds "
            f"the grid margin {margin:.6g}"
        )
    coeffs = rng.standard_normal(spec.shape()) + 1j * rng.standard_normal(spec.shape())
    out = np.where(mask, coeffs, 0.0).astype(np.complex128)
    return _finish(spec, out)


def _next_pow2(x: float) -> int:
    return 1 << int(np.ceil(np.log2(max(x, 1.0))))


def grid_for(kind: str, d: int = 1, level: int | None = None, lam=None, t=None,
             max_abs_k: int | None = None, width=1, quadrature: float = 1.0) -> GridSpec:
    """A default grid sized for one family at its largest level.

    The resolved band Omega must clear the family's top frequency with
    margin; comb/train families additionally need spatial room for the
    translates at |k| ~ 2^level (P >= 8 * 2^level for the comb). ``quadrature``
    scales Omega for families whose tests need denser spatial sampling.
    """
    if kind == "single_box":
        m = 64 if d == 1 else 8
        omega = _next_pow2(1.5 * 2 ** level + 4)
    elif kind == "annulus":
        # one octave of headroom: the top member's spectrum reaches
        # (3/2) 2^level, which the dyadic cover only clears at J = level + 1
        m = 64 if d == 1 else 8
        omega = _next_pow2(3 * 2 ** level + 4)
    elif kind == "lattice_comb":
        a = float(as_fraction(width))
        base = _next_pow2(8 * 2 ** level / (2 * np.pi))
        m = max(64 if d == 1 else 8, base)
        omega = _next_pow2(1.25 * 2 ** level + 1.0 / (8 * a) + 4)
    elif kind == "dilation":
        lam = as_fraction(lam)
        m = max(64, _next_pow2(float(48 / lam)))
        omega = 8
    elif kind == "modulated_train":
        base = _next_pow2(4 * max_abs_k / (2 * np.pi))
        m = max(64 if d == 1 else 8, base)
        omega = _next_pow2(max_abs_k + 4)
    elif kind == "dilated_kernel":
        m = 8
        omega = _next_pow2(9.0 / (8.0 * float(as_fraction(t))))
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    if quadrature > 1.0:
        omega *= _next_pow2(quadrature)
    return GridSpec(d=d, n=2 * m * omega, oversampling=m)
