"""Smooth frequency partitions of unity and the lattice index sets.

The uniform partition {sigma_k} tiles frequency space by unit cubes: sigma
is built by mollifier normalization, equals 1 on [-1/4, 1/4]^d, vanishes
outside [-3/4, 3/4]^d, and the translates sum to 1 exactly. The dyadic
partition {phi_j} uses a radial profile psi with plateau |xi| <= 5/4 and
support |xi| < 3/2, so each phi_j equals 1 on the annulus
D_j = {3/4 * 2^j <= |xi| <= 5/4 * 2^j}.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exponents import as_fraction
from .grid import FREQUENCY, GridFunction, GridSpec, apply_multiplier, transform


class ResolutionError(ValueError):
    """Grid too coarse to sample a window profile."""


def smooth_profile(edge0: float, edge1: float):
    """A C-infinity monotone cutoff: exactly 1 for t <= edge0, exactly 0 for
    t >= edge1, with the standard exp(-1/t) mollifier blend in between.
    Symmetric about the midpoint, so profile((edge0+edge1)/2) = 1/2."""
    if not edge0 < edge1:
        raise ValueError(f"need edge0 < edge1, got {edge0}, {edge1}")
    edge0, edge1 = float(edge0), float(edge1)
    width = edge1 - edge0

    def profile(t):
        t = np.asarray(t, dtype=float)
        x = (t - edge0) / width
        out = np.zeros_like(x)
        out[x <= 0.0] = 1.0
        inside = (x > 0.0) & (x < 1.0)
        xi = x[inside]
        with np.errstate(divide="ignore", over="ignore"):
            falling = np.exp(-1.0 / (1.0 - xi))
            rising = np.exp(-1.0 / xi)
        out[inside] = falling / (falling + rising)
        return out if out.ndim else float(out)

    return profile


# Per-axis bump for the uniform window: 1 on |t| <= 1/2, 0 outside |t| < 3/4.
_UNIFORM_BUMP = smooth_profile(0.5, 0.75)
# Radial profile for the dyadic windows: 1 on r <= 5/4, 0 outside r < 3/2.
DYADIC_PROFILE = smooth_profile(1.25, 1.5)


def _uniform_axis_profile(m: int) -> np.ndarray:
    """sigma(o/m) for integer offsets o in [-(3/4)m, (3/4)m]; the mollifier
    bump normalized by its 1-periodization, so translates sum to 1 exactly."""
    w = (3 * m) // 4
    t = np.arange(-w, w + 1) / m
    b = _UNIFORM_BUMP(np.abs(t))
    denom = b + _UNIFORM_BUMP(np.abs(t - 1.0)) + _UNIFORM_BUMP(np.abs(t + 1.0))
    return b / denom


@dataclass(frozen=True)
class UniformPartition:
    """Unit-cube partition of unity {sigma_k}, |k|_inf <= kmax."""

    spec: GridSpec
    kmax: int
    axis_profile: np.ndarray

    @property
    def half_width(self) -> int:
        """Window half-width in samples: (3/4) * M."""
        return (3 * self.spec.oversampling) // 4

    def _axis_slice(self, k: int) -> slice:
        center = self.spec.n // 2 + k * self.spec.oversampling
        return slice(center - self.half_width, center + self.half_width + 1)

    def lattice(self):
        """All lattice points of the cube |k|_inf <= kmax, lexicographic."""
        rng = range(-self.kmax, self.kmax + 1)
        if self.spec.d == 1:
            return [(k,) for k in rng]
        return [(k1, k2) for k1 in rng for k2 in rng]

    def window(self, k) -> np.ndarray:
        """Dense multiplier array for sigma_k."""
        k = _as_lattice_point(k, self.spec.d)
        self._check_index(k)
        out = np.zeros(self.spec.shape())
        if self.spec.d == 1:
            out[self._axis_slice(k[0])] = self.axis_profile
        else:
            patch = np.outer(self.axis_profile, self.axis_profile)
            out[self._axis_slice(k[0]), self._axis_slice(k[1])] = patch
        return out

    def patch(self, spectrum: np.ndarray, k) -> tuple[tuple[slice, ...], np.ndarray]:
        """(slices, sigma_k * spectrum restricted to the window support)."""
        k = _as_lattice_point(k, self.spec.d)
        self._check_index(k)
        if self.spec.d == 1:
            sl = (self._axis_slice(k[0]),)
            return sl, spectrum[sl] * self.axis_profile
        sl = (self._axis_slice(k[0]), self._axis_slice(k[1]))
        return sl, spectrum[sl] * np.outer(self.axis_profile, self.axis_profile)

    def _check_index(self, k) -> None:
        if max(abs(c) for c in k) > self.kmax:
            raise IndexError(f"|k|_inf = {max(abs(c) for c in k)} exceeds kmax = {self.kmax}")

    def partition_sum(self) -> np.ndarray:
        """Dense sum of all windows, for residual checks."""
        out = np.zeros(self.spec.shape())
        for k in self.lattice():
            if self.spec.d == 1:
                out[self._axis_slice(k[0])] += self.axis_profile
            else:
                out[self._axis_slice(k[0]), self._axis_slice(k[1])] += np.outer(
                    self.axis_profile, self.axis_profile)
        return out


def max_uniform_kmax(spec: GridSpec) -> int:
    """Largest kmax whose windows fit inside the resolved band with margin."""
    return (spec.n // 2 - 1 - (3 * spec.oversampling) // 4) // spec.oversampling


def build_uniform(spec: GridSpec, kmax: int | None = None) -> UniformPartition:
    m = spec.oversampling
    if m < 8:
        raise ResolutionError(f"frequency spacing 1/{m} > 1/8 undersamples the window")
    if kmax is None:
        kmax = max_uniform_kmax(spec)
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    if kmax > max_uniform_kmax(spec):
        raise ValueError(
            f"kmax = {kmax} windows leave the resolved band (max {max_uniform_kmax(spec)})"
        )
    return UniformPartition(spec, kmax, _uniform_axis_profile(m))


@dataclass
class DyadicPartition:
    """Dyadic partition of unity {phi_j}, j = 0..levels."""

    spec: GridSpec
    levels: int
    _radius: np.ndarray = field(repr=False, default=None)
    _cache: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if self._radius is None:
            self._radius = self.spec.freq_radius()

    def window(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.levels:
            raise IndexError(f"dyadic level {j} outside 0..{self.levels}")
        if j not in self._cache:
            if j == 0:
                self._cache[j] = DYADIC_PROFILE(self._radius)
            else:
                self._cache[j] = (DYADIC_PROFILE(self._radius / 2 ** j)
                                  - DYADIC_PROFILE(self._radius / 2 ** (j - 1)))
        return self._cache[j]

    def partition_sum(self) -> np.ndarray:
        out = np.zeros(self.spec.shape())
        for j in range(self.levels + 1):
            out += self.window(j)
        return out


def max_dyadic_level(spec: GridSpec) -> int:
    """Largest J with (3/2) * 2^J <= Omega."""
    j = 0
    while 3 * 2 ** (j + 1) * spec.oversampling <= spec.n:
        j += 1
    return j


def build_dyadic(spec: GridSpec, levels: int | None = None) -> DyadicPartition:
    if levels is None:
        levels = max_dyadic_level(spec)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if 3 * 2 ** levels * spec.oversampling > spec.n:
        raise ValueError(
            f"dyadic level {levels} exceeds the resolved band "
            f"(max {max_dyadic_level(spec)} for this grid)"
        )
    return DyadicPartition(spec, levels)


def _as_lattice_point(k, d: int) -> tuple[int, ...]:
    if isinstance(k, (int, np.integer)):
        k = (int(k),)
    k = tuple(int(c) for c in k)
    if len(k) != d:
        raise ValueError(f"lattice point {k} does not match dimension {d}")
    return k


def box_apply(f: GridFunction, k, partition: UniformPartition) -> GridFunction:
    """The uniform-decomposition operator: inverse transform of sigma_k * spectrum."""
    k = _as_lattice_point(k, f.spec.d)
    spectrum = f.in_frequency().values
    slices, patch = partition.patch(spectrum, k)
    out = np.zeros(f.spec.shape(), dtype=np.complex128)
    out[slices] = patch
    return transform(GridFunction(f.spec, out, FREQUENCY), "space")


def delta_apply(f: GridFunction, j: int, partition: DyadicPartition) -> GridFunction:
    """The dyadic-decomposition operator: inverse transform of phi_j * spectrum."""
    return apply_multiplier(f, partition.window(j))


@dataclass(frozen=True)
class LatticeIndexSet:
    """Lattice points whose unit windows sit inside / touch an annulus or cube."""

    kind: str
    parameter: object
    d: int
    members: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, k) -> bool:
        return _as_lattice_point(k, self.d) in set(self.members)


def _annulus_membership(level: int, d: int, inside: bool) -> list[tuple[int, ...]]:
    """Exact box-versus-Euclidean-annulus tests, integer arithmetic (scale 4).

    Box k + [-3/4, 3/4]^d against D_level = {3/4 * 2^l <= |xi| <= 5/4 * 2^l}:
    the nearest / farthest points of the box from the origin are componentwise
    max(|k_i| - 3/4, 0) and |k_i| + 3/4.
    """
    r_in_sq = (3 * 2 ** level) ** 2
    r_out_sq = (5 * 2 ** level) ** 2
    bound = (5 * 2 ** level + 3) // 4
    members = []
    rng = range(-bound, bound + 1)
    points = ((k,) for k in rng) if d == 1 else ((a, b) for a in rng for b in rng)
    for k in points:
        far_sq = sum((4 * abs(c) + 3) ** 2 for c in k)
        near_sq = sum(max(4 * abs(c) - 3, 0) ** 2 for c in k)
        if inside:
            ok = far_sq <= r_out_sq and near_sq >= r_in_sq
        else:
            ok = near_sq <= r_out_sq and far_sq >= r_in_sq
        if ok:
            members.append(k)
    return members


def index_set(kind: str, parameter, d: int = 1) -> LatticeIndexSet:
    """A_l (windows inside D_l), B_l (windows touching D_l), or K_t (windows
    inside the cube (1/t)[-1,1]^d). Members in lexicographic order."""
    if d not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {d}")
    if kind in ("A", "B"):
        level = int(parameter)
        if level < 0:
            raise ValueError(f"level must be >= 0, got {level}")
        members = _annulus_membership(level, d, inside=(kind == "A"))
        if kind == "A" and not members:
            warnings.warn(f"A_{level} is empty in dimension {d}", stacklevel=2)
    elif kind == "K":
        t = as_fraction(parameter)
        if not 0 < t <= 1:
            raise ValueError(f"K_t requires 0 < t <= 1, got {t}")
        bound = 1 / t - Fraction(3, 4)
        kmax = int(bound)  # floor for positive bound
        rng = range(-kmax, kmax + 1)
        members = [(k,) for k in rng] if d == 1 else [(a, b) for a in rng for b in rng]
    else:
        raise ValueError(f"unknown index-set kind {kind!r}")
    return LatticeIndexSet(kind, parameter, d, tuple(sorted(members)))


def selftest_report(spec: GridSpec | None = None, n_random: int = 20,
                    seed: int = 7) -> dict:
    """Residual maxima for both partitions plus reconstruction errors on
    random band-limited functions. All values should sit at rounding level."""
    from .families import random_band_limited  # deferred: families imports us

    if spec is None:
        spec = GridSpec(d=1, n=2 ** 14, oversampling=8)
    uniform = build_uniform(spec)
    dyadic = build_dyadic(spec)

    usum = uniform.partition_sum()
    ax = spec.freq_axis()
    in_band = np.abs(ax) <= uniform.kmax - 1
    mask = in_band if spec.d == 1 else np.ix_(in_band, in_band)
    uniform_residual = float(np.abs(usum[mask] - 1.0).max())

    dsum = dyadic.partition_sum()
    radius = spec.freq_radius()
    dmask = radius <= 1.25 * 2 ** dyadic.levels
    dyadic_residual = float(np.abs(dsum[dmask] - 1.0).max())

    rng = np.random.default_rng(seed)
    box_recon = 0.0
    dyadic_recon = 0.0
    band = min(uniform.kmax - 1, int(1.25 * 2 ** dyadic.levels / np.sqrt(spec.d)))
    for _ in range(n_random):
        f = random_band_limited(spec, band_radius=band, rng=rng)
        spectrum = f.in_frequency().values
        norm = np.linalg.norm(spectrum)
        box_err = np.linalg.norm((usum - 1.0) * spectrum) / norm
        dyad_err = np.linalg.norm((dsum - 1.0) * spectrum) / norm
        box_recon = max(box_recon, float(box_err))
        dyadic_recon = max(dyadic_recon, float(dyad_err))

    return {
        "grid": {"d": spec.d, "n": spec.n, "oversampling": spec.oversampling},
        "kmax": uniform.kmax,
        "dyadic_levels": dyadic.levels,
        "uniform_partition_residual": uniform_residual,
        "dyadic_partition_residual": dyadic_residual,
        "box_reconstruction_rel_l2": box_recon,
        "dyadic_reconstruction_rel_l2": dyadic_recon,
        "passed": bool(
            uniform_residual < 1e-12 and dyadic_residual < 1e-12
            and box_recon < 1e-10 and dyadic_recon < 1e-10
        ),
    }
