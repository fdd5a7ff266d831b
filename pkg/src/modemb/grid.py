"""Periodic sampled functions on a uniform grid and their discrete transforms.

Conventions. The spatial domain is the centered torus [-P/2, P/2)^d with
period P = 2*pi*M for an integer oversampling factor M, sampled at N points
per axis. The frequency grid is xi_j = j * delta with delta = 2*pi/P = 1/M,
j in [-N/2, N/2). The forward transform approximates the analytic
F f(xi) = integral f(x) exp(-i x xi) dx, so the frequency-side samples of a
band-limited periodic function match the continuous transform convention;
the inverse carries the (2*pi)^-d factor. For band-limited inputs the round
trip is the identity to machine precision.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exponents import Exponent

SPACE = "space"
FREQUENCY = "frequency"


class BandLimitError(ValueError):
    """Spectral content violates a band or resolution requirement."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on the torus: dimension d, N samples per axis, P = 2*pi*M."""

    d: int
    n: int
    oversampling: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if not _is_power_of_two(self.n) or self.n < 16:
            raise ValueError(f"N must be a power of two >= 16, got {self.n}")
        if not _is_power_of_two(self.oversampling) or self.oversampling < 8:
            raise ValueError(
                f"oversampling M must be a power of two >= 8, got {self.oversampling}"
            )
        if self.n <= self.oversampling:
            raise ValueError("N must exceed the oversampling factor")

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.oversampling

    @property
    def delta(self) -> float:
        """Frequency spacing 2*pi/P = 1/M."""
        return 1.0 / self.oversampling

    @property
    def omega(self) -> Fraction:
        """Maximum resolved frequency N/(2M), exact."""
        return Fraction(self.n, 2 * self.oversampling)

    @property
    def cell_volume(self) -> float:
        """Spatial Riemann cell (P/N)^d."""
        return (self.period / self.n) ** self.d

    @property
    def freq_cell_volume(self) -> float:
        """Frequency Riemann cell delta^d."""
        return self.delta ** self.d

    def space_axis(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * (self.period / self.n)

    def freq_axis(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.delta

    def freq_grids(self) -> tuple[np.ndarray, ...]:
        ax = self.freq_axis()
        if self.d == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def freq_radius(self) -> np.ndarray:
        grids = self.freq_grids()
        if self.d == 1:
            return np.abs(grids[0])
        return np.sqrt(grids[0] ** 2 + grids[1] ** 2)

    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a periodic band-limited function, on either side."""

    spec: GridSpec
    values: np.ndarray
    side: str

    def __post_init__(self):
        if self.side not in (SPACE, FREQUENCY):
            raise ValueError(f"side must be 'space' or 'frequency', got {self.side!r}")
        values = np.array(self.values, dtype=np.complex128, order="C", copy=True)
        if values.shape != self.spec.shape():
            raise ValueError(f"expected shape {self.spec.shape()}, got {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def in_space(self) -> "GridFunction":
        return transform(self, SPACE)

    def in_frequency(self) -> "GridFunction":
        return transform(self, FREQUENCY)

    def spectrum(self) -> np.ndarray:
        return self.in_frequency().values


def _fft(values: np.ndarray) -> np.ndarray:
    shifted = np.fft.ifftshift(values)
    out = np.fft.fftn(shifted) if values.ndim > 1 else np.fft.fft(shifted)
    return np.fft.fftshift(out)


def _ifft(values: np.ndarray) -> np.ndarray:
    shifted = np.fft.ifftshift(values)
    out = np.fft.ifftn(shifted) if values.ndim > 1 else np.fft.ifft(shifted)
    return np.fft.fftshift(out)


def transform(f: GridFunction, side: str) -> GridFunction:
    """Move f to the requested side with the analytic scaling convention."""
    if side not in (SPACE, FREQUENCY):
        raise ValueError(f"side must be 'space' or 'frequency', got {side!r}")
    if f.side == side:
        return f
    spec = f.spec
    if side == FREQUENCY:
        scale = (spec.period / spec.n) ** spec.d
        return GridFunction(spec, scale * _fft(f.values), FREQUENCY)
    scale = (spec.n / spec.period) ** spec.d
    return GridFunction(spec, scale * _ifft(f.values), SPACE)


def apply_multiplier(f: GridFunction, multiplier: np.ndarray) -> GridFunction:
    """Apply a frequency-side multiplier: returns the space-side inverse
    transform of multiplier * spectrum. Linear in f."""
    multiplier = np.asarray(multiplier)
    if multiplier.shape != f.spec.shape():
        raise ValueError(
            f"multiplier shape {multiplier.shape} does not match grid {f.spec.shape()}"
        )
    spectrum = f.in_frequency().values
    return transform(GridFunction(f.spec, multiplier * spectrum, FREQUENCY), SPACE)


def _riemann_lp(values: np.ndarray, cell_volume: float, p) -> float:
    p = Exponent.of(p)
    mags = np.abs(np.asarray(values))
    if not np.all(np.isfinite(mags)):
        raise ValueError("samples contain NaN or Inf")
    if p.is_infinite:
        return float(mags.max()) if mags.size else 0.0
    pf = float(p.value)
    return float((cell_volume * np.sum(mags ** pf)) ** (1.0 / pf))


def lp_norm(f: GridFunction, p) -> float:
    """Riemann-sum L^p quasi-norm of a space-side function; max for p = inf."""
    if f.side != SPACE:
        raise ValueError("lp_norm expects a space-side function")
    return _riemann_lp(f.values, f.spec.cell_volume, p)


def lq_seq_norm(values, q, weights=None) -> float:
    """Weighted sequence quasi-norm (sum (w_k a_k)^q)^(1/q); sup for q = inf."""
    a = np.abs(np.asarray(values, dtype=float))
    if weights is not None:
        a = a * np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("sequence contains NaN or Inf")
    q = Exponent.of(q)
    if a.size == 0:
        return 0.0
    if q.is_infinite:
        return float(a.max())
    qf = float(q.value)
    return float(np.sum(a ** qf) ** (1.0 / qf))


BAND_ZERO_TOL = 1e-12


def band_limit_violation(f: GridFunction, max_abs_freq: float) -> float:
    """Largest relative spectral magnitude outside |xi|_inf <= max_abs_freq."""
    spectrum = f.in_frequency().values
    peak = np.abs(spectrum).max()
    if peak == 0.0:
        return 0.0
    ax = f.spec.freq_axis()
    outside = np.abs(ax) > max_abs_freq
    if f.spec.d == 1:
        mask = outside
    else:
        mask = outside[:, None] | outside[None, :]
    if not mask.any():
        return 0.0
    return float(np.abs(spectrum[mask]).max() / peak)


def assert_band_margin(f: GridFunction) -> None:
    """Require spectral content within the margin |xi| <= Omega * (1 - 2/N)."""
    margin = float(f.spec.omega) * (1.0 - 2.0 / f.spec.n)
    violation = band_limit_violation(f, margin)
    if violation > BAND_ZERO_TOL:
        raise BandLimitError(
            f"spectrum leaks {violation:.2e} of its peak outside |xi| <= {margin:.6g}"
        )


def save_grid_function(f: GridFunction, data_path, header_path=None) -> None:
    """Write samples as little-endian complex128 (float64 re/im pairs,
    row-major) plus a JSON sidecar header."""
    data_path = Path(data_path)
    header_path = Path(header_path) if header_path else data_path.with_suffix(
        data_path.suffix + ".json")
    data_path.write_bytes(np.ascontiguousarray(f.values.astype("<c16")).tobytes())
    header = {
        "d": f.spec.d,
        "n": f.spec.n,
        "oversampling": f.spec.oversampling,
        "period": f.spec.period,
        "side": f.side,
    }
    header_path.write_text(json.dumps(header, indent=2) + "\n")


def load_grid_function(data_path, header_path=None) -> GridFunction:
    data_path = Path(data_path)
    header_path = Path(header_path) if header_path else data_path.with_suffix(
        data_path.suffix + ".json")
    header = json.loads(header_path.read_text())
    spec = GridSpec(d=header["d"], n=header["n"], oversampling=header["oversampling"])
    raw = np.frombuffer(data_path.read_bytes(), dtype="<c16")
    values = raw.reshape(spec.shape()).astype(np.complex128)
    return GridFunction(spec, values, header["side"])
