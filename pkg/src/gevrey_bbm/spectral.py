"""Periodic spectral representation of real fields.

Transform convention (fixed once, used everywhere): the forward transform
carries the L/n quadrature weight,

    coeff(j) = (L/n) * sum_m u(x_m) exp(-i xi_j x_m),   xi_j = 2*pi*j/L,

so that coeff(0) = mean(u) * L and the discrete coefficients approximate the
continuum Fourier transform on a domain of length L.  The matching Parseval
weight for coefficient-space sums is 1/L:

    integral |u|^2 dx  =  (1/L) * sum_j |coeff(j)|^2.

Mode indices follow numpy FFT ordering (0, 1, ..., n/2-1, -n/2, ..., -1).
The unpaired mode at |j| = n/2 has no conjugate partner on the grid; it is
forced to zero after every nonlinear evaluation to keep fields exactly real.

The domain is a torus of length L (default 64): the continuum problem lives
on the whole real line, and the periodic box is a desk-scale proxy.  All
multiplier formulas are pointwise in xi and carry over verbatim to the
discrete wavenumbers; L must be chosen large enough that the solution stays
well away from the boundary of its effective support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, SymmetryViolation

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with n_points collocation points on [0, L)."""

    n_points: int
    domain_length: float = 64.0

    def __post_init__(self):
        if self.n_points % 2 != 0 or self.n_points < 8:
            raise InvalidInput(f"n_points must be even and >= 8, got {self.n_points}")
        if not self.domain_length > 0:
            raise InvalidInput(f"domain_length must be positive, got {self.domain_length}")

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_points

    @property
    def points(self) -> np.ndarray:
        """Collocation points x_m = m * dx."""
        return np.arange(self.n_points) * self.dx

    @property
    def mode_numbers(self) -> np.ndarray:
        """Integer mode indices j in FFT ordering."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def wavenumbers(self) -> np.ndarray:
        """xi_j = 2*pi*j / L in FFT ordering."""
        return 2.0 * np.pi * self.mode_numbers / self.domain_length

    @property
    def parseval_weight(self) -> float:
        """Quadrature weight turning sum_j |coeff|^2 into integral |u|^2 dx."""
        return 1.0 / self.domain_length

    @property
    def dealias_cutoff(self) -> int:
        """Largest mode index |j| kept by the 2/3 rule."""
        return self.n_points // 3


@dataclass(frozen=True)
class SpectralField:
    """A real-valued periodic field stored by its Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.n_points,):
            raise InvalidInput(
                f"coeffs must have shape ({self.grid.n_points},), got {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)
        self.coeffs.setflags(write=False)

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)


def hermitian_defect(field: SpectralField) -> float:
    """Relative departure from coeff(-j) == conj(coeff(j))."""
    c = field.coeffs
    mirror = np.conj(c[(-np.arange(field.grid.n_points)) % field.grid.n_points])
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(c - mirror)) / scale)


def forward_transform(samples, grid: Grid) -> SpectralField:
    """Transform physical samples to spectral coefficients.

    coeff(0) equals mean(samples) * L under the fixed L/n convention.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.n_points,):
        raise InvalidInput(
            f"expected {grid.n_points} samples, got shape {samples.shape}"
        )
    coeffs = np.fft.fft(samples) * (grid.domain_length / grid.n_points)
    return SpectralField(grid, coeffs)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Reconstruct real physical samples from the coefficients.

    Raises SymmetryViolation if the Hermitian defect exceeds tolerance; the
    (tiny) imaginary residue of the reconstruction is asserted and discarded.
    """
    if hermitian_defect(field) > 1e-10:
        raise SymmetryViolation(
            f"Hermitian defect {hermitian_defect(field):.3e} exceeds 1e-10"
        )
    grid = field.grid
    z = np.fft.ifft(field.coeffs) * (grid.n_points / grid.domain_length)
    scale = max(np.max(np.abs(z)), 1.0)
    residue = np.max(np.abs(z.imag)) / scale
    if residue > 1e-10:
        raise SymmetryViolation(f"imaginary residue {residue:.3e} exceeds 1e-10")
    return z.real.copy()


def dealias(field: SpectralField) -> SpectralField:
    """Zero all modes with |j| > n/3 (2/3 rule for the quadratic term)."""
    keep = np.abs(field.grid.mode_numbers) <= field.grid.dealias_cutoff
    return field.with_coeffs(np.where(keep, field.coeffs, 0.0))


def zero_nyquist(field: SpectralField) -> SpectralField:
    """Zero the unpaired |j| = n/2 mode (no conjugate partner on the grid)."""
    coeffs = field.coeffs.copy()
    coeffs[field.grid.n_points // 2] = 0.0
    return field.with_coeffs(coeffs)


def modulus_field(field: SpectralField) -> SpectralField:
    """Field whose coefficient at each j is |coeff(j)|.

    The result is real and even in j, hence still Hermitian, and has the
    same L^2 norm as the input (Parseval).
    """
    return field.with_coeffs(np.abs(field.coeffs).astype(np.complex128))


def zero_field(grid: Grid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_points, dtype=np.complex128))
