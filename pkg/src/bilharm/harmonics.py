"""Spectral transforms and exact quadrature on the sphere and the torus.

Conventions
-----------
Spherical harmonics are complex, orthonormal in L^2(S^2) with Condon-Shortley
phase.  Coefficients are packed degree-major: ``coeffs[k*k + k + m]`` holds
c_{k,m} for 0 <= k <= k_max, -k <= m <= k.  The sphere grid is Gauss-Legendre
in the colatitude times uniform in the longitude, with weights summing to
4*pi, so that any product of two fields band-limited to the grid's design
degree integrates exactly (to roundoff).

Torus fields use the period-1 torus with phases e^{2*pi*i n.x} on a centered
square lattice |n_1|, |n_2| <= A.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ResourceError

# Largest sphere grid allocated by build_sphere_grid (points, not bytes).
MAX_GRID_POINTS = 1 << 26


def pack_index(k, m):
    """Position of c_{k,m} inside a packed coefficient vector."""
    return k * k + k + m


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre x uniform-longitude quadrature grid on S^2."""

    n_lat: int
    n_lon: int
    x: np.ndarray          # ascending cos(colatitude) nodes, shape (n_lat,)
    w_lat: np.ndarray      # Gauss-Legendre weights, sum 2

    @property
    def colatitudes(self):
        return np.arccos(self.x)

    @property
    def longitudes(self):
        return 2.0 * np.pi * np.arange(self.n_lon) / self.n_lon

    @property
    def nodes(self):
        """All (colatitude, longitude) pairs, flattened row-major."""
        th = np.repeat(self.colatitudes, self.n_lon)
        ph = np.tile(self.longitudes, self.n_lat)
        return np.column_stack([th, ph])

    @property
    def weights(self):
        """Surface quadrature weights matching :attr:`nodes`; sum = 4*pi."""
        return np.repeat(self.w_lat * (2.0 * np.pi / self.n_lon), self.n_lon)

    def resolves(self, k_max):
        """True if analysis of a field band-limited to k_max is exact."""
        return self.n_lat >= k_max + 1 and self.n_lon >= 2 * k_max + 1

    @property
    def exact_degree(self):
        """Largest total polynomial degree integrated exactly."""
        return min(2 * self.n_lat - 1, self.n_lon - 1)

    def integrate(self, values):
        """Quadrature of one field of grid values."""
        if values.shape != (self.n_lat, self.n_lon):
            raise ValueError("field shape %r does not match grid (%d, %d)"
                             % (values.shape, self.n_lat, self.n_lon))
        return (2.0 * np.pi / self.n_lon) * (self.w_lat @ values.sum(axis=1))


def build_sphere_grid(k_max, n_lat=None, n_lon=None):
    """Quadrature grid resolving band limit ``k_max``.

    The default sizes (k_max+1 latitudes, 2*k_max+2 longitudes) make the
    integral of a product of two fields band-limited to k_max exact.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    n_lat = k_max + 1 if n_lat is None else n_lat
    n_lon = 2 * k_max + 2 if n_lon is None else n_lon
    if n_lat * n_lon > MAX_GRID_POINTS:
        raise ResourceError("grid %dx%d exceeds the %d-point cap"
                            % (n_lat, n_lon, MAX_GRID_POINTS))
    x, w = np.polynomial.legendre.leggauss(n_lat)
    return SphereGrid(n_lat=n_lat, n_lon=n_lon, x=x, w_lat=w)


@dataclass
class HarmonicField:
    """Packed spherical-harmonic coefficients c_{k,m}, 0 <= k <= k_max."""

    k_max: int
    coeffs: np.ndarray

    @classmethod
    def zeros(cls, k_max):
        return cls(k_max, np.zeros((k_max + 1) ** 2, dtype=np.complex128))

    def copy(self):
        return HarmonicField(self.k_max, self.coeffs.copy())

    def l2_norm(self):
        """L^2(S^2) norm, exact on coefficients by Parseval."""
        return float(np.linalg.norm(self.coeffs))

    def degree_coeffs(self, k):
        """View of the 2k+1 coefficients of degree k (orders -k..k)."""
        return self.coeffs[k * k:(k + 1) * (k + 1)]

    def __add__(self, other):
        return HarmonicField(self.k_max, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return HarmonicField(self.k_max, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return HarmonicField(self.k_max, self.coeffs * scalar)

    __rmul__ = __mul__


def random_field(k_max, rng, degrees=None, unit=True):
    """Seeded complex Gaussian field, optionally restricted to given degrees."""
    f = HarmonicField.zeros(k_max)
    if degrees is None:
        degrees = range(k_max + 1)
    for k in degrees:
        n = 2 * k + 1
        f.degree_coeffs(k)[:] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if unit:
        nrm = f.l2_norm()
        if nrm > 0:
            f.coeffs /= nrm
    return f


def make_highest_weight(n):
    """L^2-normalized highest-weight harmonic of degree n.

    Proportional to (x_1 + i x_2)^n restricted to the unit sphere; the single
    nonzero coefficient sits at (k, m) = (n, n).
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    f = HarmonicField.zeros(n)
    f.coeffs[pack_index(n, n)] = 1.0
    return f


def sh_synthesize(field, grid):
    """Grid values sum_{k,m} c_{k,m} Y_k^m at the grid nodes."""
    G = _kernels.mspectrum(field.coeffs, field.k_max, grid.x)
    if grid.n_lon < 2 * field.k_max + 1:
        raise ValueError("grid has %d longitudes, need >= %d for k_max=%d"
                         % (grid.n_lon, 2 * field.k_max + 1, field.k_max))
    buf = np.zeros((grid.n_lat, grid.n_lon), dtype=np.complex128)
    k = field.k_max
    for m in range(-k, k + 1):
        buf[:, m % grid.n_lon] = G[:, k + m]
    return np.fft.ifft(buf, axis=1) * grid.n_lon


def sh_analyze(samples, grid, k_max):
    """Packed coefficients of grid samples, exact for band-limited input."""
    if samples.shape != (grid.n_lat, grid.n_lon):
        raise ValueError("sample shape %r does not match grid (%d, %d)"
                         % (samples.shape, grid.n_lat, grid.n_lon))
    if not grid.resolves(k_max):
        raise ValueError("grid does not resolve k_max=%d" % k_max)
    H = np.fft.fft(np.ascontiguousarray(samples, dtype=np.complex128), axis=1)
    scale = 2.0 * np.pi / grid.n_lon
    fmw = np.empty((grid.n_lat, 2 * k_max + 1), dtype=np.complex128)
    for m in range(-k_max, k_max + 1):
        fmw[:, k_max + m] = (scale * grid.w_lat) * H[:, m % grid.n_lon]
    coeffs = _kernels.accumulate_coeffs(fmw, k_max, grid.x)
    return HarmonicField(k_max, coeffs)


def evaluate_sphere(field, theta, phi):
    """Pointwise values of the field at arbitrary (theta, phi) arrays."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    G = _kernels.mspectrum(field.coeffs, field.k_max, np.cos(theta))
    ms = np.arange(-field.k_max, field.k_max + 1)
    return np.einsum("im,im->i", G, np.exp(1j * np.outer(phi, ms)))


def integrate_product(fields, grid, total_degree=None):
    """Quadrature of the integral of a pointwise product of grid fields.

    ``total_degree``, when given, is checked against the grid's exactness
    bound and a warning is emitted if the quadrature cannot be exact.
    """
    if not fields:
        raise ValueError("need at least one field")
    if total_degree is not None and total_degree > grid.exact_degree:
        warnings.warn("total degree %d exceeds grid exactness bound %d"
                      % (total_degree, grid.exact_degree), stacklevel=2)
    prod = fields[0]
    for f in fields[1:]:
        prod = prod * f
    return complex(grid.integrate(prod))


# ---------------------------------------------------------------------------
# Torus
# ---------------------------------------------------------------------------


@dataclass
class TorusField:
    """Fourier coefficients c_{n1,n2} on the centered lattice |n_j| <= A."""

    A: int
    coeffs: np.ndarray     # shape (2A+1, 2A+1), index n + A

    @classmethod
    def zeros(cls, A):
        n = 2 * A + 1
        return cls(A, np.zeros((n, n), dtype=np.complex128))

    def copy(self):
        return TorusField(self.A, self.coeffs.copy())

    def l2_norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other):
        return TorusField(self.A, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return TorusField(self.A, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return TorusField(self.A, self.coeffs * scalar)

    __rmul__ = __mul__


def random_torus_field(A, rng, shell=None, unit=True):
    """Seeded Gaussian torus field, optionally restricted to a sup-norm shell.

    ``shell=(lo, hi)`` keeps modes with lo <= max(|n1|,|n2|) < hi.
    """
    n = 2 * A + 1
    c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if shell is not None:
        lo, hi = shell
        idx = np.arange(-A, A + 1)
        sup = np.maximum(np.abs(idx)[:, None], np.abs(idx)[None, :])
        c[(sup < lo) | (sup >= hi)] = 0.0
    f = TorusField(A, c)
    if unit:
        nrm = f.l2_norm()
        if nrm > 0:
            f.coeffs /= nrm
    return f


def torus_synthesize(field, n_grid=None):
    """Values on the uniform n_grid x n_grid grid of the unit square."""
    A = field.A
    if n_grid is None:
        n_grid = 2 * A + 2
    if n_grid < 2 * A + 1:
        raise ValueError("grid %d under-resolves lattice half-width %d"
                         % (n_grid, A))
    buf = np.zeros((n_grid, n_grid), dtype=np.complex128)
    idx = np.arange(-A, A + 1)
    buf[np.ix_(idx % n_grid, idx % n_grid)] = field.coeffs
    return np.fft.ifft2(buf) * n_grid ** 2


def torus_analyze(samples, A):
    """Lattice coefficients of uniform-grid samples.

    Exact discrete Fourier inverse of :func:`torus_synthesize`; raises if the
    grid is small enough to alias modes with |n_j| <= A.
    """
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
        raise ValueError("samples must be a square 2-D array")
    n_grid = samples.shape[0]
    if n_grid < 2 * A + 2:
        raise ValueError("grid %d aliases half-width %d; need >= %d"
                         % (n_grid, A, 2 * A + 2))
    H = np.fft.fft2(samples.astype(np.complex128)) / n_grid ** 2
    idx = np.arange(-A, A + 1)
    return TorusField(A, H[np.ix_(idx % n_grid, idx % n_grid)].copy())


def torus_l2_grid_norm(values):
    """L^2(T^2) norm of grid values (unit-measure torus)."""
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))
