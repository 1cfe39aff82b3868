"""Fourier operator algebra on the periodic square [0, L]^2.

Scalar fields live on an n-by-n collocation grid and are carried in
physical and/or Fourier representation (lazily interconverted and cached).
Differential and singular-integral operators are exact Fourier multipliers:

    derivative               i * 2*pi*k/L          (Nyquist line zeroed)
    inv_neg_laplacian        1 / |2*pi*k/L|^2      (zero at k = 0)
    riesz_double(i, j)       -k_i k_j / |k|^2      (zero at k = 0)
    smoothing_inverse        1 / (1 + |2*pi*k/L|^2)

The (0,0) mode is annihilated wherever the inverse Laplacian is undefined;
``dealias`` implements the two-thirds rule on the max-norm of the integer
wavevector. All functions are pure; fields are treated as immutable values.
"""

from __future__ import annotations

import numpy as np

from .errors import BadParams, NonZeroMean

# relative tolerance distinguishing conserved-mean roundoff from user error
MEAN_ZERO_RTOL = 1e-10

_AXES = {"x": 0, "y": 1}


class Grid:
    """Uniform n x n collocation grid on the torus [0, length]^2.

    n must be even and at least 8. Mode (0,0) carries wavenumber exactly
    zero; physical wavenumbers are 2*pi*k/length for integer k.
    """

    def __init__(self, n: int, length: float = 2.0 * np.pi):
        n = int(n)
        if n % 2 != 0 or n < 8:
            raise BadParams(f"grid size must be even and >= 8, got {n}")
        if not length > 0:
            raise BadParams(f"domain length must be positive, got {length}")
        self.n = n
        self.length = float(length)

        k_int = np.fft.fftfreq(n, 1.0 / n)  # integer mode indices
        self.kx_int = k_int[:, None]
        self.ky_int = k_int[None, :]
        scale = 2.0 * np.pi / self.length
        self.kx = scale * self.kx_int
        self.ky = scale * self.ky_int
        self.k2 = self.kx**2 + self.ky**2
        inv = np.zeros_like(self.k2)
        nonzero = self.k2 > 0.0
        inv[nonzero] = 1.0 / self.k2[nonzero]
        self.inv_k2 = inv
        # Nyquist column/row has no usable phase for odd-order derivatives
        half = n // 2
        self.deriv_kx = np.where(np.abs(self.kx_int) == half, 0.0, self.kx)
        self.deriv_ky = np.where(np.abs(self.ky_int) == half, 0.0, self.ky)
        cutoff = n / 3.0
        self.dealias_mask = (np.abs(self.kx_int) <= cutoff) & (np.abs(self.ky_int) <= cutoff)

    @property
    def spacing(self) -> float:
        return self.length / self.n

    def meshgrid(self):
        """Physical coordinates (X, Y), indexed [ix, iy]."""
        x = np.arange(self.n) * self.spacing
        return np.meshgrid(x, x, indexing="ij")

    def __eq__(self, other):
        return (
            isinstance(other, Grid) and other.n == self.n and other.length == self.length
        )

    def __hash__(self):
        return hash((self.n, self.length))

    def __repr__(self):
        return f"Grid(n={self.n}, length={self.length!r})"


class SpectralField:
    """Real scalar field on a :class:`Grid`, in physical and/or Fourier form.

    Whichever representation is requested first is computed from the other
    and cached; round-tripping is exact to roundoff. The mean is the (0,0)
    Fourier mode divided by n^2.
    """

    __slots__ = ("grid", "_phys", "_spec")

    def __init__(self, grid: Grid, phys=None, spec=None):
        if phys is None and spec is None:
            raise BadParams("field needs a physical or spectral array")
        self.grid = grid
        self._phys = phys
        self._spec = spec

    @classmethod
    def from_phys(cls, grid: Grid, values, copy: bool = True) -> "SpectralField":
        arr = np.array(values, dtype=np.float64, copy=copy)
        if arr.shape != (grid.n, grid.n):
            raise BadParams(f"expected shape {(grid.n, grid.n)}, got {arr.shape}")
        return cls(grid, phys=arr)

    @classmethod
    def from_spec(cls, grid: Grid, coeffs, copy: bool = True) -> "SpectralField":
        arr = np.array(coeffs, dtype=np.complex128, copy=copy)
        if arr.shape != (grid.n, grid.n):
            raise BadParams(f"expected shape {(grid.n, grid.n)}, got {arr.shape}")
        return cls(grid, spec=arr)

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, phys=np.zeros((grid.n, grid.n)))

    @property
    def phys(self) -> np.ndarray:
        if self._phys is None:
            self._phys = np.fft.ifft2(self._spec).real
        return self._phys

    @property
    def spec(self) -> np.ndarray:
        if self._spec is None:
            self._spec = np.fft.fft2(self._phys)
        return self._spec

    @property
    def mean(self) -> float:
        if self._phys is not None:
            return float(self._phys.mean())
        return float(self._spec[0, 0].real) / self.grid.n**2

    def _binary(self, other, op):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.grid != self.grid:
            raise BadParams("fields live on different grids")
        if self._spec is not None and other._spec is not None:
            return SpectralField(self.grid, spec=op(self._spec, other._spec))
        if self._phys is not None and other._phys is not None:
            return SpectralField(self.grid, phys=op(self._phys, other._phys))
        return SpectralField(self.grid, spec=op(self.spec, other.spec))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        s = float(scalar)
        return SpectralField(
            self.grid,
            phys=None if self._phys is None else s * self._phys,
            spec=None if self._spec is None else s * self._spec,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        reps = "".join(p for p, a in (("p", self._phys), ("s", self._spec)) if a is not None)
        return f"SpectralField(n={self.grid.n}, reps={reps!r})"


class VectorField:
    """Pair of scalar fields (x, y components) on one shared grid."""

    __slots__ = ("x", "y")

    def __init__(self, x: SpectralField, y: SpectralField):
        if x.grid != y.grid:
            raise BadParams("vector components live on different grids")
        self.x = x
        self.y = y

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(SpectralField.zeros(grid), SpectralField.zeros(grid))

    def __add__(self, other):
        return VectorField(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return VectorField(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar):
        return VectorField(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __iter__(self):
        yield self.x
        yield self.y


def _axis_wavenumbers(grid: Grid, axis: str) -> np.ndarray:
    if axis not in _AXES:
        raise BadParams(f"axis must be 'x' or 'y', got {axis!r}")
    return grid.deriv_kx if axis == "x" else grid.deriv_ky


def derivative(f: SpectralField, axis: str) -> SpectralField:
    """Exact spectral partial derivative along ``axis``; output has zero mean."""
    k = _axis_wavenumbers(f.grid, axis)
    return SpectralField(f.grid, spec=1j * k * f.spec)


def grad(f: SpectralField) -> VectorField:
    return VectorField(derivative(f, "x"), derivative(f, "y"))


def div(a: VectorField) -> SpectralField:
    return derivative(a.x, "x") + derivative(a.y, "y")


def curl(a: VectorField) -> SpectralField:
    return derivative(a.y, "x") - derivative(a.x, "y")


def perp_grad(f: SpectralField) -> VectorField:
    """Rotated gradient (-d/dy f, d/dx f); always divergence-free."""
    return VectorField(-derivative(f, "y"), derivative(f, "x"))


def laplacian(f):
    if isinstance(f, VectorField):
        return VectorField(laplacian(f.x), laplacian(f.y))
    return SpectralField(f.grid, spec=-f.grid.k2 * f.spec)


def require_mean_zero(f: SpectralField, what: str = "operand") -> None:
    """Raise :class:`NonZeroMean` unless |mean| <= rtol * ||f||_2."""
    m = abs(f.spec[0, 0]) / f.grid.n**2
    if m > MEAN_ZERO_RTOL * norm(f, "L2"):
        raise NonZeroMean(f"{what} must be mean-zero, |mean| = {m:.3e}")


def inv_neg_laplacian(f: SpectralField) -> SpectralField:
    """Solve -lap(g) = f on the torus; requires mean-zero f, returns mean-zero g."""
    require_mean_zero(f, "inv_neg_laplacian input")
    return SpectralField(f.grid, spec=f.grid.inv_k2 * f.spec)


def grad_inv_neg_laplacian(theta: SpectralField) -> VectorField:
    """Gradient of the inverse negative Laplacian of a mean-zero scalar.

    Each component solves -lap(out_i) = d_i theta, so div(out) = -theta.
    """
    require_mean_zero(theta, "grad_inv_neg_laplacian input")
    g = theta.grid
    coeff = g.inv_k2 * theta.spec
    return VectorField(
        SpectralField(g, spec=1j * g.deriv_kx * coeff),
        SpectralField(g, spec=1j * g.deriv_ky * coeff),
    )


def riesz_double(i: str, j: str, f: SpectralField) -> SpectralField:
    """Composition of two Riesz transforms: multiplier -k_i k_j / |k|^2.

    Symmetric in (i, j); annihilates the (0,0) mode by convention; the trace
    over i equals minus the identity on mean-zero fields.
    """
    g = f.grid
    ki = g.kx if i == "x" else g.ky if i == "y" else None
    kj = g.kx if j == "x" else g.ky if j == "y" else None
    if ki is None or kj is None:
        raise BadParams(f"axes must be 'x' or 'y', got {i!r}, {j!r}")
    return SpectralField(g, spec=-ki * kj * g.inv_k2 * f.spec)


def leray_project(a: VectorField) -> VectorField:
    """L2-orthogonal projection onto divergence-free fields.

    Idempotent, self-adjoint, and mean-preserving on each component.
    """
    g = a.grid
    ax, ay = a.x.spec, a.y.spec
    q = (g.kx * ax + g.ky * ay) * g.inv_k2
    return VectorField(
        SpectralField(g, spec=ax - g.kx * q),
        SpectralField(g, spec=ay - g.ky * q),
    )


def dealias(f):
    """Two-thirds rule: zero every mode with max(|k1|, |k2|) > n/3."""
    if isinstance(f, VectorField):
        return VectorField(dealias(f.x), dealias(f.y))
    g = f.grid
    return SpectralField(g, spec=np.where(g.dealias_mask, f.spec, 0.0))


def smoothing_inverse(f):
    """Inverse of (I - lap): multiplier 1/(1 + |k|^2); an L2 contraction."""
    if isinstance(f, VectorField):
        return VectorField(smoothing_inverse(f.x), smoothing_inverse(f.y))
    g = f.grid
    return SpectralField(g, spec=f.spec / (1.0 + g.k2))


def multiply(f: SpectralField, g: SpectralField, use_dealias: bool = False) -> SpectralField:
    """Pointwise product in physical space.

    With ``use_dealias`` both factors and the product are passed through the
    two-thirds mask, which makes quadratic products alias-free.
    """
    if use_dealias:
        f = dealias(f)
        g = dealias(g)
    out = SpectralField(f.grid, phys=f.phys * g.phys)
    return dealias(out) if use_dealias else out


def advect(vel: VectorField, f, use_dealias: bool = False):
    """Advective derivative vel.grad(f) for scalar or vector f.

    Quadratic products are formed pointwise in physical space, on two-thirds
    dealiased factors (and re-masked) when ``use_dealias`` is on.
    """
    if isinstance(f, VectorField):
        return VectorField(advect(vel, f.x, use_dealias), advect(vel, f.y, use_dealias))
    return multiply(vel.x, derivative(f, "x"), use_dealias) + multiply(
        vel.y, derivative(f, "y"), use_dealias
    )


def seminorm(f, order: int) -> float:
    """L2 norm of the order-th derivative tensor, via |k|^(2*order) weights."""
    if isinstance(f, VectorField):
        return float(np.sqrt(seminorm(f.x, order) ** 2 + seminorm(f.y, order) ** 2))
    g = f.grid
    w = g.k2**order
    total = np.sum(w * np.abs(f.spec) ** 2)
    return float(g.length / g.n**2 * np.sqrt(total))


def inner(f, g) -> float:
    """L2 inner product; accepts scalar or vector fields."""
    if isinstance(f, VectorField):
        return inner(f.x, g.x) + inner(f.y, g.y)
    gr = f.grid
    s = np.sum(np.conj(f.spec) * g.spec).real
    return float(gr.length**2 / gr.n**4 * s)


def _stacked_phys_sq(f) -> np.ndarray:
    if isinstance(f, VectorField):
        return f.x.phys**2 + f.y.phys**2
    return f.phys**2


def norm(f, kind: str = "L2") -> float:
    """Norms of scalar or vector fields.

    L2 is evaluated by Parseval; L4 and Linf from physical samples (Linf is
    the max over grid points, an infimum approximation of the true sup).
    H1 = sqrt(L2^2 + ||grad f||_2^2); H2 additionally adds ||lap f||_2^2.
    Vector fields sum component squares (pointwise, for L4/Linf).
    """
    if kind == "L2":
        if isinstance(f, VectorField):
            return float(np.hypot(norm(f.x, "L2"), norm(f.y, "L2")))
        g = f.grid
        return float(g.length / g.n**2 * np.sqrt(np.sum(np.abs(f.spec) ** 2)))
    if kind == "Linf":
        return float(np.sqrt(np.max(_stacked_phys_sq(f))))
    if kind == "L4":
        g = f.grid
        q = np.sum(_stacked_phys_sq(f) ** 2) * (g.length / g.n) ** 2
        return float(q**0.25)
    if kind == "H1":
        return float(np.sqrt(norm(f, "L2") ** 2 + seminorm(f, 1) ** 2))
    if kind == "H2":
        return float(np.sqrt(norm(f, "L2") ** 2 + seminorm(f, 1) ** 2 + seminorm(f, 2) ** 2))
    raise BadParams(f"unknown norm kind {kind!r}")


def grad_linf(a: VectorField) -> float:
    """Sup over grid points of |grad a^x| + |grad a^y| (Euclidean per component)."""
    gx = grad(a.x)
    gy = grad(a.y)
    mag = np.sqrt(gx.x.phys**2 + gx.y.phys**2) + np.sqrt(gy.x.phys**2 + gy.y.phys**2)
    return float(np.max(mag))


def grad_l4(a: VectorField) -> float:
    """L4 norm of the gradient tensor (Frobenius pointwise)."""
    gx = grad(a.x)
    gy = grad(a.y)
    sq = gx.x.phys**2 + gx.y.phys**2 + gy.x.phys**2 + gy.y.phys**2
    g = a.grid
    return float((np.sum(sq**2) * (g.length / g.n) ** 2) ** 0.25)
