"""SU(d) generator basis, Bloch vectors, and separable-set radii.

Generator order is fixed: all ``U_pq`` (1 <= p < q <= d, lexicographic), then
all ``V_pq`` in the same order, then ``W_1 .. W_{d-1}``:

    U_pq = |p><q| + |q><p|
    V_pq = -i|p><q| + i|q><p|
    W_r  = sqrt(2 / (r (r + 1))) (sum_{k<=r} |k><k| - r |r+1><r+1|)

Every generator is traceless and ``Tr(s_i s_j) = 2 delta_ij``.  Expansion
coefficients are computed from closed forms over matrix entries, so no
generator matrices are materialised unless explicitly requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import NumericIntegrityError, ValidationError
from .linalg import check_hermitian, check_square

#: Largest dimension for which :func:`su_generators` materialises matrices.
MAX_EXPLICIT_DIM = 64


def _w_scales(d):
    r = np.arange(1, d)
    return np.sqrt(2.0 / (r * (r + 1)))


def _w_diagonals(d):
    """(d-1, d) array whose row r-1 is the diagonal of W_r."""
    out = np.zeros((d - 1, d))
    for r in range(1, d):
        out[r - 1, :r] = 1.0
        out[r - 1, r] = -r
    return out * _w_scales(d)[:, None]


class GeneratorBasis:
    """Ordered traceless Hermitian basis of ``su(d)``."""

    def __init__(self, dim: int):
        if int(dim) != dim or dim < 2:
            raise ValidationError(f"generator dimension must be an integer >= 2, got {dim}")
        self.dim = int(dim)
        self._iu = np.triu_indices(self.dim, 1)

    def __len__(self):
        return self.dim**2 - 1

    def __repr__(self):
        return f"GeneratorBasis(dim={self.dim})"

    @property
    def n_offdiag(self) -> int:
        return self.dim * (self.dim - 1) // 2

    def kind(self, i: int) -> str:
        """``'U'``, ``'V'`` or ``'W'`` for the generator at position ``i``."""
        if i < self.n_offdiag:
            return "U"
        if i < 2 * self.n_offdiag:
            return "V"
        return "W"

    def slices(self):
        k = self.n_offdiag
        return {"U": slice(0, k), "V": slice(k, 2 * k), "W": slice(2 * k, len(self))}

    @cached_property
    def _w_diag(self):
        return _w_diagonals(self.dim)

    @cached_property
    def generators(self) -> np.ndarray:
        """All generators as a ``(d^2 - 1, d, d)`` complex array."""
        d = self.dim
        if d > MAX_EXPLICIT_DIM:
            raise ValidationError(f"explicit generators limited to d <= {MAX_EXPLICIT_DIM}")
        k = self.n_offdiag
        out = np.zeros((len(self), d, d), dtype=complex)
        p, q = self._iu
        idx = np.arange(k)
        out[idx, p, q] = 1
        out[idx, q, p] = 1
        out[k + idx, p, q] = -1j
        out[k + idx, q, p] = 1j
        diag = np.arange(d)
        out[2 * k:, diag, diag] = self._w_diag
        out.setflags(write=False)
        return out

    @cached_property
    def _w_mask(self):
        return np.tri(self.dim - 1, self.dim, 0, dtype=bool)

    def _w_coefficients(self, diag):
        # sum_{k<=r} (op_kk - op_{r+1,r+1}) is exactly zero for a flat diagonal,
        # so the maximally mixed state maps to the exact zero vector.
        diff = diag[None, :] - diag[1:, None]
        return _w_scales(self.dim) * np.sum(np.where(self._w_mask, diff, 0), axis=1)

    def coefficients(self, op) -> np.ndarray:
        """``Tr(op @ s_i)`` for every generator, in basis order (complex)."""
        op = check_square(op, self.dim)
        p, q = self._iu
        upper, lower = op[p, q], op[q, p]
        u = upper + lower
        v = 1j * (upper - lower)
        w = self._w_coefficients(np.diagonal(op))
        return np.concatenate([u, v, w])

    def operator(self, coeffs) -> np.ndarray:
        """``sum_i coeffs[i] s_i`` (Hermitian when ``coeffs`` is real)."""
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (len(self),):
            raise ValidationError(f"expected {len(self)} coefficients for d={self.dim}, got {coeffs.shape}")
        k = self.n_offdiag
        u, v, w = coeffs[:k], coeffs[k:2 * k], coeffs[2 * k:]
        out = np.zeros((self.dim, self.dim), dtype=complex)
        p, q = self._iu
        out[p, q] = u - 1j * v
        out[q, p] = u + 1j * v
        out[np.diag_indices(self.dim)] = w @ self._w_diag
        return out


def su_generators(d: int) -> GeneratorBasis:
    """Generator basis with explicit matrices available (``2 <= d <= 64``)."""
    if int(d) != d or not (2 <= d <= MAX_EXPLICIT_DIM):
        raise ValidationError(f"su_generators requires 2 <= d <= {MAX_EXPLICIT_DIM}, got {d}")
    return GeneratorBasis(d)


@dataclass(frozen=True)
class BlochVector:
    dim: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.shape[0] != self.dim**2 - 1:
            raise ValidationError(
                f"Bloch vector for d={self.dim} needs {self.dim**2 - 1} coordinates, got {coords.shape[0]}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def __len__(self):
        return len(self.coords)

    @classmethod
    def zeros(cls, dim):
        return cls(dim, np.zeros(dim**2 - 1))


@lru_cache(maxsize=32)
def basis_for_dim(dim: int) -> GeneratorBasis:
    """Shared (immutable) basis instance per dimension."""
    return GeneratorBasis(dim)


def _basis_for(dim, basis):
    if basis is None:
        return basis_for_dim(dim)
    if basis.dim != dim:
        raise ValidationError(f"basis dimension {basis.dim} does not match operator dimension {dim}")
    return basis


def density_to_bloch(rho, basis: GeneratorBasis | None = None) -> BlochVector:
    """Bloch vector ``r_i = Tr(rho s_i)`` of a unit-trace Hermitian operator."""
    rho = check_hermitian(rho)
    basis = _basis_for(rho.shape[0], basis)
    tr = np.trace(rho)
    if abs(tr - 1) > 1e-10:
        raise ValidationError(f"operator has trace {tr:.12g}, expected 1")
    coeffs = basis.coefficients(rho)
    resid = np.max(np.abs(coeffs.imag), initial=0.0)
    if resid > 1e-9:
        raise NumericIntegrityError(f"Bloch coordinates carry imaginary residue {resid:.3e}")
    return BlochVector(basis.dim, coeffs.real)


def bloch_to_density(v: BlochVector, basis: GeneratorBasis | None = None) -> np.ndarray:
    """``I/d + (1/2) sum_i v_i s_i``.  Positivity is deliberately not checked."""
    basis = _basis_for(v.dim, basis)
    return np.eye(v.dim) / v.dim + 0.5 * basis.operator(v.coords)


@dataclass(frozen=True)
class SepSetGeometry:
    M: int
    N: int
    inner_radius: float
    outer_radius: float
    m: int

    @property
    def center(self) -> BlochVector:
        return BlochVector.zeros(self.M * self.N)


def sep_set_geometry(M: int, N: int) -> SepSetGeometry:
    """Radii of the balls sandwiching the separable Bloch set, centred at the origin."""
    if M < 2 or N < 2:
        raise ValidationError(f"subsystem dimensions must be >= 2, got ({M}, {N})")
    d = M * N
    r = math.sqrt(2 / (d * (d - 1)))
    R = math.sqrt(2 * (d - 1) / d)
    return SepSetGeometry(M, N, r, R, d * d - 1)


def bloch_distance_pair(rho1, rho2, basis: GeneratorBasis | None = None) -> tuple[float, float]:
    """Frobenius distance of two states and Euclidean distance of their Bloch vectors."""
    rho1, rho2 = check_hermitian(rho1), check_hermitian(rho2)
    if rho1.shape != rho2.shape:
        raise ValidationError(f"dimension mismatch {rho1.shape} vs {rho2.shape}")
    a = density_to_bloch(rho1, basis).coords
    b = density_to_bloch(rho2, basis).coords
    return float(np.linalg.norm(rho1 - rho2)), float(np.linalg.norm(a - b))
