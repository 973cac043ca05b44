"""Small dense linear-algebra helpers for bipartite operators.

All bipartite operators follow the ``kron(A, B)`` ordering: the row index of
an operator on ``C^M (x) C^N`` is ``a * N + b``.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

HERMITIAN_ATOL = 1e-12


def check_square(op, dim=None, name="operator"):
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {op.shape}")
    if dim is not None and op.shape[0] != dim:
        raise ValidationError(f"{name} has dimension {op.shape[0]}, expected {dim}")
    return op


def check_hermitian(op, dim=None, atol=HERMITIAN_ATOL, name="operator"):
    op = check_square(op, dim, name)
    if not np.allclose(op, op.conj().T, rtol=0, atol=atol):
        dev = np.max(np.abs(op - op.conj().T))
        raise ValidationError(f"{name} is not Hermitian (max deviation {dev:.3e})")
    return op


def check_state(rho, dim=None, tol=1e-9, name="state"):
    """Validate a density matrix: Hermitian, unit trace, PSD up to ``tol``."""
    rho = check_hermitian(rho, dim, atol=max(HERMITIAN_ATOL, tol), name=name)
    tr = np.trace(rho).real
    if abs(tr - 1) > 1e-10:
        raise ValidationError(f"{name} has trace {tr:.12g}, expected 1")
    lam = np.linalg.eigvalsh(rho)[0]
    if lam < -tol:
        raise ValidationError(f"{name} is not positive semidefinite (min eigenvalue {lam:.3e})")
    return rho


def partial_trace(op, dims, keep):
    """Trace out every subsystem except those listed in ``keep``.

    >>> partial_trace(np.eye(6) / 6, (2, 3), keep=[1]).shape
    (3, 3)
    """
    dims = tuple(int(d) for d in dims)
    keep = sorted(keep)
    n = len(dims)
    t = np.asarray(op).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # Contract traced axes pairwise, highest first so indices stay valid.
    for i in sorted(traced, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + cur)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(op, dims, sys):
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    t = np.asarray(op).reshape(dims + dims)
    axes = list(range(2 * n))
    axes[sys], axes[sys + n] = axes[sys + n], axes[sys]
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


def ket(d, i):
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def max_entangled(n):
    """``|phi+> = (1/sqrt(n)) sum_k |k>|k>``."""
    return np.eye(n, dtype=complex).reshape(-1) / np.sqrt(n)


def random_pure(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_state(d, rng, rank=None):
    """Ginibre-distributed density matrix of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_product_mixture(M, N, rng, terms=None):
    """Random convex combination of pure product states (always separable)."""
    terms = int(rng.integers(1, M * N + 2)) if terms is None else terms
    w = rng.dirichlet(np.ones(terms))
    rho = np.zeros((M * N, M * N), dtype=complex)
    for p in w:
        v = np.kron(random_pure(M, rng), random_pure(N, rng))
        rho += p * np.outer(v, v.conj())
    return rho


def random_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
