"""Channel representations and the reduction from separability to entanglement breaking.

Conventions
-----------
A channel maps operators on ``C^N`` (input) to operators on ``C^M`` (output).
Its Jamiolkowski operator lives on ``C^M (x) C^N`` with the output factor
first::

    J = (Phi (x) id)(|phi+><phi+|) = (1/N) sum_{k,l} Phi(|k><l|) (x) |k><l|

Row index of ``J`` is ``a * N + k``.  ``J`` is PSD iff the channel is
completely positive, and ``Tr_A J = I/N`` iff it is trace preserving.

The bipartite reduction maps a state on ``C^M (x) C^N`` to a state on
``C^2 (x) C^M (x) C^N``; the first two factors together form ``A'`` and the
last factor is ``B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import basis_for_dim
from .errors import NumericIntegrityError, ValidationError
from .linalg import check_hermitian, check_square, check_state, partial_trace

CHOI_TOL = 1e-10
PSD_TOL = 1e-9
#: Largest condition number the local filter accepts for the reduced state.
KAPPA_GUARD = 1e6
#: Eigenvalues below this fraction of the largest are treated as zero.
EIG_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# Jamiolkowski operators and Kraus sets


@dataclass(frozen=True)
class ChoiOperator:
    """Jamiolkowski operator with its CP / TP flags computed at construction."""

    M: int
    N: int
    J: np.ndarray
    is_cp: bool = field(init=False)
    is_tp: bool = field(init=False)
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        J = check_hermitian(np.array(self.J, dtype=complex), self.M * self.N, atol=1e-10, name="Jamiolkowski operator")
        J = 0.5 * (J + J.conj().T)
        J.setflags(write=False)
        lam = float(np.linalg.eigvalsh(J)[0])
        reduced = partial_trace(J, (self.M, self.N), keep=[1])
        tp = bool(np.allclose(reduced, np.eye(self.N) / self.N, rtol=0, atol=CHOI_TOL))
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "min_eigenvalue", lam)
        object.__setattr__(self, "is_cp", lam >= -PSD_TOL * max(1.0, float(np.linalg.norm(J, 2))))
        object.__setattr__(self, "is_tp", tp)

    @property
    def trace(self) -> float:
        return float(np.trace(self.J).real)

    def apply(self, X) -> np.ndarray:
        """Channel action recovered from ``J``: ``Phi(X) = N sum_{k,l} X_kl J[(., k), (., l)]``."""
        X = check_square(X, self.N)
        J4 = self.J.reshape(self.M, self.N, self.M, self.N)
        return self.N * np.einsum("akbl,kl->ab", J4, X)


def matrix_unit(n, k, l):
    E = np.zeros((n, n), dtype=complex)
    E[k, l] = 1
    return E


def jamiolkowski(channel, M: int, N: int, check_linear: bool = True, rng=None) -> ChoiOperator:
    """Jamiolkowski operator of a channel given as a callable or as ``N^2`` outputs.

    A sequence must list ``Phi(|k><l|)`` in row-major order of ``(k, l)``.  A
    callable is additionally probed on a random operator to confirm
    linearity.
    """
    if M < 1 or N < 1:
        raise ValidationError(f"dimensions must be positive, got ({M}, {N})")
    if callable(channel):
        outputs = [np.asarray(channel(matrix_unit(N, k, l)), dtype=complex) for k in range(N) for l in range(N)]
    else:
        outputs = [np.asarray(o, dtype=complex) for o in channel]
        if len(outputs) != N * N:
            raise ValidationError(f"channel description needs {N * N} outputs, got {len(outputs)}")
    for i, out in enumerate(outputs):
        if out.shape != (M, M):
            raise ValidationError(f"output {i} has shape {out.shape}, expected ({M}, {M})")
    stack = np.array(outputs).reshape(N, N, M, M)
    if callable(channel) and check_linear:
        rng = np.random.default_rng(0) if rng is None else rng
        X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        direct = np.asarray(channel(X), dtype=complex)
        combined = np.einsum("kl,klab->ab", X, stack)
        scale = max(1.0, float(np.max(np.abs(combined))))
        if direct.shape != (M, M) or not np.allclose(direct, combined, rtol=0, atol=1e-9 * scale):
            raise ValidationError("channel is not linear on the matrix-unit basis")
    J = stack.transpose(2, 0, 3, 1).reshape(M * N, M * N) / N
    return ChoiOperator(M, N, J)


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators ``K_i`` of shape ``(M, N)``; ``Phi(X) = sum K_i X K_i^dag``."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(K, dtype=complex) for K in self.operators)
        if not ops:
            raise ValidationError("Kraus set is empty")
        shape = ops[0].shape
        if len(shape) != 2 or any(K.shape != shape for K in ops):
            raise ValidationError("Kraus operators must be matrices of one common shape")
        if len(ops) > shape[0] * shape[1]:
            raise ValidationError(f"{len(ops)} Kraus operators exceed the minimal bound MN={shape[0] * shape[1]}")
        for K in ops:
            K.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def M(self) -> int:
        return self.operators[0].shape[0]

    @property
    def N(self) -> int:
        return self.operators[0].shape[1]

    def __len__(self):
        return len(self.operators)

    def completeness(self) -> np.ndarray:
        return sum(K.conj().T @ K for K in self.operators)

    def is_trace_preserving(self, tol=1e-9) -> bool:
        return bool(np.allclose(self.completeness(), np.eye(self.N), rtol=0, atol=tol))

    def __call__(self, X) -> np.ndarray:
        X = check_square(X, self.N)
        return sum(K @ X @ K.conj().T for K in self.operators)


def channel_from_kraus(operators):
    """Callable channel ``X -> sum K X K^dag``; accepts more than ``MN`` operators."""
    ops = [np.asarray(K, dtype=complex) for K in operators]
    return lambda X: sum(K @ X @ K.conj().T for K in ops)


def kraus_from_choi(choi: ChoiOperator, tol: float = PSD_TOL) -> KrausSet:
    """Minimal Kraus set from the eigendecomposition of a CP Jamiolkowski operator.

    Each eigenvector, indexed ``a * N + k``, is reshaped row-major to an
    ``M x N`` matrix and scaled by ``sqrt(N lambda)``; the factor ``N``
    undoes the normalisation of ``|phi+>``.
    """
    if not choi.is_cp:
        raise ValidationError(f"Jamiolkowski operator is not PSD (min eigenvalue {choi.min_eigenvalue:.3e})")
    lam, vecs = np.linalg.eigh(choi.J)
    cutoff = tol * max(1.0, float(lam[-1]))
    ops = []
    for i in range(len(lam) - 1, -1, -1):
        if lam[i] <= cutoff:
            continue
        v = vecs[:, i]
        # Fix the free phase so the largest entry is real and positive.
        j = int(np.argmax(np.abs(v)))
        v = v * (abs(v[j]) / v[j])
        ops.append(math.sqrt(choi.N * lam[i]) * v.reshape(choi.M, choi.N))
    if not ops:
        ops = [np.zeros((choi.M, choi.N), dtype=complex)]
    return KrausSet(tuple(ops))


def identity_channel(X):
    return np.array(X, dtype=complex)


def transpose_map(X):
    return np.array(X, dtype=complex).T


def depolarizing_channel(M: int):
    """Completely depolarizing channel ``X -> Tr(X) I/M``."""
    return lambda X: np.trace(X) * np.eye(M, dtype=complex) / M


def random_kraus(M, N, rng, count=None, trace_preserving=True) -> KrausSet:
    """Random Kraus set from a Haar-like isometry ``C^N -> C^M (x) C^count``."""
    count = M * N if count is None else count
    G = rng.normal(size=(M * count, N)) + 1j * rng.normal(size=(M * count, N))
    if trace_preserving:
        if M * count < N:
            raise ValidationError("too few Kraus operators to be trace preserving")
        V, _ = np.linalg.qr(G)
    else:
        V = G / np.linalg.norm(G, 2) * 0.9
    ops = V.reshape(count, M, N)
    return KrausSet(tuple(ops))


# ---------------------------------------------------------------------------
# Marker map, local filter and the composed reduction


def _check_dims(M, N):
    if M < 1 or N < 2:
        raise ValidationError(f"reduction needs M >= 1 and N >= 2, got ({M}, {N})")


def marker_mixing(N: int) -> float:
    return 1.0 - 1.0 / N


def marker_map_phi(rho, M: int, N: int) -> np.ndarray:
    """``(1-p)|0><0| (x) rho + p |1><1| (x) I/(MN)`` with ``p = 1 - 1/N``.

    Its reduced state on ``B`` is ``(1-p) rho_B + p I/N``, whose eigenvalues
    lie in ``[p/N, (1-p) + p/N]``.
    """
    _check_dims(M, N)
    rho = check_state(rho, M * N)
    p = marker_mixing(N)
    d = M * N
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = (1 - p) * rho
    out[d:, d:] = p * np.eye(d) / d
    return out


def reduced_b(sigma, M: int, N: int) -> np.ndarray:
    """``Tr_{A'}`` of an operator on ``C^2 (x) C^M (x) C^N``."""
    return partial_trace(sigma, (2 * M, N), keep=[1])


def condition_number(rho_b) -> float:
    """``lambda_max / lambda_min`` of a PSD matrix; ``inf`` when singular."""
    lam = np.linalg.eigvalsh(check_hermitian(rho_b))
    if lam[0] < -PSD_TOL * max(1.0, abs(lam[-1])):
        raise ValidationError(f"condition number needs a PSD matrix (min eigenvalue {lam[0]:.3e})")
    if lam[-1] <= 0 or lam[0] <= EIG_FLOOR * lam[-1]:
        return math.inf
    return float(lam[-1] / lam[0])


def kappa_bound(N: int) -> float:
    """Bound ``(2N - 1)/(N - 1)`` on the condition number of the marker map's reduced state."""
    if N < 2:
        raise ValidationError("kappa bound needs N >= 2")
    return (2 * N - 1) / (N - 1)


class IllConditioned(ValidationError):
    def __init__(self, kappa):
        self.kappa = kappa
        super().__init__(f"reduced state is ill-conditioned (kappa = {kappa:.3e}, guard {KAPPA_GUARD:.0e})")


def filter_map_upsilon(sigma, M: int, N: int) -> np.ndarray:
    """Conjugate by ``I (x) sigma_B^{-1/2}`` and renormalise to unit trace."""
    _check_dims(M, N)
    sigma = check_hermitian(sigma, 2 * M * N)
    sb = reduced_b(sigma, M, N)
    kappa = condition_number(sb)
    if not kappa <= KAPPA_GUARD:
        raise IllConditioned(kappa)
    lam, U = np.linalg.eigh(sb)
    inv_sqrt = (U / np.sqrt(lam)) @ U.conj().T
    F = np.kron(np.eye(2 * M), inv_sqrt)
    out = F @ sigma @ F.conj().T
    tr = np.trace(out).real
    if not tr > 0:
        raise NumericIntegrityError(f"filtered operator has non-positive trace {tr}")
    out = out / tr
    return 0.5 * (out + out.conj().T)


def ebp_reduce(rho, M: int, N: int) -> np.ndarray:
    """``Upsilon(Phi(rho))``: a state with ``Tr_{A'} = I/N``, entangled iff ``rho`` is."""
    return filter_map_upsilon(marker_map_phi(rho, M, N), M, N)


def output_is_tp_slice(sigma, M: int, N: int, tol: float = CHOI_TOL) -> bool:
    return bool(np.allclose(reduced_b(sigma, M, N), np.eye(N) / N, rtol=0, atol=tol))


# ---------------------------------------------------------------------------
# Fano form on the trace-preserving slice


@dataclass(frozen=True)
class FanoVector:
    """Local Bloch vector of ``A`` and correlation block; ``r^B`` is zero on the slice."""

    M: int
    N: int
    rA: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        rA = np.array(self.rA, dtype=float).reshape(-1)
        T = np.array(self.T, dtype=float)
        if rA.shape != (self.M**2 - 1,):
            raise ValidationError(f"rA must have length {self.M**2 - 1}, got {rA.shape}")
        if T.shape != (self.M**2 - 1, self.N**2 - 1):
            raise ValidationError(f"T must have shape {(self.M**2 - 1, self.N**2 - 1)}, got {T.shape}")
        rA.setflags(write=False)
        T.setflags(write=False)
        object.__setattr__(self, "rA", rA)
        object.__setattr__(self, "T", T)

    def as_vector(self) -> np.ndarray:
        """Flat real vector of length ``(M^2 - 1) N^2``."""
        return np.concatenate([self.rA, self.T.reshape(-1)])

    @classmethod
    def from_vector(cls, v, M, N):
        v = np.asarray(v, dtype=float).reshape(-1)
        k = M * M - 1
        if v.shape[0] != k * N * N:
            raise ValidationError(f"Fano vector for ({M}, {N}) needs {k * N * N} entries, got {v.shape[0]}")
        return cls(M, N, v[:k], v[k:].reshape(k, N * N - 1))


def _generators(d):
    return basis_for_dim(d).generators


def fano_encode(rho, M: int, N: int, tol: float = CHOI_TOL) -> FanoVector:
    """``r^A_i = Tr((s_i (x) I) rho)`` and ``T_ij = Tr((s_i (x) s_j) rho)``."""
    if M < 2 or N < 2:
        raise ValidationError(f"Fano form needs M, N >= 2, got ({M}, {N})")
    rho = check_hermitian(rho, M * N)
    if abs(np.trace(rho) - 1) > tol:
        raise ValidationError("Fano form needs a unit-trace operator")
    rb = partial_trace(rho, (M, N), keep=[1])
    if not np.allclose(rb, np.eye(N) / N, rtol=0, atol=tol):
        raise ValidationError("operator is outside the trace-preserving slice (Tr_A rho != I/N)")
    GA, GB = _generators(M), _generators(N)
    r4 = rho.reshape(M, N, M, N)
    rA = np.einsum("iba,acbc->i", GA, r4)
    T = np.einsum("iba,jdc,acbd->ij", GA, GB, r4)
    resid = max(np.max(np.abs(rA.imag)), np.max(np.abs(T.imag)))
    if resid > 1e-9:
        raise NumericIntegrityError(f"Fano coordinates carry imaginary residue {resid:.3e}")
    return FanoVector(M, N, rA.real, T.real)


def fano_decode(v: FanoVector) -> np.ndarray:
    """``I/(MN) + (1/2N) sum r^A_i s_i (x) I + (1/4) sum T_ij s_i (x) s_j``."""
    M, N = v.M, v.N
    GA, GB = _generators(M), _generators(N)
    local = np.einsum("i,iab->ab", v.rA, GA)
    corr = np.einsum("ij,iab,jcd->acbd", v.T, GA, GB).reshape(M * N, M * N)
    return np.eye(M * N) / (M * N) + np.kron(local, np.eye(N)) / (2 * N) + corr / 4
