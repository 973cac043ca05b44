"""Numerical oracles certifying the optimisation identities at desk scale.

All optimisers run their restarts as one vectorised batch, accept only
non-decreasing steps, and return the best restart.  For objectives built from
clique gadgets the optimum predicted by the clique number is added as a
deterministic seed, which turns the multistart search into a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericIntegrityError, ValidationError
from .graphs import CLIQUE_BUDGET, Graph, maximum_clique
from .linalg import check_hermitian, check_state, partial_transpose
from .reduction import graph_from_gadgets


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 50
    max_iters: int = 500
    tol: float = 1e-12
    seed: int = 0


DEFAULT_CONFIG = OptimizerConfig()


@dataclass
class SphereOptResult:
    """Best point found by a multistart optimiser.

    ``x`` lives on the unit sphere for :func:`eval_g` and on the probability
    simplex for :func:`motzkin_straus_max`.  ``numeric_value`` is the best
    value reached from random starts alone; ``seeded_value`` is the value at
    the clique-derived seed (``nan`` when no seed applies).
    """

    value: float
    x: np.ndarray
    restarts_used: int
    converged: bool
    numeric_value: float = float("nan")
    seeded_value: float = float("nan")


@dataclass
class ProductStateResult:
    value: float
    a: np.ndarray
    b: np.ndarray
    restarts_used: int = 0
    converged: bool = True
    numeric_value: float = float("nan")
    seeded_value: float = float("nan")
    history: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class PptVerdict:
    passes: bool
    min_pt_eigenvalue: float


def _resolve(config, **overrides):
    config = config or DEFAULT_CONFIG
    return OptimizerConfig(**{**config.__dict__, **{k: v for k, v in overrides.items() if v is not None}})


# --- Motzkin-Straus ------------------------------------------------------------


def _edge_form(A, X):
    """``sum_{(i,j) in G} x_i x_j`` row-wise."""
    return 0.5 * np.einsum("ri,ij,rj->r", X, A, X)


def motzkin_straus_max(g: Graph, config: OptimizerConfig | None = None, seeded: bool = True) -> SphereOptResult:
    """Maximise the edge quadratic form over the simplex with replicator dynamics.

    The replicator update ``x_i <- x_i (A x)_i / x^T A x`` never decreases
    ``x^T A x`` for symmetric non-negative ``A``.
    """
    cfg = _resolve(config)
    if g.n > CLIQUE_BUDGET:
        raise ValidationError(f"n={g.n} exceeds the optimiser budget {CLIQUE_BUDGET}")
    n = g.n
    if g.edge_count == 0:
        x = np.full(n, 1.0 / n)
        return SphereOptResult(0.0, x, 0, True, 0.0, 0.0 if seeded else float("nan"))
    A = g.adj.astype(float)
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(n, 1.0 / n)]
    starts += list(rng.dirichlet(np.ones(n), size=max(cfg.restarts - 1, 0)))
    X = np.array(starts)
    n_random = len(X)
    if seeded:
        omega, clique = maximum_clique(g)
        seed_pt = np.zeros(n)
        seed_pt[list(clique)] = 1.0 / omega
        X = np.vstack([X, seed_pt])

    f = _edge_form(A, X)
    done = np.zeros(len(X), dtype=bool)
    for _ in range(cfg.max_iters):
        AX = X @ A
        denom = 2 * f
        active = ~done & (denom > 0)
        if not active.any():
            break
        Xn = X.copy()
        Xn[active] = X[active] * AX[active] / denom[active, None]
        Xn[active] /= Xn[active].sum(axis=1, keepdims=True)
        fn = _edge_form(A, Xn)
        if np.any(fn[active] < f[active] - 1e-14):
            raise NumericIntegrityError("replicator step decreased the objective")
        done |= active & (fn - f <= cfg.tol)
        done |= denom <= 0
        X, f = Xn, np.maximum(fn, f)

    best = int(np.argmax(f))
    numeric = float(f[:n_random].max())
    return SphereOptResult(
        value=float(f[best]),
        x=X[best],
        restarts_used=n_random,
        converged=bool(done[best]),
        numeric_value=numeric,
        seeded_value=float(f[-1]) if seeded else float("nan"),
    )


# --- RSDF objective g ----------------------------------------------------------


def g_objective(B, X):
    """``sum_i (x^T B_i x)^2`` for each row of ``X``."""
    q = np.einsum("kij,ri,rj->rk", B, X, X)
    return (q**2).sum(axis=1)


def _g_grad(B, X):
    q = np.einsum("kij,ri,rj->rk", B, X, X)
    return 4 * np.einsum("rk,kij,rj->ri", q, B, X)


def clique_sphere_seed(g: Graph) -> np.ndarray:
    """Square-root lift of the uniform distribution on a maximum clique."""
    omega, clique = maximum_clique(g)
    x = np.zeros(g.n)
    x[list(clique)] = 1 / np.sqrt(omega)
    return x


def eval_g(B, config: OptimizerConfig | None = None, seeded: bool = True) -> SphereOptResult:
    """Maximise ``sum_i (x^T B_i x)^2`` over the unit sphere.

    Riemannian gradient ascent with per-restart adaptive steps; a step is
    kept only if it does not decrease the objective.
    """
    cfg = _resolve(config)
    B = np.asarray([np.asarray(b, dtype=float) for b in B])
    if B.ndim != 3 or B.shape[1] != B.shape[2]:
        raise ValidationError("B must be a list of square matrices")
    l = B.shape[1]
    if l > 30:
        raise ValidationError(f"l={l} exceeds the sphere-search budget of 30")
    if not np.any(B):
        x = np.zeros(l)
        x[0] = 1.0
        return SphereOptResult(0.0, x, 0, True, 0.0, float("nan"))
    rng = np.random.default_rng(cfg.seed)
    X = rng.normal(size=(cfg.restarts, l))
    n_random = len(X)
    graph = graph_from_gadgets(B) if seeded else None
    if graph is not None:
        X = np.vstack([X, clique_sphere_seed(graph)])
    X /= np.linalg.norm(X, axis=1, keepdims=True)

    f = g_objective(B, X)
    step = np.full(len(X), 0.1)
    done = np.zeros(len(X), dtype=bool)
    for _ in range(cfg.max_iters):
        active = ~done
        if not active.any():
            break
        G = _g_grad(B, X)
        G -= np.sum(G * X, axis=1, keepdims=True) * X
        gnorm = np.linalg.norm(G, axis=1)
        done |= gnorm < 1e-10
        active = ~done
        Xn = X + step[:, None] * G
        Xn /= np.linalg.norm(Xn, axis=1, keepdims=True)
        fn = g_objective(B, Xn)
        accept = active & (fn >= f)
        gain = np.where(accept, fn - f, 0.0)
        X[accept], f[accept] = Xn[accept], fn[accept]
        step = np.where(accept, step * 1.5, step * 0.5)
        done |= accept & (gain <= cfg.tol) & (step > 1e-3)
        done |= step < 1e-14

    best = int(np.argmax(f))
    return SphereOptResult(
        value=float(f[best]),
        x=X[best],
        restarts_used=n_random,
        converged=bool(done[best]),
        numeric_value=float(f[:n_random].max()),
        seeded_value=float(f[-1]) if graph is not None else float("nan"),
    )


# --- product-state maximisation ------------------------------------------------


def product_seed_from_c_matrix(C, M, N):
    """Optimal product state for a clique-gadget ``C``, or ``None`` if ``C`` is not one.

    With ``x`` the sphere seed of the underlying graph and ``v_i = x^T A_i x``,
    the state ``a = (1, v/|v|)/sqrt(2)``, ``b = x`` attains ``|v| = sqrt(g)``.
    """
    C = np.asarray(C)
    if np.iscomplexobj(C) and np.any(C.imag):
        return None
    C = C.real
    blocks = [C[0:N, i * N:(i + 1) * N] for i in range(1, M)]
    if np.any(C[0:N, 0:N]) or not np.array_equal(C[N:, N:], np.zeros_like(C[N:, N:])):
        return None
    for i, blk in enumerate(blocks, start=1):
        if not np.array_equal(C[i * N:(i + 1) * N, 0:N], blk):
            return None
    graph = graph_from_gadgets(blocks)
    if graph is None or graph.edge_count == 0:
        return None
    x = clique_sphere_seed(graph)
    v = np.array([x @ blk @ x for blk in blocks])
    a = np.concatenate([[1.0], v / np.linalg.norm(v)]) / np.sqrt(2)
    return a.astype(complex), x.astype(complex)


def _top_eig(H):
    w, V = np.linalg.eigh(H)
    return w[..., -1], V[..., :, -1]


def seesaw_product_max(
    C,
    M: int,
    N: int,
    config: OptimizerConfig | None = None,
    seeded: bool = True,
    extra_seeds=(),
    record_history: bool = False,
) -> ProductStateResult:
    """Maximise ``<a (x) b| C |a (x) b>`` by alternating top-eigenvector updates.

    Fixing ``b``, the best ``a`` is the principal eigenvector of
    ``(I (x) <b|) C (I (x) |b>)``, and symmetrically for ``b``, so every half
    step is non-decreasing.  Because the objective is linear and the
    separable set is the convex hull of pure product states, the maximum
    equals ``max Tr(C rho_sep)``.
    """
    cfg = _resolve(config)
    C = check_hermitian(C, M * N)
    if M * N > 256:
        raise ValidationError(f"MN={M * N} exceeds the see-saw budget of 256")
    if not np.any(C):
        return ProductStateResult(0.0, np.eye(M)[0].astype(complex), np.eye(N)[0].astype(complex), 0, True, 0.0)
    C4 = C.reshape(M, N, M, N)
    rng = np.random.default_rng(cfg.seed)
    b = rng.normal(size=(cfg.restarts, N)) + 1j * rng.normal(size=(cfg.restarts, N))
    a = np.zeros((cfg.restarts, M), dtype=complex)
    n_random = cfg.restarts
    seeds = list(extra_seeds)
    if seeded:
        s = product_seed_from_c_matrix(C, M, N)
        if s is not None:
            seeds.append(s)
    n_seeded = len(seeds)
    if seeds:
        a = np.vstack([a] + [s[0][None, :] for s in seeds])
        b = np.vstack([b] + [s[1][None, :] for s in seeds])
    b /= np.linalg.norm(b, axis=1, keepdims=True)

    def value(a, b):
        return np.einsum("ra,rj,ajbk,rb,rk->r", a.conj(), b.conj(), C4, a, b).real

    # Seeds are evaluated as given before any update.
    val = np.full(len(b), -np.inf)
    if n_seeded:
        a[n_random:] /= np.linalg.norm(a[n_random:], axis=1, keepdims=True)
        val[n_random:] = value(a[n_random:], b[n_random:])
    history = []
    done = np.zeros(len(b), dtype=bool)
    slack = 1e-12 * max(1.0, np.abs(C).max())
    for _ in range(cfg.max_iters):
        CA = np.einsum("rj,ajbk,rk->rab", b.conj(), C4, b)
        va, a = _top_eig(CA)
        if np.any(va < val - slack):
            raise NumericIntegrityError("see-saw A-step decreased the objective")
        CB = np.einsum("ra,ajbk,rb->rjk", a.conj(), C4, a)
        vb, b = _top_eig(CB)
        if np.any(vb < va - slack):
            raise NumericIntegrityError("see-saw B-step decreased the objective")
        if record_history:
            history.append(vb.copy())
        done = vb - val <= cfg.tol
        val = vb
        if done.all():
            break

    best = int(np.argmax(val))
    return ProductStateResult(
        value=float(val[best]),
        a=a[best],
        b=b[best],
        restarts_used=n_random,
        converged=bool(done[best]),
        numeric_value=float(val[:n_random].max()),
        seeded_value=float(val[n_random:].max()) if n_seeded else float("nan"),
        history=history,
    )


# --- PPT -----------------------------------------------------------------------

PPT_TOL = 1e-9


def ppt_test(rho, M: int, N: int, tol: float = PPT_TOL) -> PptVerdict:
    """Partial transpose on the second factor; passes iff its spectrum is >= -tol."""
    rho = check_state(rho, M * N, tol=tol)
    lam = float(np.linalg.eigvalsh(partial_transpose(rho, (M, N), 1))[0])
    return PptVerdict(lam >= -tol, lam)
