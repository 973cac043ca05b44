"""Instance mappings CLIQUE -> RSDF -> WOPT and the WOPT -> WMEM parameter layer.

Exact quantities (thresholds, squared norms, edge counts) are carried as
:class:`fractions.Fraction`; anything involving a square root is a float whose
rational operands are kept on the instance so it can be re-derived at higher
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bloch import GeneratorBasis, sep_set_geometry
from .errors import DegenerateInstance, NumericIntegrityError, ValidationError
from .graphs import CliqueInstance, Graph, Verdict, max_clique_bruteforce


@dataclass(frozen=True)
class RsdfInstance:
    """Symmetric matrices ``B_1..B_k`` (``l x l``) with thresholds ``zeta``, ``eta``."""

    B: tuple
    zeta: Fraction
    eta: Fraction

    def __post_init__(self):
        mats = tuple(np.array(b, dtype=float) for b in self.B)
        if not mats:
            raise ValidationError("RSDF instance needs at least one matrix")
        l = mats[0].shape[0]
        for i, b in enumerate(mats):
            if b.shape != (l, l):
                raise ValidationError(f"B_{i + 1} has shape {b.shape}, expected ({l}, {l})")
            if not np.array_equal(b, b.T):
                raise ValidationError(f"B_{i + 1} is not symmetric")
            b.setflags(write=False)
        zeta, eta = Fraction(self.zeta), Fraction(self.eta)
        if zeta < 0 or eta < 0:
            raise ValidationError("zeta and eta must be non-negative")
        if zeta - eta < 0:
            raise ValidationError("zeta - eta must be non-negative")
        object.__setattr__(self, "B", mats)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "eta", eta)

    @property
    def k(self) -> int:
        return len(self.B)

    @property
    def l(self) -> int:
        return self.B[0].shape[0]

    @property
    def delta_sq(self) -> Fraction:
        """``2 sum_i ||B_i||_F^2``, exact."""
        return 2 * sum((Fraction(x) ** 2 for b in self.B for x in b.flat), Fraction(0))

    @property
    def delta(self) -> float:
        return math.sqrt(self.delta_sq)


def rsdf_thresholds(c: int) -> tuple[Fraction, Fraction]:
    """``zeta``, ``eta`` with ``zeta + eta = 2(1 - 1/c)`` and ``zeta - eta = 2(1 - 1/(c-1))``."""
    if c < 2:
        raise ValidationError(f"thresholds need c >= 2, got {c}")
    c = Fraction(c)
    return 2 - 1 / c - 1 / (c - 1), 1 / (c * (c - 1))


def clique_to_rsdf(inst: CliqueInstance) -> RsdfInstance:
    """One gadget matrix per vertex pair ``s < t`` carrying ``A_G[s, t]`` at ``(s,t)`` and ``(t,s)``."""
    g = inst.graph
    if inst.c < 2:
        raise DegenerateInstance("c = 1 is always a YES instance", answer=Verdict.YES)
    if g.edge_count == 0:
        raise DegenerateInstance("edgeless graph has clique number 1", answer=Verdict.NO)
    mats = []
    for s in range(g.n):
        for t in range(s + 1, g.n):
            b = np.zeros((g.n, g.n))
            b[s, t] = b[t, s] = g.adj[s, t]
            mats.append(b)
    zeta, eta = rsdf_thresholds(inst.c)
    return RsdfInstance(tuple(mats), zeta, eta)


def direct_answer(inst: CliqueInstance) -> Verdict | None:
    """Answer for instances that never reach a gadget (``c = 1`` or no edges)."""
    if inst.c == 1:
        return Verdict.YES
    if inst.graph.edge_count == 0:
        return Verdict.NO
    return None


def graph_from_gadgets(B) -> Graph | None:
    """Recover the source graph when every matrix is a clique gadget.

    Returns ``None`` unless each matrix is either zero or has exactly two
    nonzero entries, both 1, at mirrored off-diagonal positions.
    """
    mats = [np.asarray(b) for b in B]
    l = mats[0].shape[0]
    adj = np.zeros((l, l), dtype=np.int8)
    for b in mats:
        nz = np.argwhere(b != 0)
        if len(nz) == 0:
            continue
        if len(nz) != 2:
            return None
        (s, t), (t2, s2) = nz
        if s == t or (s, t) != (s2, t2) or b[s, t] != 1 or b[t, s] != 1:
            return None
        adj[s, t] = adj[t, s] = 1
    return Graph(adj)


def gadget_dims(inst: RsdfInstance, M_target: int | None = None) -> tuple[int, int]:
    if inst.l < 2:
        raise ValidationError("gadget needs l >= 2 so that N >= 2")
    N = inst.l * (inst.l - 1) // 2 + 1
    M = inst.k + 1
    if M_target is not None:
        if M_target < M:
            raise ValidationError(f"M_target={M_target} is smaller than k+1={M}")
        M = M_target
    return M, N


def build_c_matrix(inst: RsdfInstance, M_target: int | None = None) -> np.ndarray:
    """Real symmetric ``MN x MN`` block matrix with ``A_i`` in the first block row and column.

    Each ``A_i`` is ``N x N`` with ``B_i`` in its upper-left corner.  Extra
    blocks requested through ``M_target`` stay zero.
    """
    M, N = gadget_dims(inst, M_target)
    l = inst.l
    C = np.zeros((M * N, M * N))
    for i, b in enumerate(inst.B, start=1):
        C[0:l, i * N:i * N + l] = b
        C[i * N:i * N + l, 0:l] = b
    return C


@dataclass(frozen=True)
class WoptInstance:
    """Weak optimisation instance over the separable Bloch set of ``C^M (x) C^N``."""

    M: int
    N: int
    c_hat: np.ndarray
    gamma: float
    epsilon: float
    delta: float = float("nan")
    c_matrix: np.ndarray | None = None
    zeta: Fraction | None = None
    eta: Fraction | None = None
    c_hat_norm_sq: Fraction | None = None
    delta_sq: Fraction | None = None
    c: np.ndarray = field(init=False)

    def __post_init__(self):
        c_hat = np.array(self.c_hat, dtype=float).reshape(-1)
        if c_hat.shape[0] != self.m:
            raise ValidationError(f"objective has length {c_hat.shape[0]}, expected m={self.m}")
        norm = np.linalg.norm(c_hat)
        if norm == 0:
            raise ValidationError("objective vector is zero")
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        c = c_hat / norm
        if abs(np.linalg.norm(c) - 1) > 1e-12:
            raise NumericIntegrityError("normalised objective is not a unit vector")
        c_hat.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "c_hat", c_hat)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return (self.M * self.N) ** 2 - 1

    @property
    def c_hat_norm(self) -> float:
        if self.c_hat_norm_sq is not None:
            return math.sqrt(self.c_hat_norm_sq)
        return float(np.linalg.norm(self.c_hat))

    def objective_operator(self) -> np.ndarray:
        """Traceless ``C_c`` with ``Tr(C_c rho) = c . r`` for every state ``rho`` with Bloch vector ``r``."""
        return GeneratorBasis(self.M * self.N).operator(self.c)


def threshold_gap(zeta, eta) -> float:
    """``sqrt(zeta + eta) - sqrt(zeta - eta)`` without cancellation."""
    hi, lo = math.sqrt(zeta + eta), math.sqrt(zeta - eta)
    return float(2 * eta) / (hi + lo) if hi + lo > 0 else 0.0


def rsdf_to_wopt(inst: RsdfInstance, M_target: int | None = None, keep_matrix: bool = True) -> WoptInstance:
    M, N = gadget_dims(inst, M_target)
    C = build_c_matrix(inst, M_target)
    delta_sq = inst.delta_sq
    if delta_sq == 0:
        raise DegenerateInstance("all gadget matrices are zero (graph has no edges)", answer=Verdict.NO)
    d = M * N
    c_hat = 0.5 * GeneratorBasis(d).coefficients(C).real
    # C is traceless, so ||c_hat||^2 = ||C||_F^2 / 2 = delta^2 / 2 exactly.
    norm_sq = delta_sq / 2
    if not math.isclose(float(c_hat @ c_hat), norm_sq, rel_tol=1e-12):
        raise NumericIntegrityError(f"||c_hat||^2 = {c_hat @ c_hat!r} disagrees with exact {norm_sq}")
    norm = math.sqrt(norm_sq)
    hi, lo = math.sqrt(inst.zeta + inst.eta), math.sqrt(inst.zeta - inst.eta)
    gap = threshold_gap(inst.zeta, inst.eta)
    gamma = (hi + lo) / (2 * norm)
    epsilon = gap / (4 * norm * (d - 1) + 1)
    if not epsilon < gap / (2 * norm + 2):
        raise NumericIntegrityError("binding epsilon does not undercut the NO-side bound")
    return WoptInstance(
        M=M,
        N=N,
        c_hat=c_hat,
        gamma=gamma,
        epsilon=epsilon,
        delta=math.sqrt(delta_sq),
        c_matrix=C if keep_matrix else None,
        zeta=inst.zeta,
        eta=inst.eta,
        c_hat_norm_sq=norm_sq,
        delta_sq=delta_sq,
    )


def epsilon_bounds(w: WoptInstance) -> dict[str, float]:
    """Margins available to a WOPT instance built from an RSDF instance.

    ``binding`` is the epsilon actually used; ``no_side`` is the looser bound
    that suffices for the NO direction; ``yes_chain`` is the largest epsilon
    for which ``sqrt(zeta+eta)/||c_hat|| - 2(MN-1) eps >= gamma + eps`` holds.
    """
    if w.zeta is None:
        raise ValidationError("instance carries no RSDF thresholds")
    gap = threshold_gap(w.zeta, w.eta)
    norm = w.c_hat_norm
    d = w.M * w.N
    return {
        "binding": w.epsilon,
        "no_side": gap / (2 * norm + 2),
        "yes_chain": gap / (4 * norm * (d - 1) + 2 * norm),
    }


def interior_shift(w: WoptInstance) -> float:
    """``2 eps R / r``: distance to a point that is ``eps``-deep inside the separable set."""
    geo = sep_set_geometry(w.M, w.N)
    return 2 * w.epsilon * geo.outer_radius / geo.inner_radius


def wopt_verdict(w: WoptInstance, f_max: float) -> Verdict:
    """Classify a (certified) separable maximum of ``c . r`` against ``gamma +- eps``."""
    if f_max >= w.gamma + w.epsilon:
        return Verdict.YES
    if f_max <= w.gamma - w.epsilon:
        return Verdict.NO
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class WmemParams:
    beta: float
    inner_radius: float
    outer_radius: float
    m: int
    epsilon: float
    M: int
    N: int


def beta_plain_float(r: float, R: float, m: int, eps: float) -> float:
    """``r^3 eps^3 / (2^13 3^3 m^5 R^4 (R + r))`` in plain floating point."""
    return r**3 * eps**3 / (2**13 * 3**3 * float(m) ** 5 * R**4 * (R + r))


def beta_exact(M: int, N: int, eps) -> Fraction:
    """Membership margin as an exact rational.

    With ``d = MN`` the radii satisfy ``R = (d - 1) r``, so ``r^3 / (R + r) = r^2 / d``
    and both ``r^2`` and ``R^4`` are rational.
    """
    d = M * N
    m = d * d - 1
    r_sq = Fraction(2, d * (d - 1))
    R_sq = Fraction(2 * (d - 1), d)
    eps = Fraction(eps)
    return r_sq / d * eps**3 / (2**13 * 3**3 * m**5 * R_sq**2)


def wopt_to_wmem_params(w: WoptInstance) -> WmemParams:
    return membership_params(w.M, w.N, w.epsilon)


def membership_params(M: int, N: int, eps: float) -> WmemParams:
    if not 0 < eps < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {eps}")
    geo = sep_set_geometry(M, N)
    beta = float(beta_exact(M, N, eps))
    plain = beta_plain_float(geo.inner_radius, geo.outer_radius, geo.m, eps)
    if not math.isclose(beta, plain, rel_tol=1e-12):
        raise NumericIntegrityError(f"beta evaluations disagree: {beta!r} vs {plain!r}")
    if not 0 < beta < eps:
        raise NumericIntegrityError(f"beta={beta!r} outside (0, eps)")
    return WmemParams(beta, geo.inner_radius, geo.outer_radius, geo.m, eps, M, N)


# --- asymptotic exponents (log domain; nothing is materialised) ---------------


def _log_beta(M: float, N: float, c_hat_norm: float, gap: float) -> float:
    d = M * N
    log_r = 0.5 * (math.log(2) - math.log(d) - math.log(d - 1))
    log_R = 0.5 * (math.log(2) + math.log(d - 1) - math.log(d))
    log_m = math.log(d * d - 1)
    log_eps = math.log(gap) - math.log(4 * c_hat_norm * (d - 1) + 1)
    log_r_plus_R = log_r + math.log(d)  # R + r = d r
    return (
        3 * log_r + 3 * log_eps
        - 13 * math.log(2) - 3 * math.log(3)
        - 5 * log_m - 4 * log_R - log_r_plus_R
    )


def worst_case_c(n: int) -> int:
    return max(2, -(-n // 2))


def _worst_case_gap(n: int) -> float:
    return threshold_gap(*rsdf_thresholds(worst_case_c(n)))


def worst_case_epsilon(n: int) -> float:
    """Epsilon for ``K_n`` at ``c = ceil(n/2)`` (``M = N = n(n-1)/2 + 1``, all edges present)."""
    d = (n * (n - 1) // 2 + 1) ** 2
    norm = math.sqrt(n * (n - 1))
    return _worst_case_gap(n) / (4 * norm * (d - 1) + 1)


def log_beta_worst_case(n: int) -> float:
    N = n * (n - 1) // 2 + 1
    return _log_beta(N, N, math.sqrt(n * (n - 1)), _worst_case_gap(n))


def log_beta_padded(M: int, l: int) -> float:
    """log beta for an ``l``-vertex complete graph padded to ``M`` blocks (``N = l(l-1)/2 + 1``)."""
    N = l * (l - 1) // 2 + 1
    return _log_beta(M, N, math.sqrt(l * (l - 1)), _worst_case_gap(l))


def _slope(xs, ys) -> float:
    return float(np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)[0])


def hardness_exponents(n_values) -> float:
    """Log-log slope of the worst-case beta against the vertex count."""
    n_values = [int(n) for n in n_values]
    if len(n_values) < 2:
        raise ValidationError("need at least two sample points")
    if any(b <= a for a, b in zip(n_values, n_values[1:])) or n_values[0] < 10:
        raise ValidationError("sample points must be increasing and >= 10")
    return _slope([math.log(n) for n in n_values], [log_beta_worst_case(n) for n in n_values])


def doubling_exponent(n: int) -> float:
    """``log2(beta(n) / beta(2n))``."""
    return (log_beta_worst_case(n) - log_beta_worst_case(2 * n)) / math.log(2)


def exponent_in_M(l: int, M_values) -> float:
    """Slope of log beta against log M with the graph (hence ``N``) held fixed."""
    return _slope([math.log(M) for M in M_values], [log_beta_padded(M, l) for M in M_values])


def exponent_in_N(M: int, l_values) -> float:
    """Slope of log beta against log N with ``M`` held fixed (``M >= N`` not enforced)."""
    Ns = [l * (l - 1) // 2 + 1 for l in l_values]
    return _slope([math.log(N) for N in Ns], [log_beta_padded(M, l) for l in l_values])


def reduce_clique(inst: CliqueInstance, M_target: int | None = None):
    """Full chain for one CLIQUE instance: ``(rsdf, wopt, wmem)``."""
    rsdf = clique_to_rsdf(inst)
    wopt = rsdf_to_wopt(rsdf, M_target)
    return rsdf, wopt, wopt_to_wmem_params(wopt)


def clique_number(g: Graph) -> int:
    return max_clique_bruteforce(g)
