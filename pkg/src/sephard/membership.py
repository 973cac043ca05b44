"""Weak-membership oracle for the separable set and a WOPT solver driven by it.

The oracle is exact in the regimes where positive partial transpose
characterises separability (2x2 and 2x3).  :func:`wopt_via_membership` is a
demonstration stand-in for the cited polynomial-time reduction: it only
touches the convex set through membership queries.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from .bloch import BlochVector, bloch_to_density, sep_set_geometry
from .errors import ValidationError
from .graphs import Verdict
from .linalg import partial_transpose
from .oracles import PPT_TOL
from .reduction import WoptInstance

EXACT_PPT_DIMS = {(2, 2), (2, 3), (3, 2)}


def wmem_ppt_oracle(y, beta: float, M: int, N: int, tol: float = PPT_TOL) -> Verdict:
    """YES iff the Bloch vector ``y`` is a state with positive partial transpose.

    In the exact regime this decides membership itself, so the weak contract
    holds for every ``beta > 0``.  Points within ``beta`` of the border may
    receive either answer.
    """
    if (M, N) not in EXACT_PPT_DIMS:
        raise ValidationError(f"PPT is not an exact separability test at ({M}, {N})")
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    if not isinstance(y, BlochVector):
        y = BlochVector(M * N, y)
    if y.dim != M * N:
        raise ValidationError(f"Bloch vector dimension {y.dim} does not match MN={M * N}")
    rho = bloch_to_density(y)
    if np.linalg.eigvalsh(rho)[0] < -tol:
        return Verdict.NO
    if np.linalg.eigvalsh(partial_transpose(rho, (M, N), 1))[0] < -tol:
        return Verdict.NO
    return Verdict.YES


class MembershipOracle:
    """Counting, optionally logging wrapper around :func:`wmem_ppt_oracle`.

    Calls are guarded by a lock, so one instance may be shared by concurrent
    workers.  ``log`` receives one JSON document per query.
    """

    thread_safe = True

    def __init__(self, M, N, beta=1e-12, log=None):
        if (M, N) not in EXACT_PPT_DIMS:
            raise ValidationError(f"PPT is not an exact separability test at ({M}, {N})")
        self.M, self.N, self.beta = M, N, beta
        self.queries = 0
        self._log = log
        self._lock = threading.Lock()

    def __call__(self, y) -> bool:
        ans = wmem_ppt_oracle(np.asarray(y, dtype=float), self.beta, self.M, self.N) is Verdict.YES
        with self._lock:
            self.queries += 1
            if self._log is not None:
                self._log.write(json.dumps({"query": self.queries, "norm": float(np.linalg.norm(y)), "member": ans}) + "\n")
        return ans


@dataclass
class WoptOutcome:
    verdict: Verdict
    lower_bound: float
    upper_bound: float
    queries: int
    point: np.ndarray


@dataclass(frozen=True)
class MembershipSearchConfig:
    climb_iters: int = 40
    cut_iters: int = 200
    bisection_steps: int = 48
    fd_step: float = 1e-6
    max_queries: int = 60_000
    seed: int = 0


class _QueryBudget(Exception):
    pass


class _Searcher:
    """Query-counting helpers shared by the phases of the demo loop."""

    def __init__(self, oracle, R, cfg):
        self.oracle, self.R, self.cfg = oracle, R, cfg
        self.used = 0

    def member(self, y):
        if self.used >= self.cfg.max_queries:
            raise _QueryBudget
        self.used += 1
        return self.oracle(y)

    def radial(self, u, lo=0.0, hi=None):
        """Largest certified ``t`` in the bracket with ``t u`` a member (``u`` a unit vector)."""
        hi = self.R * (1 + 1e-9) if hi is None else hi
        if self.member(hi * u):
            return hi if hi >= self.R else self.radial(u, hi, None)
        if lo > 0 and not self.member(lo * u):
            return self.radial(u, 0.0, lo)
        for _ in range(self.cfg.bisection_steps):
            mid = 0.5 * (lo + hi)
            if self.member(mid * u):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return lo

    def gauge_gradient(self, b):
        """Forward-difference gradient of the gauge at the boundary point ``b``."""
        h = self.cfg.fd_step
        t0 = np.linalg.norm(b)
        grad = np.empty(len(b))
        for i in range(len(b)):
            y = b.copy()
            y[i] += h
            n = np.linalg.norm(y)
            u = y / n
            t = self.radial(u, t0 * (1 - 1e-3), t0 * (1 + 1e-3))
            grad[i] = (n / t - 1.0) / h
        return grad


def wopt_via_membership(w: WoptInstance, oracle=None, config: MembershipSearchConfig | None = None) -> WoptOutcome:
    """Decide a WOPT instance with membership queries only.

    Lower bound: best value ``c . y`` over certified members.  The search
    starts with a radial line search along ``c`` and a short random-direction
    hill climb, then runs a cutting-plane loop: an LP over the current
    outer approximation proposes a direction, a radial line search certifies
    the boundary point along it, and a finite-difference gradient of the
    gauge function there becomes a new supporting half-space.  The LP value
    is the upper bound.  Cuts that a certified member violates are dropped.
    """
    from scipy.optimize import linprog

    cfg = config or MembershipSearchConfig()
    oracle = oracle if oracle is not None else MembershipOracle(w.M, w.N)
    R = sep_set_geometry(w.M, w.N).outer_radius
    c = np.asarray(w.c, dtype=float)
    m = len(c)
    rng = np.random.default_rng(cfg.seed)
    s = _Searcher(oracle, R, cfg)
    target_yes, target_no = w.gamma + w.epsilon, w.gamma - w.epsilon

    if not s.member(np.zeros(m)):
        raise ValidationError("oracle rejects the centre of the separable set")

    lb, best = -math.inf, np.zeros(m)
    ub = R
    members = []
    cuts, rhs = [], []

    def record(u):
        nonlocal lb, best
        t = s.radial(u)
        point = t * u
        members.append(point)
        val = float(c @ point)
        if val > lb:
            lb, best = val, point
        return point

    def done():
        return lb >= target_yes or ub <= target_no

    try:
        record(c)
        sigma = 0.3
        u_best = c.copy()
        for _ in range(cfg.climb_iters):
            if done():
                break
            u = u_best + sigma * rng.normal(size=m) / math.sqrt(m)
            u /= np.linalg.norm(u)
            if R * float(c @ u) <= lb:
                sigma *= 0.8
                continue
            before = lb
            record(u)
            if lb > before:
                u_best = u
                sigma = min(sigma * 1.5, 1.0)
            else:
                sigma *= 0.8
        b = best
        for _ in range(cfg.cut_iters):
            if done() or not np.any(b):
                break
            g = s.gauge_gradient(b)
            gb = float(g @ b)
            if gb > 0:
                g = g / gb
                # Small slack absorbs finite-difference error in the normal.
                slack = 1e-6 * (1 + np.linalg.norm(g) * R)
                if all(float(g @ p) <= 1 + slack for p in members):
                    cuts.append(g)
                    rhs.append(1 + slack)
            for _ in range(20):
                res = linprog(-c, A_ub=np.array(cuts) if cuts else None, b_ub=np.array(rhs) if rhs else None,
                              bounds=[(-R, R)] * m, method="highs")
                y = res.x
                n = np.linalg.norm(y)
                if n <= R * (1 + 1e-9):
                    break
                # Tangent plane of the outer ball: always valid, costs no queries.
                cuts.append(y / n)
                rhs.append(R)
            ub = min(ub, float(-res.fun), R)
            if done() or n == 0:
                break
            b = record(y / n)
    except _QueryBudget:
        pass

    if lb >= target_yes:
        verdict = Verdict.YES
    elif ub <= target_no:
        verdict = Verdict.NO
    else:
        verdict = Verdict.INCONCLUSIVE
    return WoptOutcome(verdict, lb, ub, s.used, best)
