"""Named verification checks behind ``sephard verify`` and the acceptance suite.

Each check returns a list of :class:`CheckRow` objects carrying the measured
quantity next to the tolerance it was judged against.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import channels as ch
from .bloch import basis_for_dim, bloch_distance_pair, bloch_to_density, density_to_bloch, sep_set_geometry
from .errors import DegenerateInstance
from .graphs import CliqueInstance, Graph, Verdict, canonical_corpus, maximum_clique, random_graph
from .linalg import max_entangled, random_product_mixture, random_state
from .membership import MembershipSearchConfig, wopt_via_membership
from .oracles import OptimizerConfig, eval_g, motzkin_straus_max, ppt_test, seesaw_product_max
from .reduction import (
    RsdfInstance,
    WoptInstance,
    beta_exact,
    build_c_matrix,
    clique_to_rsdf,
    doubling_exponent,
    exponent_in_M,
    exponent_in_N,
    membership_params,
    rsdf_to_wopt,
    beta_plain_float,
    threshold_gap,
)

#: (M, N, epsilon, beta) evaluated with 50-digit arithmetic from the closed form.
GOLDEN_BETA = (
    (2, 2, 0.01, 1.1025447791946801933e-19),
    (2, 3, 0.001, 3.4432302237383455694e-25),
    (3, 2, 0.25, 5.3800472245911646162e-18),
    (3, 3, 0.05, 1.6842494477276451655e-22),
    (4, 4, 0.0007, 2.1307658969249735496e-31),
    (5, 7, 1e-4, 2.0934975470783084334e-38),
    (7, 7, 3e-5, 6.9310676861219959384e-42),
    (10, 10, 1e-6, 2.3309226974646221881e-50),
    (16, 16, 1e-8, 1.1277925890268775753e-61),
    (100, 50, 0.001, 1.8529637781483261104e-63),
)


@dataclass(frozen=True)
class CheckRow:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: measured={self.measured:.6g} tolerance={self.tolerance:.3g}"
        return text + (f" ({self.detail})" if self.detail else "")

    def as_dict(self):
        return asdict(self)


def _row(name, measured, tolerance, detail="", *, upper=True):
    """Pass iff ``measured <= tolerance`` (or ``>=`` when ``upper`` is false)."""
    measured = float(measured)
    ok = measured <= tolerance if upper else measured >= tolerance
    return CheckRow(name, bool(ok and not math.isnan(measured)), measured, float(tolerance), detail)


@dataclass(frozen=True)
class VerifyOptions:
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    random_graphs: int = 500
    random_max_n: int = 8
    corpus_max_n: int = 6
    eb_samples: int = 1000
    eb_pairs: int = 500
    membership_instances: int = 12
    membership: MembershipSearchConfig = field(default_factory=MembershipSearchConfig)


def graph_corpus(opts: VerifyOptions) -> list[Graph]:
    """Canonical corpus up to ``corpus_max_n`` plus seeded random graphs up to ``random_max_n``."""
    graphs = canonical_corpus(opts.corpus_max_n)
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.random_graphs):
        n = int(rng.integers(1, opts.random_max_n + 1))
        graphs.append(random_graph(n, float(rng.uniform(0.1, 0.9)), rng))
    return graphs


def gadget_matrices(g: Graph):
    """Gadget matrices of a graph (a single zero matrix when it has no vertex pairs)."""
    if g.n < 2:
        return [np.zeros((max(g.n, 1), max(g.n, 1)))]
    return list(clique_to_rsdf(CliqueInstance(g, 2)).B) if g.edge_count else [np.zeros((g.n, g.n))]


# ---------------------------------------------------------------------------
# individual checks


def check_motzkin_straus(opts: VerifyOptions):
    t0 = time.perf_counter()
    worst, worst_numeric, unconverged = 0.0, 0.0, 0
    graphs = graph_corpus(opts)
    for g in graphs:
        omega = maximum_clique(g)[0]
        res = motzkin_straus_max(g, opts.optimizer)
        target = 0.5 * (1 - 1 / omega)
        worst = max(worst, abs(res.value - target))
        worst_numeric = max(worst_numeric, abs(res.numeric_value - target))
        unconverged += not res.converged
    elapsed = time.perf_counter() - t0
    return [
        _row("motzkin_straus.max_error", worst, 1e-6, f"{len(graphs)} graphs; unseeded error {worst_numeric:.2e}"),
        _row("motzkin_straus.unconverged", unconverged, 0),
        _row("motzkin_straus.runtime_s", elapsed, 180.0),
    ]


def check_threshold_identity(opts: VerifyOptions):
    worst, worst_numeric, unconverged = 0.0, 0.0, 0
    graphs = graph_corpus(opts)
    for g in graphs:
        omega = maximum_clique(g)[0]
        res = eval_g(gadget_matrices(g), opts.optimizer)
        target = 2 * (1 - 1 / omega)
        worst = max(worst, abs(res.value - target))
        if not math.isnan(res.numeric_value):
            worst_numeric = max(worst_numeric, abs(res.numeric_value - target))
        unconverged += not res.converged
    return [
        _row("threshold_identity.max_error", worst, 1e-6, f"{len(graphs)} graphs; unseeded error {worst_numeric:.2e}"),
        _row("threshold_identity.unconverged", unconverged, 0),
    ]


def _clique_wopt_instances(max_n, min_n=2):
    """``(graph, rsdf, wopt)`` for every graph with at least one edge (thresholds for ``c = 2``)."""
    out = []
    for g in canonical_corpus(max_n, min_n=min_n):
        if g.edge_count == 0:
            continue
        rsdf = clique_to_rsdf(CliqueInstance(g, 2))
        out.append((g, rsdf, rsdf_to_wopt(rsdf)))
    return out


def check_separable_max_identity(opts: VerifyOptions, max_n: int = 4):
    t0 = time.perf_counter()
    worst, worst_numeric, dims = 0.0, 0.0, set()
    for g, rsdf, w in _clique_wopt_instances(max_n):
        gval = eval_g(rsdf.B, opts.optimizer).value
        sw = seesaw_product_max(w.c_matrix, w.M, w.N, opts.optimizer)
        worst = max(worst, abs(math.sqrt(gval) - sw.value))
        worst_numeric = max(worst_numeric, abs(math.sqrt(gval) - sw.numeric_value))
        dims.add((w.M, w.N))
    elapsed = time.perf_counter() - t0
    return [
        _row("separable_max_identity.max_error", worst, 1e-6,
             f"largest dims {max(dims)}; unseeded error {worst_numeric:.2e}"),
        _row("separable_max_identity.runtime_s", elapsed, 120.0),
    ]


def check_structural_exactness(opts: VerifyOptions, max_n: int | None = None):
    max_n = opts.corpus_max_n if max_n is None else max_n
    frob_err = norm_err = 0.0
    leak = 0.0
    count = 0
    for g, rsdf, w in _clique_wopt_instances(max_n):
        frob_err = max(frob_err, abs(np.linalg.norm(w.c_matrix) - rsdf.delta))
        norm_err = max(norm_err, abs(np.linalg.norm(w.c_hat) - math.sqrt(2 * g.edge_count)))
        sl = basis_for_dim(w.M * w.N).slices()
        leak = max(leak, np.max(np.abs(w.c_hat[sl["V"]]), initial=0.0), np.max(np.abs(w.c_hat[sl["W"]]), initial=0.0))
        count += 1
    return [
        _row("structural.frobenius_equals_delta", frob_err, 1e-12, f"{count} instances"),
        _row("structural.c_hat_norm", norm_err, 1e-10),
        _row("structural.non_u_components", leak, 0.0, "exact zero required"),
    ]


def check_generator_basis(opts: VerifyOptions, dims=range(2, 17), pairs: int = 1000):
    rng = np.random.default_rng(opts.seed)
    ortho = trace = roundtrip = 0.0
    for d in dims:
        G = basis_for_dim(d).generators
        gram = np.einsum("iab,jba->ij", G, G)
        ortho = max(ortho, np.max(np.abs(gram - 2 * np.eye(len(G)))))
        trace = max(trace, np.max(np.abs(np.einsum("iaa->i", G))))
        for _ in range(5):
            rho = random_state(d, rng)
            back = bloch_to_density(density_to_bloch(rho))
            roundtrip = max(roundtrip, np.max(np.abs(back - rho)))
    factor = 0.0
    for _ in range(pairs):
        d = int(rng.integers(2, 9))
        f, b = bloch_distance_pair(random_state(d, rng), random_state(d, rng))
        factor = max(factor, abs(f - b / math.sqrt(2)))
    return [
        _row("generator_basis.orthonormality", ortho, 1e-12, f"d in {dims.start}..{dims.stop - 1}"),
        _row("generator_basis.traceless", trace, 1e-12),
        _row("generator_basis.bloch_roundtrip", roundtrip, 1e-12),
        _row("generator_basis.distance_factor", factor, 1e-12, f"{pairs} random pairs"),
    ]


def certified_fmax(g: Graph, w: WoptInstance) -> float:
    """``max c . r`` over separable states from the clique oracle: ``sqrt(2(1 - 1/omega)) / |c_hat|``."""
    omega = maximum_clique(g)[0]
    return math.sqrt(2 * (1 - 1 / omega)) / w.c_hat_norm


def check_end_to_end_soundness(opts: VerifyOptions, max_n: int = 5):
    violations, checked, direct = 0, 0, 0
    min_margin = math.inf
    seesaw_gap = 0.0
    for g in canonical_corpus(max_n, min_n=2):
        omega = maximum_clique(g)[0]
        if g.edge_count == 0:
            direct += g.n - 1
            continue
        base = rsdf_to_wopt(clique_to_rsdf(CliqueInstance(g, 2)))
        fmax = certified_fmax(g, base)
        sw = seesaw_product_max(base.c_matrix, base.M, base.N, opts.optimizer).value / base.c_hat_norm
        seesaw_gap = max(seesaw_gap, abs(sw - fmax))
        for c in range(2, g.n + 1):
            try:
                w = rsdf_to_wopt(clique_to_rsdf(CliqueInstance(g, c)), keep_matrix=False)
            except DegenerateInstance:
                direct += 1
                continue
            if omega >= c:
                margin = fmax - (w.gamma + w.epsilon)
            else:
                margin = (w.gamma - w.epsilon) - fmax
            min_margin = min(min_margin, margin)
            violations += margin < 0
            checked += 1
    return [
        _row("end_to_end.violations", violations, 0, f"{checked} reduced instances, {direct} answered directly"),
        _row("end_to_end.min_margin", min_margin, 0.0, "smallest distance past gamma +- eps", upper=False),
        _row("end_to_end.seesaw_vs_certified", seesaw_gap, 1e-6),
    ]


def check_hardness_exponents(opts: VerifyOptions):
    t0 = time.perf_counter()
    dbl = doubling_exponent(10_000)
    sM = exponent_in_M(100, [10_000, 20_000])
    sN = exponent_in_N(10_000, [10_000, 20_000])
    elapsed = time.perf_counter() - t0
    return [
        _row("exponents.doubling", abs(dbl - 73), 1.0, f"log2(beta(n)/beta(2n)) = {dbl:.4f} at n = 1e4"),
        _row("exponents.slope_M", abs(sM + 16), 0.5, f"slope {sM:.4f}"),
        _row("exponents.slope_N", abs(sN + 20.5), 0.5, f"slope {sN:.4f}"),
        _row("exponents.runtime_s", elapsed, 1.0),
    ]


def check_beta_golden(opts: VerifyOptions):
    worst_exact = worst_float = 0.0
    for M, N, eps, golden in GOLDEN_BETA:
        worst_exact = max(worst_exact, abs(float(beta_exact(M, N, eps)) - golden) / golden)
        if eps < 1:
            worst_exact = max(worst_exact, abs(membership_params(M, N, eps).beta - golden) / golden)
        geo = sep_set_geometry(M, N)
        worst_float = max(worst_float, abs(beta_plain_float(geo.inner_radius, geo.outer_radius, geo.m, eps) - golden) / golden)
    return [
        _row("beta.golden_relative_error", worst_exact, 1e-15, f"{len(GOLDEN_BETA)} tuples"),
        _row("beta.plain_float_relative_error", worst_float, 1e-12, "unrounded float formula, informational"),
    ]


def check_eb_machinery(opts: VerifyOptions):
    rng = np.random.default_rng(opts.seed)
    rows = []
    # condition number of the marker map's reduced state
    worst_ratio, worst_kappa = 0.0, 0.0
    for i in range(opts.eb_samples):
        N = 2 + i % 4
        M = int(rng.integers(2, 4))
        rho = random_state(M * N, rng, rank=int(rng.integers(1, M * N + 1)))
        kappa = ch.condition_number(ch.reduced_b(ch.marker_map_phi(rho, M, N), M, N))
        worst_ratio = max(worst_ratio, kappa / ch.kappa_bound(N))
        worst_kappa = max(worst_kappa, kappa)
    rows.append(_row("eb.kappa_max", worst_kappa, 3.0, f"{opts.eb_samples} samples, N in 2..5"))
    rows.append(_row("eb.kappa_over_bound", worst_ratio, 1.0 + 1e-12))

    # trace-preserving slice and PPT-status preservation
    slice_err, mismatches, n_sep = 0.0, 0, 0
    for i in range(opts.eb_pairs):
        if i % 2:
            rho = random_product_mixture(2, 2, rng)
        else:
            rho = random_state(4, rng, rank=int(rng.integers(1, 5)))
        out = ch.ebp_reduce(rho, 2, 2)
        slice_err = max(slice_err, np.max(np.abs(ch.reduced_b(out, 2, 2) - np.eye(2) / 2)))
        ppt_in = ppt_test(rho, 2, 2).passes
        ppt_out = ppt_test(out, 4, 2).passes
        mismatches += ppt_in != ppt_out
        n_sep += ppt_in
    rows.append(_row("eb.tp_slice", slice_err, 1e-10, f"{opts.eb_pairs} samples"))
    rows.append(_row("eb.ppt_mismatches", mismatches, 0, f"{n_sep} PPT inputs, {opts.eb_pairs - n_sep} NPT inputs"))

    # Jamiolkowski golden cases
    phi = max_entangled(2)
    gold = max(
        np.max(np.abs(ch.jamiolkowski(ch.identity_channel, 2, 2).J - np.outer(phi, phi.conj()))),
        np.max(np.abs(ch.jamiolkowski(ch.depolarizing_channel(3), 3, 2).J - np.eye(6) / 6)),
        np.max(np.abs(ch.jamiolkowski(ch.depolarizing_channel(2), 2, 2).J - np.eye(4) / 4)),
    )
    rows.append(_row("eb.jamiolkowski_golden", gold, 1e-12))
    transpose = ch.jamiolkowski(ch.transpose_map, 2, 2)
    rows.append(_row("eb.transpose_min_eigenvalue", abs(transpose.min_eigenvalue + 0.5), 1e-12,
                     f"CP flag {transpose.is_cp}"))

    # Kraus roundtrip and CP/TP flags on random channels
    kraus_err, flags_bad = 0.0, 0
    for _ in range(200):
        M, N = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        ks = ch.random_kraus(M, N, rng, count=int(rng.integers(-(-N // M), M * N + 1)))
        choi = ch.jamiolkowski(ks, M, N)
        flags_bad += not (choi.is_cp and choi.is_tp)
        back = ch.kraus_from_choi(choi)
        for k in range(N):
            for l in range(N):
                E = ch.matrix_unit(N, k, l)
                kraus_err = max(kraus_err, np.max(np.abs(back(E) - ks(E))))
    sub = ch.jamiolkowski(ch.random_kraus(2, 2, rng, trace_preserving=False), 2, 2)
    flags_bad += sub.is_tp or transpose.is_cp
    rows.append(_row("eb.kraus_roundtrip", kraus_err, 1e-10, "200 random channels"))
    rows.append(_row("eb.cp_tp_flags_wrong", flags_bad, 0))
    return rows


def membership_corpus(opts: VerifyOptions):
    """``(label, instance, expected verdict)`` for the (2,2) demonstration.

    The expected verdict comes from the see-saw maximum; random instances
    place ``gamma`` a fixed distance from it on either side.
    """
    rng = np.random.default_rng(opts.seed)
    basis = basis_for_dim(4)
    out = []
    k2 = rsdf_to_wopt(clique_to_rsdf(CliqueInstance(Graph.complete(2), 2)))
    out.append(("K2", k2, _seesaw_verdict(k2, opts)))
    # product-state direction with a small threshold
    a, b = np.array([1, 0], dtype=complex), np.array([np.cos(0.3), np.sin(0.3)], dtype=complex)
    v = np.kron(a, b)
    y = density_to_bloch(np.outer(v, v.conj())).coords
    out.append(("product_small_gamma", WoptInstance(2, 2, y, 0.2, 0.01), Verdict.YES))
    out.append(("gamma_beyond_R", WoptInstance(2, 2, rng.normal(size=15), 1.5, 0.01), Verdict.NO))
    for i in range(opts.membership_instances):
        c = rng.normal(size=15)
        c /= np.linalg.norm(c)
        fmax = seesaw_product_max(basis.operator(c), 2, 2, opts.optimizer).value
        shift = (0.05, -0.05, 0.15, -0.15)[i % 4]
        w = WoptInstance(2, 2, c, fmax - shift, 0.01)
        out.append((f"random_{i}", w, _seesaw_verdict(w, opts)))
    return out


def _seesaw_verdict(w: WoptInstance, opts):
    C = basis_for_dim(w.M * w.N).operator(w.c)
    fmax = seesaw_product_max(C, w.M, w.N, opts.optimizer).value
    if fmax >= w.gamma + w.epsilon:
        return Verdict.YES
    if fmax <= w.gamma - w.epsilon:
        return Verdict.NO
    return Verdict.INCONCLUSIVE


def check_membership_demo(opts: VerifyOptions):
    disagreements, inconclusive, queries = 0, 0, 0
    corpus = membership_corpus(opts)
    for label, w, expected in corpus:
        res = wopt_via_membership(w, config=opts.membership)
        queries += res.queries
        if res.verdict is Verdict.INCONCLUSIVE:
            inconclusive += 1
        elif res.verdict is not expected:
            disagreements += 1
    rate = inconclusive / len(corpus)
    return [
        _row("membership.disagreements", disagreements, 0, f"{len(corpus) - inconclusive} resolved"),
        _row("membership.inconclusive_rate", rate, 0.2, f"{inconclusive}/{len(corpus)}; {queries} oracle queries"),
    ]


CHECKS = {
    "motzkin_straus": check_motzkin_straus,
    "threshold_identity": check_threshold_identity,
    "separable_max_identity": check_separable_max_identity,
    "structural_exactness": check_structural_exactness,
    "generator_basis": check_generator_basis,
    "end_to_end_soundness": check_end_to_end_soundness,
    "exponents": check_hardness_exponents,
    "beta_golden": check_beta_golden,
    "eb_machinery": check_eb_machinery,
    "membership_demo": check_membership_demo,
}


def run_checks(names=None, opts: VerifyOptions | None = None, workers: int = 4) -> list[CheckRow]:
    """Run the named checks (all by default) on a bounded thread pool, in registry order."""
    opts = opts or VerifyOptions()
    names = list(CHECKS) if not names else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(CHECKS[n], opts) for n in names]
        return [row for f in futures for row in f.result()]


# ---------------------------------------------------------------------------
# re-verification of emitted instance files


def check_instance_documents(rsdf: RsdfInstance | None, wopt: WoptInstance | None, wmem=None):
    """Recompute the derived quantities stored in reduction outputs."""
    rows = []
    if rsdf is not None and wopt is not None:
        C = build_c_matrix(rsdf, wopt.M if wopt.M > rsdf.k + 1 else None)
        c_hat = 0.5 * basis_for_dim(wopt.M * wopt.N).coefficients(C).real
        rows.append(_row("instance.c_hat_reproduced", np.max(np.abs(c_hat - wopt.c_hat)), 1e-12))
        rows.append(_row("instance.frobenius_equals_delta", abs(np.linalg.norm(C) - rsdf.delta), 1e-12))
    if wopt is not None:
        rows.append(_row("instance.c_hat_norm_sq",
                         abs(float(wopt.c_hat @ wopt.c_hat) - float(wopt.c_hat_norm_sq or 0)), 1e-10))
        if wopt.zeta is not None:
            hi, lo = math.sqrt(wopt.zeta + wopt.eta), math.sqrt(wopt.zeta - wopt.eta)
            norm = wopt.c_hat_norm
            gamma = (hi + lo) / (2 * norm)
            eps = threshold_gap(wopt.zeta, wopt.eta) / (4 * norm * (wopt.M * wopt.N - 1) + 1)
            rows.append(_row("instance.gamma_reproduced", abs(gamma - wopt.gamma), 1e-12 * max(1.0, gamma)))
            rows.append(_row("instance.epsilon_reproduced", abs(eps - wopt.epsilon) / eps, 1e-12))
    if wmem is not None:
        beta = float(beta_exact(wmem.M, wmem.N, Fraction(wmem.epsilon)))
        rows.append(_row("instance.beta_reproduced", abs(beta - wmem.beta) / beta, 1e-12))
        if wopt is not None:
            rows.append(_row("instance.epsilon_consistent", abs(wmem.epsilon - wopt.epsilon), 0.0))
    return rows

