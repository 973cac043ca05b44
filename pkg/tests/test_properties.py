"""Property-based checks driven by hypothesis."""

import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sephard import channels as ch
from sephard.bloch import bloch_distance_pair, bloch_to_density, density_to_bloch
from sephard.graphs import CliqueInstance, Graph, maximum_clique
from sephard.linalg import partial_trace, partial_transpose, random_state
from sephard.reduction import beta_exact, clique_to_rsdf, epsilon_bounds, rsdf_thresholds, rsdf_to_wopt

seeds = st.integers(0, 2**32 - 1)


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    pairs = [(s, t) for s in range(n) for t in range(s + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@given(st.integers(2, 10_000))
def test_thresholds_are_clique_levels(c):
    zeta, eta = rsdf_thresholds(c)
    assert zeta + eta == 2 * (1 - Fraction(1, c))
    assert zeta - eta == 2 * (1 - Fraction(1, c - 1))
    assert eta > 0 and zeta - eta >= 0


@given(graphs(), st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_reduction_invariants(g, c):
    if g.edge_count == 0 or c > g.n:
        return
    rsdf = clique_to_rsdf(CliqueInstance(g, c))
    w = rsdf_to_wopt(rsdf)
    assert abs(np.linalg.norm(w.c_matrix) - rsdf.delta) <= 1e-12
    assert abs(np.linalg.norm(w.c_hat) - math.sqrt(2 * g.edge_count)) <= 1e-10
    b = epsilon_bounds(w)
    assert 0 < b["binding"] < b["no_side"]
    # Certified separable maximum lands on the correct side of gamma +- eps.
    omega = maximum_clique(g)[0]
    fmax = math.sqrt(2 * (1 - 1 / omega)) / w.c_hat_norm
    if omega >= c:
        assert fmax >= w.gamma + w.epsilon
    else:
        assert fmax <= w.gamma - w.epsilon


@given(st.integers(2, 50), st.integers(2, 50), st.floats(1e-12, 0.99))
def test_beta_cubic_and_small(M, N, eps):
    b = beta_exact(M, N, eps)
    assert beta_exact(M, N, Fraction(eps) / 2) * 8 == b
    assert 0 < b < eps


@given(seeds, st.integers(2, 7))
@settings(max_examples=50)
def test_bloch_roundtrip_and_distance(seed, d):
    rng = np.random.default_rng(seed)
    a, b = random_state(d, rng), random_state(d, rng, rank=1)
    assert np.max(np.abs(bloch_to_density(density_to_bloch(a)) - a)) <= 1e-12
    f, r = bloch_distance_pair(a, b)
    assert abs(f - r / math.sqrt(2)) <= 1e-12


@given(seeds, st.integers(2, 4), st.integers(2, 4))
@settings(max_examples=50)
def test_partial_operations(seed, M, N):
    rng = np.random.default_rng(seed)
    rho = random_state(M * N, rng)
    A = partial_trace(rho, (M, N), keep=[0])
    B = partial_trace(rho, (M, N), keep=[1])
    assert abs(np.trace(A) - 1) < 1e-12 and abs(np.trace(B) - 1) < 1e-12
    pt = partial_transpose(rho, (M, N), 1)
    np.testing.assert_allclose(partial_transpose(pt, (M, N), 1), rho, atol=0)
    np.testing.assert_allclose(np.trace(pt), 1, atol=1e-12)
    np.testing.assert_allclose(partial_trace(pt, (M, N), keep=[0]), A, atol=1e-12)


@given(seeds, st.integers(2, 3), st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_ebp_reduce_properties(seed, M, N):
    rng = np.random.default_rng(seed)
    rho = random_state(M * N, rng, rank=int(rng.integers(1, M * N + 1)))
    kappa = ch.condition_number(ch.reduced_b(ch.marker_map_phi(rho, M, N), M, N))
    assert kappa <= ch.kappa_bound(N) * (1 + 1e-12)
    out = ch.ebp_reduce(rho, M, N)
    assert ch.output_is_tp_slice(out, M, N)
    v = ch.fano_encode(out, 2 * M, N)
    assert np.max(np.abs(ch.fano_decode(v) - out)) <= 1e-12
