import math

import numpy as np
import pytest

from sephard.bloch import GeneratorBasis
from sephard.errors import ValidationError
from sephard.graphs import CliqueInstance, Graph, maximum_clique, random_graph
from sephard.linalg import max_entangled, random_product_mixture, random_pure
from sephard.oracles import (
    OptimizerConfig,
    eval_g,
    g_objective,
    motzkin_straus_max,
    ppt_test,
    seesaw_product_max,
)
from sephard.reduction import clique_to_rsdf, rsdf_to_wopt


def gadget_instance(g):
    rsdf = clique_to_rsdf(CliqueInstance(g, 2))
    return rsdf, rsdf_to_wopt(rsdf)


@pytest.mark.parametrize(
    "g, expected",
    [(Graph.complete(3), 1 / 3), (Graph.complete(2), 1 / 4), (Graph.empty(4), 0.0), (Graph.complete(4), 3 / 8)],
)
def test_motzkin_straus_examples(g, expected):
    res = motzkin_straus_max(g)
    assert res.value == pytest.approx(expected, abs=1e-12)
    assert res.converged
    np.testing.assert_allclose(res.x.sum(), 1, atol=1e-12)


def test_motzkin_straus_unseeded(rng):
    for _ in range(20):
        g = random_graph(int(rng.integers(2, 8)), 0.5, rng)
        omega = maximum_clique(g)[0]
        res = motzkin_straus_max(g, seeded=False)
        assert res.value == pytest.approx(0.5 * (1 - 1 / omega), abs=1e-6)


def test_eval_g_examples():
    assert eval_g(clique_to_rsdf(CliqueInstance(Graph.complete(3), 2)).B).value == pytest.approx(4 / 3, abs=1e-12)
    assert eval_g([np.array([[0, 1], [1, 0]])]).value == pytest.approx(1, abs=1e-12)
    assert eval_g([np.zeros((3, 3))]).value == 0


def test_eval_g_result_invariants():
    B = clique_to_rsdf(CliqueInstance(Graph.complete(4), 2)).B
    res = eval_g(B, seeded=False)
    assert abs(np.linalg.norm(res.x) - 1) <= 1e-12
    assert abs(g_objective(np.array(B), res.x[None, :])[0] - res.value) <= 1e-12
    assert res.value == pytest.approx(1.5, abs=1e-8)


def test_eval_g_budget():
    with pytest.raises(ValidationError):
        eval_g([np.zeros((31, 31))])


def test_eval_g_sphere_bruteforce():
    # Dense sampling of the circle for the single-edge gadget: max of 4 x1^2 x2^2 is 1.
    t = np.linspace(0, 2 * np.pi, 100001)
    assert np.max(4 * np.cos(t) ** 2 * np.sin(t) ** 2) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("g", [Graph.complete(2), Graph.complete(3), Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])])
def test_seesaw_matches_sqrt_g(g):
    rsdf, w = gadget_instance(g)
    gval = eval_g(rsdf.B).value
    res = seesaw_product_max(w.c_matrix, w.M, w.N)
    assert res.value == pytest.approx(math.sqrt(gval), abs=1e-10)
    assert res.numeric_value == pytest.approx(math.sqrt(gval), abs=1e-6)


def test_seesaw_result_invariants(rng):
    d = 6
    H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = H + H.conj().T
    res = seesaw_product_max(H, 2, 3, OptimizerConfig(restarts=20), record_history=True)
    assert abs(np.linalg.norm(res.a) - 1) <= 1e-12 and abs(np.linalg.norm(res.b) - 1) <= 1e-12
    v = np.kron(res.a, res.b)
    assert abs((v.conj() @ H @ v).real - res.value) <= 1e-10
    hist = np.array(res.history)  # (iterations, restarts)
    assert np.all(np.diff(hist, axis=0) >= -1e-12 * np.abs(H).max())
    # No product state beats the reported maximum.
    for _ in range(2000):
        v = np.kron(random_pure(2, rng), random_pure(3, rng))
        assert (v.conj() @ H @ v).real <= res.value + 1e-9


def test_seesaw_zero_and_budget():
    assert seesaw_product_max(np.zeros((4, 4)), 2, 2).value == 0
    with pytest.raises(ValidationError):
        seesaw_product_max(np.zeros((289, 289)), 17, 17)


def test_ppt_examples():
    res = ppt_test(np.eye(4) / 4, 2, 2)
    assert res.passes and res.min_pt_eigenvalue == pytest.approx(0.25)
    phi = max_entangled(2)
    res = ppt_test(np.outer(phi, phi.conj()), 2, 2)
    assert not res.passes and res.min_pt_eigenvalue == pytest.approx(-0.5)


def test_ppt_product_and_mixtures(rng):
    for M, N in [(2, 2), (2, 3)]:
        for _ in range(200):
            assert ppt_test(random_product_mixture(M, N, rng), M, N).passes
        v = np.kron(random_pure(M, rng), random_pure(N, rng))
        assert ppt_test(np.outer(v, v.conj()), M, N).passes


def test_ppt_rejects_non_state():
    with pytest.raises(ValidationError):
        ppt_test(np.diag([1.5, -0.5, 0, 0]), 2, 2)


def test_objective_basis_consistency():
    # c . y equals Tr(C_c rho) for C_c = sum c_i s_i, which is what the see-saw maximises.
    b = GeneratorBasis(4)
    c = np.arange(15) / 10.0
    v = np.kron([1, 0], [0.6, 0.8]).astype(complex)
    rho = np.outer(v, v.conj())
    y = b.coefficients(rho).real
    assert c @ y == pytest.approx(np.trace(b.operator(c) @ rho).real)
