import numpy as np
import pytest

from sephard import channels as ch
from sephard.errors import ValidationError
from sephard.linalg import max_entangled, partial_trace, random_product_mixture, random_state
from sephard.oracles import ppt_test


def bell():
    phi = max_entangled(2)
    return np.outer(phi, phi.conj())


def test_identity_channel_choi():
    J = ch.jamiolkowski(ch.identity_channel, 2, 2)
    np.testing.assert_allclose(J.J, bell(), atol=1e-12)
    assert J.is_cp and J.is_tp and J.trace == pytest.approx(1)


def test_depolarizing_choi():
    for M, N in [(2, 2), (3, 2), (2, 4)]:
        J = ch.jamiolkowski(ch.depolarizing_channel(M), M, N)
        np.testing.assert_allclose(J.J, np.eye(M * N) / (M * N), atol=1e-12)


def test_transpose_map_not_cp():
    J = ch.jamiolkowski(ch.transpose_map, 2, 2)
    assert J.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)
    assert not J.is_cp and J.is_tp
    with pytest.raises(ValidationError):
        ch.kraus_from_choi(J)


def test_output_list_matches_callable():
    outs = [ch.identity_channel(ch.matrix_unit(2, k, l)) for k in range(2) for l in range(2)]
    np.testing.assert_array_equal(ch.jamiolkowski(outs, 2, 2).J, ch.jamiolkowski(ch.identity_channel, 2, 2).J)


def test_jamiolkowski_rejects_bad_descriptions():
    with pytest.raises(ValidationError):
        ch.jamiolkowski([np.eye(2)] * 3, 2, 2)
    with pytest.raises(ValidationError):
        ch.jamiolkowski(lambda X: np.eye(3), 2, 2)
    with pytest.raises(ValidationError, match="linear"):
        ch.jamiolkowski(lambda X: X @ X, 2, 2)


def test_random_channels_cp_tp(rng):
    for _ in range(200):
        M, N = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        ks = ch.random_kraus(M, N, rng)
        J = ch.jamiolkowski(ks, M, N)
        assert J.is_cp and J.is_tp
        np.testing.assert_allclose(partial_trace(J.J, (M, N), keep=[1]), np.eye(N) / N, atol=1e-10)
    sub = ch.jamiolkowski(ch.random_kraus(2, 3, rng, trace_preserving=False), 2, 3)
    assert sub.is_cp and not sub.is_tp


def test_kraus_examples():
    ks = ch.kraus_from_choi(ch.jamiolkowski(ch.identity_channel, 2, 2))
    assert len(ks) == 1
    np.testing.assert_allclose(ks.operators[0], np.eye(2), atol=1e-12)
    ks = ch.kraus_from_choi(ch.jamiolkowski(ch.depolarizing_channel(2), 2, 2))
    assert len(ks) == 4
    np.testing.assert_allclose(ks.completeness(), np.eye(2), atol=1e-9)
    for E in (ch.matrix_unit(2, k, l) for k in range(2) for l in range(2)):
        np.testing.assert_allclose(ks(E), np.trace(E) * np.eye(2) / 2, atol=1e-10)


def test_kraus_roundtrip(rng):
    for _ in range(50):
        M, N = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        ks = ch.random_kraus(M, N, rng, count=int(rng.integers(-(-N // M), M * N + 1)))
        choi = ch.jamiolkowski(ks, M, N)
        back = ch.kraus_from_choi(choi)
        assert len(back) <= M * N
        assert back.is_trace_preserving()
        for k in range(N):
            for l in range(N):
                E = ch.matrix_unit(N, k, l)
                np.testing.assert_allclose(back(E), ks(E), atol=1e-10)
                np.testing.assert_allclose(choi.apply(E), ks(E), atol=1e-10)


def test_marker_map():
    for M, N in [(2, 2), (3, 4)]:
        out = ch.marker_map_phi(np.eye(M * N) / (M * N), M, N)
        np.testing.assert_allclose(ch.reduced_b(out, M, N), np.eye(N) / N, atol=1e-15)
        assert np.trace(out).real == pytest.approx(1)
    assert ch.marker_mixing(2) == 0.5
    with pytest.raises(ValidationError):
        ch.marker_map_phi(np.eye(4), 2, 2)


def test_marker_map_reduced_state(rng):
    for N in range(2, 6):
        rho = random_state(2 * N, rng)
        p = ch.marker_mixing(N)
        expected = (1 - p) * partial_trace(rho, (2, N), keep=[1]) + p * np.eye(N) / N
        np.testing.assert_allclose(ch.reduced_b(ch.marker_map_phi(rho, 2, N), 2, N), expected, atol=1e-14)


def test_condition_number():
    assert ch.condition_number(np.eye(3) / 3) == pytest.approx(1)
    assert ch.condition_number(np.diag([0.75, 0.25])) == pytest.approx(3)
    assert ch.condition_number(np.diag([1.0, 0.0])) == np.inf
    assert ch.kappa_bound(2) == 3 and ch.kappa_bound(5) == pytest.approx(9 / 4)


def test_kappa_bound_on_random_states(rng):
    for _ in range(300):
        N = int(rng.integers(2, 6))
        rho = random_state(2 * N, rng, rank=1)
        kappa = ch.condition_number(ch.reduced_b(ch.marker_map_phi(rho, 2, N), 2, N))
        assert kappa <= ch.kappa_bound(N) * (1 + 1e-12) <= 3 * (1 + 1e-12)


def test_filter_fixed_point(rng):
    sigma = ch.marker_map_phi(np.eye(4) / 4, 2, 2)
    np.testing.assert_allclose(ch.filter_map_upsilon(sigma, 2, 2), sigma, atol=1e-12)


def test_filter_refuses_singular():
    sigma = np.zeros((8, 8))
    sigma[0, 0] = 1
    with pytest.raises(ch.IllConditioned):
        ch.filter_map_upsilon(sigma, 2, 2)


def test_ebp_bell_stays_npt():
    out = ch.ebp_reduce(bell(), 2, 2)
    assert ch.output_is_tp_slice(out, 2, 2)
    assert not ppt_test(out, 4, 2).passes


def test_ebp_separable_stays_ppt(rng):
    for _ in range(50):
        out = ch.ebp_reduce(random_product_mixture(2, 2, rng), 2, 2)
        assert ppt_test(out, 4, 2).passes
    assert ppt_test(ch.ebp_reduce(np.eye(4) / 4, 2, 2), 4, 2).passes


def test_ebp_output_is_a_channel(rng):
    # Output lies on the trace-preserving slice, so it is the Jamiolkowski operator of a channel.
    out = ch.ebp_reduce(random_state(6, rng), 2, 3)
    choi = ch.ChoiOperator(4, 3, out)
    assert choi.is_cp and choi.is_tp


def test_fano_examples():
    v = ch.fano_encode(np.eye(4) / 4, 2, 2)
    assert not v.rA.any() and not v.T.any()
    assert len(v.as_vector()) == 12
    with pytest.raises(ValidationError):
        ch.fano_encode(np.diag([1.0, 0, 0, 0]), 2, 2)


def test_fano_roundtrip(rng):
    for _ in range(100):
        M, N = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        J = ch.jamiolkowski(ch.random_kraus(M, N, rng), M, N).J
        v = ch.fano_encode(J, M, N)
        assert len(v.as_vector()) == (M * M - 1) * N * N
        assert np.max(np.abs(ch.fano_decode(v) - J)) <= 1e-12
        w = ch.FanoVector.from_vector(v.as_vector(), M, N)
        np.testing.assert_array_equal(w.T, v.T)


def test_fano_decode_on_slice(rng):
    v = ch.FanoVector(2, 3, rng.normal(size=3), rng.normal(size=(3, 8)))
    rho = ch.fano_decode(v)
    np.testing.assert_allclose(np.trace(rho), 1, atol=1e-14)
    np.testing.assert_allclose(partial_trace(rho, (2, 3), keep=[1]), np.eye(3) / 3, atol=1e-14)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
