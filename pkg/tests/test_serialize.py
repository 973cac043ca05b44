import json

import numpy as np
import pytest

from sephard import serialize as ser
from sephard.bloch import BlochVector
from sephard.channels import jamiolkowski, random_kraus
from sephard.graphs import CliqueInstance, Graph
from sephard.reduction import reduce_clique


def roundtrip(doc):
    return ser.decode(json.loads(json.dumps(doc)))


def test_reduction_documents_roundtrip(tmp_path):
    rsdf, w, p = reduce_clique(CliqueInstance(Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]), 3))
    kind, r2 = roundtrip(ser.encode_rsdf(rsdf))
    assert kind == "rsdf" and r2.zeta == rsdf.zeta and r2.eta == rsdf.eta
    assert all(np.array_equal(a, b) for a, b in zip(r2.B, rsdf.B))
    _, w2 = roundtrip(ser.encode_wopt(w))
    np.testing.assert_array_equal(w2.c_hat, w.c_hat)
    assert (w2.gamma, w2.epsilon, w2.c_hat_norm_sq) == (w.gamma, w.epsilon, w.c_hat_norm_sq)
    _, p2 = roundtrip(ser.encode_wmem_params(p))
    assert p2 == p
    path = ser.dump(ser.encode_wopt(w), tmp_path / "wopt.json")
    assert ser.load(path, expect="wopt")[1].gamma == w.gamma


def test_reals_roundtrip_exactly(rng):
    for x in rng.normal(size=100) * 10.0 ** rng.integers(-300, 300, size=100):
        assert ser.parse_real(ser.real(x)) == x


def test_state_bloch_channel_documents(rng):
    rho = np.eye(4) / 4
    _, out = roundtrip(ser.encode_state(rho, 2, 2))
    np.testing.assert_array_equal(out["rho"], rho)
    _, out = roundtrip(ser.encode_bloch(BlochVector(4, np.arange(15.0)), 2, 2))
    np.testing.assert_array_equal(out["vector"].coords, np.arange(15.0))
    ks = random_kraus(2, 2, rng)
    _, ks2 = roundtrip(ser.encode_kraus(ks))
    np.testing.assert_array_equal(ks2.operators[0], ks.operators[0])
    choi = jamiolkowski(ks, 2, 2)
    _, c2 = roundtrip(ser.encode_choi(choi))
    np.testing.assert_array_equal(c2.J, choi.J)


def test_schema_errors(tmp_path):
    with pytest.raises(ser.ValidationError):
        ser.decode({"type": "rsdf"})
    with pytest.raises(ser.ValidationError):
        ser.decode({"schema_version": 1, "type": "nope"})
    with pytest.raises(ser.ValidationError):
        ser.decode({"schema_version": 1, "type": "bloch", "dim": 2, "coords": ["0", "0"]})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ser.InstanceFileError) as info:
        ser.load(bad)
    assert str(bad) in str(info.value)
    with pytest.raises(ser.InstanceFileError):
        ser.load(tmp_path / "missing.json")
    good = ser.dump(ser.encode_state(np.eye(4) / 4, 2, 2), tmp_path / "s.json")
    with pytest.raises(ser.InstanceFileError, match="expected"):
        ser.load(good, expect="wopt")
