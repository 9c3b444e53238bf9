import json
import math

import pytest

teichlab = pytest.importorskip("teichlab")


def test_distance_and_lengths():
    i, two_i = teichlab.TorusPoint(0, 1), teichlab.TorusPoint(0, 2)
    assert teichlab.teich_distance(i, two_i) == pytest.approx(0.5 * math.log(2))
    assert teichlab.length(two_i, teichlab.Slope(0, 1)) == pytest.approx(math.sqrt(2))
    assert teichlab.Slope(2, -4) == teichlab.Slope(-1, 2)


def test_fricke():
    x = teichlab.FrickePoint(3, 3, 3)
    assert math.exp(teichlab.log_trace(x, teichlab.Slope(2, 3))) == pytest.approx(15)
    assert teichlab.hyp_length(x, teichlab.Slope(1, 2)) == pytest.approx(3.52549435)
    assert x.markov_residual() == 0.0


def test_mapping_classes():
    a = teichlab.MappingClass(2, 1, 1, 1)
    assert teichlab.classify(a) == "Anosov"
    assert teichlab.spectral_limit(teichlab.TorusPoint(0, 1), a, teichlab.Slope(0, 1)) == pytest.approx(
        (3 + math.sqrt(5)) / 2, abs=1e-3
    )
    with pytest.raises(teichlab.InvalidMappingClass):
        teichlab.MappingClass(1, 1, 1, 1)


def test_walk_is_deterministic():
    gens = [teichlab.MappingClass(1, 2, 0, 1), teichlab.MappingClass(1, 0, 2, 1)]
    a = teichlab.drift(gens, teichlab.TorusPoint(0, 1), n=100, trials=20, seed=3)
    b = teichlab.drift(gens, teichlab.TorusPoint(0, 1), n=100, trials=20, seed=3, threads=2)
    assert a == b
    assert a[0] > 5 * a[1]


def test_holo_and_cli():
    r = teichlab.classify_orbit("mobius(2,0,0,1)", teichlab.TorusPoint(0, 1))
    assert r["classification"] == "Escaping"
    assert r["lambda"] == pytest.approx(2.0)
    with pytest.raises(teichlab.ParseError):
        teichlab.classify_orbit("mobius(2,0,0", teichlab.TorusPoint(0, 1))
    code, out, _ = teichlab.run_cli(["dist", "--x", "0,1", "--y", "0,2"])
    assert code == 0
    assert json.loads(out)["payload"]["symmetric"] is True
