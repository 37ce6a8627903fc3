import json
import math
import os
from pathlib import Path

import pytest

import bohmsim

SOURCE_DIR = Path(os.environ.get("BOHMSIM_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def entangled_pair(separation=3.0, momentum=1.0):
    return bohmsim.DiracWaveFunction(
        [1.0, 1.0],
        [
            (1.0, [(-separation, momentum, 1.0), (separation, -momentum, 1.0)]),
            (-1.0, [(-separation, -momentum, 1.0), (separation, momentum, 1.0)]),
        ],
    )


def test_free_packet_spreads_like_the_closed_form():
    wf = bohmsim.NrWaveFunction([1.0], [(1.0, [(0.0, 0.0, 1.0)])])
    times, xs, valid = bohmsim.nr_integrate(wf, [1.0], 0.0, 2.0, 1e-3)
    assert valid
    assert times[-1] == pytest.approx(2.0)
    assert xs[-1][0] == pytest.approx(math.sqrt(2.0), abs=1e-8)


def test_normalization_is_leaf_independent():
    wf = entangled_pair()
    for fol in (bohmsim.flat_foliation(0.0), bohmsim.flat_foliation(0.6), bohmsim.tanh_foliation(0.3)):
        assert bohmsim.normalization(wf, fol, 0.0, (-30.0, 30.0)) == pytest.approx(1.0, abs=2e-3)


def test_superluminal_foliation_raises():
    with pytest.raises(ValueError):
        bohmsim.flat_foliation(1.2)
    with pytest.raises(bohmsim.ValidationError):
        bohmsim.tanh_foliation(0.95, width=1.0)


def test_trajectory_and_covariance():
    wf = entangled_pair()
    fol = bohmsim.tanh_foliation(0.3)
    lines = bohmsim.integrate_hbd(wf, fol, [-3.0, 3.0], 0.0, 1.0, 1e-3)
    assert lines.valid
    assert len(lines.params) == 1001
    assert len(lines.crossings[-1]) == 2
    g = bohmsim.PoincareTransform.translate(0.5, -0.25).after(bohmsim.PoincareTransform.frame_boost(0.3))
    assert bohmsim.covariance_distance(wf, fol, [-3.0, 3.0], 0.0, 1.0, g, 1e-3) < 1e-4


def test_sampling_is_reproducible():
    wf = entangled_pair()
    fol = bohmsim.flat_foliation(0.3)
    a = bohmsim.sample_on_leaf(wf, fol, 0.0, 50, seed=7, threads=1)
    b = bohmsim.sample_on_leaf(wf, fol, 0.0, 50, seed=7, threads=2)
    assert [[(p.t, p.x) for p in c] for c in a] == [[(p.t, p.x) for p in c] for c in b]


def test_events_and_lower_probability():
    whole = bohmsim.Event.always()
    never = ~whole
    family = bohmsim.default_family((-2.0, 2.0))
    assert len(family) == 8
    wf = bohmsim.DiracWaveFunction([1.0], [(1.0, [(0.0, 0.0, 1.0)])])
    est = bohmsim.p_star(whole | never, family, wf, 100, seed=3)
    assert est["value"] == 1.0
    assert set(est["per_foliation"]) == set(family.labels)
    assert est["lower_bound"] == pytest.approx(bohmsim.wilson_interval(100, 100)[1])
    typical, text = bohmsim.is_typical(est["lower_bound"], 0.02)
    assert not typical and "licenses no prediction" in text
    typical, text = bohmsim.is_typical(0.99, 0.02)
    assert typical and "Cournot" in text


def test_default_config_matches_schema_and_validates(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    config = json.loads((SOURCE_DIR / "configs" / "default.json").read_text())
    schema = json.loads((SOURCE_DIR / "schema" / "config.schema.json").read_text())
    jsonschema.validate(config, schema)
    bad = dict(config, foliation={"kind": "flat", "velocity": 1.2})
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, schema)
    code, report = bohmsim.run("simulate-hbd", json.dumps(config), str(tmp_path / "out"))
    assert code == 0
    assert report.startswith("command = simulate-hbd\n")
    assert (tmp_path / "out" / "trajectory_hbd.csv").exists()
