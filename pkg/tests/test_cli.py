import json
import subprocess
import sys

import numpy as np
import pytest

from causalcones import causal_group as cg
from causalcones import serialization as ser
from causalcones.cli import main


def run_cli(*args):
    """In-process invocation; returns (exit code, stdout text)."""
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(args))
    return code, buf.getvalue()


@pytest.fixture
def lightcone_file(tmp_path):
    path = tmp_path / "lightcone2d.json"
    code, _ = run_cli("cone", "make", "--dim", "2", "--generators", "1,1;1,-1",
                      "--out", str(path))
    assert code == 0
    return str(path)


@pytest.fixture
def events_file(tmp_path):
    path = tmp_path / "e.json"
    code, _ = run_cli("events", "sprinkle", "--q", "1", "--n", "200", "--seed", "42",
                      "--box", "-1,-1,1,1", "--out", str(path))
    assert code == 0
    return str(path)


class TestConeCommands:
    def test_classify_lightcone(self, lightcone_file):
        code, out = run_cli("cone", "classify", "--in", lightcone_file)
        assert code == 0
        report = json.loads(out)
        assert report["self_dual"] is True
        assert report["regular"] is True

    def test_member(self, lightcone_file):
        code, out = run_cli("cone", "member", "--in", lightcone_file, "--x", "2,0")
        assert code == 0 and json.loads(out)["member"] is True
        code, out = run_cli("cone", "member", "--in", lightcone_file, "--x", "0,1")
        assert code == 0 and json.loads(out)["member"] is False

    def test_dual_roundtrip(self, lightcone_file, tmp_path):
        dual_path = tmp_path / "dual.json"
        code, _ = run_cli("cone", "dual", "--in", lightcone_file, "--out", str(dual_path))
        assert code == 0
        cone = ser.cone_from_obj(ser.load_json(str(dual_path)))
        assert cone.dim == 2 and len(cone.generators) == 2

    def test_bad_dim_is_input_error(self):
        code, _ = run_cli("cone", "make", "--dim", "3", "--generators", "1,1")
        assert code == 1


class TestLorentzCommands:
    def test_classify(self):
        code, out = run_cli("lorentz", "classify", "--q", "3", "--v", "1,0,0,0")
        assert code == 0 and json.loads(out)["region"] == "interior"

    def test_boost_and_check_map(self, tmp_path):
        path = tmp_path / "boost.json"
        assert run_cli("lorentz", "boost", "--q", "3", "--t", "0.5", "--out", str(path))[0] == 0
        code, out = run_cli("lorentz", "check-map", "--in", str(path))
        assert code == 0
        got = json.loads(out)
        assert got == {"pseudo_orthogonal": True, "orthochronous": True}

    def test_decompose(self):
        code, out = run_cli("lorentz", "decompose", "--q", "3", "--v", "5,3,0,0")
        assert code == 0
        got = json.loads(out)
        assert got["lambda"] == pytest.approx(4.0)
        assert got["reconstruction_residual"] < 1e-10

    def test_decompose_domain_error(self):
        code, _ = run_cli("lorentz", "decompose", "--q", "3", "--v", "0,1,0,0")
        assert code == 1


class TestGroupCommands:
    def test_random_element_zeeman_roundtrip(self, tmp_path):
        path = tmp_path / "w.json"
        assert run_cli("group", "random-element", "--q", "3", "--length", "6",
                       "--seed", "5", "--out", str(path))[0] == 0
        code, out = run_cli("group", "zeeman", "--in", str(path))
        assert code == 0
        got = json.loads(out)
        assert got["orthochronous"] is True and got["lambda"] > 0

    def test_is_causal(self, tmp_path):
        path = tmp_path / "w.json"
        run_cli("group", "random-element", "--q", "2", "--length", "4",
                "--seed", "8", "--out", str(path))
        code, out = run_cli("group", "is-causal", "--in", str(path), "--seed", "3")
        assert code == 0 and json.loads(out)["causal"] is True

    def test_stretch_rejected_exit_2(self, tmp_path, capfd):
        path = tmp_path / "stretch.json"
        f = cg.AffineMap(np.diag([1.0, 2.0, 1.0, 1.0]), np.zeros(4))
        path.write_text(ser.canonical_json(ser.affine_map_to_obj(f)))
        code, _ = run_cli("group", "zeeman", "--in", str(path))
        assert code == 2
        err = json.loads(capfd.readouterr().err.strip())
        assert err["kind"] == "numeric"
        assert "not a causal linear part" in err["error"]

    def test_seed_required(self):
        code, _ = run_cli("group", "random-element", "--q", "2", "--length", "3")
        assert code == 1


class TestEventsCommands:
    def test_hierarchy_all_true(self, events_file):
        code, out = run_cli("events", "hierarchy", "--in", events_file)
        assert code == 0
        got = json.loads(out)
        for key in ("chronology_ok", "causality_ok", "k_causal_ok",
                    "strongly_causal_proxy", "globally_hyperbolic_proxy"):
            assert got[key] is True
        assert got["proxy_notes"]

    def test_cylinder_hierarchy_fails_chronology(self, tmp_path):
        path = tmp_path / "cyl.json"
        run_cli("events", "sprinkle", "--q", "1", "--n", "50", "--seed", "7",
                "--box", "0,-1,1,1", "--periodic-time", "1.0", "--out", str(path))
        code, out = run_cli("events", "hierarchy", "--in", str(path))
        assert code == 0
        got = json.loads(out)
        assert got["chronology_ok"] is False
        assert got["witnesses"]["chronology"]

    def test_relations_csv_and_json(self, events_file, tmp_path):
        code, out = run_cli("events", "relations", "--in", events_file,
                            "--kind", "k-closed", "--format", "csv")
        assert code == 0
        rel = ser.relation_from_csv(out)
        code, out = run_cli("events", "relations", "--in", events_file,
                            "--kind", "k-closed")
        assert code == 0
        rel2 = ser.relation_from_obj(json.loads(out))
        assert rel == rel2

    def test_interval(self, events_file):
        code, out = run_cli("events", "interval", "--in", events_file,
                            "--a", "0", "--b", "0", "--variant", "closed")
        assert code == 0 and json.loads(out)["indices"] == [0]

    def test_cone_preserving(self, events_file, tmp_path):
        map_path = tmp_path / "m.json"
        run_cli("group", "random-element", "--q", "1", "--length", "3",
                "--seed", "2", "--out", str(map_path))
        code, out = run_cli("events", "cone-preserving", "--in", events_file,
                            "--map", str(map_path))
        assert code == 0 and json.loads(out)["preserving"] is True


class TestPosetCommands:
    @pytest.fixture
    def poset_file(self, tmp_path, events_file):
        rel_path = tmp_path / "rel.json"
        code, out = run_cli("events", "relations", "--in", events_file, "--kind", "k-closed")
        small = ser.relation_from_obj(json.loads(out))
        sub = ser.relation_to_obj(type(small)(small.bits[:8, :8]))
        rel_path.write_text(ser.canonical_json({"size": 8, "order": sub}))
        path = tmp_path / "poset.json"
        code, _ = run_cli("poset", "make", "--in", str(rel_path), "--out", str(path))
        assert code == 0
        return str(path)

    def test_waybelow_equals_order(self, poset_file):
        code, out = run_cli("poset", "waybelow", "--in", poset_file)
        assert code == 0
        got = json.loads(out)
        wb = ser.relation_from_obj(got["way_below"])
        order = ser.poset_from_obj(ser.load_json(poset_file)).order
        assert wb == order

    def test_scott_lawson_interval(self, poset_file):
        for cmd in (["poset", "scott"], ["poset", "lawson", "--f-max", "1"],
                    ["poset", "interval-basis"]):
            code, out = run_cli(*cmd, "--in", poset_file)
            assert code == 0
            assert "sets" in json.loads(out)

    def test_bicontinuous(self, poset_file):
        code, out = run_cli("poset", "bicontinuous", "--in", poset_file)
        assert code == 0
        got = json.loads(out)
        assert got["bicontinuous"] is True and got["continuous"] is True

    def test_bridge(self, events_file):
        code, out = run_cli("poset", "bridge", "--in", events_file)
        assert code == 0
        got = json.loads(out)
        assert got["interval_matches_alexandrov"] is True
        assert got["chronological_within_k"] is True
        assert got["lawson_sets_covered"] is True

    def test_cyclic_relation_rejected(self, tmp_path):
        bad = np.array([[1, 1], [1, 1]], dtype=bool)
        from causalcones.events import Relation

        path = tmp_path / "bad.json"
        path.write_text(ser.canonical_json({"size": 2, "order": ser.relation_to_obj(Relation(bad))}))
        code, _ = run_cli("poset", "make", "--in", str(path))
        assert code == 1


class TestConfigAndErrors:
    def test_unknown_flag_is_input_error(self):
        code, _ = run_cli("cone", "classify", "--nope")
        assert code == 1

    def test_unknown_config_key_rejected(self, tmp_path, lightcone_file):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"tolerancez": {}}')
        code, _ = run_cli("--config", str(cfg), "cone", "classify", "--in", lightcone_file)
        assert code == 1

    def test_config_tolerance_applies(self, tmp_path, lightcone_file):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"tolerances": {"feasibility": 2.0}}')
        code, out = run_cli("--config", str(cfg), "cone", "member",
                            "--in", lightcone_file, "--x", "0,1")
        assert code == 0
        assert json.loads(out)["member"] is True  # residual 0.707 < 2.0

    def test_capacity_exit_code(self, tmp_path):
        rel_path = tmp_path / "big.json"
        from causalcones.events import Relation

        bits = np.eye(20, dtype=bool)
        rel_path.write_text(ser.canonical_json(
            {"size": 20, "order": ser.relation_to_obj(Relation(bits))}))
        poset_path = tmp_path / "poset.json"
        run_cli("poset", "make", "--in", str(rel_path), "--out", str(poset_path))
        code, _ = run_cli("poset", "waybelow", "--in", str(poset_path))
        assert code == 2


class TestDeterminism:
    def test_subprocess_byte_identical(self, tmp_path):
        """Two fresh processes must produce byte-identical artifacts."""
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            proc = subprocess.run(
                [sys.executable, "-m", "causalcones.cli", "events", "sprinkle",
                 "--q", "1", "--n", "120", "--seed", "42", "--box", "-1,-1,1,1",
                 "--out", str(path)],
                capture_output=True, check=True)
            assert proc.returncode == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_roundtrip_identity(self, events_file, tmp_path):
        obj = ser.load_json(events_file)
        e = ser.eventset_from_obj(obj)
        second = tmp_path / "again.json"
        second.write_text(ser.canonical_json(ser.eventset_to_obj(e)) + "\n")
        assert second.read_bytes() == open(events_file, "rb").read()

    def test_random_element_reproducible(self):
        a = run_cli("group", "random-element", "--q", "2", "--length", "5", "--seed", "1")
        b = run_cli("group", "random-element", "--q", "2", "--length", "5", "--seed", "1")
        assert a == b
