import csv
import json
import math
from pathlib import Path

import pytest
import yaml

import oracles
from shiftpress.cli import main
from shiftpress.config import (
    build_potential,
    build_subshift,
    config_from_dict,
    load_config,
    save_config,
)
from shiftpress.errors import InputError
from shiftpress.reports import sha256_file

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def write_yaml(tmp_path, doc, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def golden_doc(**overrides):
    doc = {
        "label": "golden test instance",
        "subshift": {"family": "golden_mean"},
        "potential": {"kind": "zero"},
        "horizons": {"n_max": 10, "n_state": 2},
    }
    doc.update(overrides)
    return doc


def read_csv_payload(path):
    """(comment lines, header, data rows) of a report CSV."""
    comments = []
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line.strip())
            else:
                rows.append(line)
    parsed = list(csv.reader(rows))
    return comments, parsed[0], parsed[1:]


# ---------------------------------------------------------------------------
# configuration layer
# ---------------------------------------------------------------------------


def test_shipped_configs_load():
    paths = sorted(CONFIG_DIR.glob("*.yaml"))
    assert len(paths) >= 6
    for p in paths:
        cfg = load_config(p)
        assert len(cfg.digest) == 64
        build_potential(cfg.potential, build_subshift(cfg.subshift))


def test_digest_ignores_key_order_but_not_values():
    a = config_from_dict({"label": "x", "subshift": {"family": "golden_mean"}, "seed": 1})
    b = config_from_dict({"seed": 1, "subshift": {"family": "golden_mean"}, "label": "x"})
    c = config_from_dict({"label": "x", "subshift": {"family": "golden_mean"}, "seed": 2})
    assert a.digest == b.digest
    assert a.digest != c.digest


def test_config_rejects_unknown_keys_and_families():
    with pytest.raises(InputError):
        config_from_dict({"subshift": {"family": "golden_mean"}, "junk": 1})
    with pytest.raises(InputError):
        config_from_dict({"subshift": {"family": "weird"}})
    with pytest.raises(InputError):
        config_from_dict({"subshift": {"family": "golden_mean"}, "potential": {"kind": "odd"}})
    with pytest.raises(InputError):
        config_from_dict({})


def test_save_load_round_trip(tmp_path):
    cfg = config_from_dict(golden_doc())
    save_config(cfg, tmp_path / "roundtrip.yaml")
    again = load_config(tmp_path / "roundtrip.yaml")
    assert again.digest == cfg.digest
    assert again.horizons == cfg.horizons


def test_load_rejects_missing_and_invalid_files(tmp_path):
    with pytest.raises(InputError):
        load_config(tmp_path / "nope.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("label: [unclosed\n")
    with pytest.raises(InputError):
        load_config(bad)
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(InputError):
        load_config(empty)


def test_build_subshift_families():
    golden = build_subshift({"family": "sft", "forbidden": ["11"], "declared_gap": 1})
    assert golden.family == "sft"
    full = build_subshift({"family": "full_shift", "alphabet_size": 3})
    assert full.alphabet_size == 3
    bd_frac = build_subshift(
        {"family": "bounded_density", "k": 1,
         "height": {"form": "ceil_frac", "num": 1, "den": 2, "n_max": 8}}
    )
    bd_table = build_subshift(
        {"family": "bounded_density", "k": 1,
         "height": {"form": "table", "values": [math.ceil(n / 2) for n in range(1, 9)]}}
    )
    assert bd_frac.params["density"].h == bd_table.params["density"].h
    sparse = build_subshift(
        {"family": "sparse_sturmian", "slope": [8, 21], "k_max": 2, "n_seq": [4, 12]}
    )
    assert sparse.alphabet_size == 2
    prod = build_subshift(
        {"family": "product",
         "factors": [{"family": "golden_mean"}, {"family": "full_shift", "alphabet_size": 2}]}
    )
    assert prod.alphabet_size == 4
    with pytest.raises(InputError):
        build_subshift({"family": "sparse_sturmian", "slope": 0.4, "n_seq": [4, 12]})
    with pytest.raises(InputError):
        build_subshift({"family": "bounded_density", "k": 1,
                        "height": {"form": "exotic", "n_max": 4}})


def test_build_potential_kinds():
    spec = build_subshift({"family": "golden_mean"})
    assert build_potential({}, spec).is_constant_zero
    lc = build_potential(
        {"kind": "locally_constant", "radius": 1, "values": {"010": 1.5}}, spec
    )
    assert lc.eval((0, 1, 0), 1).lo == 1.5
    rr = build_potential(
        {"kind": "reciprocal_run", "height": {"form": "affine", "a": 1, "b": 1}}, spec
    )
    assert rr.eval((0, 1), 0).lo == 1.0
    rr_pow = build_potential(
        {"kind": "reciprocal_run", "height": {"form": "power", "p": 2}}, spec
    )
    assert not rr_pow.sum_diverges
    rl = build_potential({"kind": "run_levels", "levels": [2.0, 1.0], "limit": 0.5}, spec)
    assert rl.eval((0, 1), 0).lo == 2.0


# ---------------------------------------------------------------------------
# command line, in process
# ---------------------------------------------------------------------------


def test_enumerate_writes_counts_words_and_manifest(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc(horizons={"n_max": 6}))
    out = tmp_path / "out"
    assert main(["enumerate", "--config", str(cfg_path), "--out", str(out)]) == 0
    comments, header, rows = read_csv_payload(out / "counts.csv")
    assert header == ["n", "count"]
    assert [int(r[1]) for r in rows] == [oracles.fib(n + 2) for n in range(1, 7)]
    words = (out / "language_n6.txt").read_text().splitlines()
    assert len(words) == 21
    assert words == sorted(words)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "enumerate"
    assert manifest["config_digest"] == load_config(cfg_path).digest
    assert any(c.startswith("# config_digest=") for c in comments)
    assert set(manifest["outputs"]) == {"counts.csv", "language_n6.txt"}
    for name, digest in manifest["outputs"].items():
        assert sha256_file(out / name) == digest


def test_pressure_outputs_and_determinism(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["pressure", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["pressure", "--config", str(cfg_path), "--out", str(out2)]) == 0
    for name in ("partition.csv", "bracket.csv", "transfer.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    m1.pop("wall_clock_s"), m2.pop("wall_clock_s")
    assert m1 == m2
    transfer = json.loads((out1 / "transfer.json").read_text())
    assert transfer["ln_lambda"] == pytest.approx(
        math.log((1 + math.sqrt(5)) / 2), abs=1e-10
    )
    comments, _, _ = read_csv_payload(out1 / "bracket.csv")
    assert any(c.startswith("# best_hi=") for c in comments)
    assert any(c == "# upper_bound_only=false" for c in comments)


def test_invalid_family_exits_2_and_writes_nothing(tmp_path):
    cfg_path = write_yaml(tmp_path, {"subshift": {"family": "weird"}})
    out = tmp_path / "out"
    assert main(["pressure", "--config", str(cfg_path), "--out", str(out)]) == 2
    assert not out.exists()


def test_budget_exhaustion_exits_3(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc(horizons={"n_max": 12}))
    out = tmp_path / "out"
    code = main(["enumerate", "--config", str(cfg_path), "--out", str(out), "--budget", "2"])
    assert code == 3


def test_crossed_bracket_exits_4(tmp_path):
    doc = golden_doc(
        subshift={"family": "sft", "forbidden": ["11"], "declared_gap": 0},
        horizons={"n_max": 12},
    )
    cfg_path = write_yaml(tmp_path, doc)
    assert main(["pressure", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 4


def test_verify_fail_exits_5(tmp_path):
    doc = golden_doc(checks={"partition_upper_spec": {"pressure": 0.2}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    code = main(["verify", "partition_upper_spec", "--config", str(cfg_path), "--out", str(out)])
    assert code == 5
    report = json.loads((out / "report_partition_upper_spec.json").read_text())
    assert report["verdict"] == "fail"


def test_precondition_fail_exits_6(tmp_path):
    doc = golden_doc(checks={"partition_upper_trans": {"C": 0.55, "onset": 5}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    code = main(["verify", "partition_upper_trans", "--config", str(cfg_path), "--out", str(out)])
    assert code == 6
    report = json.loads((out / "report_partition_upper_trans.json").read_text())
    assert report["verdict"] == "precondition_fail"
    assert report["witnesses"]["n"] == 5


def test_gap_profile_horizon_exhaustion_exits_3(tmp_path):
    doc = golden_doc(horizons={"n_max": 4, "m_max": 0},
                     checks={"gap_profile": {"n_range": [2, 3]}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["gap-profile", "--config", str(cfg_path), "--out", str(out)]) == 3
    comments, header, rows = read_csv_payload(out / "gap_profile.csv")
    assert header[0] == "n"
    assert any(r[6] == "horizon_exhausted" for r in rows)


def test_gap_profile_success(tmp_path):
    doc = golden_doc(mode="specification",
                     horizons={"n_max": 5, "m_max": 4},
                     checks={"gap_profile": {"n_range": [2, 3, 4]}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["gap-profile", "--config", str(cfg_path), "--out", str(out)]) == 0
    _, _, rows = read_csv_payload(out / "gap_profile.csv")
    assert all(r[1] == "1" for r in rows)  # f_declared
    assert all(r[2] == "1" for r in rows)  # f_empirical


def test_verify_density_glue_via_cli(tmp_path):
    doc = {
        "label": "half density",
        "subshift": {"family": "bounded_density", "k": 1,
                     "height": {"form": "ceil_frac", "num": 1, "den": 2, "n_max": 40}},
        "horizons": {"n_max": 8},
        "checks": {"density_glue": {"n_range": [2, 3, 4, 5], "slack": 3}},
    }
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["verify", "density_glue", "--config", str(cfg_path), "--out", str(out)]) == 0
    report = json.loads((out / "report_density_glue.json").read_text())
    assert report["verdict"] == "pass"
    assert [n for n, _ in report["margins"]] == [2, 3, 4, 5]


def test_verify_sparse_glue_via_cli(tmp_path):
    doc = {
        "subshift": {"family": "sparse_sturmian", "slope": [8, 21],
                     "k_max": 2, "n_seq": [4, 12]},
        "strategy": "factor_glue",
        "mode": "transitivity",
        "checks": {"sparse_glue": {"n_range": [2, 3, 4]}},
    }
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["verify", "sparse_glue", "--config", str(cfg_path), "--out", str(out)]) == 0


def test_verify_measure_lower_via_cli(tmp_path):
    doc = golden_doc(checks={"measure_lower": {"cylinder": "0", "n_range": [2, 4, 6]}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["verify", "measure_lower", "--config", str(cfg_path), "--out", str(out)]) == 0


def test_verify_anchor_via_cli(tmp_path):
    doc = golden_doc(
        horizons={"n_max": 20},
        checks={"partition_upper_anchor": {"epsilon": 0.5, "epsilons": [0.5, 0.4]}},
    )
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["verify", "partition_upper_anchor", "--config", str(cfg_path), "--out", str(out)]) == 0
    report = json.loads((out / "report_partition_upper_anchor.json").read_text())
    assert report["extra"]["onset_index"] == 1
    assert [n for n, _ in report["margins"]] == [8, 13]


def test_equilibrium_via_cli(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc())
    out = tmp_path / "out"
    assert main(["equilibrium", "--config", str(cfg_path), "--out", str(out)]) == 0
    payload = json.loads((out / "equilibrium.json").read_text())
    assert sum(payload["stationary"].values()) == pytest.approx(1.0, abs=1e-10)
    assert payload["symbol_cylinders"]["0"] == pytest.approx(
        (5 + math.sqrt(5)) / 10, abs=1e-9
    )


def test_anchors_via_cli(tmp_path):
    doc = golden_doc(horizons={"n_max": 24},
                     checks={"anchors": {"epsilons": [0.5, 0.4, 0.35]}})
    cfg_path = write_yaml(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["anchors", "--config", str(cfg_path), "--out", str(out)]) == 0
    _, header, rows = read_csv_payload(out / "anchors.csv")
    assert [int(r[2]) for r in rows] == [8, 13, 18]


def test_anchors_incomplete_exits_3(tmp_path):
    doc = golden_doc(horizons={"n_max": 24}, checks={"anchors": {"epsilons": [0.2]}})
    cfg_path = write_yaml(tmp_path, doc)
    assert main(["anchors", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 3


def test_thread_validation_and_recording(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc(horizons={"n_max": 4}))
    out = tmp_path / "out"
    assert main(["enumerate", "--config", str(cfg_path), "--out", str(out), "--threads", "0"]) == 2
    assert main(["enumerate", "--config", str(cfg_path), "--out", str(out), "--threads", "3"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"]["threads"] == 3


def test_unknown_verify_tag_is_a_usage_error(tmp_path):
    cfg_path = write_yaml(tmp_path, golden_doc())
    with pytest.raises(SystemExit) as ei:
        main(["verify", "no_such_check", "--config", str(cfg_path)])
    assert ei.value.code == 2
