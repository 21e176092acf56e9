import pytest

import dca


def test_weight_presets():
    assert dca.weight_preset_names() == ["WS1", "WS2", "WS3", "WS4", "WS5"]
    assert dca.weight_preset("table1") == dca.weight_preset("WS3")
    with pytest.raises(dca.ConfigError):
        dca.weight_preset("WS7")


def test_fuse_signals():
    assert dca.fuse_signals(100, 0, 0) == (400, 0, 800)
    assert dca.fuse_signals(0, 0, 10, weights="WS3") == (30, 10, -60)


def test_normalization():
    cfg = dca.NormalizationConfig()
    assert dca.compute_pamp(cfg.n_p / 2, cfg) == pytest.approx(50)
    assert dca.compute_danger(cfg.n_d / 4) == pytest.approx(75)
    assert dca.compute_safe(12.5) == pytest.approx(5)


def test_trace_round_trip():
    records = dca.generate("E2.3.b", seed=7, duration=300)
    assert records
    text = dca.format_trace(records)
    again = dca.parse_trace_text(text)
    assert [r.seq for r in again] == [r.seq for r in records]
    assert {r.process_name for r in records} >= {"bot", "IRC"}
    with pytest.raises(dca.ValidationError):
        dca.parse_trace_text("0,1,a,keyboard_state,Sleep,,0\n")


def test_signals_in_range():
    samples = dca.extract_signals(dca.generate("E2.1.a", seed=2, duration=120))
    assert len(samples) > 100
    assert all(0 <= s.pamp <= 100 and 0 <= s.ds <= 100 and 0 <= s.ss <= 10 for s in samples)


def test_coefficients():
    mcav = dca.compute_mcav({"a": (5, 10), "b": (15, 30)})
    assert mcav == {"a": 0.5, "b": 0.5}
    mac = dca.compute_mac({"a": 0.5, "b": 0.5}, {"a": 50, "b": 150})
    assert mac["a"] == pytest.approx(0.125)
    assert mac["b"] == pytest.approx(0.375)
    assert dca.classify({"bot": 0.82, "irc": 0.5}, 0.5) == {"bot": "anomalous", "irc": "normal"}


def test_rank_tests():
    u, p = dca.mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert u == 0 and p == pytest.approx(0.1)
    w, p = dca.wilcoxon_signed_rank([1, 2, 3, 4, 5])
    assert w == 15 and p == pytest.approx(0.0625)


def test_run_scenario():
    out = dca.run(scenario="E2.2.a", config={"reps": 3, "scenario.duration": 120})
    agg = out["aggregate"]
    assert agg["runs"] == 3
    assert [r["seed"] for r in out["runs"]] == [1, 2, 3]
    names = {p["process"] for p in agg["processes"]}
    assert "bot" in names


def test_run_records_and_sweep():
    records = dca.generate("E1", seed=4, duration=120)
    out = dca.run(records=records, config={"reps": 2, "weights": "WS1"})
    assert out["aggregate"]["weights"] == "WS1"
    s = dca.sweep(["E2.1.a"], config={"reps": 2, "scenario.duration": 120})
    assert s["presets"] == ["WS1", "WS2", "WS3", "WS4", "WS5"]
    assert len(s["wilcoxon"]) == 20
