import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import paleoxval as px
from paleoxval import io as pio
from paleoxval.errors import (ConfigError, NonAnnualYears, NonFiniteValue,
                              ParseError, YearMismatch)


class TestLoadTarget:
    def test_minimal(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("year,value\n1850,-0.3\n1851,-0.2\n")
        ts = pio.load_target(f)
        assert ts.n == 2
        assert list(ts.years) == [1850, 1851]
        np.testing.assert_allclose(ts.values, [-0.3, -0.2])

    def test_missing_year_rejected(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("year,value\n1850,-0.3\n1852,-0.2\n")
        with pytest.raises(NonAnnualYears):
            pio.load_target(f)

    def test_nan_value_rejected(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("year,value\n1850,-0.3\n1851,NaN\n")
        with pytest.raises(NonFiniteValue):
            pio.load_target(f)

    @pytest.mark.parametrize("body", [
        "wrong,header\n1850,-0.3\n1851,0.1\n",
        "year,value\n1850\n",
        "year,value\nabc,-0.3\n",
        "year,value\n1850,zzz\n",
        "year,value\n1850,-0.3\n",      # single data row
    ])
    def test_parse_errors(self, tmp_path, body):
        f = tmp_path / "t.csv"
        f.write_text(body)
        with pytest.raises(ParseError):
            pio.load_target(f)

    def test_round_trip_is_exact(self, tmp_path):
        ts = px.smooth_target(40, seed=2)
        back = pio.load_target(pio.save_target(ts, tmp_path / "t.csv"))
        assert np.array_equal(back.values, ts.values)
        assert np.array_equal(back.years, ts.years)


class TestLoadProxies:
    def test_small_matrix(self, tmp_path, y60):
        X = px.generate(px.NoiseSpec(kind="white", n=60, p=3, seed=5))
        path = pio.save_proxies(X, y60.years, tmp_path / "p.csv")
        back = pio.load_proxies(path, expected_years=y60.years)
        assert back.column_ids == X.column_ids
        assert np.array_equal(back.data, X.data)

    def test_year_mismatch(self, tmp_path, y60):
        X = px.generate(px.NoiseSpec(kind="white", n=59, p=2, seed=5))
        path = pio.save_proxies(X, y60.years[:59], tmp_path / "p.csv")
        with pytest.raises(YearMismatch):
            pio.load_proxies(path, expected_years=y60.years)

    def test_non_finite_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("year,a\n1850,1.0\n1851,inf\n")
        with pytest.raises(NonFiniteValue):
            pio.load_proxies(f)

    def test_header_must_start_with_year(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("time,a\n1850,1.0\n1851,2.0\n")
        with pytest.raises(ParseError):
            pio.load_proxies(f)

    def test_full_size_round_trip(self, tmp_path):
        # the documented real-data shape: 149 years x 1138 proxies
        X = px.generate(px.NoiseSpec(kind="ar1", n=149, p=1138, seed=9, phi=0.9))
        years = 1850 + np.arange(149)
        back = pio.load_proxies(pio.save_proxies(X, years, tmp_path / "big.csv"),
                                expected_years=years)
        assert np.array_equal(back.data, X.data)

    @given(st.integers(0, 2**32))
    def test_value_round_trip_random(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.standard_normal(5) * 10.0 ** rng.integers(-8, 8)
        texts = [format(v, ".17g") for v in vals]
        assert [float(t) for t in texts] == list(vals)


class TestReports:
    def _report(self, starts, label="demo"):
        starts = np.asarray(starts)
        rng = np.random.default_rng(0)
        vals = rng.uniform(0.1, 0.5, len(starts))
        return px.ExperimentReport(label=label, block_starts=starts, block_rmse=vals,
                                   per_block_lambda=rng.uniform(0.1, 10, len(starts)),
                                   mean_rmse=float(vals.mean()))

    def test_single_block_csv_has_two_lines(self, tmp_path):
        paths = pio.write_report(self._report([4]), tmp_path)
        text = paths[0].read_text()
        assert len(text.strip().splitlines()) == 2
        assert text.splitlines()[0] == "block_start,block_rmse,lambda"

    def test_round_trip_and_year_column(self, tmp_path, y60):
        rep = self._report(np.arange(10))
        paths = pio.write_report(rep, tmp_path, years=y60.years)
        cols = pio.read_report(paths[0])
        assert np.array_equal(cols["block_rmse"], rep.block_rmse)
        assert np.array_equal(cols["lambda"], rep.per_block_lambda)
        assert cols["block_year"][0] == y60.years[0]

    def test_ensemble_csv_layout(self, tmp_path, y60, splits60):
        ens = px.run_ensemble(px.NoiseSpec(kind="white", n=60, p=4, seed=3),
                              y60, splits60[:4], 2)
        paths = pio.write_report(ens, tmp_path)
        cols = pio.read_report(paths[0])
        assert set(cols) == {"block_start", "member_000", "member_001", "mean", "scatter"}
        assert len(cols["mean"]) == 4
        np.testing.assert_allclose(cols["mean"],
                                   (cols["member_000"] + cols["member_001"]) / 2,
                                   rtol=1e-15)


class TestConfig:
    def test_defaults_match_reference_design(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({"target": "t.csv",
                                 "proxy_source": {"noise": {"kind": "white"}}}))
        config = pio.load_config(f)
        assert config.n_v == 30
        assert config.ensemble_size == 100
        assert config.psi_mc_columns == 100_000
        assert config.phi_list == (0.99,)
        assert config.mode == "strict"

    def test_relative_paths_resolve_against_config(self, tmp_path):
        sub = tmp_path / "sub"
        sub.mkdir()
        f = sub / "c.json"
        f.write_text(json.dumps({"target": "t.csv",
                                 "proxy_source": {"file": "p.csv"},
                                 "output_dir": "results"}))
        config = pio.load_config(f)
        assert config.target_path == str(sub / "t.csv")
        assert config.proxy_source.path == str(sub / "p.csv")
        assert config.output_dir == str(sub / "results")

    @pytest.mark.parametrize("body", [
        {"proxy_source": {"noise": {"kind": "white"}}},                    # no target
        {"target": "t.csv"},                                               # no source
        {"target": "t.csv", "proxy_source": {"noise": {"kind": "zzz"}}},
        {"target": "t.csv", "proxy_source": {"noise": {"kind": "white"}}, "mode": "loose"},
        {"target": "t.csv", "proxy_source": {"noise": {"kind": "white"}}, "phi_list": [1.5]},
        {"target": "t.csv", "proxy_source": {"noise": {"kind": "white"}}, "bogus": 1},
        {"target": "t.csv", "proxy_source": {"file": "a", "noise": {"kind": "white"}}},
    ])
    def test_invalid_configs(self, tmp_path, body):
        f = tmp_path / "c.json"
        f.write_text(json.dumps(body))
        with pytest.raises(ConfigError):
            pio.load_config(f)

    def test_manifest_round_trip(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({
            "target": str(tmp_path / "t.csv"),
            "proxy_source": {"noise": {"kind": "ar1", "phi": 0.9, "p": 17}},
            "noise_experiments": [{"kind": "brownian"}],
            "seed": 99, "n_v": 12, "output_dir": str(tmp_path / "out"),
        }))
        config = pio.load_config(f)
        manifest = pio.write_manifest(tmp_path / "out", "crossval", config,
                                      [tmp_path / "out" / "summary.csv"])
        assert pio.load_config(manifest) == config
        blob = json.loads(manifest.read_text())
        assert blob["version"] == px.__version__
        assert blob["config"]["seed"] == 99
        assert blob["outputs"] == ["summary.csv"]
