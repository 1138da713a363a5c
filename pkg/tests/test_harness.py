import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from yiopt import harness
from yiopt.benchmarks import ManifestEntry, write_manifest
from yiopt.cli import main
from yiopt.harness import (ConfigError, SweepSpec, export_traces, load_config, load_results,
                           parse_config, run_experiment, run_seed, run_sweep)

TINY = [ManifestEntry("sph", "sphere", 3, 5, 100.0), ManifestEntry("ras", "rastrigin", 3, 5, 200.0)]


@pytest.fixture
def manifest(tmp_path):
    path = tmp_path / "tiny.txt"
    write_manifest(TINY, path)
    return path


def config(tmp_path, manifest, **kw):
    doc = {"suite": str(manifest), "algorithms": ["yi", "de"], "budget_multiplier": 100,
           "repetitions": 3, "output": str(tmp_path / "out")}
    doc.update(kw)
    return parse_config(doc, tmp_path)


def snapshot(out):
    return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


class TestConfig:
    def test_defaults(self, tmp_path):
        cfg = parse_config({"algorithms": ["yi"]}, tmp_path)
        assert cfg.repetitions == 51 and cfg.budget_multiplier == 10000
        assert cfg.reference == "yi" and len(cfg.suite) == 6
        assert cfg.output == tmp_path / "results"

    @pytest.mark.parametrize("doc", [
        {"algorithms": ["yi"], "repetitons": 3},
        {"algorithms": ["nope"]},
        {"algorithms": []},
        {"algorithms": [{"name": "yi", "params": {"sigmaa": 2}}]},
        {"algorithms": [{"name": "yi", "params": {"sigma": 0.5}}]},
        {"algorithms": [{"name": "dyypo", "params": {"variant": "static_random_I"}}]},
        {"algorithms": ["yi", "yi"]},
        {"algorithms": ["yi"], "reference": "de"},
        {"algorithms": ["yi"], "repetitions": 0},
        {"algorithms": ["yi"], "budget_multiplier": 0},
        {"algorithms": ["yi"], "significance": 1.5},
        {"algorithms": ["yi"], "suite": "missing.txt"},
        {"algorithms": ["yi"], "dims": [1]},
        {"algorithms": ["yi"], "dims": "10"},
        [1, 2],
    ])
    def test_strict_validation(self, tmp_path, doc):
        with pytest.raises(ConfigError):
            parse_config(doc, tmp_path)

    def test_labels_and_params(self, tmp_path):
        cfg = parse_config({"algorithms": ["yi", {"name": "yi", "label": "yi5",
                                                  "params": {"sigma": 5}}]}, tmp_path)
        assert cfg.labels() == ["yi", "yi5"]
        assert cfg.algorithm("yi5").build_params().sigma == 5

    def test_dims_expand(self, tmp_path, manifest):
        cfg = config(tmp_path, manifest, dims=[2, 4])
        assert [e.problem_id for e in cfg.suite] == ["sph_2d", "sph_4d", "ras_2d", "ras_4d"]

    def test_yaml_file(self, tmp_path, manifest):
        path = tmp_path / "exp.yaml"
        path.write_text(f"suite: {manifest.name}\nalgorithms: [yi]\noutput: res\n")
        cfg = load_config(path)
        assert cfg.output == tmp_path / "res" and len(cfg.suite) == 2

    def test_seed_hash_documented(self):
        from yiopt.core import fnv1a_64
        assert run_seed(0, "sph", "yi", 2) == fnv1a_64("0|sph|yi|2")
        assert run_seed(0, "sph", "yi", 2) != run_seed(0, "sph", "yi", 3)


class TestRunExperiment:
    def test_record_count_and_layout(self, tmp_path, manifest):
        res = run_experiment(config(tmp_path, manifest))
        out = tmp_path / "out"
        assert len(res.records) == 12
        assert len(list((out / "runs").rglob("*.record"))) == 12
        assert (out / "runs" / "sph" / "de" / "2.record").exists()
        assert (out / "tables" / "summary.tsv").exists()
        assert (out / "tables" / "summary.json").exists()
        assert len(json.loads((out / "runs" / "index.json").read_text())) == 12
        assert not (out / "failures.json").exists()
        for rec in res.records.values():
            assert rec.total_evals == rec.max_evals == 300

    def test_rerun_identical(self, tmp_path, manifest):
        run_experiment(config(tmp_path, manifest))
        first = snapshot(tmp_path / "out")
        import shutil
        shutil.rmtree(tmp_path / "out")
        run_experiment(config(tmp_path, manifest))
        assert snapshot(tmp_path / "out") == first

    def test_workers_do_not_change_outputs(self, tmp_path, manifest):
        run_experiment(config(tmp_path, manifest, output=str(tmp_path / "a"), workers=1))
        run_experiment(config(tmp_path, manifest, output=str(tmp_path / "b"), workers=2))
        assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")

    def test_crash_resume(self, tmp_path, manifest, monkeypatch):
        cfg = config(tmp_path, manifest)
        run_experiment(cfg)
        out = tmp_path / "out"
        before = snapshot(out)
        records = sorted((out / "runs").rglob("*.record"))
        removed = records[::2]
        for p in removed:
            p.unlink()
        calls = []
        real = harness._execute
        monkeypatch.setattr(harness, "_execute", lambda t: calls.append(t[4]) or real(t))
        run_experiment(cfg)
        assert sorted(calls) == sorted(str(p) for p in removed)
        assert snapshot(out) == before

    def test_corrupt_record_is_rerun(self, tmp_path, manifest):
        cfg = config(tmp_path, manifest)
        run_experiment(cfg)
        path = tmp_path / "out" / "runs" / "ras" / "yi" / "0.record"
        good = path.read_bytes()
        path.write_text("{not json")
        run_experiment(cfg)
        assert path.read_bytes() == good

    def test_partial_failure(self, tmp_path, manifest, monkeypatch):
        real = harness.ALGORITHMS["de"]

        def flaky(problem, space, params, *, t_max, seed, algorithm):
            if problem.name == "ras":
                raise RuntimeError("boom")
            return real[0](problem, space, params, t_max=t_max, seed=seed, algorithm=algorithm)

        monkeypatch.setitem(harness.ALGORITHMS, "de", (flaky,) + real[1:])
        res = run_experiment(config(tmp_path, manifest))
        out = tmp_path / "out"
        assert len(res.failures) == 3 and len(res.records) == 9
        failures = json.loads((out / "failures.json").read_text())
        assert all("boom" in f["error"] for f in failures)
        monkeypatch.setitem(harness.ALGORITHMS, "de", real)
        res = run_experiment(config(tmp_path, manifest))
        assert not res.failures and not (out / "failures.json").exists()

    def test_table_round_trip(self, tmp_path, manifest):
        res = run_experiment(config(tmp_path, manifest))
        text = (tmp_path / "out" / "tables" / "summary.tsv").read_text()
        assert load_results(tmp_path / "out").table().to_tsv() == text == res.table().to_tsv()

    def test_all_five_algorithms(self, tmp_path, manifest):
        res = run_experiment(config(tmp_path, manifest,
                                    algorithms=["yi", "yypo", "dyypo", "de", "pso"],
                                    repetitions=2))
        assert set(res.table().totals()) == {"yypo", "dyypo", "de", "pso"}
        assert {rec.algorithm for rec in res.records.values()} == {"yi", "yypo", "dyypo", "de", "pso"}


class TestSweep:
    def test_self_comparison_all_ties(self, tmp_path, manifest):
        rep = run_sweep(config(tmp_path, manifest), SweepSpec("sigma", (3.0,)))
        assert [(r["win"], r["tie"], r["loss"]) for r in rep.rows] == [(0, 2, 0)]

    def test_rows_follow_values(self, tmp_path, manifest):
        rep = run_sweep(config(tmp_path, manifest), SweepSpec("i_min", (2, 4, 6)))
        assert [r["value"] for r in rep.rows] == [2, 4, 6]
        assert [r["i_min"] for r in rep.rows] == [2, 4, 6]
        assert all(r["win"] + r["tie"] + r["loss"] == 2 for r in rep.rows)
        tsv = (tmp_path / "out" / "tables" / "sweep_i_min.tsv").read_text().splitlines()
        assert tsv[0].split("\t")[-3:] == ["win", "tie", "loss"] and len(tsv) == 4

    def test_bad_sweeps(self, tmp_path, manifest):
        with pytest.raises(ConfigError):
            SweepSpec("pop_size", (1,))
        with pytest.raises(ConfigError):
            SweepSpec("sigma", ())
        with pytest.raises(ConfigError):
            run_sweep(config(tmp_path, manifest), SweepSpec("i_min", (99,)))
        with pytest.raises(ConfigError):
            run_sweep(config(tmp_path, manifest, algorithms=["de"]), SweepSpec("sigma", (2.0,)))


class TestTraces:
    @pytest.mark.parametrize("mode", ["raw", "fraction-of-budget"])
    def test_properties(self, tmp_path, manifest, mode):
        res = run_experiment(config(tmp_path, manifest, repetitions=5))
        paths = export_traces(res, mode, n_points=51)
        assert len(paths) == 4
        for path in paths:
            rows = list(csv.DictReader(path.open()))
            x = [float(r[next(iter(r))]) for r in rows]
            med = np.array([float(r["median"]) for r in rows])
            lo = np.array([float(r["q25"]) for r in rows])
            hi = np.array([float(r["q75"]) for r in rows])
            assert x == sorted(x)
            assert np.all(np.diff(med) <= 0)
            assert np.all(lo <= med) and np.all(med <= hi)
            if mode == "fraction-of-budget":
                assert abs(x[-1] - 1.0) <= 1 / 300
            else:
                assert x[-1] == 300

    def test_empty(self, tmp_path, manifest):
        res = harness.ResultSet(config(tmp_path, manifest), {})
        with pytest.raises(ValueError):
            export_traces(res)


class TestCli:
    def write(self, tmp_path, manifest, **kw):
        doc = {"suite": str(manifest), "algorithms": ["yi", "dyypo"], "budget_multiplier": 100,
               "repetitions": 3, "output": "out"}
        doc.update(kw)
        import yaml
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump(doc))
        return path

    def test_run_table_traces(self, tmp_path, manifest, capsys):
        cfg = self.write(tmp_path, manifest)
        assert main(["run", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("problem\talgorithm") and "# w/t/l dyypo vs yi" in out
        assert main(["table", "--out", str(tmp_path / "out")]) == 0
        assert capsys.readouterr().out == out
        assert main(["traces", "--out", str(tmp_path / "out"), "--normalize"]) == 0
        assert len(capsys.readouterr().out.split()) == 4

    def test_smoke_caps(self, tmp_path, manifest):
        cfg = self.write(tmp_path, manifest, budget_multiplier=10000, repetitions=51)
        assert main(["run", "--config", str(cfg), "--smoke", "--out", str(tmp_path / "s")]) == 0
        res = load_results(tmp_path / "s")
        assert len(res.records) == 2 * 2 * 5
        assert all(r.max_evals == 200 * 3 for r in res.records.values())

    def test_sweep(self, tmp_path, manifest, capsys):
        cfg = self.write(tmp_path, manifest)
        assert main(["sweep", "--config", str(cfg), "--param", "sigma",
                     "--values", "1.5,3,5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 4 and [l.split("\t")[1] for l in lines[1:]] == ["1.5", "3", "5"]

    def test_config_error_exit_code(self, tmp_path, manifest, capsys):
        cfg = self.write(tmp_path, manifest, algorithms=["bogus"])
        assert main(["run", "--config", str(cfg)]) == 2
        assert "bogus" in capsys.readouterr().err
        assert main(["run", "--config", str(tmp_path / "none.yaml")]) == 2

    def test_listings(self, capsys):
        assert main(["list-problems"]) == 0
        assert "zakharov zakharov 10 2017 300.0 shift_rotate" in capsys.readouterr().out
        assert main(["list-algorithms"]) == 0
        names = [l.split()[0] for l in capsys.readouterr().out.splitlines()]
        assert names == ["yi", "yypo", "dyypo", "de", "pso"]

    def test_failure_exit_code(self, tmp_path, manifest, monkeypatch):
        def broken(*a, **k):
            raise RuntimeError("x")
        monkeypatch.setitem(harness.ALGORITHMS, "yi", (broken,) + harness.ALGORITHMS["yi"][1:])
        assert main(["run", "--config", str(self.write(tmp_path, manifest))]) == 1
