"""End-to-end CLI behavior via subprocess: commands, files, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "lvqkit", *args],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture(scope="module")
def small_csv(tmp_path_factory):
    rng = np.random.default_rng(0)
    path = tmp_path_factory.mktemp("data") / "toy.csv"
    with open(path, "w") as f:
        for cls, center in ((1, (0.0, 0.0)), (2, (4.0, 0.0)), (3, (2.0, 3.0))):
            for _ in range(20):
                x = rng.normal(center, 0.5)
                f.write(f"{x[0]:.6f},{x[1]:.6f},c{cls}\n")
    return str(path)


class TestGen:
    def test_writes_3600_rows(self, tmp_path):
        out = tmp_path / "mm.csv"
        r = run_cli("gen", "--dataset", "multimodal", "--seed", "7", "--out", str(out))
        assert r.returncode == 0
        assert sum(1 for _ in open(out)) == 3600

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run_cli("gen", "--dataset", "multimodal", "--seed", "7", "--out", str(a)).returncode == 0
        assert run_cli("gen", "--dataset", "multimodal", "--seed", "7", "--out", str(b)).returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_path_exit_2(self, tmp_path):
        r = run_cli("gen", "--dataset", "multimodal", "--seed", "1",
                    "--out", str(tmp_path / "no" / "dir" / "x.csv"))
        assert r.returncode == 2


class TestTrain:
    def test_trains_and_serializes(self, small_csv, tmp_path):
        out = tmp_path / "model.json"
        trace = tmp_path / "trace.csv"
        r = run_cli("train", "--model", "glvq", "--data", small_csv, "--np", "2",
                    "--eps0", "0.05", "--tau", "0.001", "--epochs", "5", "--seed", "1",
                    "--out", str(out), "--trace", str(trace))
        assert r.returncode == 0, r.stderr
        blob = json.loads(out.read_text())
        assert blob["variant"] == "glvq"
        assert len(blob["prototypes"]) == 6
        lines = trace.read_text().strip().splitlines()
        assert lines[0] == "epoch,cost" and len(lines) == 6

    def test_zero_epochs_serializes_init(self, small_csv, tmp_path):
        out = tmp_path / "m0.json"
        r = run_cli("train", "--model", "glvq", "--data", small_csv,
                    "--epochs", "0", "--seed", "1", "--out", str(out))
        assert r.returncode == 0
        assert json.loads(out.read_text())["variant"] == "glvq"

    def test_relational_model_on_vectorial_input_exit_3(self, small_csv, tmp_path):
        r = run_cli("train", "--model", "rglvq", "--data", small_csv,
                    "--epochs", "2", "--out", str(tmp_path / "m.json"))
        assert r.returncode == 3
        assert "dissimilarity" in r.stderr

    def test_missing_file_exit_2(self, tmp_path):
        r = run_cli("train", "--model", "glvq", "--data", str(tmp_path / "none.csv"),
                    "--epochs", "1", "--out", str(tmp_path / "m.json"))
        assert r.returncode == 2


class TestBenchmark:
    def test_two_classifier_report(self, small_csv, tmp_path):
        out = tmp_path / "rep"
        r = run_cli("benchmark", "--dataset", small_csv, "--classifiers", "glvq,rslvq",
                    "--folds", "4", "--epochs", "4", "--seed", "3", "--out", str(out))
        assert r.returncode == 0, r.stderr
        md = (tmp_path / "rep.md").read_text()
        csv_text = (tmp_path / "rep.csv").read_text()
        assert md.count("| glvq |") == 3  # summary row, matrix header, matrix row
        assert len(csv_text.strip().splitlines()) == 3  # header + 2 rows
        assert "pairwise threshold 0.05" in md

    def test_seed_reproducibility(self, small_csv, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            r = run_cli("benchmark", "--dataset", small_csv, "--classifiers", "glvq",
                        "--folds", "3", "--epochs", "3", "--seed", "5", "--out", str(out))
            assert r.returncode == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.md").read_bytes() == (tmp_path / "b.md").read_bytes()

    def test_check_multimodal(self):
        r = run_cli("benchmark", "--dataset", "multimodal", "--seed", "1", "--check")
        assert r.returncode == 0
        assert "3600 samples" in r.stdout

    def test_check_wrong_shape_exit_2(self, small_csv, tmp_path):
        # a 60-sample csv is not the 2100-sample segmentation file
        r = run_cli("benchmark", "--dataset", "image_segmentation", "--data", small_csv, "--check")
        assert r.returncode == 2

    def test_usps_format_runs_end_to_end(self, tmp_path):
        rng = np.random.default_rng(1)
        pool = tmp_path / "zip.train"
        with open(pool, "w") as f:
            for d in range(10):
                for _ in range(12):
                    vals = rng.uniform(-1, 1, 256) + d * 0.05
                    f.write(f"{d}.0000 " + " ".join(f"{v:.4f}" for v in vals) + "\n")
        r = run_cli("benchmark", "--dataset", "usps", "--data", str(pool),
                    "--classifiers", "glvq", "--folds", "3", "--epochs", "2",
                    "--seed", "1", "--out", str(tmp_path / "usps_rep"))
        assert r.returncode == 0, r.stderr
        assert (tmp_path / "usps_rep.md").exists()

    def test_unknown_classifier_exit_3(self, small_csv, tmp_path):
        r = run_cli("benchmark", "--dataset", small_csv, "--classifiers", "nope",
                    "--folds", "3", "--epochs", "2", "--out", str(tmp_path / "r"))
        assert r.returncode == 3


class TestPlot:
    def test_svg_output(self, small_csv, tmp_path):
        model = tmp_path / "m.json"
        run_cli("train", "--model", "glvq", "--data", small_csv, "--np", "2",
                "--epochs", "4", "--seed", "1", "--out", str(model))
        out = tmp_path / "plot.svg"
        r = run_cli("plot", "--model", str(model), "--data", small_csv,
                    "--resolution", "50", "--out", str(out))
        assert r.returncode == 0, r.stderr
        svg = out.read_text()
        assert svg.count("<rect") == 2500
        assert svg.count("<circle") == 6

    def test_non_2d_model_exit_3(self, tmp_path):
        rng = np.random.default_rng(2)
        csv3 = tmp_path / "d3.csv"
        with open(csv3, "w") as f:
            for i in range(20):
                cls = 1 + i % 2
                v = rng.normal(cls * 2, 0.3, 3)
                f.write(f"{v[0]},{v[1]},{v[2]},{cls}\n")
        model = tmp_path / "m3.json"
        run_cli("train", "--model", "glvq", "--data", str(csv3), "--epochs", "2",
                "--seed", "1", "--out", str(model))
        r = run_cli("plot", "--model", str(model), "--out", str(tmp_path / "p.svg"))
        assert r.returncode == 3


class TestSeedEnvFallback:
    def test_lvqkit_seed_env(self, tmp_path):
        import os

        env = dict(os.environ, LVQKIT_SEED="7")
        a = subprocess.run([sys.executable, "-m", "lvqkit", "gen", "--dataset", "multimodal",
                            "--out", str(tmp_path / "env.csv")], env=env, capture_output=True)
        assert a.returncode == 0
        b = tmp_path / "explicit.csv"
        run_cli("gen", "--dataset", "multimodal", "--seed", "7", "--out", str(b))
        assert (tmp_path / "env.csv").read_bytes() == b.read_bytes()


class TestSuiteDefaults:
    """Benchmark defaults per dataset (the settings behind `--suite table3`)."""

    def _entry(self, dataset, tag, class_count=7):
        from lvqkit.cli import BenchmarkSuite, build_suite_entries

        suite = BenchmarkSuite(dataset, (tag,), 10, 0)
        return build_suite_entries(suite, class_count)[0]

    def test_eleven_classifiers(self):
        from lvqkit.cli import TABLE3_CLASSIFIERS

        assert len(TABLE3_CLASSIFIERS) == 11

    def test_common_prototype_schedule(self):
        e = self._entry("multimodal", "glvq", 3)
        assert e.schedule.eps0 == 0.05 and e.schedule.t0 == 0
        assert e.schedule.tau == 0.0001 and e.schedule.t_max == 2000
        assert self._entry("image_segmentation", "glvq").schedule.tau == 0.001
        assert self._entry("usps", "glvq", 10).schedule.tau == 0.001

    def test_prototypes_per_class(self):
        assert self._entry("multimodal", "glvq", 3).init.prototypes_per_class == 15
        assert self._entry("image_segmentation", "glvq").init.prototypes_per_class == 1
        assert self._entry("usps", "glvq", 10).init.prototypes_per_class == 3

    def test_init_kinds(self):
        assert self._entry("multimodal", "glvq", 3).init.kind == "data_mean_random"
        assert self._entry("image_segmentation", "glvq").init.kind == "class_means"
        assert self._entry("usps", "glvq", 10).init.kind == "class_means"

    def test_lvq21_window(self):
        cfg = self._entry("multimodal", "lvq21", 3).config
        s = (1 - cfg.omega_window) / (1 + cfg.omega_window)
        assert s == pytest.approx(0.01, rel=1e-12)

    def test_rslvq_softness(self):
        assert self._entry("multimodal", "rslvq", 3).config.sigma == 1.9858
        assert self._entry("image_segmentation", "rslvq").config.sigma == 0.01
        assert self._entry("usps", "rslvq", 10).config.sigma == 0.01

    def test_krslvq_softness(self):
        assert self._entry("multimodal", "krslvq", 3).config.sigma == 1.0
        assert self._entry("image_segmentation", "krslvq").config.sigma == 0.01
        assert self._entry("usps", "krslvq", 10).config.sigma == 0.5

    def test_sgng_growth_targets(self):
        assert self._entry("multimodal", "sgng", 3).config.n_p_max == 45
        assert self._entry("image_segmentation", "sgng").config.n_p_max == 10
        assert self._entry("usps", "sgng", 10).config.n_p_max == 30

    def test_metric_rate_schedules(self):
        g = self._entry("multimodal", "grlvq", 3).config.metric_schedule
        assert (g.eps0, g.t0) == (5e-6, 500)
        g = self._entry("image_segmentation", "grlvq").config.metric_schedule
        assert (g.eps0, g.t0) == (5e-6, 100)
        m = self._entry("multimodal", "gmlvq", 3).config
        assert (m.metric_schedule.eps0, m.metric_schedule.t0) == (5e-5, 500)
        assert (m.metric_schedule_off.eps0, m.metric_schedule_off.t0) == (1e-6, 500)
        lg = self._entry("usps", "lgrlvq", 10).config.metric_schedule
        assert (lg.eps0, lg.t0) == (5e-5, 100)
        lm = self._entry("multimodal", "lgmlvq", 3).config
        assert (lm.metric_schedule.eps0, lm.metric_schedule.t0) == (1e-3, 100)
        assert (lm.metric_schedule_off.eps0, lm.metric_schedule_off.t0) == (5e-5, 100)


def test_full_table3_suite_runs_end_to_end(small_csv, tmp_path):
    out = tmp_path / "full"
    r = run_cli("benchmark", "--suite", "table3", "--dataset", small_csv,
                "--folds", "3", "--epochs", "3", "--seed", "2", "--out", str(out))
    assert r.returncode == 0, r.stderr
    csv_lines = (tmp_path / "full.csv").read_text().strip().splitlines()
    assert len(csv_lines) == 12  # header + 11 classifiers


def test_usps_star_suite_runs_end_to_end(tmp_path):
    """The usps_star pathway (load, subset to 200/class, suite) at toy scale."""
    rng = np.random.default_rng(4)
    pool = tmp_path / "zip.train"
    with open(pool, "w") as f:
        for d in range(10):
            center = rng.normal(0, 0.4, 256)
            for _ in range(210):
                vals = np.clip(center + rng.normal(0, 0.35, 256), -1, 1)
                f.write(f"{d}.0000 " + " ".join(f"{v:.4f}" for v in vals) + "\n")
    r = run_cli("benchmark", "--dataset", "usps_star", "--data", str(pool),
                "--classifiers", "rslvq,krslvq", "--folds", "3", "--epochs", "2",
                "--seed", "1", "--out", str(tmp_path / "star"))
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "star.csv").read_text().strip().splitlines()
    assert len(lines) == 3
    r = run_cli("benchmark", "--dataset", "usps_star", "--data", str(pool), "--check")
    assert r.returncode == 0 and "2000 samples" in r.stdout


def test_plot_multimodal_has_45_markers(tmp_path):
    mm = tmp_path / "mm.csv"
    run_cli("gen", "--dataset", "multimodal", "--seed", "3", "--out", str(mm))
    model = tmp_path / "mm_glvq.json"
    r = run_cli("train", "--model", "glvq", "--data", str(mm), "--np", "15",
                "--eps0", "0.05", "--epochs", "2", "--seed", "1", "--out", str(model))
    assert r.returncode == 0, r.stderr
    out = tmp_path / "mm.svg"
    r = run_cli("plot", "--model", str(model), "--data", str(mm),
                "--resolution", "40", "--out", str(out))
    assert r.returncode == 0, r.stderr
    assert out.read_text().count("<circle") == 45


def test_train_command_deterministic(small_csv, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        r = run_cli("train", "--model", "rslvq", "--data", small_csv, "--np", "2",
                    "--sigma", "0.8", "--epochs", "6", "--seed", "9", "--out", str(out))
        assert r.returncode == 0, r.stderr
    assert a.read_bytes() == b.read_bytes()


def test_train_relational_happy_path(tmp_path):
    rng = np.random.default_rng(5)
    feats = np.vstack([rng.normal(0, 1, (12, 2)), rng.normal(5, 1, (12, 2))])
    d2 = ((feats[:, None, :] - feats[None, :, :]) ** 2).sum(2)
    matrix = tmp_path / "dis.csv"
    labels = tmp_path / "lab.csv"
    with open(matrix, "w") as f:
        for row in d2:
            f.write(",".join(f"{v:.10g}" for v in row) + "\n")
    labels.write_text("\n".join(["a"] * 12 + ["b"] * 12) + "\n")
    model = tmp_path / "rel.json"
    r = run_cli("train", "--model", "rglvq", "--data", f"{matrix},{labels}",
                "--epochs", "5", "--seed", "2", "--out", str(model))
    assert r.returncode == 0, r.stderr
    blob = json.loads(model.read_text())
    assert blob["variant"] == "rglvq" and blob["metric_kind"] == "relational"
    assert len(blob["coeffs"]) == 2 and len(blob["coeffs"][0]) == 24
