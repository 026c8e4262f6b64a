import csv
from pathlib import Path

import pytest

from banditplots.cli import main
from banditplots.render import PlotError, PlotSpec, plot_pulls, plot_regret

ALGORITHMS = ["ts-c", "ucb", "ucb-c"]
ARMS = 3


def write_summary(path: Path, algorithms=ALGORITHMS, scenario="fix"):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario_id", "algorithm", "t", "mean_regret", "std_regret", "n_runs"])
        for alg in algorithms:
            for i, t in enumerate((100, 200, 300)):
                w.writerow([scenario, alg, t, 10.0 * (i + 1), 2.0, 5])
    return path


def write_pulls(path: Path, algorithms=ALGORITHMS, arms=ARMS, scenario="fix"):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario_id", "algorithm", "arm", "mean_pulls_at_T"])
        for alg in algorithms:
            for arm in range(1, arms + 1):
                w.writerow([scenario, alg, arm, 100.0 * arm])
    return path


class TestRegret:
    def test_one_series_per_algorithm(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        spec = PlotSpec(input_path=src, output_path=tmp_path / "regret.png")
        fig, out = plot_regret(spec)
        assert out.exists() and out.stat().st_size > 0
        assert len(fig.axes[0].lines) == len(ALGORITHMS)
        labels = [line.get_label() for line in fig.axes[0].lines]
        assert labels == sorted(ALGORITHMS)

    def test_axis_labels(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        fig, _ = plot_regret(PlotSpec(input_path=src, output_path=tmp_path / "r.png"))
        ax = fig.axes[0]
        assert ax.get_xlabel() == "t"
        assert ax.get_ylabel() == "cumulative regret"

    def test_filter_selects_subset(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        spec = PlotSpec(input_path=src, output_path=tmp_path / "r.png",
                        algorithms=("ucb",))
        fig, _ = plot_regret(spec)
        assert len(fig.axes[0].lines) == 1

    def test_empty_filter_match_is_an_error(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        spec = PlotSpec(input_path=src, output_path=tmp_path / "r.png",
                        algorithms=("nope",))
        with pytest.raises(PlotError, match="no rows match"):
            plot_regret(spec)

    def test_unknown_columns_rejected(self, tmp_path):
        bad = tmp_path / "summary.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(PlotError, match="lacks columns"):
            plot_regret(PlotSpec(input_path=bad, output_path=tmp_path / "r.png"))

    def test_rerun_produces_same_shape(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        figs = []
        for name in ("a.png", "b.png"):
            fig, _ = plot_regret(PlotSpec(input_path=src, output_path=tmp_path / name))
            figs.append((len(fig.axes[0].lines), fig.get_size_inches().tolist()))
        assert figs[0] == figs[1]


class TestPulls:
    def test_bar_count_is_arms_times_algorithms(self, tmp_path):
        src = write_pulls(tmp_path / "pulls.csv")
        fig, out = plot_pulls(PlotSpec(input_path=src, output_path=tmp_path / "p.png"))
        assert out.exists()
        assert len(fig.axes[0].patches) == ARMS * len(ALGORITHMS)

    def test_single_algorithm_gives_k_bars(self, tmp_path):
        src = write_pulls(tmp_path / "pulls.csv", algorithms=["ucb"])
        fig, _ = plot_pulls(PlotSpec(input_path=src, output_path=tmp_path / "p.png"))
        assert len(fig.axes[0].patches) == ARMS

    def test_missing_file_is_an_error(self, tmp_path):
        with pytest.raises(PlotError, match="missing input file"):
            plot_pulls(PlotSpec(input_path=tmp_path / "none.csv",
                                output_path=tmp_path / "p.png"))


class TestCli:
    def test_regret_happy_path(self, tmp_path, capsys):
        src = write_summary(tmp_path / "summary.csv")
        out = tmp_path / "regret.png"
        assert main(["regret", "--in", str(src), "--out", str(out)]) == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_pulls_happy_path_svg(self, tmp_path):
        src = write_pulls(tmp_path / "pulls.csv")
        out = tmp_path / "pulls.svg"
        assert main(["pulls", "--in", str(src), "--out", str(out)]) == 0
        assert out.exists() and out.read_bytes().startswith(b"<?xml")

    def test_missing_input_exits_2(self, tmp_path):
        assert main(["regret", "--in", str(tmp_path / "no.csv"),
                     "--out", str(tmp_path / "r.png")]) == 2

    def test_empty_filter_exits_2(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        assert main(["regret", "--in", str(src), "--out", str(tmp_path / "r.png"),
                     "--filter", "zzz"]) == 2

    def test_logx_flag(self, tmp_path):
        src = write_summary(tmp_path / "summary.csv")
        assert main(["regret", "--in", str(src), "--out", str(tmp_path / "r.png"),
                     "--logx"]) == 0
