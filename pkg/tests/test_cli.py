import numpy as np
import pytest

from ddvert.cli import EXIT_EMPTY, EXIT_ERROR, EXIT_OK, main

DEMO_HREP = "d 2\nf 1 0 0\nf 0 1 0\nf 1 1 1\n"
SQUARE_HREP = "d 2\nf 1 0 0\nf 0 1 0\nf -1 0 -1\nf 0 -1 -1\n"
CONTRADICTION = "d 2\nf 1 0 2\nf -1 0 -1\nf 0 1 0\n"
DEMO_MOLP = "2 2 1\n1 0\n0 1\n-1 -1\n-1\n1 1\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestVertenum:
    def test_online_cone_demo(self, tmp_path, capsys):
        rc = main(["vertenum", write(tmp_path, "demo.hrep", DEMO_HREP),
                   "--mode", "online-cone"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert out == ["d 2", "v 1 0", "v 0 1", "z 1 0", "z 0 1"]

    def test_offline_square(self, tmp_path, capsys):
        rc = main(["vertenum", write(tmp_path, "square.hrep", SQUARE_HREP),
                   "--mode", "offline"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert len([l for l in out if l.startswith("v ")]) == 4
        assert not [l for l in out if l.startswith("z ")]

    def test_online_box_square(self, tmp_path, capsys):
        rc = main(["vertenum", write(tmp_path, "square.hrep", SQUARE_HREP),
                   "--mode", "online-box"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        vs = sorted(tuple(map(float, l.split()[1:])) for l in out if l.startswith("v "))
        assert vs == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        assert not [l for l in out if l.startswith("z ")]

    def test_contradiction_exits_2(self, tmp_path, capsys):
        rc = main(["vertenum", write(tmp_path, "c.hrep", CONTRADICTION),
                   "--mode", "online-cone"])
        assert rc == EXIT_EMPTY
        assert "empty" in capsys.readouterr().err

    def test_parse_error_exits_1(self, tmp_path, capsys):
        rc = main(["vertenum", write(tmp_path, "bad.hrep", "d 2\nf 1 0\n")])
        assert rc == EXIT_ERROR
        assert "line 2" in capsys.readouterr().err

    def test_explicit_cone_file(self, tmp_path, capsys):
        cone_text = "d 2\nz 1 0\nz 1 1\nf 0 1 0\nf 1 -1 0\nadj 0 0\nadj 1 1\n"
        hrep_text = "d 2\nf 0 1 0\nf 1 -1 0\nf 1 1 1\n"
        rc = main([
            "vertenum", write(tmp_path, "wedge.hrep", hrep_text),
            "--mode", "online-cone", "--cone", write(tmp_path, "wedge.cone", cone_text),
        ])
        assert rc == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        vs = sorted(tuple(map(float, l.split()[1:])) for l in out if l.startswith("v "))
        assert vs == [(0.5, 0.5), (1.0, 0.0)]
        zs = [tuple(map(float, l.split()[1:])) for l in out if l.startswith("z ")]
        assert zs == [(1.0, 0.0), (1.0, 1.0)]


class TestSolve:
    def test_demo_cone(self, tmp_path, capsys):
        rc = main([
            "solve", write(tmp_path, "demo.molp", DEMO_MOLP),
            "--backend", "cone", "--eps", "0.005",
            "--out-dir", str(tmp_path / "out"), "--no-plots",
        ])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "cuts: 1" in out
        assert "final vertices: 2" in out
        report = (tmp_path / "out" / "demo_report.csv").read_text()
        assert report.splitlines()[0] == (
            "instance,iteration,backend,ve_time_s,actual,artificial,alpha"
        )
        poly_text = (tmp_path / "out" / "demo_outer.poly").read_text()
        assert poly_text.startswith("d 2\n")

    def test_huge_eps_zero_cuts(self, tmp_path, capsys):
        rc = main([
            "solve", write(tmp_path, "demo.molp", DEMO_MOLP),
            "--eps", "10", "--out-dir", str(tmp_path / "out"), "--no-plots",
        ])
        assert rc == EXIT_OK
        assert "cuts: 0" in capsys.readouterr().out

    def test_infeasible_exits_1(self, tmp_path, capsys):
        bad = "2 2 2\n1 0\n0 1\n1 1\n-1 -1\n1 -3\n"
        rc = main([
            "solve", write(tmp_path, "bad.molp", bad),
            "--out-dir", str(tmp_path / "out"), "--no-plots",
        ])
        assert rc == EXIT_ERROR
        assert "infeasible" in capsys.readouterr().err

    def test_writes_figure_by_default(self, tmp_path, capsys):
        rc = main([
            "solve", write(tmp_path, "demo.molp", DEMO_MOLP),
            "--out-dir", str(tmp_path / "out"),
        ])
        assert rc == EXIT_OK
        assert (tmp_path / "out" / "demo_alpha.png").exists()


class TestGen:
    def test_writes_instances(self, tmp_path, capsys):
        rc = main(["gen", "--d", "2", "--n", "3", "--samples", "2",
                   "--seed", "0", "--out-dir", str(tmp_path / "g")])
        assert rc == EXIT_OK
        files = sorted((tmp_path / "g").glob("molp_d2_n3_s*.txt"))
        assert len(files) == 2
        from ddvert.benson import load_instance

        inst = load_instance(files[0].read_text())
        assert inst.A.shape == (6, 3)


class TestBench:
    def test_creates_reports_and_figures(self, tmp_path, capsys):
        rc = main([
            "bench", "--d", "2", "--n", "3", "--samples", "2", "--seed", "0",
            "--out-dir", str(tmp_path / "b"),
        ])
        assert rc == EXIT_OK
        base = tmp_path / "b"
        assert (base / "bench_d2_n3_records.csv").exists()
        assert (base / "bench_d2_n3_summary.csv").exists()
        assert (base / "bench_d2_n3_artificial.csv").exists()
        assert (base / "bench_d2_n3_times.png").exists()
        assert (base / "bench_d2_n3_artificial.png").exists()

    def test_no_timing_output_is_deterministic(self, tmp_path):
        args = [
            "bench", "--d", "2", "--n", "3", "--samples", "2", "--seed", "0",
            "--no-timing", "--no-plots",
        ]
        rc = main(args + ["--out-dir", str(tmp_path / "b1")])
        assert rc == EXIT_OK
        rc = main(args + ["--out-dir", str(tmp_path / "b2")])
        assert rc == EXIT_OK
        for name in (
            "bench_d2_n3_records.csv",
            "bench_d2_n3_summary.csv",
            "bench_d2_n3_artificial.csv",
        ):
            a = (tmp_path / "b1" / name).read_bytes()
            b = (tmp_path / "b2" / name).read_bytes()
            assert a == b, f"{name} not byte-stable"

    def test_unknown_backend_exits_1(self, tmp_path, capsys):
        rc = main(["bench", "--d", "2", "--n", "3", "--backends", "quantum",
                   "--out-dir", str(tmp_path / "b")])
        assert rc == EXIT_ERROR
