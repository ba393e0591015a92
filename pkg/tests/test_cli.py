import io
import os

import numpy as np
import pytest

from chebresize.core.app import ChebResizeApp
from chebresize.core.image_buffer import ImageBuffer
from chebresize.interp.resize_engine import decimate_odd
from chebresize.ui import cli
from chebresize.utils.img_io import read_image, write_image

from conftest import random_image


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CHEBRESIZE_THREADS", raising=False)


def run(*argv):
    out = io.StringIO()
    status = ChebResizeApp(out=out).run(list(argv))
    return status, out.getvalue()


@pytest.fixture
def nine(tmp_path, rng):
    image = random_image(rng, 9, 9)
    return image, write_image(image, tmp_path / "nine.pgm")


class TestParsers:
    def test_parse_size(self):
        assert cli.parse_size("160x107") == (160, 107)
        assert cli.parse_size("3X4") == (3, 4)

    @pytest.mark.parametrize("text", ["160", "0x5", "ax3", "1x2x3"])
    def test_parse_size_rejects(self, text):
        with pytest.raises(Exception):
            cli.parse_size(text)

    def test_parse_list(self):
        parse = cli.parse_list(["lci", "bicubic"])
        assert parse("lci, bicubic") == ["lci", "bicubic"]
        with pytest.raises(Exception):
            parse("lci,nearest")
        assert cli.parse_list(cast=cli.parse_positive_float)("2,2.5") == [2.0, 2.5]


class TestResize:
    def test_scale_down_by_three_is_decimation(self, tmp_path, nine):
        image, path = nine
        output = str(tmp_path / "small.pgm")
        status, text = run("resize", path, output, "--scale", "3", "--down")
        assert status == 0
        assert "9x9 -> 3x3" in text
        assert np.array_equal(read_image(output).samples, decimate_odd(image, 3).samples)

    def test_explicit_size(self, tmp_path, rng):
        path = write_image(random_image(rng, 10, 12, rgb=True), tmp_path / "in.ppm")
        output = str(tmp_path / "out.png")
        status, _ = run("resize", path, output, "--size", "15x7", "--method", "bicubic")
        assert status == 0
        result = read_image(output)
        assert result.size == (15, 7) and result.is_rgb

    def test_scale_without_direction_fails(self, nine, capsys):
        _, path = nine
        status, _ = run("resize", path, "out.pgm", "--scale", "2")
        assert status == 1
        assert capsys.readouterr().err.startswith("Error:")

    def test_directory_mode(self, tmp_path, rng):
        source = tmp_path / "in"
        source.mkdir()
        for name in ("a.pgm", "b.pgm"):
            write_image(random_image(rng, 6, 6), source / name)
        status, text = run("resize", str(source), str(tmp_path / "out"), "--scale", "2", "--up")
        assert status == 0
        assert sorted(os.listdir(tmp_path / "out")) == ["a.pgm", "b.pgm"]
        assert read_image(str(tmp_path / "out" / "a.pgm")).size == (12, 12)
        assert len(text.splitlines()) == 2

    def test_rgb_to_pgm_needs_luma(self, tmp_path, rng):
        path = write_image(random_image(rng, 6, 6, rgb=True), tmp_path / "c.ppm")
        assert run("resize", path, "gray.pgm", "--size", "3x3")[0] == 1
        assert run("resize", path, "gray.pgm", "--size", "3x3", "--luma")[0] == 0

    def test_csv_output_is_deterministic(self, nine):
        _, path = nine
        argv = ("resize", path, "out.pgm", "--size", "5x5", "--csv", "--no-timing")
        first, second = run(*argv), run(*argv)
        assert first == second
        assert first[1].strip() == f"resize,{path},lci,9,9,5,5,,,,"

    def test_missing_input(self):
        assert run("resize", "missing.pgm", "out.pgm", "--size", "2x2")[0] == 1

    def test_usage_error_exits_two(self):
        assert run("resize")[0] == 2
        assert run("resize", "a.pgm", "b.pgm", "--scale", "2", "--size", "2x2")[0] == 2


class TestMetrics:
    def test_identical_images(self, nine):
        _, path = nine
        status, text = run("metrics", path, path)
        assert status == 0
        assert "PSNR Inf" in text and "MSE 0" in text

    def test_identical_images_csv(self, nine):
        _, path = nine
        status, text = run("metrics", path, path, "--csv", "--no-timing")
        assert status == 0
        assert text.strip() == f"metrics,{path},,9,9,9,9,0,inf,1,"

    def test_unit_offset(self, tmp_path):
        a = write_image(ImageBuffer(np.zeros((4, 4))), tmp_path / "a.pgm")
        b = write_image(ImageBuffer(np.ones((4, 4))), tmp_path / "b.pgm")
        status, text = run("metrics", a, b)
        assert status == 0
        assert "PSNR 48.131 dB" in text

    def test_size_mismatch(self, tmp_path, rng):
        a = write_image(random_image(rng, 4, 4), tmp_path / "a.pgm")
        b = write_image(random_image(rng, 4, 5), tmp_path / "b.pgm")
        assert run("metrics", a, b)[0] == 1

    def test_windowed_needs_eight_pixels(self, tmp_path, rng):
        a = write_image(random_image(rng, 6, 6), tmp_path / "a.pgm")
        assert run("metrics", a, a, "--ssim", "windowed")[0] == 1


class TestCompare:
    def test_lci_exact_on_odd_factor(self, tmp_path, nine):
        image, path = nine
        reference = write_image(decimate_odd(image, 3), tmp_path / "ref.pgm")
        status, text = run("compare", path, reference, "--save-dir", str(tmp_path / "saved"))
        assert status == 0
        lines = text.splitlines()
        assert lines[0].startswith("LCI: MSE 0  PSNR Inf")
        assert lines[1].startswith("BIC-like:")
        assert sorted(os.listdir(tmp_path / "saved")) == ["nine_bicubic.pgm", "nine_lci.pgm"]


class TestNodes:
    def test_single_chebyshev_node(self):
        assert run("nodes", "1", "--chebyshev") == (0, "0\n")

    def test_equispaced_three(self):
        assert run("nodes", "3", "--equispaced")[1].split() == ["-0.5", "0", "0.5"]

    def test_fifteen_descending(self):
        status, text = run("nodes", "15")
        values = [float(v) for v in text.split()]
        assert status == 0 and len(values) == 15
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_angles_csv(self):
        lines = run("nodes", "2", "--angles", "--csv")[1].splitlines()
        assert lines[0] == "k,node,angle"
        assert len(lines) == 3

    def test_zero_rejected(self):
        assert run("nodes", "0")[0] == 1


class TestLebesgue:
    def test_chebyshev_is_small(self):
        status, text = run("lebesgue", "32", "--samples", "2001")
        assert status == 0
        assert float(text.rsplit(":", 1)[1]) < 5.0

    def test_equispaced_is_large(self):
        text = run("lebesgue", "32", "--equispaced", "--samples", "2001", "--csv")[1]
        assert float(text.splitlines()[1].split(",")[3]) > 1e4


class TestVerify:
    def test_noise_free(self, nine):
        _, path = nine
        status, text = run("verify", path, "3")
        assert status == 0 and "holds" in text

    def test_noisy_bound(self, nine):
        _, path = nine
        status, text = run("verify", path, "3", "--noise", "10", "--seed", "4", "--csv")
        assert status == 0
        assert text.splitlines()[1].endswith(",1")

    def test_noisy_ratio_reported(self, nine):
        _, path = nine
        status, text = run("verify", path, "3", "--noise", "10", "--seed", "4")
        assert status == 0
        (line,) = [l for l in text.splitlines() if "MSE ratio" in l]
        assert line.endswith("(<= 9)")
        assert 0.0 < float(line.split("=")[1].split()[0]) <= 9.0

    @pytest.mark.parametrize("s", ["2", "0", "-3", "1"])
    def test_non_odd_factor_rejected(self, nine, capsys, s):
        _, path = nine
        assert run("verify", path, s)[0] == 1
        assert "odd integer" in capsys.readouterr().err


class TestBench:
    def test_corpus_then_bench(self, tmp_path):
        corpus = str(tmp_path / "corpus")
        status, text = run("bench", "--make-corpus", corpus, "--count", "2")
        assert status == 0 and "wrote 2 images" in text

        status, text = run("bench", corpus, "--factors", "3", "--methods", "lci",
                           "--output", str(tmp_path / "out"), "--csv", "--no-timing")
        assert status == 0
        lines = text.splitlines()
        assert lines[0] == "command,input,method,n,m,N,M,mse,psnr,ssim,elapsed_s,factor,direction,exact_count"
        assert lines[1].split(",")[8] == "inf"
        assert sorted(os.listdir(tmp_path / "out")) == ["averages.csv", "plan.json", "records.csv"]

    def test_needs_dataset(self):
        assert run("bench")[0] == 1
