import argparse
import math
import os
import sys
import time

import numpy as np

from ..bench import bench_harness, corpus_generator
from ..core.errors import ChebResizeError, InvalidSizeError
from ..interp import cheb_core
from ..interp.resize_engine import (
    METHOD_LABELS, Direction, Method, ResizeSpec, resize, resolve_target,
)
from ..quality import metrics
from ..utils.img_io import list_images, read_image, write_image
from . import report

SUBCOMMANDS = ("resize", "compare", "metrics", "nodes", "bench", "lebesgue", "verify")


def parse_size(text):
    """'160x107' -> (160, 107): rows x columns."""
    try:
        rows, cols = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like ROWSxCOLS, got '{text}'") from None
    if rows < 1 or cols < 1:
        raise argparse.ArgumentTypeError(f"size must be at least 1x1, got '{text}'")
    return rows, cols


def parse_positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got '{text}'")
    return value


def parse_list(choices=None, cast=str):
    def parse(text):
        items = [cast(item.strip()) for item in text.split(",") if item.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma separated list")
        if choices is not None:
            for item in items:
                if item not in choices:
                    raise argparse.ArgumentTypeError(f"'{item}' is not one of {', '.join(choices)}")
        return items
    return parse


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON settings file (default: ./chebresize.json)")
    common.add_argument("--csv", action="store_true", default=None, help=report.CSV_HELP)
    common.add_argument("--no-timing", action="store_true", help="leave elapsed times out of the output")
    common.add_argument("--backend", choices=[b.value for b in cheb_core.OperatorBackend],
                        help="operator construction: direct cosine sums or type-III DCT")
    common.add_argument("--ssim", choices=[m.value for m in metrics.SsimMode], dest="ssim_mode",
                        help="global SSIM formula or the mean over 8x8 windows")
    common.add_argument("--raw-metrics", action="store_true",
                        help="score unquantized samples instead of the 8-bit output")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="log progress messages")
    verbosity.add_argument("--quiet", action="store_true", help="suppress warnings")
    return common


def _add_family_flags(parser):
    family = parser.add_mutually_exclusive_group()
    family.add_argument("--chebyshev", dest="family", action="store_const",
                        const=cheb_core.NodeFamily.CHEBYSHEV.value)
    family.add_argument("--equispaced", dest="family", action="store_const",
                        const=cheb_core.NodeFamily.EQUISPACED.value)
    parser.set_defaults(family=cheb_core.NodeFamily.CHEBYSHEV.value)


def build_parser():
    common = _common_parser()
    methods = [m.value for m in Method]
    parser = argparse.ArgumentParser(
        prog="chebresize",
        description="Image resizing by Lagrange interpolation at Chebyshev nodes.",
        epilog=report.CSV_HELP,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resize", parents=[common], help="resize an image or a directory of images")
    p.add_argument("input", help="image file or directory")
    p.add_argument("output", help="output file, or directory when the input is one")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--scale", type=parse_positive_float, metavar="S",
                        help="scale factor; needs --up or --down")
    target.add_argument("--size", type=parse_size, metavar="ROWSxCOLS", help="explicit target size")
    direction = p.add_mutually_exclusive_group()
    direction.add_argument("--up", dest="direction", action="store_const", const=Direction.UP.value)
    direction.add_argument("--down", dest="direction", action="store_const", const=Direction.DOWN.value)
    p.add_argument("--method", choices=methods)
    p.add_argument("--no-quantize", action="store_true",
                   help="keep unrounded samples in memory (files are always 8-bit)")
    p.add_argument("--luma", action="store_true", help="allow writing RGB results as PGM luma")

    p = sub.add_parser("compare", parents=[common],
                       help="resize an input to a reference's size with each method and score it")
    p.add_argument("input")
    p.add_argument("reference")
    p.add_argument("--methods", type=parse_list(methods), default=[Method.LCI.value, Method.BICUBIC.value])
    p.add_argument("--save-dir", metavar="DIR")

    p = sub.add_parser("metrics", parents=[common], help="MSE, PSNR and SSIM of two images")
    p.add_argument("reference")
    p.add_argument("candidate")

    p = sub.add_parser("nodes", parents=[common], help="print a node set, 17 significant digits")
    p.add_argument("mu", type=int)
    p.add_argument("--angles", action="store_true", help="also print the angle of every chebyshev node")
    _add_family_flags(p)

    p = sub.add_parser("lebesgue", parents=[common], help="estimate a Lebesgue constant")
    p.add_argument("mu", type=int)
    p.add_argument("--samples", type=int, default=cheb_core.DEFAULT_LEBESGUE_SAMPLES)
    _add_family_flags(p)

    p = sub.add_parser("bench", parents=[common], help="run the benchmark protocol on a directory")
    p.add_argument("dataset_dir", nargs="?")
    p.add_argument("--factors", type=parse_list(cast=parse_positive_float), default=[2, 3, 4])
    p.add_argument("--directions", type=parse_list([d.value for d in Direction]), default=[Direction.DOWN.value])
    p.add_argument("--methods", type=parse_list(methods), default=[Method.LCI.value, Method.BICUBIC.value])
    p.add_argument("--output", default="bench_out", metavar="DIR")
    p.add_argument("--make-corpus", metavar="DIR", help="write the synthetic corpus to DIR")
    p.add_argument("--count", type=int, default=corpus_generator.DEFAULT_COUNT)
    p.add_argument("--seed", type=int, default=corpus_generator.DEFAULT_SEED)

    p = sub.add_parser("verify", parents=[common],
                       help="check exact odd-factor downscaling and its noise bound on an image")
    p.add_argument("input")
    p.add_argument("s", type=int)
    p.add_argument("--noise", type=float, default=0.0, metavar="DELTA")
    p.add_argument("--seed", type=int, default=0)
    return parser


class CommandLineUI:
    """Runs parsed subcommands against the app's settings; every cmd_* returns an exit status."""

    def __init__(self, app, out=None):
        self.app = app
        self.out = out or sys.stdout
        self.csv = False
        self.timing = True
        self.ssim_mode = None
        self.use_quantized = True

    def _print(self, text=""):
        print(text, file=self.out)

    def configure(self, args):
        settings = self.app.settings_manager
        self.csv = settings.get_user_setting('csv', False) if args.csv is None else args.csv
        self.timing = not args.no_timing
        self.ssim_mode = args.ssim_mode or settings.get_user_setting('ssim_mode', 'global')
        self.use_quantized = settings.get_user_setting('metrics_on_quantized', True) and not args.raw_metrics

    @property
    def ssim_params(self):
        return self.app.settings_manager.ssim_params(self.ssim_mode)

    def dispatch(self, args):
        self.configure(args)
        if args.command == "resize":
            method = args.method or self.app.settings_manager.get_user_setting('default_method', 'lci')
            quantize = self.app.settings_manager.get_user_setting('quantize_output', True) and not args.no_quantize
            if args.scale is not None:
                if args.direction is None:
                    raise InvalidSizeError("--scale needs --up or --down")
                spec = ResizeSpec.for_factor(args.scale, args.direction, method, quantize)
            else:
                if args.direction is not None:
                    raise InvalidSizeError("--up/--down only apply together with --scale")
                spec = ResizeSpec.for_target(args.size, method, quantize)
            return self.cmd_resize(args.input, spec, args.output, luma_convert=args.luma)
        if args.command == "compare":
            return self.cmd_compare(args.input, args.reference, args.methods, args.save_dir)
        if args.command == "metrics":
            return self.cmd_metrics(args.reference, args.candidate)
        if args.command == "nodes":
            return self.cmd_nodes(args.mu, args.family, args.angles)
        if args.command == "lebesgue":
            return self.cmd_lebesgue(args.mu, args.family, args.samples)
        if args.command == "bench":
            return self.cmd_bench(args)
        if args.command == "verify":
            return self.cmd_verify(args.input, args.s, args.noise, args.seed)
        raise InvalidSizeError(f"unknown command {args.command}")

    def _resize_one(self, input_path, spec, output_path, luma_convert):
        image = read_image(input_path)
        started = time.perf_counter()
        result = resize(image, spec, self.app.engine_options)
        elapsed = time.perf_counter() - started
        write_image(result, output_path, luma_convert=luma_convert)

        source, target = image.size, result.size
        if self.csv:
            self._print(report.csv_line({
                "command": "resize", "input": input_path, "method": spec.method.value,
                "n": source[0], "m": source[1], "N": target[0], "M": target[1],
                "elapsed_s": elapsed if self.timing else None,
            }))
        else:
            timing = f" in {elapsed:.4f}s" if self.timing else ""
            self._print(f"{input_path}: {source[0]}x{source[1]} -> {target[0]}x{target[1]} "
                        f"({spec.method.value}){timing} -> {output_path}")

    def cmd_resize(self, input_path, spec, output_path, luma_convert=False):
        if not os.path.isdir(input_path):
            self._resize_one(input_path, spec, output_path, luma_convert)
            return 0

        extensions = self.app.settings_manager.get_constant('bench', 'extensions')
        paths = list_images(input_path, extensions)
        if not paths:
            raise ChebResizeError(f"no images in {input_path}")
        os.makedirs(output_path, exist_ok=True)
        status = 0
        for path in paths:
            try:
                self._resize_one(path, spec, os.path.join(output_path, os.path.basename(path)), luma_convert)
            except (ChebResizeError, OSError) as e:
                print(f"Error: {e}", file=sys.stderr)
                status = 1
        return status

    def _report_metrics(self, command, input_name, method, source, target, scores):
        if self.csv:
            self._print(report.csv_line(report.metrics_row(
                command, input_name, method, source, target, scores, self.timing)))
        else:
            label = f"{METHOD_LABELS.get(Method(method), method)}: " if method else ""
            self._print(f"{label}{report.human_metrics(scores, self.timing)}")

    def cmd_metrics(self, reference_path, candidate_path):
        reference = read_image(reference_path)
        candidate = read_image(candidate_path)
        started = time.perf_counter()
        scores = metrics.evaluate(reference, candidate, self.ssim_params, self.use_quantized)
        scores = metrics.MetricsReport(scores.mse, scores.psnr, scores.ssim, scores.ssim_mode,
                                       time.perf_counter() - started)
        self._report_metrics("metrics", candidate_path, "", reference.size, candidate.size, scores)
        return 0

    def cmd_compare(self, input_path, reference_path, methods=("lci", "bicubic"), save_dir=None):
        image = read_image(input_path)
        reference = read_image(reference_path)
        quantize = self.app.settings_manager.get_user_setting('quantize_output', True)
        for method in methods:
            spec = ResizeSpec.for_target(reference.size, method, quantize)
            started = time.perf_counter()
            output = resize(image, spec, self.app.engine_options)
            elapsed = time.perf_counter() - started
            scores = metrics.evaluate(reference, output, self.ssim_params, self.use_quantized, elapsed)
            self._report_metrics("compare", input_path, spec.method.value, image.size, output.size, scores)
            if save_dir:
                stem, ext = os.path.splitext(os.path.basename(input_path))
                write_image(output, os.path.join(save_dir, f"{stem}_{spec.method.value}{ext}"))
        return 0

    def cmd_nodes(self, mu, family="chebyshev", angles=False):
        grid = cheb_core.get_node_grid(family, mu)
        show_angles = angles and grid.family is cheb_core.NodeFamily.CHEBYSHEV
        if self.csv:
            self._print("k,node,angle" if show_angles else "k,node")
        for k, node in enumerate(grid.nodes, start=1):
            fields = [f"{node:.17g}"]
            if show_angles:
                fields.append(f"{grid.angles[k - 1]:.17g}")
            if self.csv:
                self._print(",".join([str(k)] + fields))
            else:
                self._print(" ".join(fields))
        return 0

    def cmd_lebesgue(self, mu, family="chebyshev", samples=cheb_core.DEFAULT_LEBESGUE_SAMPLES):
        if samples < 2:
            raise InvalidSizeError(f"need at least 2 samples, got {samples}")
        value = cheb_core.lebesgue_constant(family, mu, samples)
        if self.csv:
            self._print("family,mu,samples,lebesgue")
            self._print(f"{family},{mu},{samples},{value:.17g}")
        else:
            self._print(f"{family} mu={mu}: {value:.17g}")
        return 0

    def cmd_bench(self, args):
        if args.make_corpus:
            paths = corpus_generator.make_corpus(args.make_corpus, args.count, args.seed)
            self._print(f"wrote {len(paths)} images to {args.make_corpus}")
            if not args.dataset_dir:
                return 0
        if not args.dataset_dir:
            raise InvalidSizeError("bench needs a dataset directory (or --make-corpus DIR)")

        plan = bench_harness.BenchPlan(
            dataset_dir=args.dataset_dir,
            scale_factors=tuple(args.factors),
            directions=tuple(args.directions),
            methods=tuple(args.methods),
            ssim_mode=self.ssim_mode,
            output=args.output,
            use_quantized=self.use_quantized,
            timing=self.timing,
        )
        result = bench_harness.run_plan(plan, self.app.settings_manager, self.app.engine_options)
        if self.csv:
            self._print(report.csv_header(report.BENCH_FIELDS))
            for row in result.averages:
                self._print(report.csv_line(row, report.BENCH_FIELDS))
        else:
            labels = {m.value: label for m, label in METHOD_LABELS.items()}
            self._print(report.averages_table(result.averages, labels))
            self._print()
            for name, path in result.paths.items():
                self._print(f"{name}: {path}")
        return 0

    def cmd_verify(self, input_path, s, noise=0.0, seed=0):
        image = bench_harness.crop_to_multiple(read_image(input_path), s)
        record = bench_harness.verify_odd_factor_exactness(
            image, s, noise, np.random.default_rng(seed), self.ssim_params
        )
        if self.csv:
            self._print("s,noise,n,m,N,M,mse_output,bound,psnr,ssim,holds")
            self._print(",".join(report.format_number(v) for v in (
                record.factor, record.noise_amplitude, *record.source_size, *record.target_size,
                record.mse_output, record.bound, record.psnr, record.ssim,
            )) + f",{int(record.holds)}")
        else:
            self._print(f"s={s} noise={noise} on {image.height}x{image.width}")
            self._print(f"  MSE(decimated, output) = {record.mse_output:.10g}")
            self._print(f"  s^2 * MSE(clean, input) + 1e-9 = {record.bound:.10g}")
            if record.noise_amplitude:
                self._print(f"  MSE ratio output/input = {record.ratio:.6g} (<= {record.factor ** 2})")
            self._print(f"  PSNR {report.human_psnr(record.psnr)}  SSIM {record.ssim:.6f}")
            self._print(f"  {'holds' if record.holds else 'VIOLATED'}")
        return 0 if record.holds else 1
