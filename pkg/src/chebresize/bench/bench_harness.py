"""
Benchmark protocol over an image directory.

Every decodable file is a target image I^res. For each (direction, factor)
the input is generated once with the bicubic baseline in the opposite
direction, every method resizes it back to the target size, and the
output is scored against the target. Results land in records.csv,
averages.csv and plan.json.
"""
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.errors import (
    ChebResizeError, DegenerateTargetError, DivisibilityError,
    EmptyCorpusError, InvalidSizeError,
)
from ..core.image_buffer import ImageBuffer
from ..interp.bicubic_baseline import resize_bicubic
from ..interp.resize_engine import (
    DEFAULT_OPTIONS, METHODS, Direction, Method,
    check_odd_factor, decimate_odd, resize_lci, scaled_size,
)
from ..quality import metrics
from ..quality.metrics import SsimMode
from ..ui import report
from ..utils.img_io import list_images, read_image
from ..utils.settings import SettingsManager

notify = directNotify.newCategory("BenchHarness")

DIRECTION_ORDER = (Direction.UP, Direction.DOWN)
METHOD_ORDER = tuple(Method)
BOUND_SLACK = 1e-9


def _is_integer(factor):
    return float(factor).is_integer()


def sizing_label(factor, direction):
    if _is_integer(factor):
        return "exact"
    return "extrapolated" if Direction(direction) is Direction.DOWN else "floor"


@dataclass(frozen=True)
class BenchPlan:
    dataset_dir: str
    scale_factors: tuple = (2, 3, 4)
    directions: tuple = (Direction.DOWN,)
    methods: tuple = (Method.LCI, Method.BICUBIC)
    ssim_mode: SsimMode = SsimMode.GLOBAL
    output: str = "bench_out"
    use_quantized: bool = True
    timing: bool = True

    def __post_init__(self):
        factors = tuple(int(f) if _is_integer(f) else float(f) for f in self.scale_factors)
        if not factors:
            raise InvalidSizeError("a bench plan needs at least one scale factor")
        for factor in factors:
            if not factor > 1:
                raise InvalidSizeError(f"bench scale factors must exceed 1, got {factor}")
        object.__setattr__(self, "scale_factors", factors)
        object.__setattr__(self, "directions", tuple(Direction(d) for d in self.directions))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(self, "ssim_mode", SsimMode(self.ssim_mode))
        if not self.directions or not self.methods:
            raise InvalidSizeError("a bench plan needs at least one direction and one method")

    def describe(self):
        """JSON-ready summary stored in plan.json."""
        return {
            "dataset_dir": os.path.abspath(self.dataset_dir),
            "factors": list(self.scale_factors),
            "directions": [d.value for d in self.directions],
            "methods": [m.value for m in self.methods],
            "ssim_mode": self.ssim_mode.value,
            "metrics_on_quantized": self.use_quantized,
            "timing": self.timing,
            "sizing": {
                f"{d.value}:{report.format_factor(f)}": sizing_label(f, d)
                for d in self.directions for f in self.scale_factors
            },
        }


@dataclass(frozen=True)
class BenchRecord:
    image_id: str
    method: Method
    direction: Direction
    factor: float
    source_size: tuple
    target_size: tuple
    scores: metrics.MetricsReport

    @property
    def exact(self):
        return self.scores.is_exact

    def as_row(self, timing=True):
        row = report.metrics_row(
            "bench", self.image_id, self.method.value,
            self.source_size, self.target_size, self.scores, timing,
        )
        row.update(factor=self.factor, direction=self.direction.value, exact_count=int(self.exact))
        return row


@dataclass
class BenchResult:
    records: list
    averages: list
    paths: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)


def generate_input(target, factor, direction, options=DEFAULT_OPTIONS):
    """
    Bicubic input for a benchmark triple: shrink the target by the floor rule
    when upscalers are tested, enlarge it (N*s, or floor(N*s)) when
    downscalers are tested.
    """
    N, M = target.size
    opposite = Direction.DOWN if Direction(direction) is Direction.UP else Direction.UP
    size = (scaled_size(N, factor, opposite), scaled_size(M, factor, opposite))
    if min(size) < 2:
        raise DegenerateTargetError(
            f"input for {N}x{M} {Direction(direction).value} {factor} would be {size[0]}x{size[1]}"
        )
    return resize_bicubic(target, size, True, options.antialias, options.bicubic_a,
                          options.max_operator_elements)


def _score(method, source, target, plan, params, options):
    started = time.perf_counter()
    output = METHODS[method](source, target.size, True, options)
    elapsed = time.perf_counter() - started
    return metrics.evaluate(target, output, params, plan.use_quantized, elapsed)


def _run_image(image_id, target, plan, params, options):
    records = []
    for direction in plan.directions:
        for factor in plan.scale_factors:
            try:
                source = generate_input(target, factor, direction, options)
            except DegenerateTargetError as e:
                notify.warning(f"{image_id}: {e}; skipped")
                continue
            for method in plan.methods:
                if method is Method.EQUISPACED_LAGRANGE and \
                        max(source.size + target.size) > options.equispaced_max_size:
                    notify.warning(f"{image_id}: equispaced_lagrange skipped above {options.equispaced_max_size} pixels")
                    continue
                result = _score(method, source, target, plan, params, options)
                records.append(BenchRecord(
                    image_id, method, direction, factor, source.size, target.size, result,
                ))
    notify.info(f"{image_id}: {len(records)} records")
    return records


def _record_key(record):
    return (
        record.image_id,
        DIRECTION_ORDER.index(record.direction),
        record.factor,
        METHOD_ORDER.index(record.method),
    )


def average_records(records, timing=True):
    """Mean metrics per (method, direction, factor); PSNR mean over finite values only."""
    groups = {}
    for record in records:
        groups.setdefault((record.method, record.direction, record.factor), []).append(record)

    averages = []
    for (method, direction, factor) in sorted(
            groups, key=lambda k: (METHOD_ORDER.index(k[0]), DIRECTION_ORDER.index(k[1]), k[2])):
        group = groups[(method, direction, factor)]
        finite = [r.scores.psnr for r in group if not math.isinf(r.scores.psnr)]
        elapsed = [r.scores.elapsed for r in group if r.scores.elapsed is not None]
        averages.append({
            "command": "average",
            "input": len(group),
            "method": method.value,
            "mse": float(np.mean([r.scores.mse for r in group])),
            "psnr": float(np.mean(finite)) if finite else math.inf,
            "ssim": float(np.mean([r.scores.ssim for r in group])),
            "elapsed_s": float(np.mean(elapsed)) if (timing and elapsed) else None,
            "factor": factor,
            "direction": direction.value,
            "exact_count": len(group) - len(finite),
        })
    return averages


def _load_corpus(plan, extensions):
    images, skipped = [], []
    for path in list_images(plan.dataset_dir, extensions):
        try:
            images.append((os.path.basename(path), read_image(path)))
        except (ChebResizeError, OSError) as e:
            notify.warning(f"skipping {path}: {e}")
            skipped.append(path)
    if not images:
        raise EmptyCorpusError(f"no decodable images in {plan.dataset_dir}")
    return images, skipped


def run_plan(plan, settings_manager=None, options=DEFAULT_OPTIONS, workers=None):
    """Run the plan, write records.csv, averages.csv and plan.json; returns a BenchResult."""
    settings_manager = settings_manager or SettingsManager()
    params = settings_manager.ssim_params(plan.ssim_mode.value)
    extensions = settings_manager.get_constant('bench', 'extensions')
    names = {key: settings_manager.get_constant('bench', key)
             for key in ('records_name', 'averages_name', 'plan_name')}
    workers = workers or settings_manager.get_thread_count()

    images, skipped = _load_corpus(plan, extensions)
    notify.info(f"running {len(images)} images on {workers} workers")
    records, failed = [], []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {image_id: pool.submit(_run_image, image_id, image, plan, params, options)
                   for image_id, image in images}
        for image_id, future in futures.items():
            try:
                records.extend(future.result())
            except (ChebResizeError, MemoryError) as e:
                notify.warning(f"{image_id}: {e}; image dropped from the run")
                failed.append(os.path.join(plan.dataset_dir, image_id))
    if len(failed) == len(images):
        raise EmptyCorpusError(f"every image in {plan.dataset_dir} failed")
    records.sort(key=_record_key)
    skipped = skipped + failed

    averages = average_records(records, plan.timing)
    os.makedirs(plan.output, exist_ok=True)
    paths = {
        "records": report.write_csv(
            os.path.join(plan.output, names['records_name']),
            [r.as_row(plan.timing) for r in records], report.BENCH_FIELDS),
        "averages": report.write_csv(
            os.path.join(plan.output, names['averages_name']), averages, report.BENCH_FIELDS),
    }
    plan_path = os.path.join(plan.output, names['plan_name'])
    extra = {"plan": plan.describe(), "backend": options.backend.value,
             "ssim": {"mode": params.mode.value, "stabilizers": "squared" if params.squared_stabilizers else "literal"},
             "images": [image_id for image_id, _ in images], "skipped": skipped}
    paths["plan"] = settings_manager.save_snapshot(plan_path, extra)
    return BenchResult(records, averages, paths, skipped)


@dataclass(frozen=True)
class VerificationRecord:
    factor: int
    noise_amplitude: float
    source_size: tuple
    target_size: tuple
    mse_output: float
    mse_input: float
    psnr: float
    ssim: float

    @property
    def bound(self):
        return self.factor ** 2 * self.mse_input + BOUND_SLACK

    @property
    def holds(self):
        if self.noise_amplitude == 0:
            return self.mse_output == 0.0 and math.isinf(self.psnr) and self.ssim == 1.0
        return self.mse_output <= self.bound

    @property
    def ratio(self):
        return self.mse_output / self.mse_input if self.mse_input else 0.0


def crop_to_multiple(image, s):
    """Top-left crop to the largest size divisible by the odd factor s on both axes."""
    s = check_odd_factor(s)
    n, m = image.size
    rows, cols = n - n % s, m - m % s
    if rows < s or cols < s:
        raise DivisibilityError(f"image of {n}x{m} is smaller than the factor {s}")
    return ImageBuffer(image.samples[:, :rows, :cols])


def verify_odd_factor_exactness(image, s, noise_amplitude=0.0, rng=None, params=None):
    """
    Odd-factor LCI downscaling against decimation of the clean image.
    Noise-free input must give MSE 0, PSNR inf and SSIM 1; noisy input
    (uniform in [-noise, noise], added before quantization) must keep
    MSE(decimated, output) <= s^2 * MSE(clean, noisy).
    """
    if noise_amplitude < 0:
        raise InvalidSizeError(f"noise amplitude must be >= 0, got {noise_amplitude}")
    reference = decimate_odd(image, s)
    target = reference.size

    if noise_amplitude == 0:
        output = resize_lci(image, target)
        scores = metrics.evaluate(reference, output, params)
        return VerificationRecord(int(s), 0.0, image.size, target, scores.mse, 0.0,
                                  scores.psnr, scores.ssim)

    rng = rng if rng is not None else np.random.default_rng()
    noisy = ImageBuffer(image.samples + rng.uniform(-noise_amplitude, noise_amplitude, image.samples.shape))
    output = resize_lci(noisy, target, quantize_output=False)
    scores = metrics.evaluate(reference, output, params, use_quantized=False)
    mse_input = metrics.mse(image, noisy, use_quantized=False)
    return VerificationRecord(int(s), float(noise_amplitude), image.size, target, scores.mse,
                              mse_input, scores.psnr, scores.ssim)

