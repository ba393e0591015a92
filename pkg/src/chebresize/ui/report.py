"""
Text renderings of results: the fixed CSV schema shared by the CLI and the
bench harness, one-line human summaries, and the fixed-width averages table.
"""
import csv
import io
import math

CSV_FIELDS = ("command", "input", "method", "n", "m", "N", "M", "mse", "psnr", "ssim", "elapsed_s")
BENCH_FIELDS = CSV_FIELDS + ("factor", "direction", "exact_count")

CSV_HELP = (
    "CSV columns: " + ",".join(CSV_FIELDS)
    + " (psnr is the literal 'inf' for identical images; elapsed_s is empty with --no-timing)"
)


def format_number(value, digits=10):
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{digits}g}"
    return str(value)


def format_factor(factor):
    return format_number(float(factor)) if int(factor) != factor else str(int(factor))


def csv_line(row, fields=CSV_FIELDS):
    """One CSV line (no trailing newline) for a dict keyed by `fields`."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="")
    writer.writerow([format_number(row.get(field)) for field in fields])
    return buffer.getvalue()


def csv_header(fields=CSV_FIELDS):
    return ",".join(fields)


def write_csv(path, rows, fields=CSV_FIELDS):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([format_number(row.get(field)) for field in fields])
    return path


def metrics_row(command, input_name, method, source, target, report, timing=True):
    (n, m), (N, M) = source, target
    return {
        "command": command,
        "input": input_name,
        "method": method,
        "n": n, "m": m, "N": N, "M": M,
        "mse": report.mse,
        "psnr": report.psnr,
        "ssim": report.ssim,
        "elapsed_s": report.elapsed if timing else None,
    }


def human_psnr(value):
    return "Inf" if math.isinf(value) else f"{value:.3f}"


def human_metrics(report, timing=True):
    elapsed = "-" if (not timing or report.elapsed is None) else f"{report.elapsed:.4f}s"
    return (
        f"MSE {report.mse:.6g}  PSNR {human_psnr(report.psnr)} dB  "
        f"SSIM ({report.ssim_mode.value}) {report.ssim:.4f}  time {elapsed}"
    )


def averages_table(averages, method_labels=None):
    """
    Fixed-width table: one row per method, PSNR / SSIM / T column triple per
    (direction, factor) group. 'Inf' marks groups where every image is exact.
    """
    method_labels = method_labels or {}
    groups = sorted({(row["direction"], float(row["factor"])) for row in averages},
                    key=lambda g: (g[0], g[1]))
    methods = []
    for row in averages:
        if row["method"] not in methods:
            methods.append(row["method"])
    by_key = {(row["method"], row["direction"], float(row["factor"])): row for row in averages}

    prefix = {"up": "x", "down": ":"}
    label_width = max([len("Method")] + [len(method_labels.get(m, m)) for m in methods])
    header = "Method".ljust(label_width)
    sub = " " * label_width
    for direction, factor in groups:
        title = f"{prefix.get(direction, direction)}{format_factor(factor)}"
        header += " | " + title.center(26)
        sub += " | " + f"{'PSNR':>8} {'SSIM':>7} {'T':>9}"
    lines = [header, sub, "-" * len(sub)]

    for method in methods:
        line = method_labels.get(method, method).ljust(label_width)
        for direction, factor in groups:
            row = by_key.get((method, direction, factor))
            if row is None:
                line += " | " + " " * 26
                continue
            elapsed = row.get("elapsed_s")
            elapsed = "-" if elapsed is None else f"{elapsed:.4f}"
            line += " | " + f"{human_psnr(row['psnr']):>8} {row['ssim']:>7.4f} {elapsed:>9}"
        lines.append(line)
    return "\n".join(lines)
