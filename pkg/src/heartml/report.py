"""CSV tables and dependency-free SVG plots."""
from __future__ import annotations

import io
import math
import warnings
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .classifiers import DISPLAY_NAMES
from .evaluation import FOLD_MEAN, METRIC_NAMES, CvReport, RocCurve
from .preprocess import CorrelationMatrix

# Row order of the published comparison table.
TABLE3_ORDER = ("logreg", "knn", "svm", "tree", "gnb", "mlp", "forest", "soft-vote", "hard-vote")
ROW_NAMES = {**DISPLAY_NAMES, "soft-vote": "Soft Voting", "hard-vote": "Hard Voting"}

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f")


def _threshold_text(t: float) -> str:
    if t == math.inf:
        return "inf"
    if t == -math.inf:
        return "-inf"
    return f"{t:.6f}"


def roc_csv(curve: RocCurve) -> str:
    buf = io.StringIO()
    buf.write("threshold,fpr,tpr\n")
    for t, f, r in curve.points:
        buf.write(f"{_threshold_text(t)},{f:.6f},{r:.6f}\n")
    return buf.getvalue()


def roc_svg(curves: dict[str, RocCurve], title: str = "ROC curve", size: int = 400) -> str:
    """Unit-square ROC axes, dashed chance diagonal, one polyline per curve."""
    pad = 50
    span = size - 2 * pad

    def xy(f, r):
        return pad + f * span, size - pad - r * span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" fill="none" stroke="black"/>',
        f'<text x="{size / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{size / 2:.1f}" y="{size - 12}" text-anchor="middle" font-size="12">False positive rate</text>',
        f'<text x="14" y="{size / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {size / 2:.1f})">True positive rate</text>',
    ]
    for v in (0.0, 0.5, 1.0):
        x, _ = xy(v, 0)
        _, y = xy(0, v)
        out.append(f'<text x="{x:.1f}" y="{size - pad + 15}" text-anchor="middle" font-size="10">{v:g}</text>')
        out.append(f'<text x="{pad - 6}" y="{y + 3:.1f}" text-anchor="end" font-size="10">{v:g}</text>')
    (x0, y0), (x1, y1) = xy(0, 0), xy(1, 1)
    out.append(
        f'<line class="chance" x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
        'stroke="gray" stroke-dasharray="4 4"/>'
    )
    for n, (name, curve) in enumerate(curves.items()):
        color = _PALETTE[n % len(_PALETTE)]
        pts = " ".join("{:.2f},{:.2f}".format(*xy(f, r)) for _, f, r in curve.points)
        out.append(
            f'<polyline class="roc" data-model="{escape(name)}" points="{pts}" fill="none" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        ty = size - pad - 10 - 14 * (len(curves) - 1 - n)
        out.append(
            f'<text class="auc" x="{size - pad - 6}" y="{ty}" text-anchor="end" font-size="11" '
            f'fill="{color}">{escape(name)} AUC = {curve.auc:.4f}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_roc(curve: RocCurve, csv_out, svg_out, name: str = "model") -> None:
    Path(csv_out).write_text(roc_csv(curve))
    Path(svg_out).write_text(roc_svg({name: curve}))


def table3_csv(reports: list[CvReport], aggregation: str = FOLD_MEAN) -> str:
    """One row per model in the published order, 4-decimal values."""
    by_name = {r.model_name: r for r in reports}
    unknown = [n for n in by_name if n not in TABLE3_ORDER]
    if unknown:
        warnings.warn(f"reports for {unknown} have no table row and were skipped")
    present = [n for n in TABLE3_ORDER if n in by_name]
    expected = set(TABLE3_ORDER[:8])
    missing = sorted(expected - set(present))
    if missing and len(present) > 1:
        warnings.warn(f"no report for {missing}; rows omitted")
    buf = io.StringIO()
    buf.write("model," + ",".join(METRIC_NAMES) + "\n")
    for name in present:
        m = by_name[name].headline(aggregation)
        buf.write(ROW_NAMES[name] + "," + ",".join(f"{getattr(m, k):.4f}" for k in METRIC_NAMES) + "\n")
    return buf.getvalue()


def emit_table3(reports: list[CvReport], path, aggregation: str = FOLD_MEAN) -> None:
    if not reports:
        raise ValueError("no reports to tabulate")
    Path(path).write_text(table3_csv(reports, aggregation))


def metrics_csv(reports: list[CvReport], aggregation: str = FOLD_MEAN) -> str:
    """Same rows keyed by model identifier, 6 decimals."""
    buf = io.StringIO()
    buf.write("model," + ",".join(METRIC_NAMES) + "\n")
    for r in reports:
        m = r.headline(aggregation)
        buf.write(r.model_name + "," + ",".join(f"{getattr(m, k):.6f}" for k in METRIC_NAMES) + "\n")
    return buf.getvalue()


def folds_csv(reports: list[CvReport]) -> str:
    buf = io.StringIO()
    buf.write("model,fold,size," + ",".join(METRIC_NAMES) + "\n")
    for r in reports:
        for i, (m, size) in enumerate(zip(r.per_fold, r.fold_sizes)):
            buf.write(f"{r.model_name},{i},{size}," + ",".join(f"{getattr(m, k):.6f}" for k in METRIC_NAMES) + "\n")
    return buf.getvalue()


def _ramp(v: float) -> str:
    # blue (-1) -> white (0) -> red (+1)
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        c = (255, int(round(255 * (1 - v))), int(round(255 * (1 - v))))
    else:
        c = (int(round(255 * (1 + v))), int(round(255 * (1 + v))), 255)
    return "#{:02x}{:02x}{:02x}".format(*c)


def heatmap_svg(corr: CorrelationMatrix, cell: int = 36) -> str:
    n = len(corr.labels)
    left, top = 80, 80
    w = left + n * cell + 10
    h = top + n * cell + 10
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
    for i, label in enumerate(corr.labels):
        y = top + i * cell + cell / 2 + 4
        x = left + i * cell + cell / 2
        out.append(f'<text x="{left - 4}" y="{y:.1f}" text-anchor="end" font-size="11">{escape(label)}</text>')
        out.append(
            f'<text x="{x:.1f}" y="{top - 6}" font-size="11" transform="rotate(-60 {x:.1f} {top - 6})">'
            f"{escape(label)}</text>"
        )
    values = np.asarray(corr.values)
    for i in range(n):
        for j in range(n):
            v = float(values[i, j])
            x, y = left + j * cell, top + i * cell
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_ramp(v)}"/>')
            out.append(
                f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2 + 3:.1f}" text-anchor="middle" '
                f'font-size="9">{v:.2f}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
