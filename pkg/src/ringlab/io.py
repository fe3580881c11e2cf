"""CSV and SVG writers with byte-stable output."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .leapfrog import Curve


def format_value(v) -> str:
    """Plain-text cell: floats with 17 significant digits, bools lower case."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return format(f, ".17g")
    if v is None:
        return ""
    return str(v)


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a header line and one line per row; LF endings, UTF-8."""
    lines = [",".join(header)]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row has {len(row)} cells, header has {width}")
        lines.append(",".join(_csv_cell(format_value(v)) for v in row))
    _write_text(Path(path), "\n".join(lines) + "\n")


def emit_records(path: str | Path, records: Sequence[Mapping[str, object]], header: Sequence[str] | None = None) -> None:
    """CSV from dict rows; columns follow ``header`` or the first record's key order."""
    if header is None:
        header = list(records[0].keys()) if records else []
    emit_csv(path, header, ([r[k] for k in header] for r in records))


def _csv_cell(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def frames_table(frames: Sequence, n_rings: int | None = None) -> tuple[list[str], list[list]]:
    """Header and rows for a list of :class:`~ringlab.blobs.DiagnosticsFrame`."""
    from .blobs import ring_pairs

    if not frames and n_rings is None:
        return ["time"], []
    n = frames[0].centers.shape[0] if frames else n_rings
    header = ["time"]
    header += [f"center_{i + 1}_{c}" for i in range(n) for c in ("x1", "x2")]
    header += [f"inertia_{i + 1}" for i in range(n)]
    header += [f"tail_mass_{i + 1}" for i in range(n)]
    header += [f"energy_{i + 1}" for i in range(n)]
    header += [f"energy_{i + 1}_{j + 1}" for i, j in ring_pairs(n)]
    header += ["total_energy"]
    header += [f"circulation_{i + 1}" for i in range(n)]
    rows = [[f.as_row()[k] for k in header] for f in frames]
    return header, rows


# --------------------------------------------------------------------------
# SVG


def _fmt(v: float) -> str:
    return format(float(v), ".10g")


def emit_svg(
    path: str | Path,
    curves: Sequence[Curve],
    overlays: Sequence[tuple[str, np.ndarray]] = (),
    markers: Sequence[tuple[str, np.ndarray]] = (),
    size: int = 640,
) -> None:
    """Standalone SVG: one polyline per curve, ``data-level`` carries the level value.

    ``overlays`` are extra labelled polylines (e.g. a trajectory) and
    ``markers`` labelled points.  The plane coordinate ``x2`` points up; the
    viewBox is the data bounding box plus a 5% margin on every side.
    """
    pts = [c.points for c in curves] + [np.asarray(p, float).reshape(-1, 2) for _, p in overlays]
    pts += [np.asarray(p, float).reshape(-1, 2) for _, p in markers]
    allp = np.vstack(pts) if pts else np.zeros((1, 2))
    allp = allp[np.all(np.isfinite(allp), axis=1)]
    if allp.size == 0:
        allp = np.zeros((1, 2))
    xmin, ymin = allp.min(axis=0)
    xmax, ymax = allp.max(axis=0)
    w = max(xmax - xmin, 1e-12)
    h = max(ymax - ymin, 1e-12)
    mx, my = 0.05 * w, 0.05 * h
    vb = (xmin - mx, -(ymax + my), w + 2 * mx, h + 2 * my)
    stroke = 0.002 * max(vb[2], vb[3])
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}" preserveAspectRatio="xMidYMid meet">',
        f'<g fill="none" stroke-width="{_fmt(stroke)}">',
    ]

    def poly(p: np.ndarray) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in p)

    for i, c in enumerate(curves):
        kind = "closed" if c.closed else "open"
        color = "#1f4e9c" if c.closed else "#7a7a7a"
        out.append(
            f'<polyline id="curve-{i}" class="level {kind}" data-level={quoteattr(format_value(c.level))} '
            f'stroke="{color}" points="{poly(c.points)}">'
            f"<title>{escape(f'C_E = {format_value(c.level)} ({kind})')}</title></polyline>"
        )
    for i, (label, p) in enumerate(overlays):
        out.append(
            f'<polyline id="overlay-{i}" class="overlay" stroke="#c0392b" '
            f'points="{poly(np.asarray(p, float).reshape(-1, 2))}"><title>{escape(label)}</title></polyline>'
        )
    out.append("</g>")
    for i, (label, p) in enumerate(markers):
        x, y = np.asarray(p, float).reshape(2)
        out.append(
            f'<circle id="marker-{i}" cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(3 * stroke)}" fill="#000">'
            f"<title>{escape(label)}</title></circle>"
        )
    out.append("</svg>")
    _write_text(Path(path), "\n".join(out) + "\n")
