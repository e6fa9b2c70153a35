"""File formats: embedding and vector CSVs, diagram and image CSVs, reports.

Every format is plain text. Floats are written with Python's shortest
round-trip repr so write-then-read is bitwise exact, and all writers go
through a temp-file-plus-rename step so a killed run never leaves a
partially written file behind. Readers raise DataError naming the file
and row, matching the exit-code contract (data errors are exit 2).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError
from .pimage import PersistenceImage, PivConfig
from .persistence import PersistenceDiagram


def atomic_write_text(path, text: str) -> None:
    """Write UTF-8 text via a sibling temp file and an atomic rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: float) -> str:
    return repr(float(value))


def _parse_float(token: str, path, row: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataError(f"{path}: row {row}: {token!r} is not a number") from None


def read_matrix_csv(path) -> np.ndarray:
    """Headerless CSV of floats, one row per line, equal column counts.

    Rows must agree in width and every value must be a finite double;
    violations name the offending row.
    """
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            values = [_parse_float(tok, path, i) for tok in line.split(",")]
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataError(
                    f"{path}: row {i}: expected {width} columns, got {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no rows")
    out = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        bad = int(np.argwhere(~np.isfinite(out).all(axis=1)).ravel()[0])
        raise DataError(f"{path}: row {bad}: non-finite value")
    return out


def read_embedding_csv(path) -> np.ndarray:
    """Sentence embedding matrix: one row per sentence, d float columns."""
    return read_matrix_csv(path)


def read_vector_csv(path) -> np.ndarray:
    """Single-row CSV of floats (a document vector)."""
    mat = read_matrix_csv(path)
    if mat.shape[0] != 1:
        raise DataError(f"{path}: expected exactly one row, got {mat.shape[0]}")
    return mat[0]


def matrix_csv_text(arr: np.ndarray) -> str:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    return "\n".join(",".join(_fmt(v) for v in row) for row in arr) + "\n"


def write_matrix_csv(path, arr: np.ndarray) -> None:
    atomic_write_text(path, matrix_csv_text(arr))


def diagram_csv_text(diagram: PersistenceDiagram) -> str:
    """Header `dim,birth,death`; death may be the literal `inf`.

    Rows come out sorted by (dim, birth, death) because the diagram type
    stores its points in that canonical order.
    """
    lines = ["dim,birth,death"]
    for q, b, d in zip(diagram.dims, diagram.births, diagram.deaths):
        death = "inf" if np.isinf(d) else _fmt(d)
        lines.append(f"{int(q)},{_fmt(b)},{death}")
    return "\n".join(lines) + "\n"


def write_diagram_csv(diagram: PersistenceDiagram, path) -> None:
    atomic_write_text(path, diagram_csv_text(diagram))


def read_diagram_csv(path, source_id: str = "") -> PersistenceDiagram:
    dims: list[int] = []
    births: list[float] = []
    deaths: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "dim,birth,death":
            raise DataError(f"{path}: expected header 'dim,birth,death', got {header!r}")
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DataError(f"{path}: row {i}: expected 3 columns, got {len(parts)}")
            dims.append(int(_parse_float(parts[0], path, i)))
            births.append(_parse_float(parts[1], path, i))
            deaths.append(_parse_float(parts[2], path, i))
    return PersistenceDiagram(
        dims=np.array(dims, dtype=np.int32),
        births=np.array(births, dtype=np.float64),
        deaths=np.array(deaths, dtype=np.float64),
        source_id=source_id,
    )


def piv_sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_piv_csv(image: PersistenceImage, path) -> None:
    """One CSV row of pixels_per_axis^2 floats, row-major from the
    (min birth, min persistence) corner, plus a JSON sidecar recording
    the full configuration."""
    atomic_write_text(path, matrix_csv_text(image.values))
    atomic_write_text(piv_sidecar_path(path), canonical_json(image.config.to_json_dict()))


def read_piv_csv(path) -> PersistenceImage:
    values = read_vector_csv(path)
    sidecar = piv_sidecar_path(path)
    if not sidecar.exists():
        raise DataError(f"{path}: missing config sidecar {sidecar}")
    with open(sidecar, "r", encoding="utf-8") as fh:
        config = PivConfig.from_json_dict(json.load(fh))
    return PersistenceImage(values=values, config=config)


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, newline at end.

    Floats serialize through repr, so identical doubles give identical
    bytes. Callers must not put NaN or infinity in reports.
    """
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    atomic_write_text(path, canonical_json(obj))


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def report_csv_text(report: dict) -> str:
    """Flatten the accuracy report: one row per (model, feature spec,
    label, fold), then a mean row per label, then the grand mean with
    label `all`."""
    lines = ["model_kind,feature_spec,label,fold,accuracy"]
    for cell in report["cells"]:
        kind = cell["model_kind"]
        spec = cell["feature_spec"]
        for entry in cell["per_label"]:
            label = entry["label"]
            for fold, acc in enumerate(entry["fold_accuracy"]):
                lines.append(f"{kind},{spec},{label},{fold},{_fmt(acc)}")
            lines.append(f"{kind},{spec},{label},mean,{_fmt(entry['mean'])}")
        lines.append(f"{kind},{spec},all,mean,{_fmt(cell['grand_mean'])}")
    return "\n".join(lines) + "\n"


def write_report(report: dict, json_path, csv_path) -> None:
    write_json(json_path, report)
    atomic_write_text(csv_path, report_csv_text(report))
