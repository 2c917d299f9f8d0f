"""Dataset input/output, descriptive statistics and the embedded phosphorus data."""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset

__all__ = ["PHOSPHORUS", "phosphorus", "Summary", "describe", "read_dataset", "write_dataset",
           "atomic_write_text"]

# phosphorus concentration in the leaves of 128 plants, in recorded order
PHOSPHORUS = (
    0.22, 0.17, 0.11, 0.10, 0.15, 0.06, 0.05, 0.07, 0.12, 0.09, 0.23, 0.25, 0.23,
    0.24, 0.20, 0.08, 0.11, 0.12, 0.10, 0.06, 0.20, 0.17, 0.20, 0.11, 0.16, 0.09,
    0.10, 0.12, 0.12, 0.10, 0.09, 0.17, 0.19, 0.21, 0.18, 0.26, 0.19, 0.17, 0.18,
    0.20, 0.24, 0.19, 0.21, 0.22, 0.17, 0.08, 0.08, 0.06, 0.09, 0.22, 0.23, 0.22,
    0.19, 0.27, 0.16, 0.28, 0.11, 0.10, 0.20, 0.12, 0.15, 0.08, 0.12, 0.09, 0.14,
    0.07, 0.09, 0.05, 0.06, 0.11, 0.16, 0.20, 0.25, 0.16, 0.13, 0.11, 0.11, 0.11,
    0.08, 0.22, 0.11, 0.13, 0.12, 0.15, 0.12, 0.11, 0.11, 0.15, 0.10, 0.15, 0.17,
    0.14, 0.12, 0.18, 0.14, 0.18, 0.13, 0.12, 0.14, 0.09, 0.10, 0.13, 0.09, 0.11,
    0.11, 0.14, 0.07, 0.07, 0.19, 0.17, 0.18, 0.16, 0.19, 0.15, 0.07, 0.09, 0.17,
    0.10, 0.08, 0.15, 0.21, 0.16, 0.08, 0.10, 0.06, 0.08, 0.12, 0.13,
)


def phosphorus() -> Dataset:
    """The embedded 128-value phosphorus concentration data."""
    return Dataset(np.array(PHOSPHORUS), label="phosphorus", source="embedded_phosphorus")


@dataclass(frozen=True)
class Summary:
    n: int
    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float
    variance: float | None

    @property
    def variance_undefined(self) -> bool:
        return self.variance is None

    def as_dict(self) -> dict:
        return {"n": self.n, "min": self.min, "q1": self.q1, "median": self.median,
                "mean": self.mean, "q3": self.q3, "max": self.max, "variance": self.variance,
                "variance_undefined": self.variance_undefined}


def describe(data) -> Summary:
    """Quartiles by linear interpolation between order statistics; variance with ``n - 1``."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot describe an empty dataset")
    q1, med, q3 = np.percentile(x, [25, 50, 75], method="linear")
    var = float(np.var(x, ddof=1)) if x.size > 1 else None
    return Summary(int(x.size), float(x.min()), float(q1), float(med), float(x.mean()),
                   float(q3), float(x.max()), var)


def _parse(text: str, where: str) -> np.ndarray:
    values = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len([f for f in fields if f]) != 1:
            raise ValueError(f"{where}:{lineno}: expected one value per line, got {raw.strip()!r}")
        token = next(f for f in fields if f)
        try:
            values.append(float(token))
        except ValueError:
            if values or header_seen:
                raise ValueError(f"{where}:{lineno}: not a number: {token!r}") from None
            header_seen = True
    if not values:
        raise ValueError(f"{where}: no values found")
    return np.array(values)


def read_dataset(path, label: str | None = None) -> Dataset:
    """Read one value per line; ``#`` starts a comment; an optional first-line header is skipped."""
    path = Path(path)
    values = _parse(path.read_text(), str(path))
    return Dataset(values, label=label or path.stem, source="file", meta={"path": str(path)})


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temporary sibling and rename it over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_dataset(data, path) -> None:
    """One value per line at 17 significant digits, so reading back is exact."""
    x = np.asarray(data, dtype=float).ravel()
    atomic_write_text(path, "".join(f"{v:.17g}\n" for v in x))
