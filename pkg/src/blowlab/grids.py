"""Space-time solution grids and their CSV serialization.

A SolutionGrid holds stored time slices of a radial solve: times (possibly a
subsample of the computed steps), the radial mesh, and a values matrix of
shape (len(times), len(r)). Grids whose values would overflow the linear
scale are stored as log-magnitude plus sign (encoding = "log-sign").

CSV layout: one `#` header comment line carrying (n, p, j, dt, dr, t0, r0),
then a first row listing the radii, then one row per stored slice whose first
field is the slice time. Floats are written with repr round-tripping so a
rewrite of the same grid is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np


def fmt_float(x) -> str:
    return repr(float(x))


@dataclass
class SolutionGrid:
    times: np.ndarray           # stored slice times, shape (nt,)
    r: np.ndarray               # radial mesh, shape (nr,)
    values: np.ndarray          # shape (nt, nr); u, v, or log|.| per encoding
    dt: float
    dr: float
    r_max: float
    meta: dict = dc_field(default_factory=dict)
    encoding: str = "linear"    # linear | log-sign
    signs: Optional[np.ndarray] = None
    trace: object = None        # RunTrace when produced by the solver

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.times), len(self.r)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"(times, r) = ({len(self.times)}, {len(self.r)})")
        if self.encoding not in ("linear", "log-sign"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.encoding == "log-sign" and self.signs is None:
            raise ValueError("log-sign encoding requires a signs array")

    def nearest_indices(self, t: float, r: float) -> tuple:
        return (int(np.argmin(np.abs(self.times - t))),
                int(np.argmin(np.abs(self.r - r))))

    def value_at(self, t: float, r: float) -> float:
        """Value at the nearest stored grid node (no interpolation)."""
        i, k = self.nearest_indices(t, r)
        return float(self.values[i, k])

    def row_at(self, t: float) -> tuple:
        i = int(np.argmin(np.abs(self.times - t)))
        return float(self.times[i]), self.values[i]


def write_grid_csv(grid: SolutionGrid, path: str) -> None:
    meta = grid.meta
    header = ("# n={n} p={p} j={j} dt={dt} dr={dr} t0={t0} r0={r0} encoding={enc}".format(
        n=meta.get("n", "?"), p=meta.get("p", "?"), j=meta.get("j", "?"),
        dt=fmt_float(grid.dt), dr=fmt_float(grid.dr),
        t0=fmt_float(grid.times[0]), r0=fmt_float(grid.r[0]), enc=grid.encoding))
    lines = [header]
    lines.append("# first data row: radii; following rows: slice time, values across radii")
    lines.append(",".join(["t\\r"] + [fmt_float(x) for x in grid.r]))
    for i, t in enumerate(grid.times):
        lines.append(",".join([fmt_float(t)] + [fmt_float(x) for x in grid.values[i]]))
    if grid.encoding == "log-sign":
        lines.append("# signs")
        for i, t in enumerate(grid.times):
            lines.append(",".join([fmt_float(t)] + [fmt_float(x) for x in grid.signs[i]]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid_csv(path: str) -> SolutionGrid:
    meta: dict = {}
    rows = []
    sign_rows = []
    in_signs = False
    r = None
    encoding = "linear"
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line[1:].strip() == "signs":
                    in_signs = True
                    continue
                for token in line[1:].split():
                    if "=" in token:
                        key, val = token.split("=", 1)
                        if key == "encoding":
                            encoding = val
                        else:
                            meta[key] = val
                continue
            cells = line.split(",")
            if r is None:
                r = np.array([float(x) for x in cells[1:]])
            elif in_signs:
                sign_rows.append(np.array([float(x) for x in cells[1:]]))
            else:
                rows.append((float(cells[0]), np.array([float(x) for x in cells[1:]])))
    if r is None or not rows:
        raise ValueError(f"no grid data found in {path}")
    times = np.array([t for t, _ in rows])
    values = np.vstack([v for _, v in rows])
    dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
    dr = float(r[1] - r[0]) if len(r) > 1 else 0.0
    for key in ("dt", "dr", "t0", "r0"):
        meta.pop(key, None)
    for key in ("n", "j"):
        if meta.get(key, "?") == "?":
            meta.pop(key, None)
        else:
            meta[key] = int(meta[key])
    if meta.get("p", "?") == "?":
        meta.pop("p", None)
    else:
        meta["p"] = float(meta["p"])
    signs = np.vstack(sign_rows) if sign_rows else None
    return SolutionGrid(times=times, r=r, values=values, dt=dt, dr=dr,
                        r_max=float(r[-1]), meta=meta, encoding=encoding, signs=signs)
