"""Scattered node sets with optional sampled values, plus CSV round-tripping."""

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointSet:
    """Finite set of pairwise-distinct nodes in R^d, optionally carrying samples.

    Parameters
    ----------
    nodes : (m, d) ndarray
        Node coordinates, one row per node.  Must be finite and pairwise
        distinct.  A 1-D array is promoted to a single column.
    values : (m,) ndarray, optional
        Sampled function values, one per node.
    """

    nodes: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float))
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        if nodes.ndim != 2 or nodes.shape[0] < 1:
            raise ValueError("nodes must be a (m, d) array with m >= 1")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("nodes must be finite")
        # exact duplicates are always a construction error
        uniq = np.unique(nodes, axis=0)
        if uniq.shape[0] != nodes.shape[0]:
            raise ValueError("nodes must be pairwise distinct")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=float).ravel()
            if vals.shape[0] != nodes.shape[0]:
                raise ValueError(
                    f"got {vals.shape[0]} values for {nodes.shape[0]} nodes"
                )
            if not np.all(np.isfinite(vals)):
                raise ValueError("values must be finite")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.nodes.shape[0]

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def span(self) -> float:
        """Extent of the node set: for d = 1 the distance between the extreme
        nodes, in general the diameter of the bounding box."""
        lo = self.nodes.min(axis=0)
        hi = self.nodes.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def is_increasing(self) -> bool:
        """True when d = 1 and the node coordinates strictly increase."""
        if self.dim != 1:
            return False
        x = self.nodes[:, 0]
        return bool(np.all(np.diff(x) > 0))

    def sorted_1d(self) -> "PointSet":
        """Copy with nodes sorted ascending (d = 1 only)."""
        if self.dim != 1:
            raise ValueError("sorted_1d requires d = 1")
        order = np.argsort(self.nodes[:, 0], kind="stable")
        vals = None if self.values is None else self.values[order]
        return PointSet(self.nodes[order].copy(), vals)

    def distances(self, x) -> np.ndarray:
        """Euclidean distances from evaluation point x to every node."""
        x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if x.shape[0] != self.dim:
            raise ValueError(f"point has dim {x.shape[0]}, nodes have dim {self.dim}")
        return np.linalg.norm(self.nodes - x[None, :], axis=1)

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        """Read nodes from a CSV file with header ``x1,...,xd[,f]``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            coord_cols = [i for i, h in enumerate(header) if h.startswith("x")]
            has_values = "f" in header
            if not coord_cols or coord_cols != list(range(len(coord_cols))):
                raise ValueError(
                    f"{path}: header must be x1,...,xd optionally followed by f"
                )
            val_col = header.index("f") if has_values else None
            rows, vals = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                try:
                    rows.append([float(row[i]) for i in coord_cols])
                    if has_values:
                        vals.append(float(row[val_col]))
                except (ValueError, IndexError):
                    raise ValueError(f"{path}:{lineno}: malformed row") from None
        if not rows:
            raise ValueError(f"{path}: no data rows")
        return cls(np.asarray(rows), np.asarray(vals) if has_values else None)

    def to_csv(self, path) -> None:
        """Write the node set (and values, when present) as CSV."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = [f"x{i + 1}" for i in range(self.dim)]
            if self.values is not None:
                header.append("f")
            writer.writerow(header)
            for i in range(self.m):
                row = [repr(float(v)) for v in self.nodes[i]]
                if self.values is not None:
                    row.append(repr(float(self.values[i])))
                writer.writerow(row)
