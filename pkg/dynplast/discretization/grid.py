"""
Rectangular grid and boundary partition.

Vector fields live at the (nx+1)·(ny+1) cell corners with shape
(nx+1, ny+1, 2); symmetric tensor fields live at the nx·ny cell centres with
shape (nx, ny, 2, 2).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from dynplast.common.exceptions import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

LABEL_D = "D"
LABEL_N = "N"
LABEL_SIGMA = "Sigma"
EDGES = ("bottom", "right", "top", "left")
EDGE_NORMALS = {
    "bottom": (0.0, -1.0),
    "right": (1.0, 0.0),
    "top": (0.0, 1.0),
    "left": (-1.0, 0.0),
}
SQUARE_TOL = 1e-12

Interval = Tuple[float, float, str]


@dataclass(frozen=True)
class Grid:
    """Uniform grid of square cells on [0, Lx] × [0, Ly]."""
    Lx: float
    Ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigurationError("Grid needs at least one cell per direction", key="grid.nx")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ConfigurationError("Grid lengths must be positive", key="grid.Lx")
        hx, hy = self.Lx / self.nx, self.Ly / self.ny
        if abs(hx - hy) > SQUARE_TOL * max(hx, hy):
            raise ConfigurationError(f"Cells must be square, got hx={hx} and hy={hy}", key="grid.ny")

    @property
    def h(self) -> float:
        return self.Lx / self.nx

    @property
    def node_shape(self) -> Tuple[int, int]:
        return (self.nx + 1, self.ny + 1)

    @property
    def cell_shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def n_boundary(self) -> int:
        return 2 * (self.nx + self.ny)

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.Lx + self.Ly)

    def node_coords(self) -> np.ndarray:
        x = np.linspace(0.0, self.Lx, self.nx + 1)
        y = np.linspace(0.0, self.Ly, self.ny + 1)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def cell_centers(self) -> np.ndarray:
        h = self.h
        x = (np.arange(self.nx) + 0.5) * h
        y = (np.arange(self.ny) + 0.5) * h
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def nodal_weights(self) -> np.ndarray:
        """Lumped nodal areas: h² interior, h²/2 on edges, h²/4 at corners."""
        wx = np.full(self.nx + 1, self.h)
        wy = np.full(self.ny + 1, self.h)
        wx[[0, -1]] *= 0.5
        wy[[0, -1]] *= 0.5
        return np.outer(wx, wy)

    def zero_vector_field(self) -> np.ndarray:
        return np.zeros(self.node_shape + (2,))

    def zero_sym_field(self) -> np.ndarray:
        return np.zeros(self.cell_shape + (2, 2))

    def check_vector_field(self, u: np.ndarray, name: str = "vector field") -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != self.node_shape + (2,):
            raise DimensionError(f"{name} does not match the grid nodes",
                                 expected=self.node_shape + (2,), actual=u.shape)
        return u

    def check_sym_field(self, s: np.ndarray, name: str = "tensor field") -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if s.shape != self.cell_shape + (2, 2):
            raise DimensionError(f"{name} does not match the grid cells",
                                 expected=self.cell_shape + (2, 2), actual=s.shape)
        return s

    def describe(self) -> Dict[str, float]:
        return {"Lx": self.Lx, "Ly": self.Ly, "nx": self.nx, "ny": self.ny, "h": self.h}


def boundary_node_indices(grid: Grid) -> np.ndarray:
    """Boundary nodes (i, j) counter-clockwise from the origin."""
    nx, ny = grid.nx, grid.ny
    bottom = [(i, 0) for i in range(nx + 1)]
    right = [(nx, j) for j in range(1, ny + 1)]
    top = [(i, ny) for i in range(nx - 1, -1, -1)]
    left = [(0, j) for j in range(ny - 1, 0, -1)]
    return np.array(bottom + right + top + left, dtype=int)


def _edge_nodes(grid: Grid, edge: str) -> List[Tuple[int, int]]:
    nx, ny = grid.nx, grid.ny
    if edge == "bottom":
        return [(i, 0) for i in range(nx + 1)]
    if edge == "top":
        return [(i, ny) for i in range(nx + 1)]
    if edge == "left":
        return [(0, j) for j in range(ny + 1)]
    return [(nx, j) for j in range(ny + 1)]


def validate_intervals(edge: str, intervals: Sequence[Interval]) -> List[Interval]:
    """Check that labelled intervals cover [0, 1] contiguously without overlap."""
    key = f"partition.{edge}"
    if not intervals:
        raise ConfigurationError(f"Edge {edge} has no labelled intervals", key=key)
    ordered = sorted((float(a), float(b), str(lbl)) for a, b, lbl in intervals)
    if abs(ordered[0][0]) > SQUARE_TOL or abs(ordered[-1][1] - 1.0) > SQUARE_TOL:
        raise ConfigurationError(f"Intervals on edge {edge} must cover [0, 1]", key=key)
    for idx, (a, b, lbl) in enumerate(ordered):
        if lbl not in (LABEL_D, LABEL_N):
            raise ConfigurationError(f"Unknown boundary label {lbl!r} on edge {edge}", key=key)
        if not b > a:
            raise ConfigurationError(f"Empty interval [{a}, {b}] on edge {edge}", key=key)
        if idx > 0 and abs(a - ordered[idx - 1][1]) > SQUARE_TOL:
            kind = "overlap" if a < ordered[idx - 1][1] else "gap"
            raise ConfigurationError(f"Intervals on edge {edge} {kind} at {a}", key=key)
    return ordered


def _edge_labels(n_cells: int, intervals: List[Interval]) -> List[str]:
    fractions = np.arange(n_cells + 1) / n_cells
    labels = []
    for f in fractions:
        for a, b, lbl in intervals:
            if a - SQUARE_TOL <= f <= b + SQUARE_TOL:
                labels.append(lbl)
                break
    # a label change marks the nearest node (ties to the lower index) as Σ
    for (_, b, lbl), (_, _, nxt) in zip(intervals[:-1], intervals[1:]):
        if lbl != nxt:
            k = int(np.floor(b * n_cells + 0.5 - 1e-9))
            labels[min(max(k, 0), n_cells)] = LABEL_SIGMA
    return labels


@dataclass(frozen=True, eq=False)
class BoundaryPartition:
    """
    Labels, normals and quadrature weights of the boundary nodes.

    Attributes:
        nodes: (nb, 2) node indices, counter-clockwise from the origin
        labels: (nb,) of "D", "N" or "Sigma"
        normals: (nb, 2) unit outward normals; corners carry the normalised sum of face normals
        ds: (nb,) node quadrature weights (h, including at corners)
        face_weights: label -> (nb,) trapezoid weights of faces carrying that label
    """
    grid: Grid
    nodes: np.ndarray
    labels: np.ndarray
    normals: np.ndarray
    ds: np.ndarray
    face_weights: Mapping[str, np.ndarray] = field(repr=False)

    @classmethod
    def from_intervals(cls, grid: Grid, edges: Mapping[str, Sequence[Interval]]) -> "BoundaryPartition":
        missing = [e for e in EDGES if e not in edges]
        if missing:
            raise ConfigurationError(f"Partition is missing edges {missing}", key=f"partition.{missing[0]}")
        per_node: Dict[Tuple[int, int], List[str]] = {}
        validated = {}
        for edge in EDGES:
            intervals = validated[edge] = validate_intervals(edge, edges[edge])
            n_cells = grid.nx if edge in ("bottom", "top") else grid.ny
            for node, lbl in zip(_edge_nodes(grid, edge), _edge_labels(n_cells, intervals)):
                per_node.setdefault(node, []).append(lbl)

        nodes = boundary_node_indices(grid)
        labels = []
        for i, j in nodes:
            seen = set(per_node[(int(i), int(j))])
            labels.append(seen.pop() if len(seen) == 1 else LABEL_SIGMA)
        labels = np.array(labels)

        normals = np.zeros((len(nodes), 2))
        for edge in EDGES:
            for node in _edge_nodes(grid, edge):
                k = _position(grid, node)
                normals[k] += EDGE_NORMALS[edge]
        normals /= np.linalg.norm(normals, axis=-1, keepdims=True)

        h = grid.h
        ds = np.full(len(nodes), h)
        face_weights = _face_weights(grid, nodes, labels, validated)
        partition = cls(grid, nodes, labels, normals, ds, face_weights)
        logger.debug(f"Boundary partition: {partition.counts()}")
        return partition

    @classmethod
    def pure(cls, grid: Grid, label: str) -> "BoundaryPartition":
        return cls.from_intervals(grid, {edge: [(0.0, 1.0, label)] for edge in EDGES})

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def flat_index(self) -> np.ndarray:
        """Positions of the boundary nodes in a flattened node array."""
        return self.nodes[:, 0] * (self.grid.ny + 1) + self.nodes[:, 1]

    @property
    def d_mask(self) -> np.ndarray:
        return self.labels == LABEL_D

    @property
    def n_mask(self) -> np.ndarray:
        return self.labels == LABEL_N

    @property
    def sigma_mask(self) -> np.ndarray:
        return self.labels == LABEL_SIGMA

    def gather(self, u: np.ndarray) -> np.ndarray:
        """Boundary-node values of a nodal field."""
        return u[self.nodes[:, 0], self.nodes[:, 1]]

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Nodal field that carries `values` on the boundary and zeros inside."""
        out = np.zeros(self.grid.node_shape + values.shape[1:])
        out[self.nodes[:, 0], self.nodes[:, 1]] = values
        return out

    def counts(self) -> Dict[str, int]:
        return {lbl: int(np.sum(self.labels == lbl)) for lbl in (LABEL_D, LABEL_N, LABEL_SIGMA)}


def _position(grid: Grid, node: Tuple[int, int]) -> int:
    i, j = node
    nx, ny = grid.nx, grid.ny
    if j == 0:
        return i
    if i == nx:
        return nx + j
    if j == ny:
        return nx + ny + (nx - i)
    return 2 * nx + ny + (ny - j)


def _face_midpoint(grid: Grid, p: Tuple[int, int], q: Tuple[int, int]) -> Tuple[str, float]:
    """Edge of the boundary face p–q and the fraction of its midpoint along that edge."""
    (ip, jp), (iq, jq) = p, q
    if ip == iq:
        return ("left" if ip == 0 else "right"), 0.5 * (jp + jq) / grid.ny
    return ("bottom" if jp == 0 else "top"), 0.5 * (ip + iq) / grid.nx


def _interval_label(intervals: List[Interval], fraction: float) -> str:
    for a, b, lbl in intervals:
        if a - SQUARE_TOL <= fraction <= b + SQUARE_TOL:
            return lbl
    return LABEL_SIGMA


def _face_weights(grid: Grid, nodes: np.ndarray, labels: np.ndarray,
                  edges: Mapping[str, List[Interval]]) -> Dict[str, np.ndarray]:
    # face k joins node k and node k+1 (cyclic); it takes the non-Σ label of its
    # ends, or the interval label at its midpoint when both ends are Σ
    nb, h = len(labels), grid.h
    weights = {LABEL_D: np.zeros(nb), LABEL_N: np.zeros(nb), "all": np.zeros(nb)}
    for k in range(nb):
        nxt = (k + 1) % nb
        a, b = labels[k], labels[nxt]
        face = a if a != LABEL_SIGMA else b
        if face == LABEL_SIGMA:
            edge, fraction = _face_midpoint(grid, tuple(nodes[k]), tuple(nodes[nxt]))
            face = _interval_label(edges[edge], fraction)
        for end in (k, nxt):
            weights["all"][end] += 0.5 * h
            if face in (LABEL_D, LABEL_N):
                weights[face][end] += 0.5 * h
    return weights
