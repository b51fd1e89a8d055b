"""Grid, boundary partition, symmetric gradient, adjoint divergence and boundary quadrature."""

import numpy as np
import pytest

from dynplast.common.exceptions import ConfigurationError, DimensionError
from dynplast.core.algebra import from_mandel, sym, to_mandel
from dynplast.discretization.grid import LABEL_D, LABEL_N, LABEL_SIGMA, BoundaryPartition, Grid
from dynplast.discretization.operators import (
    boundary_quadrature,
    divergence_with_traction,
    green_identity_residual,
    normal_trace,
    sparse_sym_gradient,
    sym_gradient,
)

GREEN_SIZES = [16, 64, 128]


def _random_sym(rng, shape):
    return from_mandel(rng.normal(size=shape + (3,)))


class TestGrid:

    def test_square_cells_required(self):
        with pytest.raises(ConfigurationError):
            Grid(1.0, 1.0, 4, 5)

    def test_nodal_weights_sum_to_area(self):
        grid = Grid(2.0, 1.0, 8, 4)
        assert grid.nodal_weights().sum() == pytest.approx(2.0)
        assert grid.nodal_weights()[0, 0] == pytest.approx(grid.h ** 2 / 4.0)

    def test_field_shape_checks(self, grid):
        with pytest.raises(DimensionError):
            grid.check_vector_field(np.zeros((8, 8, 2)))
        with pytest.raises(DimensionError):
            grid.check_sym_field(np.zeros((9, 9, 2, 2)))


class TestPartition:

    def test_pure_neumann_has_no_sigma(self, neumann_partition, grid):
        counts = neumann_partition.counts()
        assert counts == {LABEL_D: 0, LABEL_N: grid.n_boundary, LABEL_SIGMA: 0}

    def test_corners_between_labels_are_sigma(self, mixed_partition):
        labels = dict(zip(map(tuple, mixed_partition.nodes.tolist()), mixed_partition.labels))
        for corner in [(0, 0), (8, 0), (8, 8), (0, 8)]:
            assert labels[corner] == LABEL_SIGMA
        assert labels[(0, 4)] == LABEL_D
        assert labels[(4, 0)] == LABEL_N

    def test_interior_label_change_marks_nearest_node(self, grid):
        edges = {edge: [(0.0, 1.0, "N")] for edge in ("right", "top", "left")}
        edges["bottom"] = [(0.0, 0.5, "D"), (0.5, 1.0, "N")]
        partition = BoundaryPartition.from_intervals(grid, edges)
        bottom = {int(i): lbl for (i, j), lbl in zip(partition.nodes, partition.labels) if j == 0}
        assert bottom[4] == LABEL_SIGMA
        assert bottom[3] == LABEL_D
        assert bottom[5] == LABEL_N
        assert bottom[0] == LABEL_SIGMA

    def test_normals_are_unit_and_outward(self, mixed_partition):
        np.testing.assert_allclose(np.linalg.norm(mixed_partition.normals, axis=-1), 1.0)
        X = mixed_partition.grid.node_coords()
        centre = np.array([0.5, 0.5])
        outward = np.sum((mixed_partition.gather(X) - centre) * mixed_partition.normals, axis=-1)
        assert np.all(outward > 0)

    @pytest.mark.parametrize("intervals", [
        [(0.0, 0.4, "D"), (0.5, 1.0, "N")],
        [(0.0, 0.6, "D"), (0.5, 1.0, "N")],
        [(0.0, 1.0, "X")],
        [],
    ])
    def test_invalid_intervals(self, grid, intervals):
        edges = {edge: [(0.0, 1.0, "N")] for edge in ("right", "top", "left")}
        edges["bottom"] = intervals
        with pytest.raises(ConfigurationError) as exc:
            BoundaryPartition.from_intervals(grid, edges)
        assert exc.value.key == "partition.bottom"

    def test_gather_scatter(self, neumann_partition, rng):
        values = rng.normal(size=(neumann_partition.size, 2))
        field = neumann_partition.scatter(values)
        np.testing.assert_array_equal(neumann_partition.gather(field), values)
        assert field[1:-1, 1:-1].sum() == 0.0


class TestSymGradient:

    def test_constant_field(self, grid):
        u = np.ones(grid.node_shape + (2,)) * np.array([0.3, -1.2])
        np.testing.assert_array_equal(sym_gradient(grid, u), np.zeros(grid.cell_shape + (2, 2)))

    def test_affine_field_is_exact(self, grid):
        M = np.array([[0.4, -1.0], [2.5, 0.7]])
        u = grid.node_coords() @ M.T
        expected = np.broadcast_to(sym(M), grid.cell_shape + (2, 2))
        np.testing.assert_allclose(sym_gradient(grid, u), expected, atol=1e-13)

    def test_sparse_matches_dense(self, grid, rng):
        u = rng.normal(size=grid.node_shape + (2,))
        G = sparse_sym_gradient(grid)
        np.testing.assert_allclose(G @ u.ravel(), to_mandel(sym_gradient(grid, u)).ravel(), atol=1e-12)


class TestGreenIdentity:

    @pytest.mark.parametrize("n", GREEN_SIZES)
    def test_random_triples(self, rng, n):
        grid = Grid(1.0, 1.0, n, n)
        partition = BoundaryPartition.pure(grid, "N")
        for _ in range(100):
            sigma = _random_sym(rng, grid.cell_shape)
            u = rng.normal(size=grid.node_shape + (2,))
            T = rng.normal(size=(partition.size, 2))
            scale = 1.0 + np.sum(np.abs(sigma)) * grid.h ** 2 * np.max(np.abs(u)) / grid.h + np.sum(np.abs(T))
            assert abs(green_identity_residual(grid, partition, sigma, T, u)) <= 1e-12 * scale

    def test_zero(self, grid, neumann_partition):
        div = divergence_with_traction(grid, neumann_partition, grid.zero_sym_field(),
                                       np.zeros((neumann_partition.size, 2)))
        np.testing.assert_array_equal(div, np.zeros(grid.node_shape + (2,)))

    def test_constant_stress_equilibrium(self, grid, mixed_partition):
        sigma = np.broadcast_to(np.array([[1.0, 0.3], [0.3, -2.0]]), grid.cell_shape + (2, 2)).copy()
        T = normal_trace(grid, mixed_partition, sigma)
        div = divergence_with_traction(grid, mixed_partition, sigma, T)
        np.testing.assert_allclose(div, 0.0, atol=1e-12)
        # off the corners the discrete trace is σν
        edge = np.abs(np.prod(mixed_partition.normals, axis=-1)) < 1e-12
        expected = mixed_partition.normals[edge] @ sigma[0, 0].T
        np.testing.assert_allclose(T[edge], expected, atol=1e-12)

    def test_traction_shape_checked(self, grid, neumann_partition):
        with pytest.raises(DimensionError):
            divergence_with_traction(grid, neumann_partition, grid.zero_sym_field(), np.zeros((3, 2)))


class TestBoundaryQuadrature:

    def test_perimeter(self, neumann_partition):
        ones = np.ones(neumann_partition.size)
        assert boundary_quadrature(neumann_partition.grid, neumann_partition, ones) == pytest.approx(4.0)

    def test_full_dirichlet_edge(self, grid):
        edges = {edge: [(0.0, 1.0, "N")] for edge in ("right", "top", "left")}
        edges["bottom"] = [(0.0, 1.0, "D")]
        partition = BoundaryPartition.from_intervals(grid, edges)
        ones = np.ones(partition.size)
        assert boundary_quadrature(grid, partition, ones, restrict="D") == pytest.approx(1.0)
        assert boundary_quadrature(grid, partition, ones, restrict="N") == pytest.approx(3.0)

    def test_trapezoid_exact_on_linears(self, grid):
        edges = {edge: [(0.0, 1.0, "N")] for edge in ("right", "top", "left")}
        edges["bottom"] = [(0.0, 1.0, "D")]
        partition = BoundaryPartition.from_intervals(grid, edges)
        x = partition.gather(grid.node_coords())[:, 0]
        assert boundary_quadrature(grid, partition, 3.0 * x + 1.0, restrict="D") == pytest.approx(2.5)

    @pytest.mark.parametrize("n", [1, 2])
    def test_face_between_sigma_nodes_keeps_its_label(self, n):
        grid = Grid(1.0, 1.0, n, n)
        edges = {"bottom": [(0.0, 1.0, "D")], "top": [(0.0, 1.0, "D")],
                 "left": [(0.0, 1.0, "N")], "right": [(0.0, 1.0, "N")]}
        partition = BoundaryPartition.from_intervals(grid, edges)
        ones = np.ones(partition.size)
        assert boundary_quadrature(grid, partition, ones, restrict="D") == pytest.approx(2.0)
        assert boundary_quadrature(grid, partition, ones, restrict="N") == pytest.approx(2.0)
        assert boundary_quadrature(grid, partition, ones) == pytest.approx(4.0)

    def test_unknown_restriction(self, grid, neumann_partition):
        with pytest.raises(ConfigurationError):
            boundary_quadrature(grid, neumann_partition, np.ones(neumann_partition.size), restrict="Sigma")
