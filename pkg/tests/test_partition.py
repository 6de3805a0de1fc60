# Tests for the partition engine

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError
from sympy import Matrix as SympyMatrix

from treesums.algebra import Q2, QPolynomial, kappa, q_symbol
from treesums.partition import (
    CriticalPointError,
    GradingError,
    TensorData,
    TensorDataSpec,
    all_markings,
    configuration_data,
    critical_point_residuals,
    critical_point_solve,
    determinant,
    from_sympy_matrix,
    invert_matrix,
    is_inverse_pair,
    linear_part,
    moduli_data,
    partition_function_direct,
    potential_build,
    quadratic_data,
    solve_critical_point,
    standard_weight,
    t_power,
    to_sympy_matrix,
    tree_weight,
    verify_critical_point,
    verify_derivative_identity,
    verify_tree_sum,
    verify_tree_sum_identity,
)
from treesums.trees import EnumerationBudgetExceeded, enumerate_trees, path, star


def _poly_matrix(rows):
    return tuple(tuple(QPolynomial.constant(v) if not isinstance(v, QPolynomial) else v for v in row)
                 for row in rows)


def _single_index(tensor, deformed=frozenset({0}), max_bivalent=None):
    return TensorData(
        name="test",
        index_set=("*",),
        propagator=((1,),),
        propagator_inverse=((1,),),
        tensor=tensor,
        deformed=deformed,
        max_bivalent=max_bivalent,
    )


class TestTensorData:
    """Tests for weight data validation."""

    def test_non_symmetric_propagator(self):
        """g must be symmetric."""
        with pytest.raises(ValueError):
            TensorData(
                name="bad",
                index_set=("a", "b"),
                propagator=((1, 1), (0, 1)),
                propagator_inverse=((1, -1), (0, 1)),
                tensor=lambda indices: 0,
                deformed=frozenset(),
            )

    def test_wrong_inverse(self):
        """The inverse has to multiply to the identity."""
        with pytest.raises(ValueError):
            TensorData(
                name="bad",
                index_set=("*",),
                propagator=((1,),),
                propagator_inverse=((2,),),
                tensor=lambda indices: 0,
                deformed=frozenset(),
            )

    def test_duplicate_indices(self):
        """Index names are distinct."""
        with pytest.raises(ValueError):
            TensorData(
                name="bad",
                index_set=("*", "*"),
                propagator=((1, 0), (0, 1)),
                propagator_inverse=((1, 0), (0, 1)),
                tensor=lambda indices: 0,
                deformed=frozenset(),
            )

    def test_deformed_outside_index_set(self):
        """Deformed positions must exist."""
        with pytest.raises(ValueError):
            _single_index(lambda indices: 0, deformed=frozenset({3}))

    def test_undeformed_end_is_a_grading_error(self):
        """A nonzero C_a without t gives infinitely many trees per order."""
        data = _single_index(lambda indices: 1 if len(indices) == 1 else 0, deformed=frozenset())
        with pytest.raises(GradingError):
            partition_function_direct(data, 3)

    def test_two_index_tensor_needs_bound(self):
        """Nonzero C_ab without a bivalent bound is rejected."""
        data = _single_index(lambda indices: 1 if len(indices) <= 2 else 0)
        with pytest.raises(GradingError):
            data.check_grading()
        bounded = _single_index(lambda indices: Fraction(1, 2) if len(indices) <= 2 else 0, max_bivalent=1)
        assert bounded.check_grading() == 1

    def test_vertex_tensor_ignores_order(self):
        """C is symmetric in its indices."""
        data = configuration_data(Q2 + 1, 1)
        assert data.vertex_tensor((1, 0, 1)) == data.vertex_tensor((0, 1, 1))


class TestTensorDataSpec:
    """Tests for the JSON form of tensor data."""

    def test_quadratic_from_spec(self):
        """Only C_* = t gives the single two-vertex tree."""
        spec = TensorDataSpec(
            index_set=["*"],
            propagator=[["1"]],
            propagator_inverse=[["1"]],
            tensors={"*": "1"},
            deformed=["*"],
        )
        z = partition_function_direct(spec.to_tensor_data(), 4)
        assert z.coefficient(2) == Fraction(1, 2)
        assert [z.coefficient(n) for n in (0, 1, 3, 4)] == [0, 0, 0, 0]

    def test_polynomial_tensors(self):
        """Tensor values are parsed as polynomials in q."""
        spec = TensorDataSpec(
            index_set=["*"],
            propagator=[["1"]],
            propagator_inverse=[["1"]],
            tensors={"*": "1", "*,*,*": "q^2"},
            deformed=["*"],
        )
        z = partition_function_direct(spec.to_tensor_data(), 3)
        assert z.coefficient(3) == Q2 * Fraction(1, 6)

    def test_unknown_tensor_index(self):
        """Tensor keys must use declared indices."""
        spec = TensorDataSpec(
            index_set=["*"],
            propagator=[["1"]],
            propagator_inverse=[["1"]],
            tensors={"x": "1"},
        )
        with pytest.raises(ValueError):
            spec.to_tensor_data()

    def test_unknown_deformed_index(self):
        """Deformed names must be declared."""
        spec = TensorDataSpec(
            index_set=["*"],
            propagator=[["1"]],
            propagator_inverse=[["1"]],
            deformed=["x"],
        )
        with pytest.raises(ValueError):
            spec.to_tensor_data()

    def test_duplicate_index_names(self):
        """The model rejects repeated index names."""
        with pytest.raises(ValidationError):
            TensorDataSpec(index_set=["*", "*"], propagator=[], propagator_inverse=[])

    def test_comma_in_index_name(self):
        """Commas separate tensor keys, so names may not contain them."""
        with pytest.raises(ValidationError):
            TensorDataSpec(index_set=["a,b"], propagator=[["1"]], propagator_inverse=[["1"]])


class TestWeights:
    """Tests for standard weights and per-tree sums."""

    def test_star_weight(self):
        """The 3-star has weight C_3 t^3 / 3!."""
        tree = star(3)
        marking = {flag: "*" for flag in tree.flags()}
        weight = standard_weight(tree, marking, moduli_data())
        assert weight.order == 3
        assert weight.coefficient(3) == Fraction(1, 6)
        assert weight.coefficient(2) == 0

    def test_marking_must_cover_flags(self):
        """Every flag needs an index."""
        tree = path(2)
        with pytest.raises(ValueError):
            standard_weight(tree, {(0, 0): "*"}, moduli_data())

    def test_tree_weight_matches_marking_sum(self):
        """With a single index the tree weight is the only marking's weight."""
        tree = star(4)
        marking = {flag: "*" for flag in tree.flags()}
        assert tree_weight(tree, moduli_data()) == standard_weight(tree, marking, moduli_data()).coefficient(4)
        assert tree_weight(tree, moduli_data()) == (Q2 - 2) * Fraction(1, 24)

    def test_bivalent_tree_vanishes(self):
        """C_2 = 0 kills paths with interior vertices."""
        assert tree_weight(path(3), moduli_data()) == 0

    @pytest.mark.parametrize("size", [2, 3, 4, 5])
    def test_tree_weight_sums_configuration_markings(self, size):
        """The contracted tree weight equals the sum of standard weights over every marking."""
        data = configuration_data((Q2 + 1) ** 2, 2)
        for tree in enumerate_trees(size):
            power = t_power(tree)
            total = QPolynomial.zero()
            for marking in all_markings(tree, data):
                weight = standard_weight(tree, marking, data)
                value = weight.coefficient(weight.order)
                if weight.order == power:
                    total = total + value
                else:
                    assert value == 0
            assert tree_weight(tree, data) == total

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=2, max_value=6), st.data())
    def test_standard_weight_invariant_under_relabelling(self, size, data):
        """Renaming vertices, and carrying the marking along, keeps the weight."""
        tensors = configuration_data(Q2 + 1, 1)
        tree = data.draw(st.sampled_from(enumerate_trees(size)))
        permutation = data.draw(st.permutations(range(size)))
        marking = {flag: data.draw(st.sampled_from(tensors.index_set)) for flag in tree.flags()}
        moved = tree.relabel(permutation)
        moved_marking = {}
        for (v, index), name in marking.items():
            u, w = tree.edges[index]
            moved_marking[(permutation[v], moved.edge_index(permutation[u], permutation[w]))] = name
        assert standard_weight(moved, moved_marking, tensors) == standard_weight(tree, marking, tensors)


class TestPartitionFunction:
    """Tests for the direct tree sum."""

    def test_quadratic(self):
        """Z = t^2/2."""
        z = partition_function_direct(quadratic_data(), 5)
        assert z.coefficient(2) == Fraction(1, 2)
        assert all(z.coefficient(n) == 0 for n in range(6) if n != 2)

    def test_moduli_low_orders(self):
        """Coefficients P(M̄_{0,n})/n! with P_2 = P_3 = 1 and P_4 = q^2 + 1."""
        z = partition_function_direct(moduli_data(), 4)
        assert z.coefficient(2) == Fraction(1, 2)
        assert z.coefficient(3) == Fraction(1, 6)
        assert z.coefficient(4) == (Q2 + 1) * Fraction(1, 24)

    def test_configuration_second_order(self):
        """Two points on X: P(P + κ - 1)/2."""
        p_x = Q2 + 1
        z = partition_function_direct(configuration_data(p_x, 1), 2)
        assert z.coefficient(1) == 0
        assert z.coefficient(2) == p_x * (p_x + kappa(1) - 1) * Fraction(1, 2)

    def test_budget(self):
        """Orders beyond the vertex cap raise."""
        with pytest.raises(EnumerationBudgetExceeded):
            partition_function_direct(moduli_data(), 10)
        with pytest.raises(EnumerationBudgetExceeded):
            partition_function_direct(moduli_data(), 5, max_tree_vertices=6)


class TestCriticalPoint:
    """Tests for the potential and its critical point."""

    def test_quadratic_potential_terms(self):
        """S = t φ - φ^2/2."""
        potential = potential_build(quadratic_data(), 3)
        assert potential.terms == (((1,), 1, 1), ((2,), 0, Fraction(-1, 2)))

    def test_quadratic_critical_point(self):
        """φ = t and S = t^2/2 at the critical point."""
        potential = solve_critical_point(quadratic_data(), 4)
        assert potential.critical_point[0].coefficient(1) == 1
        assert potential.critical_point[0].coefficient(2) == 0
        assert potential.critical_value.coefficient(2) == Fraction(1, 2)

    def test_moduli_critical_point_is_derivative(self):
        """φ = dZ/dt for the moduli data."""
        potential = solve_critical_point(moduli_data(), 4)
        phi = potential.critical_point[0]
        assert phi.coefficient(1) == 1
        assert phi.coefficient(2) == Fraction(1, 2)
        assert phi.coefficient(3) == (Q2 + 1) * Fraction(1, 6)

    def test_residuals_vanish(self):
        """Stationarity holds for every shipped data set."""
        for data in (quadratic_data(), moduli_data(), configuration_data(Q2 + 1, 1)):
            assert all(r.passed for r in verify_critical_point(data, 5))

    def test_unsolved_potential(self):
        """Residuals need a solved critical point."""
        with pytest.raises(CriticalPointError):
            critical_point_residuals(potential_build(moduli_data(), 4))

    def test_truncation_too_low(self):
        """The potential must reach degree order + 1."""
        with pytest.raises(CriticalPointError):
            critical_point_solve(potential_build(moduli_data(), 3), 4)

    def test_linear_part(self):
        """g - C_2 for the configuration data keeps the swap in the first row."""
        data = configuration_data(Q2 + 1, 1)
        matrix = linear_part(data)
        assert matrix[0] == (0, 1)
        assert matrix[1][1] == -data.vertex_tensor((1, 1))
        assert determinant(matrix) == -1


class TestMatrices:
    """Tests for matrix helpers over Q[q]."""

    def test_determinant(self):
        """The swap matrix has determinant -1."""
        assert determinant(_poly_matrix(((0, 1), (1, 0)))) == -1

    def test_inverse(self):
        """Inverse of a unimodular matrix."""
        m = _poly_matrix(((1, Q2), (0, 1)))
        assert invert_matrix(m) == _poly_matrix(((1, -Q2), (0, 1)))

    def test_singular(self):
        """Zero determinant has no inverse."""
        with pytest.raises(CriticalPointError):
            invert_matrix(_poly_matrix(((0,),)))

    def test_non_unit_determinant(self):
        """A determinant of positive degree is not a unit."""
        with pytest.raises(CriticalPointError):
            invert_matrix(_poly_matrix(((Q2,),)))

    def test_determinant_of_polynomial_matrix(self):
        """det [[1, q²], [q², q⁴ + 2]] = 2 through sympy."""
        m = _poly_matrix(((1, Q2), (Q2, Q2 * Q2 + 2)))
        assert determinant(m) == 2
        assert determinant(()) == 1

    def test_inverse_pair(self):
        """A matrix and its computed inverse multiply to the identity."""
        m = _poly_matrix(((1, Q2, 0), (0, 1, Q2 + 1), (0, 0, Fraction(1, 2))))
        inverse = invert_matrix(m)
        assert is_inverse_pair(m, inverse)
        assert not is_inverse_pair(m, m)

    def test_sympy_conversion(self):
        """Entries become expressions in q and come back as polynomials."""
        m = _poly_matrix(((1, Q2), (0, Fraction(1, 3))))
        converted = to_sympy_matrix(m)
        assert isinstance(converted, SympyMatrix)
        assert converted[0, 1] == q_symbol ** 2
        assert from_sympy_matrix(converted) == m


class TestIdentities:
    """Tests that tree sums agree with critical values."""

    def test_moduli(self):
        """All identities hold for the moduli data."""
        reports = verify_tree_sum(moduli_data(), 5)
        assert len(reports) == 3
        assert all(r.passed for r in reports)

    def test_configuration(self):
        """All identities hold for a surface configuration."""
        assert all(r.passed for r in verify_tree_sum(configuration_data((Q2 + 1) ** 2, 2), 4))

    def test_moduli_order_seven(self):
        """The identities still hold at t^7."""
        reports = verify_tree_sum(moduli_data(), 7)
        assert len(reports) == 3
        assert all(r.passed for r in reports)

    def test_configuration_order_seven(self):
        """Seven points on a surface: both identities and stationarity hold."""
        reports = verify_tree_sum(configuration_data((Q2 + 1) ** 2, 2), 7)
        assert len(reports) == 4
        assert all(r.passed for r in reports)

    def test_single_identities(self):
        """Each identity also runs on its own."""
        assert verify_tree_sum_identity(quadratic_data(), 4).passed
        assert verify_derivative_identity(moduli_data(), 4).passed
