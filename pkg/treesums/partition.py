# Partition Engine
# Standard weights of marked trees, the tree-sum partition function, the formal
# potential and its critical point

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy import Matrix as SympyMatrix, cancel, eye

from treesums.algebra import (
    Q2,
    QPolynomial,
    TreeSumsError,
    TruncatedSeries,
    falling_factorial,
    kappa,
)
from treesums.reports import VerificationReport, compare_series, zero_residual
from treesums.trees import EnumerationBudgetExceeded, Tree, aut_order, enumerate_trees_up_to

logger = logging.getLogger(__name__)

DEFAULT_MAX_TREE_VERTICES = 16

Matrix = Tuple[Tuple[QPolynomial, ...], ...]
Marking = Dict[Tuple[int, int], str]


class GradingError(TreeSumsError):
    """Tensor data admits infinitely many trees at some t-order."""


class CriticalPointError(TreeSumsError):
    """The potential has no critical point of the required shape."""


def _matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(
        tuple(v if isinstance(v, QPolynomial) else QPolynomial.constant(v) for v in row)
        for row in rows
    )


def to_sympy_matrix(m: Matrix) -> SympyMatrix:
    return SympyMatrix([[entry.as_expr() for entry in row] for row in m])


def from_sympy_matrix(m: SympyMatrix) -> Matrix:
    return tuple(
        tuple(QPolynomial.from_expr(cancel(m[i, j])) for j in range(m.cols))
        for i in range(m.rows)
    )


def is_inverse_pair(a: Matrix, b: Matrix) -> bool:
    result = (to_sympy_matrix(a) * to_sympy_matrix(b)).expand()
    return result == eye(len(a))


def determinant(m: Matrix) -> QPolynomial:
    if not m:
        return QPolynomial.one()
    return QPolynomial.from_expr(to_sympy_matrix(m).det())


def invert_matrix(m: Matrix) -> Matrix:
    """Inverse over Q[q]; the determinant must be a nonzero constant."""
    det = determinant(m)
    if det.is_zero() or not det.is_constant():
        raise CriticalPointError(f"linear part has determinant {det}, not a unit of Q[q]")
    return from_sympy_matrix(to_sympy_matrix(m).inv(method="ADJ"))


@dataclass(frozen=True)
class TensorData:
    """Weight data (A, g, C) of the standard marking with a t-deformation.

    ``tensor`` maps a sorted tuple of index positions to the undeformed
    C-value; indices in ``deformed`` carry C_a multiplied by t.
    ``max_bivalent`` bounds the number of valency-2 vertices on contributing
    trees whenever some 2-index tensor is nonzero.
    """

    name: str
    index_set: Tuple[str, ...]
    propagator: Matrix
    propagator_inverse: Matrix
    tensor: Callable[[Tuple[int, ...]], QPolynomial]
    deformed: FrozenSet[int]
    max_bivalent: Optional[int] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        size = len(self.index_set)
        if size == 0 or len(set(self.index_set)) != size:
            raise ValueError("index set must be non-empty and free of duplicates")
        for matrix in (self.propagator, self.propagator_inverse):
            if len(matrix) != size or any(len(row) != size for row in matrix):
                raise ValueError("propagator matrices must be square over the index set")
        object.__setattr__(self, "propagator", _matrix(self.propagator))
        object.__setattr__(self, "propagator_inverse", _matrix(self.propagator_inverse))
        for i in range(size):
            for j in range(size):
                if self.propagator[i][j] != self.propagator[j][i]:
                    raise ValueError("propagator must be symmetric")
        if not is_inverse_pair(self.propagator, self.propagator_inverse):
            raise ValueError("propagator_inverse is not the inverse of propagator")
        if any(a not in range(size) for a in self.deformed):
            raise ValueError("deformed indices must belong to the index set")

    @property
    def size(self) -> int:
        return len(self.index_set)

    def vertex_tensor(self, indices: Sequence[int]) -> QPolynomial:
        key = tuple(sorted(indices))
        if key not in self._cache:
            value = self.tensor(key)
            self._cache[key] = value if isinstance(value, QPolynomial) else QPolynomial.constant(value)
        return self._cache[key]

    def g(self, a: int, b: int) -> QPolynomial:
        return self.propagator[a][b]

    def bivalent_bound(self) -> int:
        """Largest number of valency-2 vertices a contributing tree may carry."""
        if all(self.vertex_tensor(pair).is_zero()
               for pair in combinations_with_replacement(range(self.size), 2)):
            return 0
        if self.max_bivalent is None:
            raise GradingError(
                f"{self.name}: nonzero 2-index tensors need a declared bound on bivalent vertices"
            )
        return self.max_bivalent

    def check_grading(self) -> int:
        """Raise GradingError unless every contributing end is t-graded; returns the bivalent bound."""
        for a in range(self.size):
            if a not in self.deformed and not self.vertex_tensor((a,)).is_zero():
                raise GradingError(
                    f"{self.name}: C_{self.index_set[a]} is nonzero but not deformed by t"
                )
        return self.bivalent_bound()

    def index_of(self, name: str) -> int:
        return self.index_set.index(name)


# --- shipped data sets ---

def moduli_data() -> TensorData:
    """One index, g = 1, C_* = t, C_** = 0 and C_k the open-stratum polynomial."""

    def tensor(indices: Tuple[int, ...]) -> QPolynomial:
        k = len(indices)
        if k == 1:
            return QPolynomial.one()
        if k == 2:
            return QPolynomial.zero()
        return falling_factorial(Q2 - 2, k - 3)

    return TensorData(
        name="moduli",
        index_set=("*",),
        propagator=((1,),),
        propagator_inverse=((1,),),
        tensor=tensor,
        deformed=frozenset({0}),
    )


def configuration_data(p_x: QPolynomial, m: int) -> TensorData:
    """Indices + (incoming) and - (outgoing) with g^{+-} = 1 and C_+ = t.

    Tensors with two or more + vanish; only the source carries no +, so at
    most one vertex is bivalent.
    """
    big_q = QPolynomial.monomial(1, 2 * m)
    kappa_m = kappa(m)

    def tensor(indices: Tuple[int, ...]) -> QPolynomial:
        plus = indices.count(0)
        minus = indices.count(1)
        if plus >= 2:
            return QPolynomial.zero()
        if plus == 1:
            if minus == 0:
                return QPolynomial.one()
            if minus == 1:
                return QPolynomial.zero()
            return kappa_m * falling_factorial(big_q - 2, minus - 2)
        if minus < 2:
            return QPolynomial.zero()
        return falling_factorial(p_x, minus) + kappa_m * p_x * falling_factorial(big_q - 2, minus - 2)

    return TensorData(
        name=f"configuration(m={m}, P={p_x})",
        index_set=("+", "-"),
        propagator=((0, 1), (1, 0)),
        propagator_inverse=((0, 1), (1, 0)),
        tensor=tensor,
        deformed=frozenset({0}),
        max_bivalent=1,
    )


def quadratic_data() -> TensorData:
    """Only C_* = t is nonzero; the two-vertex tree is the whole sum."""
    return TensorData(
        name="quadratic",
        index_set=("*",),
        propagator=((1,),),
        propagator_inverse=((1,),),
        tensor=lambda indices: QPolynomial.one() if len(indices) == 1 else QPolynomial.zero(),
        deformed=frozenset({0}),
    )


class TensorDataSpec(BaseModel):
    """JSON form of finite tensor data; tensors are keyed by comma-separated index names."""
    name: str = Field(default="custom")
    index_set: List[str]
    propagator: List[List[str]]
    propagator_inverse: List[List[str]]
    tensors: Dict[str, str] = Field(default_factory=dict)
    deformed: List[str] = Field(default_factory=list)
    max_bivalent: Optional[int] = Field(default=None, ge=0)

    @field_validator('index_set')
    @classmethod
    def validate_index_set(cls, v: List[str]) -> List[str]:
        if not v or len(set(v)) != len(v):
            raise ValueError('index_set must be non-empty and free of duplicates')
        if any(',' in name for name in v):
            raise ValueError('index names may not contain commas')
        return v

    def to_tensor_data(self) -> TensorData:
        positions = {name: i for i, name in enumerate(self.index_set)}
        table: Dict[Tuple[int, ...], QPolynomial] = {}
        for key, value in self.tensors.items():
            names = [n.strip() for n in key.split(',')]
            unknown = [n for n in names if n not in positions]
            if unknown:
                raise ValueError(f"tensor key '{key}' uses unknown indices {unknown}")
            table[tuple(sorted(positions[n] for n in names))] = QPolynomial.parse(value)
        missing = [n for n in self.deformed if n not in positions]
        if missing:
            raise ValueError(f"deformed indices {missing} are not in the index set")
        return TensorData(
            name=self.name,
            index_set=tuple(self.index_set),
            propagator=tuple(tuple(QPolynomial.parse(v) for v in row) for row in self.propagator),
            propagator_inverse=tuple(
                tuple(QPolynomial.parse(v) for v in row) for row in self.propagator_inverse
            ),
            tensor=lambda indices: table.get(indices, QPolynomial.zero()),
            deformed=frozenset(positions[n] for n in self.deformed),
            max_bivalent=self.max_bivalent,
        )


# --- tree weights ---

def t_power(tree: Tree) -> int:
    """Each end carries one deformed tensor, hence one factor of t."""
    return len(tree.leaves()) if tree.vertex_count > 1 else 0


def _monomial(power: int, value: QPolynomial) -> TruncatedSeries:
    return TruncatedSeries.from_coefficients([QPolynomial.zero()] * power + [value], power)


def standard_weight(tree: Tree, marking: Marking, data: TensorData) -> TruncatedSeries:
    """Weight of one flag marking: edge propagators times vertex tensors over |Aut|.

    ``marking`` maps each flag (vertex, edge index) to an index name. The
    result is the monomial in t of degree equal to the number of deformed ends.
    """
    flags = tree.flags()
    if set(marking) != set(flags):
        raise ValueError("the marking must assign an index to every flag")
    mark = {flag: data.index_of(name) for flag, name in marking.items()}
    value = QPolynomial.one()
    for index, (u, v) in enumerate(tree.edges):
        value = value * data.g(mark[(u, index)], mark[(v, index)])
    power = 0
    at_vertex: Dict[int, List[int]] = {v: [] for v in range(tree.vertex_count)}
    for (v, index), a in mark.items():
        at_vertex[v].append(a)
    for v, indices in at_vertex.items():
        value = value * data.vertex_tensor(indices)
        if len(indices) == 1 and indices[0] in data.deformed:
            power += 1
    value = value * Fraction(1, aut_order(tree))
    return _monomial(power, value)


def all_markings(tree: Tree, data: TensorData) -> Iterator[Marking]:
    flags = tree.flags()
    for choice in product(data.index_set, repeat=len(flags)):
        yield dict(zip(flags, choice))


def tree_weight(tree: Tree, data: TensorData) -> QPolynomial:
    """Sum of standard weights over all flag markings, without the t-power.

    Contracted from the ends towards vertex 0: ``h[v][b]`` sums the branch
    below v with the flag towards its parent marked b.
    """
    adjacency = tree.adjacency
    parent = {0: -1}
    order = [0]
    for v in order:
        for w in adjacency[v]:
            if w != parent[v]:
                parent[w] = v
                order.append(w)
    size = data.size
    h: Dict[int, List[QPolynomial]] = {}
    total = QPolynomial.zero()
    for v in reversed(order):
        # mu[c][a]: propagator from the flag at v marked a into the branch at c
        options = []
        for c in adjacency[v]:
            if c == parent[v]:
                continue
            mu = [
                sum((data.g(a, b) * h[c][b] for b in range(size) if h[c][b]), QPolynomial.zero())
                for a in range(size)
            ]
            options.append([(a, value) for a, value in enumerate(mu) if value])
        if any(not choice for choice in options):
            if v == 0:
                return QPolynomial.zero()
            h[v] = [QPolynomial.zero()] * size
            continue
        heads = [None] if v == 0 else list(range(size))
        values = []
        for head in heads:
            acc = QPolynomial.zero()
            for combo in product(*options):
                indices = [a for a, _ in combo] + ([] if head is None else [head])
                tensor = data.vertex_tensor(indices)
                if not tensor:
                    continue
                term = tensor
                for _, value in combo:
                    term = term * value
                acc = acc + term
            values.append(acc)
        if v == 0:
            total = values[0]
        else:
            h[v] = values
    return total * Fraction(1, aut_order(tree))


def partition_function_direct(data: TensorData, order: int,
                              max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> TruncatedSeries:
    """Sum of tree weights collected by power of t, through t^order."""
    bivalent = data.check_grading()
    vertex_bound = max(2 * order - 2 + bivalent, 2)
    if vertex_bound > max_tree_vertices:
        raise EnumerationBudgetExceeded(
            f"order {order} needs trees with up to {vertex_bound} vertices "
            f"(cap {max_tree_vertices})"
        )
    coeffs = [QPolynomial.zero()] * (order + 1)
    counts = [0] * (order + 1)
    for tree in enumerate_trees_up_to(vertex_bound, max_leaves=order, max_bivalent=bivalent):
        if tree.vertex_count < 2:
            continue
        weight = tree_weight(tree, data)
        if weight:
            power = t_power(tree)
            coeffs[power] = coeffs[power] + weight
            counts[power] += 1
    logger.info(f"{data.name}: tree sum through t^{order}, contributing trees per order {counts}")
    return TruncatedSeries(order, tuple(coeffs), QPolynomial)


# --- potential and critical point ---

Term = Tuple[Tuple[int, ...], int, QPolynomial]


@dataclass(frozen=True)
class PotentialRecord:
    """Formal potential truncated at field degree ``max_degree``.

    ``terms`` holds (field exponents, power of t, coefficient) triples. The
    critical point and value are filled in by critical_point_solve.
    """

    data: TensorData
    max_degree: int
    terms: Tuple[Term, ...]
    critical_point: Optional[Tuple[TruncatedSeries, ...]] = None
    critical_value: Optional[TruncatedSeries] = None

    def gradient_terms(self, a: int) -> Tuple[Term, ...]:
        result = []
        for exponents, power, coefficient in self.terms:
            if exponents[a]:
                lowered = list(exponents)
                lowered[a] -= 1
                result.append((tuple(lowered), power, coefficient * exponents[a]))
        return tuple(result)


def potential_build(data: TensorData, max_degree: int) -> PotentialRecord:
    """-1/2 g_ab φ_a φ_b plus C_M φ^M / M! over multisets M, t on deformed ends."""
    data.check_grading()
    size = data.size
    terms: Dict[Tuple[Tuple[int, ...], int], QPolynomial] = {}

    def add(exponents: Tuple[int, ...], power: int, value: QPolynomial) -> None:
        key = (exponents, power)
        terms[key] = terms.get(key, QPolynomial.zero()) + value

    inverse = data.propagator_inverse
    for a in range(size):
        for b in range(a, size):
            exponents = [0] * size
            exponents[a] += 1
            exponents[b] += 1
            factor = Fraction(-1, 2) if a == b else Fraction(-1)
            if inverse[a][b]:
                add(tuple(exponents), 0, inverse[a][b] * factor)
    for k in range(1, max_degree + 1):
        for multiset in combinations_with_replacement(range(size), k):
            value = data.vertex_tensor(multiset)
            if not value:
                continue
            exponents = tuple(multiset.count(a) for a in range(size))
            denominator = 1
            for e in exponents:
                denominator *= factorial(e)
            power = 1 if k == 1 and multiset[0] in data.deformed else 0
            add(exponents, power, value * Fraction(1, denominator))
    ordered = tuple(
        (exponents, power, value)
        for (exponents, power), value in sorted(terms.items(), key=lambda item: item[0])
        if value
    )
    return PotentialRecord(data=data, max_degree=max_degree, terms=ordered)


def evaluate_terms(terms: Sequence[Term], fields: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """Substitute series for the fields."""
    order = min(f.order for f in fields)
    t = TruncatedSeries.variable(order)
    powers: Dict[Tuple[int, int], TruncatedSeries] = {}

    def power_of(a: int, e: int) -> TruncatedSeries:
        if (a, e) not in powers:
            powers[(a, e)] = TruncatedSeries.one(order) if e == 0 else power_of(a, e - 1) * fields[a]
        return powers[(a, e)]

    total = TruncatedSeries.zero(order)
    for exponents, t_exp, coefficient in terms:
        monomial = TruncatedSeries.one(order)
        for a, e in enumerate(exponents):
            if e:
                monomial = monomial * power_of(a, e)
        for _ in range(t_exp):
            monomial = monomial * t
        total = total + monomial * coefficient
    return total


def linear_part(data: TensorData) -> Matrix:
    """g_ab - C_ab: the coefficient matrix of the order-n unknowns."""
    size = data.size
    return tuple(
        tuple(data.propagator_inverse[a][b] - data.vertex_tensor((a, b)) for b in range(size))
        for a in range(size)
    )


def critical_point_solve(potential: PotentialRecord, order: int) -> PotentialRecord:
    """Critical point with every field in t·Q[q][[t]], solved one order at a time."""
    if potential.max_degree < order + 1:
        raise CriticalPointError(
            f"potential truncated at degree {potential.max_degree} cannot fix order {order}"
        )
    data = potential.data
    size = data.size
    inverse = invert_matrix(linear_part(data))
    gradients = [potential.gradient_terms(a) for a in range(size)]
    fields = [TruncatedSeries.zero(order) for _ in range(size)]
    for n in range(1, order + 1):
        residual = [evaluate_terms(gradients[a], fields).coefficient(n) for a in range(size)]
        solution = [
            sum((inverse[a][b] * residual[b] for b in range(size)), QPolynomial.zero())
            for a in range(size)
        ]
        fields = [fields[a].with_coefficient(n, solution[a]) for a in range(size)]
        logger.debug(f"{data.name}: critical point solved through t^{n}")
    value = evaluate_terms(potential.terms, fields)
    return replace(potential, critical_point=tuple(fields), critical_value=value)


def solve_critical_point(data: TensorData, order: int) -> PotentialRecord:
    return critical_point_solve(potential_build(data, order + 1), order)


def critical_point_residuals(potential: PotentialRecord) -> List[TruncatedSeries]:
    """Gradient of the potential at its critical point, one series per field."""
    if potential.critical_point is None:
        raise CriticalPointError("critical point has not been solved")
    return [
        evaluate_terms(potential.gradient_terms(a), potential.critical_point)
        for a in range(potential.data.size)
    ]


def verify_critical_point(data: TensorData, order: int) -> List[VerificationReport]:
    potential = solve_critical_point(data, order)
    return [
        zero_residual(
            f"{data.name}: dS/d{data.index_set[a]} vanishes at the critical point",
            residual,
            "stationarity of the potential",
        )
        for a, residual in enumerate(critical_point_residuals(potential))
    ]


def _tree_sum_identity(data: TensorData, direct: TruncatedSeries, potential: PotentialRecord) -> VerificationReport:
    return compare_series(
        f"{data.name}: tree sum equals critical value",
        direct,
        potential.critical_value,
        "sum over trees of standard weights = S at its critical point",
    )


def _derivative_identity(data: TensorData, direct: TruncatedSeries, potential: PotentialRecord) -> VerificationReport:
    order = direct.order
    right = TruncatedSeries.zero(order)
    for a in sorted(data.deformed):
        right = right + potential.critical_point[a] * data.vertex_tensor((a,))
    return compare_series(
        f"{data.name}: dZ/dt equals C_a times the critical point",
        direct.derivative(),
        right.truncate(order - 1),
        "derivative of the tree sum in the deformation parameter",
    )


def verify_tree_sum_identity(data: TensorData, order: int,
                             max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> VerificationReport:
    """Tree sum equals the critical value of the potential."""
    direct = partition_function_direct(data, order, max_tree_vertices)
    return _tree_sum_identity(data, direct, solve_critical_point(data, order))


def verify_derivative_identity(data: TensorData, order: int,
                               max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> VerificationReport:
    """dZ/dt equals the sum of C_a φ_a over the deformed indices, through order-1."""
    direct = partition_function_direct(data, order, max_tree_vertices)
    return _derivative_identity(data, direct, solve_critical_point(data, order))


def verify_tree_sum(data: TensorData, order: int,
                    max_tree_vertices: int = DEFAULT_MAX_TREE_VERTICES) -> List[VerificationReport]:
    """Both identities and the stationarity residuals from a single tree sum and solve."""
    direct = partition_function_direct(data, order, max_tree_vertices)
    potential = solve_critical_point(data, order)
    reports = [_tree_sum_identity(data, direct, potential), _derivative_identity(data, direct, potential)]
    for a, residual in enumerate(critical_point_residuals(potential)):
        reports.append(zero_residual(
            f"{data.name}: dS/d{data.index_set[a]} vanishes at the critical point",
            residual,
            "stationarity of the potential",
        ))
    return reports
