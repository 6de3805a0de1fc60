# Tree Combinatorics
# Trees, canonical codes, automorphism counts and the enumerators for every tree species

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product
from math import factorial
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from treesums.algebra import TreeSumsError

logger = logging.getLogger(__name__)

EdgeLabel = Callable[[int, int], str]


class EnumerationBudgetExceeded(TreeSumsError):
    """An enumeration would exceed its configured vertex or degree cap."""


@dataclass(frozen=True)
class Tree:
    """Finite tree on vertices 0..vertex_count-1.

    Edges are stored as sorted (u, v) pairs with u < v.
    """

    vertex_count: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("a tree needs at least one vertex")
        normalized = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) leaves the vertex range")
            normalized.append((min(u, v), max(u, v)))
        normalized.sort()
        if len(set(normalized)) != len(normalized):
            raise ValueError("duplicate edge")
        if len(normalized) != self.vertex_count - 1:
            raise ValueError(f"{self.vertex_count} vertices need {self.vertex_count - 1} edges")
        object.__setattr__(self, "edges", tuple(normalized))
        if not self._connected():
            raise ValueError("tree is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        neighbours: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            neighbours[u].append(v)
            neighbours[v].append(u)
        return tuple(tuple(sorted(n)) for n in neighbours)

    def valency(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def valencies(self) -> Tuple[int, ...]:
        return tuple(len(n) for n in self.adjacency)

    def leaves(self) -> List[int]:
        """Vertices of valency 1 (ends)."""
        return [v for v, n in enumerate(self.adjacency) if len(n) == 1]

    def interior_vertices(self) -> List[int]:
        return [v for v, n in enumerate(self.adjacency) if len(n) != 1]

    def bivalent_count(self) -> int:
        return sum(1 for n in self.adjacency if len(n) == 2)

    def flags(self) -> List[Tuple[int, int]]:
        """(vertex, edge index) incidences."""
        result = []
        for index, (u, v) in enumerate(self.edges):
            result.append((u, index))
            result.append((v, index))
        return sorted(result)

    def edge_index(self, u: int, v: int) -> int:
        return self.edges.index((min(u, v), max(u, v)))

    def relabel(self, permutation: Sequence[int]) -> "Tree":
        """Move vertex v to permutation[v]."""
        return Tree(self.vertex_count, tuple((permutation[u], permutation[v]) for u, v in self.edges))

    def to_json(self) -> dict:
        return {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "Tree":
        return cls(int(data["vertex_count"]), tuple(tuple(e) for e in data["edges"]))


def single_vertex() -> Tree:
    return Tree(1, ())


def star(leaf_count: int) -> Tree:
    """Centre 0 joined to leaf_count ends."""
    return Tree(leaf_count + 1, tuple((0, i) for i in range(1, leaf_count + 1)))


def path(vertex_count: int) -> Tree:
    return Tree(vertex_count, tuple((i, i + 1) for i in range(vertex_count - 1)))


# --- canonical forms ---

def _unlabeled(_: int, __: int = 0) -> str:
    return ""


def symmetric_edge_labels(tree: Tree, labels: Sequence) -> EdgeLabel:
    """Edge labels aligned with ``tree.edges``, read the same in both directions."""
    table = {edge: str(label) for edge, label in zip(tree.edges, labels)}

    def label(u: int, v: int) -> str:
        return table[(min(u, v), max(u, v))]

    return label


def oriented_edge_labels(arcs: Sequence[Tuple[int, int]]) -> EdgeLabel:
    """'>' along an arc and '<' against it."""
    forward = set(arcs)

    def label(u: int, v: int) -> str:
        return ">" if (u, v) in forward else "<"

    return label


def centroids(tree: Tree) -> List[int]:
    """The one or two vertices minimizing the largest remaining component."""
    n = tree.vertex_count
    parent = [-1] * n
    order = [0]
    for v in order:
        for w in tree.adjacency[v]:
            if w != parent[v] and w != 0:
                parent[w] = v
                order.append(w)
    size = [1] * n
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    result = []
    for v in range(n):
        largest = n - size[v]
        for w in tree.adjacency[v]:
            if w != parent[v]:
                largest = max(largest, size[w])
        if 2 * largest <= n:
            result.append(v)
    return result


def _rooted_code(tree: Tree, root: int, blocked: int, vertex_label: Callable[[int], str],
                 edge_label: EdgeLabel) -> Tuple[str, int]:
    """AHU code and automorphism count of the branch at ``root`` away from ``blocked``."""
    parent = {root: blocked}
    order = [root]
    for v in order:
        for w in tree.adjacency[v]:
            if w != parent[v]:
                parent[w] = v
                order.append(w)
    codes: Dict[int, str] = {}
    auts: Dict[int, int] = {}
    for v in reversed(order):
        keys = sorted(
            (edge_label(v, w) + codes[w], w) for w in tree.adjacency[v] if w != parent[v]
        )
        aut = 1
        run = 0
        for i, (key, child) in enumerate(keys):
            aut *= auts[child]
            run += 1
            if i + 1 == len(keys) or keys[i + 1][0] != key:
                aut *= factorial(run)
                run = 0
        codes[v] = "(" + vertex_label(v) + ":" + "".join(key for key, _ in keys) + ")"
        auts[v] = aut
    return codes[root], auts[root]


def _canonical(tree: Tree, vertex_labels: Optional[Sequence] = None,
               edge_label: Optional[EdgeLabel] = None) -> Tuple[str, int]:
    if vertex_labels is not None and len(vertex_labels) != tree.vertex_count:
        raise ValueError("one vertex label per vertex required")
    vlabel = (lambda v: str(vertex_labels[v])) if vertex_labels is not None else (lambda v: "")
    elabel = edge_label or _unlabeled
    centres = centroids(tree)
    if len(centres) == 1:
        return _rooted_code(tree, centres[0], -1, vlabel, elabel)
    a, b = centres
    code_a, aut_a = _rooted_code(tree, a, b, vlabel, elabel)
    code_b, aut_b = _rooted_code(tree, b, a, vlabel, elabel)
    forward = code_a + "|" + elabel(a, b) + "|" + code_b
    backward = code_b + "|" + elabel(b, a) + "|" + code_a
    aut = aut_a * aut_b
    if forward == backward:
        aut *= 2
    return "[" + min(forward, backward) + "]", aut


def canonical_code(tree: Tree, vertex_labels: Optional[Sequence] = None,
                   edge_label: Optional[EdgeLabel] = None) -> str:
    """String equal for two trees iff they are isomorphic with their decorations."""
    return _canonical(tree, vertex_labels, edge_label)[0]


def aut_order(tree: Tree, vertex_labels: Optional[Sequence] = None,
              edge_label: Optional[EdgeLabel] = None) -> int:
    """Order of the automorphism group preserving the supplied decorations."""
    return _canonical(tree, vertex_labels, edge_label)[1]


# --- unlabeled trees ---

Shape = tuple


@lru_cache(maxsize=None)
def _rooted_shapes(size: int) -> Tuple[Shape, ...]:
    """Rooted unlabeled trees with ``size`` vertices as nested sorted tuples."""
    if size == 1:
        return ((),)
    return _forests(size - 1, size - 1, len(_rooted_shapes(size - 1)) - 1)


@lru_cache(maxsize=None)
def _forests(total: int, max_size: int, max_index: int) -> Tuple[Tuple[Shape, ...], ...]:
    """Multisets of rooted shapes of total size ``total``, keys non-increasing.

    Each shape is keyed by (size, index in _rooted_shapes(size)); no key may
    exceed (max_size, max_index).
    """
    if total == 0:
        return ((),)
    result = []
    for size in range(min(total, max_size), 0, -1):
        shapes = _rooted_shapes(size)
        top = max_index if size == max_size else len(shapes) - 1
        for index in range(min(top, len(shapes) - 1), -1, -1):
            for rest in _forests(total - size, size, index):
                result.append((shapes[index],) + rest)
    return tuple(result)


def _shape_edges(shape: Shape, root: int, next_id: int, edges: list) -> int:
    for child in shape:
        child_id = next_id
        edges.append((root, child_id))
        next_id = _shape_edges(child, child_id, next_id + 1, edges)
    return next_id


def _shape_tree(shape: Shape) -> Tree:
    edges: list = []
    count = _shape_edges(shape, 0, 1, edges)
    return Tree(count, tuple(edges))


@lru_cache(maxsize=None)
def _trees_of_size(vertex_count: int) -> Tuple[Tree, ...]:
    trees: List[Tree] = []
    # one centroid: every branch has fewer than half of the vertices
    half = (vertex_count - 1) // 2
    if vertex_count == 1:
        trees.append(single_vertex())
    elif half >= 1:
        for forest in _forests(vertex_count - 1, half, len(_rooted_shapes(half)) - 1):
            trees.append(_shape_tree(forest))
    # two centroids joined by an edge, each half carrying exactly half of the vertices
    if vertex_count % 2 == 0:
        shapes = _rooted_shapes(vertex_count // 2)
        for i in range(len(shapes)):
            for j in range(i, len(shapes)):
                edges: list = []
                split = _shape_edges(shapes[i], 0, 1, edges)
                _shape_edges(shapes[j], split, split + 1, edges)
                edges.append((0, split))
                trees.append(Tree(vertex_count, tuple(edges)))
    trees.sort(key=canonical_code)
    logger.debug(f"enumerated {len(trees)} unlabeled trees with {vertex_count} vertices")
    return tuple(trees)


def enumerate_trees(vertex_count: int) -> List[Tree]:
    """All unlabeled trees with ``vertex_count`` vertices, one per isomorphism class."""
    if vertex_count < 1:
        raise ValueError("vertex_count must be positive")
    return list(_trees_of_size(vertex_count))


def enumerate_trees_up_to(max_vertices: int, max_leaves: Optional[int] = None,
                          max_bivalent: Optional[int] = None) -> Iterator[Tree]:
    """Unlabeled trees with at most ``max_vertices`` vertices, smallest first."""
    for size in range(1, max_vertices + 1):
        for tree in _trees_of_size(size):
            if max_leaves is not None and len(tree.leaves()) > max_leaves:
                continue
            if max_bivalent is not None and tree.bivalent_count() > max_bivalent:
                continue
            yield tree


# --- marked stable trees ---

@dataclass(frozen=True)
class MarkedStableTree:
    """Stable tree whose ends carry the markings 1..n.

    ``leaf_labels`` holds (vertex, marking) pairs sorted by vertex.
    """

    tree: Tree
    leaf_labels: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if any(valency == 2 for valency in self.tree.valencies):
            raise ValueError("stable trees have no vertex of valency 2")
        labelled = sorted(v for v, _ in self.leaf_labels)
        if labelled != self.tree.leaves():
            raise ValueError("every end, and only the ends, must be marked")
        markings = sorted(label for _, label in self.leaf_labels)
        if markings != list(range(1, len(markings) + 1)):
            raise ValueError("markings must be a bijection onto 1..n")
        object.__setattr__(self, "leaf_labels", tuple(sorted(self.leaf_labels)))

    @property
    def n(self) -> int:
        return len(self.leaf_labels)

    def interior_valencies(self) -> List[int]:
        return [self.tree.valency(v) for v in self.tree.interior_vertices()]

    def marking_of(self) -> Dict[int, int]:
        return dict(self.leaf_labels)

    def canonical_code(self) -> str:
        markings = self.marking_of()
        return canonical_code(self.tree, [markings.get(v, "") for v in range(self.tree.vertex_count)])

    def to_json(self) -> dict:
        data = self.tree.to_json()
        data["leaf_labels"] = {str(v): label for v, label in self.leaf_labels}
        return data


def set_partitions(items: Sequence[int]) -> Iterator[List[Tuple[int, ...]]]:
    """Every partition of ``items`` into non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [(first,)] + partition
        for i, block in enumerate(partition):
            yield partition[:i] + [(first,) + block] + partition[i + 1:]


@lru_cache(maxsize=None)
def _planted_forms(block: Tuple[int, ...]) -> Tuple[object, ...]:
    """Planted stable trees on ``block``: a marking, or a tuple of at least two sub-forms."""
    if len(block) == 1:
        return (block[0],)
    forms = []
    for partition in set_partitions(block):
        if len(partition) < 2:
            continue
        parts = sorted(tuple(sorted(part)) for part in partition)
        for combo in product(*(_planted_forms(part) for part in parts)):
            forms.append(tuple(combo))
    return tuple(forms)


def _form_edges(form, parent: int, n: int, next_id: int, edges: list) -> int:
    if isinstance(form, int):
        edges.append((parent, form - 1))
        return next_id
    vertex = next_id
    edges.append((parent, vertex))
    next_id += 1
    for child in form:
        next_id = _form_edges(child, vertex, n, next_id, edges)
    return next_id


def enumerate_marked_stable(n: int) -> List[MarkedStableTree]:
    """Isomorphism classes of stable trees with n marked ends.

    Vertices 0..n-1 are the ends, vertex i carrying marking i+1; interior
    vertices follow.
    """
    if n < 3:
        raise ValueError("marked stable trees need n >= 3")
    result = []
    for form in _planted_forms(tuple(range(1, n))):
        edges: list = []
        count = _form_edges(form, n - 1, n, n, edges)
        tree = Tree(count, tuple(edges))
        result.append(MarkedStableTree(tree, tuple((v, v + 1) for v in range(n))))
    logger.debug(f"enumerated {len(result)} marked stable trees for n={n}")
    return result


def enumerate_stable_shapes(n: int) -> List[Tree]:
    """Unmarked stable trees with n ends."""
    if n < 3:
        raise ValueError("stable trees need n >= 3")
    return [
        tree
        for tree in enumerate_trees_up_to(2 * n - 2, max_leaves=n, max_bivalent=0)
        if len(tree.leaves()) == n and tree.vertex_count > n
    ]


# --- nests and admissible trees ---

def _nest_key(subset: FrozenSet[int]) -> Tuple[int, Tuple[int, ...]]:
    return (-len(subset), tuple(sorted(subset)))


@dataclass(frozen=True)
class Nest:
    """Laminar family of subsets of {1..n}, each of size at least two."""

    n: int
    subsets: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        members = [frozenset(s) for s in self.subsets]
        universe = frozenset(range(1, self.n + 1))
        for s in members:
            if len(s) < 2:
                raise ValueError(f"nest member {sorted(s)} has fewer than two elements")
            if not s <= universe:
                raise ValueError(f"nest member {sorted(s)} is not inside 1..{self.n}")
        if len(set(members)) != len(members):
            raise ValueError("duplicate nest member")
        for a, b in combinations(members, 2):
            if not (a <= b or b <= a or not (a & b)):
                raise ValueError(f"members {sorted(a)} and {sorted(b)} overlap")
        object.__setattr__(self, "subsets", tuple(sorted(members, key=_nest_key)))

    @property
    def universe(self) -> FrozenSet[int]:
        return frozenset(range(1, self.n + 1))

    @property
    def whole(self) -> bool:
        return self.universe in self.subsets

    @property
    def broken(self) -> bool:
        return not self.whole

    def completed(self) -> "Nest":
        """The nest with {1..n} added."""
        if self.whole:
            return self
        return Nest(self.n, self.subsets + (self.universe,))

    def to_json(self) -> dict:
        return {"n": self.n, "subsets": [sorted(s) for s in self.subsets], "whole": self.whole}


def enumerate_nests(n: int) -> List[Nest]:
    """All n-nests, the empty one included, by backtracking over compatible subsets."""
    if n < 2:
        raise ValueError("nests need n >= 2")
    candidates = [
        frozenset(c)
        for size in range(n, 1, -1)
        for c in combinations(range(1, n + 1), size)
    ]
    result: List[Nest] = []

    def extend(start: int, chosen: List[FrozenSet[int]]) -> None:
        result.append(Nest(n, tuple(chosen)))
        for i in range(start, len(candidates)):
            candidate = candidates[i]
            if all(candidate <= s or s <= candidate or not (candidate & s) for s in chosen):
                chosen.append(candidate)
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    result.sort(key=lambda nest: (len(nest.subsets), [_nest_key(s) for s in nest.subsets]))
    logger.debug(f"enumerated {len(result)} nests for n={n}")
    return result


@dataclass(frozen=True)
class AdmissibleTree:
    """Oriented marked tree with a single source.

    ``arcs`` are (tail, head) pairs; ``broken`` records that the source stands
    for {1..n} without {1..n} being a member of the nest.
    """

    tree: Tree
    arcs: Tuple[Tuple[int, int], ...]
    leaf_labels: Tuple[Tuple[int, int], ...]
    broken: bool = False

    def __post_init__(self):
        arcs = tuple(sorted(self.arcs))
        if sorted((min(u, v), max(u, v)) for u, v in arcs) != list(self.tree.edges):
            raise ValueError("arcs must orient exactly the edges of the tree")
        indegree = [0] * self.tree.vertex_count
        for _, head in arcs:
            indegree[head] += 1
        sources = [v for v, d in enumerate(indegree) if d == 0]
        if len(sources) != 1:
            raise ValueError("an admissible tree has exactly one source")
        if any(d > 1 for d in indegree):
            raise ValueError("every vertex except the source has exactly one incoming edge")
        source = sources[0]
        if self.tree.valency(source) < 2:
            raise ValueError("the source needs at least two outgoing edges")
        ends = [v for v in range(self.tree.vertex_count) if v != source and self.tree.valency(v) == 1]
        for v in range(self.tree.vertex_count):
            if v != source and v not in ends and self.tree.valency(v) < 3:
                raise ValueError("interior vertices other than the source need valency >= 3")
        if sorted(v for v, _ in self.leaf_labels) != ends:
            raise ValueError("every end, and only the ends, must be marked")
        if sorted(label for _, label in self.leaf_labels) != list(range(1, len(ends) + 1)):
            raise ValueError("markings must be a bijection onto 1..n")
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "leaf_labels", tuple(sorted(self.leaf_labels)))

    @property
    def n(self) -> int:
        return len(self.leaf_labels)

    @cached_property
    def source(self) -> int:
        heads = {head for _, head in self.arcs}
        return next(v for v in range(self.tree.vertex_count) if v not in heads)

    @property
    def source_degree(self) -> int:
        return self.tree.valency(self.source)

    def children(self, v: int) -> List[int]:
        return [head for tail, head in self.arcs if tail == v]

    def interior_valencies(self) -> List[int]:
        """Valencies of the interior vertices other than the source."""
        marked = {v for v, _ in self.leaf_labels}
        return [
            self.tree.valency(v)
            for v in range(self.tree.vertex_count)
            if v != self.source and v not in marked
        ]

    def canonical_code(self) -> str:
        markings = dict(self.leaf_labels)
        labels = [markings.get(v, "s" if v == self.source else "") for v in range(self.tree.vertex_count)]
        return canonical_code(self.tree, labels, oriented_edge_labels(self.arcs))


def nest_to_tree(nest: Nest) -> AdmissibleTree:
    """Containment tree of the completed nest plus the singletons.

    Vertex 0 is {1..n}, then the other members by decreasing size, then the
    singletons {1}..{n}.
    """
    completed = nest.completed()
    members = [s for s in completed.subsets if s != completed.universe]
    nodes = [completed.universe] + members + [frozenset({i}) for i in range(1, nest.n + 1)]
    arcs = []
    for child_index in range(1, len(nodes)):
        child = nodes[child_index]
        parent_index = min(
            (i for i in range(len(nodes)) if i != child_index and child < nodes[i]),
            key=lambda i: len(nodes[i]),
        )
        arcs.append((parent_index, child_index))
    tree = Tree(len(nodes), tuple(arcs))
    first_leaf = 1 + len(members)
    labels = tuple((first_leaf + i, i + 1) for i in range(nest.n))
    return AdmissibleTree(tree, tuple(arcs), labels, broken=nest.broken)


def tree_to_nest(admissible: AdmissibleTree) -> Nest:
    """Sets of markings below each non-end vertex; the source gives {1..n}."""
    markings = dict(admissible.leaf_labels)
    below: Dict[int, FrozenSet[int]] = {}

    def collect(v: int) -> FrozenSet[int]:
        if v in markings:
            return frozenset({markings[v]})
        result = frozenset().union(*(collect(w) for w in admissible.children(v)))
        below[v] = result
        return result

    collect(admissible.source)
    subsets = tuple(below.values())
    if admissible.broken:
        universe = frozenset(range(1, admissible.n + 1))
        subsets = tuple(s for s in subsets if s != universe)
    return Nest(admissible.n, subsets)


# --- covering trees ---

@dataclass(frozen=True)
class CoveringTree:
    """Tree with vertices coloured 1 or 2 and positive degrees on the edges.

    ``degrees`` is aligned with ``tree.edges``.
    """

    tree: Tree
    colors: Tuple[int, ...]
    degrees: Tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.tree.vertex_count:
            raise ValueError("one colour per vertex required")
        if len(self.degrees) != len(self.tree.edges):
            raise ValueError("one degree per edge required")
        if any(c not in (1, 2) for c in self.colors):
            raise ValueError("colours are 1 or 2")
        if any(d < 1 for d in self.degrees):
            raise ValueError("edge degrees are positive")
        for u, v in self.tree.edges:
            if self.colors[u] == self.colors[v]:
                raise ValueError(f"neighbours {u} and {v} share a colour")

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def color2_count(self) -> int:
        """Number of vertices coloured 2."""
        return sum(1 for c in self.colors if c == 2)

    def flag_count(self, color: int) -> int:
        """Number of flags at vertices of the given colour."""
        return sum(self.tree.valency(v) for v, c in enumerate(self.colors) if c == color)

    def sigma(self, v: int) -> int:
        """Sum of the degrees of the edges at v."""
        return sum(d for (a, b), d in zip(self.tree.edges, self.degrees) if v in (a, b))

    def w(self, color: int) -> int:
        return sum(self.tree.valency(v) - 1 for v, c in enumerate(self.colors) if c == color)

    def canonical_code(self) -> str:
        return canonical_code(self.tree, self.colors, symmetric_edge_labels(self.tree, self.degrees))

    def aut_order(self) -> int:
        return aut_order(self.tree, self.colors, symmetric_edge_labels(self.tree, self.degrees))

    def to_json(self) -> dict:
        data = self.tree.to_json()
        data["colors"] = list(self.colors)
        data["degrees"] = list(self.degrees)
        return data


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def proper_coloring(tree: Tree, root_color: int) -> Tuple[int, ...]:
    colors = [0] * tree.vertex_count
    colors[0] = root_color
    stack = [0]
    while stack:
        v = stack.pop()
        for w in tree.adjacency[v]:
            if not colors[w]:
                colors[w] = 3 - colors[v]
                stack.append(w)
    return tuple(colors)


def enumerate_covering_trees(d: int, max_vertices: Optional[int] = None) -> List[CoveringTree]:
    """Decorated isomorphism classes of covering trees of total degree d."""
    if d < 1:
        raise ValueError("d must be positive")
    if max_vertices is not None and d + 1 > max_vertices:
        raise EnumerationBudgetExceeded(f"degree {d} needs trees with up to {d + 1} vertices")
    classes: Dict[str, CoveringTree] = {}
    for vertex_count in range(2, d + 2):
        for tree in _trees_of_size(vertex_count):
            for degrees in compositions(d, vertex_count - 1):
                for root_color in (1, 2):
                    covering = CoveringTree(tree, proper_coloring(tree, root_color), degrees)
                    classes.setdefault(covering.canonical_code(), covering)
    logger.debug(f"enumerated {len(classes)} covering trees of degree {d}")
    return [classes[code] for code in sorted(classes)]
