#!/usr/bin/env python3
"""
================================================================
🌿 DENDRITE PARAM - Dendrites T_m and the Hölder surjection F
Model dendrites, the trees T_m, 2-to-1 tours, the nested interval
families (E, N, F) with word labels, f_m, ζ and F = f ∘ ζ^{-1}
================================================================

Stages are ordered piece lists over [0, 1]. Piece i starts at
starts[i] and ends where piece i+1 starts. N and F pieces are closed
and map to one vertex, E pieces are open and run linearly along one
edge of T_m. Closed and open pieces alternate, starting and ending
closed.

Payloads (lattice points are depth-d integer corners):
    N  (word, a, b)                  d = stage depth
    F  (a, b, d)                     frozen at the depth it was created
    E  (word, a, b, side, sign)      edge from (a, b) along side 'b' (x)
                                     or 'l' (y); sign -1 runs backwards
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from carpet import (
    DEFAULT_CELL_BUDGET, CarpetApprox, alpha, level_models, letter_at,
    model_dendrite_edges, model_offsets, refine_level,
)
from setops import Point
from symbolic import ChoiceFunction, Word
from workbench_errors import BudgetExceededError, DomainError, InvariantViolation

logger = logging.getLogger(__name__)

Vertex = Tuple[int, int]
EdgeKey = Tuple[Word, str]

ORIGIN: Vertex = (0, 0)


# ----------------------------------------------------------------------
# Dendrites
# ----------------------------------------------------------------------

@dataclass
class DendriteGraph:
    """Lattice tree at depth `depth`: vertices are cell corners, edges unit segments"""
    n: int
    depth: int
    vertices: np.ndarray
    edges: np.ndarray
    approx: Optional[CarpetApprox] = None

    @property
    def scale(self) -> Fraction:
        return Fraction(1, self.n ** self.depth)

    def edge_list(self) -> List[Tuple[Vertex, Vertex]]:
        return [((a, b), (c, d)) for (a, b), (c, d) in self.edges.tolist()]

    def _vertex_index(self, points: np.ndarray) -> np.ndarray:
        side = int(max(self.vertices.max(initial=0), self.edges.max(initial=0))) + 2
        keys = self.vertices[:, 0] * side + self.vertices[:, 1]
        order = np.argsort(keys)
        wanted = points[:, 0] * side + points[:, 1]
        pos = np.searchsorted(keys[order], wanted)
        pos = np.minimum(pos, len(keys) - 1)
        found = keys[order][pos] == wanted
        if not found.all():
            missing = points[~found][0].tolist()
            raise InvariantViolation("dendrite", f"edge endpoint {missing} is not a vertex")
        return order[pos]

    def degrees(self) -> Tuple[np.ndarray, np.ndarray]:
        """(in-degree, out-degree) with edges oriented up/right"""
        count = self.vertices.shape[0]
        if not self.edges.size:
            return np.zeros(count, dtype=np.int64), np.zeros(count, dtype=np.int64)
        start = self._vertex_index(self.edges[:, 0])
        end = self._vertex_index(self.edges[:, 1])
        return np.bincount(end, minlength=count), np.bincount(start, minlength=count)

    def leaves(self) -> List[Vertex]:
        indeg, outdeg = self.degrees()
        mask = (indeg + outdeg) == 1
        return sorted(map(tuple, self.vertices[mask].tolist()))

    def check_tree(self) -> None:
        """Connected and acyclic via union-find and edge count; leaves have no up/right edge"""
        count = self.vertices.shape[0]
        if self.edges.shape[0] != count - 1:
            raise InvariantViolation(
                "dendrite", f"{self.edges.shape[0]} edges on {count} vertices is not a tree",
            )
        if not self.edges.size:
            return
        start = self._vertex_index(self.edges[:, 0])
        end = self._vertex_index(self.edges[:, 1])
        components = DisjointSet(range(count))
        for u, v in zip(start.tolist(), end.tolist()):
            if not components.merge(u, v):
                raise InvariantViolation("dendrite", "cycle in dendrite graph")
        if components.n_subsets != 1:
            raise InvariantViolation("dendrite", f"{components.n_subsets} components")

        indeg, outdeg = self.degrees()
        leaf = (indeg + outdeg) == 1
        origin_row = self._vertex_index(np.array([ORIGIN]))[0]
        no_out = outdeg == 0
        no_out[origin_row] = False
        if not np.array_equal(leaf, no_out):
            raise InvariantViolation("dendrite", "a leaf has an edge running up or right")

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(map(tuple, self.vertices.tolist()))
        graph.add_edges_from(self.edge_list())
        return graph

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "depth": self.depth,
            "vertices": sorted(self.vertices.tolist()),
            "edges": sorted(self.edges.tolist()),
            "leaves": [list(v) for v in self.leaves()],
        }


def _edge_array(edges: List[Tuple[Vertex, Vertex]]) -> np.ndarray:
    if not edges:
        return np.zeros((0, 2, 2), dtype=np.int64)
    return np.array(edges, dtype=np.int64).reshape(-1, 2, 2)


def build_model_dendrite(n: int, model: int) -> DendriteGraph:
    """T^model at scale 1/n"""
    edges = _edge_array(model_dendrite_edges(n, model))
    vertices = np.unique(edges.reshape(-1, 2), axis=0)
    graph = DendriteGraph(n, 1, vertices, edges)
    graph.check_tree()
    if vertices.min() < 0 or vertices.max() > n - 1:
        raise InvariantViolation("dendrite", "T^model leaves [0,1)^2")
    offsets = {tuple(c) for c in model_offsets(n, model).tolist()}
    if set(map(tuple, vertices.tolist())) != offsets:
        raise InvariantViolation("dendrite", "vertices of T^model are not the cell corners")
    return graph


def model_leaves(n: int, model: int) -> Dict[str, Vertex]:
    bump_row = 2 if model == 1 else 1
    return {
        "top": (n - 1, n - 1),
        "bump": (n // 2 - 1, bump_row),
        "middle": (n - 2, 1),
        "right": (n - 1, n - 2),
    }


def _subdivide_edges(edges: np.ndarray, n: int) -> np.ndarray:
    """Each edge at depth m becomes n unit edges at depth m+1"""
    if not edges.size:
        return edges
    direction = edges[:, 1] - edges[:, 0]
    base = n * edges[:, 0]
    starts = np.concatenate([base + k * direction for k in range(n)])
    steps = np.tile(direction, (n, 1))
    return np.stack([starts, starts + steps], axis=1)


def build_Tm(eta: ChoiceFunction, n: int, m: int, budget: int = DEFAULT_CELL_BUDGET) -> DendriteGraph:
    """T_{i+1} = T_i ∪ ⋃_{|w|=i} φ_w(T^{η(w)}), as a lattice tree at depth m"""
    if m < 0:
        raise DomainError("depth must be nonnegative")
    if (5 * n - 6) ** m > budget:
        raise BudgetExceededError(f"T_{m}", (5 * n - 6) ** m, budget)
    templates = {model: _edge_array(model_dendrite_edges(n, model)) for model in (1, 2)}
    words = np.zeros((1, 0), dtype=np.int16)
    corners = np.zeros((1, 2), dtype=np.int64)
    edges = np.zeros((0, 2, 2), dtype=np.int64)
    for _ in range(m):
        models = level_models(eta, words)
        parts = [_subdivide_edges(edges, n)]
        for model in (1, 2):
            chosen = corners[models == model]
            if chosen.size:
                parts.append(((n * chosen)[:, None, None, :] + templates[model][None]).reshape(-1, 2, 2))
        edges = np.unique(np.concatenate(parts).reshape(-1, 4), axis=0).reshape(-1, 2, 2)
        words, corners = refine_level(eta, n, words, corners, models)
    approx = CarpetApprox(n, m, words, corners, eta)
    graph = DendriteGraph(n, m, corners, edges, approx)
    graph.check_tree()
    logger.debug(f"✅ T_{m}: {corners.shape[0]} vertices, {edges.shape[0]} edges")
    return graph


def classify_edges(graph: DendriteGraph) -> Dict[Tuple[Vertex, Vertex], EdgeKey]:
    """Each edge is φ_w(e_b) or φ_w(e_l) for the cell w cornered at its lower-left end"""
    if graph.approx is None:
        raise DomainError("classify_edges needs a graph built by build_Tm")
    labels: Dict[Tuple[Vertex, Vertex], EdgeKey] = {}
    seen: Set[EdgeKey] = set()
    for p, q in graph.edge_list():
        word = graph.approx.word_at(p)
        if word is None:
            raise InvariantViolation("edge-label", f"edge {p}-{q} has no cell at its lower-left end")
        side = 'b' if p[1] == q[1] else 'l'
        key = (word, side)
        if key in seen:
            raise InvariantViolation("edge-label", f"two edges share the label {key}")
        seen.add(key)
        labels[(p, q)] = key
    return labels


# ----------------------------------------------------------------------
# Tours
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TourItem:
    """A vertex pause or one traversal of an edge given by its lower-left end"""
    kind: str
    vertex: Vertex
    side: Optional[str] = None
    sign: int = 0
    width: int = 1


@dataclass
class TourPlan:
    n: int
    model: int
    extended: bool
    items: List[TourItem]
    marks: Dict[str, int]
    leaves: Dict[str, Vertex]

    @property
    def total_width(self) -> int:
        return sum(item.width for item in self.items)

    def position(self, index: int) -> Fraction:
        """Parameter where item `index` starts"""
        return Fraction(sum(item.width for item in self.items[:index]), self.total_width)

    def pause_indices(self, vertex: Vertex) -> List[int]:
        return [i for i, item in enumerate(self.items) if item.kind == 'pause' and item.vertex == vertex]

    @property
    def t(self) -> Fraction:
        """Middle origin pause: its midpoint for τ, its (zero-width) position for τ̃"""
        index = self.marks["t"]
        width = self.items[index].width
        return self.position(index) + Fraction(width, 2 * self.total_width)

    def leaf_parameter(self, name: str) -> Fraction:
        index = self.pause_indices(self.leaves[name])[0]
        return self.position(index) + Fraction(self.items[index].width, 2 * self.total_width)

    def parameters(self) -> Dict[str, Fraction]:
        out = {"t": self.t}
        for name in ("s_U", "s_L"):
            if name in self.marks:
                out[name] = self.position(self.marks[name])
        for name in self.leaves:
            out["leaf_" + name] = self.leaf_parameter(name)
        return out

    def check(self) -> None:
        """Every edge twice in opposite directions; pause counts match valences; τ̃ ordering"""
        traversals: Dict[Tuple[Vertex, str], List[int]] = {}
        for item in self.items:
            if item.kind == 'edge':
                traversals.setdefault((item.vertex, item.side), []).append(item.sign)
        if any(sorted(signs) != [-1, 1] for signs in traversals.values()):
            raise InvariantViolation("tour", "an edge is not traversed exactly twice")

        graph = build_model_dendrite(self.n, self.model).to_networkx()
        for vertex in graph.nodes:
            pauses = len(self.pause_indices(vertex))
            expected = graph.degree(vertex) + (1 if vertex == ORIGIN else 0)
            if self.extended and vertex in ((0, self.n - 1), (self.n - 1, 0)):
                expected += 1
            if pauses != expected:
                raise InvariantViolation("tour", f"vertex {vertex} paused {pauses} times, valence says {expected}")

        if self.extended:
            p = self.parameters()
            chain = [Fraction(0), p["leaf_top"], p["s_U"], p["leaf_bump"], p["t"],
                     p["leaf_middle"], p["s_L"], p["leaf_right"], Fraction(1)]
            if any(a >= b for a, b in zip(chain, chain[1:])):
                raise InvariantViolation("tour", f"extended tour order broken: {[str(c) for c in chain]}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "model": self.model,
            "extended": self.extended,
            "total_width": self.total_width,
            "parameters": {k: str(v) for k, v in sorted(self.parameters().items())},
        }


def build_tour(n: int, model: int, extended: bool = False) -> TourPlan:
    """
    Depth-first 2-to-1 tour of T^model from the origin, children up
    before right. The extended tour adds edges to (0, n) and (n, 0);
    the one at (0, n-1) is taken last, the one at (n-1, 0) first, and
    the origin and both new endpoints get zero-width pauses.
    """
    edge_set = set(model_dendrite_edges(n, model))
    top_left, bottom_right = (0, n - 1), (n - 1, 0)
    ends = {(0, n), (n, 0)}
    items: List[TourItem] = []
    marks: Dict[str, int] = {}
    origin_pauses: List[int] = []

    def children(v: Vertex) -> List[Vertex]:
        kids = [u for u in ((v[0], v[1] + 1), (v[0] + 1, v[1])) if (v, u) in edge_set]
        if extended and v == top_left:
            kids.append((0, n))
        if extended and v == bottom_right:
            kids.insert(0, (n, 0))
        return kids

    def pause(v: Vertex) -> None:
        if v == ORIGIN:
            origin_pauses.append(len(items))
        if v == (0, n):
            marks["s_U"] = len(items)
        if v == (n, 0):
            marks["s_L"] = len(items)
        zero = extended and (v == ORIGIN or v in ends)
        items.append(TourItem('pause', v, width=0 if zero else 1))

    def visit(v: Vertex) -> None:
        pause(v)
        for u in children(v):
            side = 'l' if u[0] == v[0] else 'b'
            items.append(TourItem('edge', v, side, 1))
            visit(u)
            items.append(TourItem('edge', v, side, -1))
            pause(v)

    visit(ORIGIN)
    marks["t"] = origin_pauses[1]
    plan = TourPlan(n, model, extended, items, marks, model_leaves(n, model))
    plan.check()
    return plan


@dataclass(frozen=True)
class _Template:
    """Designated entries of one tour range: ('N'|'F', o) or ('E', o, side, sign)"""
    entries: Tuple[Tuple[Any, ...], ...]

    @property
    def n_count(self) -> int:
        return sum(1 for e in self.entries if e[0] == 'N')


def _designate(*ranges: List[TourItem]) -> List[_Template]:
    """First pause of each vertex across the ranges is N, later ones F"""
    seen: Set[Vertex] = set()
    out = []
    for items in ranges:
        entries = []
        for item in items:
            if item.width == 0:
                continue
            if item.kind == 'pause':
                entries.append(('F' if item.vertex in seen else 'N', item.vertex))
                seen.add(item.vertex)
            else:
                entries.append(('E', item.vertex, item.side, item.sign))
        out.append(_Template(tuple(entries)))
    return out


@lru_cache(maxsize=None)
def tour_templates(n: int, model: int) -> Dict[str, _Template]:
    """Subdivision templates for N pieces (cases) and E pieces (by side and direction)"""
    tau = build_tour(n, model, extended=False)
    mid = tau.marks["t"]
    ext = build_tour(n, model, extended=True)
    s_up, t_ext, s_low = ext.marks["s_U"], ext.marks["t"], ext.marks["s_L"]
    items = ext.items
    l_up, l_down = _designate(items[:s_up], items[s_up:t_ext])
    b_right, b_left = _designate(items[t_ext:s_low], items[s_low:])
    return {
        "right_only": _designate(tau.items[:mid + 1])[0],
        "up_only": _designate(tau.items[mid:])[0],
        "leaf": _designate(tau.items)[0],
        ("l", 1): l_up,
        ("l", -1): l_down,
        ("b", 1): b_right,
        ("b", -1): b_left,
    }


# ----------------------------------------------------------------------
# Interval families
# ----------------------------------------------------------------------

@dataclass
class Stage:
    depth: int
    starts: List[Fraction]
    kinds: List[str]
    payloads: List[Tuple[Any, ...]]

    def __len__(self) -> int:
        return len(self.starts)

    def end(self, i: int) -> Fraction:
        return self.starts[i + 1] if i + 1 < len(self.starts) else Fraction(1)

    def edge_keys(self) -> Set[EdgeKey]:
        return {(p[0], p[3]) for k, p in zip(self.kinds, self.payloads) if k == 'E'}

    def counts(self) -> Dict[str, int]:
        out = {"N": 0, "E": 0, "F": 0}
        for kind in self.kinds:
            out[kind] += 1
        return out

    def locate(self, t: Fraction) -> int:
        if not 0 <= t <= 1:
            raise DomainError(f"parameter {t} outside [0, 1]")
        return bisect_right(self.starts, t) - 1

    def value(self, n: int, i: int, t: Fraction) -> Point:
        kind, p = self.kinds[i], self.payloads[i]
        if kind == 'F':
            scale = Fraction(1, n ** p[2])
            return (p[0] * scale, p[1] * scale)
        scale = Fraction(1, n ** self.depth)
        if kind == 'N':
            return (p[1] * scale, p[2] * scale)
        a, b = self.starts[i], self.end(i)
        u = (t - a) / (b - a)
        if p[4] < 0:
            u = 1 - u
        dx, dy = (u, 0) if p[3] == 'b' else (0, u)
        return ((p[1] + dx) * scale, (p[2] + dy) * scale)

    def vertex_of(self, i: int) -> Tuple[int, int, int]:
        """Lattice point (a, b, depth) of a closed piece"""
        p = self.payloads[i]
        return p if self.kinds[i] == 'F' else (p[1], p[2], self.depth)

    def to_dict(self) -> Dict[str, Any]:
        pieces = []
        for i, (kind, p) in enumerate(zip(self.kinds, self.payloads)):
            entry: Dict[str, Any] = {"family": kind, "start": str(self.starts[i]), "end": str(self.end(i))}
            if kind == 'N':
                entry["word"] = list(p[0])
                entry["vertex"] = [p[1], p[2]]
            elif kind == 'F':
                entry["vertex"] = [p[0], p[1]]
                entry["depth"] = p[2]
            else:
                entry["word"] = list(p[0])
                entry["side"] = p[3]
                entry["sign"] = p[4]
            pieces.append(entry)
        return {"stage": self.depth, "counts": self.counts(), "pieces": pieces}


def _piece_template(stage: Stage, i: int, edges: Set[EdgeKey], eta: ChoiceFunction,
                    n: int) -> Optional[_Template]:
    """Template a piece subdivides with; None for F pieces and N pieces with both edges"""
    kind, p = stage.kinds[i], stage.payloads[i]
    if kind == 'F':
        return None
    templates = tour_templates(n, eta(p[0]))
    if kind == 'E':
        return templates[(p[3], p[4])]
    has_up, has_right = (p[0], 'l') in edges, (p[0], 'b') in edges
    if has_up and has_right:
        return None
    if has_right:
        return templates["right_only"]
    if has_up:
        return templates["up_only"]
    return templates["leaf"]


def subdivide(stage: Stage, eta: ChoiceFunction, n: int) -> Stage:
    """Stage m families to stage m+1"""
    edges = stage.edge_keys()
    depth = stage.depth + 1
    starts: List[Fraction] = []
    kinds: List[str] = []
    payloads: List[Tuple[Any, ...]] = []
    for i in range(len(stage)):
        kind, p = stage.kinds[i], stage.payloads[i]
        a = stage.starts[i]
        template = _piece_template(stage, i, edges, eta, n)
        if kind == 'F':
            starts.append(a)
            kinds.append('F')
            payloads.append(p)
            continue
        word, x, y = p[0], n * p[1], n * p[2]
        if template is None:
            starts.append(a)
            kinds.append('N')
            payloads.append((word + (1,), x, y))
            continue
        letters = letter_at(n, eta(word))
        width = (stage.end(i) - a) / len(template.entries)
        for k, entry in enumerate(template.entries):
            starts.append(a + width * k)
            kinds.append(entry[0])
            o = entry[1]
            if entry[0] == 'N':
                payloads.append((word + (letters[o],), x + o[0], y + o[1]))
            elif entry[0] == 'F':
                payloads.append((x + o[0], y + o[1], depth))
            else:
                payloads.append((word + (letters[o],), x + o[0], y + o[1], entry[2], entry[3]))
    return Stage(depth, starts, kinds, payloads)


@dataclass
class Parametrization:
    """Stages 0..depth plus the ζ mass table of the deepest stage"""
    n: int
    eta: ChoiceFunction
    stages: List[Stage]
    masses: List[int] = field(default_factory=list)
    cumulative: List[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    @property
    def total_mass(self) -> int:
        return self.cumulative[-1] + self.masses[-1]

    def stage(self, m: int) -> Stage:
        if not 0 <= m <= self.depth:
            raise DomainError(f"stage {m} not built (depth {self.depth})")
        return self.stages[m]

    def f(self, m: int, t: Any) -> Point:
        t = Fraction(t)
        stage = self.stage(m)
        return stage.value(self.n, stage.locate(t), t)

    def zeta_inverse(self, t: Any) -> Fraction:
        """Deepest-stage parameter carrying mass fraction t; zero-mass pieces are skipped"""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise DomainError(f"parameter {t} outside [0, 1]")
        stage = self.stages[-1]
        target = t * self.total_mass
        i = bisect_right(self.cumulative, target) - 1
        while self.masses[i] == 0:
            i -= 1
        a, b = stage.starts[i], stage.end(i)
        return a + (b - a) * (target - self.cumulative[i]) / self.masses[i]

    def F(self, t: Any, stage: Optional[int] = None) -> Point:
        """f_stage(ζ^{-1}(t)); stage defaults to the deepest one"""
        return self.f(self.depth if stage is None else stage, self.zeta_inverse(t))

    def mass_boundaries(self) -> List[Fraction]:
        return [Fraction(c, self.total_mass) for c, mass in zip(self.cumulative, self.masses) if mass]

    def families_dict(self, m: int) -> Dict[str, Any]:
        return self.stage(m).to_dict()


class ParametrizationBuilder:
    """Runs the subdivision stage by stage"""

    def __init__(self, eta: ChoiceFunction, n: int, budget: int = DEFAULT_CELL_BUDGET):
        self.eta = eta
        self.n = n
        self.budget = budget

    def initial_stage(self) -> Stage:
        return Stage(0, [Fraction(0)], ['N'], [((), 0, 0)])

    def build(self, depth: int) -> Parametrization:
        if depth < 0:
            raise DomainError("depth must be nonnegative")
        required = (5 * self.n - 6) ** (depth + 1)
        if required > self.budget:
            raise BudgetExceededError(f"parametrization to stage {depth}", required, self.budget)
        stages = [self.initial_stage()]
        for _ in range(depth):
            stages.append(subdivide(stages[-1], self.eta, self.n))
            logger.debug(f"📊 stage {stages[-1].depth}: {stages[-1].counts()}")
        param = Parametrization(self.n, self.eta, stages)
        last = stages[-1]
        edges = last.edge_keys()
        running = 0
        for i in range(len(last)):
            template = _piece_template(last, i, edges, self.eta, self.n)
            if last.kinds[i] == 'F':
                mass = 0
            else:
                mass = 1 if template is None else template.n_count
            param.cumulative.append(running)
            param.masses.append(mass)
            running += mass
        if running != required:
            raise InvariantViolation("P1", f"stage {depth + 1} would hold {running} vertex pieces, expected {required}")
        return param


def eval_F(eta: ChoiceFunction, n: int, m: int, t: Any,
           param: Optional[Parametrization] = None) -> Tuple[Point, float]:
    """F at stage m with its error radius √2 n^{-m}"""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise DomainError(f"parameter {t} outside [0, 1]")
    if param is None or param.depth != m:
        param = ParametrizationBuilder(eta, n).build(m)
    return param.F(t), math.sqrt(2) * n ** (-m)


# ----------------------------------------------------------------------
# Checks
# ----------------------------------------------------------------------

@dataclass
class PropertyViolation:
    prop: str
    message: str

    def to_dict(self) -> Dict[str, str]:
        return {"property": self.prop, "message": self.message}


def _check_partition(stage: Stage) -> List[PropertyViolation]:
    out = []
    if not stage.starts or stage.starts[0] != 0:
        out.append(PropertyViolation("P2", "first piece does not start at 0"))
    for i in range(1, len(stage)):
        if stage.starts[i] <= stage.starts[i - 1]:
            out.append(PropertyViolation("P2", f"piece {i} has empty or negative length"))
            break
    if stage.starts and stage.starts[-1] >= 1:
        out.append(PropertyViolation("P2", "last piece is empty"))
    closed = [kind != 'E' for kind in stage.kinds]
    if not closed[0] or not closed[-1] or any(a == b for a, b in zip(closed, closed[1:])):
        out.append(PropertyViolation("P2", "open and closed pieces do not alternate"))
    return out


def _check_labels(stage: Stage, tree: 'DendriteGraph', n: int) -> List[PropertyViolation]:
    out = []
    labels = [p[0] for k, p in zip(stage.kinds, stage.payloads) if k == 'N']
    if len(labels) != (5 * n - 6) ** stage.depth or len(set(labels)) != len(labels):
        out.append(PropertyViolation("P1", f"{len(labels)} N labels, {len(set(labels))} distinct"))
    for k, p in zip(stage.kinds, stage.payloads):
        if k == 'N' and tree.approx.word_at((p[1], p[2])) != p[0]:
            out.append(PropertyViolation("P1", f"label {p[0]} does not sit at its cell corner"))
            break
    return out


def _check_pairing(stage: Stage, tree: 'DendriteGraph') -> List[PropertyViolation]:
    signs: Dict[EdgeKey, List[int]] = {}
    for k, p in zip(stage.kinds, stage.payloads):
        if k == 'E':
            signs.setdefault((p[0], p[3]), []).append(p[4])
    out = []
    bad = [key for key, s in signs.items() if sorted(s) != [-1, 1]]
    if bad:
        out.append(PropertyViolation("P3", f"edge {bad[0]} lacks an opposite pair"))
    expected = set(classify_edges(tree).values())
    if set(signs) != expected:
        out.append(PropertyViolation(
            "P3", f"{len(set(signs) ^ expected)} edges differ between E pieces and T_{stage.depth}",
        ))
    return out


def _check_nesting(prev: Stage, stage: Stage, eta: ChoiceFunction, n: int) -> List[PropertyViolation]:
    out = []
    prev_starts = set(prev.starts)
    if not prev_starts <= set(stage.starts):
        out.append(PropertyViolation("P6", "a stage boundary disappears"))
        return out
    frozen = {(prev.starts[i], prev.end(i), prev.payloads[i])
              for i in range(len(prev)) if prev.kinds[i] == 'F'}
    kept = {(stage.starts[i], stage.end(i), stage.payloads[i])
            for i in range(len(stage)) if stage.kinds[i] == 'F'}
    if not frozen <= kept:
        out.append(PropertyViolation("P5", "a frozen piece changed"))

    leaves = {model: set(model_leaves(n, model).values()) for model in (1, 2)}
    has_leaf = [False] * len(prev)
    for i in range(len(stage)):
        parent = prev.locate(stage.starts[i])
        pkind, pp = prev.kinds[parent], prev.payloads[parent]
        kind, p = stage.kinds[i], stage.payloads[i]
        if pkind == 'F' and kind != 'F':
            out.append(PropertyViolation("P5", f"piece {i} subdivides a frozen piece"))
            break
        if kind in ('N', 'E') and pkind != 'F' and p[0][:-1] != pp[0]:
            out.append(PropertyViolation("P6", f"label {p[0]} does not extend {pp[0]}"))
            break
        if kind == 'N' and pkind == 'E':
            model = eta(pp[0])
            o = (p[1] - n * pp[1], p[2] - n * pp[2])
            if o in leaves[model]:
                has_leaf[parent] = True
    missing = [i for i in range(len(prev)) if prev.kinds[i] == 'E' and not has_leaf[i]]
    if missing:
        out.append(PropertyViolation("P7", f"E piece {missing[0]} holds no leaf vertex piece"))
    return out


def check_properties(param: Parametrization, m: int,
                     tree: Optional[DendriteGraph] = None) -> List[PropertyViolation]:
    """P1-P7 at stage m (nesting, freezing and leaves against stage m-1)"""
    stage = param.stage(m)
    if tree is None:
        tree = build_Tm(param.eta, param.n, m)
    violations = _check_partition(stage)
    violations += _check_labels(stage, tree, param.n)
    violations += _check_pairing(stage, tree)
    if m > 0:
        violations += _check_nesting(param.stage(m - 1), stage, param.eta, param.n)
    for v in violations:
        logger.warning(f"⚠️ stage {m} {v.prop}: {v.message}")
    return violations


def assert_properties(param: Parametrization, m: int) -> None:
    violations = check_properties(param, m)
    if violations:
        raise InvariantViolation(violations[0].prop, violations[0].message,
                                 {"violations": [v.to_dict() for v in violations]})


def cauchy_gap(param: Parametrization, m: int, k: int = 1) -> float:
    """sup |f_m - f_{m+k}|, attained at stage m+k breakpoints"""
    fine = param.stage(m + k)
    worst = 0.0
    for t in fine.starts + [Fraction(1)]:
        p, q = param.f(m, t), param.f(m + k, t)
        worst = max(worst, math.hypot(float(p[0] - q[0]), float(p[1] - q[1])))
    return worst


@dataclass
class SurjectivityReport:
    cells: int
    hit: int
    missing: List[Tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.missing

    def to_dict(self) -> Dict[str, Any]:
        return {"cells": self.cells, "hit": self.hit, "missing": [list(c) for c in self.missing[:20]]}


def surjectivity_check(param: Parametrization, approx: CarpetApprox) -> SurjectivityReport:
    """F at the ζ-uniform grid of total-mass points meets every depth-m cell"""
    m = approx.depth
    side = param.n ** m
    total = param.total_mass
    hit: Set[Tuple[int, int]] = set()
    for i in range(total):
        x, y = param.F(Fraction(2 * i + 1, 2 * total), stage=m)
        X, Y = x * side, y * side
        xs = {math.floor(X)} | ({int(X) - 1} if X.denominator == 1 else set())
        ys = {math.floor(Y)} | ({int(Y) - 1} if Y.denominator == 1 else set())
        hit.update((a, b) for a in xs for b in ys)
    cells = set(map(tuple, approx.corners.tolist()))
    missing = sorted(cells - hit)
    return SurjectivityReport(len(cells), len(cells & hit), missing)


@dataclass
class HolderReport:
    n: int
    stage: int
    pairs: int
    constant: float
    bound: float
    worst: Tuple[str, str]

    @property
    def ok(self) -> bool:
        return self.constant <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "stage": self.stage, "pairs": self.pairs, "constant": self.constant,
                "bound": self.bound, "worst": list(self.worst), "ok": self.ok}


def _sample_pairs(param: Parametrization, count: int, rng: np.random.Generator) -> List[Tuple[Fraction, Fraction]]:
    """Uniform pairs, pairs at dyadic gaps, and pairs straddling piece boundaries"""
    grid = 2 ** 40
    pairs = []
    third = max(1, count // 3)
    for _ in range(third):
        a, b = rng.integers(0, grid, size=2).tolist()
        pairs.append((Fraction(a, grid), Fraction(b, grid)))
    for _ in range(third):
        a = Fraction(int(rng.integers(0, grid)), grid)
        gap = Fraction(1, 2 ** int(rng.integers(1, 40)))
        pairs.append((a, min(Fraction(1), a + gap)))
    boundaries = param.mass_boundaries()
    total = param.total_mass
    for _ in range(count - 2 * third):
        c = boundaries[int(rng.integers(0, len(boundaries)))]
        left = Fraction(int(rng.integers(1, 1025)), 1024 * total)
        right = Fraction(int(rng.integers(1, 1025)), 1024 * total)
        pairs.append((max(Fraction(0), c - left), min(Fraction(1), c + right)))
    return pairs


def holder_constant(eta: ChoiceFunction, n: int, m: int, sample_count: int, seed: int,
                    param: Optional[Parametrization] = None) -> HolderReport:
    """sup over sampled pairs of |F(x) - F(y)| / |x - y|^{1/α}"""
    if param is None or param.depth != m:
        param = ParametrizationBuilder(eta, n).build(m)
    exponent = 1 / alpha(n)
    rng = np.random.default_rng(seed)
    best, worst = 0.0, ("0", "0")
    cache: Dict[Fraction, Point] = {}

    def value(t: Fraction) -> Point:
        if t not in cache:
            cache[t] = param.F(t)
        return cache[t]

    counted = 0
    for x, y in _sample_pairs(param, sample_count, rng):
        if x == y:
            continue
        p, q = value(x), value(y)
        ratio = math.hypot(float(p[0] - q[0]), float(p[1] - q[1])) / float(abs(x - y)) ** exponent
        counted += 1
        if ratio > best:
            best, worst = ratio, (str(x), str(y))
    report = HolderReport(n, m, counted, best, math.sqrt(2) * n ** 3, worst)
    logger.info(f"📊 Hölder constant at stage {m}: {best:.3f} (bound {report.bound:.1f})")
    return report


@dataclass
class OverlapReport:
    pieces: int
    refined_cells: int
    shared_cells: int

    @property
    def ok(self) -> bool:
        return self.shared_cells == 0

    def to_dict(self) -> Dict[str, Any]:
        return {"pieces": self.pieces, "refined_cells": self.refined_cells,
                "shared_cells": self.shared_cells, "ok": self.ok}


def check_overlap_degeneracy(param: Parametrization, m: int, refine: int = 1) -> OverlapReport:
    """Stage-m E and N pieces own disjoint sets of depth-(m+refine) cells"""
    coarse, fine = param.stage(m), param.stage(m + refine)
    owner: Dict[Word, int] = {}
    shared = 0
    for i in range(len(fine)):
        if fine.kinds[i] != 'N':
            continue
        parent = coarse.locate(fine.starts[i])
        word = fine.payloads[i][0]
        if word in owner and owner[word] != parent:
            shared += 1
        owner[word] = parent
    pieces = sum(1 for k in coarse.kinds if k != 'F')
    return OverlapReport(pieces, len(owner), shared)
