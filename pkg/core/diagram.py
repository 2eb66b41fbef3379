"""
Комбинаторные коды хорошо ориентированных диаграмм 3-валентных графов.

Диаграмма задается дугами, знаковыми перекрестками, вершинами zip/unzip,
числом свободных петель и (для тэнглов) граничными портами. Планарность
не хранится: раскраски и веса зависят только от кода инцидентности.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from core.exceptions import (
    DanglingArc,
    DoubleSink,
    DoubleSource,
    InvalidDirection,
    NonTrivalent,
    SinkVertexPresent,
    SiteMismatch,
    UnknownArc,
    UnknownMove,
    UnknownName,
)

logger = logging.getLogger(__name__)

ZIP = "zip"
UNZIP = "unzip"

MOVE_IDS = ("R1+", "R1-", "R2", "R3", "R4z", "R4u", "R5z", "R5u", "R6z", "R6u")


class Direction(str, Enum):
    INSERT = "insert"
    REMOVE = "remove"
    SLIDE = "slide"


@dataclass(frozen=True, order=True)
class Crossing:
    over: str
    under_in: str
    under_out: str
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"Знак перекрестка должен быть +1 или -1, получено {self.sign}")


@dataclass(frozen=True, order=True)
class Vertex:
    """
    Вершина графа.

    Для zip: ins = (in_left, in_right), outs = (out,).
    Для unzip: ins = (in,), outs = (out_left, out_right).
    """

    kind: str
    ins: Tuple[str, ...]
    outs: Tuple[str, ...]

    @classmethod
    def zip(cls, in_left: str, in_right: str, out: str) -> "Vertex":
        return cls(ZIP, (in_left, in_right), (out,))

    @classmethod
    def unzip(cls, in_: str, out_left: str, out_right: str) -> "Vertex":
        return cls(UNZIP, (in_,), (out_left, out_right))

    @property
    def is_well_oriented(self) -> bool:
        if self.kind == ZIP:
            return len(self.ins) == 2 and len(self.outs) == 1
        if self.kind == UNZIP:
            return len(self.ins) == 1 and len(self.outs) == 2
        return False

    @property
    def pair(self) -> Tuple[str, str]:
        """Сонаправленные дуги вершины: входы zip или выходы unzip."""
        return self.ins if self.kind == ZIP else self.outs

    @property
    def single(self) -> str:
        """Третья дуга вершины: выход zip или вход unzip."""
        return self.outs[0] if self.kind == ZIP else self.ins[0]


@dataclass(frozen=True)
class Boundary:
    inputs: Tuple[str, ...] = ()
    outputs: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @property
    def ports(self) -> Tuple[str, ...]:
        return self.inputs + self.outputs


@dataclass(frozen=True)
class Diagram:
    """
    Диаграмма или тэнгл.

    Дуги, перекрестки и вершины хранятся отсортированными, поэтому две
    диаграммы с одинаковым кодом равны независимо от порядка записи.
    """

    arcs: Tuple[str, ...] = ()
    crossings: Tuple[Crossing, ...] = ()
    vertices: Tuple[Vertex, ...] = ()
    free_loops: int = 0
    boundary: Optional[Boundary] = None

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(sorted(set(self.arcs))))
        object.__setattr__(self, "crossings", tuple(sorted(self.crossings)))
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        if self.free_loops < 0:
            raise ValueError("Число свободных петель не может быть отрицательным")

    @property
    def zips(self) -> List[Vertex]:
        return [v for v in self.vertices if v.kind == ZIP]

    @property
    def unzips(self) -> List[Vertex]:
        return [v for v in self.vertices if v.kind == UNZIP]


@dataclass(frozen=True)
class DiagramReport:
    arcs: int
    crossings: int
    zips: int
    unzips: int
    free_loops: int
    sources: Dict[str, str] = field(default_factory=dict)
    sinks: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": True,
            "arcs": self.arcs,
            "crossings": self.crossings,
            "zips": self.zips,
            "unzips": self.unzips,
            "free_loops": self.free_loops,
        }


@dataclass(frozen=True)
class MovePair:
    move_id: str
    lhs: Diagram
    rhs: Diagram
    sign: int = 1


def validate(d: Diagram) -> DiagramReport:
    """
    Проверяет учет слотов: каждая дуга ровно один раз начинается и ровно
    один раз заканчивается.

    Args:
        d: Диаграмма

    Returns:
        DiagramReport со сведениями о диаграмме

    Raises:
        SinkVertexPresent: Вершина не является zip или unzip
        UnknownArc: Ссылка на дугу вне списка arcs
        DoubleSource / DoubleSink: Дуга начинается или заканчивается дважды
        DanglingArc: Дуга не имеет начала или конца
    """
    arcs = set(d.arcs)
    sources: Dict[str, str] = {}
    sinks: Dict[str, str] = {}

    def claim(slots: Dict[str, str], arc: str, slot: str, error) -> None:
        if arc not in arcs:
            raise UnknownArc(f"Дуга '{arc}' ({slot}) не объявлена", {"arc": arc, "slot": slot})
        if arc in slots:
            raise error(
                f"Дуга '{arc}' занята дважды: {slots[arc]} и {slot}",
                {"arc": arc, "slots": [slots[arc], slot]},
            )
        slots[arc] = slot

    for i, v in enumerate(d.vertices):
        if not v.is_well_oriented:
            raise SinkVertexPresent(
                f"Вершина {i} вида '{v.kind}' не является zip или unzip",
                {"vertex": i, "kind": v.kind},
            )
        for arc in v.outs:
            claim(sources, arc, f"vertex[{i}].out", DoubleSource)
        for arc in v.ins:
            claim(sinks, arc, f"vertex[{i}].in", DoubleSink)
    for i, c in enumerate(d.crossings):
        if c.over not in arcs:
            raise UnknownArc(f"Дуга '{c.over}' (crossing[{i}].over) не объявлена", {"arc": c.over})
        claim(sources, c.under_out, f"crossing[{i}].under_out", DoubleSource)
        claim(sinks, c.under_in, f"crossing[{i}].under_in", DoubleSink)
    if d.boundary is not None:
        for arc in d.boundary.inputs:
            claim(sources, arc, "boundary.input", DoubleSource)
        for arc in d.boundary.outputs:
            claim(sinks, arc, "boundary.output", DoubleSink)

    for arc in d.arcs:
        if arc not in sources or arc not in sinks:
            missing = "начала" if arc not in sources else "конца"
            raise DanglingArc(f"Дуга '{arc}' не имеет {missing}", {"arc": arc})

    return DiagramReport(
        arcs=len(d.arcs),
        crossings=len(d.crossings),
        zips=len(d.zips),
        unzips=len(d.unzips),
        free_loops=d.free_loops,
        sources=sources,
        sinks=sinks,
    )


def relabel(d: Diagram, mapping: Mapping[str, str]) -> Diagram:
    """Переименовывает дуги диаграммы (непереименованные дуги сохраняются)."""
    m = lambda a: mapping.get(a, a)
    boundary = None
    if d.boundary is not None:
        boundary = Boundary(tuple(map(m, d.boundary.inputs)), tuple(map(m, d.boundary.outputs)))
    return Diagram(
        arcs=tuple(map(m, d.arcs)),
        crossings=tuple(Crossing(m(c.over), m(c.under_in), m(c.under_out), c.sign) for c in d.crossings),
        vertices=tuple(Vertex(v.kind, tuple(map(m, v.ins)), tuple(map(m, v.outs))) for v in d.vertices),
        free_loops=d.free_loops,
        boundary=boundary,
    )


# --- абстрактные графы ---

@dataclass
class AbstractGraph:
    """
    Абстрактный 3-валентный граф; петли и кратные ребра допускаются.

    Ребро с индексом i хранится в мультиграфе networkx с ключом i.
    """

    vertices: List[Any]
    edges: List[Tuple[Any, Any]]

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for i, (u, v) in enumerate(self.edges):
            g.add_edge(u, v, key=i)
        return g


def underlying_graph(d: Diagram) -> AbstractGraph:
    """Абстрактный граф диаграммы: вершины zip/unzip, ребра - цепочки дуг между ними."""
    # перекрестки склеивают дуги в ребра
    merged = {c.under_out: c.under_in for c in d.crossings}

    def root(arc: str) -> str:
        seen = set()
        while arc in merged and arc not in seen:
            seen.add(arc)
            arc = merged[arc]
        return arc

    ends: Dict[str, List[int]] = {}
    for i, v in enumerate(d.vertices):
        for arc in v.ins + v.outs:
            ends.setdefault(root(arc), []).append(i)
    edges = [(e[0], e[1]) for e in ends.values() if len(e) == 2]
    return AbstractGraph(vertices=list(range(len(d.vertices))), edges=edges)


def in_degrees(g: AbstractGraph, orientation: List[Tuple[Any, Any]]) -> Dict[Any, int]:
    degrees = {v: 0 for v in g.vertices}
    for _, head in orientation:
        degrees[head] += 1
    return degrees


def well_orient(g: AbstractGraph) -> List[Tuple[Any, Any]]:
    """
    Хорошая ориентация 3-валентного графа.

    Граф дополняется вспомогательной вершиной, соединенной со всеми
    вершинами нечетной степени (то есть со всеми). Эйлеров цикл дополненного
    графа, разрезанный в этой вершине, представляет граф как объединение
    путей; ориентация ребер вдоль путей дает каждой вершине входящую
    степень 1 или 2.

    Args:
        g: Абстрактный граф

    Returns:
        Список (начало, конец) для каждого ребра в порядке g.edges

    Raises:
        NonTrivalent: Если некоторая вершина имеет степень, отличную от 3
    """
    graph = g.to_networkx()
    for v, deg in graph.degree():
        if deg != 3:
            raise NonTrivalent(f"Вершина {v!r} имеет степень {deg}", {"vertex": str(v), "degree": deg})
    if not g.edges:
        return []

    hub = ("__hub__",)
    augmented = graph.copy()
    for i, v in enumerate(g.vertices):
        augmented.add_edge(hub, v, key=("hub", i))

    orientation: Dict[int, Tuple[Any, Any]] = {}
    for component in nx.connected_components(augmented):
        sub = augmented.subgraph(component)
        start = hub if hub in component else next(iter(component))
        for u, v, key in nx.eulerian_circuit(sub, source=start, keys=True):
            if isinstance(key, int):
                orientation[key] = (u, v)

    result = [orientation[i] for i in range(len(g.edges))]
    bad = {v: k for v, k in in_degrees(g, result).items() if k not in (1, 2)}
    if bad:
        logger.error(f"Ориентация содержит источники или стоки: {bad}")
        raise NonTrivalent("Не удалось построить хорошую ориентацию", {"vertices": list(map(str, bad))})
    logger.debug(f"Построена хорошая ориентация графа с {len(g.vertices)} вершинами")
    return result


def oriented_diagram(g: AbstractGraph, orientation: List[Tuple[Any, Any]]) -> Diagram:
    """Диаграмма без перекрестков по хорошо ориентированному графу (дуга e{i} на ребро i)."""
    ins: Dict[Any, List[str]] = {v: [] for v in g.vertices}
    outs: Dict[Any, List[str]] = {v: [] for v in g.vertices}
    for i, (tail, head) in enumerate(orientation):
        outs[tail].append(f"e{i}")
        ins[head].append(f"e{i}")
    vertices = []
    for v in g.vertices:
        if len(ins[v]) == 2:
            vertices.append(Vertex.zip(ins[v][0], ins[v][1], outs[v][0]))
        else:
            vertices.append(Vertex.unzip(ins[v][0], outs[v][0], outs[v][1]))
    return Diagram(arcs=tuple(f"e{i}" for i in range(len(orientation))), vertices=tuple(vertices))


def builtin_graph(name: str) -> AbstractGraph:
    """Абстрактные графы: theta, cuff, k4."""
    graphs = {
        "theta": AbstractGraph([0, 1], [(0, 1), (0, 1), (0, 1)]),
        "cuff": AbstractGraph([0, 1], [(0, 0), (0, 1), (1, 1)]),
        "k4": AbstractGraph([0, 1, 2, 3], [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    }
    if name not in graphs:
        raise UnknownName(f"Неизвестный граф: {name}", {"name": name})
    return graphs[name]


# --- встроенные диаграммы ---

def _unknot() -> Diagram:
    return Diagram(free_loops=1)


def _trefoil() -> Diagram:
    return Diagram(
        arcs=("a1", "a2", "a3"),
        crossings=(
            Crossing(over="a3", under_in="a1", under_out="a2"),
            Crossing(over="a1", under_in="a2", under_out="a3"),
            Crossing(over="a2", under_in="a3", under_out="a1"),
        ),
    )


def _theta_st() -> Diagram:
    return Diagram(
        arcs=("e1", "e2", "e3"),
        vertices=(Vertex.unzip("e3", "e1", "e2"), Vertex.zip("e1", "e2", "e3")),
    )


def _theta_kt() -> Diagram:
    # a = x⊲(y◇y) = y⊲x, b = x⊲̃y = y⊲̃(x◇x), c = (y◇y)⊲x = (x◇x)⊲̃y
    return Diagram(
        arcs=("x1", "x2", "a", "b", "y1", "y2", "yy", "c", "xx"),
        crossings=(
            Crossing(over="yy", under_in="x1", under_out="a", sign=1),
            Crossing(over="x2", under_in="a", under_out="y1", sign=-1),
            Crossing(over="y1", under_in="x2", under_out="b", sign=-1),
            Crossing(over="xx", under_in="b", under_out="y2", sign=1),
            Crossing(over="x1", under_in="yy", under_out="c", sign=1),
            Crossing(over="y2", under_in="c", under_out="xx", sign=1),
        ),
        vertices=(Vertex.unzip("xx", "x1", "x2"), Vertex.zip("y1", "y2", "yy")),
    )


def _cuff_st() -> Diagram:
    return Diagram(
        arcs=("a", "b", "c"),
        vertices=(Vertex.zip("b", "a", "a"), Vertex.unzip("c", "b", "c")),
    )


def _cuff_hopf() -> Diagram:
    return Diagram(
        arcs=("a", "a'", "b", "c", "c'"),
        crossings=(
            Crossing(over="c'", under_in="a'", under_out="a"),
            Crossing(over="a", under_in="c", under_out="c'"),
        ),
        vertices=(Vertex.zip("b", "a", "a'"), Vertex.unzip("c'", "b", "c")),
    )


_BUILTIN_DIAGRAMS = {
    "unknot": _unknot,
    "trefoil": _trefoil,
    "theta_st": _theta_st,
    "theta_kt": _theta_kt,
    "cuff_st": _cuff_st,
    "cuff_hopf": _cuff_hopf,
}


def list_builtin_diagrams() -> List[str]:
    return list(_BUILTIN_DIAGRAMS)


def builtin_diagram(name: str) -> Diagram:
    """
    Встроенная диаграмма по имени.

    Raises:
        UnknownName: Если имя не зарегистрировано
    """
    if name not in _BUILTIN_DIAGRAMS:
        raise UnknownName(f"Неизвестная диаграмма: {name}", {"name": name})
    return _BUILTIN_DIAGRAMS[name]()


# --- фикстуры движений ---

def _tangle(arcs, crossings=(), vertices=(), inputs=(), outputs=()) -> Diagram:
    return Diagram(
        arcs=tuple(arcs),
        crossings=tuple(crossings),
        vertices=tuple(vertices),
        boundary=Boundary(tuple(inputs), tuple(outputs)),
    )


def _strand() -> Diagram:
    return _tangle(["s"], inputs=["s"], outputs=["s"])


def move_fixture(move_id: str, sign: int = 1) -> MovePair:
    """
    Левая и правая части локального движения в виде тэнглов.

    Граничные порты обеих частей сопоставляются по позициям: входы, затем
    выходы. Для R4-R6 параметр sign выбирает знак перекрестков; для R1
    знак задается самим именем движения, R2 и R3 знак игнорируют.

    Raises:
        UnknownMove: Если move_id не из списка MOVE_IDS
    """
    s = 1 if sign >= 0 else -1
    if move_id in ("R1+", "R1-"):
        kink_sign = 1 if move_id == "R1+" else -1
        lhs = _tangle(["i", "o"], [Crossing("i", "i", "o", kink_sign)], inputs=["i"], outputs=["o"])
        return MovePair(move_id, lhs, _strand(), kink_sign)

    if move_id == "R2":
        lhs = _tangle(
            ["x", "x1", "x2", "y"],
            [Crossing("y", "x", "x1", 1), Crossing("y", "x1", "x2", -1)],
            inputs=["x", "y"], outputs=["x2", "y"],
        )
        rhs = _tangle(["x", "y"], inputs=["x", "y"], outputs=["x", "y"])
        return MovePair(move_id, lhs, rhs, 1)

    if move_id == "R3":
        lhs = _tangle(
            ["b0", "b1", "b2", "m0", "m1", "t"],
            [Crossing("m0", "b0", "b1"), Crossing("t", "b1", "b2"), Crossing("t", "m0", "m1")],
            inputs=["b0", "m0", "t"], outputs=["b2", "m1", "t"],
        )
        rhs = _tangle(
            ["b0", "b1", "b2", "m0", "m1", "t"],
            [Crossing("t", "b0", "b1"), Crossing("m1", "b1", "b2"), Crossing("t", "m0", "m1")],
            inputs=["b0", "m0", "t"], outputs=["b2", "m1", "t"],
        )
        return MovePair(move_id, lhs, rhs, 1)

    if move_id in ("R4z", "R4u"):
        first, second = ("u", "v") if s > 0 else ("v", "u")
        under = [Crossing(first, "x", "x1", s), Crossing(second, "x1", "x2", s)]
        if move_id == "R4z":
            vertex = Vertex.zip("u", "v", "w")
            inputs, outputs = ["u", "v", "x"], ["w", "x2"]
        else:
            vertex = Vertex.unzip("w", "u", "v")
            inputs, outputs = ["w", "x"], ["u", "v", "x2"]
        lhs = _tangle(["u", "v", "w", "x", "x1", "x2"], under, [vertex], inputs, outputs)
        rhs = _tangle(["u", "v", "w", "x", "x2"], [Crossing("w", "x", "x2", s)], [vertex], inputs, outputs)
        return MovePair(move_id, lhs, rhs, s)

    if move_id == "R5z":
        if s > 0:
            lhs_parts = ([Crossing("b", "a", "a1", 1)], [Vertex.zip("b", "a1", "w")])
            rhs_vertex = Vertex.zip("a", "b", "w")
        else:
            lhs_parts = ([Crossing("b", "a", "a1", -1)], [Vertex.zip("a1", "b", "w")])
            rhs_vertex = Vertex.zip("b", "a", "w")
        lhs = _tangle(["a", "a1", "b", "w"], *lhs_parts, inputs=["a", "b"], outputs=["w"])
        rhs = _tangle(["a", "b", "w"], [], [rhs_vertex], inputs=["a", "b"], outputs=["w"])
        return MovePair(move_id, lhs, rhs, s)

    if move_id == "R5u":
        if s < 0:
            lhs_parts = ([Crossing("b", "z", "a", -1)], [Vertex.unzip("w", "b", "z")])
            rhs_vertex = Vertex.unzip("w", "a", "b")
        else:
            lhs_parts = ([Crossing("b", "z", "a", 1)], [Vertex.unzip("w", "z", "b")])
            rhs_vertex = Vertex.unzip("w", "b", "a")
        lhs = _tangle(["a", "b", "w", "z"], *lhs_parts, inputs=["w"], outputs=["a", "b"])
        rhs = _tangle(["a", "b", "w"], [], [rhs_vertex], inputs=["w"], outputs=["a", "b"])
        return MovePair(move_id, lhs, rhs, s)

    if move_id == "R6z":
        lhs = _tangle(
            ["a", "b", "c", "w", "w2"],
            [Crossing("c", "w", "w2", s)], [Vertex.zip("a", "b", "w")],
            inputs=["a", "b", "c"], outputs=["w2", "c"],
        )
        rhs = _tangle(
            ["a", "a2", "b", "b2", "c", "w2"],
            [Crossing("c", "a", "a2", s), Crossing("c", "b", "b2", s)], [Vertex.zip("a2", "b2", "w2")],
            inputs=["a", "b", "c"], outputs=["w2", "c"],
        )
        return MovePair(move_id, lhs, rhs, s)

    if move_id == "R6u":
        lhs = _tangle(
            ["a2", "b2", "c", "w", "w2"],
            [Crossing("c", "w", "w2", s)], [Vertex.unzip("w2", "a2", "b2")],
            inputs=["w", "c"], outputs=["a2", "b2", "c"],
        )
        rhs = _tangle(
            ["a", "a2", "b", "b2", "c", "w"],
            [Crossing("c", "a", "a2", s), Crossing("c", "b", "b2", s)], [Vertex.unzip("w", "a", "b")],
            inputs=["w", "c"], outputs=["a2", "b2", "c"],
        )
        return MovePair(move_id, lhs, rhs, s)

    raise UnknownMove(f"Неизвестное движение: {move_id}", {"move_id": move_id})


def move_fixtures(signs: Iterable[int] = (1, -1)) -> List[MovePair]:
    """Все фикстуры; для R4-R6 - в каждом из указанных знаков."""
    pairs = []
    for move_id in MOVE_IDS:
        if move_id[:2] in ("R4", "R5", "R6"):
            pairs.extend(move_fixture(move_id, s) for s in signs)
        else:
            pairs.append(move_fixture(move_id))
    return pairs


# --- применение движений ---

class _Editor:
    """Изменяемая копия диаграммы для локальной перезаписи."""

    def __init__(self, d: Diagram):
        self.arcs = set(d.arcs)
        self.crossings: List[Crossing] = list(d.crossings)
        self.vertices: List[Vertex] = list(d.vertices)
        self.free_loops = d.free_loops
        self.inputs = list(d.boundary.inputs) if d.boundary else None
        self.outputs = list(d.boundary.outputs) if d.boundary else None

    def fresh(self, base: str) -> str:
        k = 1
        while f"{base}_{k}" in self.arcs:
            k += 1
        name = f"{base}_{k}"
        self.arcs.add(name)
        return name

    def over_count(self, arc: str, ignore: Iterable[Crossing] = ()) -> int:
        skip = list(ignore)
        return sum(1 for c in self.crossings if c.over == arc and c not in skip)

    def crossing_from(self, arc: str) -> Optional[Crossing]:
        """Перекресток, в котором дуга arc заканчивается (under_in)."""
        return next((c for c in self.crossings if c.under_in == arc), None)

    def crossing_into(self, arc: str) -> Optional[Crossing]:
        """Перекресток, в котором дуга arc начинается (under_out)."""
        return next((c for c in self.crossings if c.under_out == arc), None)

    def redirect_sink(self, old: str, new: str) -> None:
        """Слот, где заканчивается old, теперь принимает new."""
        for i, c in enumerate(self.crossings):
            if c.under_in == old:
                self.crossings[i] = replace(c, under_in=new)
                return
        for i, v in enumerate(self.vertices):
            if old in v.ins:
                self.vertices[i] = Vertex(v.kind, tuple(new if a == old else a for a in v.ins), v.outs)
                return
        if self.outputs is not None and old in self.outputs:
            self.outputs[self.outputs.index(old)] = new
            return
        raise SiteMismatch(f"Дуга '{old}' не имеет конца", {"arc": old})

    def replace_over(self, old: str, new: str) -> None:
        self.crossings = [replace(c, over=new) if c.over == old else c for c in self.crossings]

    def merge(self, keep: str, drop: str) -> None:
        """Склеивает дугу drop с дугой keep одного цвета (drop продолжает keep)."""
        self.redirect_sink(drop, keep)
        self.replace_over(drop, keep)
        if self.inputs is not None:
            self.inputs = [keep if a == drop else a for a in self.inputs]
        self.arcs.discard(drop)

    def build(self) -> Diagram:
        boundary = Boundary(tuple(self.inputs), tuple(self.outputs)) if self.inputs is not None else None
        d = Diagram(
            arcs=tuple(self.arcs),
            crossings=tuple(self.crossings),
            vertices=tuple(self.vertices),
            free_loops=self.free_loops,
            boundary=boundary,
        )
        validate(d)
        return d


def _require_arc(ed: _Editor, arc: Optional[str]) -> str:
    if arc is None or arc not in ed.arcs:
        raise SiteMismatch(f"Дуга '{arc}' отсутствует в диаграмме", {"arc": arc})
    return arc


def _vertex_at(ed: _Editor, site: Mapping[str, Any], kind: str) -> Tuple[int, Vertex]:
    index = site.get("vertex")
    if index is None or not 0 <= index < len(ed.vertices):
        raise SiteMismatch(f"Нет вершины с индексом {index}", {"vertex": index})
    v = ed.vertices[index]
    if v.kind != kind:
        raise SiteMismatch(f"Вершина {index} имеет вид {v.kind}, ожидался {kind}", {"vertex": index})
    return index, v


def _r1(ed: _Editor, move_id: str, site: Mapping[str, Any], direction: Direction) -> None:
    sign = 1 if move_id == "R1+" else -1
    if direction is Direction.INSERT:
        if site.get("free_loop"):
            if ed.free_loops < 1:
                raise SiteMismatch("В диаграмме нет свободных петель")
            ed.free_loops -= 1
            loop = ed.fresh("loop")
            ed.crossings.append(Crossing(loop, loop, loop, sign))
            return
        x = _require_arc(ed, site.get("arc"))
        x_new = ed.fresh(x)
        ed.redirect_sink(x, x_new)
        ed.crossings.append(Crossing(x, x, x_new, sign))
        return

    x = _require_arc(ed, site.get("arc"))
    kink = next(
        (c for c in ed.crossings
         if c.sign == sign and x in (c.under_in, c.under_out) and c.over in (c.under_in, c.under_out)),
        None,
    )
    if kink is None:
        raise SiteMismatch(f"Возле дуги '{x}' нет петли R1 знака {sign:+d}", {"arc": x})
    ed.crossings.remove(kink)
    if kink.under_in == kink.under_out:
        if ed.over_count(kink.under_in):
            raise SiteMismatch("Петля проходит над другими дугами и не может стать свободной", {"arc": x})
        ed.arcs.discard(kink.under_in)
        ed.free_loops += 1
    else:
        ed.merge(kink.under_in, kink.under_out)


def _r2(ed: _Editor, site: Mapping[str, Any], direction: Direction) -> None:
    y = _require_arc(ed, site.get("over"))
    if direction is Direction.INSERT:
        x = _require_arc(ed, site.get("arc"))
        if x == y:
            raise SiteMismatch("Дуга не может проходить под собой в движении R2", {"arc": x})
        x1 = ed.fresh(x)
        x2 = ed.fresh(x)
        ed.redirect_sink(x, x2)
        ed.crossings.append(Crossing(y, x, x1, 1))
        ed.crossings.append(Crossing(y, x1, x2, -1))
        return

    m = _require_arc(ed, site.get("arc"))
    c1, c2 = ed.crossing_into(m), ed.crossing_from(m)
    if c1 is None or c2 is None or c1 is c2 or c1.over != y or c2.over != y or c1.sign != -c2.sign:
        raise SiteMismatch(f"Дуга '{m}' не является средней дугой пары R2 под '{y}'", {"arc": m})
    if ed.over_count(m):
        raise SiteMismatch(f"Над средней дугой '{m}' проходят другие дуги", {"arc": m})
    ed.crossings.remove(c1)
    ed.crossings.remove(c2)
    ed.arcs.discard(m)
    start, end = c1.under_in, c2.under_out
    if start == end:
        if ed.over_count(start):
            raise SiteMismatch("Замкнутая дуга проходит над другими дугами", {"arc": start})
        ed.arcs.discard(start)
        ed.free_loops += 1
    else:
        ed.merge(start, end)


def _r3(ed: _Editor, site: Mapping[str, Any]) -> None:
    b1 = _require_arc(ed, site.get("arc"))
    c_a, c_b = ed.crossing_into(b1), ed.crossing_from(b1)
    if c_a is None or c_b is None or c_a is c_b:
        raise SiteMismatch(f"Дуга '{b1}' не лежит между двумя перекрестками", {"arc": b1})
    if ed.over_count(b1):
        raise SiteMismatch(f"Над дугой '{b1}' проходят другие дуги", {"arc": b1})
    x, y = c_a.over, c_b.over
    if x == y or b1 in (x, y):
        raise SiteMismatch(f"Возле дуги '{b1}' нет треугольника R3", {"arc": b1})

    new_first = new_second = None
    for c in ed.crossings:
        if c in (c_a, c_b):
            continue
        # средняя прядь проходит под верхней: над b теперь сначала y, затем другой кусок x
        if c.over == y and x in (c.under_in, c.under_out):
            other = c.under_out if c.under_in == x else c.under_in
            sign_ok = c.sign == c_b.sign if c.under_in == x else c.sign == -c_b.sign
            if sign_ok:
                new_first, new_second = (y, c_b.sign), (other, c_a.sign)
                break
        # верхняя прядь проходит под средней: над b теперь сначала другой кусок y, затем x
        if c.over == x and y in (c.under_in, c.under_out):
            other = c.under_in if c.under_out == y else c.under_out
            sign_ok = c.sign == c_a.sign if c.under_out == y else c.sign == -c_a.sign
            if sign_ok:
                new_first, new_second = (other, c_b.sign), (x, c_a.sign)
                break
    if new_first is None:
        raise SiteMismatch(f"Возле дуги '{b1}' нет треугольника R3 с согласованными знаками", {"arc": b1})

    b0, b2 = c_a.under_in, c_b.under_out
    ed.crossings.remove(c_a)
    ed.crossings.remove(c_b)
    ed.arcs.discard(b1)
    b_new = ed.fresh(b1)
    ed.crossings.append(Crossing(new_first[0], b0, b_new, new_first[1]))
    ed.crossings.append(Crossing(new_second[0], b_new, b2, new_second[1]))


def _r4(ed: _Editor, move_id: str, site: Mapping[str, Any], direction: Direction) -> None:
    index, v = _vertex_at(ed, site, ZIP if move_id == "R4z" else UNZIP)
    left, right = v.pair
    single = v.single
    x = _require_arc(ed, site.get("arc"))

    if direction is Direction.INSERT:
        c = next((c for c in ed.crossings if c.over == single and c.under_in == x), None)
        if c is None:
            raise SiteMismatch(f"Дуга '{x}' не проходит под '{single}'", {"arc": x, "vertex": index})
        first, second = (left, right) if c.sign > 0 else (right, left)
        ed.crossings.remove(c)
        x1 = ed.fresh(x)
        ed.crossings.append(Crossing(first, x, x1, c.sign))
        ed.crossings.append(Crossing(second, x1, c.under_out, c.sign))
        return

    c1 = ed.crossing_from(x)
    if c1 is None or c1.over not in (left, right):
        raise SiteMismatch(f"Дуга '{x}' не проходит под дугами вершины {index}", {"arc": x})
    first, second = (left, right) if c1.sign > 0 else (right, left)
    x1 = c1.under_out
    c2 = ed.crossing_from(x1)
    if c1.over != first or c2 is None or c2.over != second or c2.sign != c1.sign or ed.over_count(x1):
        raise SiteMismatch(f"У дуги '{x}' нет пары перекрестков R4", {"arc": x, "vertex": index})
    ed.crossings.remove(c1)
    ed.crossings.remove(c2)
    ed.arcs.discard(x1)
    ed.crossings.append(Crossing(single, x, c2.under_out, c1.sign))


def _r5(ed: _Editor, move_id: str, site: Mapping[str, Any], direction: Direction) -> None:
    kind = ZIP if move_id == "R5z" else UNZIP
    index, v = _vertex_at(ed, site, kind)
    left, right = v.pair
    sign = site.get("sign")

    if direction is Direction.INSERT:
        sign = 1 if sign is None else sign
        if kind == ZIP:
            if sign > 0:
                # l ◇ r = r ◇ (l ⊲ r)
                new = ed.fresh(left)
                ed.crossings.append(Crossing(right, left, new, 1))
                ed.vertices[index] = Vertex.zip(right, new, v.single)
            else:
                # l ◇ r = (r ⊲̃ l) ◇ l
                new = ed.fresh(right)
                ed.crossings.append(Crossing(left, right, new, -1))
                ed.vertices[index] = Vertex.zip(new, left, v.single)
        else:
            if sign < 0:
                new = ed.fresh(left)
                ed.vertices[index] = Vertex.unzip(v.single, right, new)
                ed.crossings.append(Crossing(right, new, left, -1))
            else:
                new = ed.fresh(right)
                ed.vertices[index] = Vertex.unzip(v.single, new, left)
                ed.crossings.append(Crossing(left, new, right, 1))
        return

    for s in ((sign,) if sign is not None else (1, -1)):
        if kind == ZIP:
            # +: zip(X, Y) с Y = a ⊲ X;  -: zip(Y, X) с Y = a ⊲̃ X
            over, moved = (left, right) if s > 0 else (right, left)
            c = ed.crossing_into(moved)
            if c is None or c.over != over or c.sign != s or ed.over_count(moved):
                continue
            ed.crossings.remove(c)
            ed.arcs.discard(moved)
            new_vertex = Vertex.zip(c.under_in, over, v.single) if s > 0 else Vertex.zip(over, c.under_in, v.single)
            ed.vertices[index] = new_vertex
            return
        # -: unzip(X, Z), Z под X знака - дает a;  +: unzip(Z, X), Z под X знака + дает a
        over, moved = (left, right) if s < 0 else (right, left)
        c = ed.crossing_from(moved)
        if c is None or c.over != over or c.sign != s or ed.over_count(moved):
            continue
        ed.crossings.remove(c)
        ed.arcs.discard(moved)
        if s < 0:
            ed.vertices[index] = Vertex.unzip(v.single, c.under_out, over)
        else:
            ed.vertices[index] = Vertex.unzip(v.single, over, c.under_out)
        return
    raise SiteMismatch(f"У вершины {index} нет перекрестка R5", {"vertex": index})


def _r6(ed: _Editor, move_id: str, site: Mapping[str, Any], direction: Direction) -> None:
    kind = ZIP if move_id == "R6z" else UNZIP
    index, v = _vertex_at(ed, site, kind)
    left, right = v.pair
    single = v.single
    over = site.get("arc")

    if direction is Direction.INSERT:
        # перекресток на одиночной дуге переносится на пару дуг
        if kind == ZIP:
            c = ed.crossing_from(single)
        else:
            c = ed.crossing_into(single)
        if c is None or (over is not None and c.over != over) or c.over == single:
            raise SiteMismatch(f"Дуга '{single}' не проходит под '{over}'", {"vertex": index})
        if ed.over_count(single):
            raise SiteMismatch(f"Над дугой '{single}' проходят другие дуги", {"arc": single})
        ed.crossings.remove(c)
        ed.arcs.discard(single)
        if kind == ZIP:
            l2, r2 = ed.fresh(left), ed.fresh(right)
            ed.crossings.append(Crossing(c.over, left, l2, c.sign))
            ed.crossings.append(Crossing(c.over, right, r2, c.sign))
            ed.vertices[index] = Vertex.zip(l2, r2, c.under_out)
        else:
            l0, r0 = ed.fresh(left), ed.fresh(right)
            ed.crossings.append(Crossing(c.over, l0, left, c.sign))
            ed.crossings.append(Crossing(c.over, r0, right, c.sign))
            ed.vertices[index] = Vertex.unzip(c.under_in, l0, r0)
        return

    if kind == ZIP:
        c_l, c_r = ed.crossing_into(left), ed.crossing_into(right)
    else:
        c_l, c_r = ed.crossing_from(left), ed.crossing_from(right)
    if (c_l is None or c_r is None or c_l.over != c_r.over or c_l.sign != c_r.sign
            or (over is not None and c_l.over != over) or c_l.over in (left, right)
            or ed.over_count(left) or ed.over_count(right)):
        raise SiteMismatch(f"У вершины {index} нет пары перекрестков R6", {"vertex": index})
    ed.crossings.remove(c_l)
    ed.crossings.remove(c_r)
    ed.arcs.discard(left)
    ed.arcs.discard(right)
    new = ed.fresh(single)
    if kind == ZIP:
        ed.vertices[index] = Vertex.zip(c_l.under_in, c_r.under_in, new)
        ed.crossings.append(Crossing(c_l.over, new, single, c_l.sign))
    else:
        ed.vertices[index] = Vertex.unzip(new, c_l.under_out, c_r.under_out)
        ed.crossings.append(Crossing(c_l.over, single, new, c_l.sign))


def apply_move(d: Diagram, move_id: str, site: Mapping[str, Any],
               direction: Direction = Direction.INSERT) -> Diagram:
    """
    Применяет локальное движение в указанном месте диаграммы.

    Места (site):
        R1: {"arc": x} или {"free_loop": True} при вставке; {"arc": x} при удалении
        R2: {"arc": x, "over": y}; при удалении arc - средняя дуга
        R3: {"arc": b1} - дуга между двумя перекрестками треугольника (только SLIDE)
        R4, R6: {"vertex": i, "arc": x} - вершина и дуга (R4: нижняя прядь, R6: верхняя)
        R5: {"vertex": i, "sign": s}

    INSERT всегда добавляет перекрестки, REMOVE убирает. Индексы вершин
    относятся к отсортированному списку d.vertices.

    Returns:
        Новая корректная диаграмма; дуги вне места движения не меняются

    Raises:
        UnknownMove: Неизвестное движение
        InvalidDirection: Направление не поддерживается движением
        SiteMismatch: Образец движения не найден в указанном месте
    """
    if move_id not in MOVE_IDS:
        raise UnknownMove(f"Неизвестное движение: {move_id}", {"move_id": move_id})
    direction = Direction(direction)
    if (move_id == "R3") != (direction is Direction.SLIDE):
        raise InvalidDirection(
            f"Движение {move_id} не поддерживает направление {direction.value}",
            {"move_id": move_id, "direction": direction.value},
        )

    ed = _Editor(d)
    if move_id in ("R1+", "R1-"):
        _r1(ed, move_id, site, direction)
    elif move_id == "R2":
        _r2(ed, site, direction)
    elif move_id == "R3":
        _r3(ed, site)
    elif move_id in ("R4z", "R4u"):
        _r4(ed, move_id, site, direction)
    elif move_id in ("R5z", "R5u"):
        _r5(ed, move_id, site, direction)
    else:
        _r6(ed, move_id, site, direction)
    result = ed.build()
    logger.debug(f"Применено движение {move_id} ({direction.value}) в {dict(site)}")
    return result


def candidate_sites(d: Diagram) -> List[Tuple[str, Dict[str, Any], Direction]]:
    """Все места, в которых применимо какое-либо движение."""
    candidates: List[Tuple[str, Dict[str, Any], Direction]] = []
    for move_id in ("R1+", "R1-"):
        if d.free_loops:
            candidates.append((move_id, {"free_loop": True}, Direction.INSERT))
        for arc in d.arcs:
            candidates.append((move_id, {"arc": arc}, Direction.INSERT))
            candidates.append((move_id, {"arc": arc}, Direction.REMOVE))
    for x in d.arcs:
        candidates.append(("R3", {"arc": x}, Direction.SLIDE))
        for y in d.arcs:
            if x != y:
                candidates.append(("R2", {"arc": x, "over": y}, Direction.INSERT))
                candidates.append(("R2", {"arc": x, "over": y}, Direction.REMOVE))
    for i, v in enumerate(d.vertices):
        suffix = "z" if v.kind == ZIP else "u"
        for direction in (Direction.INSERT, Direction.REMOVE):
            for s in (1, -1):
                candidates.append(("R5" + suffix, {"vertex": i, "sign": s}, direction))
            candidates.append(("R6" + suffix, {"vertex": i}, direction))
            for arc in d.arcs:
                candidates.append(("R4" + suffix, {"vertex": i, "arc": arc}, direction))

    applicable = []
    for move_id, site, direction in candidates:
        try:
            apply_move(d, move_id, site, direction)
        except (SiteMismatch, InvalidDirection):
            continue
        applicable.append((move_id, site, direction))
    return applicable


def random_move_sequence(d: Diagram, rng, steps: int) -> Tuple[Diagram, List[Tuple[str, Dict[str, Any], str]]]:
    """
    Применяет steps случайных применимых движений.

    Args:
        d: Исходная диаграмма
        rng: numpy.random.Generator
        steps: Число движений

    Returns:
        Итоговая диаграмма и журнал (move_id, site, direction)
    """
    history = []
    for _ in range(steps):
        options = candidate_sites(d)
        if not options:
            break
        move_id, site, direction = options[int(rng.integers(len(options)))]
        d = apply_move(d, move_id, site, direction)
        history.append((move_id, site, direction.value))
    return d, history
