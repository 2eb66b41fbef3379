"""
Раскраски диаграмм квандлами, квалгебрами и скавндлами.

Перебор идет с распространением ограничений: перекресток или вершина,
у которых известны все цвета кроме одного, вычисляют последний. Ветвление
выполняется только по дугам, цвет которых не вынужден.
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

from core.algebra import FiniteQualgebra, FiniteSquandle, Structure
from core.diagram import Diagram, MovePair
from core.exceptions import ModeMismatch, UnknownArc

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    QUALGEBRA = "qualgebra"
    ISOSCELES = "isosceles"
    SQUANDLE = "squandle"
    QUANDLE = "quandle"


@dataclass(frozen=True)
class Coloring:
    """Раскраска: цвет каждой дуги и по одному цвету на свободную петлю."""

    assignment: Tuple[Tuple[str, int], ...]
    mode: Mode
    loops: Tuple[int, ...] = ()

    def as_dict(self) -> Dict[str, int]:
        return dict(self.assignment)

    def __getitem__(self, arc: str) -> int:
        return self.as_dict()[arc]

    def to_dict(self, names: Optional[Tuple[str, ...]] = None) -> Dict:
        label = (lambda c: names[c]) if names else (lambda c: c)
        return {
            "assignment": {arc: label(c) for arc, c in self.assignment},
            "loops": [label(c) for c in self.loops],
        }


@dataclass(frozen=True)
class TopologicalVerdict:
    move_id: str
    passed: bool
    lhs_colorings: int
    rhs_colorings: int
    witness: Optional[Dict] = field(default=None)

    def to_dict(self) -> Dict:
        return {
            "move_id": self.move_id,
            "passed": self.passed,
            "lhs_colorings": self.lhs_colorings,
            "rhs_colorings": self.rhs_colorings,
            "witness": self.witness,
        }


def _check_mode(s: Structure, d: Diagram, mode: Mode) -> Mode:
    mode = Mode(mode)
    if mode in (Mode.QUALGEBRA, Mode.ISOSCELES) and not isinstance(s, FiniteQualgebra):
        raise ModeMismatch(
            f"Режим {mode.value} требует квалгебру, получено: {s.kind}",
            {"mode": mode.value, "kind": s.kind},
        )
    if mode is Mode.SQUANDLE and not isinstance(s, FiniteSquandle):
        raise ModeMismatch(
            f"Режим squandle требует скавндл, получено: {s.kind}",
            {"mode": mode.value, "kind": s.kind},
        )
    if mode is Mode.QUANDLE and d.vertices:
        raise ModeMismatch(
            "Квандловые раскраски определены только для диаграмм без вершин",
            {"mode": mode.value, "vertices": len(d.vertices)},
        )
    return mode


class _Rules:
    """Таблицы структуры в виде списков и правила для вершин в выбранном режиме."""

    def __init__(self, s: Structure, mode: Mode):
        self.n = s.n
        self.mode = mode
        self.lhd = s.lhd.tolist()
        self.lhd_inv = s.lhd_inv.tolist()
        self.right_factors = self.left_factors = None
        if mode is Mode.QUALGEBRA or mode is Mode.ISOSCELES:
            self.mul = s.diamond.tolist()
            self.square = [self.mul[a][a] for a in range(self.n)]
            if mode is Mode.QUALGEBRA:
                # right_factors[a][c]: все x с a ◇ x = c; left_factors[b][c]: все x с x ◇ b = c
                self.right_factors = [[tuple(x for x in range(self.n) if self.mul[a][x] == c)
                                       for c in range(self.n)] for a in range(self.n)]
                self.left_factors = [[tuple(x for x in range(self.n) if self.mul[x][b] == c)
                                      for c in range(self.n)] for b in range(self.n)]
        elif mode is Mode.SQUANDLE:
            self.mul = None
            self.square = s.square.tolist()
        else:
            self.mul = self.square = None

    def op(self, a: int, b: int, sign: int) -> int:
        return self.lhd[a][b] if sign > 0 else self.lhd_inv[a][b]

    def pair_rule_is_diagonal(self) -> bool:
        return self.mode is not Mode.QUALGEBRA

    def single_color(self, left: int, right: int) -> Optional[int]:
        """Цвет третьей дуги вершины по цветам сонаправленной пары (None - противоречие)."""
        if self.pair_rule_is_diagonal():
            return self.square[left] if left == right else None
        return self.mul[left][right]


def _satisfies(rules: _Rules, d: Diagram, colors: Mapping[str, int]) -> bool:
    for c in d.crossings:
        if colors[c.under_out] != rules.op(colors[c.under_in], colors[c.over], c.sign):
            return False
    for v in d.vertices:
        left, right = (colors[a] for a in v.pair)
        if rules.single_color(left, right) != colors[v.single]:
            return False
    return True


def is_valid_coloring(s: Structure, d: Diagram, colors: Mapping[str, int], mode: Mode) -> bool:
    """Проверяет, что полное назначение цветов удовлетворяет всем правилам."""
    return _satisfies(_Rules(s, _check_mode(s, d, mode)), d, colors)


def _solve(rules: _Rules, d: Diagram, fixed: Mapping[str, int]) -> List[Dict[str, int]]:
    arcs = list(d.arcs)
    crossings = [(c.over, c.under_in, c.under_out, c.sign) for c in d.crossings]
    vertices = [(v.pair[0], v.pair[1], v.single) for v in d.vertices]
    diagonal = rules.pair_rule_is_diagonal()
    solutions: List[Dict[str, int]] = []

    def set_color(colors: Dict[str, int], arc: str, value: Optional[int]) -> Optional[bool]:
        """True - назначено, False - уже было, None - противоречие."""
        if value is None:
            return None
        current = colors.get(arc)
        if current is None:
            colors[arc] = value
            return True
        return False if current == value else None

    def propagate(colors: Dict[str, int]) -> bool:
        changed = True
        while changed:
            changed = False
            for over, u_in, u_out, sign in crossings:
                o = colors.get(over)
                if o is None:
                    continue
                a, b = colors.get(u_in), colors.get(u_out)
                if a is not None:
                    status = set_color(colors, u_out, rules.op(a, o, sign))
                elif b is not None:
                    status = set_color(colors, u_in, rules.op(b, o, -sign))
                else:
                    continue
                if status is None:
                    return False
                changed |= status
            for left, right, single in vertices:
                l, r = colors.get(left), colors.get(right)
                if diagonal:
                    known = l if l is not None else r
                    if known is None:
                        continue
                    statuses = (set_color(colors, left, known), set_color(colors, right, known),
                                set_color(colors, single, rules.square[known]))
                    if None in statuses:
                        return False
                    changed |= any(statuses)
                elif l is not None and r is not None:
                    status = set_color(colors, single, rules.mul[l][r])
                    if status is None:
                        return False
                    changed |= status
                elif (l is None) != (r is None) and colors.get(single) is not None:
                    # обращение ◇ по строке или столбцу таблицы
                    out = colors[single]
                    if l is not None:
                        options, target = rules.right_factors[l][out], right
                    else:
                        options, target = rules.left_factors[r][out], left
                    if not options:
                        return False
                    if len(options) == 1:
                        status = set_color(colors, target, options[0])
                        if status is None:
                            return False
                        changed |= status
        return True

    def search(colors: Dict[str, int]) -> None:
        if not propagate(colors):
            return
        free = next((a for a in arcs if a not in colors), None)
        if free is None:
            solutions.append(colors)
            return
        for value in range(rules.n):
            branch = dict(colors)
            branch[free] = value
            search(branch)

    search(dict(fixed))
    return solutions


def _order(colorings: List[Coloring]) -> List[Coloring]:
    return sorted(colorings, key=lambda c: (tuple(v for _, v in c.assignment), c.loops))


def enumerate_colorings(s: Structure, d: Diagram, mode: Mode = Mode.QUALGEBRA,
                        boundary_fix: Optional[Mapping[str, int]] = None) -> List[Coloring]:
    """
    Все раскраски диаграммы в заданном режиме.

    Args:
        s: Структура (квандл, квалгебра или скавндл)
        d: Диаграмма или тэнгл
        mode: qualgebra, isosceles, squandle или quandle
        boundary_fix: Заранее заданные цвета граничных дуг

    Returns:
        Список раскрасок в детерминированном порядке

    Raises:
        ModeMismatch: Если режим не подходит к структуре или диаграмме
        UnknownArc: Если boundary_fix ссылается на дугу вне диаграммы
    """
    mode = _check_mode(s, d, mode)
    fixed = dict(boundary_fix or {})
    for arc, color in fixed.items():
        if arc not in d.arcs:
            raise UnknownArc(f"Дуга '{arc}' отсутствует в диаграмме", {"arc": arc})
        if not 0 <= color < s.n:
            raise ValueError(f"Цвет {color} вне носителя размера {s.n}")

    rules = _Rules(s, mode)
    partial = _solve(rules, d, fixed)
    result = []
    for colors in partial:
        assignment = tuple(sorted(colors.items()))
        for loops in itertools.product(range(s.n), repeat=d.free_loops):
            result.append(Coloring(assignment, mode, tuple(loops)))
    logger.debug(f"Найдено {len(result)} раскрасок в режиме {mode.value}")
    return _order(result)


def count_colorings(s: Structure, d: Diagram, mode: Mode = Mode.QUALGEBRA,
                    boundary_fix: Optional[Mapping[str, int]] = None) -> int:
    """Число раскрасок; свободные петли дают множитель |Q| без перечисления."""
    mode = _check_mode(s, d, mode)
    partial = _solve(_Rules(s, mode), d, dict(boundary_fix or {}))
    return len(partial) * s.n ** d.free_loops


def count_isosceles(s: FiniteQualgebra, d: Diagram) -> int:
    """Число равнобедренных раскрасок: сонаправленные дуги вершины одного цвета."""
    return count_colorings(s, d, Mode.ISOSCELES)


def brute_force_colorings(s: Structure, d: Diagram, mode: Mode = Mode.QUALGEBRA) -> List[Coloring]:
    """Полный перебор |Q|^#arcs назначений без распространения."""
    mode = _check_mode(s, d, mode)
    rules = _Rules(s, mode)
    arcs = list(d.arcs)
    result = []
    for values in itertools.product(range(s.n), repeat=len(arcs)):
        colors = dict(zip(arcs, values))
        if _satisfies(rules, d, colors):
            for loops in itertools.product(range(s.n), repeat=d.free_loops):
                result.append(Coloring(tuple(sorted(colors.items())), mode, tuple(loops)))
    return _order(result)


def port_colors(d: Diagram, coloring: Coloring) -> Tuple[int, ...]:
    """Цвета граничных портов: входы, затем выходы."""
    colors = coloring.as_dict()
    return tuple(colors[a] for a in d.boundary.ports) if d.boundary else ()


def boundary_profile(s: Structure, d: Diagram, mode: Mode) -> Counter:
    """Счетчик раскрасок тэнгла по наборам цветов портов."""
    return Counter(port_colors(d, c) for c in enumerate_colorings(s, d, mode))


def check_topological(s: Structure, mp: MovePair, mode: Mode = Mode.QUALGEBRA) -> TopologicalVerdict:
    """
    Проверяет, что у обеих частей движения одинаковое число продолжений
    каждой раскраски граничных портов.

    Returns:
        TopologicalVerdict; при провале witness содержит цвета портов и
        числа продолжений слева и справа
    """
    lhs = boundary_profile(s, mp.lhs, mode)
    rhs = boundary_profile(s, mp.rhs, mode)
    witness = None
    for ports in sorted(set(lhs) | set(rhs)):
        if lhs[ports] != rhs[ports]:
            witness = {"ports": list(ports), "lhs": lhs[ports], "rhs": rhs[ports]}
            logger.info(f"Движение {mp.move_id} не сохраняет раскраски: {witness}")
            break
    return TopologicalVerdict(
        move_id=mp.move_id,
        passed=witness is None,
        lhs_colorings=sum(lhs.values()),
        rhs_colorings=sum(rhs.values()),
        witness=witness,
    )
