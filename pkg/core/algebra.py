"""
Конечные квандлы, квалгебры и скавндлы.

Элементы носителя - плотные индексы 0..n-1, имена хранятся только как
метаданные. Таблицы операций - неизменяемые массивы numpy, строка таблицы
соответствует левому аргументу. Проверка аксиом выполняется при создании
значения: все конструкторы make_* либо возвращают корректную структуру,
либо поднимают AxiomViolation со свидетелем.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import (
    AxiomViolation,
    GroupTableError,
    KindMismatch,
    NonBijectiveTranslation,
    TableShapeError,
    UnknownName,
)

logger = logging.getLogger(__name__)

# Индексы элементов P = {p, q, r, s}
P, Q, R, S = 0, 1, 2, 3
P_NAMES = ("p", "q", "r", "s")
TAU = (Q, P, R, S)


def _frozen(table: Iterable, ndim: int) -> np.ndarray:
    """Преобразует таблицу в неизменяемый целочисленный массив."""
    arr = np.array(table, dtype=np.int64)
    if arr.ndim != ndim:
        raise TableShapeError(f"Ожидалась таблица размерности {ndim}, получена {arr.ndim}")
    arr.setflags(write=False)
    return arr


def _first_mismatch(lhs: np.ndarray, rhs: np.ndarray) -> Optional[tuple]:
    bad = np.argwhere(lhs != rhs)
    if len(bad) == 0:
        return None
    return tuple(int(v) for v in bad[0])


def _check_range(table: np.ndarray, n: int, name: str) -> None:
    if table.size and (table.min() < 0 or table.max() >= n):
        raise TableShapeError(f"Таблица {name} содержит элементы вне носителя 0..{n - 1}")


@dataclass(frozen=True)
class Carrier:
    """
    Носитель структуры.

    Attributes:
        n: Число элементов
        names: Необязательные отображаемые имена элементов
    """

    n: int
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise TableShapeError(f"Носитель должен быть непустым, получено n={self.n}")
        if self.names is not None:
            names = tuple(str(x) for x in self.names)
            object.__setattr__(self, "names", names)
            if len(names) != self.n:
                raise TableShapeError(f"Ожидалось {self.n} имен, получено {len(names)}")
            if len(set(names)) != len(names):
                raise TableShapeError("Имена элементов должны быть различны")

    def name(self, i: int) -> str:
        return self.names[i] if self.names else str(i)

    def index(self, label: Union[str, int]) -> int:
        """Возвращает индекс элемента по имени или по строке с числом."""
        if isinstance(label, (int, np.integer)):
            return int(label)
        if self.names and label in self.names:
            return self.names.index(label)
        try:
            return int(label)
        except ValueError:
            raise UnknownName(f"Элемент '{label}' не найден в носителе", {"element": label})


@dataclass(frozen=True, eq=False)
class Quandle:
    carrier: Carrier
    lhd: np.ndarray
    lhd_inv: np.ndarray

    kind = "quandle"

    @property
    def n(self) -> int:
        return self.carrier.n

    @property
    def quandle(self) -> "Quandle":
        return self

    def op(self, a: int, b: int, sign: int = 1) -> int:
        """a ⊲ b при sign=+1 и a ⊲̃ b при sign=-1."""
        return int(self.lhd[a, b] if sign > 0 else self.lhd_inv[a, b])

    def translation(self, a: int) -> Tuple[int, ...]:
        """Правый сдвиг S_a: x -> x ⊲ a."""
        return tuple(int(x) for x in self.lhd[:, a])

    def is_trivial(self) -> bool:
        return bool((self.lhd == np.arange(self.n)[:, None]).all())


@dataclass(frozen=True, eq=False)
class FiniteQualgebra:
    quandle: Quandle
    diamond: np.ndarray
    verified: bool = True

    kind = "qualgebra"

    @property
    def n(self) -> int:
        return self.quandle.n

    @property
    def carrier(self) -> Carrier:
        return self.quandle.carrier

    @property
    def lhd(self) -> np.ndarray:
        return self.quandle.lhd

    @property
    def lhd_inv(self) -> np.ndarray:
        return self.quandle.lhd_inv

    def op(self, a: int, b: int, sign: int = 1) -> int:
        return self.quandle.op(a, b, sign)

    def mul(self, a: int, b: int) -> int:
        """a ◇ b"""
        return int(self.diamond[a, b])

    def sq(self, a: int) -> int:
        return int(self.diamond[a, a])

    def is_trivial(self) -> bool:
        return self.quandle.is_trivial()


@dataclass(frozen=True, eq=False)
class FiniteSquandle:
    quandle: Quandle
    square: np.ndarray
    verified: bool = True

    kind = "squandle"

    @property
    def n(self) -> int:
        return self.quandle.n

    @property
    def carrier(self) -> Carrier:
        return self.quandle.carrier

    @property
    def lhd(self) -> np.ndarray:
        return self.quandle.lhd

    @property
    def lhd_inv(self) -> np.ndarray:
        return self.quandle.lhd_inv

    def op(self, a: int, b: int, sign: int = 1) -> int:
        return self.quandle.op(a, b, sign)

    def sq(self, a: int) -> int:
        return int(self.square[a])

    def is_trivial(self) -> bool:
        return self.quandle.is_trivial()


Structure = Union[Quandle, FiniteQualgebra, FiniteSquandle]


@dataclass(frozen=True, eq=False)
class GroupTable:
    carrier: Carrier
    mul: np.ndarray
    unit: int
    inv: np.ndarray

    @property
    def n(self) -> int:
        return self.carrier.n


@dataclass(frozen=True)
class LocalData:
    """
    Локальные данные элемента a.

    Attributes:
        translation: Перестановка S_a
        fix: Fix(a) = {x : x ⊲ a = x}
        stab: Stab(a) = {x : a ⊲ x = a}
        generated: Подструктура Q_a, порожденная a
    """

    translation: Tuple[int, ...]
    fix: frozenset
    stab: frozenset
    generated: frozenset


def make_quandle(carrier: Carrier, lhd: Iterable) -> Quandle:
    """
    Создает квандл по таблице операции ⊲ и проверяет аксиомы.

    Args:
        carrier: Носитель
        lhd: Таблица n×n, lhd[a][b] = a ⊲ b

    Returns:
        Quandle с вычисленной таблицей ⊲̃

    Raises:
        TableShapeError: Если таблица имеет неверную форму
        AxiomViolation: Если нарушена Q_Idem, Q_Inv или Q_SD
        NonBijectiveTranslation: Если некоторый S_b не является перестановкой
    """
    n = carrier.n
    table = _frozen(lhd, 2)
    if table.shape != (n, n):
        raise TableShapeError(f"Таблица ⊲ должна иметь форму {n}×{n}, получено {table.shape}")
    _check_range(table, n, "⊲")

    idx = np.arange(n)
    bad = np.flatnonzero(table[idx, idx] != idx)
    if len(bad):
        raise AxiomViolation("Q_Idem", (int(bad[0]),))

    inverse = np.empty_like(table)
    for b in range(n):
        column = table[:, b]
        if len(set(column.tolist())) != n:
            raise NonBijectiveTranslation(b)
        inverse[column, b] = idx
    inverse.setflags(write=False)

    # (a ⊲ b) ⊲̃ b = a и (a ⊲̃ b) ⊲ b = a
    witness = _first_mismatch(inverse[table, idx[None, :]], np.broadcast_to(idx[:, None], (n, n)))
    if witness is None:
        witness = _first_mismatch(table[inverse, idx[None, :]], np.broadcast_to(idx[:, None], (n, n)))
    if witness is not None:
        raise AxiomViolation("Q_Inv", witness)

    # (a ⊲ b) ⊲ c = (a ⊲ c) ⊲ (b ⊲ c)
    lhs = table[table[:, :, None], idx[None, None, :]]
    rhs = table[table[:, None, :], table[None, :, :]]
    witness = _first_mismatch(lhs, rhs)
    if witness is not None:
        raise AxiomViolation("Q_SD", witness)

    logger.debug(f"Создан квандл на {n} элементах")
    return Quandle(carrier=carrier, lhd=table, lhd_inv=inverse)


def _qualgebra_violation(q: Quandle, diamond: np.ndarray) -> Optional[Tuple[str, tuple]]:
    n = q.n
    idx = np.arange(n)
    lhd = q.lhd

    # a ⊲ (b ◇ c) = (a ⊲ b) ⊲ c
    lhs = lhd[idx[:, None, None], diamond[None, :, :]]
    rhs = lhd[lhd[:, :, None], idx[None, None, :]]
    witness = _first_mismatch(lhs, rhs)
    if witness is not None:
        return "QA_Comp", witness

    # (a ◇ b) ⊲ c = (a ⊲ c) ◇ (b ⊲ c)
    lhs = lhd[diamond[:, :, None], idx[None, None, :]]
    rhs = diamond[lhd[:, None, :], lhd[None, :, :]]
    witness = _first_mismatch(lhs, rhs)
    if witness is not None:
        return "QA_D", witness

    # a ◇ b = b ◇ (a ⊲ b)
    witness = _first_mismatch(diamond, diamond[idx[None, :], lhd])
    if witness is not None:
        return "QA_Comm", witness

    # Q_SD следует из QA_Comp и QA_Comm; проверка согласованности
    lhs = lhd[lhd[:, :, None], idx[None, None, :]]
    rhs = lhd[lhd[:, None, :], lhd[None, :, :]]
    witness = _first_mismatch(lhs, rhs)
    if witness is not None:
        return "Q_SD", witness
    return None


def is_qualgebra_table(q: Quandle, diamond: np.ndarray) -> bool:
    """Проверяет аксиомы квалгебры без создания значения."""
    return _qualgebra_violation(q, np.asarray(diamond)) is None


def make_qualgebra(q: Quandle, diamond: Iterable, check: bool = True) -> FiniteQualgebra:
    """
    Дополняет квандл операцией ◇ до квалгебры.

    Args:
        q: Квандл
        diamond: Таблица n×n, diamond[a][b] = a ◇ b
        check: Проверять ли аксиомы. При check=False значение помечается
            verified=False и используется для экспериментов с кандидатами.

    Returns:
        FiniteQualgebra

    Raises:
        AxiomViolation: Если нарушена одна из аксиом QA_Comp, QA_D, QA_Comm
    """
    table = _frozen(diamond, 2)
    if table.shape != (q.n, q.n):
        raise TableShapeError(f"Таблица ◇ должна иметь форму {q.n}×{q.n}, получено {table.shape}")
    _check_range(table, q.n, "◇")
    if not check:
        return FiniteQualgebra(quandle=q, diamond=table, verified=False)

    violation = _qualgebra_violation(q, table)
    if violation is not None:
        axiom, witness = violation
        logger.debug(f"Таблица ◇ отклонена: {axiom} на {witness}")
        raise AxiomViolation(axiom, witness)
    return FiniteQualgebra(quandle=q, diamond=table)


def _squandle_violation(q: Quandle, square: np.ndarray) -> Optional[Tuple[str, tuple]]:
    idx = np.arange(q.n)
    lhd = q.lhd

    # a ⊲ b² = (a ⊲ b) ⊲ b
    witness = _first_mismatch(lhd[idx[:, None], square[None, :]], lhd[lhd, idx[None, :]])
    if witness is not None:
        return "SQ_1", witness

    # a² ⊲ b = (a ⊲ b)²
    witness = _first_mismatch(lhd[square[:, None], idx[None, :]], square[lhd])
    if witness is not None:
        return "SQ_2", witness
    return None


def is_squandle_map(q: Quandle, square: np.ndarray) -> bool:
    return _squandle_violation(q, np.asarray(square)) is None


def make_trivial_qualgebra(q: Quandle, diamond: Iterable) -> FiniteQualgebra:
    """
    Квалгебра над тривиальным квандлом.

    Над тривиальным квандлом QA_Comp и QA_D выполняются для любой таблицы,
    а QA_Comm сводится к коммутативности ◇, поэтому полная проверка не нужна.

    Raises:
        KindMismatch: Если квандл нетривиален
        AxiomViolation: Если таблица ◇ не коммутативна
    """
    if not q.is_trivial():
        raise KindMismatch("Ожидался тривиальный квандл", {"n": q.n})
    table = _frozen(diamond, 2)
    if table.shape != (q.n, q.n):
        raise TableShapeError(f"Таблица ◇ должна иметь форму {q.n}×{q.n}, получено {table.shape}")
    _check_range(table, q.n, "◇")
    witness = _first_mismatch(table, table.T)
    if witness is not None:
        raise AxiomViolation("QA_Comm", witness)
    return FiniteQualgebra(quandle=q, diamond=table)


def make_squandle(q: Quandle, square: Iterable, check: bool = True) -> FiniteSquandle:
    """
    Дополняет квандл операцией возведения в квадрат до скавндла.

    Raises:
        AxiomViolation: Если нарушена SQ_1 или SQ_2
    """
    table = _frozen(square, 1)
    if table.shape != (q.n,):
        raise TableShapeError(f"Отображение квадрата должно иметь длину {q.n}, получено {table.shape}")
    _check_range(table, q.n, "²")
    if not check:
        return FiniteSquandle(quandle=q, square=table, verified=False)

    violation = _squandle_violation(q, table)
    if violation is not None:
        raise AxiomViolation(*violation)
    return FiniteSquandle(quandle=q, square=table)


def squandle_of(qa: FiniteQualgebra) -> FiniteSquandle:
    """Скавндл (Q, ⊲, a ↦ a ◇ a), лежащий под квалгеброй."""
    return make_squandle(qa.quandle, np.diagonal(qa.diamond).copy())


# --- группы ---

def make_group(carrier: Carrier, mul: Iterable, unit: int, inv: Iterable) -> GroupTable:
    """
    Создает групповую таблицу и проверяет аксиомы группы.

    Raises:
        GroupTableError: Если нарушена ассоциативность, закон единицы или обратного
    """
    n = carrier.n
    table = _frozen(mul, 2)
    inverse = _frozen(inv, 1)
    if table.shape != (n, n) or inverse.shape != (n,):
        raise GroupTableError("Неверная форма групповой таблицы")
    _check_range(table, n, "mul")
    _check_range(inverse, n, "inv")
    idx = np.arange(n)

    if not ((table[unit, :] == idx).all() and (table[:, unit] == idx).all()):
        raise GroupTableError(f"Элемент {unit} не является единицей", {"unit": unit})
    bad = np.flatnonzero((table[idx, inverse] != unit) | (table[inverse, idx] != unit))
    if len(bad):
        raise GroupTableError(f"Неверный обратный элемент для {int(bad[0])}", {"element": int(bad[0])})
    witness = _first_mismatch(table[table[:, :, None], idx[None, None, :]],
                              table[idx[:, None, None], table[None, :, :]])
    if witness is not None:
        raise GroupTableError(f"Нарушена ассоциативность на {witness}", {"witness": list(witness)})
    return GroupTable(carrier=carrier, mul=table, unit=int(unit), inv=inverse)


def group_from_elements(elements: Sequence, product: Callable, names: Optional[Sequence[str]] = None) -> GroupTable:
    """Строит GroupTable по списку элементов и функции умножения."""
    position = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    mul = [[position[product(a, b)] for b in elements] for a in elements]
    unit = next(i for i in range(n) if all(mul[i][j] == j for j in range(n)))
    inv = [next(j for j in range(n) if mul[i][j] == unit) for i in range(n)]
    return make_group(Carrier(n, tuple(names) if names else None), mul, unit, inv)


def cyclic_group(n: int) -> GroupTable:
    return group_from_elements(list(range(n)), lambda a, b: (a + b) % n)


def cycle_notation(perm: Sequence[int]) -> str:
    """Запись перестановки в виде циклов с нумерацией с единицы: (0,2,1) -> '(23)'."""
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle, x = [], start
        while x not in seen:
            seen.add(x)
            cycle.append(str(x + 1))
            x = perm[x]
        cycles.append("(" + "".join(cycle) + ")")
    return "".join(cycles) or "Id"


def symmetric_group(k: int) -> GroupTable:
    """
    Симметрическая группа S_k.

    Элементы упорядочены лексикографически как кортежи образов,
    тождественная перестановка идет первой. Произведение ab - сначала a,
    затем b.
    """
    perms = sorted(itertools.permutations(range(k)))
    return group_from_elements(
        perms,
        lambda a, b: tuple(b[a[i]] for i in range(k)),
        names=[cycle_notation(p) for p in perms],
    )


def _conjugation(g: GroupTable) -> Quandle:
    idx = np.arange(g.n)
    lhd = g.mul[g.mul[g.inv[None, :], idx[:, None]], idx[None, :]]
    return make_quandle(g.carrier, lhd)


def group_qualgebra(g: GroupTable) -> FiniteQualgebra:
    """Групповая квалгебра: a ⊲ b = b⁻¹ab, a ◇ b = ab."""
    return make_qualgebra(_conjugation(g), g.mul)


def group_squandle(g: GroupTable) -> FiniteSquandle:
    """Групповой скавндл: сопряжение и a ↦ a·a."""
    idx = np.arange(g.n)
    return make_squandle(_conjugation(g), g.mul[idx, idx])


def trivial_quandle(n: int) -> Quandle:
    return make_quandle(Carrier(n), np.repeat(np.arange(n)[:, None], n, axis=1))


def dihedral_quandle(n: int) -> Quandle:
    """Диэдральный квандл Z/n с операцией a ⊲ b = 2b - a mod n."""
    idx = np.arange(n)
    return make_quandle(Carrier(n), (2 * idx[None, :] - idx[:, None]) % n)


# --- структурные отображения ---

def operations(structure: Structure) -> List[np.ndarray]:
    """Таблицы всех операций структуры в порядке ⊲, ⊲̃, (◇ | ²)."""
    tables = [structure.lhd, structure.lhd_inv]
    if structure.kind == "qualgebra":
        tables.append(structure.diamond)
    elif structure.kind == "squandle":
        tables.append(structure.square)
    return tables


def is_closed(structure: Structure, subset: Iterable[int]) -> bool:
    members = set(subset)
    idx = np.array(sorted(members))
    for table in operations(structure):
        values = table[idx] if table.ndim == 1 else table[np.ix_(idx, idx)]
        if not set(values.ravel().tolist()) <= members:
            return False
    return True


def closure(structure: Structure, seed: Iterable[int]) -> Tuple[Tuple[int, ...], Structure]:
    """
    Наименьшее замкнутое подмножество, содержащее seed.

    Args:
        structure: Квандл, квалгебра или скавндл
        seed: Непустое множество элементов

    Returns:
        Кортеж (отсортированные элементы, индуцированная подструктура)
    """
    members = set(int(x) for x in seed)
    if not members:
        raise ValueError("Множество-затравка должно быть непустым")
    binary = [t for t in operations(structure) if t.ndim == 2]
    unary = [t for t in operations(structure) if t.ndim == 1]

    frontier = list(members)
    while frontier:
        new = set()
        for a in frontier:
            for u in unary:
                new.add(int(u[a]))
            for b in list(members):
                for t in binary:
                    new.add(int(t[a, b]))
                    new.add(int(t[b, a]))
        new -= members
        members |= new
        frontier = list(new)

    elements = tuple(sorted(members))
    return elements, sub_structure(structure, elements)


def sub_structure(structure: Structure, subset: Sequence[int]) -> Structure:
    """
    Индуцированная структура на замкнутом подмножестве.

    Элементы перенумеровываются 0..k-1 в порядке возрастания, имена
    сохраняются.

    Raises:
        ValueError: Если подмножество не замкнуто
    """
    elements = sorted(set(int(x) for x in subset))
    if not is_closed(structure, elements):
        raise ValueError(f"Подмножество {elements} не замкнуто относительно операций")
    position = {e: i for i, e in enumerate(elements)}
    idx = np.array(elements)
    relabel = np.vectorize(position.__getitem__, otypes=[np.int64])

    names = tuple(structure.carrier.name(e) for e in elements)
    carrier = Carrier(len(elements), names)
    q = make_quandle(carrier, relabel(structure.lhd[np.ix_(idx, idx)]))
    if structure.kind == "qualgebra":
        return make_qualgebra(q, relabel(structure.diamond[np.ix_(idx, idx)]))
    if structure.kind == "squandle":
        return make_squandle(q, relabel(structure.square[idx]))
    return q


def local_data(structure: Structure, a: int) -> LocalData:
    """
    Вычисляет S_a, Fix(a), Stab(a) и Q_a.

    Raises:
        AxiomViolation: Если Fix(a) или Stab(a) не замкнуты (структура некорректна)
    """
    n = structure.n
    lhd = structure.lhd
    fix = frozenset(x for x in range(n) if lhd[x, a] == x)
    stab = frozenset(x for x in range(n) if lhd[a, x] == a)
    generated, _ = closure(structure, [a])
    for label, subset in (("Fix", fix), ("Stab", stab)):
        if not is_closed(structure, subset):
            logger.error(f"{label}({a}) не замкнуто в структуре вида {structure.kind}")
            raise AxiomViolation(f"{label}-closure", (a,))
    return LocalData(
        translation=structure.quandle.translation(a),
        fix=fix,
        stab=stab,
        generated=frozenset(generated),
    )


def compose(s: Sequence[int], t: Sequence[int]) -> Tuple[int, ...]:
    """Композиция правых действий: x -> t(s(x))."""
    return tuple(t[s[x]] for x in range(len(s)))


def translation_group(structure: Structure) -> Tuple[frozenset, bool]:
    """
    Множество {S_a} и признак того, что оно является подгруппой Aut(Q).
    """
    images = frozenset(structure.quandle.translation(a) for a in range(structure.n))
    closed = all(compose(s, t) in images for s in images for t in images)
    inverse_closed = all(tuple(np.argsort(s).tolist()) in images for s in images)
    return images, closed and inverse_closed


# --- изоморфизмы ---

def _cycle_type(perm: Sequence[int]) -> Tuple[int, ...]:
    seen, lengths = set(), []
    for start in range(len(perm)):
        if start in seen:
            continue
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths))


def element_fingerprints(structure: Structure) -> List[tuple]:
    """Инварианты элементов, сохраняемые любым изоморфизмом."""
    n = structure.n
    lhd = structure.lhd
    prints = []
    for a in range(n):
        fp = [
            _cycle_type(lhd[:, a]),
            int((lhd[:, a] == np.arange(n)).sum()),
            int((lhd[a, :] == a).sum()),
        ]
        if structure.kind == "qualgebra":
            row = structure.diamond[a]
            fp.append(tuple(sorted(np.unique(row, return_counts=True)[1].tolist())))
            fp.append(int(structure.diamond[a, a] == a))
            fp.append(int((structure.diamond == a).sum()))
        elif structure.kind == "squandle":
            fp.append(int(structure.square[a] == a))
            fp.append(int((structure.square == a).sum()))
        prints.append(tuple(fp))
    return prints


def _binary_tables(structure: Structure) -> List[np.ndarray]:
    tables = [structure.lhd]
    if structure.kind == "qualgebra":
        tables.append(structure.diamond)
    return tables


def find_isomorphism(a: Structure, b: Structure) -> Optional[Tuple[int, ...]]:
    """
    Ищет биекцию носителей, согласованную со всеми операциями.

    Перебор ведется по элементам с совпадающими отпечатками; каждое
    присваивание сразу распространяется через таблицы операций.

    Args:
        a: Первая структура
        b: Вторая структура того же вида

    Returns:
        Кортеж f с f[x] = образ x, либо None

    Raises:
        KindMismatch: Если структуры разного вида
    """
    if a.kind != b.kind:
        raise KindMismatch(f"Нельзя сравнивать {a.kind} и {b.kind}", {"left": a.kind, "right": b.kind})
    if a.n != b.n:
        return None
    fa, fb = element_fingerprints(a), element_fingerprints(b)
    if sorted(fa) != sorted(fb):
        return None

    n = a.n
    tables_a, tables_b = _binary_tables(a), _binary_tables(b)
    unary_a = a.square if a.kind == "squandle" else None
    unary_b = b.square if b.kind == "squandle" else None
    candidates = {x: [y for y in range(n) if fb[y] == fa[x]] for x in range(n)}
    order = sorted(range(n), key=lambda x: (len(candidates[x]), x))

    def propagate(mapping: Dict[int, int], used: set, x: int, y: int) -> bool:
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            if x in mapping:
                if mapping[x] != y:
                    return False
                continue
            if y in used or fb[y] != fa[x]:
                return False
            mapping[x] = y
            used.add(y)
            if unary_a is not None:
                stack.append((int(unary_a[x]), int(unary_b[y])))
            for u in list(mapping):
                v = mapping[u]
                for ta, tb in zip(tables_a, tables_b):
                    stack.append((int(ta[x, u]), int(tb[y, v])))
                    stack.append((int(ta[u, x]), int(tb[v, y])))
        return True

    def search(mapping: Dict[int, int], used: set) -> Optional[Dict[int, int]]:
        if len(mapping) == n:
            return mapping
        x = next(v for v in order if v not in mapping)
        for y in candidates[x]:
            if y in used:
                continue
            trial, trial_used = dict(mapping), set(used)
            if propagate(trial, trial_used, x, y):
                found = search(trial, trial_used)
                if found is not None:
                    return found
        return None

    found = search({}, set())
    if found is None:
        return None
    return tuple(found[x] for x in range(n))


def relabel_structure(structure: Structure, perm: Sequence[int]) -> Structure:
    """
    Переносит структуру вдоль биекции perm (элемент x становится perm[x]).
    """
    n = structure.n
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    names = None
    if structure.carrier.names:
        names = tuple(structure.carrier.names[inv[i]] for i in range(n))
    carrier = Carrier(n, names)
    lhd = perm[structure.lhd[np.ix_(inv, inv)]]
    q = make_quandle(carrier, lhd)
    if structure.kind == "qualgebra":
        return make_qualgebra(q, perm[structure.diamond[np.ix_(inv, inv)]], check=structure.verified)
    if structure.kind == "squandle":
        return make_squandle(q, perm[structure.square[inv]], check=structure.verified)
    return q


def table_key(structure: Structure) -> Tuple[int, ...]:
    """Конкатенация всех таблиц структуры (для сравнения и сортировки)."""
    parts = [structure.lhd.ravel()]
    if structure.kind == "qualgebra":
        parts.append(structure.diamond.ravel())
    elif structure.kind == "squandle":
        parts.append(structure.square.ravel())
    return tuple(int(v) for v in np.concatenate(parts))


def canonical_form(structure: Structure) -> Structure:
    """Лексикографически наименьшая перенумерация структуры по всем перестановкам носителя."""
    best, best_key = None, None
    for perm in itertools.permutations(range(structure.n)):
        candidate = relabel_structure(structure, perm)
        key = table_key(candidate)
        if best_key is None or key < best_key:
            best, best_key = candidate, key
    return best


# --- встроенные структуры ---

def p_qualgebra(qs: str, qq: str) -> FiniteQualgebra:
    """
    Квалгебра P = {p, q, r, s} с x ⊲ r = (x)τ, где τ меняет p и q местами.

    Args:
        qs: Значение q ◇ s, одно из 'p', 'q', 's'
        qq: Значение q ◇ q, одно из 'p', 'q', 's'
    """
    if qs not in "pqs" or qq not in "pqs" or len(qs) != 1 or len(qq) != 1:
        raise UnknownName(f"Недопустимые параметры P: q◇s={qs}, q◇q={qq}")
    alpha, beta = P_NAMES.index(qs), P_NAMES.index(qq)
    diamond = np.full((4, 4), S)
    diamond[R, R] = S
    for x in (P, Q, S):
        diamond[R, x] = diamond[x, R] = R
    diamond[S, S] = S
    diamond[Q, S] = diamond[S, Q] = alpha
    diamond[P, S] = diamond[S, P] = TAU[alpha]
    diamond[P, Q] = diamond[Q, P] = S
    diamond[Q, Q] = beta
    diamond[P, P] = TAU[beta]
    return make_qualgebra(p_quandle(), diamond)


def p_quandle() -> Quandle:
    lhd = [[TAU[x] if y == R else x for y in range(4)] for x in range(4)]
    return make_quandle(Carrier(4, P_NAMES), lhd)


def p_squandle(q2: str) -> FiniteSquandle:
    """P-скавндл: r² = s² = s, q² = q2, p² = (q2)τ."""
    if q2 not in ("p", "q", "s"):
        raise UnknownName(f"Недопустимое значение q²={q2}")
    gamma = P_NAMES.index(q2)
    square = [TAU[gamma], gamma, S, S]
    return make_squandle(p_quandle(), square)


def _s3_squared() -> FiniteSquandle:
    sq = group_squandle(symmetric_group(3))
    seed = [i for i, name in enumerate(sq.carrier.names) if name == "Id" or len(name) == 4]
    _, sub = closure(sq, seed)
    return sub


def _s4_three_cycles() -> FiniteSquandle:
    sq = group_squandle(symmetric_group(4))
    seed = [i for i, name in enumerate(sq.carrier.names) if len(name) == 5]
    _, sub = closure(sq, seed)
    return sub


def _builtin_factories() -> Dict[str, Callable[[], Structure]]:
    factories: Dict[str, Callable[[], Structure]] = {}
    for qs in "pqs":
        for qq in "pqs":
            factories[f"P_qs-{qs}_qq-{qq}"] = (lambda a=qs, b=qq: p_qualgebra(a, b))
    factories["SQ4_s3sq"] = _s3_squared
    for q2 in "pqs":
        factories[f"SQ4_q2-{q2}"] = (lambda c=q2: p_squandle(c))
    factories["Z2"] = lambda: group_qualgebra(cyclic_group(2))
    factories["Z3"] = lambda: group_qualgebra(cyclic_group(3))
    factories["S3"] = lambda: group_qualgebra(symmetric_group(3))
    factories["S4"] = lambda: group_qualgebra(symmetric_group(4))
    factories["S3_sq"] = lambda: group_squandle(symmetric_group(3))
    factories["S4_sq"] = lambda: group_squandle(symmetric_group(4))
    factories["S4_3cycles"] = _s4_three_cycles
    factories["dihedral3"] = lambda: dihedral_quandle(3)
    factories["dihedral5"] = lambda: dihedral_quandle(5)
    factories["trivial4"] = lambda: trivial_quandle(4)
    return factories


_BUILTINS = _builtin_factories()


def list_builtin_structures() -> List[str]:
    return list(_BUILTINS)


@lru_cache(maxsize=None)
def builtin_structure(name: str) -> Structure:
    """
    Возвращает встроенную структуру по имени.

    Raises:
        UnknownName: Если имя не зарегистрировано
    """
    if name not in _BUILTINS:
        raise UnknownName(f"Неизвестная встроенная структура: {name}", {"name": name})
    logger.debug(f"Построение встроенной структуры {name}")
    return _BUILTINS[name]()
