"""
Целочисленная линейная алгебра для 2-коциклов квалгебр, скавндлов и квандлов.

Все вычисления точные: матрицы хранятся как numpy-массивы с dtype=object,
элементы - целые числа Python без ограничения разрядности.
"""
import logging
import re
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.algebra import FiniteQualgebra, FiniteSquandle, Quandle, Structure
from core.exceptions import InconsistentLattice, ShapeMismatch, UnknownName

logger = logging.getLogger(__name__)


# --- нормальная форма Смита ---

def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def exgcd(a: int, b: int) -> np.ndarray:
    """
    Расширенный алгоритм Евклида в матричной форме.

    Returns:
        Целочисленная матрица M 2x2 с определителем 1, для которой
        M @ [a, b] = [gcd(a, b), 0]. Если a делит b, первая строка равна [±1, 0].
    """
    a, b = int(a), int(b)
    if a == 0 and b == 0:
        return np.array([[1, 0], [0, 1]], dtype=object)
    if a != 0 and b % a == 0:
        sign = 1 if a > 0 else -1
        return np.array([[sign, 0], [-b // a * sign, sign]], dtype=object)
    g, x, y = _xgcd(a, b)
    return np.array([[x, y], [-b // g, a // g]], dtype=object)


def _inv2(m: np.ndarray) -> np.ndarray:
    """Обратная к матрице 2x2 с определителем 1."""
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=object)


def as_int_matrix(m, cols: Optional[int] = None) -> np.ndarray:
    """Приводит вход к двумерному массиву целых чисел Python."""
    arr = np.array(m, dtype=object)
    if arr.size == 0:
        if arr.ndim == 2:
            return np.zeros(arr.shape, dtype=object)
        return np.zeros((0, cols or 0), dtype=object)
    if arr.ndim != 2:
        raise ShapeMismatch(f"Ожидалась двумерная матрица, получено измерений: {arr.ndim}")
    return np.vectorize(int, otypes=[object])(arr)


def _smith(m, left: bool = True):
    d = as_int_matrix(m).copy()
    rows, cols = d.shape
    u = np.eye(rows, dtype=object) if left else None
    v = np.eye(cols, dtype=object)
    v_inv = np.eye(cols, dtype=object)

    for t in range(min(rows, cols)):
        nonzero = np.argwhere(d[t:, t:] != 0)
        if not len(nonzero):
            break
        i, j = min(nonzero, key=lambda ij: abs(d[t + ij[0], t + ij[1]])) + t
        d[[t, i]] = d[[i, t]]
        if left:
            u[[t, i]] = u[[i, t]]
        d[:, [t, j]] = d[:, [j, t]]
        v[:, [t, j]] = v[:, [j, t]]
        v_inv[[t, j]] = v_inv[[j, t]]

        while True:
            for i in range(t + 1, rows):
                if d[i, t] != 0:
                    op = exgcd(d[t, t], d[i, t])
                    d[[t, i]] = op @ d[[t, i]]
                    if left:
                        u[[t, i]] = op @ u[[t, i]]
            for j in range(t + 1, cols):
                if d[t, j] != 0:
                    op = exgcd(d[t, t], d[t, j]).T
                    d[:, [t, j]] = d[:, [t, j]] @ op
                    v[:, [t, j]] = v[:, [t, j]] @ op
                    v_inv[[t, j]] = _inv2(op) @ v_inv[[t, j]]
            if (d[t + 1:, t] != 0).any():
                continue
            # делимость: d[t, t] должен делить весь оставшийся блок
            bad = np.argwhere(d[t + 1:, t + 1:] % d[t, t] != 0)
            if len(bad):
                i = int(bad[0][0]) + t + 1
                d[t] = d[t] + d[i]
                if left:
                    u[t] = u[t] + u[i]
                continue
            break

        if d[t, t] < 0:
            d[t] = -d[t]
            if left:
                u[t] = -u[t]
    return d, u, v, v_inv


def smith_normal_form(m) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Нормальная форма Смита целочисленной матрицы.

    Args:
        m: Целочисленная матрица

    Returns:
        Кортеж (d, u, v): u @ m @ v = d, d диагональна с d1 | d2 | ...,
        u и v унимодулярны
    """
    d, u, v, _ = _smith(m, left=True)
    return d, u, v


def diagonal(d: np.ndarray) -> List[int]:
    return [int(d[i, i]) for i in range(min(d.shape))]


def invariant_factors(m) -> List[int]:
    """Ненулевые инвариантные множители матрицы."""
    d, _, _, _ = _smith(m, left=False)
    return [x for x in diagonal(d) if x != 0]


def matrix_rank(m) -> int:
    return len(invariant_factors(m))


def _dedupe_rows(m: np.ndarray) -> np.ndarray:
    seen, rows = set(), []
    for row in m:
        key = tuple(row)
        if any(key) and key not in seen:
            seen.add(key)
            rows.append(row)
    return np.array(rows, dtype=object).reshape(len(rows), m.shape[1])


def _lattice_steps(d: np.ndarray, cols: int, modulus: int) -> List[Optional[int]]:
    """
    Шаги решетки {x : m x = 0 (mod modulus)} в координатах y = v^-1 x.

    Координата i пробегает g_i Z; None - координата обязана быть нулем.
    """
    diag = diagonal(d) + [0] * (cols - min(d.shape))
    if modulus == 0:
        return [1 if x == 0 else None for x in diag]
    return [modulus // gcd(x, modulus) for x in diag]


def integer_kernel(m, modulus: int = 0) -> np.ndarray:
    """
    Базис ядра матрицы.

    Args:
        m: Целочисленная матрица
        modulus: 0 для Z, иначе m для Z/m

    Returns:
        Матрица, строки которой порождают {x : m x = 0}; над Z/m строки
        порождают решетку решений по модулю modulus (вектора из modulus*Z^n опущены)
    """
    matrix = as_int_matrix(m)
    cols = matrix.shape[1]
    d, _, v, _ = _smith(_dedupe_rows(matrix), left=False)
    basis = []
    for i, step in enumerate(_lattice_steps(d, cols, modulus)):
        if step is None or (modulus and step == modulus):
            continue
        column = v[:, i] * step
        basis.append(column % modulus if modulus else column)
    return np.array(basis, dtype=object).reshape(len(basis), cols)


def integer_solve(m, rhs: Sequence[int]) -> Optional[np.ndarray]:
    """
    Целочисленное решение системы m x = rhs.

    Returns:
        Одно решение или None, если решений в целых числах нет
    """
    matrix = as_int_matrix(m)
    rows, cols = matrix.shape
    b = np.array([int(x) for x in rhs], dtype=object)
    if len(b) != rows:
        raise ShapeMismatch(f"Длина правой части {len(b)} не совпадает с числом строк {rows}")
    d, u, v, _ = _smith(matrix, left=True)
    ub = u @ b if rows else b
    y = np.zeros(cols, dtype=object)
    diag = diagonal(d)
    for i in range(rows):
        pivot = diag[i] if i < len(diag) else 0
        if pivot == 0:
            if ub[i] != 0:
                return None
            continue
        if ub[i] % pivot != 0:
            return None
        y[i] = ub[i] // pivot
    return v @ y


# --- группы и коциклы ---

@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Конечно порожденная абелева группа Z^free_rank ⊕ Z/d1 ⊕ Z/d2 ⊕ ..."""

    free_rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        torsion = tuple(sorted(int(x) for x in self.torsion if x != 1))
        if any(x < 2 for x in torsion):
            raise ValueError(f"Порядки кручения должны быть не меньше 2: {torsion}")
        if any(torsion[i + 1] % torsion[i] for i in range(len(torsion) - 1)):
            raise ValueError(f"Нарушена цепочка делимости: {torsion}")
        object.__setattr__(self, "torsion", torsion)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " ⊕ ".join(parts) if parts else "0"

    def to_dict(self) -> Dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def presentation_from_factors(factors: Sequence[int], generators: int) -> AbelianGroupPresentation:
    """Z^generators / (d1 Z ⊕ d2 Z ⊕ ...) по инвариантным множителям."""
    nonzero = [int(x) for x in factors if x != 0]
    return AbelianGroupPresentation(generators - len(nonzero), tuple(x for x in nonzero if x > 1))


@dataclass(frozen=True, eq=False)
class CocyclePair:
    """
    Пара (χ, λ). Для квалгебр λ - таблица n x n, для скавндлов - вектор
    длины n, для квандлов λ отсутствует.
    """

    kind: str
    chi: np.ndarray
    lam: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "chi", np.array(self.chi, dtype=object))
        if self.lam is not None:
            object.__setattr__(self, "lam", np.array(self.lam, dtype=object))

    @property
    def n(self) -> int:
        return self.chi.shape[0]

    def vector(self) -> np.ndarray:
        parts = [self.chi.reshape(-1)]
        if self.lam is not None:
            parts.append(self.lam.reshape(-1))
        return np.concatenate(parts).astype(object)

    @classmethod
    def from_vector(cls, kind: str, n: int, vec: Sequence[int]) -> "CocyclePair":
        vec = np.array([int(x) for x in vec], dtype=object)
        chi = vec[: n * n].reshape(n, n)
        if kind == "qualgebra":
            lam = vec[n * n: 2 * n * n].reshape(n, n)
        elif kind == "squandle":
            lam = vec[n * n: n * n + n]
        else:
            lam = None
        return cls(kind, chi, lam)

    def _combine(self, other: "CocyclePair", sign: int) -> "CocyclePair":
        if self.kind != other.kind or self.n != other.n:
            raise ShapeMismatch("Складывать можно только коциклы одного вида и размера")
        return CocyclePair.from_vector(self.kind, self.n, self.vector() + sign * other.vector())

    def __add__(self, other: "CocyclePair") -> "CocyclePair":
        return self._combine(other, 1)

    def __sub__(self, other: "CocyclePair") -> "CocyclePair":
        return self._combine(other, -1)

    def __neg__(self) -> "CocyclePair":
        return CocyclePair.from_vector(self.kind, self.n, -self.vector())

    def __mul__(self, k: int) -> "CocyclePair":
        return CocyclePair.from_vector(self.kind, self.n, self.vector() * int(k))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CocyclePair):
            return NotImplemented
        return self.kind == other.kind and self.n == other.n and list(self.vector()) == list(other.vector())

    def __hash__(self):
        return hash((self.kind, tuple(self.vector())))

    def reduced(self, modulus: int) -> "CocyclePair":
        if not modulus:
            return self
        return CocyclePair.from_vector(self.kind, self.n, self.vector() % modulus)

    def to_dict(self) -> Dict:
        data = {"kind": self.kind, "chi": self.chi.tolist()}
        if self.lam is not None:
            data["lambda"] = self.lam.tolist()
        return data


def _kind(s: Structure) -> str:
    if isinstance(s, FiniteQualgebra):
        return "qualgebra"
    if isinstance(s, FiniteSquandle):
        return "squandle"
    if isinstance(s, Quandle):
        return "quandle"
    raise ShapeMismatch(f"Неизвестный вид структуры: {type(s).__name__}")


def variable_count(s: Structure) -> int:
    n = s.n
    return {"qualgebra": 2 * n * n, "squandle": n * n + n, "quandle": n * n}[_kind(s)]


def variable_index(s: Structure) -> List[str]:
    """Имена переменных системы в порядке столбцов: chi(a,b), затем lambda(...)."""
    name = s.carrier.name
    labels = [f"chi({name(a)},{name(b)})" for a in range(s.n) for b in range(s.n)]
    kind = _kind(s)
    if kind == "qualgebra":
        labels += [f"lambda({name(a)},{name(b)})" for a in range(s.n) for b in range(s.n)]
    elif kind == "squandle":
        labels += [f"lambda({name(a)})" for a in range(s.n)]
    return labels


@dataclass
class CocycleSystem:
    """
    Линейная система на (χ, λ).

    Строки с индексом не меньше consistency_start - следствия основных
    (аксиомы квандловых коциклов), добавленные как контрольный блок.
    """

    kind: str
    matrix: np.ndarray
    variables: List[str]
    row_labels: List[str] = field(default_factory=list)
    consistency_start: Optional[int] = None
    modulus: int = 0

    @property
    def main_block(self) -> np.ndarray:
        if self.consistency_start is None:
            return self.matrix
        return self.matrix[: self.consistency_start]


def parse_coeff(coeff) -> int:
    """'z' -> 0, 'z2' -> 2, 'zN' -> N; целое число возвращается как есть."""
    if isinstance(coeff, int):
        if coeff < 0 or coeff == 1:
            raise UnknownName(f"Недопустимый модуль коэффициентов: {coeff}")
        return coeff
    match = re.fullmatch(r"[zZ](\d*)", str(coeff).strip())
    if not match or match.group(1) in ("0", "1"):
        raise UnknownName(f"Неизвестные коэффициенты: {coeff}", {"coeff": str(coeff)})
    return int(match.group(1)) if match.group(1) else 0


def cocycle_system(s: Structure, coeff="z") -> CocycleSystem:
    """
    Матрица, ядро которой - группа 2-коциклов Z²(s).

    Для квалгебр основной блок: χ(a,b◇c) = χ(a,b) + χ(a⊲b,c);
    χ(a◇b,c) + λ(a⊲c,b⊲c) = χ(a,c) + χ(b,c) + λ(a,b);
    χ(a,b) + λ(a,b) = λ(b,a⊲b). Для скавндлов: квандловые строки,
    χ(a,b²) = χ(a,b) + χ(a⊲b,b) и χ(a²,b) + λ(a⊲b) = 2χ(a,b) + λ(a).
    """
    kind = _kind(s)
    n = s.n
    lhd = s.lhd.tolist()
    chi = lambda a, b: a * n + b
    lam2 = lambda a, b: n * n + a * n + b
    lam1 = lambda a: n * n + a
    width = variable_count(s)
    rows: List[Dict[int, int]] = []
    labels: List[str] = []

    def row(label: str, terms) -> None:
        entries: Dict[int, int] = {}
        for coef, var in terms:
            entries[var] = entries.get(var, 0) + coef
        rows.append(entries)
        labels.append(label)

    def quandle_rows() -> None:
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    row(f"BWR3{(a, b, c)}", [(1, chi(a, b)), (1, chi(lhd[a][b], c)),
                                             (-1, chi(lhd[a][c], lhd[b][c])), (-1, chi(a, c))])
        for a in range(n):
            row(f"BWR1{(a,)}", [(1, chi(a, a))])

    consistency_start = None
    if kind == "qualgebra":
        mul = s.diamond.tolist()
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    row(f"BWRIV{(a, b, c)}", [(1, chi(a, mul[b][c])), (-1, chi(a, b)), (-1, chi(lhd[a][b], c))])
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    row(f"BWRVI{(a, b, c)}", [(1, chi(mul[a][b], c)), (1, lam2(lhd[a][c], lhd[b][c])),
                                              (-1, chi(a, c)), (-1, chi(b, c)), (-1, lam2(a, b))])
        for a in range(n):
            for b in range(n):
                row(f"BWRV{(a, b)}", [(1, chi(a, b)), (1, lam2(a, b)), (-1, lam2(b, lhd[a][b]))])
        consistency_start = len(rows)
        quandle_rows()
    elif kind == "squandle":
        square = s.square.tolist()
        quandle_rows()
        for a in range(n):
            for b in range(n):
                row(f"SQ1{(a, b)}", [(1, chi(a, square[b])), (-1, chi(a, b)), (-1, chi(lhd[a][b], b))])
                row(f"SQ2{(a, b)}", [(1, chi(square[a], b)), (1, lam1(lhd[a][b])),
                                     (-2, chi(a, b)), (-1, lam1(a))])
    else:
        quandle_rows()

    matrix = np.zeros((len(rows), width), dtype=object)
    for i, entries in enumerate(rows):
        for var, coef in entries.items():
            matrix[i, var] += coef
    logger.debug(f"Система коциклов {kind}: {matrix.shape[0]} строк, {width} переменных")
    return CocycleSystem(kind, matrix, variable_index(s), labels, consistency_start, parse_coeff(coeff))


def coboundary(s: Structure, phi: Sequence[int]) -> CocyclePair:
    """Кограница δφ: χ(a,b) = φ(a⊲b) - φ(a); λ(a,b) = φ(a) + φ(b) - φ(a◇b) или λ(a) = 2φ(a) - φ(a²)."""
    n = s.n
    phi = [int(x) for x in phi]
    chi = [[phi[int(s.lhd[a, b])] - phi[a] for b in range(n)] for a in range(n)]
    kind = _kind(s)
    if kind == "qualgebra":
        lam = [[phi[a] + phi[b] - phi[s.mul(a, b)] for b in range(n)] for a in range(n)]
    elif kind == "squandle":
        lam = [2 * phi[a] - phi[s.sq(a)] for a in range(n)]
    else:
        lam = None
    return CocyclePair(kind, chi, lam)


def coboundary_generators(s: Structure) -> List[CocyclePair]:
    """Кограницы функций Дирака φ_a, a = 0..n-1."""
    return [coboundary(s, [1 if x == a else 0 for x in range(s.n)]) for a in range(s.n)]


def _check_shape(s: Structure, c: CocyclePair) -> None:
    if c.kind != _kind(s) or c.n != s.n or len(c.vector()) != variable_count(s):
        raise ShapeMismatch(
            f"Коцикл вида {c.kind} размера {c.n} не подходит к структуре {_kind(s)} размера {s.n}",
            {"kind": c.kind, "n": c.n},
        )


def is_cocycle(s: Structure, c: CocyclePair, modulus: int = 0) -> bool:
    _check_shape(s, c)
    values = cocycle_system(s).matrix @ c.vector()
    if modulus:
        return all(int(x) % modulus == 0 for x in values)
    return all(int(x) == 0 for x in values)


def is_coboundary(s: Structure, c: CocyclePair) -> bool:
    """Принадлежность решетке B² (целочисленное решение по образующим)."""
    _check_shape(s, c)
    generators = np.array([g.vector() for g in coboundary_generators(s)], dtype=object)
    return integer_solve(generators.T, c.vector()) is not None


def cocycle_from_values(s: Structure, values: Mapping[str, int]) -> CocyclePair:
    """
    Единственный целочисленный коцикл с заданными значениями выбранных переменных.

    Args:
        s: Структура
        values: Отображение имя переменной (как в variable_index) -> значение

    Raises:
        UnknownName: Неизвестное имя переменной
        InconsistentLattice: Решения нет или оно не единственно
    """
    labels = variable_index(s)
    try:
        idx = [labels.index(name) for name in values]
    except ValueError as e:
        raise UnknownName(f"Неизвестная переменная: {e}")
    basis = integer_kernel(cocycle_system(s).matrix)
    projection = basis[:, idx].T
    if matrix_rank(projection) != basis.shape[0]:
        raise InconsistentLattice(
            "Заданные переменные не определяют коцикл однозначно",
            {"variables": list(values), "z2_rank": basis.shape[0]},
        )
    coords = integer_solve(projection, [values[name] for name in values])
    if coords is None:
        raise InconsistentLattice("Нет целочисленного коцикла с такими значениями", {"values": dict(values)})
    return CocyclePair.from_vector(_kind(s), s.n, coords @ basis)


@dataclass
class CohomologyResult:
    modulus: int
    z2: AbelianGroupPresentation
    b2: AbelianGroupPresentation
    h2: AbelianGroupPresentation
    representatives: List[Tuple[int, CocyclePair]] = field(default_factory=list)

    @property
    def z2_rank(self) -> int:
        return self.z2.free_rank if self.modulus == 0 else len(self.z2.torsion)

    @property
    def b2_rank(self) -> int:
        return self.b2.free_rank if self.modulus == 0 else len(self.b2.torsion)

    def to_dict(self, with_representatives: bool = False) -> Dict:
        data = {
            "coeff": "z" if self.modulus == 0 else f"z{self.modulus}",
            "z2_rank": self.z2_rank,
            "b2_rank": self.b2_rank,
            "z2": self.z2.to_dict(),
            "b2": self.b2.to_dict(),
            "h2": self.h2.to_dict(),
        }
        if with_representatives:
            data["representatives"] = [
                {"order": order, "cocycle": c.to_dict()} for order, c in self.representatives
            ]
        return data


def _modular_presentation(factors: Sequence[int], modulus: int) -> AbelianGroupPresentation:
    """Образ решетки с инвариантами factors в (Z/modulus)^n."""
    orders = [modulus // gcd(int(x), modulus) for x in factors if x != 0]
    return AbelianGroupPresentation(0, tuple(o for o in orders if o > 1))


def _symmetric(vec: np.ndarray, modulus: int) -> np.ndarray:
    if not modulus:
        return vec
    return np.array([(int(x) + modulus // 2) % modulus - modulus // 2 for x in vec], dtype=object)


def shorten_representative(c: CocyclePair, generators: Sequence[CocyclePair], modulus: int = 0) -> CocyclePair:
    """
    Жадно прибавляет ±δφ_a, пока уменьшается сумма модулей элементов.

    Класс когомологий не меняется. По модулю m сумма считается по
    симметричным вычетам, результат приводится к 0..m-1.
    """
    vec = _symmetric(c.vector(), modulus)
    steps = [sign * g.vector() for g in generators for sign in (1, -1)]
    norm = sum(abs(int(x)) for x in vec)
    improved = True
    while improved:
        improved = False
        for step in steps:
            candidate = _symmetric(vec + step, modulus)
            candidate_norm = sum(abs(int(x)) for x in candidate)
            if candidate_norm < norm:
                vec, norm, improved = candidate, candidate_norm, True
    return CocyclePair.from_vector(c.kind, c.n, vec).reduced(modulus)


def second_cohomology(s: Structure, coeff="z") -> CohomologyResult:
    """
    Вторая группа когомологий H² = Z² / B².

    Кограницы Дирака выражаются в координатах базиса решетки коциклов,
    после чего нормальная форма Смита матрицы координат дает инвариантные
    множители фактора и представителей образующих.

    Args:
        s: Квалгебра, скавндл или квандл
        coeff: 'z' или 'zN' (коэффициенты Z/N)

    Raises:
        InconsistentLattice: Кограница не лежит в решетке коциклов
    """
    modulus = parse_coeff(coeff)
    kind = _kind(s)
    system = cocycle_system(s, coeff)
    matrix = _dedupe_rows(system.matrix)
    width = matrix.shape[1]
    d, _, v, v_inv = _smith(matrix, left=False)
    steps = _lattice_steps(d, width, modulus)
    coords = [i for i, g in enumerate(steps) if g is not None]

    generators = coboundary_generators(s)
    coordinate_rows = []
    for phi_index, g in enumerate(generators):
        y = v_inv @ g.vector()
        row = []
        for i, step in enumerate(steps):
            if step is None:
                if y[i] != 0:
                    raise InconsistentLattice(
                        f"Кограница φ_{phi_index} не лежит в решетке коциклов",
                        {"generator": phi_index},
                    )
                continue
            if y[i] % step != 0:
                raise InconsistentLattice(f"Кограница φ_{phi_index} вне решетки", {"generator": phi_index})
            row.append(y[i] // step)
        coordinate_rows.append(row)
    if modulus:
        for k, i in enumerate(coords):
            row = [0] * len(coords)
            row[k] = modulus // steps[i]
            coordinate_rows.append(row)

    k = len(coords)
    relations = np.array(coordinate_rows, dtype=object).reshape(len(coordinate_rows), k)
    rd, _, rv, rv_inv = _smith(relations, left=False) if k else (relations, None, None, None)
    rdiag = diagonal(rd) + [0] * (k - min(rd.shape)) if k else []
    h2 = presentation_from_factors(rdiag, k)

    if modulus:
        z2 = AbelianGroupPresentation(0, tuple(modulus // steps[i] for i in coords if steps[i] < modulus))
        gen_matrix = np.array([g.vector() for g in generators], dtype=object)
        b2 = _modular_presentation(invariant_factors(gen_matrix), modulus)
    else:
        z2 = AbelianGroupPresentation(k)
        b2 = AbelianGroupPresentation(matrix_rank(np.array([g.vector() for g in generators], dtype=object)))

    representatives: List[Tuple[int, CocyclePair]] = []
    for i, factor in enumerate(rdiag):
        if factor == 1:
            continue
        c = rv_inv[i]
        x = np.zeros(width, dtype=object)
        for k_index, col in enumerate(coords):
            x = x + v[:, col] * (c[k_index] * steps[col])
        cocycle = shorten_representative(CocyclePair.from_vector(kind, s.n, x), generators, modulus)
        representatives.append((int(factor), cocycle))

    logger.info(f"H²({kind}, n={s.n}, coeff={coeff}) = {h2}; Z² = {z2}, B² = {b2}")
    return CohomologyResult(modulus, z2, b2, h2, representatives)
