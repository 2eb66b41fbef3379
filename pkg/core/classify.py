"""
Перебор квалгебр и скавндлов малых порядков с точностью до изоморфизма.

Сначала перебираются квандлы (через правые сдвиги S_b), затем каждый
квандл дополняется операцией ◇ или отображением квадрата. Поиск ведется
с распространением ограничений: значение одной клетки таблицы по аксиомам
QA_Comm, QA_D (или SQ_2) задает значения целой орбиты клеток.
"""
import itertools
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.algebra import (
    Carrier,
    FiniteQualgebra,
    Quandle,
    Structure,
    canonical_form,
    element_fingerprints,
    find_isomorphism,
    is_qualgebra_table,
    is_squandle_map,
    make_quandle,
    make_qualgebra,
    make_squandle,
    make_trivial_qualgebra,
    table_key,
    trivial_quandle,
)
from core.exceptions import BudgetExceeded, SizeTooLarge

logger = logging.getLogger(__name__)

# Константы по умолчанию (переопределяются конфигурацией)
DEFAULT_BUDGET_SECONDS = 60
DEFAULT_MAX_SIZE = 5
DEFAULT_EXHAUSTIVE_BOUND = 4
# Размер пачки кодов таблиц при переборе квалгебр над тривиальным квандлом
TRIVIAL_CHUNK = 1 << 17


@dataclass
class ClassificationResult:
    size: int
    kind: str
    representatives: List[Structure] = field(default_factory=list)
    trivial_count: int = 0
    nontrivial_count: int = 0


@dataclass(frozen=True)
class PropertyReport:
    commutative: bool
    cancellative: bool
    unital: bool
    associative: bool
    unital_associative: bool
    unit: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "commutative": self.commutative,
            "cancellative": self.cancellative,
            "unital": self.unital,
            "associative": self.associative,
            "unital_associative": self.unital_associative,
            "unit": self.unit,
        }


class _Deadline:
    """Жесткий лимит времени на перебор."""

    def __init__(self, budget_seconds: Optional[float]):
        self.budget = budget_seconds
        self.start = time.monotonic()

    def check(self, stage: str) -> None:
        if self.budget is None:
            return
        elapsed = time.monotonic() - self.start
        if elapsed > self.budget:
            logger.error(f"Превышен лимит времени {self.budget} с на этапе '{stage}'")
            raise BudgetExceeded(
                f"Перебор не уложился в {self.budget} с",
                {"budget_seconds": self.budget, "stage": stage},
            )


def _check_size(n: int, max_size: int, exhaustive_bound: int) -> None:
    if n < 1:
        raise ValueError(f"Размер должен быть положительным, получено {n}")
    if n > max_size:
        raise SizeTooLarge(
            f"Размер {n} превышает допустимый предел {max_size}",
            {"size": n, "max_size": max_size},
        )
    if n > exhaustive_bound:
        logger.warning(f"Перебор для n={n} может занять значительное время")


# --- квандлы ---

def enumerate_quandle_tables(n: int, deadline: Optional[_Deadline] = None) -> List[np.ndarray]:
    """
    Все таблицы квандлов на n элементах (без факторизации по изоморфизму).

    Квандл задается набором перестановок S_b с S_b(b) = b; самодистрибутивность
    равносильна S_c ∘ S_b = S_{b ⊲ c} ∘ S_c.
    """
    deadline = deadline or _Deadline(None)
    choices = [
        [p for p in itertools.permutations(range(n)) if p[b] == b]
        for b in range(n)
    ]
    found: List[np.ndarray] = []

    def consistent(perms: List[tuple], k: int) -> bool:
        for b in range(k + 1):
            for c in range(k + 1):
                if b != k and c != k:
                    continue
                target = perms[c][b]
                if target > k:
                    continue
                sb, sc, st = perms[b], perms[c], perms[target]
                if any(sc[sb[a]] != st[sc[a]] for a in range(n)):
                    return False
        return True

    def search(perms: List[tuple]) -> None:
        k = len(perms)
        if k == n:
            found.append(np.array([[perms[b][a] for b in range(n)] for a in range(n)]))
            return
        deadline.check("quandles")
        for p in choices[k]:
            perms.append(p)
            if consistent(perms, k):
                search(perms)
            perms.pop()

    search([])
    logger.debug(f"Найдено {len(found)} таблиц квандлов порядка {n}")
    return found


def _dedupe(structures: List[Structure], deadline: _Deadline) -> List[Structure]:
    buckets: Dict[tuple, List[Structure]] = defaultdict(list)
    unique: List[Structure] = []
    for s in structures:
        key = tuple(sorted(element_fingerprints(s)))
        bucket = buckets[key]
        if any(find_isomorphism(s, r) is not None for r in bucket):
            continue
        deadline.check("dedup")
        bucket.append(s)
        unique.append(s)
    return unique


def enumerate_quandles(n: int, budget_seconds: Optional[float] = None) -> List[Quandle]:
    """Квандлы порядка n с точностью до изоморфизма (внутренний этап классификации)."""
    deadline = _Deadline(budget_seconds)
    quandles = [make_quandle(Carrier(n), t) for t in enumerate_quandle_tables(n, deadline)]
    unique = _dedupe(quandles, deadline)
    logger.info(f"Квандлов порядка {n} с точностью до изоморфизма: {len(unique)}")
    return unique


# --- дополнение квандла ---

def _translation_index(q: Quandle) -> Dict[tuple, List[int]]:
    index: Dict[tuple, List[int]] = defaultdict(list)
    for d in range(q.n):
        index[q.translation(d)].append(d)
    return index


def qualgebrizations(q: Quandle, deadline: Optional[_Deadline] = None) -> List[np.ndarray]:
    """
    Все таблицы ◇, превращающие квандл в квалгебру.

    Домен клетки (a, b) - элементы d с S_d = S_b ∘ S_a (аксиома QA_Comp).
    Присваивание клетки распространяется по QA_Comm и QA_D в обе стороны.

    Args:
        q: Квандл

    Returns:
        Список таблиц ◇ (без факторизации по изоморфизму), в лексикографическом порядке
    """
    deadline = deadline or _Deadline(None)
    n = q.n
    lhd, lhd_inv = q.lhd, q.lhd_inv
    by_translation = _translation_index(q)
    domains = {}
    for a in range(n):
        sa = q.translation(a)
        for b in range(n):
            sb = q.translation(b)
            domains[(a, b)] = by_translation.get(tuple(sb[sa[x]] for x in range(n)), [])
            if not domains[(a, b)]:
                logger.debug(f"Клетка ({a}, {b}) не имеет допустимых значений: квандл не квалгебризуем")
                return []

    def neighbours(a: int, b: int, v: int):
        # a ◇ b = b ◇ (a ⊲ b) и обратное соотношение
        yield (b, int(lhd[a, b])), v
        yield (int(lhd_inv[b, a]), a), v
        for c in range(n):
            yield (int(lhd[a, c]), int(lhd[b, c])), int(lhd[v, c])
            yield (int(lhd_inv[a, c]), int(lhd_inv[b, c])), int(lhd_inv[v, c])

    def assign(table: Dict[tuple, int], cell: tuple, value: int) -> bool:
        stack = [(cell, value)]
        while stack:
            cell, value = stack.pop()
            if cell in table:
                if table[cell] != value:
                    return False
                continue
            if value not in domains[cell]:
                return False
            table[cell] = value
            stack.extend(neighbours(cell[0], cell[1], value))
        return True

    results: List[np.ndarray] = []
    cells = sorted(domains, key=lambda c: (len(domains[c]), c))

    def search(table: Dict[tuple, int]) -> None:
        deadline.check("qualgebrizations")
        free = next((c for c in cells if c not in table), None)
        if free is None:
            diamond = np.array([[table[(a, b)] for b in range(n)] for a in range(n)])
            if is_qualgebra_table(q, diamond):
                results.append(diamond)
            return
        for value in domains[free]:
            trial = dict(table)
            if assign(trial, free, value):
                search(trial)

    search({})
    results.sort(key=lambda t: tuple(t.ravel()))
    logger.debug(f"Найдено {len(results)} квалгебризаций квандла порядка {n}")
    return results


def squandlizations(q: Quandle, deadline: Optional[_Deadline] = None) -> List[np.ndarray]:
    """
    Все отображения квадрата, превращающие квандл в скавндл.

    Домен a² - элементы d с S_d = S_a ∘ S_a (SQ_1); SQ_2 связывает
    значения в a и a ⊲ b.
    """
    deadline = deadline or _Deadline(None)
    n = q.n
    lhd, lhd_inv = q.lhd, q.lhd_inv
    by_translation = _translation_index(q)
    domains = []
    for a in range(n):
        sa = q.translation(a)
        domains.append(by_translation.get(tuple(sa[sa[x]] for x in range(n)), []))
        if not domains[a]:
            return []

    def assign(square: Dict[int, int], a: int, value: int) -> bool:
        stack = [(a, value)]
        while stack:
            a, value = stack.pop()
            if a in square:
                if square[a] != value:
                    return False
                continue
            if value not in domains[a]:
                return False
            square[a] = value
            for b in range(n):
                stack.append((int(lhd[a, b]), int(lhd[value, b])))
                stack.append((int(lhd_inv[a, b]), int(lhd_inv[value, b])))
        return True

    results: List[np.ndarray] = []

    def search(square: Dict[int, int]) -> None:
        deadline.check("squandlizations")
        free = next((a for a in range(n) if a not in square), None)
        if free is None:
            candidate = np.array([square[a] for a in range(n)])
            if is_squandle_map(q, candidate):
                results.append(candidate)
            return
        for value in domains[free]:
            trial = dict(square)
            if assign(trial, free, value):
                search(trial)

    search({})
    results.sort(key=lambda t: tuple(t.ravel()))
    return results


def trivial_qualgebras(n: int, deadline: Optional[_Deadline] = None) -> List[FiniteQualgebra]:
    """
    Квалгебры над тривиальным квандлом порядка n с точностью до изоморфизма.

    Подходит любая коммутативная ◇, поэтому перебираются только клетки
    a ≤ b. Таблица кодируется построчно числом в системе с основанием n;
    от каждой орбиты перенумераций остается таблица с наименьшим кодом,
    совпадающая с ее canonical_form.

    Returns:
        Канонические представители в порядке возрастания кода таблицы
    """
    deadline = deadline or _Deadline(None)
    cells = [(a, b) for a in range(n) for b in range(a, n)]
    position = {cell: k for k, cell in enumerate(cells)}
    full_index = np.array([position[(min(a, b), max(a, b))] for a in range(n) for b in range(n)])
    place = n ** np.arange(len(cells) - 1, -1, -1, dtype=np.int64)
    weights = n ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    perms = [np.array(p) for p in itertools.permutations(range(n))]
    targets = [np.array([p[a] * n + p[b] for a in range(n) for b in range(n)]) for p in perms]

    total = n ** len(cells)
    chunks: List[np.ndarray] = []
    for start in range(0, total, TRIVIAL_CHUNK):
        deadline.check("trivial")
        codes = np.arange(start, min(start + TRIVIAL_CHUNK, total), dtype=np.int64)
        tables = ((codes[:, None] // place) % n)[:, full_index]
        own = tables @ weights
        best = own.copy()
        relabeled = np.empty_like(tables)
        for perm, target in zip(perms, targets):
            # (perm·T)[perm a, perm b] = perm[T[a, b]]
            relabeled[:, target] = perm[tables]
            np.minimum(best, relabeled @ weights, out=best)
        chunks.append(tables[own == best])

    q = trivial_quandle(n)
    result = []
    for row in np.concatenate(chunks):
        deadline.check("trivial")
        result.append(make_trivial_qualgebra(q, row.reshape(n, n)))
    logger.debug(f"Квалгебр над тривиальным квандлом порядка {n}: {len(result)} из {total} таблиц")
    return result


# --- классификация ---

def _classify(n: int, kind: str, nontrivial_only: bool, budget_seconds: Optional[float],
              max_size: int, dedup: bool, exhaustive_bound: int) -> ClassificationResult:
    _check_size(n, max_size, exhaustive_bound)
    deadline = _Deadline(budget_seconds)
    started = time.monotonic()

    structures: List[Structure] = []
    trivial_representatives: List[Structure] = []
    for q in enumerate_quandles(n, budget_seconds):
        if q.is_trivial():
            if nontrivial_only:
                continue
            if kind == "qualgebra" and dedup:
                trivial_representatives = trivial_qualgebras(n, deadline)
                continue
        deadline.check("extensions")
        if kind == "qualgebra":
            for diamond in qualgebrizations(q, deadline):
                deadline.check("extensions")
                structures.append(make_qualgebra(q, diamond))
        else:
            for square in squandlizations(q, deadline):
                structures.append(make_squandle(q, square))

    if dedup:
        representatives = list(trivial_representatives)
        for s in _dedupe(structures, deadline):
            deadline.check("canonical")
            representatives.append(canonical_form(s))
    else:
        representatives = structures
    representatives.sort(key=lambda s: (not s.is_trivial(), table_key(s)))

    result = ClassificationResult(
        size=n,
        kind=kind,
        representatives=representatives,
        trivial_count=sum(1 for s in representatives if s.is_trivial()),
        nontrivial_count=sum(1 for s in representatives if not s.is_trivial()),
    )
    logger.info(
        f"Классификация ({kind}, n={n}): нетривиальных {result.nontrivial_count}, "
        f"тривиальных {result.trivial_count}, время {time.monotonic() - started:.2f} с"
    )
    return result


def enumerate_qualgebras(n: int, nontrivial_only: bool = False,
                         budget_seconds: Optional[float] = DEFAULT_BUDGET_SECONDS,
                         max_size: int = DEFAULT_MAX_SIZE, dedup: bool = True,
                         exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND) -> ClassificationResult:
    """
    Квалгебры порядка n с точностью до изоморфизма.

    Args:
        n: Порядок
        nontrivial_only: Пропускать квалгебры с тривиальным квандлом
        budget_seconds: Лимит времени (None - без лимита)
        max_size: Наибольший допустимый порядок
        dedup: Факторизовать ли результат по изоморфизму
        exhaustive_bound: Порядок, выше которого выводится предупреждение о времени перебора

    Raises:
        SizeTooLarge: Если n > max_size
        BudgetExceeded: Если перебор не уложился в лимит времени
    """
    return _classify(n, "qualgebra", nontrivial_only, budget_seconds, max_size, dedup, exhaustive_bound)


def enumerate_squandles(n: int, nontrivial_only: bool = False,
                        budget_seconds: Optional[float] = DEFAULT_BUDGET_SECONDS,
                        max_size: int = DEFAULT_MAX_SIZE, dedup: bool = True,
                        exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND) -> ClassificationResult:
    """Скавндлы порядка n с точностью до изоморфизма; параметры как у enumerate_qualgebras."""
    return _classify(n, "squandle", nontrivial_only, budget_seconds, max_size, dedup, exhaustive_bound)


def quotient_by_isomorphism(structures: List[Structure]) -> List[Structure]:
    """Оставляет по одному представителю каждого класса изоморфизма."""
    return _dedupe(list(structures), _Deadline(None))


# --- свойства ---

def property_report(qa: FiniteQualgebra) -> PropertyReport:
    """
    Алгебраические свойства операции ◇ полным перебором таблицы.

    Returns:
        PropertyReport; unit заполняется, если единица существует
    """
    d = qa.diamond
    n = qa.n
    idx = np.arange(n)
    commutative = bool((d == d.T).all())
    cancellative = all(len(set(d[a, :].tolist())) == n and len(set(d[:, a].tolist())) == n for a in range(n))
    unit = next((e for e in range(n) if (d[e, :] == idx).all() and (d[:, e] == idx).all()), None)
    associative = bool((d[d[:, :, None], idx[None, None, :]] == d[idx[:, None, None], d[None, :, :]]).all())
    unital = unit is not None
    return PropertyReport(
        commutative=commutative,
        cancellative=cancellative,
        unital=unital,
        associative=associative,
        unital_associative=unital and associative,
        unit=int(unit) if unit is not None else None,
    )


def report_frame(result: ClassificationResult) -> pd.DataFrame:
    """
    Сводная таблица классификации: по строке на представителя.

    Для квалгебр добавляются столбцы PropertyReport.
    """
    rows = []
    for i, s in enumerate(result.representatives):
        row = {
            "index": i,
            "kind": s.kind,
            "size": s.n,
            "trivial": s.is_trivial(),
            "lhd": str(s.lhd.tolist()),
        }
        if s.kind == "qualgebra":
            row["diamond"] = str(s.diamond.tolist())
            row.update(property_report(s).to_dict())
        else:
            row["square"] = str(s.square.tolist())
        rows.append(row)
    return pd.DataFrame(rows)
