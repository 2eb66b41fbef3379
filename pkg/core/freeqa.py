"""
Термы свободной квалгебры: ⊲-термы, их приведение, произведения и сдвиги
по аксиоме QA_Comm, отношение хвоста и образ в свободной группе.

Синтаксис: a<+b<-c означает a ⊲ b ⊲̃ c (левая ассоциативность),
множители произведения разделяются '*'. Допускаются скобки справа от
операции: (b<+a)<+(a<+b).
"""
import logging
import re
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from core.exceptions import NotReduced, PositionOutOfRange, TermSyntaxError

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"

Op = Tuple[int, str]


@dataclass(frozen=True)
class LdTerm:
    """Терм a0 ⊲^{ε1} a1 ... ⊲^{εr} ar."""

    head: str
    ops: Tuple[Op, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple((int(e), g) for e, g in self.ops))

    def __str__(self) -> str:
        return self.head + "".join(("⊲" if e > 0 else "⊲̃") + g for e, g in self.ops)

    def to_text(self) -> str:
        return self.head + "".join(("<+" if e > 0 else "<-") + g for e, g in self.ops)

    def __len__(self) -> int:
        return len(self.ops)


def generator(name: str) -> LdTerm:
    return LdTerm(name)


def is_reduced(t: LdTerm) -> bool:
    if t.ops and t.ops[0][1] == t.head:
        return False
    return all(not (g1 == g2 and e1 == -e2) for (e1, g1), (e2, g2) in zip(t.ops, t.ops[1:]))


def reduce_term(t: LdTerm) -> LdTerm:
    """
    Приведенная форма терма.

    Правила: x ⊲ a ⊲̃ a -> x, x ⊲̃ a ⊲ a -> x, a ⊲ a -> a, a ⊲̃ a -> a.
    Каждое правило укорачивает слово, поэтому процесс конечен.
    """
    stack: List[Op] = []
    for e, g in t.ops:
        if not stack and g == t.head:
            continue
        if stack and stack[-1] == (-e, g):
            stack.pop()
            continue
        stack.append((e, g))
    return LdTerm(t.head, tuple(stack))


def ld_op(x: LdTerm, y: LdTerm, sign: int = 1) -> LdTerm:
    """
    red(x ⊲ y) при sign=+1 и red(x ⊲̃ y) при sign=-1.

    Для y = b0 ⊲^{ζ1} b1 ... ⊲^{ζs} bs:
    x ⊲ y = x ⊲^{-ζs} bs ... ⊲^{-ζ1} b1 ⊲ b0 ⊲^{ζ1} b1 ... ⊲^{ζs} bs.
    """
    inverse = tuple((-e, g) for e, g in reversed(y.ops))
    ops = x.ops + inverse + ((sign, y.head),) + y.ops
    return reduce_term(LdTerm(x.head, ops))


def is_tail(t: LdTerm, t2: LdTerm, sign: int = 1) -> bool:
    """
    Является ли t хвостом t2: t2 = b0 ⊲ ... ⊲^{ζs} bs ⊲ t с bs != a0.

    При sign=-1 соединяющая операция - ⊲̃.

    Raises:
        NotReduced: Если один из термов не приведен
    """
    for term in (t, t2):
        if not is_reduced(term):
            raise NotReduced(f"Терм {term} не приведен", {"term": term.to_text()})
    r = len(t.ops)
    if len(t2.ops) < r + 1:
        return False
    suffix = t2.ops[len(t2.ops) - r - 1:]
    if suffix != ((sign, t.head),) + t.ops:
        return False
    before = t2.ops[len(t2.ops) - r - 2][1] if len(t2.ops) > r + 1 else t2.head
    return before != t.head


@dataclass(frozen=True)
class ProductForm:
    """Произведение t1 ◇ t2 ◇ ... ◇ tn приведенных ⊲-термов."""

    factors: Tuple[LdTerm, ...]

    def __post_init__(self):
        if not self.factors:
            raise TermSyntaxError("Произведение должно содержать хотя бы один множитель")
        object.__setattr__(self, "factors", tuple(reduce_term(t) for t in self.factors))

    def __str__(self) -> str:
        return " ◇ ".join(f"({t})" if t.ops else str(t) for t in self.factors)

    def to_text(self) -> str:
        return " * ".join(t.to_text() for t in self.factors)


def shift(p: ProductForm, i: int, direction: str = POSITIVE) -> ProductForm:
    """
    Применение QA_Comm на позиции i (с единицы).

    positive: ti ◇ ti+1 -> ti+1 ◇ red(ti ⊲ ti+1)
    negative: ti ◇ ti+1 -> red(ti+1 ⊲̃ ti) ◇ ti

    Raises:
        PositionOutOfRange: Если не выполнено 1 <= i < числа множителей
    """
    n = len(p.factors)
    if not 1 <= i < n:
        raise PositionOutOfRange(f"Позиция {i} вне диапазона 1..{n - 1}", {"position": i, "factors": n})
    left, right = p.factors[i - 1], p.factors[i]
    if direction == POSITIVE:
        pair = (right, ld_op(left, right, 1))
    elif direction == NEGATIVE:
        pair = (ld_op(right, left, -1), left)
    else:
        raise ValueError(f"Неизвестное направление сдвига: {direction}")
    return ProductForm(p.factors[: i - 1] + pair + p.factors[i + 1:])


# --- свободная группа ---

FreeWord = Tuple[Tuple[str, int], ...]


def _free_reduce(letters: Sequence[Tuple[str, int]]) -> FreeWord:
    stack: List[Tuple[str, int]] = []
    for g, e in letters:
        if stack and stack[-1] == (g, -e):
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


def term_to_free_group(t: LdTerm) -> FreeWord:
    """w(a0) = a0, w(t ⊲^ε g) = g^-ε w(t) g^ε."""
    word: List[Tuple[str, int]] = [(t.head, 1)]
    for e, g in t.ops:
        word = [(g, -e)] + word + [(g, e)]
    return _free_reduce(word)


def to_free_group(p: ProductForm) -> FreeWord:
    """Образ произведения: ⊲ - сопряжение, ◇ - умножение."""
    letters: List[Tuple[str, int]] = []
    for t in p.factors:
        letters.extend(term_to_free_group(t))
    return _free_reduce(letters)


def format_word(word: FreeWord) -> str:
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in word) or "1"


# --- поиск ---

@dataclass
class EquivalenceResult:
    equivalent: bool
    depth: int
    explored: int
    path: Optional[List[Tuple[int, str]]] = None

    def to_dict(self) -> Dict:
        return {
            "equivalent": self.equivalent,
            "depth": self.depth,
            "explored": self.explored,
            "path": [list(step) for step in self.path] if self.path is not None else None,
        }


def _neighbours(p: ProductForm):
    for i in range(1, len(p.factors)):
        for direction in (POSITIVE, NEGATIVE):
            yield (i, direction), shift(p, i, direction)


def bounded_equivalence(p: ProductForm, q: ProductForm, depth: int = 6) -> EquivalenceResult:
    """
    Поиск в ширину по сдвигам QA_Comm на глубину depth.

    Returns:
        EquivalenceResult с путем сдвигов от p к q или equivalent=False,
        если q не достигнут на заданной глубине
    """
    if len(p.factors) != len(q.factors):
        return EquivalenceResult(False, 0, 1)
    parents: Dict[ProductForm, Optional[Tuple[ProductForm, Tuple[int, str]]]] = {p: None}
    frontier = deque([(p, 0)])
    while frontier:
        current, level = frontier.popleft()
        if current == q:
            path = []
            node = current
            while parents[node] is not None:
                node, step = parents[node]
                path.append(step)
            return EquivalenceResult(True, level, len(parents), list(reversed(path)))
        if level == depth:
            continue
        for step, nxt in _neighbours(current):
            if nxt not in parents:
                parents[nxt] = (current, step)
                frontier.append((nxt, level + 1))
    logger.info(f"Произведения не связаны сдвигами до глубины {depth} ({len(parents)} состояний)")
    return EquivalenceResult(False, depth, len(parents))


@dataclass
class TailCheckResult:
    passed: bool
    explored: int
    violation: Optional[Dict] = None

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "explored": self.explored, "violation": self.violation}


def tail_invariant_check(p: ProductForm, g: str, depth: int = 6) -> TailCheckResult:
    """
    Обходит все последовательности сдвигов произведения из двух множителей.

    Проверяет, что ни один достигнутый множитель не равен образующей g и
    что при каждом новом положительном сдвиге прежний второй множитель
    является хвостом нового второго (при отрицательном - прежний первый
    является ⊲̃-хвостом нового первого).
    """
    if len(p.factors) != 2:
        raise PositionOutOfRange("Проверка хвостов определена для произведения из двух множителей",
                                 {"factors": len(p.factors)})
    target = generator(g)
    seen = {p}
    frontier = deque([(p, 0)])
    while frontier:
        current, level = frontier.popleft()
        if target in current.factors:
            return TailCheckResult(False, len(seen), {"product": current.to_text(), "reason": "generator"})
        if level == depth:
            continue
        for (_, direction), nxt in _neighbours(current):
            if nxt in seen:
                continue
            if direction == POSITIVE:
                ok = is_tail(current.factors[1], nxt.factors[1], 1)
            else:
                ok = is_tail(current.factors[0], nxt.factors[0], -1)
            if not ok:
                return TailCheckResult(
                    False, len(seen),
                    {"product": current.to_text(), "next": nxt.to_text(), "reason": "tail"},
                )
            seen.add(nxt)
            frontier.append((nxt, level + 1))
    return TailCheckResult(True, len(seen))


def relation_sides() -> Tuple[ProductForm, ProductForm]:
    """(b⊲a) ◇ (a⊲b) и ((a⊲̃b)⊲a) ◇ b - равны в свободной группе, но не в свободной квалгебре."""
    lhs = ProductForm((LdTerm("b", ((1, "a"),)), LdTerm("a", ((1, "b"),))))
    rhs = ProductForm((LdTerm("a", ((-1, "b"), (1, "a"))), LdTerm("b")))
    return lhs, rhs


# --- разбор ---

_TOKEN = re.compile(r"\s*(?:(<\+|⊲̃|<-|⊲)|([A-Za-z_][A-Za-z0-9_]*)|(\()|(\))|(\*|◇))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"Неожиданный символ на позиции {pos}: '{text[pos:pos + 5]}'",
                                  {"position": pos})
        op, name, lpar, rpar, star = m.groups()
        if op:
            tokens.append(("op", "+" if op in ("<+", "⊲") else "-"))
        elif name:
            tokens.append(("name", name))
        elif lpar:
            tokens.append(("(", lpar))
        elif rpar:
            tokens.append((")", rpar))
        else:
            tokens.append(("*", star))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            raise TermSyntaxError(f"Ожидался токен '{kind}' на позиции {self.pos}", {"position": self.pos})
        value = self.tokens[self.pos][1]
        self.pos += 1
        return value

    def atom(self) -> LdTerm:
        if self.peek() == "(":
            self.take("(")
            term = self.term()
            self.take(")")
            return term
        return generator(self.take("name"))

    def term(self) -> LdTerm:
        result = self.atom()
        while self.peek() == "op":
            sign = 1 if self.take("op") == "+" else -1
            result = ld_op(result, self.atom(), sign)
        return result

    def product(self) -> ProductForm:
        factors = [self.term()]
        while self.peek() == "*":
            self.take("*")
            factors.append(self.term())
        if self.peek() is not None:
            raise TermSyntaxError(f"Лишние символы после позиции {self.pos}", {"position": self.pos})
        return ProductForm(tuple(factors))


def parse_term(text: str) -> LdTerm:
    """Разбирает ⊲-терм; результат приведен."""
    product = _Parser(text).product()
    if len(product.factors) != 1:
        raise TermSyntaxError(f"Ожидался один терм, получено множителей: {len(product.factors)}")
    return product.factors[0]


def parse_product(text: str) -> ProductForm:
    return _Parser(text).product()
