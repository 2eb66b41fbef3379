"""
Веса Больцмана раскрашенных диаграмм и мультимножества весов.

Веса считаются в Z или в Z/m; во втором случае каждый вес приводится
к представителю 0..m-1.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from core.algebra import Structure
from core.cohomology import CocyclePair, is_cocycle, parse_coeff
from core.coloring import Coloring, Mode, enumerate_colorings, port_colors
from core.diagram import ZIP, Diagram, MovePair
from core.exceptions import ModeMismatch, NotACocycle

logger = logging.getLogger(__name__)

_MODES_FOR_KIND = {
    "qualgebra": (Mode.QUALGEBRA, Mode.ISOSCELES),
    "squandle": (Mode.SQUANDLE,),
    "quandle": (Mode.QUANDLE, Mode.QUALGEBRA, Mode.ISOSCELES, Mode.SQUANDLE),
}


def default_mode(cp: CocyclePair) -> Mode:
    return _MODES_FOR_KIND[cp.kind][0]


def _check_pairing(d: Diagram, mode: Mode, cp: CocyclePair) -> None:
    if Mode(mode) not in _MODES_FOR_KIND[cp.kind]:
        raise ModeMismatch(
            f"Коцикл вида {cp.kind} не применим к раскраскам режима {Mode(mode).value}",
            {"kind": cp.kind, "mode": Mode(mode).value},
        )
    if cp.kind == "quandle" and d.vertices:
        raise ModeMismatch("Квандловый коцикл не задает веса вершин", {"vertices": len(d.vertices)})


def weight(d: Diagram, c: Coloring, cp: CocyclePair, coeff="z") -> int:
    """
    Вес раскраски: +χ(under_in, over) на положительном перекрестке,
    -χ(under_out, over) на отрицательном, +λ на unzip и -λ на zip.

    Args:
        coeff: 'z' или 'zN'; для Z/N вес приводится к 0..N-1

    Raises:
        ModeMismatch: Вид коцикла не соответствует режиму раскраски
    """
    modulus = parse_coeff(coeff)
    _check_pairing(d, c.mode, cp)
    colors = c.as_dict()
    chi, lam = cp.chi, cp.lam
    total = 0
    for x in d.crossings:
        if x.sign > 0:
            total += int(chi[colors[x.under_in], colors[x.over]])
        else:
            total -= int(chi[colors[x.under_out], colors[x.over]])
    for v in d.vertices:
        left, right = (colors[a] for a in v.pair)
        value = int(lam[left, right]) if cp.kind == "qualgebra" else int(lam[left])
        total += -value if v.kind == ZIP else value
    return total % modulus if modulus else total


@dataclass
class WeightMultiset:
    counts: Counter = field(default_factory=Counter)
    modulus: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def polynomial(self) -> Dict[int, int]:
        """Многочлен Σ t^W как отображение показатель -> коэффициент."""
        return dict(sorted(self.counts.items()))

    def polynomial_text(self) -> str:
        terms = []
        for exponent, coef in self.polynomial().items():
            if exponent == 0:
                terms.append(str(coef))
                continue
            power = "t" if exponent == 1 else f"t^{exponent}"
            terms.append(power if coef == 1 else f"{coef}{power}")
        return " + ".join(terms) if terms else "0"

    def to_dict(self) -> Dict:
        return {
            "coeff": "z" if self.modulus == 0 else f"z{self.modulus}",
            "total": self.total,
            "weights": {str(k): v for k, v in self.polynomial().items()},
            "polynomial": self.polynomial_text(),
        }


def weight_multiset(s: Structure, cp: CocyclePair, d: Diagram,
                    mode: Optional[Mode] = None, coeff="z") -> WeightMultiset:
    """
    Мультимножество весов по всем раскраскам диаграммы.

    Args:
        s: Структура, раскрашивающая диаграмму
        cp: Коцикл структуры s с коэффициентами coeff
        d: Диаграмма
        mode: Режим раскраски (по умолчанию определяется видом коцикла)
        coeff: 'z' или 'zN'

    Raises:
        NotACocycle: Если cp не является коциклом структуры s над coeff
    """
    modulus = parse_coeff(coeff)
    if not is_cocycle(s, cp, modulus):
        raise NotACocycle(f"Пара (χ, λ) не является {cp.kind}-коциклом", {"kind": cp.kind, "coeff": str(coeff)})
    mode = Mode(mode) if mode is not None else default_mode(cp)
    _check_pairing(d, mode, cp)
    counts = Counter(weight(d, c, cp, modulus) for c in enumerate_colorings(s, d, mode))
    logger.debug(f"Мультимножество весов: {dict(counts)}")
    return WeightMultiset(counts, modulus)


@dataclass(frozen=True)
class BoltzmannVerdict:
    move_id: str
    passed: bool
    witness: Optional[Dict] = None

    def to_dict(self) -> Dict:
        return {"move_id": self.move_id, "passed": self.passed, "witness": self.witness}


def _weights_by_ports(s: Structure, cp: CocyclePair, d: Diagram, mode: Mode, modulus: int) -> Dict[tuple, List[int]]:
    table: Dict[tuple, List[int]] = {}
    for c in enumerate_colorings(s, d, mode):
        table.setdefault(port_colors(d, c), []).append(weight(d, c, cp, modulus))
    return {k: sorted(v) for k, v in table.items()}


def check_boltzmann(s: Structure, cp: CocyclePair, mp: MovePair,
                    mode: Optional[Mode] = None, coeff="z") -> BoltzmannVerdict:
    """
    Сравнивает веса продолжений каждой граничной раскраски слева и справа.

    Returns:
        BoltzmannVerdict; witness содержит цвета портов и списки весов
    """
    modulus = parse_coeff(coeff)
    mode = Mode(mode) if mode is not None else default_mode(cp)
    lhs = _weights_by_ports(s, cp, mp.lhs, mode, modulus)
    rhs = _weights_by_ports(s, cp, mp.rhs, mode, modulus)
    for ports in sorted(set(lhs) | set(rhs)):
        left, right = lhs.get(ports, []), rhs.get(ports, [])
        if left != right:
            witness = {"ports": list(ports), "lhs": left, "rhs": right}
            logger.info(f"Веса не сохраняются движением {mp.move_id}: {witness}")
            return BoltzmannVerdict(mp.move_id, False, witness)
    return BoltzmannVerdict(mp.move_id, True)


def linearity_check(s: Structure, d: Diagram, c: Coloring, cp1: CocyclePair, cp2: CocyclePair,
                    coeff="z") -> bool:
    """W(cp1 + cp2) = W(cp1) + W(cp2) для данной раскраски (в Z или Z/m)."""
    modulus = parse_coeff(coeff)
    total = weight(d, c, cp1, modulus) + weight(d, c, cp2, modulus)
    return weight(d, c, cp1 + cp2, modulus) == (total % modulus if modulus else total)


def pairs_with(cp: CocyclePair, d: Diagram, mode: Mode) -> bool:
    """Можно ли взвешивать коциклом cp раскраски диаграммы d в режиме mode."""
    try:
        _check_pairing(d, mode, cp)
    except ModeMismatch:
        return False
    return True
