"""
Иерархия исключений QualgebraLab.

Каждое исключение несет машиночитаемый код и словарь деталей, которые
CLI выводит как JSON-объект ошибки.
"""
from typing import Any, Dict, Optional


class QualgebraLabError(Exception):
    """
    Базовое исключение библиотеки.

    Args:
        message: Человекочитаемое описание ошибки
        details: Дополнительные данные (свидетель, имя аксиомы и т.п.)
    """

    code = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Возвращает объект ошибки для вывода в JSON."""
        return {"code": self.code, "message": self.message, "details": self.details}


# --- algebra ---

class AxiomViolation(QualgebraLabError):
    """Таблица нарушает аксиому; witness - набор элементов-свидетелей."""

    code = "axiom_violation"

    def __init__(self, axiom: str, witness: tuple):
        super().__init__(
            f"Нарушена аксиома {axiom} на элементах {witness}",
            {"axiom": axiom, "witness": list(witness)},
        )
        self.axiom = axiom
        self.witness = tuple(witness)


class NonBijectiveTranslation(QualgebraLabError):
    code = "non_bijective_translation"

    def __init__(self, column: int):
        super().__init__(
            f"Правый сдвиг S_{column} не является перестановкой",
            {"column": column},
        )
        self.column = column


class TableShapeError(QualgebraLabError):
    code = "table_shape"


class GroupTableError(QualgebraLabError):
    code = "group_table"


class KindMismatch(QualgebraLabError):
    code = "kind_mismatch"


class UnknownName(QualgebraLabError):
    code = "unknown_name"


# --- classify ---

class SizeTooLarge(QualgebraLabError):
    code = "size_too_large"


class BudgetExceeded(QualgebraLabError):
    code = "budget_exceeded"


# --- diagram ---

class DiagramError(QualgebraLabError):
    code = "diagram_error"


class DanglingArc(DiagramError):
    code = "dangling_arc"


class DoubleSource(DiagramError):
    code = "double_source"


class DoubleSink(DiagramError):
    code = "double_sink"


class UnknownArc(DiagramError):
    code = "unknown_arc"


class SinkVertexPresent(DiagramError):
    code = "sink_vertex_present"


class NonTrivalent(DiagramError):
    code = "non_trivalent"


class UnknownMove(DiagramError):
    code = "unknown_move"


class SiteMismatch(DiagramError):
    code = "site_mismatch"


class InvalidDirection(DiagramError):
    code = "invalid_direction"


# --- coloring / invariants / cohomology ---

class ModeMismatch(QualgebraLabError):
    code = "mode_mismatch"


class ShapeMismatch(QualgebraLabError):
    code = "shape_mismatch"


class InconsistentLattice(QualgebraLabError):
    code = "inconsistent_lattice"


class NotACocycle(QualgebraLabError):
    code = "not_a_cocycle"


# --- freeqa ---

class NotReduced(QualgebraLabError):
    code = "not_reduced"


class PositionOutOfRange(QualgebraLabError):
    code = "position_out_of_range"


class TermSyntaxError(QualgebraLabError):
    code = "term_syntax"
