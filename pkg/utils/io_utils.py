"""
Чтение и запись JSON-форматов структур, диаграмм и коциклов
"""
import os
import json
import logging
from typing import Any, Dict, Optional, Union

import numpy as np

from core.algebra import (
    Carrier,
    FiniteQualgebra,
    FiniteSquandle,
    Quandle,
    Structure,
    builtin_structure,
    group_qualgebra,
    make_group,
    make_quandle,
    make_qualgebra,
    make_squandle,
)
from core.cohomology import CocyclePair
from core.diagram import UNZIP, ZIP, Boundary, Crossing, Diagram, Vertex, builtin_diagram
from core.exceptions import KindMismatch, TableShapeError

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Объект типа {type(value).__name__} не сериализуется в JSON")


def dumps(data: Any, indent: Optional[int] = 2) -> str:
    """Детерминированная JSON-строка: ключи в порядке вставки, UTF-8 без экранирования."""
    return json.dumps(data, indent=indent, ensure_ascii=False, default=_json_default)


def load_json(path: str) -> Any:
    """
    Загружает JSON-файл

    Raises:
        FileNotFoundError: Если файл не существует
        ValueError: Если файл не является корректным JSON
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Файл не найден: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Некорректный JSON в {path}: {e}") from e


def save_json(data: Any, path: str, indent: Optional[int] = 2) -> str:
    """
    Сохраняет данные в JSON-файл, создавая папку при необходимости

    Returns:
        Путь к сохраненному файлу
    """
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(data, indent))
        f.write("\n")
    logger.info(f"Данные сохранены в {path}")
    return path


# --- структуры ---

def structure_to_dict(s: Structure) -> Dict[str, Any]:
    data: Dict[str, Any] = {"kind": s.kind, "n": s.n}
    if s.carrier.names:
        data["names"] = list(s.carrier.names)
    data["lhd"] = s.lhd.tolist()
    if isinstance(s, FiniteQualgebra):
        data["diamond"] = s.diamond.tolist()
    elif isinstance(s, FiniteSquandle):
        data["square"] = s.square.tolist()
    return data


def _require(data: Dict[str, Any], key: str) -> Any:
    if key not in data:
        raise TableShapeError(f"В описании структуры отсутствует поле '{key}'", {"field": key})
    return data[key]


def structure_from_dict(data: Dict[str, Any]) -> Structure:
    """
    Строит структуру по JSON-описанию с проверкой аксиом.

    Вид "group" задает групповую квалгебру по таблице умножения
    (поля "mul", "unit", "inv").

    Raises:
        KindMismatch: Если вид структуры неизвестен
        AxiomViolation: Если таблицы нарушают аксиомы
    """
    kind = data.get("kind", "qualgebra")
    names = data.get("names")
    n = data.get("n")
    if n is None:
        table = data.get("mul") if kind == "group" else _require(data, "lhd")
        n = len(table)
    carrier = Carrier(int(n), tuple(names) if names else None)

    if kind == "group":
        group = make_group(carrier, _require(data, "mul"), int(_require(data, "unit")), _require(data, "inv"))
        return group_qualgebra(group)

    q = make_quandle(carrier, _require(data, "lhd"))
    if kind == "quandle":
        return q
    if kind == "qualgebra":
        return make_qualgebra(q, _require(data, "diamond"))
    if kind == "squandle":
        return make_squandle(q, _require(data, "square"))
    raise KindMismatch(f"Неизвестный вид структуры: {kind}", {"kind": kind})


def resolve_structure(ref: str) -> Structure:
    """
    Возвращает структуру по ссылке: "builtin:ИМЯ" или путь к JSON-файлу
    """
    if ref.startswith(BUILTIN_PREFIX):
        return builtin_structure(ref[len(BUILTIN_PREFIX):])
    logger.debug(f"Загрузка структуры из {ref}")
    return structure_from_dict(load_json(ref))


# --- диаграммы ---

def diagram_to_dict(d: Diagram) -> Dict[str, Any]:
    crossings = [
        {"sign": "+" if x.sign > 0 else "-", "over": x.over, "under_in": x.under_in, "under_out": x.under_out}
        for x in d.crossings
    ]
    vertices = []
    for v in d.vertices:
        if v.kind == ZIP:
            vertices.append({"kind": ZIP, "in_left": v.ins[0], "in_right": v.ins[1], "out": v.outs[0]})
        else:
            vertices.append({"kind": UNZIP, "in": v.ins[0], "out_left": v.outs[0], "out_right": v.outs[1]})
    data: Dict[str, Any] = {
        "arcs": list(d.arcs),
        "crossings": crossings,
        "vertices": vertices,
        "free_loops": d.free_loops,
    }
    if d.boundary is not None:
        data["boundary"] = {"inputs": list(d.boundary.inputs), "outputs": list(d.boundary.outputs)}
    return data


def _sign(value: Union[str, int]) -> int:
    if value in ("+", 1, "1", "+1"):
        return 1
    if value in ("-", -1, "-1"):
        return -1
    raise ValueError(f"Некорректный знак перекрестка: {value!r}")


def _vertex_from_dict(item: Dict[str, Any]) -> Vertex:
    kind = item.get("kind")
    if kind == ZIP:
        return Vertex.zip(item["in_left"], item["in_right"], item["out"])
    if kind == UNZIP:
        return Vertex.unzip(item["in"], item["out_left"], item["out_right"])
    # Вершины-стоки и источники сохраняются как есть, их отклоняет validate
    return Vertex(str(kind), tuple(item.get("ins", ())), tuple(item.get("outs", ())))


def diagram_from_dict(data: Dict[str, Any]) -> Diagram:
    """
    Строит диаграмму по JSON-описанию без проверки (см. diagram.validate)
    """
    crossings = tuple(
        Crossing(over=x["over"], under_in=x["under_in"], under_out=x["under_out"], sign=_sign(x.get("sign", "+")))
        for x in data.get("crossings", [])
    )
    vertices = tuple(_vertex_from_dict(v) for v in data.get("vertices", []))
    boundary = None
    if "boundary" in data:
        boundary = Boundary(tuple(data["boundary"].get("inputs", ())), tuple(data["boundary"].get("outputs", ())))
    return Diagram(
        arcs=tuple(data.get("arcs", [])),
        crossings=crossings,
        vertices=vertices,
        free_loops=int(data.get("free_loops", 0)),
        boundary=boundary,
    )


def resolve_diagram(ref: str) -> Diagram:
    if ref.startswith(BUILTIN_PREFIX):
        return builtin_diagram(ref[len(BUILTIN_PREFIX):])
    logger.debug(f"Загрузка диаграммы из {ref}")
    return diagram_from_dict(load_json(ref))


# --- коциклы ---

def cocycle_to_dict(cp: CocyclePair) -> Dict[str, Any]:
    data = {"kind": cp.kind, "chi": [[int(x) for x in row] for row in cp.chi]}
    if cp.lam is not None:
        data["lambda"] = [int(x) if cp.lam.ndim == 1 else [int(y) for y in x] for x in cp.lam]
    return data


def cocycle_from_dict(data: Dict[str, Any]) -> CocyclePair:
    """
    Строит пару (χ, λ); вид по умолчанию определяется формой λ
    """
    chi = _require(data, "chi")
    lam = data.get("lambda")
    kind = data.get("kind")
    if kind is None:
        if lam is None:
            kind = "quandle"
        else:
            kind = "squandle" if np.ndim(lam) == 1 else "qualgebra"
    return CocyclePair(kind, np.array(chi, dtype=object), None if lam is None else np.array(lam, dtype=object))


def load_cocycle(path: str) -> CocyclePair:
    return cocycle_from_dict(load_json(path))


def save_structure(s: Structure, path: str) -> str:
    return save_json(structure_to_dict(s), path)


def save_diagram(d: Diagram, path: str) -> str:
    return save_json(diagram_to_dict(d), path)


def save_cocycle(cp: CocyclePair, path: str) -> str:
    return save_json(cocycle_to_dict(cp), path)
