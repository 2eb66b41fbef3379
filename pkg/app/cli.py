"""
Командная строка QualgebraLab.

Все подкоманды печатают результат в stdout (JSON по умолчанию), диагностика
идет в stderr и в лог-файл. Коды выхода: 0 - успех, 2 - ошибка входных
данных или нарушение аксиом (с JSON-объектом ошибки), 1 - внутренняя ошибка.
"""
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from core import __version__
from core.algebra import FiniteQualgebra, FiniteSquandle, list_builtin_structures
from core.classify import enumerate_qualgebras, enumerate_squandles, property_report
from core.cohomology import CocyclePair, second_cohomology
from core.coloring import Mode, check_topological, count_colorings, enumerate_colorings
from core.diagram import list_builtin_diagrams, move_fixtures, random_move_sequence, validate
from core.exceptions import QualgebraLabError
from core.freeqa import (
    bounded_equivalence,
    format_word,
    parse_product,
    parse_term,
    reduce_term,
    relation_sides,
    tail_invariant_check,
    to_free_group,
)
from core.invariants import check_boltzmann, pairs_with, weight_multiset
from utils import excel_utils, io_utils
from utils.config_manager import get_setting, init_config_manager, set_setting
from utils.log_utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Уровень логирования в stderr")
    common.add_argument("--log-dir", default=argparse.SUPPRESS, help="Папка лог-файлов")
    common.add_argument("--settings-dir", default=argparse.SUPPRESS, help="Папка пресетов настроек")
    common.add_argument("--budget-seconds", type=float, default=argparse.SUPPRESS,
                        help="Лимит времени перебора в секундах")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Зерно случайных прогонов")
    common.add_argument("--format", dest="output_format", choices=["json", "text"], default=argparse.SUPPRESS,
                        help="Формат вывода")
    common.add_argument("--json", dest="json_path", metavar="PATH", default=argparse.SUPPRESS,
                        help="Записать JSON-результат в файл вместо stdout")
    return common


def _default_mode(s) -> str:
    if isinstance(s, FiniteQualgebra):
        return Mode.QUALGEBRA.value
    if isinstance(s, FiniteSquandle):
        return Mode.SQUANDLE.value
    return Mode.QUANDLE.value


def build_parser() -> argparse.ArgumentParser:
    """
    Строит парсер аргументов со всеми подкомандами
    """
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="qualgebra-lab",
        description="QualgebraLab - квалгебры, скавндлы и инварианты 3-валентных графов",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list-builtins", action="store_true", help="Показать встроенные структуры и диаграммы")
    sub = parser.add_subparsers(dest="command", metavar="command")
    modes = [m.value for m in Mode]

    p = sub.add_parser("classify", parents=[common], help="Классификация структур малого порядка")
    p.add_argument("--kind", choices=["qualgebra", "squandle"], default="qualgebra")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--nontrivial", action="store_true", help="Только структуры с нетривиальным квандлом")
    p.add_argument("--xlsx", metavar="PATH", help="Экспорт отчета в Excel")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("color", parents=[common], help="Раскраски диаграммы")
    p.add_argument("--structure", required=True, help="builtin:ИМЯ или путь к JSON")
    p.add_argument("--diagram", required=True, help="builtin:ИМЯ или путь к JSON")
    p.add_argument("--mode", choices=modes)
    p.add_argument("--list", action="store_true", help="Вывести сами раскраски")
    p.set_defaults(handler=cmd_color)

    p = sub.add_parser("cohomology", parents=[common], help="Вторые когомологии")
    p.add_argument("--structure", required=True)
    p.add_argument("--coeff", help="z, z2, zN")
    p.add_argument("--representatives", action="store_true")
    p.add_argument("--xlsx", metavar="PATH")
    p.set_defaults(handler=cmd_cohomology)

    p = sub.add_parser("invariant", parents=[common], help="Мультимножество весов Больцмана")
    p.add_argument("--structure", required=True)
    p.add_argument("--diagram", required=True)
    p.add_argument("--cocycle", required=True, help="Путь к JSON коцикла")
    p.add_argument("--mode", choices=modes)
    p.add_argument("--coeff", help="z, z2, zN")
    p.add_argument("--polynomial", action="store_true", help="Только текст многочлена")
    p.set_defaults(handler=cmd_invariant)

    p = sub.add_parser("moves", parents=[common], help="Проверка движений на фикстурах")
    p.add_argument("--structure", required=True)
    p.add_argument("--mode", choices=modes)
    p.add_argument("--cocycle", help="Проверить также веса Больцмана этого коцикла")
    p.add_argument("--coeff", help="z, z2, zN")
    p.set_defaults(handler=cmd_moves)

    p = sub.add_parser("fuzz", parents=[common], help="Случайные последовательности движений")
    p.add_argument("--structure", required=True)
    p.add_argument("--diagram", required=True)
    p.add_argument("--mode", choices=modes)
    p.add_argument("--steps", type=int)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--cocycle", help="Сравнивать веса этого коцикла (по умолчанию - образующие H²)")
    p.add_argument("--coeff", help="z, z2, zN")
    p.set_defaults(handler=cmd_fuzz)

    p = sub.add_parser("freeqa", parents=[common], help="Свободная ассоциативная квалгебра")
    fsub = p.add_subparsers(dest="freeqa_command", metavar="action", required=True)
    f = fsub.add_parser("check-relation", parents=[common], help="Проверка соотношения (b⊲a)◇(a⊲b)")
    f.add_argument("--depth", type=int)
    f.set_defaults(handler=cmd_freeqa_relation)
    f = fsub.add_parser("reduce", parents=[common], help="Приведенная форма ⊲-терма")
    f.add_argument("term")
    f.set_defaults(handler=cmd_freeqa_reduce)
    f = fsub.add_parser("equivalent", parents=[common], help="Поиск цепочки сдвигов между произведениями")
    f.add_argument("lhs")
    f.add_argument("rhs")
    f.add_argument("--depth", type=int)
    f.set_defaults(handler=cmd_freeqa_equivalent)

    p = sub.add_parser("diagram", parents=[common], help="Диаграммы")
    dsub = p.add_subparsers(dest="diagram_command", metavar="action", required=True)
    d = dsub.add_parser("validate", parents=[common])
    d.add_argument("path")
    d.set_defaults(handler=cmd_diagram_validate)
    d = dsub.add_parser("builtin", parents=[common])
    d.add_argument("name")
    d.set_defaults(handler=cmd_diagram_builtin)
    d = dsub.add_parser("list", parents=[common])
    d.set_defaults(handler=lambda args: {"diagrams": list_builtin_diagrams()})

    p = sub.add_parser("structure", parents=[common], help="Встроенные структуры")
    ssub = p.add_subparsers(dest="structure_command", metavar="action", required=True)
    s = ssub.add_parser("show", parents=[common])
    s.add_argument("name", help="builtin-имя, builtin:ИМЯ или путь к JSON")
    s.add_argument("--xlsx", metavar="PATH")
    s.set_defaults(handler=cmd_structure_show)
    s = ssub.add_parser("list", parents=[common])
    s.set_defaults(handler=lambda args: {"structures": list_builtin_structures()})

    return parser


# --- обработчики подкоманд ---

def cmd_classify(args) -> Dict[str, Any]:
    enumerate_fn = enumerate_qualgebras if args.kind == "qualgebra" else enumerate_squandles
    result = enumerate_fn(
        args.size,
        nontrivial_only=args.nontrivial,
        budget_seconds=get_setting("classify.budget_seconds"),
        max_size=get_setting("classify.max_size"),
        exhaustive_bound=get_setting("classify.exhaustive_bound"),
    )
    representatives = []
    for rep in result.representatives:
        item = io_utils.structure_to_dict(rep)
        if isinstance(rep, FiniteQualgebra):
            item["properties"] = property_report(rep).to_dict()
        representatives.append(item)
    if args.xlsx:
        excel_utils.export_classification(result, args.xlsx)
    return {
        "kind": result.kind,
        "size": result.size,
        "nontrivial_only": args.nontrivial,
        "count": len(result.representatives),
        "nontrivial_count": result.nontrivial_count,
        "trivial_count": result.trivial_count,
        "representatives": representatives,
    }


def cmd_color(args) -> Dict[str, Any]:
    s = io_utils.resolve_structure(args.structure)
    d = io_utils.resolve_diagram(args.diagram)
    validate(d)
    mode = args.mode or _default_mode(s)
    data: Dict[str, Any] = {"mode": mode}
    if args.list:
        colorings = enumerate_colorings(s, d, mode)
        data["count"] = len(colorings)
        data["colorings"] = [c.to_dict(s.carrier.names) for c in colorings]
    else:
        data["count"] = count_colorings(s, d, mode)
    return data


def _coeff(args) -> str:
    return args.coeff or get_setting("cohomology.coeff", "z")


def cmd_cohomology(args) -> Dict[str, Any]:
    s = io_utils.resolve_structure(args.structure)
    coeff = _coeff(args)
    result = second_cohomology(s, coeff)
    if args.xlsx:
        excel_utils.export_cohomology(s, result, args.xlsx, label=args.structure)
    return result.to_dict(with_representatives=args.representatives)


def cmd_invariant(args) -> Dict[str, Any]:
    s = io_utils.resolve_structure(args.structure)
    d = io_utils.resolve_diagram(args.diagram)
    validate(d)
    cp = io_utils.load_cocycle(args.cocycle)
    multiset = weight_multiset(s, cp, d, args.mode, _coeff(args))
    if args.polynomial:
        return {"polynomial": multiset.polynomial_text()}
    return multiset.to_dict()


def cmd_moves(args) -> Dict[str, Any]:
    s = io_utils.resolve_structure(args.structure)
    cp = io_utils.load_cocycle(args.cocycle) if args.cocycle else None
    mode = args.mode or _default_mode(s)
    coeff = _coeff(args)
    verdicts = []
    for mp in move_fixtures():
        if mode == Mode.QUANDLE.value and (mp.lhs.vertices or mp.rhs.vertices):
            continue
        item = check_topological(s, mp, mode).to_dict()
        item["sign"] = mp.sign
        if cp is not None:
            item["boltzmann"] = check_boltzmann(s, cp, mp, mode, coeff).to_dict()
        verdicts.append(item)
    passed = all(v["passed"] and v.get("boltzmann", {"passed": True})["passed"] for v in verdicts)
    return {"mode": mode, "passed": passed, "moves": verdicts}


def _fuzz_cocycles(args, s, d, mode: str, coeff: str) -> List[CocyclePair]:
    if args.cocycle:
        return [io_utils.load_cocycle(args.cocycle)]
    cocycles = [c for _, c in second_cohomology(s, coeff).representatives]
    return [c for c in cocycles if pairs_with(c, d, Mode(mode))]


def cmd_fuzz(args) -> Dict[str, Any]:
    s = io_utils.resolve_structure(args.structure)
    d = io_utils.resolve_diagram(args.diagram)
    validate(d)
    mode = args.mode or _default_mode(s)
    coeff = _coeff(args)
    steps = args.steps if args.steps is not None else get_setting("fuzz.steps", 5)
    seed = get_setting("fuzz.seed", 0)
    rng = np.random.default_rng(seed)
    expected = count_colorings(s, d, mode)
    # квандловые коциклы считаются на квандле структуры
    weighted = s.quandle if mode == Mode.QUANDLE.value else s
    cocycles = _fuzz_cocycles(args, weighted, d, mode, coeff)

    def weights(diagram) -> List[Dict[str, int]]:
        return [weight_multiset(weighted, cp, diagram, mode, coeff).to_dict()["weights"] for cp in cocycles]

    expected_weights = weights(d)
    runs = []
    for _ in range(args.runs):
        moved, history = random_move_sequence(d, rng, steps)
        count = count_colorings(s, moved, mode)
        weights_preserved = weights(moved) == expected_weights
        runs.append({
            "moves": [move_id for move_id, _, _ in history],
            "count": count,
            "weights_preserved": weights_preserved,
            "preserved": count == expected and weights_preserved,
        })
    logger.info(f"Fuzz: {len(runs)} прогонов, {len(cocycles)} коциклов, seed={seed}")
    return {"seed": seed, "mode": mode, "coeff": coeff, "count": expected, "weights": expected_weights,
            "passed": all(r["preserved"] for r in runs), "runs": runs}


def cmd_freeqa_relation(args) -> Dict[str, Any]:
    depth = args.depth if args.depth is not None else get_setting("freeqa.depth", 6)
    lhs, rhs = relation_sides()
    equivalence = bounded_equivalence(lhs, rhs, depth)
    # в орбите левой части не появляется множитель b, а правая его содержит
    tails = tail_invariant_check(lhs, "b", depth)
    rhs_has_b = any(str(f) == "b" for f in rhs.factors)
    return {
        "lhs": lhs.to_text(),
        "rhs": rhs.to_text(),
        "free_group": {"lhs": format_word(to_free_group(lhs)), "rhs": format_word(to_free_group(rhs))},
        "equivalence": equivalence.to_dict(),
        "tail_check": tails.to_dict(),
        "distinct": not equivalence.equivalent and tails.passed and rhs_has_b,
    }


def cmd_freeqa_reduce(args) -> Dict[str, Any]:
    reduced = reduce_term(parse_term(args.term))
    return {"term": reduced.to_text(), "pretty": str(reduced), "length": len(reduced)}


def cmd_freeqa_equivalent(args) -> Dict[str, Any]:
    depth = args.depth if args.depth is not None else get_setting("freeqa.depth", 6)
    result = bounded_equivalence(parse_product(args.lhs), parse_product(args.rhs), depth)
    return result.to_dict()


def cmd_diagram_validate(args) -> Dict[str, Any]:
    return validate(io_utils.resolve_diagram(args.path)).to_dict()


def cmd_diagram_builtin(args) -> Dict[str, Any]:
    ref = args.name if args.name.startswith(io_utils.BUILTIN_PREFIX) else f"{io_utils.BUILTIN_PREFIX}{args.name}"
    return io_utils.diagram_to_dict(io_utils.resolve_diagram(ref))


def cmd_structure_show(args) -> Dict[str, Any]:
    ref = args.name
    if not ref.startswith(io_utils.BUILTIN_PREFIX) and ref in list_builtin_structures():
        ref = f"{io_utils.BUILTIN_PREFIX}{ref}"
    s = io_utils.resolve_structure(ref)
    data = io_utils.structure_to_dict(s)
    if isinstance(s, FiniteQualgebra):
        data["properties"] = property_report(s).to_dict()
    if args.xlsx:
        excel_utils.export_structure(s, args.xlsx, title=args.name.replace(io_utils.BUILTIN_PREFIX, ""))
    return data


# --- вывод ---

def _render_text(data: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for key, value in data.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
        return lines
    if isinstance(data, list):
        lines = []
        for item in data:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
        return lines
    return [f"{pad}{data}"]


def emit(data: Any, output_format: str, json_path: Optional[str], indent: int) -> None:
    """
    Печатает результат в stdout или сохраняет в файл
    """
    if json_path:
        io_utils.save_json(data, json_path, indent)
        return
    if output_format == "text":
        print("\n".join(_render_text(data)))
    else:
        print(io_utils.dumps(data, indent))


def _configure(args) -> None:
    init_config_manager(getattr(args, "settings_dir", "settings_presets"))
    if hasattr(args, "budget_seconds"):
        set_setting("classify.budget_seconds", args.budget_seconds)
    if hasattr(args, "seed"):
        set_setting("fuzz.seed", args.seed)
    if hasattr(args, "log_level"):
        set_setting("logging.level", args.log_level)
    if hasattr(args, "log_dir"):
        set_setting("logging.dir", args.log_dir)
    if hasattr(args, "output_format"):
        set_setting("output.format", args.output_format)
    setup_logging(get_setting("logging.dir"), get_setting("logging.level"))


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа CLI

    Returns:
        Код выхода: 0, 1 или 2
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure(args)

    output_format = get_setting("output.format", "json")
    indent = get_setting("output.indent", 2)
    json_path = getattr(args, "json_path", None)

    handler: Optional[Callable] = getattr(args, "handler", None)
    if args.list_builtins:
        handler = lambda _: {"structures": list_builtin_structures(), "diagrams": list_builtin_diagrams()}
    if handler is None:
        parser.print_help(sys.stderr)
        return EXIT_INVALID

    try:
        logger.debug(f"Запуск подкоманды {args.command}")
        data = handler(args)
    except QualgebraLabError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        emit({"error": e.to_dict()}, "json", None, indent)
        return EXIT_INVALID
    except (FileNotFoundError, ValueError) as e:
        logger.error(f"Некорректные входные данные: {e}")
        emit({"error": {"code": "invalid_input", "message": str(e), "details": {}}}, "json", None, indent)
        return EXIT_INVALID
    except Exception:
        logger.exception("Внутренняя ошибка")
        return EXIT_INTERNAL

    emit(data, output_format, json_path, indent)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
