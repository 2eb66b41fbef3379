"""
Утилиты для экспорта результатов в Excel
"""
import os
import re
import logging
from typing import List, Dict, Any, Optional, Union

import pandas as pd
import openpyxl
from openpyxl.worksheet.worksheet import Worksheet
from openpyxl.workbook.workbook import Workbook
from openpyxl.styles import Font, Alignment, Border, Side, PatternFill
from openpyxl.utils import get_column_letter, column_index_from_string
from openpyxl.worksheet.table import Table, TableStyleInfo

from core.algebra import FiniteQualgebra, FiniteSquandle, Structure
from core.classify import ClassificationResult, report_frame
from core.cohomology import CohomologyResult, variable_index

logger = logging.getLogger(__name__)

HEADER_FILL = "DDEBF7"
CORNER_FILL = "BDD7EE"
CENTER = {'horizontal': 'center', 'vertical': 'center'}
THIN_BORDER = {'style': 'thin', 'color': '999999'}


def new_workbook() -> Workbook:
    """
    Создает пустую рабочую книгу без листа по умолчанию
    """
    workbook = openpyxl.Workbook()
    workbook.remove(workbook.active)
    return workbook


def save_workbook(workbook: Workbook, file_path: str) -> bool:
    """
    Сохраняет рабочую книгу Excel в указанный файл.

    Args:
        workbook (Workbook): Объект рабочей книги для сохранения
        file_path (str): Путь для сохранения файла

    Returns:
        bool: True, если сохранение успешно, False в случае ошибки
    """
    try:
        # Создаем директорию, если она не существует
        directory = os.path.dirname(file_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)

        workbook.save(file_path)
        logger.info(f"Файл успешно сохранен: {file_path}")
        return True
    except Exception as e:
        logger.error(f"Ошибка при сохранении файла {file_path}: {e}")
        return False


def set_column_width(worksheet: Worksheet, column: Union[int, str], width: float) -> bool:
    try:
        column_letter = get_column_letter(column) if isinstance(column, int) else column
        worksheet.column_dimensions[column_letter].width = width
        return True
    except Exception as e:
        logger.error(f"Ошибка при установке ширины столбца {column}: {e}")
        return False


def apply_style_to_cell(worksheet: Worksheet, row: int, column: Union[int, str], bold: bool = False,
                        alignment: Dict = None, border: Dict = None, fill_color: str = None) -> bool:
    """
    Оформляет ячейку таблицы Кэли или отчета.

    Args:
        worksheet: Лист
        row, column: Координаты ячейки (столбец - номер или буква)
        bold: Жирный шрифт (подписи элементов носителя)
        alignment: Ключи Alignment, например CENTER
        border: {'style': ..., 'color': ...} для всех четырех сторон
        fill_color: Заливка RRGGBB
    """
    try:
        if isinstance(column, str):
            column = column_index_from_string(column)

        cell = worksheet.cell(row=row, column=column)
        cell.font = Font(name='Calibri', size=11, bold=bold)

        if alignment:
            cell.alignment = Alignment(**{k: v for k, v in alignment.items()
                                          if k in ('horizontal', 'vertical', 'wrap_text')})

        if border:
            side = Side(style=border.get('style', 'thin'), color=border.get('color', '000000'))
            cell.border = Border(left=side, right=side, top=side, bottom=side)

        if fill_color:
            cell.fill = PatternFill(start_color=fill_color, end_color=fill_color, fill_type='solid')
        return True
    except Exception as e:
        logger.error(f"Ошибка при применении стилей к ячейке [{row}, {column}]: {e}")
        return False


def apply_style_to_range(worksheet: Worksheet, start_row: int, start_column: int,
                         end_row: int, end_column: int, **style) -> bool:
    """
    Применяет стили apply_style_to_cell к прямоугольному диапазону
    """
    success = True
    for row in range(start_row, end_row + 1):
        for col in range(start_column, end_column + 1):
            success = apply_style_to_cell(worksheet, row, col, **style) and success
    logger.debug(f"Применены стили к диапазону [{start_row}, {start_column}] - [{end_row}, {end_column}]")
    return success


def _table_name(text: str) -> str:
    name = re.sub(r"[^A-Za-z0-9_]", "_", text)
    return name if name[:1].isalpha() else f"T_{name}"


def create_table_from_data(worksheet: Worksheet, data: List[List[Any]], start_row: int, start_column: int,
                           table_name: str, headers: List[str],
                           table_style: str = 'TableStyleMedium2') -> bool:
    """
    Записывает данные под строкой заголовков и оформляет диапазон как таблицу Excel.

    Args:
        worksheet (Worksheet): Рабочий лист
        data (List[List[Any]]): Строки данных (без заголовков)
        start_row (int): Строка заголовков
        start_column (int): Первый столбец
        table_name (str): Имя таблицы, уникальное в пределах книги
        headers (List[str]): Заголовки столбцов
        table_style (str, optional): Стиль таблицы. По умолчанию 'TableStyleMedium2'.

    Returns:
        bool: True, если успешно
    """
    try:
        if not data:
            logger.warning(f"Нет данных для таблицы '{table_name}'")
            return False

        for col_idx, header in enumerate(headers, start=start_column):
            worksheet.cell(row=start_row, column=col_idx).value = str(header)
        apply_style_to_range(
            worksheet, start_row, start_column, start_row, start_column + len(headers) - 1,
            bold=True, alignment=CENTER
        )

        for row_idx, row_data in enumerate(data, start=start_row + 1):
            for col_idx, cell_value in enumerate(row_data, start=start_column):
                worksheet.cell(row=row_idx, column=col_idx).value = cell_value

        end_row = start_row + len(data)
        end_column = start_column + len(headers) - 1
        table_ref = f"{get_column_letter(start_column)}{start_row}:{get_column_letter(end_column)}{end_row}"
        table = Table(displayName=_table_name(table_name), ref=table_ref)
        table.tableStyleInfo = TableStyleInfo(
            name=table_style,
            showFirstColumn=False,
            showLastColumn=False,
            showRowStripes=True,
            showColumnStripes=False
        )
        worksheet.add_table(table)
        logger.debug(f"Создана таблица '{table_name}' в диапазоне {table_ref}")
        return True
    except Exception as e:
        logger.error(f"Ошибка при создании таблицы '{table_name}': {e}")
        return False


def auto_adjust_column_width(worksheet: Worksheet, min_width: float = 6,
                             max_width: float = 60, padding: float = 1.5) -> bool:
    """
    Подбирает ширину всех столбцов по длине содержимого.
    """
    try:
        for col_idx in range(1, worksheet.max_column + 1):
            widest = 0
            for row_idx in range(1, worksheet.max_row + 1):
                value = worksheet.cell(row=row_idx, column=col_idx).value
                if value is not None:
                    widest = max(widest, len(str(value)) * 1.2)
            set_column_width(worksheet, col_idx, min(max(min_width, widest + padding), max_width))
        return True
    except Exception as e:
        logger.error(f"Ошибка при автоматической регулировке ширины столбцов: {e}")
        return False


def write_dataframe(worksheet: Worksheet, df: pd.DataFrame, table_name: str, start_row: int = 1) -> bool:
    """
    Записывает DataFrame как таблицу Excel начиная со строки start_row
    """
    data = [[_cell(v) for v in row] for row in df.itertuples(index=False, name=None)]
    return create_table_from_data(worksheet, data, start_row, 1, table_name, [str(c) for c in df.columns])


def _cell(value: Any) -> Any:
    if isinstance(value, (list, tuple, dict)):
        return str(value)
    if pd.isna(value):
        return None
    if hasattr(value, "item"):
        value = value.item()
    return value if isinstance(value, (bool, int, float, str)) else str(value)


# --- таблицы Кэли ---

def write_cayley_table(worksheet: Worksheet, s: Structure, table, symbol: str, start_row: int) -> int:
    """
    Записывает бинарную таблицу операции с подписями строк и столбцов.

    Returns:
        Номер первой свободной строки после таблицы
    """
    names = [s.carrier.name(i) for i in range(s.n)]
    worksheet.cell(row=start_row, column=1).value = symbol
    apply_style_to_cell(worksheet, start_row, 1, bold=True, alignment=CENTER,
                        border=THIN_BORDER, fill_color=CORNER_FILL)
    for j, name in enumerate(names):
        worksheet.cell(row=start_row, column=j + 2).value = name
        apply_style_to_cell(worksheet, start_row, j + 2, bold=True, alignment=CENTER,
                            border=THIN_BORDER, fill_color=HEADER_FILL)
    for i, name in enumerate(names):
        row = start_row + 1 + i
        worksheet.cell(row=row, column=1).value = name
        apply_style_to_cell(worksheet, row, 1, bold=True, alignment=CENTER,
                            border=THIN_BORDER, fill_color=HEADER_FILL)
        for j in range(s.n):
            worksheet.cell(row=row, column=j + 2).value = names[int(table[i][j])]
        apply_style_to_range(worksheet, row, 2, row, s.n + 1, alignment=CENTER, border=THIN_BORDER)
    return start_row + s.n + 2


def add_structure_sheet(workbook: Workbook, s: Structure, title: str) -> Worksheet:
    """
    Лист с таблицами ⊲, ⊲̃ и ◇ (или отображением квадрата) структуры
    """
    worksheet = workbook.create_sheet(title=re.sub(r"[\[\]:*?/\\]", "_", title)[:31])
    row = write_cayley_table(worksheet, s, s.lhd, "⊲", 1)
    row = write_cayley_table(worksheet, s, s.lhd_inv, "⊲̃", row)
    if isinstance(s, FiniteQualgebra):
        write_cayley_table(worksheet, s, s.diamond, "◇", row)
    elif isinstance(s, FiniteSquandle):
        data = [[s.carrier.name(a), s.carrier.name(s.sq(a))] for a in range(s.n)]
        create_table_from_data(worksheet, data, row, 1, f"{title}_square", ["x", "x²"])
    auto_adjust_column_width(worksheet)
    return worksheet


def export_structure(s: Structure, file_path: str, title: str = "structure") -> bool:
    """
    Экспортирует таблицы Кэли структуры в .xlsx
    """
    workbook = new_workbook()
    add_structure_sheet(workbook, s, title)
    return save_workbook(workbook, file_path)


def export_classification(result: ClassificationResult, file_path: str) -> bool:
    """
    Экспортирует сводку классификации и таблицы Кэли каждого представителя.

    Первый лист содержит report_frame, далее по листу на представителя.
    """
    workbook = new_workbook()
    summary = workbook.create_sheet(title="summary")
    frame = report_frame(result)
    if frame.empty:
        summary.cell(row=1, column=1).value = f"Нет структур вида {result.kind} порядка {result.size}"
    else:
        write_dataframe(summary, frame, f"{result.kind}_{result.size}_report")
    auto_adjust_column_width(summary)

    for i, s in enumerate(result.representatives):
        add_structure_sheet(workbook, s, f"{result.kind[:2]}{result.size}_{i}")
    logger.info(f"Экспорт классификации: {len(result.representatives)} представителей")
    return save_workbook(workbook, file_path)


def cohomology_frame(result: CohomologyResult, label: str = "") -> pd.DataFrame:
    h2 = result.h2
    return pd.DataFrame([{
        "structure": label,
        "coefficients": "Z" if not result.modulus else f"Z/{result.modulus}",
        "Z2": str(result.z2),
        "B2": str(result.b2),
        "H2": str(h2),
        "H2 free rank": h2.free_rank,
        "H2 torsion": ", ".join(str(t) for t in h2.torsion),
    }])


def export_cohomology(s: Structure, result: CohomologyResult, file_path: str,
                      label: str = "", with_representatives: bool = True) -> bool:
    """
    Экспортирует сводку H² и, при необходимости, представителей коциклов.

    Представители записываются построчно в координатах variable_index.
    """
    workbook = new_workbook()
    summary = workbook.create_sheet(title="cohomology")
    write_dataframe(summary, cohomology_frame(result, label), "cohomology_summary")
    auto_adjust_column_width(summary)

    if with_representatives and result.representatives:
        sheet = workbook.create_sheet(title="representatives")
        labels = ["order"] + variable_index(s)
        data = [[order] + [int(x) for x in cp.vector()] for order, cp in result.representatives]
        create_table_from_data(sheet, data, 1, 1, "cocycle_representatives", labels)
        auto_adjust_column_width(sheet, min_width=4, max_width=14)
    return save_workbook(workbook, file_path)


def read_sheet_values(file_path: str, sheet: Optional[str] = None) -> List[List[Any]]:
    """
    Читает значения листа как список строк (для проверки экспорта)
    """
    workbook = openpyxl.load_workbook(file_path)
    worksheet = workbook[sheet] if sheet else workbook.active
    return [list(row) for row in worksheet.iter_rows(values_only=True)]
