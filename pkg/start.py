#!/usr/bin/env python
"""
Скрипт запуска QualgebraLab: проверка окружения и передача аргументов CLI
"""
import os
import sys
import logging

# Добавляем текущую директорию в PYTHONPATH
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

# Модуль импорта -> пакет pip
REQUIRED_MODULES = {
    "numpy": "numpy",
    "pandas": "pandas",
    "openpyxl": "openpyxl",
    "dotenv": "python-dotenv",
    "networkx": "networkx",
}


def ensure_project_structure():
    """
    Проверяет и создает необходимую структуру проекта
    """
    root_dir = os.path.dirname(os.path.abspath(__file__))
    for d in ("logs", "settings_presets"):
        os.makedirs(os.path.join(root_dir, d), exist_ok=True)

    for required in ("core/algebra.py", "app/cli.py", "utils/config_manager/__init__.py"):
        if not os.path.exists(os.path.join(root_dir, required)):
            print(f"ВНИМАНИЕ: Отсутствует файл {required}", file=sys.stderr)


def check_modules(verbose: bool = False) -> list:
    """
    Проверяет, что необходимые пакеты импортируются

    Returns:
        Список отсутствующих пакетов pip
    """
    missing_modules = []
    for module_name, pip_package in REQUIRED_MODULES.items():
        try:
            __import__(module_name)
            if verbose:
                print(f"✓ Модуль {module_name} установлен", file=sys.stderr)
        except ImportError:
            print(f"✗ Модуль {module_name} не установлен", file=sys.stderr)
            missing_modules.append(pip_package)
    return missing_modules


if __name__ == "__main__":
    ensure_project_structure()

    missing = check_modules(verbose="--check" in sys.argv)
    if missing:
        logging.basicConfig(level=logging.ERROR)
        logging.getLogger("start").error(
            f"Отсутствуют зависимости: {', '.join(missing)}. Установите их: pip install -r requirements.txt"
        )
        sys.exit(1)
    if "--check" in sys.argv:
        sys.exit(0)

    from app.cli import main
    sys.exit(main(sys.argv[1:]))
