"""
Настройка логирования приложения
"""
import os
import sys
import logging
from datetime import datetime

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(name)s - %(message)s'
LOG_NAME = "qualgebra_lab"
KEEP_LOG_FILES = 5


def _rotate(log_dir: str) -> None:
    """Архивирует текущий лог и оставляет только последние KEEP_LOG_FILES архивов."""
    current = os.path.join(log_dir, f"{LOG_NAME}.log")
    if os.path.exists(current) and os.path.getsize(current) > 0:
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        try:
            os.replace(current, os.path.join(log_dir, f"{LOG_NAME}_{stamp}.log"))
        except OSError:
            pass
    archived = sorted(f for f in os.listdir(log_dir) if f.startswith(f"{LOG_NAME}_"))
    for old_log in archived[:-KEEP_LOG_FILES]:
        try:
            os.remove(os.path.join(log_dir, old_log))
        except OSError:
            pass


def setup_logging(log_dir: str = "logs", level: str = "INFO") -> str:
    """
    Настраивает корневой логгер: файл в log_dir и поток stderr.

    Args:
        log_dir: Папка для логов
        level: Уровень для stderr; в файл пишется всё начиная с DEBUG

    Returns:
        Путь к текущему лог-файлу
    """
    os.makedirs(log_dir, exist_ok=True)
    _rotate(log_dir)
    log_file = os.path.join(log_dir, f"{LOG_NAME}.log")

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    stream_handler.setLevel(getattr(logging, str(level).upper(), logging.INFO))

    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    file_handler.setLevel(logging.DEBUG)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    # Удаляем существующие обработчики, если они есть
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()
    root_logger.addHandler(stream_handler)
    root_logger.addHandler(file_handler)

    logging.getLogger(__name__).debug(f"Логирование настроено: {log_file}, уровень {level}")
    return log_file
