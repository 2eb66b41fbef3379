"""
Модуль для различных утилит, используемых в приложении
"""
# Используем относительные импорты
from . import config_manager
from . import excel_utils
from . import io_utils
from . import log_utils
