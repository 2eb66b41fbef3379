import logging
from typing import Any, Optional

from .config_manager import ConfigManager

logger = logging.getLogger(__name__)

# Глобальный экземпляр конфиг-менеджера
_config_manager = None


def init_config_manager(presets_folder: str, use_env: bool = True,
                        dotenv_path: Optional[str] = None) -> ConfigManager:
    """
    Инициализирует глобальный экземпляр ConfigManager

    Args:
        presets_folder: Путь к папке с настройками
        use_env: Применять ли переопределения из .env и окружения
        dotenv_path: Явный путь к .env

    Returns:
        Созданный экземпляр
    """
    global _config_manager
    _config_manager = ConfigManager(presets_folder)
    _config_manager.load_settings()
    if use_env:
        _config_manager.apply_env_overrides(dotenv_path)
    return _config_manager


def get_config_manager() -> ConfigManager:
    """
    Возвращает текущий экземпляр ConfigManager

    Raises:
        RuntimeError: Если менеджер не инициализирован
    """
    if _config_manager is None:
        raise RuntimeError("ConfigManager не инициализирован. Вызовите init_config_manager() перед использованием.")
    return _config_manager


def get_setting(path: str, default=None) -> Any:
    """
    Получает значение настройки по пути в точечной нотации (например, "classify.budget_seconds")
    """
    return get_config_manager().get_setting(path, default)


def set_setting(path: str, value: Any) -> None:
    get_config_manager().set_setting(path, value)


def save_settings(preset_name: str = None) -> bool:
    return get_config_manager().save_settings(preset_name)
