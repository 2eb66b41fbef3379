"""
Модуль для управления конфигурацией QualgebraLab
"""
import os
import json
import logging
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_PRESET = "settings"

# переменная окружения -> (путь настройки, преобразование)
ENV_OVERRIDES = {
    "QUALGEBRA_LAB_BUDGET": ("classify.budget_seconds", float),
    "QUALGEBRA_LAB_LOG_LEVEL": ("logging.level", str.upper),
}


class ConfigManager:
    """
    Класс для управления настройками: значения по умолчанию, пресеты в
    JSON-файлах и переопределения из окружения
    """

    def __init__(self, presets_folder: str):
        """
        Инициализирует менеджер конфигурации

        Args:
            presets_folder: Путь к папке с пресетами настроек
        """
        self.presets_folder = presets_folder
        self.current_settings: Dict[str, Any] = {}

        os.makedirs(self.presets_folder, exist_ok=True)
        self.reset_settings()

        logger.info(f"ConfigManager инициализирован с папкой настроек: {presets_folder}")

    def reset_settings(self):
        """
        Сбрасывает настройки к значениям по умолчанию
        """
        self.current_settings = {
            "classify": {
                "budget_seconds": 60,
                "max_size": 5,
                "exhaustive_bound": 4,
            },
            "cohomology": {
                "coeff": "z",
            },
            "freeqa": {
                "depth": 6,
            },
            "fuzz": {
                "seed": 0,
                "steps": 5,
            },
            "output": {
                "format": "json",
                "indent": 2,
            },
            "logging": {
                "level": "INFO",
                "dir": "logs",
            },
        }
        logger.debug("Настройки сброшены к значениям по умолчанию")

    def get_setting(self, path: str, default=None) -> Any:
        """
        Получает значение настройки по пути в точечной нотации

        Args:
            path: Путь к настройке, например "classify.budget_seconds"
            default: Значение, если настройка не найдена

        Returns:
            Значение настройки или default
        """
        current = self.current_settings
        for part in path.split('.'):
            if not isinstance(current, dict) or part not in current:
                return default
            current = current[part]
        return current

    def set_setting(self, path: str, value: Any):
        """
        Устанавливает значение настройки по пути в точечной нотации

        Args:
            path: Путь к настройке
            value: Новое значение
        """
        parts = path.split('.')
        current = self.current_settings
        for part in parts[:-1]:
            if part not in current or not isinstance(current[part], dict):
                current[part] = {}
            current = current[part]
        current[parts[-1]] = value
        logger.debug(f"Установлена настройка {path} = {value}")

    def _preset_path(self, preset_name: Optional[str]) -> str:
        return os.path.join(self.presets_folder, f"{preset_name or DEFAULT_PRESET}.json")

    def save_settings(self, preset_name: str = None) -> bool:
        """
        Сохраняет текущие настройки в файл пресета

        Returns:
            True, если настройки сохранены, иначе False
        """
        preset_path = self._preset_path(preset_name)
        try:
            with open(preset_path, 'w', encoding='utf-8') as f:
                json.dump(self.current_settings, f, indent=4, ensure_ascii=False)
            logger.info(f"Настройки сохранены в {preset_path}")
            return True
        except Exception as e:
            logger.error(f"Ошибка при сохранении настроек: {e}")
            return False

    def load_settings(self, preset_name: str = None) -> bool:
        """
        Загружает настройки из файла пресета поверх текущих

        Returns:
            True, если настройки загружены, иначе False
        """
        preset_path = self._preset_path(preset_name)
        if not os.path.exists(preset_path):
            logger.debug(f"Файл настроек {preset_path} не найден, используются настройки по умолчанию")
            return False
        try:
            with open(preset_path, 'r', encoding='utf-8') as f:
                loaded_settings = json.load(f)
            self._update_settings_recursive(self.current_settings, loaded_settings)
            logger.info(f"Настройки загружены из {preset_path}")
            return True
        except Exception as e:
            logger.error(f"Ошибка при загрузке настроек: {e}")
            return False

    def apply_env_overrides(self, dotenv_path: Optional[str] = None) -> List[str]:
        """
        Применяет переопределения из .env и переменных окружения

        Args:
            dotenv_path: Путь к .env; по умолчанию ищется в рабочей папке

        Returns:
            Список переопределенных путей настроек
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)
        applied = []
        for variable, (path, convert) in ENV_OVERRIDES.items():
            raw = os.getenv(variable)
            if raw is None or raw == "":
                continue
            try:
                self.set_setting(path, convert(raw))
                applied.append(path)
            except ValueError:
                logger.warning(f"Некорректное значение {variable}={raw!r}, игнорируется")
        if applied:
            logger.info(f"Настройки из окружения: {', '.join(applied)}")
        return applied

    def get_presets_list(self) -> List[str]:
        """
        Возвращает имена доступных пресетов
        """
        try:
            return sorted(
                os.path.splitext(name)[0]
                for name in os.listdir(self.presets_folder)
                if name.endswith(".json")
            )
        except OSError as e:
            logger.error(f"Ошибка при чтении папки пресетов: {e}")
            return []

    def delete_preset(self, preset_name: str) -> bool:
        """
        Удаляет пресет с указанным именем

        Returns:
            True, если пресет удален, иначе False
        """
        preset_path = self._preset_path(preset_name)
        if not os.path.exists(preset_path):
            logger.warning(f"Пресет {preset_name} не найден")
            return False
        try:
            os.remove(preset_path)
            logger.info(f"Пресет {preset_name} удален")
            return True
        except OSError as e:
            logger.error(f"Ошибка при удалении пресета {preset_name}: {e}")
            return False

    def _update_settings_recursive(self, target: dict, source: dict):
        """
        Рекурсивно обновляет словарь настроек

        Args:
            target: Целевой словарь для обновления
            source: Исходный словарь с новыми значениями
        """
        for key, value in source.items():
            if key in target and isinstance(target[key], dict) and isinstance(value, dict):
                self._update_settings_recursive(target[key], value)
            else:
                target[key] = value
