"""
Математическое ядро QualgebraLab: структуры, диаграммы, раскраски,
когомологии и свободная квалгебра
"""
__version__ = "0.3.0"
