"""
Интерфейс командной строки QualgebraLab
"""
