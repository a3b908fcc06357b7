"""
Вспомогательные утилиты: логирование, ошибки, валидация, конфигурация.
"""
