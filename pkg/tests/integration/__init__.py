"""Интеграционные тесты."""