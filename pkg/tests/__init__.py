"""Тестовый пакет для SZGMU Bot."""