"""Unit тесты."""