"""
cfdim: размерность Хаусдорфа множеств цепных дробей с большими неполными частными.
"""

__version__ = "1.0.0"
