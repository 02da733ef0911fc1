"""Исключения diarlab"""
from typing import Optional


class DiarlabError(ValueError):
    """Базовая ошибка библиотеки"""


class ParseError(DiarlabError):
    """Ошибка разбора входного файла с номером строки"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"строка {line_number}: {message}"
        super().__init__(message)


class ValidationError(DiarlabError):
    """Нарушение инварианта типа или предусловия операции"""
