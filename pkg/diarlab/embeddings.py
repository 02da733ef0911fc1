"""Ввод-вывод эмбеддингов сегментов в формате CSV"""
import csv
import io
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

KEY_COLUMNS = ("recording_id", "onset", "offset")


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Эмбеддинги сегментов одной записи, упорядоченные по началу сегмента"""
    recording_id: str
    onsets: np.ndarray
    offsets: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        onsets = np.asarray(self.onsets, dtype=np.float64).reshape(-1)
        offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[1] < 1:
            raise ValidationError(f"ожидалась матрица n×d, получена форма {vectors.shape}")
        if not len(onsets) == len(offsets) == len(vectors):
            raise ValidationError("число начал, концов и векторов не совпадает")
        bad = np.flatnonzero(offsets <= onsets)
        if bad.size:
            raise ValidationError(f"сегмент {bad[0]}: конец не позже начала")
        zero = np.flatnonzero(~np.any(vectors != 0, axis=1))
        if zero.size:
            raise ValidationError(f"сегмент {zero[0]}: нулевой вектор")
        order = np.argsort(onsets, kind="stable")
        for name, value in (("onsets", onsets), ("offsets", offsets), ("vectors", vectors)):
            value = value[order]
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def segments(self) -> List[Tuple[float, float, np.ndarray]]:
        return list(zip(self.onsets.tolist(), self.offsets.tolist(), self.vectors))


def _read_text(data: Union[bytes, str, IO]) -> str:
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def parse_embeddings(data: Union[bytes, str, IO]) -> Dict[str, EmbeddingSet]:
    """Разбор CSV "recording_id,onset,offset,e0,...,e{d-1}" в наборы по записям"""
    # csv.reader, а не pd.read_csv: нужны точные номера строк для ParseError
    reader = csv.reader(io.StringIO(_read_text(data)))
    header = next(reader, None)
    if header is None:
        return {}
    header = [name.strip() for name in header]
    dim = len(header) - len(KEY_COLUMNS)
    expected = list(KEY_COLUMNS) + [f"e{i}" for i in range(dim)]
    if dim < 1 or header != expected:
        raise ParseError(f"неверный заголовок: {','.join(header)}", 1)

    rows: Dict[str, List[Tuple[float, float, List[float]]]] = defaultdict(list)
    for fields in reader:
        if not fields or all(not f.strip() for f in fields):
            continue
        line_number = reader.line_num
        if len(fields) != len(header):
            raise ParseError(f"ожидалось {len(header)} столбцов, получено {len(fields)}", line_number)
        try:
            numbers = [float(f) for f in fields[1:]]
        except ValueError as e:
            raise ParseError(f"нечисловое значение: {e}", line_number) from None
        if not all(math.isfinite(x) for x in numbers):
            raise ParseError("значения должны быть конечными (nan и inf недопустимы)", line_number)
        rows[fields[0].strip()].append((numbers[0], numbers[1], numbers[2:]))

    result = {}
    for rec in sorted(rows):
        onsets, offsets, vectors = zip(*rows[rec])
        result[rec] = EmbeddingSet(rec, np.array(onsets), np.array(offsets), np.array(vectors))
        logger.debug("%s: %d сегментов, размерность %d", rec, len(result[rec]), dim)
    return result


def read_embeddings(path: Union[str, Path]) -> Dict[str, EmbeddingSet]:
    return parse_embeddings(Path(path).read_bytes())


def serialize_embeddings(sets: Sequence[EmbeddingSet]) -> bytes:
    """CSV с кратчайшим точным представлением 64-битных чисел"""
    if not sets:
        return b""
    dim = sets[0].dim
    if any(s.dim != dim for s in sets):
        raise ValidationError("наборы эмбеддингов разной размерности")
    frames = []
    for s in sets:
        frame = pd.DataFrame(s.vectors, columns=[f"e{i}" for i in range(dim)])
        frame.insert(0, "offset", s.offsets)
        frame.insert(0, "onset", s.onsets)
        frame.insert(0, "recording_id", s.recording_id)
        frames.append(frame)
    table = pd.concat(frames, ignore_index=True)
    return table.to_csv(index=False, lineterminator="\n", float_format=_shortest).encode("utf-8")


def _shortest(value: float) -> str:
    return repr(float(value))


def unit_normalize(embeddings: EmbeddingSet) -> EmbeddingSet:
    """Нормировка каждого вектора на единичную длину"""
    norms = np.linalg.norm(embeddings.vectors, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValidationError("нулевой вектор не нормируется")
    return EmbeddingSet(embeddings.recording_id, embeddings.onsets, embeddings.offsets,
                        embeddings.vectors / norms)
