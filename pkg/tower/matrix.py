"""
域塔任一层上的稠密精确矩阵：秩、最简行阶梯形、求逆、零空间、列限制、分块拼装，
以及元素多重集的 k-wise 独立性检查。

消元一律按列顺序取第一个非零主元，结果确定。下标集合（IndexSet）从 1 开始。
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .config import SUBSET_BUDGET
from .errors import BudgetExceeded, IndexOutOfRange, LevelMismatch, Singular
from .galois import AnyField, FieldTower, format_value, parse_value
from .models import Element, Level

logger = logging.getLogger(__name__)

IndexSet = Tuple[int, ...]


def index_set(values: Iterable[int], upper: Optional[int] = None) -> IndexSet:
    """排序去重后的 1 起下标集合；给出 upper 时检查范围。"""
    out = tuple(sorted(set(values)))
    if out and (out[0] < 1 or (upper is not None and out[-1] > upper)):
        raise IndexOutOfRange(f"indices {out} outside [1, {upper}]")
    return out


@dataclass(frozen=True)
class MatrixF:
    """
    tower 某一层上的矩阵。
    rows 为行优先的整数元素（该层的整数编码），ncols 单独记录以支持 0 行矩阵。
    """
    tower: FieldTower
    level: Level
    rows: Tuple[Tuple[int, ...], ...]
    ncols: int

    @classmethod
    def build(cls, tower: FieldTower, level: Level, rows: Iterable[Sequence[int]], ncols: Optional[int] = None) -> "MatrixF":
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        field = tower.field(level)
        for r in rows:
            if len(r) != ncols:
                raise ValueError(f"ragged matrix: row of length {len(r)} in {ncols}-column matrix")
            for x in r:
                if not field.contains(x):
                    raise LevelMismatch(f"{x} is not an element of level {Level(level).value}")
        return cls(tower, Level(level), rows, ncols)

    @classmethod
    def zeros(cls, tower: FieldTower, level: Level, nrows: int, ncols: int) -> "MatrixF":
        return cls(tower, Level(level), tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, tower: FieldTower, level: Level, size: int) -> "MatrixF":
        rows = tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size))
        return cls(tower, Level(level), rows, size)

    @property
    def field(self) -> AnyField:
        return self.tower.field(self.level)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), self.ncols)

    def entry(self, i: int, j: int) -> Element:
        """0 起下标。"""
        return Element(self.level, self.rows[i][j])

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def lift(self, level: Level) -> "MatrixF":
        """嵌入到更高层（整数编码不变）。"""
        level = Level(level)
        if level.rank < self.level.rank:
            raise LevelMismatch(f"cannot lift level {self.level.value} down to {level.value}")
        return MatrixF(self.tower, level, self.rows, self.ncols)

    def transpose(self) -> "MatrixF":
        rows = tuple(zip(*self.rows)) if self.rows else tuple(() for _ in range(self.ncols))
        return MatrixF(self.tower, self.level, rows, len(self.rows))

    def __matmul__(self, other: "MatrixF") -> "MatrixF":
        return matmul(self, other)


# ---------- 列表层面的消元核心 ----------

def _rref_rows(F: AnyField, rows: Sequence[Sequence[int]], ncols: int) -> Tuple[List[List[int]], List[int]]:
    rows = [list(r) for r in rows]
    mul, subtract = F.mul, F.subtract
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        lead = rows[r][c]
        if lead != 1:
            inv = F.inv(lead)
            rows[r] = [mul(inv, x) if x else 0 for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [subtract(x, mul(f, y)) if y else x for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def row_rank(F: AnyField, rows: Sequence[Sequence[int]]) -> int:
    """前向消元求秩，不做回代。"""
    work = [list(r) for r in rows if any(r)]
    if not work:
        return 0
    mul, subtract = F.mul, F.subtract
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        pr = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[rank], work[pr] = work[pr], work[rank]
        prow = work[rank]
        inv = F.inv(prow[c])
        for i in range(rank + 1, len(work)):
            f = work[i][c]
            if f:
                f = mul(f, inv)
                work[i] = [subtract(x, mul(f, y)) if y else x for x, y in zip(work[i], prow)]
        rank += 1
        if rank == len(work):
            break
    return rank


def _null_space_rows(F: AnyField, reduced: List[List[int]], pivots: List[int], ncols: int) -> List[List[int]]:
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, p in enumerate(pivots):
            if reduced[i][free]:
                v[p] = F.neg(reduced[i][free])
        basis.append(v)
    return basis


# ---------- 公开接口 ----------

class Mode(str, Enum):
    RANK = "rank"
    RREF = "rref"
    INVERSE = "inverse"
    NULL_SPACE = "null_space"


def rref(M: MatrixF) -> Tuple[MatrixF, List[int]]:
    """最简行阶梯形（主元为 1）及主元列（0 起）。零行保留在底部。"""
    reduced, pivots = _rref_rows(M.field, M.rows, M.ncols)
    return MatrixF(M.tower, M.level, tuple(tuple(r) for r in reduced), M.ncols), pivots


def rank(M: MatrixF) -> int:
    return row_rank(M.field, M.rows)


def inverse(M: MatrixF) -> MatrixF:
    n = M.nrows
    if n != M.ncols:
        raise Singular(f"{n}x{M.ncols} matrix is not square")
    augmented = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M.rows)]
    reduced, pivots = _rref_rows(M.field, augmented, 2 * n)
    if pivots[:n] != list(range(n)):
        raise Singular(f"{n}x{n} matrix has rank {sum(1 for p in pivots if p < n)}")
    return MatrixF(M.tower, M.level, tuple(tuple(r[n:]) for r in reduced), n)


def null_space(M: MatrixF) -> MatrixF:
    """右零空间的基，行向量 v 满足 M·vᵀ = 0。"""
    reduced, pivots = _rref_rows(M.field, M.rows, M.ncols)
    basis = _null_space_rows(M.field, reduced, pivots, M.ncols)
    return MatrixF(M.tower, M.level, tuple(tuple(v) for v in basis), M.ncols)


def rref_rank_inv(M: MatrixF, mode: Union[Mode, str]) -> Union[MatrixF, int]:
    mode = Mode(mode)
    if mode is Mode.RANK:
        return rank(M)
    if mode is Mode.RREF:
        return rref(M)[0]
    if mode is Mode.INVERSE:
        return inverse(M)
    return null_space(M)


def restrict(M: MatrixF, cols: Sequence[int]) -> MatrixF:
    """H|_E：按 cols（1 起）的顺序取列。"""
    cols = tuple(cols)
    if len(set(cols)) != len(cols) or any(c < 1 or c > M.ncols for c in cols):
        raise IndexOutOfRange(f"columns {cols} outside [1, {M.ncols}]")
    idx = [c - 1 for c in cols]
    rows = tuple(tuple(r[j] for j in idx) for r in M.rows)
    return MatrixF(M.tower, M.level, rows, len(cols))


def select_rows(M: MatrixF, rows: Sequence[int]) -> MatrixF:
    """按 0 起行号取行。"""
    return MatrixF(M.tower, M.level, tuple(M.rows[i] for i in rows), M.ncols)


def matmul(A: MatrixF, B: MatrixF) -> MatrixF:
    if A.ncols != B.nrows:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    level = A.level if A.level.rank >= B.level.rank else B.level
    F = A.tower.field(level)
    mul, add = F.mul, F.add
    cols = [B.column(j) for j in range(B.ncols)]
    out = []
    for row in A.rows:
        new = []
        for col in cols:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = add(acc, mul(x, y))
            new.append(acc)
        out.append(tuple(new))
    return MatrixF(A.tower, level, tuple(out), B.ncols)


def vstack(blocks: Sequence[MatrixF]) -> MatrixF:
    blocks = [b for b in blocks]
    ncols = blocks[0].ncols
    if any(b.ncols != ncols for b in blocks):
        raise ValueError("vstack needs equal column counts")
    level = max((b.level for b in blocks), key=lambda lv: lv.rank)
    rows = tuple(r for b in blocks for r in b.rows)
    return MatrixF(blocks[0].tower, level, rows, ncols)


def hstack(blocks: Sequence[MatrixF]) -> MatrixF:
    blocks = [b for b in blocks]
    nrows = blocks[0].nrows
    if any(b.nrows != nrows for b in blocks):
        raise ValueError("hstack needs equal row counts")
    level = max((b.level for b in blocks), key=lambda lv: lv.rank)
    rows = tuple(tuple(x for b in blocks for x in b.rows[i]) for i in range(nrows))
    return MatrixF(blocks[0].tower, level, rows, sum(b.ncols for b in blocks))


def block_diag(blocks: Sequence[MatrixF]) -> MatrixF:
    ncols = sum(b.ncols for b in blocks)
    level = max((b.level for b in blocks), key=lambda lv: lv.rank)
    rows = []
    offset = 0
    for b in blocks:
        for r in b.rows:
            rows.append((0,) * offset + r + (0,) * (ncols - offset - b.ncols))
        offset += b.ncols
    return MatrixF(blocks[0].tower, level, tuple(rows), ncols)


# ---------- k-wise 独立 ----------

class KwiseResult(NamedTuple):
    independent: bool
    witness: Optional[IndexSet]  # 线性相关的子集（1 起），独立时为 None
    checked: int  # 实际检查的子集数

    def __bool__(self) -> bool:
        return self.independent


def to_vectors(values: Sequence[int], field: AnyField, base: AnyField) -> List[List[int]]:
    """把 field 中的元素展开成 base 上的坐标向量。"""
    width = field.flat_degree // base.flat_degree
    order = base.order
    out = []
    for value in values:
        vec = []
        for _ in range(width):
            value, c = divmod(value, order)
            vec.append(c)
        out.append(vec)
    return out


def kwise_independent_vectors(
    vectors: Sequence[Sequence[int]],
    k: int,
    base: AnyField,
    budget: Optional[int] = None,
) -> KwiseResult:
    """每个大小为 min(k, |S|) 的子集都满秩。"""
    budget = SUBSET_BUDGET if budget is None else budget
    size = min(k, len(vectors))
    if size <= 0:
        return KwiseResult(True, None, 0)
    total = math.comb(len(vectors), size)
    if total > budget:
        raise BudgetExceeded(f"C({len(vectors)}, {size}) = {total} subsets exceed budget {budget}")
    checked = 0
    for combo in itertools.combinations(range(len(vectors)), size):
        checked += 1
        if row_rank(base, [vectors[i] for i in combo]) < size:
            return KwiseResult(False, tuple(i + 1 for i in combo), checked)
    return KwiseResult(True, None, checked)


def kwise_independent(
    elements: Sequence[Union[Element, int]],
    k: int,
    tower: FieldTower,
    base_level: Level,
    level: Optional[Level] = None,
    budget: Optional[int] = None,
) -> KwiseResult:
    """
    元素多重集在 base_level 上是否 k-wise 独立。
    elements 可以是 Element，也可以是整数（此时必须给出 level）。
    """
    base_level = Level(base_level)
    values = []
    for e in elements:
        if isinstance(e, Element):
            if level is None:
                level = Level(e.level)
            elif Level(e.level).rank > Level(level).rank:
                raise LevelMismatch("elements live on different levels")
            values.append(e.value)
        else:
            values.append(e)
    if level is None:
        if values:
            raise LevelMismatch("integer elements need an explicit level")
        return KwiseResult(True, None, 0)
    level = Level(level)
    if level.rank < base_level.rank:
        raise LevelMismatch(f"level {level.value} is below {base_level.value}")
    field, base = tower.field(level), tower.field(base_level)
    if any(not field.contains(v) for v in values):
        raise LevelMismatch(f"element outside level {level.value}")
    return kwise_independent_vectors(to_vectors(values, field, base), k, base, budget)


# ---------- 矩阵文件格式 ----------

def format_matrix(M: MatrixF) -> str:
    field = M.field
    lines = [f"q={M.tower.p}^{M.tower.s} level={M.level.value} rows={M.nrows} cols={M.ncols}"]
    prefix = M.level.value
    for r in M.rows:
        lines.append(" ".join(f"{prefix}:{format_value(field, x)}" for x in r))
    return "\n".join(lines) + "\n"


def parse_matrix(tower: FieldTower, text: str) -> MatrixF:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    header = dict(item.split("=", 1) for item in lines[0].split())
    p, s = (int(x) for x in header["q"].split("^"))
    if (p, s) != (tower.p, tower.s):
        raise ValueError(f"matrix over GF({p}^{s}) does not match tower {tower!r}")
    level = Level(header["level"])
    nrows, ncols = int(header["rows"]), int(header["cols"])
    if len(lines) - 1 != nrows:
        raise ValueError(f"header says {nrows} rows, found {len(lines) - 1}")
    field = tower.field(level)
    rows = []
    for ln in lines[1:]:
        entries = ln.split()
        if len(entries) != ncols:
            raise ValueError(f"header says {ncols} columns, found {len(entries)}")
        row = []
        for token in entries:
            head, _, body = token.partition(":")
            if Level(head) is not level:
                raise LevelMismatch(f"entry {token!r} is not at level {level.value}")
            row.append(parse_value(field, body))
        rows.append(tuple(row))
    return MatrixF(tower, level, tuple(rows), ncols)
