"""
穷举验证与纠删工具。
is_mr 对每个可容许 E 做一次前向消元：先在 Ē 的列上找主元，剩下的行限制到 E 上，
再逐个检查 h1 元子集 T 的秩。E 按字典序分块交给进程池，结果按块顺序合并，
所以多进程与单进程给出同一个第一反例。
"""
from __future__ import annotations

import itertools
import logging
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from tower.errors import BudgetExceeded, DegreeCapExceeded
from tower.galois import AnyField, FieldTower
from tower.matrix import IndexSet, MatrixF, Mode, null_space, restrict, row_rank, rref, rref_rank_inv, select_rows

from .config import CHUNK_SIZE, IN_FLIGHT, TIMING, WORKERS
from .errors import NotCorrectable, UnsupportedCase
from .layout import all_distance_formulas, chunked, enumerate_admissible_E, iter_params
from .models import Certificate, CodeInstance, CodeParams, Family

logger = logging.getLogger(__name__)

Rows = Sequence[Sequence[int]]


# ---------- 消元工具 ----------

def eliminate_columns(F: AnyField, rows: Rows, columns: Iterable[int]) -> Tuple[int, List[List[int]]]:
    """
    依次在 columns（0 起）上找主元并消去。返回 (主元数, 未作主元的行)；
    未作主元的行在这些列上全为零。
    """
    work = [list(r) for r in rows]
    used = [False] * len(work)
    mul, subtract = F.mul, F.subtract
    count = 0
    for c in columns:
        pr = next((i for i in range(len(work)) if not used[i] and work[i][c]), None)
        if pr is None:
            continue
        used[pr] = True
        prow = work[pr]
        inv = F.inv(prow[c])
        for i in range(len(work)):
            if used[i]:
                continue
            f = work[i][c]
            if f:
                f = mul(f, inv)
                work[i] = [subtract(x, mul(f, y)) if y else x for x, y in zip(work[i], prow)]
        count += 1
    return count, [r for r, u in zip(work, used) if not u]


def puncture(H: MatrixF, keep: Sequence[int]) -> MatrixF:
    """C|_keep 的校验矩阵：行空间里支撑在 keep（1 起）内的向量，限制到 keep。"""
    keep = tuple(keep)
    keep_set = set(keep)
    dropped = [c for c in range(H.ncols) if c + 1 not in keep_set]
    _, rest = eliminate_columns(H.field, H.rows, dropped)
    sub = MatrixF(H.tower, H.level, tuple(tuple(r[c - 1] for c in keep) for r in rest), len(keep))
    reduced, pivots = rref(sub)
    return select_rows(reduced, range(len(pivots)))


def shorten(H: MatrixF, keep: Sequence[int]) -> MatrixF:
    """在 keep 之外取零的码字限制到 keep 上，校验矩阵就是 H|_keep。"""
    return restrict(H, keep)


# ---------- 可纠性与 MR 验证 ----------

def correctable(instance: CodeInstance, erased: Sequence[int]) -> bool:
    erased = tuple(erased)
    if not erased:
        return True
    return rref_rank_inv(restrict(instance.H, erased), Mode.RANK) == len(erased)


def _check_E(F: AnyField, rows: Rows, n: int, redundancy: int, h1: int, E: IndexSet) -> Tuple[int, Optional[IndexSet]]:
    """一个 E 的全部 T 检查。返回 (检查数, 失败的 T)。"""
    in_E = set(E)
    complement = [c for c in range(n) if c + 1 not in in_E]
    count, rest = eliminate_columns(F, rows, complement)
    if count < len(complement):
        return 1, tuple(E[:h1])
    need = redundancy - count
    G = [[r[c - 1] for c in E] for r in rest]
    checks = 0
    for T in itertools.combinations(range(len(E)), h1):
        checks += 1
        if row_rank(F, [[row[t] for t in T] for row in G]) < need:
            return checks, tuple(E[t] for t in T)
    return checks, None


def _check_chunk(payload: Tuple[FieldTower, Rows, int, int, int], chunk: List[IndexSet]):
    tower, rows, n, redundancy, h1 = payload
    F = tower.top
    total = 0
    for E in chunk:
        checks, failed = _check_E(F, rows, n, redundancy, h1, E)
        total += checks
        if failed is not None:
            return total, (E, failed)
    return total, None


def is_mr(instance: CodeInstance, workers: Optional[int] = None, timing: Optional[bool] = None) -> Certificate:
    """
    对每个可容许 E 和 E 的每个 h1 元子集 T，检查 E \\ T 以外的擦除可纠，
    即 rank(H|_{Ē ∪ T}) = n - k。返回第一个失败的 (E, T) 或检查总数。
    """
    workers = WORKERS if workers is None else workers
    timing = TIMING if timing is None else timing
    params = instance.params
    H = instance.H
    n, h1 = H.ncols, params.h1
    redundancy = n - params.k
    start = time.perf_counter()
    stream = enumerate_admissible_E(params)
    total, failure = 0, None
    logger.info("verifying %s with %d worker(s)", params.label(), workers)

    if workers <= 1:
        total, failure = _serial(instance.tower.top, H.rows, n, redundancy, h1, stream)
    else:
        total, failure = _parallel(instance.tower, H.rows, n, redundancy, h1, stream, workers)

    millis = int((time.perf_counter() - start) * 1000) if timing else None
    if failure is not None:
        E, T = failure
        logger.info("%s is not MR: E=%s T=%s", params.label(), E, T)
        return Certificate(verdict="fail", checks=total, millis=millis, witness_E=E, witness_T=T)
    logger.info("%s is MR, %d checks", params.label(), total)
    return Certificate(verdict="pass", checks=total, millis=millis)


def _serial(F: AnyField, rows: Rows, n: int, redundancy: int, h1: int, stream: Iterable[IndexSet]):
    total = 0
    for E in stream:
        checks, failed = _check_E(F, rows, n, redundancy, h1, E)
        total += checks
        if failed is not None:
            return total, (E, failed)
    return total, None


def _parallel(tower: FieldTower, rows: Rows, n: int, redundancy: int, h1: int, stream: Iterable[IndexSet], workers: int):
    """同时在途的块不超过 workers * IN_FLIGHT 个，按提交顺序取结果。"""
    payload = (tower, rows, n, redundancy, h1)
    chunks = chunked(stream, CHUNK_SIZE)
    pending: Deque = deque()
    total = 0
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        for chunk in itertools.islice(chunks, workers * IN_FLIGHT):
            pending.append(pool.submit(_check_chunk, payload, chunk))
        while pending:
            checks, failed = pending.popleft().result()
            total += checks
            if failed is not None:
                return total, failed
            chunk = next(chunks, None)
            if chunk is not None:
                pending.append(pool.submit(_check_chunk, payload, chunk))
        return total, None
    finally:
        pool.shutdown(wait=True, cancel_futures=True)


# ---------- 编码与恢复 ----------

def generator_matrix(instance: CodeInstance) -> Tuple[MatrixF, IndexSet]:
    """H 零空间的最简行阶梯基 G（k×n）及其主元位置（1 起，即系统位）。"""
    G, pivots = rref(null_space(instance.H))
    return G, tuple(p + 1 for p in pivots)


def encode(instance: CodeInstance, message: Sequence[int], G: Optional[MatrixF] = None) -> List[int]:
    if G is None:
        G = generator_matrix(instance)[0]
    if len(message) != G.nrows:
        raise ValueError(f"message needs {G.nrows} symbols, got {len(message)}")
    F = G.field
    word = [0] * G.ncols
    for coef, row in zip(message, G.rows):
        if not coef:
            continue
        for j, x in enumerate(row):
            if x:
                word[j] = F.add(word[j], F.mul(coef, x))
    return word


def syndrome(instance: CodeInstance, word: Sequence[int]) -> List[int]:
    F = instance.H.field
    out = []
    for row in instance.H.rows:
        acc = 0
        for x, y in zip(row, word):
            if x and y:
                acc = F.add(acc, F.mul(x, y))
        out.append(acc)
    return out


def recover(instance: CodeInstance, received: Sequence[Optional[int]]) -> List[int]:
    """解 H|_E x = -H|_Ē c_Ē 补全擦除位（None）。"""
    H = instance.H
    if len(received) != H.ncols:
        raise ValueError(f"received word needs {H.ncols} symbols, got {len(received)}")
    F = H.field
    erased = [j for j, v in enumerate(received) if v is None]
    word = [0 if v is None else v for v in received]
    if any(not F.contains(v) for v in word):
        raise ValueError("received symbol outside the code alphabet")
    if erased and not correctable(instance, [j + 1 for j in erased]):
        raise NotCorrectable(f"erasures at {[j + 1 for j in erased]} are not correctable")
    augmented = []
    for row in H.rows:
        rhs = 0
        for j, (x, y) in enumerate(zip(row, word)):
            if x and y:
                rhs = F.subtract(rhs, F.mul(x, y))
        augmented.append(tuple(row[j] for j in erased) + (rhs,))
    # H|_E 列满秩，前 |E| 行的主元就是前 |E| 列，其余行只剩右端项
    reduced = rref_rank_inv(MatrixF(H.tower, H.level, tuple(augmented), len(erased) + 1), Mode.RREF)
    if any(row[-1] for row in reduced.rows[len(erased):]):
        raise NotCorrectable("received symbols are inconsistent with the code")
    for i, j in enumerate(erased):
        word[j] = reduced.rows[i][-1]
    return word


# ---------- 距离 ----------

def min_distance_of(H: MatrixF, cap: Optional[int] = None) -> Optional[int]:
    """最小的线性相关列集合大小；超过 cap 时返回 None。"""
    n = H.ncols
    cap = n if cap is None else min(cap, n)
    columns = [H.column(j) for j in range(n)]
    F = H.field
    for w in range(1, cap + 1):
        for combo in itertools.combinations(range(n), w):
            if row_rank(F, [columns[j] for j in combo]) < w:
                return w
    return None


def min_distance(instance: CodeInstance, cap: Optional[int] = None) -> Optional[int]:
    return min_distance_of(instance.H, cap)


# ---------- 局部性 ----------

class LocalityReport(BaseModel):
    level: str
    ok: bool
    failed_group: Optional[int] = None  # 1 起
    details: List[str] = []

    def format(self) -> str:
        lines = [f"level={self.level} ok={'true' if self.ok else 'false'}"]
        if self.failed_group is not None:
            lines.append(f"failed_group={self.failed_group}")
        lines.extend(self.details)
        return "\n".join(lines) + "\n"


LOCALITY_LEVELS = ("middle_local_mrc", "middle_data_local_mrc", "hierarchical")


def _middle_code_ok(instance: CodeInstance, i: int, details: List[str]) -> bool:
    """C|_{A_i} 维数为 r1，且删去每组 δ 个局部坐标后是 [r1+h2, r1] MDS 码。"""
    params, groups = instance.params, instance.groups
    A = groups.A[i]
    Hp = puncture(instance.H, A)
    F = Hp.field
    dim = len(A) - row_rank(F, Hp.rows)
    if dim != params.r1:
        details.append(f"group={i + 1} dimension={dim} expected={params.r1}")
        return False
    position = {c: idx for idx, c in enumerate(A)}
    local_choices = [itertools.combinations([position[c] for c in B], params.delta) for B in groups.B[i]]
    for delta in itertools.product(*local_choices):
        erased = [c for part in delta for c in part]
        count, rest = eliminate_columns(F, Hp.rows, erased)
        if count < len(erased):
            details.append(f"group={i + 1} local erasures {[A[c] for c in erased]} not correctable")
            return False
        taken = set(erased)
        free = [c for c in range(len(A)) if c not in taken]
        for gamma in itertools.combinations(free, params.h2):
            if row_rank(F, [[r[c] for c in gamma] for r in rest]) < params.h2:
                details.append(f"group={i + 1} erasures {[A[c] for c in erased + list(gamma)]} not correctable")
                return False
    details.append(f"group={i + 1} ok dimension={dim}")
    return True


def check_locality(instance: CodeInstance, level: str) -> LocalityReport:
    """
    middle_local_mrc       HL：每个 C|_{A_i} 是 [r1, r2, h2, δ] 中层最大可恢复码
    middle_data_local_mrc  HDL：同上，中层校验位不受局部组约束
    hierarchical           每个 C|_{A_i} 维数 ≤ r1、距离 ≥ h2+δ+1，每个 C|_{B} 长度 ≤ r2+δ、距离 ≥ δ+1
    """
    params = instance.params
    details: List[str] = []
    if level in ("middle_local_mrc", "middle_data_local_mrc"):
        expected = Family.HL if level == "middle_local_mrc" else Family.HDL
        if params.family is not expected:
            raise ValueError(f"{level} applies to {expected.value} instances, got {params.family.value}")
        for i in range(len(instance.groups.A)):
            if not _middle_code_ok(instance, i, details):
                return LocalityReport(level=level, ok=False, failed_group=i + 1, details=details)
        return LocalityReport(level=level, ok=True, details=details)
    if level != "hierarchical":
        raise ValueError(f"unknown locality level {level!r}, expected one of {LOCALITY_LEVELS}")

    d1, d2 = params.h2 + params.delta + 1, params.delta + 1
    for i, A in enumerate(instance.groups.A):
        Hp = puncture(instance.H, A)
        dim = len(A) - row_rank(Hp.field, Hp.rows)
        d = min_distance_of(Hp, d1 - 1)
        if dim > params.r1 or d is not None:
            details.append(f"group={i + 1} dimension={dim} distance={d} needs <= {params.r1} and >= {d1}")
            return LocalityReport(level=level, ok=False, failed_group=i + 1, details=details)
        for s, B in enumerate(instance.groups.B[i]):
            Hb = puncture(instance.H, B)
            db = min_distance_of(Hb, d2 - 1)
            if len(B) > params.r2 + params.delta or db is not None:
                details.append(f"group={i + 1} local={s + 1} length={len(B)} distance={db} needs >= {d2}")
                return LocalityReport(level=level, ok=False, failed_group=i + 1, details=details)
        details.append(f"group={i + 1} ok dimension={dim}")
    return LocalityReport(level=level, ok=True, details=details)


# ---------- 参数扫描 ----------

class SweepRow(BaseModel):
    params: CodeParams
    distance: Optional[int] = None
    bound: int
    formulas: Dict[str, int] = {}
    status: str  # meets / below / violation / skipped
    note: str = ""

    def format(self) -> str:
        line = f"{self.params.label()} d={self.distance} bound={self.bound} status={self.status}"
        return line + (f" note={self.note}" if self.note else "")


def bound_sweep(max_n: int, family: Optional[Family] = None, max_h1: Optional[int] = None) -> List[SweepRow]:
    """
    构造长度不超过 max_n 的所有参数组并暴力算距离，与层次 Singleton 型界比较。
    h1 = 1 用 h1 = 1 构造，HDL 走派生；派生不支持的参数记为 skipped。
    HDL 的界化简为 h1+h2+δ+1，派生出的码必须取等，低于界也记为 violation。
    """
    from .construct import build_instance
    from .models import Construction

    out = []
    for params in iter_params(max_n, family, max_h1):
        formulas = all_distance_formulas(params)
        bound = formulas["hier_bound"]
        construction = Construction.H1_ONE if params.h1 == 1 else Construction.GENERAL
        try:
            instance = build_instance(params, construction)
        except (UnsupportedCase, BudgetExceeded, DegreeCapExceeded) as exc:
            out.append(SweepRow(params=params, bound=bound, formulas=formulas, status="skipped", note=str(exc)))
            continue
        d = min_distance(instance)
        note = ""
        if d is not None and d > bound:
            status, note = "violation", "distance above the bound"
        elif d == bound:
            status = "meets"
        elif params.family is Family.HDL:
            status, note = "violation", "HDL code below the bound"
        else:
            status = "below"
        logger.info("%s d=%s bound=%d", params.label(), d, bound)
        out.append(SweepRow(params=params, distance=d, bound=bound, formulas=formulas, status=status, note=note))
    return out
