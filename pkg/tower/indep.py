"""
在子域上 k-wise 独立的扩张域元素。

主路线取 BCH 型校验矩阵的列：F_{Q^t} 的本原元 γ，行为 γ^{e·j}（e 取连续指数窗口里的
分圆陪集代表元），每行展开成 Q 元坐标。构造完再用 kwise_independent 认证；
认证不过抛 VerificationFailed，调用方改走 greedy_independent。

返回的整数值就是系数域上的坐标向量编码，与具体扩张模多项式无关，可以直接当作
塔中上一层元素使用。
"""
from __future__ import annotations

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from .config import DEGREE_CAP, SUBSET_BUDGET
from .errors import BudgetExceeded, DegreeCapExceeded, VerificationFailed
from .galois import AnyField, FieldTower, format_value, parse_value, tower_create
from .matrix import kwise_independent_vectors, row_rank, to_vectors
from .models import IndependentSet, Level

logger = logging.getLogger(__name__)


def ceil_log(base: int, n: int) -> int:
    """最小的 d ≥ 0 使 base^d ≥ n。"""
    d, power = 0, 1
    while power < n:
        power *= base
        d += 1
    return d


def cyclotomic_representatives(exponents: Sequence[int], q: int, modulus: int) -> List[int]:
    """按给定顺序保留每个 q-分圆陪集（模 modulus）第一次出现的指数。"""
    seen = set()
    reps = []
    for e in exponents:
        e %= modulus
        if e in seen:
            continue
        reps.append(e)
        x = e
        while x not in seen:
            seen.add(x)
            x = x * q % modulus
    return reps


def extension_of(tower: FieldTower, level: Level, t: int) -> AnyField:
    """tower 中 level 层的 t 次扩张（确定性的模多项式）。"""
    level = Level(level)
    if level is Level.BASE:
        return tower_create(tower.p, tower.s, t, t).mid
    if level is Level.MID:
        return tower_create(tower.p, tower.s, tower.m1, tower.m1 * t).top
    raise ValueError("extensions of the top level are not supported")


def _window_rows(reps: Sequence[int], t: int) -> int:
    return sum(1 if e == 0 else t for e in reps)


def bch_parity_columns(
    tower: FieldTower,
    level: Level,
    n_needed: int,
    d: int,
    budget: Optional[int] = None,
) -> IndependentSet:
    """
    n_needed 个在 level 层上 (d-1)-wise 独立的元素，次数 = 展开后的行数。
    考虑两个指数窗口 {0..d-2} 和 {1..d-1}，取行数少的一个（相同时取含 0 的），
    列有重复的窗口跳过。
    """
    if n_needed < 1:
        raise ValueError(f"n_needed must be positive, got {n_needed}")
    if d < 2:
        raise ValueError(f"designed distance must be at least 2, got {d}")
    F = tower.field(level)
    Q = F.order
    t = 1
    while Q ** t - 1 < n_needed:
        t += 1
    aux = extension_of(tower, level, t)
    N = Q ** t - 1
    gamma = aux.primitive_element()

    windows = []
    for first in (0, 1):
        reps = cyclotomic_representatives(range(first, first + d - 1), Q, N)
        windows.append((_window_rows(reps, t), 0 if 0 in reps else 1, reps))
    windows.sort(key=lambda w: (w[0], w[1]))

    for rows, _, reps in windows:
        columns = []
        for j in range(n_needed):
            col: List[int] = []
            for e in reps:
                if e == 0:
                    col.append(1)
                else:
                    col.extend(to_vectors([aux.pow(gamma, e * j)], aux, F)[0])
            columns.append(col)
        values = [_encode(col, Q) for col in columns]
        if len(set(values)) < len(values):
            logger.debug("exponent window %s repeats columns, skipped", reps)
            continue
        result = kwise_independent_vectors(columns, d - 1, F, budget)
        if not result:
            raise VerificationFailed(
                f"BCH columns over GF({Q}) are not {d - 1}-wise independent, witness {result.witness}"
            )
        logger.info("BCH route: %d elements, %d-wise over GF(%d), degree %d", n_needed, d - 1, Q, rows)
        return IndependentSet(values=tuple(values), degree=rows, kwise=d - 1, base_order=Q, method="bch")
    raise VerificationFailed(f"no exponent window gives {n_needed} distinct columns")


def _encode(vector: Sequence[int], order: int) -> int:
    value = 0
    for c in reversed(vector):
        value = value * order + c
    return value


def greedy_independent(
    tower: FieldTower,
    level: Level,
    n_needed: int,
    k: int,
    degree_cap: Optional[int] = None,
    budget: Optional[int] = None,
) -> IndependentSet:
    """
    从 ⌈log_Q n_needed⌉ 次开始逐次升高扩张次数，按整数顺序贪心加入保持 k-wise 独立的元素。
    每加入一个候选，只需检查它与已选集合中每个 min(k-1, |已选|) 子集一起满秩。
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    cap = DEGREE_CAP if degree_cap is None else degree_cap
    budget = SUBSET_BUDGET if budget is None else budget
    F = tower.field(level)
    Q = F.order
    spent = 0
    for degree in range(max(1, ceil_log(Q, n_needed)), cap + 1):
        if Q ** degree - 1 < n_needed:
            continue
        chosen: List[int] = []
        vectors: List[List[int]] = []
        for value in range(1, Q ** degree):
            vec = _digits(value, Q, degree)
            size = min(k - 1, len(chosen))
            ok = True
            for combo in itertools.combinations(range(len(chosen)), size):
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(f"greedy search exceeded {budget} rank checks")
                if row_rank(F, [vectors[i] for i in combo] + [vec]) < size + 1:
                    ok = False
                    break
            if ok:
                chosen.append(value)
                vectors.append(vec)
                if len(chosen) == n_needed:
                    break
        if len(chosen) == n_needed:
            if not kwise_independent_vectors(vectors, k, F, budget):
                raise VerificationFailed("greedy set failed its own independence check")
            logger.info("greedy route: %d elements, %d-wise over GF(%d), degree %d", n_needed, k, Q, degree)
            return IndependentSet(values=tuple(chosen), degree=degree, kwise=k, base_order=Q, method="greedy")
        logger.debug("degree %d holds only %d of %d elements", degree, len(chosen), n_needed)
    raise DegreeCapExceeded(f"no {k}-wise independent set of {n_needed} elements up to degree {cap}")


def _digits(value: int, order: int, width: int) -> List[int]:
    out = []
    for _ in range(width):
        value, c = divmod(value, order)
        out.append(c)
    return out


def independent_set(
    tower: FieldTower,
    level: Level,
    n_needed: int,
    k: int,
    degree_cap: Optional[int] = None,
) -> IndependentSet:
    """先走 BCH，认证失败时退回贪心。"""
    try:
        return bch_parity_columns(tower, level, n_needed, k + 1)
    except (VerificationFailed, BudgetExceeded) as exc:
        logger.warning("BCH route rejected (%s), falling back to greedy search", exc)
        return greedy_independent(tower, level, n_needed, k, degree_cap)


def minimal_degree(tower: FieldTower, level: Level, n_needed: int, k: int, cap: int) -> Optional[int]:
    """穷举：存在 n_needed 个 k-wise 独立元素的最小扩张次数，只适合很小的域。"""
    F = tower.field(level)
    Q = F.order
    for degree in range(1, cap + 1):
        pool = [_digits(v, Q, degree) for v in range(1, Q ** degree)]
        for combo in itertools.combinations(range(len(pool)), n_needed):
            if kwise_independent_vectors([pool[i] for i in combo], k, F):
                return degree
    return None


# ---------- 元素列表文件 ----------

def format_element_list(field: AnyField, level: Level, values: Sequence[int], kwise: int, base_q: int, degree: int) -> str:
    lines = [f"count={len(values)} kwise={kwise} base_q={base_q} degree={degree}"]
    prefix = Level(level).value
    lines.extend(f"{prefix}:{format_value(field, v)}" for v in values)
    return "\n".join(lines) + "\n"


def parse_element_list(field: AnyField, level: Level, text: str) -> Tuple[List[int], Dict[str, int]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty element list")
    header = {key: int(val) for key, val in (item.split("=", 1) for item in lines[0].split())}
    prefix = Level(level).value
    values = []
    for ln in lines[1:]:
        head, _, body = ln.partition(":")
        if head != prefix:
            raise ValueError(f"element {ln!r} is not at level {prefix}")
        values.append(parse_value(field, body))
    if len(values) != header.get("count", len(values)):
        raise ValueError(f"header says {header['count']} elements, found {len(values)}")
    return values, header
