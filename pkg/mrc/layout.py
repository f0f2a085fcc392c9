"""
参数推导出的尺寸与坐标分组、可容许 E 与 (δ, h2) 擦除模式的枚举、距离公式。

坐标布局（1 起）：每个 A_i 内先放 t2 个局部组 B_{i,s}，每个局部组前 r2 个是
数据位置、后 δ 个是局部校验；HDL 的 h2 个中层校验紧跟在局部组之后，
h1 个全局校验是最后 h1 个坐标。所有枚举都按字典序，验证的反例因此可复现。
"""
from __future__ import annotations

import itertools
import math
import re
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from tower.errors import IndexOutOfRange
from tower.matrix import IndexSet

from .models import CodeParams, Dims, ErasurePattern, Family, GroupStructure

DISTANCE_KINDS = ("rd_bound", "local_mrc", "data_local_mrc", "hier_bound", "hdl_mrc")


def derive_dims(params: CodeParams) -> Tuple[Dims, GroupStructure]:
    dims = params.dims()
    t1, t2, n1, n2, n = dims
    A, B = [], []
    for i in range(t1):
        start = i * n1
        A.append(tuple(range(start + 1, start + n1 + 1)))
        B.append(tuple(tuple(range(start + s * n2 + 1, start + (s + 1) * n2 + 1)) for s in range(t2)))
    tail = tuple(range(t1 * n1 + 1, n + 1)) if not params.is_hl else ()
    return dims, GroupStructure(A=tuple(A), B=tuple(B), tail=tail)


def group_choices(params: CodeParams, groups: GroupStructure, i: int) -> List[IndexSet]:
    """A_i 中所有满足 |E ∩ B_{i,s}| ≤ r2 的 r1 元子集（字典序）。"""
    owner = {}
    for s, b in enumerate(groups.B[i]):
        for c in b:
            owner[c] = s
    out = []
    for combo in itertools.combinations(groups.A[i], params.r1):
        counts: Dict[int, int] = {}
        ok = True
        for c in combo:
            s = owner.get(c)
            if s is None:
                continue
            counts[s] = counts.get(s, 0) + 1
            if counts[s] > params.r2:
                ok = False
                break
        if ok:
            out.append(combo)
    return out


def enumerate_admissible_E(params: CodeParams) -> Iterator[IndexSet]:
    """
    |E| = k+h1，|E ∩ A_i| = r1，|E ∩ B_{i,s}| ≤ r2。
    HDL 的 h1 个末尾坐标不受约束，大小恰好把 E 补满，因此总是整体包含在内。
    """
    _, groups = derive_dims(params)
    per_group = [group_choices(params, groups, i) for i in range(len(groups.A))]
    for parts in itertools.product(*per_group):
        yield tuple(c for part in parts for c in part) + groups.tail


def count_admissible_E(params: CodeParams) -> int:
    _, groups = derive_dims(params)
    return math.prod(len(group_choices(params, groups, i)) for i in range(len(groups.A)))


def chunked(stream: Iterable, size: int) -> Iterator[List]:
    """把流切成大小为 size 的连续块。"""
    it = iter(stream)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _group_patterns(params: CodeParams, n1: int, n2: int, t2: int):
    local = list(itertools.combinations(range(1, n2 + 1), params.delta))
    for delta in itertools.product(local, repeat=t2):
        used = {s * n2 + j for s, cols in enumerate(delta) for j in cols}
        free = [c for c in range(1, n1 + 1) if c not in used]
        for gamma in itertools.combinations(free, params.h2):
            yield delta, gamma


def enumerate_patterns(params: CodeParams, with_extra: bool = False) -> Iterator[ErasurePattern]:
    dims, groups = derive_dims(params)
    per_group = [list(_group_patterns(params, dims.n1, dims.n2, dims.t2)) for _ in range(dims.t1)]
    for parts in itertools.product(*per_group):
        pattern = ErasurePattern(delta=tuple(p[0] for p in parts), gamma=tuple(p[1] for p in parts))
        if not with_extra or params.h1 == 0:
            yield pattern
            continue
        erased = set(pattern_footprint(params, pattern, groups))
        rest = [c for c in range(1, dims.n + 1) if c not in erased]
        for extra in itertools.combinations(rest, params.h1):
            yield pattern.model_copy(update={"extra": extra})


def pattern_footprint(params: CodeParams, pattern: ErasurePattern, groups: Optional[GroupStructure] = None) -> IndexSet:
    """模式擦除的全局坐标（1 起，升序）。"""
    if groups is None:
        groups = derive_dims(params)[1]
    coords = set(pattern.extra)
    for i, row in enumerate(pattern.delta):
        for s, cols in enumerate(row):
            coords.update(groups.B[i][s][j - 1] for j in cols)
    for i, cols in enumerate(pattern.gamma):
        coords.update(groups.A[i][j - 1] for j in cols)
    return tuple(sorted(coords))


def validate_pattern(params: CodeParams, pattern: ErasurePattern) -> None:
    dims = params.dims()
    if len(pattern.delta) != dims.t1 or len(pattern.gamma) != dims.t1:
        raise ValueError(f"pattern needs {dims.t1} mid groups")
    for i in range(dims.t1):
        if len(pattern.delta[i]) != dims.t2:
            raise ValueError(f"pattern needs {dims.t2} local groups in mid group {i + 1}")
        used = set()
        for s, cols in enumerate(pattern.delta[i]):
            if len(cols) != params.delta or len(set(cols)) != len(cols):
                raise ValueError(f"D[{i + 1}][{s + 1}] must hold {params.delta} distinct entries")
            if any(not 1 <= j <= dims.n2 for j in cols):
                raise IndexOutOfRange(f"D[{i + 1}][{s + 1}] outside [1, {dims.n2}]")
            used.update(s * dims.n2 + j for j in cols)
        gamma = pattern.gamma[i]
        if len(gamma) != params.h2 or len(set(gamma)) != len(gamma):
            raise ValueError(f"G[{i + 1}] must hold {params.h2} distinct entries")
        if any(not 1 <= j <= dims.n1 for j in gamma):
            raise IndexOutOfRange(f"G[{i + 1}] outside [1, {dims.n1}]")
        if used & set(gamma):
            raise ValueError(f"G[{i + 1}] overlaps local erasures")
    if len(pattern.extra) > params.h1:
        raise ValueError(f"at most {params.h1} extra erasures allowed")
    footprint = pattern_footprint(params, pattern.model_copy(update={"extra": ()}))
    if any(not 1 <= c <= dims.n for c in pattern.extra) or set(footprint) & set(pattern.extra):
        raise ValueError("extra erasures must be fresh coordinates in [1, n]")


_TOKEN = re.compile(r"([DGX])((?:\[\d+\])*)=([\d,\s]*)")


def parse_pattern(params: CodeParams, text: str) -> ErasurePattern:
    """`D[i][s]=j1,j2; G[i]=...; X=...`，缺省的条目视为空。"""
    dims = params.dims()
    delta = [[() for _ in range(dims.t2)] for _ in range(dims.t1)]
    gamma = [() for _ in range(dims.t1)]
    extra: Tuple[int, ...] = ()
    for chunk in re.split(r"[;\n]", text):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _TOKEN.fullmatch(chunk)
        if m is None:
            raise ValueError(f"cannot parse pattern entry {chunk!r}")
        kind, idx_text, values_text = m.groups()
        idx = [int(x) for x in re.findall(r"\d+", idx_text)]
        values = tuple(int(v) for v in values_text.replace(" ", "").split(",") if v)
        try:
            if kind == "D" and len(idx) == 2:
                delta[idx[0] - 1][idx[1] - 1] = values
            elif kind == "G" and len(idx) == 1:
                gamma[idx[0] - 1] = values
            elif kind == "X" and not idx:
                extra = values
            else:
                raise ValueError(f"malformed pattern entry {chunk!r}")
        except IndexError:
            raise IndexOutOfRange(f"group index out of range in {chunk!r}") from None
    pattern = ErasurePattern(
        delta=tuple(tuple(row) for row in delta),
        gamma=tuple(gamma),
        extra=tuple(sorted(extra)),
    )
    validate_pattern(params, pattern)
    return pattern


def format_pattern(pattern: ErasurePattern) -> str:
    parts = []
    for i, row in enumerate(pattern.delta):
        for s, cols in enumerate(row):
            parts.append(f"D[{i + 1}][{s + 1}]={','.join(map(str, cols))}")
        parts.append(f"G[{i + 1}]={','.join(map(str, pattern.gamma[i]))}")
    parts.append(f"X={','.join(map(str, pattern.extra))}")
    return ";".join(parts)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def distance_formulas(params: CodeParams, which: str) -> int:
    """
    rd_bound       n-k+1-(⌈k/r2⌉-1)δ                         （局部性 (r2, δ+1)）
    local_mrc      h2+δ+1+⌊h2/r2⌋δ                           （中层码 [r1, r2, h2, δ]）
    data_local_mrc h2+δ+1
    hier_bound     n-k+1-(⌈k/r2⌉-1)(δ2-1)-(⌈k/r1⌉-1)(δ1-δ2)，δ2=δ+1，δ1=h2+δ+1
    hdl_mrc        h1+h2+δ+1
    """
    k, r1, r2, h1, h2, d = params.k, params.r1, params.r2, params.h1, params.h2, params.delta
    if which == "rd_bound":
        return params.n - k + 1 - (_ceil_div(k, r2) - 1) * d
    if which == "local_mrc":
        return h2 + d + 1 + (h2 // r2) * d
    if which == "data_local_mrc":
        return h2 + d + 1
    if which == "hier_bound":
        d2, d1 = d + 1, h2 + d + 1
        return params.n - k + 1 - (_ceil_div(k, r2) - 1) * (d2 - 1) - (_ceil_div(k, r1) - 1) * (d1 - d2)
    if which == "hdl_mrc":
        return h1 + h2 + d + 1
    raise ValueError(f"unknown distance formula {which!r}, expected one of {DISTANCE_KINDS}")


def all_distance_formulas(params: CodeParams) -> Dict[str, int]:
    return {kind: distance_formulas(params, kind) for kind in DISTANCE_KINDS}


def predicted_degree(q: int, count: int, kwise: int) -> int:
    """扩张次数的闭式估计 1+⌈(q-1)/q·(d-2)⌉·⌈log_q count⌉，d = kwise+1。"""
    if kwise <= 0 or count <= 0:
        return 1
    log_part, power = 0, 1
    while power < count:
        power *= q
        log_part += 1
    return 1 + _ceil_div((q - 1) * (kwise - 1), q) * log_part


def iter_params(max_n: int, family: Optional[Family] = None, max_h1: Optional[int] = None) -> Iterator[CodeParams]:
    """长度不超过 max_n 的所有合法参数组（先 HL 后 HDL）。"""
    families = [family] if family is not None else [Family.HL, Family.HDL]
    for fam in families:
        for k in range(1, max_n + 1):
            for h1 in range(0, max_n - k + 1):
                if max_h1 is not None and h1 > max_h1:
                    break
                for r1 in range(1, k + h1 + 1):
                    if fam is Family.HL and (k + h1) % r1:
                        continue
                    if fam is Family.HDL and (r1 > k or k % r1):
                        continue
                    for h2 in range(0, max_n + 1):
                        for r2 in range(1, r1 + h2 + 1):
                            if fam is Family.HL and (r1 + h2) % r2:
                                continue
                            if fam is Family.HDL and (r2 > r1 or r1 % r2):
                                continue
                            for d in range(0, max_n + 1):
                                p = CodeParams(family=fam, k=k, r1=r1, r2=r2, h1=h1, h2=h2, delta=d)
                                if p.n > max_n:
                                    break
                                yield p
