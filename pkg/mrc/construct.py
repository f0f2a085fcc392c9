"""
HL 码的显式构造。
局部层是 Vandermonde 型的 M0，中层是 α 的 Moore 行（步长 q），全局层是 λ 的 Moore 行
（步长 q^m1）；h1 = 1 时全局行直接取 α^{q^{h2}}，整个码只需中间层。
HDL 码先构造一个 HL 码再交给 derive 删符号。
这里还有负例用的矩阵改造和擦除模式下的约化追踪。
"""
from __future__ import annotations

import dataclasses
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from tower.errors import IndexOutOfRange, Singular
from tower.galois import (
    AnyField,
    FieldTower,
    format_value,
    prime_power,
    primitive_element,
    smallest_prime_power_above,
    tower_create,
)
from tower.indep import independent_set
from tower.matrix import (
    MatrixF,
    block_diag,
    format_matrix,
    hstack,
    inverse,
    kwise_independent,
    restrict,
    vstack,
)
from tower.models import IndependentSet, Level

from .config import STRICT_Q
from .derive import hdl_from_hl
from .errors import FieldTooSmall, ShapeMismatch, UnsupportedCase, WrongH1
from .layout import derive_dims, predicted_degree, validate_pattern
from .models import CodeInstance, CodeParams, Construction, Dims, ErasurePattern, Family, ReductionTrace

logger = logging.getLogger(__name__)

Grid = Tuple[Tuple[int, ...], ...]


class ParameterChoice(NamedTuple):
    q: int
    tower: FieldTower
    beta: int
    alphas: Grid  # t2×n2，中间层
    lambdas: Tuple[Grid, ...]  # t1×t2×n2，顶层
    alpha_set: Optional[IndependentSet]
    lambda_set: Optional[IndependentSet]


def build_M0(tower: FieldTower, n2: int, delta: int, beta: Optional[int] = None) -> MatrixF:
    """
    δ×n2 的基域矩阵，取值点 0, β, β², …, β^{n2-1}：
    第 1 列是 e1，第 j 列（j ≥ 2）是 (β^{(j-1)r})_{r=0..δ-1}。任意 δ 列线性无关。
    """
    F = tower.base
    if delta > 0 and F.order < n2:
        raise FieldTooSmall(f"GF({F.order}) has fewer than {n2} points for the local groups")
    if beta is None:
        beta = primitive_element(tower).value
    rows = []
    for r in range(delta):
        row = [1 if r == 0 else 0]
        row.extend(F.pow(beta, (j - 1) * r) for j in range(2, n2 + 1))
        rows.append(row)
    return MatrixF.build(tower, Level.BASE, rows, n2)


def build_moore(tower: FieldTower, level: Level, elems: Sequence[int], rows: int, step_level: Level) -> MatrixF:
    """第 ℓ 行为 x^{Q^ℓ}，Q 是 step_level 层的阶。"""
    F = tower.field(level)
    stride = tower.stride(step_level)
    current = list(elems)
    out = []
    for _ in range(rows):
        out.append(tuple(current))
        current = [F.pow(x, stride) for x in current]
    return MatrixF(tower, Level(level), tuple(out), len(elems))


def _choose_q(params: CodeParams, dims: Dims, strict: bool) -> int:
    if params.q is not None:
        if prime_power(params.q) is None:
            raise ValueError(f"q={params.q} is not a prime power")
        if params.q < dims.n2:
            raise FieldTooSmall(f"q={params.q} is smaller than the local group size {dims.n2}")
        if strict and params.q < dims.n:
            raise FieldTooSmall(f"q={params.q} is smaller than the code length {dims.n}")
        return params.q
    if strict:
        return smallest_prime_power_above(dims.n, inclusive=True)
    return smallest_prime_power_above(dims.n2)


def _grid(values: Sequence[int], rows: int, width: int) -> Grid:
    return tuple(tuple(values[r * width:(r + 1) * width]) for r in range(rows))


def choose_parameters(
    params: CodeParams,
    construction: Construction = Construction.GENERAL,
    strict_q: Optional[bool] = None,
) -> ParameterChoice:
    """
    选 q、α、λ 以及扩张次数 m1、m。
    一般构造：α 在 F_q 上 (δ+1)h2-wise 独立，λ 在 F_{q^m1} 上 (δ+1)(h2+1)h1-wise 独立。
    h1 = 1 构造：α 在 F_q 上 (δ+1)(h2+1)-wise 独立，m = m1。
    """
    if not params.is_hl:
        raise ValueError("explicit constructions build HL codes, HDL codes are derived from them")
    construction = Construction(construction)
    if construction is Construction.DERIVED:
        raise ValueError("derived codes are not built from parameters")
    if construction is Construction.H1_ONE and params.h1 != 1:
        raise WrongH1(f"the h1 = 1 construction needs h1 = 1, got {params.h1}")
    dims = params.dims()
    strict = STRICT_Q if strict_q is None else strict_q
    q = _choose_q(params, dims, strict)
    p, s = prime_power(q)
    base_tower = tower_create(p, s, 1, 1)
    beta = primitive_element(base_tower).value
    delta, h1, h2 = params.delta, params.h1, params.h2

    count_a = dims.t2 * dims.n2
    if construction is Construction.H1_ONE:
        kwise_a = (delta + 1) * (h2 + 1)
    else:
        kwise_a = (delta + 1) * h2
    alpha_set, m1 = None, 1
    if kwise_a > 0:
        alpha_set = independent_set(base_tower, Level.BASE, count_a, kwise_a)
        m1 = alpha_set.degree
        logger.info(
            "alphas: %d elements %d-wise over GF(%d), m1=%d (closed form %d)",
            count_a, kwise_a, q, m1, predicted_degree(q, count_a, kwise_a),
        )

    m, lambda_set = m1, None
    if construction is Construction.GENERAL and h1 > 0:
        count_l = dims.t1 * count_a
        kwise_l = (delta + 1) * (h2 + 1) * h1
        lambda_set = independent_set(tower_create(p, s, m1, m1), Level.MID, count_l, kwise_l)
        m = m1 * lambda_set.degree
        logger.info(
            "lambdas: %d elements %d-wise over GF(%d^%d), m=%d (closed form %d)",
            count_l, kwise_l, q, m1, m, m1 * predicted_degree(q ** m1, count_l, kwise_l),
        )

    tower = tower_create(p, s, m1, m)
    alphas = _grid(alpha_set.values, dims.t2, dims.n2) if alpha_set else ()
    lambdas: Tuple[Grid, ...] = ()
    if lambda_set:
        lambdas = tuple(
            _grid(lambda_set.values[i * count_a:(i + 1) * count_a], dims.t2, dims.n2) for i in range(dims.t1)
        )
    return ParameterChoice(q, tower, beta, alphas, lambdas, alpha_set, lambda_set)


def _check_grid(grid: Sequence, shape: Tuple[int, ...], name: str) -> None:
    if len(grid) != shape[0]:
        raise ShapeMismatch(f"{name} needs {shape[0]} rows, got {len(grid)}")
    for row in grid:
        if len(shape) > 2:
            _check_grid(row, shape[1:], name)
        elif len(row) != shape[1]:
            raise ShapeMismatch(f"{name} rows need {shape[1]} entries, got {len(row)}")


def _middle_block(params: CodeParams, dims: Dims, tower: FieldTower, M0: MatrixF, alphas: Grid) -> MatrixF:
    """H0：t2 份 M0 的块对角，下面接 h2 行 α 的 Moore 矩阵，(t2δ+h2)×n1。"""
    if M0.shape != (params.delta, dims.n2):
        raise ShapeMismatch(f"M0 must be {params.delta}x{dims.n2}, got {M0.shape}")
    blocks = [block_diag([M0] * dims.t2).lift(Level.MID)]
    if params.h2:
        _check_grid(alphas, (dims.t2, dims.n2), "alphas")
        blocks.append(hstack([build_moore(tower, Level.MID, row, params.h2, Level.BASE) for row in alphas]))
    return vstack(blocks)


def _spread(row: Sequence[int], columns: Sequence[int], n: int) -> List[int]:
    out = [0] * n
    for c, x in zip(columns, row):
        out[c - 1] = x
    return out


def _assemble(params: CodeParams, tower: FieldTower, H0: MatrixF, global_blocks: Sequence[MatrixF]) -> MatrixF:
    dims, groups = derive_dims(params)
    rows = []
    for A in groups.A:
        rows.extend(_spread(r, A, dims.n) for r in H0.rows)
    for ell in range(params.h1):
        row = [0] * dims.n
        for A, block in zip(groups.A, global_blocks):
            for c, x in zip(A, block.rows[ell]):
                row[c - 1] = x
        rows.append(row)
    return MatrixF.build(tower, Level.TOP, rows, dims.n)


def assemble_H(params: CodeParams, tower: FieldTower, M0: MatrixF, alphas: Grid, lambdas: Sequence[Grid]) -> MatrixF:
    """一般构造的校验矩阵，t1(t2δ+h2)+h1 行，顶层。"""
    dims = params.dims()
    H0 = _middle_block(params, dims, tower, M0, alphas)
    global_blocks = []
    if params.h1:
        _check_grid(lambdas, (dims.t1, dims.t2, dims.n2), "lambdas")
        for grid in lambdas:
            flat = [x for row in grid for x in row]
            global_blocks.append(build_moore(tower, Level.TOP, flat, params.h1, Level.MID))
    return _assemble(params, tower, H0, global_blocks)


def build_h1_one(params: CodeParams, tower: FieldTower, M0: MatrixF, alphas: Grid) -> MatrixF:
    """h1 = 1：全局行在每个 A_i 上都是 (α_{s,j}^{q^{h2}})。"""
    if params.h1 != 1:
        raise WrongH1(f"the h1 = 1 construction needs h1 = 1, got {params.h1}")
    dims = params.dims()
    _check_grid(alphas, (dims.t2, dims.n2), "alphas")
    H0 = _middle_block(params, dims, tower, M0, alphas)
    mid = tower.mid
    exponent = tower.q ** params.h2
    row = tuple(mid.pow(x, exponent) for grid_row in alphas for x in grid_row)
    block = MatrixF(tower, Level.MID, (row,), dims.n1)
    return _assemble(params, tower, H0, [block] * dims.t1)


def hl_params_for_hdl(params: CodeParams) -> CodeParams:
    """
    能删成给定 HDL 参数的 HL 参数：r1 | h1 时六个数不变，
    否则 k 补到 k + ((-h1) mod r1)，使 r1 | k+h1 且 ⌊k/r1⌋r1 不变。
    """
    if params.is_hl:
        raise ValueError("expected HDL parameters")
    params.dims()
    if params.h2 % params.r2:
        raise UnsupportedCase(f"HDL derivation needs r2 | h2, got r2={params.r2} h2={params.h2}")
    extra = (-params.h1) % params.r1
    return params.model_copy(update={"family": Family.HL, "k": params.k + extra})


def build_instance(
    params: CodeParams,
    construction: Optional[Construction] = None,
    strict_q: Optional[bool] = None,
) -> CodeInstance:
    if not params.is_hl:
        source = build_instance(hl_params_for_hdl(params), construction, strict_q)
        logger.info("derive %s from %s", params.label(), source.params.label())
        return hdl_from_hl(source)
    construction = Construction(construction or params.construction or Construction.GENERAL)
    choice = choose_parameters(params, construction, strict_q)
    dims, groups = derive_dims(params)
    tower = choice.tower
    M0 = build_M0(tower, dims.n2, params.delta, choice.beta)
    if construction is Construction.H1_ONE:
        H = build_h1_one(params, tower, M0, choice.alphas)
    else:
        H = assemble_H(params, tower, M0, choice.alphas, choice.lambdas)
    notes: Dict[str, object] = {}
    if choice.alpha_set is not None:
        notes["alpha_method"] = choice.alpha_set.method
    if choice.lambda_set is not None:
        notes["lambda_method"] = choice.lambda_set.method
    logger.info("built %s over %r, H is %dx%d", params.label(), tower, H.nrows, H.ncols)
    return CodeInstance(
        params=params.model_copy(update={"q": choice.q, "construction": construction}),
        tower=tower,
        H=H,
        groups=groups,
        beta=choice.beta,
        alphas=choice.alphas,
        lambdas=choice.lambdas,
        construction=construction,
        alpha_kwise=choice.alpha_set.kwise if choice.alpha_set else 0,
        lambda_kwise=choice.lambda_set.kwise if choice.lambda_set else 0,
        notes=notes,
    )


# ---------- 负例 ----------

def _require_constructed(instance: CodeInstance) -> None:
    if instance.construction is Construction.DERIVED or not instance.params.is_hl:
        raise ValueError("only directly constructed HL instances have the block layout")


def zero_global_strip(instance: CodeInstance, group: int) -> CodeInstance:
    """把全局行在 A_group（1 起）上的部分清零。"""
    _require_constructed(instance)
    groups = instance.groups
    if not 1 <= group <= len(groups.A):
        raise IndexOutOfRange(f"mid group {group} outside [1, {len(groups.A)}]")
    columns = {c - 1 for c in groups.A[group - 1]}
    first = instance.H.nrows - instance.params.h1
    rows = [
        tuple(0 if (i >= first and j in columns) else x for j, x in enumerate(r))
        for i, r in enumerate(instance.H.rows)
    ]
    H = MatrixF(instance.tower, instance.H.level, tuple(rows), instance.H.ncols)
    notes = dict(instance.notes, defect=f"zero_global_strip group={group}")
    return dataclasses.replace(instance, H=H, notes=notes)


def corrupt_local_column(instance: CodeInstance, group: int, local: int, src: int, dst: int) -> CodeInstance:
    """在 B_{group,local} 的局部行里把第 dst 列改成第 src 列（都 1 起），局部码不再是 MDS。"""
    _require_constructed(instance)
    params, dims = instance.params, instance.dims
    if params.delta == 0:
        raise ValueError("no local rows to corrupt when delta = 0")
    if not (1 <= group <= dims.t1 and 1 <= local <= dims.t2):
        raise IndexOutOfRange(f"local group ({group}, {local}) outside the {dims.t1}x{dims.t2} grid")
    if not (1 <= src <= dims.n2 and 1 <= dst <= dims.n2) or src == dst:
        raise IndexOutOfRange(f"columns {src}, {dst} must be distinct in [1, {dims.n2}]")
    B = instance.groups.B[group - 1][local - 1]
    first = (group - 1) * (dims.t2 * params.delta + params.h2) + (local - 1) * params.delta
    targets = range(first, first + params.delta)
    rows = [list(r) for r in instance.H.rows]
    for i in targets:
        rows[i][B[dst - 1] - 1] = rows[i][B[src - 1] - 1]
    H = MatrixF(instance.tower, instance.H.level, tuple(tuple(r) for r in rows), instance.H.ncols)
    notes = dict(instance.notes, defect=f"corrupt_local_column group={group} local={local} {src}->{dst}")
    return dataclasses.replace(instance, H=H, notes=notes)


# ---------- 约化追踪 ----------

def _reduced(F: AnyField, values: Sequence[int], erased: Sequence[int], j: int, L: MatrixF, col: int) -> int:
    """x_j - Σ_r x_{Δ_r} L[r][col]。"""
    acc = values[j - 1]
    for r, e in enumerate(erased):
        coef = L.rows[r][col]
        if coef:
            acc = F.subtract(acc, F.mul(values[e - 1], coef))
    return acc


def reduction_trace(instance: CodeInstance, pattern: ErasurePattern) -> ReductionTrace:
    """
    按 (δ, h2) 擦除模式约化：先用局部行消去 Δ，得到 Ψ（中层）和 Φ（全局），
    再用中层行消去 Γ 得到 Θ。Ψ 逐组 h2-wise 基域独立且 Θ h1-wise 中间层独立时 verdict 为真。
    """
    _require_constructed(instance)
    params, tower = instance.params, instance.tower
    validate_pattern(params, pattern)
    dims = instance.dims
    mid, top = tower.mid, tower.top
    h1, h2 = params.h1, params.h2
    M0 = build_M0(tower, dims.n2, params.delta, instance.beta)
    zeros = tuple((0,) * dims.n2 for _ in range(dims.t2))
    alphas = instance.alphas or zeros
    if instance.construction is Construction.H1_ONE:
        lifted = tuple(tuple(mid.pow(x, tower.q ** h2) for x in row) for row in alphas)
        seeds = [lifted] * dims.t1
    else:
        seeds = list(instance.lambdas) or [zeros] * dims.t1

    L: Dict[Tuple[int, int], MatrixF] = {}
    psi_all, F_all, phi_all, Z_all = [], [], [], []
    theta: List[int] = []
    verdict, reason = True, ""
    for i in range(dims.t1):
        psi, phi, remaining = [], [], []
        for s in range(dims.t2):
            erased = pattern.delta[i][s]
            kept = [j for j in range(1, dims.n2 + 1) if j not in erased]
            if erased:
                Ls = inverse(restrict(M0, erased)) @ restrict(M0, kept)
            else:
                Ls = MatrixF.zeros(tower, Level.BASE, 0, len(kept))
            L[(i + 1, s + 1)] = Ls
            for col, j in enumerate(kept):
                psi.append(_reduced(mid, alphas[s], erased, j, Ls, col))
                phi.append(_reduced(top, seeds[i][s], erased, j, Ls, col))
                remaining.append(s * dims.n2 + j)
        psi_all.append(tuple(psi))
        phi_all.append(tuple(phi))
        F_i = build_moore(tower, Level.MID, psi, h2, Level.BASE)
        F_all.append(F_i)

        gpos = [remaining.index(c) for c in pattern.gamma[i]]
        gbar = [b for b in range(len(remaining)) if b not in gpos]
        if h2:
            try:
                Z = inverse(restrict(F_i, [g + 1 for g in gpos])) @ restrict(F_i, [b + 1 for b in gbar])
            except Singular:
                Z_all.append(None)
                if verdict:
                    verdict, reason = False, f"F|Gamma is singular in mid group {i + 1}"
                continue
        else:
            Z = MatrixF.zeros(tower, Level.MID, 0, len(gbar))
        Z_all.append(Z)
        for col, b in enumerate(gbar):
            acc = phi[b]
            for r, g in enumerate(gpos):
                coef = Z.rows[r][col]
                if coef:
                    acc = top.subtract(acc, top.mul(phi[g], coef))
            theta.append(acc)

    for i, psi in enumerate(psi_all):
        if not verdict:
            break
        result = kwise_independent(psi, h2, tower, Level.BASE, level=Level.MID)
        if not result:
            verdict, reason = False, f"Psi of mid group {i + 1} is not {h2}-wise independent, witness {result.witness}"
    if verdict:
        result = kwise_independent(theta, h1, tower, Level.MID, level=Level.TOP)
        if not result:
            verdict, reason = False, f"Theta is not {h1}-wise independent, witness {result.witness}"
    return ReductionTrace(
        L=L,
        psi=tuple(psi_all),
        F=tuple(F_all),
        phi=tuple(phi_all),
        Z=tuple(Z_all),
        theta=tuple(theta),
        verdict=verdict,
        reason=reason,
    )


def _elements(field: AnyField, prefix: str, values: Sequence[int]) -> str:
    return " ".join(f"{prefix}:{format_value(field, v)}" for v in values)


def format_trace(trace: ReductionTrace, tower: FieldTower) -> str:
    lines = []
    for (i, s), Ls in sorted(trace.L.items()):
        lines.append(f"L[{i}][{s}]")
        lines.append(format_matrix(Ls).rstrip("\n"))
    for i, psi in enumerate(trace.psi, start=1):
        lines.append(f"Psi[{i}] {_elements(tower.mid, 'm', psi)}")
        lines.append(f"Phi[{i}] {_elements(tower.top, 't', trace.phi[i - 1])}")
        lines.append(f"F[{i}]")
        lines.append(format_matrix(trace.F[i - 1]).rstrip("\n"))
        if i - 1 < len(trace.Z):
            Z = trace.Z[i - 1]
            lines.append(f"Z[{i}]")
            lines.append(format_matrix(Z).rstrip("\n") if Z is not None else "singular")
    lines.append(f"Theta {_elements(tower.top, 't', trace.theta)}")
    lines.append(f"verdict={'true' if trace.verdict else 'false'}")
    if trace.reason:
        lines.append(f"reason={trace.reason}")
    return "\n".join(lines) + "\n"
