"""
从 HL 码删符号得到 HDL 码。
取第一个可容许 E 作主位置：前 k 个当数据，其余当全局校验。
  1. 不含数据的中层组只保留 E 中的坐标；
  2. 数据组里 s > r1/r2 的局部组去掉末尾 δ 个局部校验，只留 r2 个中层校验；
  3. r1 ∤ h1 时，第 ⌊k/r1⌋+1 组的 k mod r1 个数据位置直接删除（缩短），
     该组其余主位置改作全局校验，非主位置全部删除。
缩短就是删去 H 中对应的列；其余删除是打孔，由 verify.puncture 求新校验矩阵。
"""
from __future__ import annotations

import logging
from typing import Dict, List, Optional, Tuple

from tower.errors import VerificationFailed

from .errors import NotMR, ShapeMismatch, UnsupportedCase
from .layout import derive_dims, enumerate_admissible_E
from .models import Certificate, CodeInstance, Construction, Family
from .verify import is_mr, puncture, shorten

logger = logging.getLogger(__name__)


def plan_drops(instance: CodeInstance) -> Tuple[Dict[int, Tuple[int, int]], List[int], int]:
    """
    返回 ({原坐标: (步骤, 组号)}, 缩短的数据坐标, 新的 k)。
    组号从 1 开始。
    """
    params, groups = instance.params, instance.groups
    k, r1, r2, delta = params.k, params.r1, params.r2, params.delta
    E0 = next(enumerate_admissible_E(params))
    data = set(E0[:k])
    primary = set(E0)
    full, rem = divmod(k, r1)
    drops: Dict[int, Tuple[int, int]] = {}
    shortened: List[int] = []
    for i, A in enumerate(groups.A):
        if i < full:
            for B in groups.B[i][r1 // r2:]:
                for c in B[len(B) - delta:]:
                    drops[c] = (2, i + 1)
        elif i == full and rem:
            for c in A:
                if c in data:
                    drops[c] = (3, i + 1)
                    shortened.append(c)
                elif c not in primary:
                    drops[c] = (1, i + 1)
        else:
            for c in A:
                if c not in primary:
                    drops[c] = (1, i + 1)
    return drops, shortened, full * r1


def hdl_from_hl(instance: CodeInstance, certificate: Optional[Certificate] = None) -> CodeInstance:
    """
    HL 实例 → HDL 实例 (⌊k/r1⌋r1, r1, r2, h1, h2, δ)。
    要求 r2 | h2、r2 | r1 且源码通过 is_mr（可传入已有的通过证书）；结果再跑一次 is_mr。
    """
    params = instance.params
    if not params.is_hl:
        raise ValueError("derivation starts from an HL instance")
    if params.h2 % params.r2:
        raise UnsupportedCase(f"HDL derivation needs r2 | h2, got r2={params.r2} h2={params.h2}")
    if params.r1 % params.r2:
        raise UnsupportedCase(f"HDL derivation needs r2 | r1, got r2={params.r2} r1={params.r1}")
    if params.k < params.r1:
        raise UnsupportedCase(f"k={params.k} < r1={params.r1} leaves no data group")
    if certificate is None or not certificate.passed:
        certificate = is_mr(instance)
    if not certificate.passed:
        raise NotMR(f"{params.label()} is not maximally recoverable: {certificate.format()}")

    drops, shortened, k_new = plan_drops(instance)
    n = instance.n
    remaining = [c for c in range(1, n + 1) if c not in set(shortened)]
    keep = [c for c in remaining if c not in drops]
    H_short = shorten(instance.H, remaining)
    position = {c: idx + 1 for idx, c in enumerate(remaining)}
    H_new = puncture(H_short, [position[c] for c in keep])

    new_params = params.model_copy(update={"family": Family.HDL, "k": k_new, "construction": Construction.DERIVED})
    dims, groups = derive_dims(new_params)
    if dims.n != len(keep) or H_new.nrows != dims.n - k_new:
        raise ShapeMismatch(
            f"derived code has {len(keep)} coordinates and {H_new.nrows} checks, expected {dims.n} and {dims.n - k_new}"
        )

    log = [
        f"source {params.label()}",
        f"primary {','.join(str(c) for c in next(enumerate_admissible_E(params)))}",
    ]
    log.extend(f"drop {c} step={step} group={group}" for c, (step, group) in sorted(drops.items()))
    log.append(f"kept {','.join(str(c) for c in keep)}")
    log.append(f"result {new_params.label()}")
    derived = CodeInstance(
        params=new_params,
        tower=instance.tower,
        H=H_new,
        groups=groups,
        beta=instance.beta,
        construction=Construction.DERIVED,
        notes={"derivation_log": log, "source": params.core(), "kept": keep},
    )
    result = is_mr(derived)
    if not result.passed:
        raise VerificationFailed(f"derived {new_params.label()} failed verification: {result.format()}")
    logger.info("derived %s from %s, dropped %d coordinates", new_params.label(), params.label(), len(drops))
    return derived


def derivation_log(instance: CodeInstance) -> str:
    lines = instance.notes.get("derivation_log") or []
    return "\n".join(lines) + ("\n" if lines else "")
