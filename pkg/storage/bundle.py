"""
实例目录：instance.json（参数、域塔、构造信息）、H.txt、alphas.txt、lambdas.txt、derivation.log。
读回时按 (p, s, m1, m) 重建域塔，并核对三个模多项式与文件一致。
"""
from __future__ import annotations

import hashlib  # 用于矩阵摘要
import logging
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import BaseModel, Field

from mrc.errors import ShapeMismatch
from mrc.layout import derive_dims
from mrc.models import CodeInstance, CodeParams, Construction
from tower.galois import tower_create
from tower.indep import format_element_list, parse_element_list
from tower.matrix import format_matrix, parse_matrix
from tower.models import Level, TowerSpec

logger = logging.getLogger(__name__)

INSTANCE_FILE = "instance.json"
MATRIX_FILE = "H.txt"
ALPHAS_FILE = "alphas.txt"
LAMBDAS_FILE = "lambdas.txt"
LOG_FILE = "derivation.log"


class BundleMeta(BaseModel):
    """
    instance.json 的内容。
    字段：
        params: CodeParams       # 码参数
        construction: str        # general / h1_one / derived
        tower: TowerSpec         # 域塔及模多项式
        beta: int                # M0 用的本原元
        alpha_kwise: int         # alphas 的独立阶数
        lambda_kwise: int        # lambdas 的独立阶数
        notes: dict              # 构造备注、派生日志等
    """
    params: CodeParams  # 码参数
    construction: Construction  # 构造方式
    tower: TowerSpec  # 域塔
    beta: int = 1  # 本原元
    alpha_kwise: int = 0  # alphas 独立阶数
    lambda_kwise: int = 0  # lambdas 独立阶数
    notes: Dict[str, Any] = Field(default_factory=dict)  # 备注


def compute_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def bundle_digest(directory: Union[str, Path]) -> str:
    """H.txt 的 sha256，证书台账用它标识矩阵。"""
    return compute_sha256((Path(directory) / MATRIX_FILE).read_text(encoding="utf-8"))


def save_instance(instance: CodeInstance, directory: Union[str, Path]) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    tower = instance.tower
    meta = BundleMeta(
        params=instance.params,
        construction=instance.construction,
        tower=tower.spec(),
        beta=instance.beta,
        alpha_kwise=instance.alpha_kwise,
        lambda_kwise=instance.lambda_kwise,
        notes=instance.notes,
    )
    (path / INSTANCE_FILE).write_text(meta.model_dump_json(indent=2) + "\n", encoding="utf-8")
    (path / MATRIX_FILE).write_text(format_matrix(instance.H), encoding="utf-8")
    if instance.alphas:
        flat = [x for row in instance.alphas for x in row]
        text = format_element_list(tower.mid, Level.MID, flat, instance.alpha_kwise, tower.q, tower.m1)
        (path / ALPHAS_FILE).write_text(text, encoding="utf-8")
    if instance.lambdas:
        flat = [x for grid in instance.lambdas for row in grid for x in row]
        text = format_element_list(
            tower.top, Level.TOP, flat, instance.lambda_kwise, tower.q ** tower.m1, tower.m // tower.m1
        )
        (path / LAMBDAS_FILE).write_text(text, encoding="utf-8")
    log = instance.notes.get("derivation_log")
    if log:
        (path / LOG_FILE).write_text("\n".join(log) + "\n", encoding="utf-8")
    logger.info("saved %s to %s", instance.params.label(), path)
    return path


def _rows(values, rows: int, width: int):
    if len(values) != rows * width:
        raise ShapeMismatch(f"expected {rows * width} elements, found {len(values)}")
    return tuple(tuple(values[r * width:(r + 1) * width]) for r in range(rows))


def load_instance(directory: Union[str, Path]) -> CodeInstance:
    path = Path(directory)
    meta_file = path / INSTANCE_FILE
    if not meta_file.is_file():
        raise FileNotFoundError(f"{meta_file} not found")
    meta = BundleMeta.model_validate_json(meta_file.read_text(encoding="utf-8"))
    spec = meta.tower
    tower = tower_create(spec.p, spec.s, spec.m1, spec.m)
    if tower.spec() != spec:
        raise ValueError(f"moduli in {meta_file} do not match the deterministic tower {tower!r}")

    params = meta.params
    dims, groups = derive_dims(params)
    H = parse_matrix(tower, (path / MATRIX_FILE).read_text(encoding="utf-8"))
    if H.ncols != dims.n:
        raise ShapeMismatch(f"H has {H.ncols} columns, parameters give n={dims.n}")
    H = H.lift(Level.TOP)

    alphas, lambdas = (), ()
    alpha_file, lambda_file = path / ALPHAS_FILE, path / LAMBDAS_FILE
    if alpha_file.is_file():
        values, _ = parse_element_list(tower.mid, Level.MID, alpha_file.read_text(encoding="utf-8"))
        alphas = _rows(values, dims.t2, dims.n2)
    if lambda_file.is_file():
        values, _ = parse_element_list(tower.top, Level.TOP, lambda_file.read_text(encoding="utf-8"))
        grid = _rows(values, dims.t1 * dims.t2, dims.n2)
        lambdas = tuple(grid[i * dims.t2:(i + 1) * dims.t2] for i in range(dims.t1))
    logger.debug("loaded %s from %s", params.label(), path)
    return CodeInstance(
        params=params,
        tower=tower,
        H=H,
        groups=groups,
        beta=meta.beta,
        alphas=alphas,
        lambdas=lambdas,
        construction=meta.construction,
        alpha_kwise=meta.alpha_kwise,
        lambda_kwise=meta.lambda_kwise,
        notes=dict(meta.notes),
    )
