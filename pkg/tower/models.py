"""
域塔相关的数据模型定义。
Level 表示塔的层级，FieldSpec / TowerSpec 是可序列化的域描述，
Element 是带层级的域元素（值为系数向量的整数编码）。
"""
from __future__ import annotations

from enum import Enum
from typing import NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict


class Level(str, Enum):
    """塔的三个层级：F_q ⊂ F_{q^m1} ⊂ F_{q^m}。"""
    BASE = "b"
    MID = "m"
    TOP = "t"

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]


_LEVEL_RANK = {Level.BASE: 0, Level.MID: 1, Level.TOP: 2}


class Op(str, Enum):
    """arith 支持的运算。"""
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    INV = "inv"
    POW = "pow"
    FROBENIUS = "frobenius"


class FieldSpec(BaseModel):
    """
    基域 F_q (q = p^s) 的描述。
    字段：
        p: int               # 特征（素数）
        s: int               # q = p^s
        modulus: List[int]   # F_p 上 s 次首一不可约多项式，低次在前
    """
    model_config = ConfigDict(frozen=True)

    p: int  # 特征
    s: int  # 次数
    modulus: Tuple[int, ...]  # 不可约多项式系数（小端）

    @property
    def q(self) -> int:
        return self.p ** self.s


class TowerSpec(BaseModel):
    """
    完整域塔的描述，写入实例目录的 instance.json。
    moduli 中的系数是下一层元素的整数编码。
    """
    model_config = ConfigDict(frozen=True)

    p: int  # 特征
    s: int  # q = p^s
    m1: int  # 中间层次数
    m: int  # 顶层次数，m1 | m
    base_modulus: Tuple[int, ...]  # F_p 上
    mid_modulus: Tuple[int, ...]  # F_q 上
    top_modulus: Tuple[int, ...]  # F_{q^m1} 上


class Element(NamedTuple):
    """带层级的域元素，value 是系数向量按下一层阶数展开的整数。"""
    level: Level
    value: int


class IndependentSet(BaseModel):
    """
    indep 模块的输出：系数域上 k-wise 独立的一组扩张域元素。
    字段：
        values: Tuple[int, ...]  # 元素，整数编码为系数域上的坐标向量
        degree: int              # 扩张次数（坐标向量长度）
        kwise: int               # 已认证的独立阶数
        base_order: int          # 系数域的阶
        method: str              # "bch" 或 "greedy"
    """
    model_config = ConfigDict(frozen=True)

    values: Tuple[int, ...]  # 元素
    degree: int  # 扩张次数
    kwise: int  # 独立阶数
    base_order: int  # 系数域阶
    method: str = "bch"  # 生成方式

    def __len__(self) -> int:
        return len(self.values)
