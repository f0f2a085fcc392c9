"""
编码层用到的数据模型。
参数、分组结构、擦除模式和证书用 Pydantic 定义（可直接序列化进实例目录和证书库），
CodeInstance / ReductionTrace 持有域塔和矩阵对象，用冻结的 dataclass。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from tower.errors import DivisibilityViolation
from tower.galois import FieldTower
from tower.matrix import IndexSet, MatrixF


class Family(str, Enum):
    """HL：所有符号分组；HDL：只有数据符号分组，h1 个全局校验位在末尾。"""
    HL = "hl"
    HDL = "hdl"


class Construction(str, Enum):
    GENERAL = "general"  # 一般构造，λ 在顶层
    H1_ONE = "h1_one"  # h1 = 1 的构造，全局行取 α^{q^{h2}}
    DERIVED = "derived"  # 由 HL 码删符号得到


class Dims(NamedTuple):
    t1: int
    t2: int
    n1: int
    n2: int
    n: int


class CodeParams(BaseModel):
    """
    码参数 (k, r1, r2, h1, h2, δ) 及所属族。
    字段：
        family: Family        # hl 或 hdl
        k, r1, r2: int        # 数据符号数、中层/局部组的信息长度
        h1, h2, delta: int    # 全局、中层、局部校验位数
        q: int                # 可选，指定基域大小
        seed: int             # 可选，只给随机化的测试工具用
        construction: str     # 可选，general 或 h1_one
    """
    model_config = ConfigDict(frozen=True)

    family: Family = Family.HL  # 码族
    k: int = Field(ge=1)  # 数据符号数
    r1: int = Field(ge=1)  # 中层组信息长度
    r2: int = Field(ge=1)  # 局部组信息长度
    h1: int = Field(default=0, ge=0)  # 全局校验位
    h2: int = Field(default=0, ge=0)  # 每个中层组的中层校验位
    delta: int = Field(default=0, ge=0)  # 每个局部组的局部校验位
    q: Optional[int] = None  # 指定的基域大小
    seed: Optional[int] = None  # 随机工具的种子
    construction: Optional[Construction] = None  # 构造方式

    @property
    def is_hl(self) -> bool:
        return self.family is Family.HL

    def dims(self) -> Dims:
        """t1, t2, n1, n2, n；整除条件不满足时抛 DivisibilityViolation。"""
        k, r1, r2, h1, h2, d = self.k, self.r1, self.r2, self.h1, self.h2, self.delta
        if self.is_hl:
            if (k + h1) % r1:
                raise DivisibilityViolation(f"r1={r1} does not divide k+h1={k + h1}")
            if (r1 + h2) % r2:
                raise DivisibilityViolation(f"r2={r2} does not divide r1+h2={r1 + h2}")
            t1, t2 = (k + h1) // r1, (r1 + h2) // r2
        else:
            if k % r1:
                raise DivisibilityViolation(f"r1={r1} does not divide k={k}")
            if r1 % r2:
                raise DivisibilityViolation(f"r2={r2} does not divide r1={r1}")
            t1, t2 = k // r1, r1 // r2
        n2 = r2 + d
        n1 = r1 + h2 + t2 * d
        n = k + h1 + t1 * (h2 + t2 * d)
        return Dims(t1, t2, n1, n2, n)

    @property
    def n(self) -> int:
        return self.dims().n

    def label(self) -> str:
        return (
            f"{self.family.value}(k={self.k}, r1={self.r1}, r2={self.r2}, "
            f"h1={self.h1}, h2={self.h2}, delta={self.delta})"
        )

    def core(self) -> Dict[str, object]:
        """只含六个整数和族，写入实例目录和证书库。"""
        return self.model_dump(mode="json", include={"family", "k", "r1", "r2", "h1", "h2", "delta"})


def hl_params(k: int, r1: int, r2: int, h1: int, h2: int, delta: int, **extra) -> CodeParams:
    return CodeParams(family=Family.HL, k=k, r1=r1, r2=r2, h1=h1, h2=h2, delta=delta, **extra)


def hdl_params(k: int, r1: int, r2: int, h1: int, h2: int, delta: int, **extra) -> CodeParams:
    return CodeParams(family=Family.HDL, k=k, r1=r1, r2=r2, h1=h1, h2=h2, delta=delta, **extra)


class GroupStructure(BaseModel):
    """
    坐标分组（1 起）。
    字段：
        A: 中层组，t1 个，每个 n1 个坐标
        B: 局部组，t1×t2，每个 n2 个坐标，B[i][s] ⊂ A[i]；HDL 的 A[i] 里局部组之后是 h2 个中层校验
        tail: HDL 末尾 h1 个全局坐标；HL 为空
    """
    model_config = ConfigDict(frozen=True)

    A: Tuple[IndexSet, ...]  # 中层组
    B: Tuple[Tuple[IndexSet, ...], ...]  # 局部组
    tail: IndexSet = ()  # HDL 全局校验坐标

    def group_of(self, coord: int) -> Optional[int]:
        """坐标所在中层组（0 起），不在任何组时为 None。"""
        for i, a in enumerate(self.A):
            if a[0] <= coord <= a[-1]:
                return i
        return None


class ErasurePattern(BaseModel):
    """
    (δ, h2) 擦除模式，下标均从 1 开始。
    字段：
        delta: t1×t2 网格，每格 δ 个 B 内局部坐标（取值 1..n2）
        gamma: t1 个，每个 h2 个 A 内坐标（取值 1..n1），与局部擦除不相交
        extra: 额外擦除的全局坐标（取值 1..n），至多 h1 个
    """
    model_config = ConfigDict(frozen=True)

    delta: Tuple[Tuple[Tuple[int, ...], ...], ...]  # Δ
    gamma: Tuple[Tuple[int, ...], ...]  # Γ
    extra: Tuple[int, ...] = ()  # 额外擦除


class Certificate(BaseModel):
    """
    is_mr 的结果。
    通过：verdict=pass checks=<N> millis=<t>
    失败：verdict=fail E=<set> T=<set>
    """
    model_config = ConfigDict(frozen=True)

    verdict: str  # "pass" 或 "fail"
    checks: int = 0  # 已完成的 (E, T) 检查数
    millis: Optional[int] = None  # 耗时，关闭计时时为空
    witness_E: Optional[Tuple[int, ...]] = None  # 失败时的 E
    witness_T: Optional[Tuple[int, ...]] = None  # 失败时的 T

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def format(self) -> str:
        if self.passed:
            line = f"verdict=pass checks={self.checks}"
            if self.millis is not None:
                line += f" millis={self.millis}"
            return line
        return f"verdict=fail E={_join(self.witness_E)} T={_join(self.witness_T)}"

    @classmethod
    def parse(cls, line: str) -> "Certificate":
        """format 的逆；无法识别的行抛 ValueError。"""
        try:
            fields = dict(item.split("=", 1) for item in line.split())
            verdict = fields["verdict"]
            if verdict == "pass":
                millis = fields.get("millis")
                return cls(verdict="pass", checks=int(fields["checks"]), millis=int(millis) if millis else None)
            if verdict == "fail":
                return cls(verdict="fail", witness_E=_split(fields["E"]), witness_T=_split(fields["T"]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"cannot parse certificate line {line.strip()!r}") from exc
        raise ValueError(f"unknown verdict {verdict!r}")


def _join(values: Optional[Tuple[int, ...]]) -> str:
    return ",".join(str(v) for v in values or ())


def _split(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


@dataclass(frozen=True)
class CodeInstance:
    """
    一个具体的码：校验矩阵 H（顶层，(n-k)×n）及其参数、域塔和构造用的元素网格。
    alphas 为 t2×n2 的中间层元素，lambdas 为 t1×t2×n2 的顶层元素（h1=1 构造和派生码为空）。
    """
    params: CodeParams
    tower: FieldTower
    H: MatrixF
    groups: GroupStructure
    beta: int = 1
    alphas: Tuple[Tuple[int, ...], ...] = ()
    lambdas: Tuple[Tuple[Tuple[int, ...], ...], ...] = ()
    construction: Construction = Construction.GENERAL
    alpha_kwise: int = 0  # alphas 已认证的独立阶数（基域上）
    lambda_kwise: int = 0  # lambdas 已认证的独立阶数（中间层上）
    notes: Dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.H.ncols

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def dims(self) -> Dims:
        return self.params.dims()


@dataclass(frozen=True)
class ReductionTrace:
    """
    擦除模式下的约化中间量。
    L[(i, s)]: δ×(n2-δ) 基域矩阵；psi[i]: r1+h2 个中间层元素，按局部组和组内坐标排列；
    F[i]: h2×(r1+h2) Moore 矩阵；phi[i]: r1+h2 个顶层元素；Z[i]: h2×r1 中间层矩阵；
    theta: t1·r1 个顶层元素。
    """
    L: Dict[Tuple[int, int], MatrixF]
    psi: Tuple[Tuple[int, ...], ...]
    F: Tuple[MatrixF, ...]
    phi: Tuple[Tuple[int, ...], ...]
    Z: Tuple[Optional[MatrixF], ...]
    theta: Tuple[int, ...]
    verdict: bool
    reason: str = ""
