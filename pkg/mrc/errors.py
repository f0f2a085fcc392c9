"""构造、验证和派生码时的异常。"""
from __future__ import annotations

from tower.errors import DivisibilityViolation, VerificationFailed  # noqa: F401  re-exported


class FieldTooSmall(ValueError):
    """基域元素个数少于需要的取值点数。"""


class ShapeMismatch(ValueError):
    """元素网格或矩阵块与参数不符。"""


class WrongH1(ValueError):
    """h1 = 1 构造只允许一个全局校验位。"""


class UnsupportedCase(ValueError):
    """派生只支持 r2 | h2 且 r2 | r1 的参数。"""


class NotCorrectable(ValueError):
    """擦除位置在 H 中线性相关。"""


class NotMR(RuntimeError):
    """输入码没有通过最大可恢复性验证。"""
