"""
域塔层的异常。

输入错误继承 ValueError，计算失败继承 RuntimeError，命令层按这两类映射退出码。
"""
from __future__ import annotations


class NonPrime(ValueError):
    """特征不是素数。"""


class DivisibilityViolation(ValueError):
    """整除条件（m1 | m、r1 | k+h1 等）不成立。"""


class LevelMismatch(ValueError):
    """元素所在层级不适合所请求的运算。"""


class IndexOutOfRange(ValueError):
    """下标集合不是 [1, n] 内严格递增的序列。"""


class BudgetExceeded(ValueError):
    """穷举子集检查超出配置的预算。"""


class DivisionByZero(RuntimeError, ZeroDivisionError):
    """零的逆。"""


class Singular(RuntimeError):
    """矩阵不可逆。"""


class VerificationFailed(RuntimeError):
    """构造出的对象没有通过自身的认证。"""


class DegreeCapExceeded(RuntimeError):
    """在扩张次数上限内找不到独立集。"""
