"""
有限域与三层域塔 F_q ⊂ F_{q^m1} ⊂ F_{q^m} 的精确运算。

元素一律用整数表示：系数向量（小端）按下一层的阶展开成整数。
因此整数的 p 进制数字就是 F_p 上的平坦坐标，低层元素嵌入高层时整数值不变，
p = 2 时加法就是异或。

阶不超过 TABLE_LIMIT 的域在构造时用 numpy 批量生成 exp/log 表（奇特征另有 Zech 表），
更大的域走多项式乘法和扩展欧几里得求逆。
"""
from __future__ import annotations

import itertools
import logging
from array import array
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import BUILD_TABLES, TABLE_LIMIT
from .errors import DivisibilityViolation, DivisionByZero, LevelMismatch, NonPrime
from .models import Element, FieldSpec, Level, Op, TowerSpec

logger = logging.getLogger(__name__)

# 生成 exp 表时每批处理的幂次数
_TABLE_BLOCK = 1 << 15


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> List[int]:
    """试除法分解，返回去重后的素因子（升序）。"""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return factors


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """q = p^s 时返回 (p, s)，否则返回 None。"""
    if q < 2:
        return None
    p = prime_factors(q)[0]
    s = 0
    while q % p == 0:
        q //= p
        s += 1
    return (p, s) if q == 1 else None


def smallest_prime_power_above(n: int, inclusive: bool = False) -> int:
    """大于 n（inclusive=True 时不小于 n）的最小素数幂。"""
    q = max(2, n if inclusive else n + 1)
    while prime_power(q) is None:
        q += 1
    return q


class PrimeField:
    """F_p，元素为 0..p-1。"""

    def __init__(self, p: int):
        if not is_prime(p):
            raise NonPrime(f"{p} is not a prime")
        self.p = p
        self.order = p
        self.degree = 1
        self.flat_degree = 1
        self.sub = None
        self._primitive: Optional[int] = None
        if p == 2:
            self.add = self.subtract = _xor

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def contains(self, a: int) -> bool:
        return 0 <= a < self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def subtract(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if not a:
            raise DivisionByZero("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def primitive_element(self) -> int:
        if self._primitive is None:
            self._primitive = _find_primitive(self.order, self.pow)
        return self._primitive


def _xor(a: int, b: int) -> int:
    return a ^ b


def _find_primitive(order: int, power) -> int:
    """按整数顺序找第一个乘法阶为 order-1 的元素。"""
    n = order - 1
    if n == 1:
        return 1
    cofactors = [n // r for r in prime_factors(n)]
    for g in range(2, order):
        if all(power(g, c) != 1 for c in cofactors):
            return g
    raise ArithmeticError(f"no primitive element in field of order {order}")


AnyField = Union[PrimeField, "GaloisField"]


class GaloisField:
    """
    sub[y] / (modulus)。modulus 为首一不可约多项式，系数是 sub 的元素，低次在前。
    次数为 1 时与 sub 是同一个域，所有运算直接转给 sub。
    """

    def __init__(self, sub: AnyField, modulus: Sequence[int]):
        modulus = tuple(modulus)
        self.sub = sub
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.p = sub.p
        self.order = sub.order ** self.degree
        self.flat_degree = sub.flat_degree * self.degree
        self._q = sub.order
        self._n = self.order - 1
        self._primitive: Optional[int] = None
        self._exp = self._log = self._zech = None
        # x^d ≡ -Σ m_j x^j
        self._reducer = [(j, sub.neg(c)) for j, c in enumerate(modulus[:-1]) if c]

        if self.degree == 1:
            self.add, self.subtract, self.neg = sub.add, sub.subtract, sub.neg
            self.mul, self.inv, self.pow = sub.mul, sub.inv, sub.pow
            return
        if self.p == 2:
            self.add = self.subtract = _xor
            self.neg = _identity
        if BUILD_TABLES and self.order <= TABLE_LIMIT:
            self._build_tables()
            self.mul, self.inv, self.pow = self._mul_table, self._inv_table, self._pow_table
            if self.p != 2:
                self.add, self.neg = self._add_zech, self._neg_table
        else:
            self.mul, self.inv, self.pow = self._mul_poly, self._inv_poly, self._pow_poly

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.flat_degree})"

    @property
    def tabled(self) -> bool:
        return self._exp is not None

    def contains(self, a: int) -> bool:
        return 0 <= a < self.order

    # ---------- 编码 ----------

    def coeffs(self, a: int) -> List[int]:
        q = self._q
        out = []
        for _ in range(self.degree):
            a, c = divmod(a, q)
            out.append(c)
        return out

    def from_coeffs(self, cs: Sequence[int]) -> int:
        q = self._q
        value = 0
        for c in reversed(cs):
            value = value * q + c
        return value

    def digits(self, a: int) -> List[int]:
        """F_p 上的平坦坐标。"""
        p = self.p
        out = []
        for _ in range(self.flat_degree):
            a, c = divmod(a, p)
            out.append(c)
        return out

    # ---------- 加法（奇特征、无表） ----------

    def add(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        place = 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += (da + db) % p * place
            place *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        out = 0
        place = 1
        while a:
            a, da = divmod(a, p)
            out += -da % p * place
            place *= p
        return out

    def subtract(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    # ---------- 多项式运算 ----------

    def _mul_poly(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        sub = self.sub
        smul, sadd = sub.mul, sub.add
        d = self.degree
        xb = [(j, c) for j, c in enumerate(self.coeffs(b)) if c]
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(self.coeffs(a)):
            if ai:
                for j, bj in xb:
                    prod[i + j] = sadd(prod[i + j], smul(ai, bj))
        reducer = self._reducer
        for top in range(2 * d - 2, d - 1, -1):
            c = prod[top]
            if c:
                base = top - d
                for j, r in reducer:
                    prod[base + j] = sadd(prod[base + j], smul(c, r))
        return self.from_coeffs(prod[:d])

    def _pow_poly(self, a: int, e: int) -> int:
        if not a:
            if e < 0:
                raise DivisionByZero("inverse of zero")
            return 0 if e else 1
        e %= self._n
        result = 1
        while e:
            if e & 1:
                result = self._mul_poly(result, a)
            a = self._mul_poly(a, a)
            e >>= 1
        return result

    def _inv_poly(self, a: int) -> int:
        if not a:
            raise DivisionByZero("inverse of zero")
        inverse = poly_inverse(self.sub, self.coeffs(a), list(self.modulus))
        return self.from_coeffs(inverse + [0] * (self.degree - len(inverse)))

    # ---------- 查表运算 ----------

    def _build_tables(self) -> None:
        p, width = self.p, self.flat_degree
        g = _find_primitive(self.order, self._pow_poly)
        self._primitive = g
        n = self._n
        weights = np.array([p ** j for j in range(width)], dtype=np.int64)

        # 乘 g 在平坦坐标上的矩阵：第 j 列是 g·p^j 的坐标
        step = np.zeros((width, width), dtype=np.int64)
        for j in range(width):
            step[:, j] = self.digits(self._mul_poly(g, p ** j))

        block = np.zeros((1, width), dtype=np.int64)
        block[0, 0] = 1
        while block.shape[0] < min(n, _TABLE_BLOCK):
            block = np.vstack([block, (block @ step.T) % p])
            step = (step @ step) % p
        size = block.shape[0]
        # step 现在是乘 g^size 的矩阵

        exp = np.empty(n + size, dtype=np.int64)
        plus_one = np.empty(n + size, dtype=np.int64) if p != 2 else None
        start = 0
        while start < n:
            exp[start:start + size] = block @ weights
            if plus_one is not None:
                shifted = block.copy()
                shifted[:, 0] = (shifted[:, 0] + 1) % p
                plus_one[start:start + size] = shifted @ weights
            block = (block @ step.T) % p
            start += size
        exp = exp[:n]

        log = np.zeros(self.order, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        self._exp = _to_array(np.concatenate([exp, exp]))
        self._log = _to_array(log)
        if plus_one is not None:
            plus_one = plus_one[:n]
            self._zech = _to_array(np.where(plus_one == 0, -1, log[plus_one]))
        logger.debug("built tables for %r (primitive %d)", self, g)

    def _mul_table(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        log = self._log
        return self._exp[log[a] + log[b]]

    def _inv_table(self, a: int) -> int:
        if not a:
            raise DivisionByZero("inverse of zero")
        return self._exp[self._n - self._log[a]]

    def _pow_table(self, a: int, e: int) -> int:
        if not a:
            if e < 0:
                raise DivisionByZero("inverse of zero")
            return 0 if e else 1
        return self._exp[self._log[a] * e % self._n]

    def _add_zech(self, a: int, b: int) -> int:
        if not a:
            return b
        if not b:
            return a
        log = self._log
        la = log[a]
        d = log[b] - la
        if d < 0:
            d += self._n
        z = self._zech[d]
        if z < 0:
            return 0
        return self._exp[la + z]

    def _neg_table(self, a: int) -> int:
        if not a:
            return 0
        return self._exp[self._log[a] + self._n // 2]

    # ---------- 其他 ----------

    def primitive_element(self) -> int:
        if self.degree == 1:
            return self.sub.primitive_element()
        if self._primitive is None:
            self._primitive = _find_primitive(self.order, self.pow)
        return self._primitive

    def frobenius(self, a: int, stride: int, times: int = 1) -> int:
        """a ↦ a^(stride^times)，square-and-multiply。"""
        return self.pow(a, stride ** times)


def _identity(a: int) -> int:
    return a


def _to_array(values: np.ndarray) -> array:
    table = array("q")
    table.frombytes(np.ascontiguousarray(values, dtype=np.int64).tobytes())
    return table


# ---------- 系数域上的多项式（小端列表） ----------

def _trim(f: List[int]) -> List[int]:
    while f and not f[-1]:
        f.pop()
    return f


def poly_sub(F: AnyField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        if c:
            out[i] = F.subtract(out[i], c)
    return _trim(out)


def poly_mul(F: AnyField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return _trim(out)


def poly_divmod(F: AnyField, a: Sequence[int], b: Sequence[int]) -> Tuple[List[int], List[int]]:
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    rem = _trim(list(a))
    db = len(b) - 1
    if len(rem) <= db:
        return [], rem
    inv_lead = F.inv(b[-1])
    quot = [0] * (len(rem) - db)
    for i in range(len(rem) - 1 - db, -1, -1):
        c = rem[i + db]
        if c:
            c = F.mul(c, inv_lead)
            quot[i] = c
            for j, bj in enumerate(b):
                if bj:
                    rem[i + j] = F.subtract(rem[i + j], F.mul(c, bj))
    return _trim(quot), _trim(rem[:db])


def poly_gcd(F: AnyField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    """首一的最大公因式。"""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, poly_divmod(F, a, b)[1]
    if not a:
        return a
    lead = F.inv(a[-1])
    return [F.mul(lead, c) for c in a]


def poly_inverse(F: AnyField, a: Sequence[int], f: Sequence[int]) -> List[int]:
    """a 在 F[x]/(f) 中的逆，f 不可约。"""
    r0, r1 = _trim(list(f)), _trim(list(a))
    s0, s1 = [], [1]
    while r1:
        quot, rem = poly_divmod(F, r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(F, s0, poly_mul(F, quot, s1))
    if len(r0) != 1:
        raise DivisionByZero("element not invertible modulo reducible polynomial")
    c = F.inv(r0[0])
    return [F.mul(c, x) for x in s0]


def poly_powmod(F: AnyField, base: Sequence[int], e: int, f: Sequence[int]) -> List[int]:
    result = [1]
    base = poly_divmod(F, base, f)[1]
    while e:
        if e & 1:
            result = poly_divmod(F, poly_mul(F, result, base), f)[1]
        base = poly_divmod(F, poly_mul(F, base, base), f)[1]
        e >>= 1
    return result


def is_irreducible(F: AnyField, f: Sequence[int]) -> bool:
    """Ben-Or：对 i ≤ d/2 检查 gcd(x^{Q^i} - x, f) = 1。f 须首一。"""
    f = list(f)
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    if not f[0]:
        return False
    h = [0, 1]
    for _ in range(d // 2):
        h = poly_powmod(F, h, F.order, f)
        if len(poly_gcd(F, f, poly_sub(F, h, [0, 1]))) > 1:
            return False
    return True


def smallest_irreducible(F: AnyField, degree: int) -> Tuple[int, ...]:
    """
    F 上字典序最小的 degree 次首一不可约多项式（c0 先比较），小端系数。
    一次时取 x。
    """
    if degree < 1:
        raise ValueError(f"degree must be positive, got {degree}")
    if degree == 1:
        return (0, 1)
    for c0 in range(1, F.order):
        for rest in itertools.product(range(F.order), repeat=degree - 1):
            candidate = (c0,) + rest + (1,)
            if is_irreducible(F, candidate):
                return candidate
    raise ArithmeticError(f"no irreducible polynomial of degree {degree} over {F!r}")


# ---------- 域塔 ----------

class FieldTower:
    """
    F_q ⊂ F_{q^m1} ⊂ F_{q^m}，q = p^s。
    顶层是中间层的扩张，嵌入就是常数多项式的包含，整数值不变。
    """

    def __init__(self, p: int, s: int, m1: int, m: int):
        if not is_prime(p):
            raise NonPrime(f"{p} is not a prime")
        if s < 1 or m1 < 1 or m < 1:
            raise ValueError(f"degrees must be positive, got s={s} m1={m1} m={m}")
        if m % m1:
            raise DivisibilityViolation(f"m1={m1} does not divide m={m}")
        self.p, self.s, self.m1, self.m = p, s, m1, m
        self.prime = PrimeField(p)
        self.base = GaloisField(self.prime, smallest_irreducible(self.prime, s))
        self.mid = GaloisField(self.base, smallest_irreducible(self.base, m1))
        self.top = GaloisField(self.mid, smallest_irreducible(self.mid, m // m1))
        logger.info("tower GF(%d^%d) < GF(q^%d) < GF(q^%d) ready", p, s, m1, m)

    def __reduce__(self):
        return tower_create, (self.p, self.s, self.m1, self.m)

    def __repr__(self) -> str:
        return f"FieldTower(p={self.p}, s={self.s}, m1={self.m1}, m={self.m})"

    @property
    def key(self) -> Tuple[int, int, int, int]:
        return (self.p, self.s, self.m1, self.m)

    @property
    def q(self) -> int:
        return self.base.order

    def field(self, level: Level) -> GaloisField:
        return {Level.BASE: self.base, Level.MID: self.mid, Level.TOP: self.top}[Level(level)]

    def stride(self, level: Level) -> int:
        """frobenius(level) 的指数：Base 为 q，Mid 为 q^m1。"""
        return self.field(level).order

    def spec(self) -> TowerSpec:
        return TowerSpec(
            p=self.p,
            s=self.s,
            m1=self.m1,
            m=self.m,
            base_modulus=self.base.modulus,
            mid_modulus=self.mid.modulus,
            top_modulus=self.top.modulus,
        )

    def base_spec(self) -> FieldSpec:
        return FieldSpec(p=self.p, s=self.s, modulus=self.base.modulus)

    def element(self, level: Level, value: int) -> Element:
        level = Level(level)
        if not self.field(level).contains(value):
            raise LevelMismatch(f"{value} is not an element of level {level.value}")
        return Element(level, value)


@lru_cache(maxsize=None)
def tower_create(p: int, s: int, m1: int, m: int) -> FieldTower:
    return FieldTower(p, s, m1, m)


def _check(tower: FieldTower, e: Element) -> GaloisField:
    field = tower.field(e.level)
    if not field.contains(e.value):
        raise LevelMismatch(f"{e.value} is not an element of level {Level(e.level).value}")
    return field


def arith(
    tower: FieldTower,
    a: Element,
    b: Optional[Element] = None,
    op: Op = Op.ADD,
    e: Optional[int] = None,
    level: Optional[Level] = None,
) -> Element:
    """
    带层级的域运算。两个操作数层级不同时，低层元素隐式嵌入高层。
    pow 用参数 e；frobenius 用参数 level（Base: x^q，Mid: x^{q^m1}）。
    """
    op = Op(op)
    _check(tower, a)
    lvl = Level(a.level)
    if b is not None:
        _check(tower, b)
        if Level(b.level).rank > lvl.rank:
            lvl = Level(b.level)
    field = tower.field(lvl)

    if op in (Op.ADD, Op.SUB, Op.MUL):
        if b is None:
            raise ValueError(f"{op.value} needs two operands")
        fn = {Op.ADD: field.add, Op.SUB: field.subtract, Op.MUL: field.mul}[op]
        return Element(lvl, fn(a.value, b.value))
    if op is Op.INV:
        return Element(lvl, field.inv(a.value))
    if op is Op.POW:
        if e is None:
            raise ValueError("pow needs an exponent")
        return Element(lvl, field.pow(a.value, e))
    if level is None:
        raise ValueError("frobenius needs a level")
    level = Level(level)
    if level is Level.TOP:
        raise LevelMismatch("frobenius is defined relative to Base or Mid")
    return Element(lvl, field.pow(a.value, tower.stride(level)))


def decompose(tower: FieldTower, a: Element, target: Level) -> List[int]:
    """a 在 target 层上的坐标向量（长度为 [a.level : target]）。"""
    field = _check(tower, a)
    target = Level(target)
    if target.rank > Level(a.level).rank:
        raise LevelMismatch(f"cannot decompose level {Level(a.level).value} over {target.value}")
    sub = tower.field(target)
    width = field.flat_degree // sub.flat_degree
    value, out = a.value, []
    for _ in range(width):
        value, c = divmod(value, sub.order)
        out.append(c)
    return out


def recompose(tower: FieldTower, vector: Sequence[int], source: Level, target: Level) -> Element:
    """decompose 的逆：source 层上的坐标向量组成 target 层元素。"""
    source, target = Level(source), Level(target)
    sub, field = tower.field(source), tower.field(target)
    if source.rank > target.rank or len(vector) != field.flat_degree // sub.flat_degree:
        raise LevelMismatch(f"vector of length {len(vector)} does not fit {target.value} over {source.value}")
    value = 0
    for c in reversed(vector):
        if not sub.contains(c):
            raise LevelMismatch(f"coordinate {c} is not in level {source.value}")
        value = value * sub.order + c
    return Element(target, value)


def primitive_element(tower: FieldTower, level: Level = Level.BASE) -> Element:
    level = Level(level)
    return Element(level, tower.field(level).primitive_element())


# ---------- 文本格式 ----------

def format_value(field: AnyField, value: int) -> str:
    """系数向量的文本，非素域的系数递归写成 [..]。"""
    if field.flat_degree == 1:
        return str(value)
    if field.degree == 1:
        return format_value(field.sub, value)
    sub = field.sub
    if sub.flat_degree == 1:
        return ",".join(str(c) for c in field.coeffs(value))
    return ",".join(f"[{format_value(sub, c)}]" for c in field.coeffs(value))


def _split_top(text: str) -> List[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced brackets in {text!r}")
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise ValueError(f"unbalanced brackets in {text!r}")
    parts.append(text[start:])
    return parts


def parse_value(field: AnyField, text: str) -> int:
    text = text.strip()
    if field.flat_degree == 1:
        value = int(text)
        if not 0 <= value < field.p:
            raise ValueError(f"{value} is out of range for GF({field.p})")
        return value
    if field.degree == 1:
        return parse_value(field.sub, text)
    parts = _split_top(text)
    if len(parts) != field.degree:
        raise ValueError(f"expected {field.degree} coefficients, got {len(parts)} in {text!r}")
    sub = field.sub
    coeffs = []
    for part in parts:
        part = part.strip()
        if sub.flat_degree > 1:
            if not (part.startswith("[") and part.endswith("]")):
                raise ValueError(f"nested coefficient must be bracketed: {part!r}")
            part = part[1:-1]
        coeffs.append(parse_value(sub, part))
    return field.from_coeffs(coeffs)


def format_element(tower: FieldTower, e: Element) -> str:
    field = _check(tower, e)
    return f"{Level(e.level).value}:{format_value(field, e.value)}"


def parse_element(tower: FieldTower, text: str, level: Optional[Level] = None) -> Element:
    head, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"element text needs a level prefix: {text!r}")
    lvl = Level(head)
    if level is not None and Level(level) is not lvl:
        raise LevelMismatch(f"expected level {Level(level).value}, got {lvl.value}")
    return Element(lvl, parse_value(tower.field(lvl), body))
