import random

import pytest

from mrc import errors as mrc_errors
from tower import errors as tower_errors
from tower.errors import DivisibilityViolation, DivisionByZero, LevelMismatch, NonPrime
from tower.galois import (
    FieldTower,
    GaloisField,
    PrimeField,
    arith,
    decompose,
    format_element,
    is_irreducible,
    parse_element,
    prime_power,
    primitive_element,
    recompose,
    smallest_irreducible,
    smallest_prime_power_above,
    tower_create,
)
from tower.models import Element, Level, Op


def test_prime_field_arithmetic():
    F = PrimeField(7)
    assert F.add(5, 4) == 2
    assert F.subtract(2, 5) == 4
    assert F.mul(3, 5) == 1
    assert F.inv(3) == 5
    assert F.pow(3, 6) == 1
    assert F.primitive_element() == 3


def test_prime_power_helpers():
    assert prime_power(9) == (3, 2)
    assert prime_power(12) is None
    assert smallest_prime_power_above(4) == 5
    assert smallest_prime_power_above(3) == 4
    assert smallest_prime_power_above(16, inclusive=True) == 16


def test_smallest_irreducible_over_f2():
    F = PrimeField(2)
    assert smallest_irreducible(F, 2) == (1, 1, 1)
    assert smallest_irreducible(F, 3) == (1, 0, 1, 1)
    assert not is_irreducible(F, (1, 0, 1))


def test_bad_towers():
    with pytest.raises(NonPrime):
        FieldTower(4, 1, 1, 1)
    with pytest.raises(DivisibilityViolation):
        FieldTower(2, 1, 2, 3)


def test_inverse_of_zero():
    tower = tower_create(2, 2, 3, 3)
    with pytest.raises(DivisionByZero):
        tower.mid.inv(0)


def test_tables_agree_with_polynomial_arithmetic():
    mid = tower_create(2, 2, 3, 3).mid
    assert mid.tabled and mid.order == 64
    for a in range(64):
        for b in range(64):
            assert mid.mul(a, b) == mid._mul_poly(a, b)


def test_zech_addition_odd_characteristic():
    mid = tower_create(3, 1, 2, 2).mid
    assert mid.order == 9
    for a in range(9):
        assert mid.add(a, mid.neg(a)) == 0
        for b in range(9):
            assert mid.add(a, b) == GaloisField.add(mid, a, b)


def test_field_axioms_small_extension():
    F = tower_create(5, 1, 2, 2).mid
    for a in range(1, F.order):
        assert F.mul(a, F.inv(a)) == 1
    for a, b, c in [(3, 7, 11), (24, 13, 2), (5, 5, 20)]:
        left = F.mul(a, F.add(b, c))
        right = F.add(F.mul(a, b), F.mul(a, c))
        assert left == right


def test_untabled_top_level():
    tower = tower_create(2, 2, 3, 12)
    top = tower.top
    assert not top.tabled
    rng = random.Random(7)
    for _ in range(20):
        a = rng.randrange(1, top.order)
        assert top.mul(a, top.inv(a)) == 1
        assert top.pow(a, 2) == top.mul(a, a)


def test_frobenius_fixes_subfield():
    tower = tower_create(2, 2, 3, 3)
    mid = tower.mid
    for a in range(mid.order):
        assert mid.pow(a, tower.stride(Level.MID)) == a
    for a in range(tower.q):
        assert mid.pow(a, tower.stride(Level.BASE)) == a


def test_embedding_keeps_values():
    tower = tower_create(2, 2, 2, 4)
    for a in range(4):
        for b in range(4):
            assert tower.top.mul(a, b) == tower.base.mul(a, b)
    result = arith(tower, Element(Level.BASE, 2), Element(Level.MID, 9), Op.MUL)
    assert result.level is Level.MID
    assert result.value == tower.mid.mul(2, 9)


def test_frobenius_levels():
    tower = tower_create(2, 2, 2, 4)
    x = Element(Level.TOP, 77)
    assert arith(tower, x, op=Op.FROBENIUS, level=Level.MID).value == tower.top.pow(77, 16)
    with pytest.raises(LevelMismatch):
        arith(tower, x, op=Op.FROBENIUS, level=Level.TOP)


def test_decompose_recompose():
    tower = tower_create(2, 2, 2, 4)
    e = Element(Level.TOP, 201)
    coords = decompose(tower, e, Level.MID)
    assert len(coords) == 2
    assert recompose(tower, coords, Level.MID, Level.TOP) == e


def test_element_text():
    tower = tower_create(2, 2, 2, 4)
    e = Element(Level.TOP, 201)
    text = format_element(tower, e)
    assert text.startswith("t:[")
    assert parse_element(tower, text) == e
    with pytest.raises(LevelMismatch):
        parse_element(tower, text, Level.MID)


def test_tower_pickles_by_key():
    import pickle

    tower = tower_create(2, 2, 3, 3)
    assert pickle.loads(pickle.dumps(tower)) is tower


@pytest.mark.parametrize("tower_args", [(2, 2, 3, 6), (3, 1, 2, 4), (2, 2, 3, 12)])
def test_field_axioms_random_triples(tower_args):
    tower = tower_create(*tower_args)
    rng = random.Random(3)
    for level in (Level.BASE, Level.MID, Level.TOP):
        F = tower.field(level)
        for _ in range(200):
            a, b, c = (rng.randrange(F.order) for _ in range(3))
            assert F.add(a, F.add(b, c)) == F.add(F.add(a, b), c)
            assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)


@pytest.mark.parametrize("tower_args", [(2, 2, 2, 4), (3, 1, 2, 4), (5, 1, 3, 3)])
def test_frobenius_is_additive_and_multiplicative(tower_args):
    tower = tower_create(*tower_args)
    top = tower.top
    rng = random.Random(5)

    def frob(x):
        return arith(tower, x, op=Op.FROBENIUS, level=Level.BASE)

    for _ in range(200):
        a = Element(Level.TOP, rng.randrange(top.order))
        b = Element(Level.TOP, rng.randrange(top.order))
        assert frob(arith(tower, a, b, Op.ADD)) == arith(tower, frob(a), frob(b), Op.ADD)
        assert frob(arith(tower, a, b, Op.MUL)) == arith(tower, frob(a), frob(b), Op.MUL)


def test_arith_inverse_and_power():
    tower = tower_create(3, 1, 2, 4)
    x = Element(Level.TOP, 17)
    inv = arith(tower, x, op=Op.INV)
    assert arith(tower, x, inv, Op.MUL) == Element(Level.TOP, 1)
    assert arith(tower, x, op=Op.POW, e=80) == Element(Level.TOP, 1)
    assert arith(tower, x, op=Op.POW, e=-1) == inv
    assert arith(tower, x, Element(Level.BASE, 0), Op.ADD) == x
    with pytest.raises(DivisionByZero):
        arith(tower, Element(Level.TOP, 0), op=Op.INV)
    with pytest.raises(ValueError):
        arith(tower, x, op=Op.POW)


@pytest.mark.parametrize("tower_args", [(2, 2, 2, 4), (3, 1, 1, 5), (5, 1, 5, 5), (2, 1, 3, 6)])
def test_decompose_roundtrip_all_elements(tower_args):
    tower = tower_create(*tower_args)
    for level in (Level.MID, Level.TOP):
        for target in (Level.BASE, Level.MID, Level.TOP):
            if target.rank > level.rank:
                continue
            for value in range(tower.field(level).order):
                e = Element(level, value)
                assert recompose(tower, decompose(tower, e, target), target, level) == e


def test_decompose_roundtrip_large_field():
    tower = tower_create(2, 2, 3, 12)
    rng = random.Random(13)
    for _ in range(1000):
        e = Element(Level.TOP, rng.randrange(tower.top.order))
        for target in (Level.BASE, Level.MID):
            assert recompose(tower, decompose(tower, e, target), target, Level.TOP) == e


@pytest.mark.parametrize("p, s", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (5, 1), (7, 1)])
def test_primitive_element_order(p, s):
    tower = tower_create(p, s, 1, 1)
    g = primitive_element(tower)
    F = tower.base
    assert all(F.pow(g.value, e) != 1 for e in range(1, F.order - 1))
    assert F.pow(g.value, F.order - 1) == 1


def test_primitive_element_examples():
    assert primitive_element(tower_create(5, 1, 1, 1)) == Element(Level.BASE, 2)
    gf4 = tower_create(2, 2, 1, 1)
    assert gf4.base.modulus == (1, 1, 1)
    # x 的整数编码是 2
    assert primitive_element(gf4) == Element(Level.BASE, 2)
    mid = tower_create(2, 1, 4, 4).mid
    g = primitive_element(tower_create(2, 1, 4, 4), Level.MID).value
    assert len({mid.pow(g, e) for e in range(15)}) == 15


def test_error_classes_are_documented():
    for module in (tower_errors, mrc_errors):
        for name, cls in vars(module).items():
            if isinstance(cls, type) and issubclass(cls, Exception) and cls.__module__ == module.__name__:
                assert cls.__doc__ and any("一" <= ch <= "鿿" for ch in cls.__doc__), name
