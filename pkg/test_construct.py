import itertools
import random

import pytest

from mrc.construct import (
    assemble_H,
    build_M0,
    build_moore,
    choose_parameters,
    corrupt_local_column,
    hl_params_for_hdl,
    reduction_trace,
)
from mrc.errors import FieldTooSmall, ShapeMismatch, UnsupportedCase, WrongH1
from mrc.layout import enumerate_patterns, format_pattern, parse_pattern
from mrc.models import Construction, Family, hdl_params, hl_params
from tower.galois import tower_create
from tower.matrix import MatrixF, kwise_independent, rank, restrict
from tower.models import Level

PATTERN = "D[1][1]=1,2; D[1][2]=1,2; G[1]=3; D[2][1]=3,4; D[2][2]=2,4; G[2]=1"


def test_M0_example():
    M0 = build_M0(tower_create(5, 1, 1, 1), 4, 2)
    assert M0.rows == ((1, 1, 1, 1), (0, 2, 4, 3))


def test_M0_needs_enough_points():
    with pytest.raises(FieldTooSmall):
        build_M0(tower_create(2, 1, 1, 1), 3, 1)


def test_moore_rows():
    tower = tower_create(2, 1, 2, 2)
    M = build_moore(tower, Level.MID, [1, 2, 3], 2, Level.BASE)
    assert M.rows == ((1, 2, 3), (1, 3, 2))


def test_hl16_h1_one_parameters(hl16):
    tower = hl16.tower
    assert (tower.q, tower.m1, tower.m) == (5, 9, 9)
    assert hl16.H.shape == (11, 16)
    assert hl16.H.rows[0][:4] == (1, 1, 1, 1)
    assert hl16.H.rows[1][:4] == (0, 2, 4, 3)
    assert hl16.H.rows[0][4:] == (0,) * 12
    assert hl16.alpha_kwise == 6
    assert hl16.params.construction is Construction.H1_ONE


def test_general_construction_degrees():
    choice = choose_parameters(hl_params(5, 3, 2, 1, 1, 2))
    assert choice.q == 5
    assert choice.tower.m1 == 5
    assert choice.tower.m == 30
    assert choice.lambda_set.kwise == 6


def test_h1_two_parameters(h1_two):
    tower = h1_two.tower
    assert (tower.q, tower.m1, tower.m) == (4, 6, 72)
    assert h1_two.H.shape == (10, 12)
    assert len(h1_two.lambdas) == 2


def test_strict_q_uses_code_length():
    choice = choose_parameters(hl_params(1, 1, 1, 0, 1, 1), strict_q=True)
    assert choice.q == 4
    with pytest.raises(FieldTooSmall):
        choose_parameters(hl_params(1, 1, 1, 0, 1, 1, q=2), strict_q=True)
    with pytest.raises(ValueError):
        choose_parameters(hl_params(1, 1, 1, 0, 1, 1, q=6))


def test_wrong_h1_and_shapes():
    with pytest.raises(WrongH1):
        choose_parameters(hl_params(2, 2, 2, 2, 2, 1), Construction.H1_ONE)
    params = hl_params(1, 1, 1, 0, 1, 0)
    tower = tower_create(2, 1, 1, 1)
    with pytest.raises(ShapeMismatch):
        assemble_H(params, tower, build_M0(tower, 1, 0), ((1,),), ())


def test_hl_params_for_hdl():
    source = hl_params_for_hdl(hdl_params(2, 2, 1, 1, 1, 2))
    assert source.family is Family.HL
    assert (source.k, source.r1, source.r2, source.h1, source.h2, source.delta) == (3, 2, 1, 1, 1, 2)
    assert hl_params_for_hdl(hdl_params(2, 2, 2, 2, 2, 1)).k == 2
    with pytest.raises(UnsupportedCase):
        hl_params_for_hdl(hdl_params(2, 2, 2, 1, 1, 1))


def test_hdl_construction_goes_through_derivation(hdl_derived):
    instance = hdl_derived
    assert instance.params.family is Family.HDL
    assert instance.construction is Construction.DERIVED
    assert instance.n == 8
    assert instance.H.shape == (6, 8)


def test_zero_global_strip(hl16, hl16_stripped):
    last = hl16_stripped.H.rows[-1]
    assert last[:8] == (0,) * 8
    assert last[8:] == hl16.H.rows[-1][8:]
    assert hl16_stripped.H.rows[:-1] == hl16.H.rows[:-1]


def test_corrupt_local_column(hl16):
    broken = corrupt_local_column(hl16, 1, 1, 1, 2)
    assert broken.H.rows[0][:4] == (1, 1, 1, 1)
    assert broken.H.rows[1][:4] == (0, 0, 4, 3)
    with pytest.raises(ValueError):
        corrupt_local_column(hl16, 1, 1, 2, 2)


def test_reduction_trace_hl16(hl16):
    trace = reduction_trace(hl16, parse_pattern(hl16.params, PATTERN))
    assert trace.verdict, trace.reason
    assert len(trace.L) == 4
    assert trace.L[(1, 1)].shape == (2, 2)
    assert [len(psi) for psi in trace.psi] == [4, 4]
    assert all(F.shape == (1, 4) for F in trace.F)
    assert all(Z.shape == (1, 3) for Z in trace.Z)
    assert len(trace.theta) == 6


def test_reduction_trace_rejects_derived(hdl_derived):
    with pytest.raises(ValueError):
        reduction_trace(hdl_derived, None)


@pytest.mark.parametrize("tower_args", [(2, 1, 4, 4), (3, 1, 2, 2)])
def test_moore_minors_match_independence(tower_args):
    tower = tower_create(*tower_args)
    rng = random.Random(11)
    order = tower.mid.order
    for _ in range(100):
        k = rng.choice((2, 3))
        values = [rng.randrange(order) for _ in range(6)]
        M = build_moore(tower, Level.MID, values, k, Level.BASE)
        mds = all(rank(restrict(M, cols)) == k for cols in itertools.combinations(range(1, 7), k))
        independent = kwise_independent(values, k, tower, Level.BASE, level=Level.MID)
        assert mds == bool(independent), values


def test_element_grids_are_certified(hl16, h1_two):
    flat = [x for row in hl16.alphas for x in row]
    assert kwise_independent(flat, 6, hl16.tower, Level.BASE, level=Level.MID)
    tower = h1_two.tower
    alphas = [x for row in h1_two.alphas for x in row]
    assert kwise_independent(alphas, 4, tower, Level.BASE, level=Level.MID)
    lambdas = [x for grid in h1_two.lambdas for row in grid for x in row]
    assert len(lambdas) == 12
    assert kwise_independent(lambdas, 12, tower, Level.MID, level=Level.TOP)


def test_frobenius_commutes_with_base_matrices():
    tower = tower_create(3, 1, 4, 4)
    mid, q = tower.mid, tower.q
    rng = random.Random(31)
    for _ in range(50):
        nrows, ncols = rng.randint(1, 4), rng.randint(1, 4)
        L = MatrixF.build(tower, Level.BASE, [[rng.randrange(q) for _ in range(ncols)] for _ in range(nrows)])
        v = [rng.randrange(mid.order) for _ in range(nrows)]
        left = [mid.pow(x, q) for x in (MatrixF.build(tower, Level.MID, [v]) @ L).rows[0]]
        right = (MatrixF.build(tower, Level.MID, [[mid.pow(x, q) for x in v]]) @ L).rows[0]
        assert left == list(right)


def test_reduction_trace_on_every_pattern(hdl_source):
    for pattern in enumerate_patterns(hdl_source.params):
        trace = reduction_trace(hdl_source, pattern)
        assert trace.verdict, (format_pattern(pattern), trace.reason)


def test_reduction_trace_on_sampled_patterns(hl16):
    patterns = list(enumerate_patterns(hl16.params))
    for pattern in random.Random(37).sample(patterns, 200):
        trace = reduction_trace(hl16, pattern)
        assert trace.verdict, (format_pattern(pattern), trace.reason)
