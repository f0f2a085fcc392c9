import pytest

from tower.errors import DegreeCapExceeded
from tower.galois import tower_create
from tower.indep import (
    bch_parity_columns,
    cyclotomic_representatives,
    format_element_list,
    greedy_independent,
    independent_set,
    minimal_degree,
    parse_element_list,
)
from tower.matrix import kwise_independent
from tower.models import Level


def test_cyclotomic_representatives():
    assert cyclotomic_representatives(range(0, 6), 5, 24) == [0, 1, 2, 3, 4]
    assert cyclotomic_representatives(range(1, 3), 2, 7) == [1]


def test_bch_hamming_columns_over_f2():
    tower = tower_create(2, 1, 1, 1)
    result = bch_parity_columns(tower, Level.BASE, 7, 3)
    assert result.degree == 3
    assert sorted(result.values) == list(range(1, 8))


def test_bch_window_prefers_fewer_rows():
    tower = tower_create(5, 1, 1, 1)
    result = bch_parity_columns(tower, Level.BASE, 8, 7)
    assert result.degree == 9
    assert result.kwise == 6
    check = tower_create(5, 1, 9, 9)
    assert kwise_independent(result.values, 6, check, Level.BASE, level=Level.MID)


def test_independent_set_mid_level():
    tower = tower_create(2, 2, 1, 1)
    alphas = independent_set(tower, Level.BASE, 6, 4)
    assert alphas.degree == 6
    lambdas = independent_set(tower_create(2, 2, 6, 6), Level.MID, 12, 12)
    assert lambdas.degree == 12
    assert len(lambdas) == 12


def test_greedy_search():
    tower = tower_create(2, 1, 1, 1)
    result = greedy_independent(tower, Level.BASE, 3, 2)
    assert result.values == (1, 2, 3)
    assert result.degree == 2
    assert result.method == "greedy"
    assert minimal_degree(tower, Level.BASE, 3, 2, cap=4) == 2


def test_greedy_respects_cap():
    tower = tower_create(2, 1, 1, 1)
    with pytest.raises(DegreeCapExceeded):
        greedy_independent(tower, Level.BASE, 4, 3, degree_cap=2)


def test_element_list_text():
    tower = tower_create(2, 2, 3, 3)
    text = format_element_list(tower.mid, Level.MID, [1, 7, 63], 2, 4, 3)
    values, header = parse_element_list(tower.mid, Level.MID, text)
    assert values == [1, 7, 63]
    assert header == {"count": 3, "kwise": 2, "base_q": 4, "degree": 3}
    with pytest.raises(ValueError):
        parse_element_list(tower.mid, Level.BASE, text)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_greedy_degree_is_minimal_over_f2(k):
    tower = tower_create(2, 1, 1, 1)
    for n_needed in range(1, 7):
        found = greedy_independent(tower, Level.BASE, n_needed, k)
        assert found.degree == minimal_degree(tower, Level.BASE, n_needed, k, cap=6), n_needed
