import pytest

from mrc.construct import zero_global_strip
from mrc.derive import derivation_log, hdl_from_hl, plan_drops
from mrc.errors import NotMR, UnsupportedCase
from mrc.models import Construction, Family
from mrc.verify import check_locality, min_distance


def test_plan_drops_hdl_source(hdl_source):
    drops, shortened, k_new = plan_drops(hdl_source)
    assert k_new == 2
    assert shortened == [10]
    assert drops[8] == (2, 1) and drops[9] == (2, 1)
    assert drops[10] == (3, 2)
    assert sorted(c for c, (step, _) in drops.items() if step == 1) == [11, 12, 14, 15, 16, 17, 18]


def test_derived_hdl_code(hdl_derived):
    assert hdl_derived.params.family is Family.HDL
    assert hdl_derived.params.construction is Construction.DERIVED
    assert hdl_derived.notes["kept"] == [1, 2, 3, 4, 5, 6, 7, 13]
    assert hdl_derived.groups.tail == (8,)
    assert min_distance(hdl_derived) == 5
    assert check_locality(hdl_derived, "middle_data_local_mrc").ok


def test_derivation_log(hdl_derived):
    lines = derivation_log(hdl_derived).splitlines()
    assert lines[0] == "source hl(k=3, r1=2, r2=1, h1=1, h2=1, delta=2)"
    assert lines[1] == "primary 1,4,10,13"
    assert "drop 10 step=3 group=2" in lines
    assert lines[-2] == "kept 1,2,3,4,5,6,7,13"
    assert lines[-1] == "result hdl(k=2, r1=2, r2=1, h1=1, h2=1, delta=2)"


def test_derive_with_existing_certificate(h1_two, h1_two_certificate):
    derived = hdl_from_hl(h1_two, h1_two_certificate)
    assert derived.n == 7
    assert derived.H.shape == (5, 7)
    assert derived.groups.tail == (6, 7)
    assert min_distance(derived) == 6


def test_derive_needs_r2_dividing_h2(hl16):
    with pytest.raises(UnsupportedCase):
        hdl_from_hl(hl16)


def test_derive_rejects_non_mr_source(hdl_source):
    with pytest.raises(NotMR):
        hdl_from_hl(zero_global_strip(hdl_source, 1))


def test_derive_rejects_hdl_input(hdl_derived):
    with pytest.raises(ValueError):
        hdl_from_hl(hdl_derived)
