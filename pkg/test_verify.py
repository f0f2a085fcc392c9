import dataclasses
import itertools
import random

import pytest

from mrc.construct import corrupt_local_column
from mrc.errors import NotCorrectable
from mrc.layout import enumerate_admissible_E, enumerate_patterns, pattern_footprint
from mrc.models import Certificate, Family
from mrc.verify import (
    bound_sweep,
    check_locality,
    correctable,
    encode,
    generator_matrix,
    is_mr,
    min_distance_of,
    puncture,
    recover,
    syndrome,
)
from tower.galois import tower_create
from tower.matrix import MatrixF
from tower.models import Level


def test_hl16_is_mr(hl16_certificate):
    assert hl16_certificate.passed
    assert hl16_certificate.checks == 13824
    assert hl16_certificate.format() == "verdict=pass checks=13824"


def test_parallel_certificate_matches(hl16, hl16_certificate):
    assert is_mr(hl16, workers=2, timing=False) == hl16_certificate


def test_stripped_instance_fails_with_stable_witness(hl16_stripped):
    serial = is_mr(hl16_stripped, workers=1, timing=False)
    parallel = is_mr(hl16_stripped, workers=2, timing=False)
    assert not serial.passed
    assert serial.witness_E == (1, 2, 5, 9, 10, 13)
    assert serial.witness_T == (1,)
    assert (parallel.witness_E, parallel.witness_T) == (serial.witness_E, serial.witness_T)
    assert serial.format() == "verdict=fail E=1,2,5,9,10,13 T=1"


def test_puncture_on_middle_group(hl16):
    A = hl16.groups.A[0]
    Hp = puncture(hl16.H, A)
    assert Hp.shape == (5, 8)
    assert min_distance_of(Hp) == 4


def test_min_distance_of_local_block():
    H = MatrixF.build(tower_create(5, 1, 1, 1), Level.BASE, [[1, 1, 1, 1], [0, 2, 4, 3]])
    assert min_distance_of(H) == 3
    assert min_distance_of(H, cap=2) is None


def test_locality_hl16(hl16):
    report = check_locality(hl16, "middle_local_mrc")
    assert report.ok, report.details
    assert report.format().startswith("level=middle_local_mrc ok=true\n")
    assert check_locality(hl16, "hierarchical").ok
    with pytest.raises(ValueError):
        check_locality(hl16, "middle_data_local_mrc")
    with pytest.raises(ValueError):
        check_locality(hl16, "flat")


def test_locality_detects_broken_local_code(hl16):
    broken = corrupt_local_column(hl16, 1, 1, 1, 2)
    report = check_locality(broken, "middle_local_mrc")
    assert not report.ok
    assert report.failed_group == 1


def test_generator_is_systematic(hl16):
    G, positions = generator_matrix(hl16)
    assert G.shape == (5, 16)
    assert len(positions) == 5
    message = [1, 2, 3, 4, 0]
    word = encode(hl16, message, G)
    assert [word[p - 1] for p in positions] == message
    assert not any(syndrome(hl16, word))


def test_recover_admissible_erasures(hl16):
    G, _ = generator_matrix(hl16)
    word = encode(hl16, [3, 0, 1, 4, 2], G)
    for E in itertools.islice(enumerate_admissible_E(hl16.params), 5):
        erased = set(range(1, 17)) - set(E) | {E[0]}
        assert correctable(hl16, sorted(erased))
        received = [None if j + 1 in erased else x for j, x in enumerate(word)]
        assert recover(hl16, received) == word


def test_recover_rejects_bad_input(hl16):
    G, _ = generator_matrix(hl16)
    word = encode(hl16, [1, 1, 0, 0, 2], G)
    with pytest.raises(NotCorrectable):
        recover(hl16, [None] * 12 + word[12:])
    F = hl16.H.field
    tampered = [None, F.add(word[1], 1)] + word[2:]
    with pytest.raises(NotCorrectable):
        recover(hl16, tampered)
    with pytest.raises(ValueError):
        recover(hl16, word[:-1])


def test_h1_two_is_mr(h1_two_certificate):
    assert h1_two_certificate.passed


def test_small_sweep_never_beats_the_bound():
    rows = bound_sweep(3, Family.HL)
    assert rows
    assert all(row.status != "violation" for row in rows)
    trivial = next(row for row in rows if row.params.n == 1)
    assert (trivial.distance, trivial.bound, trivial.status) == (1, 1, "meets")


@pytest.mark.parametrize("family, max_n", [(Family.HL, 4), (Family.HDL, 5)])
def test_sweep_respects_the_bound(family, max_n):
    rows = bound_sweep(max_n, family)
    assert rows
    assert not [row.format() for row in rows if row.status == "violation"]
    if family is Family.HDL:
        assert all(row.status in ("meets", "skipped") for row in rows)
        assert any(row.status == "meets" for row in rows)


@pytest.mark.slow
@pytest.mark.parametrize("family", [Family.HL, Family.HDL])
def test_sweep_respects_the_bound_up_to_length_8(family):
    rows = bound_sweep(8, family)
    assert not [row.format() for row in rows if row.status == "violation"]


def test_certificate_line_parses_back(hl16_certificate):
    assert Certificate.parse(hl16_certificate.format()) == hl16_certificate
    failed = Certificate.parse("verdict=fail E=1,2,5,9,10,13 T=1\n")
    assert not failed.passed
    assert (failed.witness_E, failed.witness_T) == ((1, 2, 5, 9, 10, 13), (1,))
    assert Certificate.parse("verdict=pass checks=7 millis=12").millis == 12
    for line in ("verdict=maybe", "checks=3", "garbage", "verdict=pass checks=x"):
        with pytest.raises(ValueError):
            Certificate.parse(line)


def _without_row(instance, i):
    H = instance.H
    rows = H.rows[:i] + H.rows[i + 1:]
    return dataclasses.replace(instance, H=MatrixF(instance.tower, H.level, rows, H.ncols))


def test_dropping_a_parity_row_never_passes(hl16, hl16_stripped):
    for instance in (hl16, hl16_stripped):
        for i in range(instance.H.nrows):
            assert not is_mr(_without_row(instance, i), workers=1, timing=False).passed, i


def test_extended_patterns_are_correctable(hdl_derived, hdl_source):
    for pattern in enumerate_patterns(hdl_derived.params, with_extra=True):
        assert correctable(hdl_derived, pattern_footprint(hdl_derived.params, pattern))
    patterns = list(enumerate_patterns(hdl_source.params, with_extra=True))
    for pattern in random.Random(23).sample(patterns, 300):
        assert correctable(hdl_source, pattern_footprint(hdl_source.params, pattern))


def test_recover_random_correctable_erasures(hl16):
    G, _ = generator_matrix(hl16)
    F = hl16.H.field
    admissible = list(enumerate_admissible_E(hl16.params))
    rng = random.Random(29)
    for _ in range(500):
        E = rng.choice(admissible)
        # h1 = 1：E 的补加上 E 中任一位置是最大可恢复擦除
        full = [c for c in range(1, hl16.n + 1) if c not in E] + [rng.choice(E)]
        erased = set(rng.sample(full, rng.randint(1, len(full))))
        assert correctable(hl16, sorted(erased))
        word = encode(hl16, [rng.randrange(F.order) for _ in range(hl16.k)], G)
        received = [None if j + 1 in erased else x for j, x in enumerate(word)]
        assert recover(hl16, received) == word


def test_hdl_row_below_the_bound_is_a_violation(monkeypatch):
    monkeypatch.setattr("mrc.verify.min_distance", lambda instance, cap=None: 0)
    hdl = [row for row in bound_sweep(3, Family.HDL) if row.status != "skipped"]
    assert hdl
    assert all((row.status, row.note) == ("violation", "HDL code below the bound") for row in hdl)
    hl = bound_sweep(2, Family.HL)
    assert all(row.status == "below" for row in hl if row.status != "skipped")


def test_parallel_window_refills_in_order(monkeypatch, hl16, hl16_certificate, hl16_stripped):
    monkeypatch.setattr("mrc.verify.CHUNK_SIZE", 50)
    monkeypatch.setattr("mrc.verify.IN_FLIGHT", 1)
    assert is_mr(hl16, workers=2, timing=False) == hl16_certificate
    failed = is_mr(hl16_stripped, workers=2, timing=False)
    assert (failed.witness_E, failed.witness_T) == ((1, 2, 5, 9, 10, 13), (1,))
