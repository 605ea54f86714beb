import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nrbeam.sequences import (
    CellIdentity,
    dmrs_cinit,
    dmrs_sequence,
    gold_c,
    pci_compose,
    pss_sequence,
    sss_bank,
    sss_sequence,
)
from oracles import naive_gold


@pytest.mark.parametrize("nid1,nid2,pci", [(0, 0, 0), (100, 1, 301), (335, 2, 1007)])
def test_pci_compose(nid1, nid2, pci):
    cell = pci_compose(nid1, nid2)
    assert cell.nid_cell == pci
    assert cell.v == pci % 4
    assert CellIdentity.from_pci(pci) == cell


@pytest.mark.parametrize("nid1,nid2", [(-1, 0), (336, 0), (0, 3), (0, -1)])
def test_pci_compose_range(nid1, nid2):
    with pytest.raises(ValueError):
        pci_compose(nid1, nid2)


def test_gold_first_bits_match_oracle():
    assert np.array_equal(gold_c(1, 8), naive_gold(1, 8))


def test_gold_zero_seed_is_x1_stream():
    n = 500
    x1 = [1] + [0] * 30
    for k in range(n + 1600):
        x1.append((x1[k + 3] + x1[k]) % 2)
    assert np.array_equal(gold_c(0, n), np.array(x1[1600:1600 + n], dtype=np.uint8))


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_gold_prefix_determinism(c_init):
    assert np.array_equal(gold_c(c_init, 1000)[:100], gold_c(c_init, 100))


def test_gold_bad_length():
    with pytest.raises(ValueError):
        gold_c(1, 0)


def test_dmrs_cinit_examples():
    assert dmrs_cinit(0, 0) == 2112
    assert dmrs_cinit(7, 7) == 33283
    # arbitrary precision evaluation
    assert dmrs_cinit(3, 500) == 2**11 * 4 * (500 // 4 + 1) + 2**6 * 4 + 500 % 4


def test_dmrs_cinit_errors():
    with pytest.raises(ValueError):
        dmrs_cinit(-1, 0)
    with pytest.raises(ValueError):
        dmrs_cinit(0, -3)
    with pytest.raises(ValueError):
        dmrs_cinit(8, 0, lmax=8)


def test_dmrs_cinit_low_bits_for_larger_lmax():
    assert dmrs_cinit(9, 5, lmax=64) == dmrs_cinit(1, 5, lmax=8)


def test_dmrs_cinit_injective():
    seen = {dmrs_cinit(i, n) for i in range(8) for n in range(1008)}
    assert len(seen) == 8 * 1008


def test_dmrs_alphabet():
    s = dmrs_sequence(5, CellIdentity(77, 1))
    assert s.shape == (144,)
    assert np.allclose(np.abs(s.real), 1 / np.sqrt(2))
    assert np.allclose(np.abs(s.imag), 1 / np.sqrt(2))
    assert np.allclose(np.abs(s), 1.0)


def test_dmrs_matches_oracle_bits():
    c = naive_gold(2112, 288).astype(int)
    expected = ((1 - 2 * c[0::2]) + 1j * (1 - 2 * c[1::2])) / np.sqrt(2)
    assert np.allclose(dmrs_sequence(0, CellIdentity(0, 0)), expected, atol=0)


@pytest.mark.parametrize("pci", [0, 1, 2, 3, 301, 555, 1007])
def test_dmrs_pairwise_distinct(pci):
    cell = CellIdentity.from_pci(pci)
    seqs = [dmrs_sequence(i, cell) for i in range(8)]
    for a, b in itertools.combinations(range(8), 2):
        assert np.any(seqs[a] != seqs[b])


def test_dmrs_deterministic():
    cell = CellIdentity(12, 2)
    assert np.array_equal(dmrs_sequence(3, cell), dmrs_sequence(3, cell).copy())


def test_pss_properties():
    seqs = [pss_sequence(k) for k in range(3)]
    for s in seqs:
        assert set(np.unique(s)) == {-1.0, 1.0}
        assert np.sum(s**2) == 127
    assert np.array_equal(seqs[1], np.roll(seqs[0], -43))
    # The three sequences are cyclic shifts of one m-sequence, so the periodic
    # cross-correlation reaches 127 at exactly one lag (the shift) and is -1 elsewhere.
    for (ia, a), (ib, b) in itertools.combinations(enumerate(seqs), 2):
        xc = np.array([np.dot(a, np.roll(b, lag)) for lag in range(127)])
        shift = (43 * (ib - ia)) % 127
        assert abs(xc[0]) < 127
        assert xc[shift] == 127
        assert np.all(np.delete(xc, shift) == -1)
    # and the autocorrelation peak is only at lag 0
    for s in seqs:
        auto = [abs(np.dot(s, np.roll(s, lag))) for lag in range(127)]
        assert auto[0] == 127 and max(auto[1:]) < 127


def test_pss_range():
    with pytest.raises(ValueError):
        pss_sequence(3)


def test_pss_first_values():
    # x(0..6) = 0,1,1,0,1,1,1 gives d(0..6) = 1,-1,-1,1,-1,-1,-1
    assert list(pss_sequence(0)[:7]) == [1, -1, -1, 1, -1, -1, -1]


def test_sss_properties():
    for nid2 in range(3):
        bank = sss_bank(nid2)
        assert bank.shape == (336, 127)
        assert np.all(np.sum(bank**2, axis=1) == 127)
        assert len({row.tobytes() for row in bank}) == 336


@pytest.mark.parametrize("nid2", [0, 1, 2])
def test_sss_matched_filter_argmax(nid2):
    bank = sss_bank(nid2)
    for nid1 in range(336):
        corr = bank @ sss_sequence(nid1, nid2)
        assert int(np.argmax(corr)) == nid1


def test_sss_range():
    with pytest.raises(ValueError):
        sss_sequence(336, 0)
    with pytest.raises(ValueError):
        sss_sequence(0, 3)
