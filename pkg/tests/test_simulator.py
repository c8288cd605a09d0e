import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lrfhss.core import SequenceSet, TransmissionSet, generate_sequences, make_rng
from lrfhss.simulator import (
    CollisionMap,
    InvalidHorizonError,
    ObservedMatrix,
    generate_traffic,
    observe,
    occupancy,
)

from .oracles import naive_render


@pytest.fixture(scope="module")
def seqs512():
    return generate_sequences(512, 35, 90, seed=1)


def test_generate_traffic_empty(seqs512):
    tx = generate_traffic(0, seqs512, 1000, 30, seed=1)
    assert len(tx) == 0


def test_generate_traffic_default_bounds(seqs512):
    tx = generate_traffic(3300, seqs512, 1000, 90, seed=1)
    assert len(tx) == 3300
    assert tx.t.min() >= 1 and tx.t.max() <= 911
    assert tx.s.min() >= 0 and tx.s.max() < 512
    assert np.all(tx.p == 90)


def test_generate_traffic_start_uniform(seqs512):
    # chi-square over 10 equal bins of [1, 991], many frames for power
    tx = generate_traffic(20_000, seqs512, 1000, 10, seed=5)
    assert tx.t.min() >= 1 and tx.t.max() <= 991
    hist, _ = np.histogram(tx.t, bins=np.linspace(1, 992, 11))
    assert stats.chisquare(hist).pvalue > 1e-4


def test_generate_traffic_small_uniform(seqs512):
    tx = generate_traffic(100, seqs512, 1000, 10, seed=5)
    hist, _ = np.histogram(tx.t, bins=np.linspace(1, 992, 5))
    assert stats.chisquare(hist).pvalue > 1e-4


def test_generate_traffic_horizon_error(seqs512):
    with pytest.raises(InvalidHorizonError):
        generate_traffic(5, seqs512, 20, 30, seed=0)
    with pytest.raises(ValueError):
        generate_traffic(5, seqs512, 1000, 91, seed=0)


def test_generate_traffic_deterministic(seqs512):
    a = generate_traffic(500, seqs512, 1000, 30, seed=8)
    b = generate_traffic(500, seqs512, 1000, 30, seed=8)
    c = generate_traffic(500, seqs512, 1000, 30, seed=make_rng(8))
    assert a == b == c


def test_observe_empty():
    seqs = SequenceSet(np.array([[0, 1, 2]]), 4, 0)
    M, cmap = observe(TransmissionSet(), seqs, 4, 4)
    assert not M.bits.any()
    assert cmap.counts.sum() == 0


def test_observe_single_frame():
    seqs = SequenceSet(np.array([[0, 1, 2]]), 4, 0)
    M, cmap = observe(TransmissionSet.from_items([(0, 1, 3)]), seqs, 4, 4)
    # 1-based (t, c): (1,0), (2,1), (3,2)
    assert set(zip(*(x.tolist() for x in np.nonzero(M.bits)))) == {(0, 0), (1, 1), (2, 2)}
    assert cmap.counts.sum() == 3


def test_observe_duplicate_frames():
    seqs = SequenceSet(np.array([[0, 1, 2]]), 4, 0)
    M1, c1 = observe(TransmissionSet.from_items([(0, 2, 3)]), seqs, 4, 4)
    M2, c2 = observe(TransmissionSet.from_items([(0, 2, 3), (0, 2, 3)]), seqs, 4, 4)
    assert M1 == M2
    assert np.array_equal(c2.counts, 2 * c1.counts)


def test_observe_out_of_range():
    seqs = SequenceSet(np.array([[0, 1, 2]]), 4, 0)
    with pytest.raises(IndexError):
        observe(TransmissionSet.from_items([(0, 3, 3)]), seqs, 4, 4)
    with pytest.raises(IndexError):
        observe(TransmissionSet.from_items([(1, 1, 3)]), seqs, 4, 4)


def test_observe_matches_naive(seqs512):
    tx = generate_traffic(300, seqs512, 200, 20, seed=4)
    M, cmap = observe(tx, seqs512, 200, 35)
    ref = np.array(naive_render(list(tx), seqs512.hops.tolist(), 200, 35))
    assert np.array_equal(cmap.counts, ref)
    assert np.array_equal(M.bits, ref >= 1)


def test_conservation_and_consistency(seqs512):
    for F, P in ((0, 10), (700, 10), (2000, 50)):
        tx = generate_traffic(F, seqs512, 1000, P, seed=F)
        M, cmap = observe(tx, seqs512, 1000, 35)
        assert cmap.counts.sum() == F * P
        assert np.array_equal(M.bits, cmap.counts >= 1)


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10**6), f1=st.integers(0, 200), f2=st.integers(0, 200))
def test_superposition(seed, f1, f2):
    seqs = generate_sequences(16, 8, 12, seed=seed)
    a = generate_traffic(f1, seqs, 60, 12, seed=seed + 1)
    b = generate_traffic(f2, seqs, 60, 12, seed=seed + 2)
    _, ca = observe(a, seqs, 60, 8)
    _, cb = observe(b, seqs, 60, 8)
    _, cab = observe(a + b, seqs, 60, 8)
    assert np.array_equal(cab.counts, ca.counts + cb.counts)


def test_occupancy():
    assert occupancy(ObservedMatrix.empty(10, 35)) == 0
    seqs = generate_sequences(4, 35, 10, seed=0)
    M, _ = observe(TransmissionSet.from_items([(2, 5, 10)]), seqs, 1000, 35)
    assert occupancy(M) == 10 / 35000


def test_occupancy_landmark(seqs512):
    # C*T fragments thrown uniformly fill about 1 - 1/e of the matrix
    occ = []
    for run in range(5):
        tx = generate_traffic(3500, seqs512, 1000, 10, seed=run)
        M, _ = observe(tx, seqs512, 1000, 35)
        occ.append(occupancy(M))
    ref = 1 - (1 - 1 / 35000) ** 35000
    assert np.mean(occ) == pytest.approx(ref, abs=0.03)


def test_matrix_text_golden(tmp_path):
    M = ObservedMatrix(np.array([[1, 0, 0], [0, 1, 1]], dtype=bool))
    assert M.dumps() == "LRFHSS-M1 2 3\n100\n011\n"
    assert ObservedMatrix.loads(M.dumps()) == M
    path = tmp_path / "m.txt"
    M.save(path)
    assert ObservedMatrix.load(path) == M


@pytest.mark.parametrize("text", ["", "LRFHSS-M1 2 3\n100\n", "LRFHSS-M1 1 3\n1x0\n", "2 3\n100\n011\n"])
def test_matrix_text_rejects_malformed(text):
    with pytest.raises(ValueError):
        ObservedMatrix.loads(text)


def test_cells_csv_golden():
    cmap = CollisionMap(np.array([[0, 2], [1, 0]]))
    assert cmap.dumps_cells() == "t,c,count\n1,1,2\n2,0,1\n"


def test_columns_iterates_in_slot_order():
    M = ObservedMatrix(np.eye(3, dtype=bool))
    cols = list(M.columns())
    assert [t for t, _ in cols] == [1, 2, 3]
    assert np.array_equal(cols[1][1], [False, True, False])
