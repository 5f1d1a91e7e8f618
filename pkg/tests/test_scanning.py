import numpy as np
import pytest

from lsinfer.core import DevSequence
from lsinfer.scanning import (CONFLICT, NESTING, UNDERRUN, UNSEEN, ScanError, ScanIndex,
                              lens_from_growth, scan_successors)


def test_scan_hand_example():
    rho = DevSequence.of(["AB", "ABA"])
    s = scan_successors(rho, {"A": 2, "B": 1})
    assert s.succ("A") == "AB" and s.succ("B") == "A"


def test_scan_identity():
    assert scan_successors(DevSequence.of(["A", "A"]), {"A": 1}).succ("A") == "A"


def test_scan_leftover():
    with pytest.raises(ScanError) as err:
        scan_successors(DevSequence.of(["AB", "ABA"]), {"A": 1, "B": 1})
    assert err.value.kind in (CONFLICT, UNDERRUN)


def test_scan_conflict_and_overrun():
    with pytest.raises(ScanError) as err:
        scan_successors(DevSequence.of(["AA", "ABAC"]), {"A": 2})
    assert err.value.kind == CONFLICT
    with pytest.raises(ScanError):
        scan_successors(DevSequence.of(["AA", "ABA"]), {"A": 2})


def test_scan_nesting_and_unseen():
    rho = DevSequence.of(["A", "]A["], "[]")
    with pytest.raises(ScanError) as err:
        scan_successors(rho, {"A": 3})
    assert err.value.kind == NESTING
    rho = DevSequence.of(["A", "AB"])
    with pytest.raises(ScanError) as err:
        scan_successors(rho, {"A": 2, "B": 1})
    assert err.value.kind == UNSEEN


def test_lens_from_growth():
    assert lens_from_growth([[1, 1], [1, 0]]).tolist() == [2, 1]
    assert lens_from_growth(np.eye(3, dtype=int)).tolist() == [1, 1, 1]
    with pytest.raises(ScanError):
        lens_from_growth([[1, 1], [0, 0]])
    with pytest.raises(ScanError):
        lens_from_growth([[1, -1], [1, 0]])


def test_scan_true_lengths_on_corpus(corpus):
    for system, rho in corpus[:60]:
        got = scan_successors(rho, system.lengths)
        assert got.successors == system.successors


def test_scan_index_matches_strict_scan(corpus):
    for system, rho in corpus[:60]:
        assert ScanIndex(rho).read(system.lengths) == system.successors


def test_scan_index_unseen():
    idx = ScanIndex(DevSequence.of(["A", "AB"]))
    assert idx.unseen() == ["B"]
    assert idx.read([1, 1]) is None
