import pytest

from ssforge.analysis import (
    einf_page,
    exotic_ledger,
    find_gap,
    gh_shift,
    longest_differential_trace,
    periodicity,
    periodicity_lower_bound,
    shift_by_gap,
    shift_by_pattern,
    stem_profile,
    witness_classes,
    zero_stems,
)
from ssforge.pages import EngineError, Window
from ssforge.presets import PresetId


@pytest.mark.parametrize("n, residue", [(1, 5), (2, 13), (3, 29), (4, 61)])
def test_gap(n, residue):
    report = find_gap(n)
    assert report.residues == (residue,)
    assert report.witnesses and all(w.survives for w in report.witnesses)


def test_witness_lines_start_where_expected():
    stems = {}
    for j, i, exps in witness_classes(2):
        stems.setdefault(j, []).append(exps[0] + 2 * exps[1])
    assert stems[1] == [1, 2, 3, 4, 5, 6]
    assert stems[2] == [9, 10]


def test_n2_einf_has_the_gap_and_stem_zero_square():
    p = einf_page(PresetId.HFPSS_EN, 2, Window((0, 17), (0, 9)))
    assert zero_stems(p, [13, 14, 15]) == [13, 14, 15]
    (s,) = p.cell(0, 0)
    assert s.module.describe() == "W[[u1]]"


@pytest.mark.parametrize("n", (1, 2, 3))
def test_periodicity(n):
    report = periodicity(n)
    assert report.periodic and report.permanent
    assert periodicity_lower_bound(n) == 2 ** (n + 2)


@pytest.mark.parametrize("n", (1, 2, 3))
def test_shift_methods_agree(n):
    assert shift_by_gap(n) == shift_by_pattern(n) == [4 + n]
    report = gh_shift(n, "both")
    assert report.shift == 4 + n and report.mod4_ok


def test_gh_shift_method_validation():
    with pytest.raises(ValueError):
        gh_shift(1, "other")
    assert gh_shift(1, "gap").candidates == {"gap": (5,)}


def test_stem_profile_ignores_labels():
    p = einf_page(PresetId.HFPSS_EN, 1)
    profile = stem_profile(p)
    assert profile[0][0][0] == 0


@pytest.mark.parametrize("n", (1, 2, 3, 4))
def test_longest_differential_trace(n):
    trace = longest_differential_trace(n)
    stems = [s for _, s, _ in trace]
    assert stems[0] == 2 ** (n + 1)
    assert [b - a for a, b in zip(stems, stems[1:])] == [2**k for k in range(1, n + 1)]
    assert stems[-1] == 2 ** (n + 2) - 2
    assert trace[-1][2] == (2 ** (n + 2) - 3, 2 ** (n + 1) - 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_exotic_ledger(n):
    report = exotic_ledger(n, shift=4 + n)
    assert report.delta == 2 * n + 3 + (-1) ** n
    assert report.delta % 2 ** (n + 2) != 0
    assert report.delta % 2 == 0


def test_exotic_ledger_sources():
    assert exotic_ledger(1).twist == 4 and exotic_ledger(1).gh_source == "computed"
    assert exotic_ledger(5).gh_source == "declared"
    with pytest.raises(EngineError):
        exotic_ledger(1, shift=1)
