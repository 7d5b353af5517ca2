import pytest
from hypothesis import given

from monodt.boolfn import TruthTable, alternation, candidate_fn, is_monotone, is_uniform_alternation, parity, threshold
from monodt.decomp import (
    DecompositionError,
    MonotoneDecomposition,
    alternation_decomposition,
    format_decomposition,
    four_forms,
    four_forms_check,
    implication_holds,
    parse_decomposition,
    threshold_interleaved_decomposition,
    uniform_chain_decomposition,
    verify_decomposition,
    xor_all,
)

from conftest import all_tables, tables, tt

AND2, OR2, XOR2 = tt(2, "0001"), tt(2, "0111"), tt(2, "0110")


def test_xor2_alternation_decomposition():
    d = alternation_decomposition(XOR2)
    assert d.components == (AND2, OR2)
    assert verify_decomposition(XOR2, d).ok


def test_constant_one_gets_single_component():
    f = TruthTable.const(3, 1)
    d = alternation_decomposition(f)
    assert d.components == (f,)
    assert verify_decomposition(f, d).ok


def test_candidate_decomposition_length():
    f = candidate_fn(4)
    d = alternation_decomposition(f)
    assert len(d) == 4 and verify_decomposition(f, d).ok


@given(tables())
def test_alternation_decomposition_properties(f):
    d = alternation_decomposition(f)
    rep = verify_decomposition(f, d)
    assert rep.ok
    assert len(d) == alternation(f) + f(0)


def test_report_flags_bad_decomposition():
    rep = verify_decomposition(XOR2, MonotoneDecomposition((OR2, AND2), XOR2))
    assert rep.xor_equals_target and not rep.implication_holds and not rep.ok
    rep = verify_decomposition(XOR2, MonotoneDecomposition((XOR2,), XOR2))
    assert not rep.all_monotone


def test_threshold_interleaved_xor2():
    d = threshold_interleaved_decomposition(XOR2)
    assert len(d) == 5
    assert xor_all(d.components, 2) == XOR2
    assert implication_holds(d.components)


@pytest.mark.parametrize("n", range(0, 4))
def test_threshold_interleaved_exhaustive(n):
    for f in all_tables(n):
        d = threshold_interleaved_decomposition(f)
        assert len(d) == 2 * n + 1
        assert d.xor() == f and implication_holds(d.components)
        assert all(is_monotone(c) for c in d.components)


def test_uniform_chain_matches_on_parity():
    for n in range(1, 6):
        f = parity(n)
        assert uniform_chain_decomposition(f).components == alternation_decomposition(f).components


def test_uniform_chain_rejects_nonuniform():
    with pytest.raises(DecompositionError):
        uniform_chain_decomposition(tt(2, "0100"))


@pytest.mark.parametrize("n", range(0, 5))
def test_uniqueness_under_uniform_alternation(n):
    for f in all_tables(n):
        if is_uniform_alternation(f):
            assert uniform_chain_decomposition(f).components == alternation_decomposition(f).components


def test_four_forms_xor2():
    forms = four_forms([AND2, OR2], 2)
    assert all(form == XOR2 for form in forms)


@given(tables())
def test_four_forms_agree(f):
    assert four_forms_check(alternation_decomposition(f))
    forms = four_forms(alternation_decomposition(f).padded_even().components, f.n)
    assert forms[0] == f


def test_four_forms_reject_broken_chain():
    with pytest.raises(DecompositionError):
        four_forms_check(MonotoneDecomposition((OR2, AND2), XOR2))
    with pytest.raises(DecompositionError):
        four_forms([AND2], 2)


@given(tables())
def test_file_round_trip(f):
    d = alternation_decomposition(f)
    text = format_decomposition(d)
    back = parse_decomposition(text)
    assert back == d
    assert format_decomposition(back) == text


def test_file_layout():
    text = format_decomposition(alternation_decomposition(XOR2))
    assert text == "n=2 m=2 dir=asc\n8\ne\n6\n"
    with pytest.raises(ValueError):
        parse_decomposition("n=2 m=3 dir=asc\n8\ne\n6\n")


def test_threshold_parts_are_thresholds_on_even_positions():
    f = candidate_fn(4)
    d = threshold_interleaved_decomposition(f)
    # stored ascending; every other part starting from the second is Th_k
    for j, k in zip(range(1, 9, 2), range(4, 0, -1)):
        assert d.components[j] == threshold(4, k)
