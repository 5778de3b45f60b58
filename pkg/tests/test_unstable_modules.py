import random

import numpy as np
import pytest

from unstable_e2 import steenrod as st
from unstable_e2.unstable_modules import (
    FTUnstableModule,
    GradedVS,
    ModWindow,
    act_free,
    admissible_words_b,
    exactness_report,
    free_a_basis,
    free_b_basis_window,
    one_minus_p0_window,
    quotient_q_window,
)

from oracles import brute_force_admissible


def test_free_a_basis_examples():
    g = [("x", 1)]
    assert free_a_basis(g, 2) == ((((0, 1),), "x"),)
    assert free_a_basis(g, 3) == ()
    assert free_a_basis(g, 4) == ((((0, 2), (0, 1)), "x"),)


def test_free_a_dims_against_brute_force():
    for n in (1, 2, 3):
        for d in range(n, 13):
            fast = free_a_basis([("x", n)], d)
            slow = brute_force_admissible(2, d - n, n)
            assert len(fast) == len(slow), (n, d)
            assert sorted(w for w, _ in fast) == slow


def test_free_b_window_examples():
    w = ModWindow(D=8, L=2, K=2)
    b = free_b_basis_window([("x", 3)], 3, w)
    names = [wd for wd, _ in b]
    assert () in names and ((0, 0),) in names and ((0, 0), (0, 0)) in names
    assert free_b_basis_window([], 5, w) == ()
    w0 = ModWindow(D=8, L=0, K=2)
    assert free_b_basis_window([("x", 3)], 3, w0) == (((), "x"),)


def test_window_monotone():
    # enlarging the window only adds basis elements
    small = set(admissible_words_b(2, 0, 2, 3, 2))
    for L, K in ((4, 2), (3, 3), (4, 4)):
        big = set(admissible_words_b(2, 0, 2, L, K))
        assert small <= big


def test_act_free_examples():
    gd = {"x": 1}
    elt = {(((0, 1),), "x"): 1}
    assert act_free(2, st.FLAVOR_A, st.OpElement.from_word([1], 2), elt, gd) == {}
    assert act_free(2, st.FLAVOR_A, st.OpElement.from_word([2], 2), {((), "x"): 1}, gd) == {}
    assert act_free(2, st.FLAVOR_A, st.OpElement.unit(2), elt, gd) == elt


def test_act_composition():
    # act(a, act(b, e)) = act(multiply(a, b), e)
    random.seed(31)
    gd = {"x": 3}
    for _ in range(40):
        a = st.OpElement.from_word([random.randint(1, 4)], 2)
        b = st.OpElement.from_word([random.randint(1, 4)], 2)
        e = {((), "x"): 1}
        inner = act_free(2, st.FLAVOR_A, b, e, gd)
        lhs = act_free(2, st.FLAVOR_A, a, inner, gd)
        rhs = act_free(2, st.FLAVOR_A, st.multiply(a, b), e, gd)
        assert lhs == rhs


def test_one_minus_p0_generator_row():
    w = ModWindow(D=4, L=4, K=4)
    V = GradedVS.single(2, 1)
    M, src, tgt = one_minus_p0_window(V, w, 1)
    jx = src.index(((), "x"))
    assert M[tgt.index(((), "x")), jx] == 1
    assert M[tgt.index((((0, 0),), "x")), jx] == 1  # -1 mod 2


def test_one_minus_p0_empty():
    w = ModWindow(D=4, L=4, K=4)
    M, src, tgt = one_minus_p0_window(GradedVS(2, {}), w, 2)
    assert M.shape == (0, 0)


def test_q_examples():
    w = ModWindow(D=4, L=4, K=4)
    V = GradedVS.single(2, 1)
    Q, src, f0 = quotient_q_window(V, w, 1, length_cap=5)
    # x -> x and Sq0 x -> x
    jx = src.index(((), "x"))
    j0x = src.index((((0, 0),), "x"))
    ix = f0.index(((), "x"))
    assert Q[ix, jx] == 1 and Q[ix, j0x] == 1
    # negative-index words die
    Q2, src2, f02 = quotient_q_window(GradedVS.single(2, 2), w, 2, length_cap=4)
    for j, (wd, g) in enumerate(src2):
        if any(s < 0 for _, s in wd):
            assert not Q2[:, j].any()


def test_q_after_one_minus_p0_is_zero():
    w = ModWindow(D=5, L=4, K=4)
    V = GradedVS.single(2, 2)
    for d in range(0, 6):
        M, src, tgt = one_minus_p0_window(V, w, d)
        Q, srcq, f0 = quotient_q_window(V, w, d, length_cap=w.L + 1)
        assert srcq == tgt
        if len(src) and len(f0):
            assert not ((Q @ M) % 2).any(), d


def test_exactness_report_example():
    V = GradedVS.single(2, 1)
    rep = exactness_report(V, ModWindow(D=4, L=4, K=4))
    assert rep["pass"]
    assert [rep["degrees"][d]["stabilized_coker"] for d in (1, 2, 3, 4)] == [1, 1, 0, 1]


def test_exactness_vacuous_for_zero_module():
    rep = exactness_report(GradedVS(2, {}), ModWindow(D=3, L=3, K=3))
    assert rep["pass"]


def test_exactness_degenerate_window():
    rep = exactness_report(GradedVS.single(2, 1), ModWindow(D=2, L=0, K=2))
    for d, cell in rep["degrees"].items():
        assert cell["injective"] and cell["q_composite_zero"]
        assert not cell["saturated"]


def _sample_module():
    return FTUnstableModule(
        2, 4,
        {1: ("x",), 2: ("x2",), 3: ("x3",), 4: ("x4",)},
        {
            (0, 1): {"x": {"x2": 1}, "x2": {}, "x3": {"x4": 1}},
            (0, 2): {"x2": {"x4": 1}},
        },
    )


def test_ft_module_roundtrip_bit_exact():
    m = _sample_module()
    text = m.to_text()
    again = FTUnstableModule.from_text(text)
    assert again.to_text() == text


def test_ft_module_validate_catches_adem_violation():
    good = _sample_module()
    assert good.validate() == []
    bad = FTUnstableModule(
        2, 4,
        {1: ("x",), 2: ("x2",), 3: ("x3",)},
        {(0, 1): {"x": {"x2": 1}, "x2": {"x3": 1}}},  # Sq1 Sq1 x != 0
    )
    assert any(kind == "adem" for kind, *_ in bad.validate())


def test_ft_module_validate_catches_instability():
    bad = FTUnstableModule(2, 4, {1: ("x",), 4: ("y",)}, {(0, 3): {"x": {"y": 1}}})
    assert any(kind == "instability" for kind, *_ in bad.validate())


def test_window_matrix_entries_stable():
    # enlarging the window appends rows/columns without rewriting old entries
    V = GradedVS.single(2, 2)
    w = ModWindow(D=5, L=3, K=3)
    M1, src1, tgt1 = one_minus_p0_window(V, w, 2, length_cap=3)
    M2, src2, tgt2 = one_minus_p0_window(V, w, 2, length_cap=4)
    rows2 = {b: i for i, b in enumerate(tgt2)}
    cols2 = {b: i for i, b in enumerate(src2)}
    for j, b in enumerate(src1):
        for i, t in enumerate(tgt1):
            assert M1[i, j] == M2[rows2[t], cols2[b]]


def test_act_free_flavor_b():
    gd = {"x": 2}
    w = ModWindow(D=6, L=3, K=3)
    p0 = st.OpElement(2, st.FLAVOR_B, {((0, 0),): 1})
    out = act_free(2, st.FLAVOR_B, p0, {((), "x"): 1}, gd, window=w.rewrite_window())
    assert out == {(((0, 0),), "x"): 1}
    # negative operation below the excess cap acts as a basis shift
    m1 = st.OpElement(2, st.FLAVOR_B, {((0, -1),): 1})
    out = act_free(2, st.FLAVOR_B, m1, {((), "x"): 1}, gd, window=w.rewrite_window())
    assert out == {(((0, -1),), "x"): 1}


def test_module_classes():
    from unstable_e2.unstable_modules import FreeAModule, FreeBModuleWindow

    F1 = FreeAModule(2, [("x", 1)], 6)
    assert F1.basis(4) == ((((0, 2), (0, 1)), "x"),)
    assert F1.act(st.OpElement.from_word([1], 2), {(((0, 1),), "x"): 1}) == {}
    with pytest.raises(ValueError):
        F1.basis(7)
    FB = FreeBModuleWindow(2, [("x", 2)], ModWindow(D=6, L=2, K=2))
    names = [w for w, _ in FB.basis(2)]
    assert ((0, 0),) in names
    p0 = st.OpElement(2, st.FLAVOR_B, {((0, 0),): 1})
    assert FB.act(p0, {((), "x"): 1}) == {(((0, 0),), "x"): 1}


def test_saturation_reached_within_l_equals_d_plus_two():
    # empirical bound: single-generator windows saturate by L = D + 2 at p = 2
    for n in (1, 2):
        for D in (4, 6):
            rep = exactness_report(GradedVS.single(2, n), ModWindow(D=D, L=D + 2, K=D))
            assert rep["pass"], (n, D)
            assert all(c["saturated"] for c in rep["degrees"].values()), (n, D)


def test_exactness_odd_prime():
    for n in (1, 2):
        rep = exactness_report(GradedVS.single(3, n), ModWindow(D=5, L=5, K=4), p=3)
        assert rep["pass"], n
