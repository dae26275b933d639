import doctest

import pytest
from hypothesis import given
from hypothesis import strategies as st

import ssforge.coefficients as coefficients
from ssforge.coefficients import (
    TWO,
    ZERO,
    CatalogError,
    CyclicModule,
    Kind,
    RingContext,
    catalog,
    mod2,
    mult_kernel_cokernel,
    pair_kernel_cokernel,
    pontryagin_dual,
    qz,
    witt,
)
from ssforge.oracles import basis, dual_basis, map_kernel_cokernel, truncation_depth

HEIGHTS = (1, 2, 3)


def generators(n):
    return [TWO] + list(range(1, n + 1))


def same_up_to_translation(S, ref):
    """S equals ref up to a translation of the monomial lattice.

    Principal ideals (2W, u_j F[[B]]) are catalogued as the ring itself and
    W/2^oo modulo its socle as W/2^oo, so a computed basis may be a translate
    of the catalog basis.  Directions running to -oo are aligned at their
    top, the others at their bottom; the comparison drops the part of ref
    that the translate cannot reach inside the box.
    """
    if S == ref:
        return True
    if not S or not ref:
        return False
    dims = len(next(iter(S)))
    lo = [min(y[i] for y in ref) for i in range(dims)]
    hi = [max(y[i] for y in ref) for i in range(dims)]
    delta = []
    for i in range(dims):
        if hi[i] < 0:
            delta.append(max(x[i] for x in S) - hi[i])
        else:
            delta.append(min(x[i] for x in S) - lo[i])
    moved = {tuple(a - d for a, d in zip(x, delta)) for x in S}
    boxed = {y for y in ref if all(lo[i] <= y[i] + delta[i] <= hi[i] for i in range(dims))}
    return moved == boxed


def test_doctests():
    assert doctest.testmod(coefficients).failed == 0


def test_ring_context():
    ctx = RingContext(3)
    assert ctx.q == 8
    assert ctx.variables == (1, 2)
    assert ctx.is_unit(3) and not ctx.is_unit(2)
    with pytest.raises(ValueError):
        RingContext(0)


def test_catalog_sizes_without_extensions():
    # Each variable is divided, surviving or frozen; W and QZ need no Laurent set.
    assert len(catalog(1, laurent=False, extended=False)) == 4
    assert len(catalog(2, laurent=False, extended=False)) == 1 + 3 + 2 + 2


def test_invalid_descriptors():
    with pytest.raises(CatalogError):
        CyclicModule(Kind.WITT, divided=frozenset({1}))
    with pytest.raises(CatalogError):
        CyclicModule(Kind.MOD2, divided=frozenset({1}), surviving=frozenset({1}))
    with pytest.raises(CatalogError):
        mult_kernel_cokernel(witt({1}), 5, 2)


def test_principal_ideal_normalizes():
    assert mod2((), {1, 2}, (), {1}) == mod2((), {1, 2})
    assert witt({1}, ()) == witt({1})


def test_describe_and_json():
    for n in HEIGHTS:
        for m in catalog(n):
            assert CyclicModule.from_json(m.to_json()) == m
            assert isinstance(m.describe(), str)
    assert witt({1}, {1}).describe() == "(2,u1)W[[u1]]"
    assert qz({1}).describe() == "W/2^oo[u1^-]"


@pytest.mark.parametrize("n", HEIGHTS)
def test_catalog_closed_under_multiplication(n):
    cat = set(catalog(n))
    for m in cat:
        for g in generators(n):
            try:
                ker, coker = mult_kernel_cokernel(m, g, n)
            except CatalogError:
                continue
            assert ker in cat and coker in cat, (m.describe(), g)


@given(st.sampled_from(HEIGHTS), st.data())
def test_catalog_closed_under_pair_maps(n, data):
    cat = catalog(n)
    src = data.draw(st.sampled_from(cat))
    tgt = data.draw(st.sampled_from(cat))
    g = data.draw(st.sampled_from(generators(n)))
    try:
        ker, coker = pair_kernel_cokernel(src, tgt, g, n)
    except CatalogError:
        return
    assert ker in cat and coker in cat


def _slice_base(m, g):
    base = m.divided | m.ideal if m.kind is Kind.QZ else m.divided
    return base


@pytest.mark.parametrize("n", HEIGHTS)
def test_rule_table_matches_truncated_models(n):
    depth = min(truncation_depth(), 5 if n == 3 else 8)
    checked = 0
    for m in catalog(n):
        if m.zero:
            continue
        for g in generators(n):
            try:
                ker, coker = mult_kernel_cokernel(m, g, n)
            except CatalogError:
                continue
            base = _slice_base(m, g)
            K, C = map_kernel_cokernel(m, m, g, n, depth, base)
            level = -1 if m.kind is Kind.QZ else 0
            kbase = base | ({g} if g in m.divided else set())
            assert same_up_to_translation(K, basis(ker, n, depth, kbase, level)), (m.describe(), g)
            assert C == basis(coker, n, depth, base), (m.describe(), g)
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("n", HEIGHTS)
def test_pair_rules_match_truncated_models(n):
    depth = 4
    checked = 0
    for src in catalog(n):
        for tgt in catalog(n):
            if src.zero or tgt.zero or src == tgt:
                continue
            for g in generators(n):
                try:
                    ker, coker = pair_kernel_cokernel(src, tgt, g, n)
                except CatalogError:
                    continue
                base = tgt.divided | tgt.ideal if tgt.kind is Kind.QZ else tgt.divided
                K, C = map_kernel_cokernel(src, tgt, g, n, depth, base)
                kbase = base | ({g} if g in src.divided else set())
                assert same_up_to_translation(K, basis(ker, n, depth, kbase)), (
                    src.describe(),
                    tgt.describe(),
                    g,
                )
                assert same_up_to_translation(C, basis(coker, n, depth, base)), (
                    src.describe(),
                    tgt.describe(),
                    g,
                )
                checked += 1
    assert checked > 0


@given(st.sampled_from(HEIGHTS), st.data())
def test_dual_is_an_involution(n, data):
    m = data.draw(st.sampled_from([m for m in catalog(n) if not (m.kind is Kind.MOD2 and m.ideal)]))
    assert pontryagin_dual(pontryagin_dual(m)) == m


@given(st.sampled_from(HEIGHTS), st.data())
def test_dual_matches_residue_pairing(n, data):
    """x lies in m exactly when its residue partner lies in the dual.

    Frozen variables pair exponent 0 with -1, so the dual freezes them at -1.
    """
    from itertools import product

    from ssforge.oracles import contains

    m = data.draw(
        st.sampled_from([m for m in catalog(n) if not m.zero and not (m.kind is Kind.MOD2 and m.ideal)])
    )
    dm = pontryagin_dual(m)
    frozen = frozenset(range(1, n)) - m.variables()
    keep_two = m.kind is Kind.MOD2
    base = m.divided | m.ideal if m.kind is Kind.QZ else frozenset()
    dbase = frozen | (dm.divided | dm.ideal if dm.kind is Kind.QZ else frozenset())
    box = range(-4, 5)
    for x in product(box, repeat=n):
        (y,) = dual_basis([x], keep_two)
        assert contains(m, x, base) == contains(dm, y, dbase), (m.describe(), x)


def test_witt_and_qz_are_dual():
    assert pontryagin_dual(witt({1})) == qz({1})
    assert pontryagin_dual(witt({1, 2}, {2})) == qz({1, 2}, {2})
    assert pontryagin_dual(ZERO) == ZERO
    with pytest.raises(CatalogError):
        pontryagin_dual(mod2((), {1, 2}, (), {1, 2}))


@pytest.mark.parametrize("n", (2, 3))
def test_fiber_sequence_coefficients_are_short_exact(n):
    """0 -> X -> Y -> Z -> 0 on truncated bases of the Tate E_2 coefficients."""
    from ssforge.pages import Window
    from ssforge.presets import PresetId, build

    depth = 4
    ctx = RingContext(n)
    w = Window((0, 8), (0, 4))
    for k in range(1, n):
        X = build(PresetId.TATE_EN_MOD_IK, ctx, w, k=k)[0]
        Y = build(PresetId.TATE_VKINV, ctx, w, k=k)[0]
        Z = build(PresetId.TATE_EN_MOD_IK, ctx, w, k=k + 1)[0]
        (mx,) = {s.module for _, s in X.summands()}
        (my,) = {s.module for _, s in Y.summands()}
        (mz,) = {s.module for _, s in Z.summands()}
        bx = basis(mx, n, depth, X.base_divided)
        by = basis(my, n, depth, Y.base_divided)
        bz = basis(mz, n, depth, Z.base_divided)
        assert bx <= by
        assert by - bx == bz


def test_two_to_the_infinity_sequence_is_short_exact():
    """0 -> W -> W[1/2] -> W/2^oo -> 0 on the 2-adic coordinate."""
    depth = 5
    w = basis(witt(), 1, depth)
    q = basis(qz(), 1, depth)
    laurent = {(v,) for v in range(-depth, depth + 1)}
    assert w | q == laurent and not w & q
