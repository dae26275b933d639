"""Finite truncation models of catalog modules.

A module is modeled by its monomial basis: vectors ``(v, e_1, ..., e_{n-1})``
where ``v`` is the 2-adic coordinate (``2^v`` for v >= 0, ``1/2^{-v}`` for
v < 0) and ``e_i`` the exponent of u_i.  Every map used on pages sends basis
monomials to basis monomials or to zero, so kernels and cokernels are sets.

These models never consult the rule table; they are used to check it.
"""

from __future__ import annotations

import os
from itertools import product

from .coefficients import TWO, CyclicModule, Kind

DEFAULT_DEPTH = 6


def truncation_depth() -> int:
    """Oracle depth, overridable through ``SSFORGE_TRUNCATION_DEPTH``."""
    raw = os.environ.get("SSFORGE_TRUNCATION_DEPTH")
    if raw is None:
        return DEFAULT_DEPTH
    depth = int(raw)
    if depth < 2:
        raise ValueError("truncation depth must be at least 2")
    return depth


def frozen_exponent(i: int, base_divided) -> int:
    return -1 if i in base_divided else 0


def contains(m: CyclicModule, vec: tuple[int, ...], base_divided=frozenset()) -> bool:
    """Exact (untruncated) membership of a basis monomial."""
    if m.zero:
        return False
    v, exps = vec[0], vec[1:]
    for i, e in enumerate(exps, start=1):
        if i in m.divided:
            ok = e <= -1
        elif i in m.surviving:
            ok = e >= 0
        elif i in m.laurent:
            ok = True
        else:
            ok = e == frozen_exponent(i, base_divided)
        if not ok:
            return False
    if m.kind is Kind.WITT:
        if v < 0:
            return False
        if m.ideal:
            return v >= 1 or any(exps[j - 1] >= 1 for j in m.ideal)
        return True
    if m.kind is Kind.MOD2:
        if m.ideal:
            return v == 0 and any(exps[j - 1] >= 1 for j in m.ideal)
        return v == 0
    if v > -1:
        return False
    if m.ideal:
        return not (v == -1 and all(exps[j - 1] == -1 for j in m.ideal))
    return True


def basis(m: CyclicModule, n: int, depth: int, base_divided=frozenset(), level: int = 0) -> frozenset:
    """All basis monomials whose coordinates fit in ``depth``.

    A 2-torsion module sits at 2-adic coordinate ``level``; use -1 when it is
    viewed inside a 2-divided module.
    """
    if m.zero:
        return frozenset()
    ranges = []
    if m.kind is Kind.WITT:
        ranges.append(range(0, depth + 1))
    elif m.kind is Kind.MOD2:
        ranges.append(range(level, level + 1))
    else:
        ranges.append(range(-depth, 0))
    for i in range(1, n):
        if i in m.divided:
            ranges.append(range(-depth, 0))
        elif i in m.surviving:
            ranges.append(range(0, depth + 1))
        elif i in m.laurent:
            ranges.append(range(-depth, depth + 1))
        else:
            f = frozen_exponent(i, base_divided)
            ranges.append(range(f, f + 1))
    if m.kind is not Kind.MOD2:
        level = 0
    return frozenset(
        x for x in product(*ranges) if contains(m, (x[0] - level,) + x[1:], base_divided)
    )


def multiply(vec: tuple[int, ...], g, n: int) -> tuple[int, ...]:
    if g == TWO:
        return (vec[0] + 1,) + vec[1:]
    if g == n:
        return vec
    out = list(vec)
    out[g] += 1
    return tuple(out)


def map_kernel_cokernel(src, tgt, g, n, depth, base_divided=frozenset()):
    """Kernel and cokernel of ``src -> tgt``, x -> g*x, as basis sets.

    The kernel is read off a depth-``depth`` source; the image is taken from a
    source one step deeper so the cokernel at depth ``depth`` is exact.
    """

    shift = -1 if src.kind is Kind.MOD2 and tgt.kind is Kind.QZ else 0

    def image(x):
        y = multiply(x, g, n)
        y = (y[0] + shift,) + y[1:]
        return y if contains(tgt, y, base_divided) else None

    kernel = frozenset(x for x in basis(src, n, depth, base_divided) if image(x) is None)
    hit = {image(x) for x in basis(src, n, depth + 1, base_divided)}
    cokernel = frozenset(y for y in basis(tgt, n, depth, base_divided) if y not in hit)
    return kernel, cokernel


def dual_basis(vecs, keep_two: bool) -> frozenset:
    """Residue pairing: u^e pairs with u^{-e-1}.

    The 2-adic coordinate pairs the same way (2^v with 2^{-v-1}) unless
    ``keep_two`` is set, for 2-torsion modules where F_q is its own dual.
    """
    return frozenset(
        (x[0] if keep_two else -x[0] - 1,) + tuple(-e - 1 for e in x[1:]) for x in vecs
    )
