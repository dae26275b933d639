"""Coefficient modules for page cells and their multiplication rules.

Every cell of every page in this package carries one module from a small
closed catalog.  Variables are indexed ``1..n-1``; ``u_n`` is the unit 1.

``WITT(B)``
    W(F_q)[[u_j : j in B]].  With a non-empty ``ideal`` J it denotes the
    ideal (2, u_j : j in J) of that ring (J is a subset of B).
``MOD2(A, B, L)``
    F_q-span of monomials with u_i^{-a} (a >= 1) for i in A, u_j^{b}
    (b >= 0) for j in B and arbitrary exponents for the Laurent set L.  A
    non-empty ``ideal`` J (a subset of B with at least two elements, A and L
    empty) denotes the ideal (u_j : j in J) of F_q[[B]].
``QZ(A)``
    The 2-divided module W/2^oo tensored with the divided powers in A.  A
    non-empty ``ideal`` J here is a co-ideal: the quotient of QZ(A) by its
    socle slice QZ(A)[2, u_j : j in J].

Variables outside A, B and L are frozen at a single exponent, which the
page records (-1 for variables that started out divided, 0 otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

TWO = "2"
Generator = Union[str, int]


class CatalogError(ValueError):
    """Raised when an operation would leave the catalog."""


class Kind(str, Enum):
    WITT = "WITT"
    MOD2 = "MOD2"
    QZ = "QZ"


@dataclass(frozen=True)
class RingContext:
    """Height ``n`` and the ring W(F_q)[[u_1, ..., u_{n-1}]] with q = 2^n."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError(f"height must be a positive integer, got {self.n!r}")

    @property
    def q(self) -> int:
        return 2**self.n

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(range(1, self.n))

    def is_unit(self, l: int) -> bool:
        return l == self.n


def _fs(xs: Iterable[int]) -> frozenset[int]:
    return frozenset(int(x) for x in xs)


@dataclass(frozen=True)
class CyclicModule:
    kind: Kind
    divided: frozenset[int] = frozenset()
    surviving: frozenset[int] = frozenset()
    laurent: frozenset[int] = frozenset()
    ideal: frozenset[int] = frozenset()
    zero: bool = False

    def __post_init__(self):
        for name in ("divided", "surviving", "laurent", "ideal"):
            object.__setattr__(self, name, _fs(getattr(self, name)))
        object.__setattr__(self, "kind", Kind(self.kind))
        a, b, l = self.divided, self.surviving, self.laurent
        if (a & b) or (a & l) or (b & l):
            raise CatalogError(f"variable sets overlap: A={sorted(a)} B={sorted(b)} L={sorted(l)}")
        if any(x < 1 for x in a | b | l | self.ideal):
            raise CatalogError("variable indices start at 1")
        if self.zero:
            if self.kind is not Kind.MOD2 or a or b or l or self.ideal:
                raise CatalogError("the zero module carries no data")
            return
        if self.kind is Kind.WITT:
            if a or l:
                raise CatalogError("WITT modules carry no divided or Laurent variables")
            if not self.ideal <= b:
                raise CatalogError("WITT ideal must use surviving variables")
        elif self.kind is Kind.QZ:
            if b or l:
                raise CatalogError("QZ modules carry only divided variables")
            if not self.ideal <= a:
                raise CatalogError("QZ co-ideal must use divided variables")
        elif self.ideal:
            if a or l or not self.ideal <= b or len(self.ideal) < 2:
                raise CatalogError("MOD2 ideals use at least two surviving variables")

    @property
    def is_zero(self) -> bool:
        return self.zero

    def variables(self) -> frozenset[int]:
        return self.divided | self.surviving | self.laurent

    def sort_key(self) -> tuple:
        return (
            self.zero,
            self.kind.value,
            tuple(sorted(self.divided)),
            tuple(sorted(self.surviving)),
            tuple(sorted(self.laurent)),
            tuple(sorted(self.ideal)),
        )

    def describe(self) -> str:
        """Short human-readable form, e.g. ``W[[u1]]`` or ``F[u1^-][[u2]]``."""
        if self.zero:
            return "0"

        def names(xs):
            return ",".join(f"u{i}" for i in sorted(xs))

        base = {"WITT": "W", "MOD2": "F", "QZ": "W/2^oo"}[self.kind.value]
        lead = "(2," if self.kind is Kind.WITT else "("
        s = base
        if self.divided:
            s += f"[{names(self.divided)}^-]"
        if self.laurent:
            s += f"[{names(self.laurent)}^+-]"
        if self.surviving:
            s += f"[[{names(self.surviving)}]]"
        if self.ideal:
            if self.kind is Kind.QZ:
                s = f"{s}/[2,{names(self.ideal)}]"
            else:
                s = f"{lead}{names(self.ideal)}){s}"
        return s

    def to_json(self) -> dict:
        d = {
            "kind": self.kind.value,
            "divided": sorted(self.divided),
            "surviving": sorted(self.surviving),
        }
        if self.laurent:
            d["laurent"] = sorted(self.laurent)
        if self.ideal:
            d["ideal"] = sorted(self.ideal)
        if self.zero:
            d["zero"] = True
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CyclicModule":
        return cls(
            Kind(d["kind"]),
            _fs(d.get("divided", ())),
            _fs(d.get("surviving", ())),
            _fs(d.get("laurent", ())),
            _fs(d.get("ideal", ())),
            bool(d.get("zero", False)),
        )


ZERO = CyclicModule(Kind.MOD2, zero=True)


def witt(surviving=(), ideal=()) -> CyclicModule:
    return CyclicModule(Kind.WITT, surviving=_fs(surviving), ideal=_fs(ideal))


def mod2(divided=(), surviving=(), laurent=(), ideal=()) -> CyclicModule:
    """MOD2 module; a principal ideal (one generator) is returned as the plain module."""
    ideal = _fs(ideal)
    if len(ideal) < 2:
        ideal = frozenset()
    return CyclicModule(Kind.MOD2, _fs(divided), _fs(surviving), _fs(laurent), ideal)


def qz(divided=(), coideal=()) -> CyclicModule:
    return CyclicModule(Kind.QZ, divided=_fs(divided), ideal=_fs(coideal))


def _check_generator(g: Generator, n: int):
    if g == TWO:
        return
    if not isinstance(g, int) or isinstance(g, bool) or not 1 <= g <= n:
        raise CatalogError(f"unknown generator {g!r} at height {n}")


def mult_kernel_cokernel(
    m: CyclicModule, g: Generator, n: int, integral: bool = False
) -> tuple[CyclicModule, CyclicModule]:
    """Kernel and cokernel of multiplication by ``g`` on ``m``.

    ``g`` is ``TWO`` or an index ``l`` in ``1..n`` standing for u_l, with
    u_n = 1.  ``integral=True`` asserts that the map should be integral, so
    multiplying a 2-torsion module by 2 is reported as an error.

    >>> mult_kernel_cokernel(witt({1}), TWO, 2)[1].describe()
    'F[[u1]]'
    >>> [x.describe() for x in mult_kernel_cokernel(mod2({1}, {2}), 1, 3)]
    ['F[[u2]]', '0']
    """
    _check_generator(g, n)
    if m.zero:
        return ZERO, ZERO
    if m.ideal and m.kind is Kind.MOD2 and g != TWO and g != n and g in m.surviving:
        raise CatalogError(f"u{g} on {m.describe()} leaves the catalog")
    if g == TWO:
        if m.kind is Kind.WITT:
            if m.ideal:
                raise CatalogError(f"2 on {m.describe()} leaves the catalog")
            return ZERO, mod2((), m.surviving)
        if m.kind is Kind.QZ:
            if m.ideal:
                raise CatalogError(f"2 on {m.describe()} leaves the catalog")
            return mod2(m.divided, ()), ZERO
        if integral:
            raise CatalogError(f"integral differential multiplies 2-torsion {m.describe()} by 2")
        return m, m
    if g == n or g in m.laurent:
        return ZERO, ZERO
    if g in m.surviving:
        if m.kind is Kind.WITT:
            if m.ideal:
                raise CatalogError(f"u{g} on {m.describe()} leaves the catalog")
            return ZERO, witt(m.surviving - {g})
        return ZERO, mod2(m.divided, m.surviving - {g}, m.laurent)
    if g in m.divided:
        if m.kind is Kind.QZ:
            if m.ideal:
                raise CatalogError(f"u{g} on {m.describe()} leaves the catalog")
            return qz(m.divided - {g}), ZERO
        return mod2(m.divided - {g}, m.surviving, m.laurent), ZERO
    return m, m


def pair_kernel_cokernel(
    src: CyclicModule, tgt: CyclicModule, g: Generator, n: int
) -> tuple[CyclicModule, CyclicModule]:
    """Kernel and cokernel of ``src -> tgt``: reduce into ``tgt``, then multiply by ``g``.

    Equal descriptors reduce to :func:`mult_kernel_cokernel`.  Three other
    shapes occur on the pages built here:

    * ``WITT(B) -> MOD2(0, B')`` with B' inside B, the reduction modulo
      (2, u_j : j not in B');
    * ``MOD2(0, B) -> MOD2(0, B')`` with B' inside B, the reduction modulo
      (u_j : j not in B'); a principal kernel is isomorphic to the source;
    * ``MOD2(A', 0) -> QZ(A)`` with A' inside A, the inclusion of the socle
      slice into the 2-divided module.
    """
    _check_generator(g, n)
    if src.zero or tgt.zero:
        raise CatalogError("differentials never involve the zero module")
    if src == tgt:
        return mult_kernel_cokernel(src, g, n)
    if (
        src.kind is Kind.WITT
        and not src.ideal
        and tgt.kind is Kind.MOD2
        and not tgt.divided
        and not tgt.laurent
        and not tgt.ideal
        and tgt.surviving <= src.surviving
    ):
        reduced = witt(src.surviving, src.surviving - tgt.surviving)
        if g == TWO:
            return src, tgt
        if g == n:
            return reduced, ZERO
        if g in tgt.surviving:
            return reduced, mod2((), tgt.surviving - {g})
        return src, tgt
    if (
        src.kind is Kind.MOD2
        and tgt.kind is Kind.MOD2
        and not src.divided
        and not tgt.divided
        and not src.laurent
        and not tgt.laurent
        and not src.ideal
        and not tgt.ideal
        and tgt.surviving < src.surviving
    ):
        if g == TWO or (g != n and g not in tgt.surviving):
            return src, tgt
        kernel = mod2((), src.surviving, (), src.surviving - tgt.surviving)
        if g == n:
            return kernel, ZERO
        return kernel, mod2((), tgt.surviving - {g})
    if (
        src.kind is Kind.MOD2
        and not src.surviving
        and not src.laurent
        and tgt.kind is Kind.QZ
        and not tgt.ideal
        and src.divided <= tgt.divided
    ):
        image = qz(tgt.divided, tgt.divided - src.divided)
        if g == TWO:
            return src, tgt
        if g == n:
            return ZERO, image
        if g in src.divided:
            return mod2(src.divided - {g}, ()), image
        return src, tgt
    raise CatalogError(f"no catalog rule for {src.describe()} -> {tgt.describe()} under {g}")


def pontryagin_dual(m: CyclicModule) -> CyclicModule:
    """Continuous dual.  Divided and surviving variables trade places.

    ``QZ(A)`` with co-ideal J and the ideal (2, u_J) of W[[A]] are dual to
    each other.
    """
    if m.zero:
        return ZERO
    if m.kind is Kind.MOD2:
        if m.ideal:
            raise CatalogError(f"cannot dualize ideal {m.describe()}")
        return mod2(m.surviving, m.divided, m.laurent)
    if m.kind is Kind.QZ:
        return witt(m.divided, m.ideal)
    return qz(m.surviving, m.ideal)


def catalog(n: int, laurent: bool = True, extended: bool = True) -> list[CyclicModule]:
    """Every descriptor of the catalog at height ``n``, zero included."""
    from itertools import product

    vs = range(1, n)
    out = [ZERO]
    for roles in product(range(4 if laurent else 3), repeat=n - 1):
        a = {v for v, r in zip(vs, roles) if r == 1}
        b = {v for v, r in zip(vs, roles) if r == 2}
        l = {v for v, r in zip(vs, roles) if r == 3}
        out.append(mod2(a, b, l))
        if not a and not l and extended:
            out.extend(mod2((), b, (), j) for j in _subsets(b) if len(j) >= 2)
        if not a and not l:
            for j in _subsets(b) if extended else [set()]:
                out.append(witt(b, j))
        if not b and not l:
            for j in _subsets(a) if extended else [set()]:
                out.append(qz(a, j))
    return out


def _subsets(s):
    s = sorted(s)
    for mask in range(2 ** len(s)):
        yield {x for i, x in enumerate(s) if mask >> i & 1}
