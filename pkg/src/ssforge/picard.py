"""Picard group of the fixed points, read off the additive spectral sequence.

In the stable range the Picard spectral sequence is the additive one moved
up one stem, so the classes that can contribute to Pic sit in stem -1 of the
additive sequence: F_q[[u_1..u_{n-1}]] ubar^{2l-1} u2s^{-l} asig^{4l-1}.  A
d_r touching such a class is imported when its source has filtration at
least r+1.  The one source per page that sits on the diagonal (filtration r)
is a fringe class and carries d(x) + x^2 instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .coefficients import CyclicModule, RingContext
from .pages import EngineError, Window, leibniz_differential
from .presets import PresetId, SpectralSequence

IMPORTED_SOURCE = "imported-source"
IMPORTED_TARGET = "imported-target"
FRINGE = "fringe"

# Conway-style irreducibles for GF(2^n), bit i = coefficient of x^i.
IRREDUCIBLES = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011}


@dataclass(frozen=True)
class PicardClass:
    ell: int
    module: CyclicModule

    @property
    def filtration(self) -> int:
        return 4 * self.ell - 1

    @property
    def exps(self) -> tuple[int, int, int]:
        return (2 * self.ell - 1, -self.ell, 4 * self.ell - 1)

    def render(self) -> str:
        return f"ubar^{2 * self.ell - 1}*u2s^{-self.ell}*asig^{4 * self.ell - 1}"


@dataclass(frozen=True)
class CensusEntry:
    cls: PicardClass
    fate: str
    page: int
    partner_filtration: int
    module_at_death: CyclicModule

    def to_json(self) -> dict:
        return {
            "ell": self.cls.ell,
            "filtration": self.cls.filtration,
            "class": self.cls.render(),
            "fate": self.fate,
            "page": self.page,
            "partner_filtration": self.partner_filtration,
            "module": self.module_at_death.describe(),
        }


def census_window(n: int, ells: Optional[int] = None) -> Window:
    top = ells if ells is not None else 2**n + 1
    return Window((-1, 1), (0, 4 * top + 1))


def _events(ss: SpectralSequence, exps):
    """Pages where the summand at ``exps`` changes, with its role there."""
    out = []
    pages = sorted({rule.page for rule in ss.rules})
    for r in pages:
        page = ss.page(r)
        s = page.find(exps)
        if s is None:
            break
        nxt = ss.page(r + 1).find(exps)
        if nxt == s:
            continue
        hit = leibniz_differential(page, s, ss.rules)
        if hit is not None and page.find(hit[0]) is not None:
            out.append((r, "source", hit[0], s.module))
            continue
        for key, t in page.summands():
            h = leibniz_differential(page, t, ss.rules)
            if h is not None and h[0] == tuple(exps):
                out.append((r, "target", t.exps, s.module))
                break
        else:
            raise EngineError(f"summand {s.label} changed on page {r} without a partner")
    return out


def census_and_import(ctx: RingContext, ells: Optional[int] = None) -> list[CensusEntry]:
    """Classify every stem -1 class of the additive E_2 page by how it dies.

    ``ells`` bounds l (default 2^n + 1, one past the last family).
    """
    n = ctx.n
    top = ells if ells is not None else 2**n + 1
    ss = SpectralSequence.of(PresetId.HFPSS_EN, n, census_window(n, top))
    e2 = ss.e2
    out = []
    for ell in range(1, top + 1):
        cls0 = PicardClass(ell, None)
        s = e2.find(cls0.exps)
        if s is None or e2.key_of(cls0.exps)[:2] != (-1, cls0.filtration):
            raise EngineError(f"class l={ell} missing from stem -1")
        cls = PicardClass(ell, s.module)
        events = _events(ss, cls.exps)
        if not events or ss.einf().find(cls.exps) is not None:
            raise EngineError(f"class l={ell} survives the additive spectral sequence")
        r, role, partner, module = events[-1]
        pf = e2.alphabet.degree(partner)[1]
        for q, q_role, q_partner, _ in events:
            src_filt = cls.filtration if q_role == "source" else e2.alphabet.degree(q_partner)[1]
            if src_filt < q:
                raise EngineError(f"d{q} with source filtration {src_filt} below the page")
            if q_role == "target" and src_filt == q:
                raise EngineError(f"l={ell} is hit from the diagonal on page {q}")
        if role == "source":
            fate = FRINGE if cls.filtration == r else IMPORTED_SOURCE
        else:
            fate = IMPORTED_TARGET
        out.append(CensusEntry(cls, fate, r, pf, module))
    return out


# Arithmetic in GF(2^n), elements as bit vectors.


def gf_mul(a: int, b: int, n: int) -> int:
    mod = IRREDUCIBLES[n]
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> n:
            a ^= mod
    return out


def gf_table(n: int) -> np.ndarray:
    q = 2**n
    return np.array([[gf_mul(a, b, n) for b in range(q)] for a in range(q)], dtype=np.int64)


@dataclass(frozen=True)
class TwistedKernel:
    n: int
    k: int
    variables: tuple[int, ...]
    solutions: tuple[str, ...]

    @property
    def order(self) -> int:
        return len(self.solutions)


def twisted_kernel(k: int, ctx: RingContext, module: Optional[CyclicModule] = None) -> TwistedKernel:
    """Kernel of f -> ubar_k f + f^2 on the fringe class of page 2^{k+1}-1.

    The fringe coefficients are F_q[[u_k..u_{n-1}]] (k < n) or F_q (k = n),
    both integral domains of characteristic 2, so f(ubar_k + f) = 0 forces
    f = 0 or f = ubar_k, with ubar_n = 1.
    """
    n = ctx.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    variables = tuple(range(k, n)) if module is None else tuple(sorted(module.surviving))
    if module is not None and (module.divided or module.laurent or module.ideal):
        raise EngineError(f"fringe coefficients {module.describe()} are not a power series ring")
    unit = "1" if k == n else f"u{k}"
    return TwistedKernel(n, k, variables, ("0", unit))


def _monomials(m: int, degree: int) -> list[tuple[int, ...]]:
    if m == 1:
        return [(d,) for d in range(degree + 1)]
    return sorted(
        (e for e in product(range(degree + 1), repeat=m) if sum(e) <= degree),
        key=lambda e: (sum(e), e),
    )


def enumerate_twisted_kernel(n: int, k: int, degree: Optional[int] = None) -> list[dict]:
    """All polynomials f of bounded degree with u_k f + f^2 = 0, by brute force.

    Candidates are every F_q-combination of monomials of total degree at
    most ``degree`` (2 by default) in u_k..u_{n-1}; products are computed
    exactly in the polynomial ring, so truncation adds no spurious roots.
    Returns each solution as {exponent tuple: coefficient}.
    """
    q = 2**n
    m = n - k
    degree = 2 if degree is None else degree
    monos = _monomials(m, degree) if m else [()]
    table = gf_table(n)
    count = len(monos)
    idx = np.arange(q**count, dtype=np.int64)
    coeffs = np.stack([(idx // q**i) % q for i in range(count)], axis=1)
    result: dict = {}

    def add(mono, values):
        result[mono] = result.get(mono, 0) ^ values

    unit = tuple(1 if i == 0 else 0 for i in range(m))
    for i, a in enumerate(monos):
        add(tuple(x + y for x, y in zip(a, unit)), coeffs[:, i])
        for j, b in enumerate(monos):
            add(tuple(x + y for x, y in zip(a, b)), table[coeffs[:, i], coeffs[:, j]])
    zero = np.ones(len(idx), dtype=bool)
    for values in result.values():
        zero &= values == 0
    out = []
    for row in coeffs[zero]:
        out.append({monos[i]: int(c) for i, c in enumerate(row) if c})
    return out


def h1_order() -> int:
    """Order of H^1(C_2; E_0^x) for the sign action on units.

    Crossed homomorphisms modulo coboundaries reduce to the square roots of
    1 in an integral domain, and (x - 1)(x + 1) = x^2 - 1 leaves only +-1.
    The expansion is checked on coefficient lists.
    """
    lhs = [-1, 1]
    rhs = [1, 1]
    prod = [0] * 3
    for i, a in enumerate(lhs):
        for j, b in enumerate(rhs):
            prod[i + j] += a * b
    if prod != [-1, 0, 1]:
        raise EngineError("domain argument failed")
    return 2


def two_torsion_units(modulus: Optional[int] = None, bound: int = 64) -> list[int]:
    """Solutions of x^2 = 1 among integers (|x| <= bound) or in Z/modulus."""
    if modulus is None:
        return [x for x in range(-bound, bound + 1) if x * x == 1]
    return [x for x in range(modulus) if x * x % modulus == 1 % modulus]


@dataclass
class PicardReport:
    n: int
    per_filtration: dict
    total_order: int
    lower_bound: int
    generator: str
    provenance: dict = field(default_factory=dict)
    census: list = field(default_factory=list)

    @property
    def group(self) -> str:
        return f"Z/{self.total_order}"

    def to_json(self) -> dict:
        return {
            "height": self.n,
            "group": self.group,
            "total_order": self.total_order,
            "lower_bound": self.lower_bound,
            "generator": self.generator,
            "per_filtration": {str(f): o for f, o in sorted(self.per_filtration.items())},
            "provenance": {str(f): p for f, p in sorted(self.provenance.items())},
            "census": [entry.to_json() for entry in self.census],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    def table(self) -> str:
        rows = [f"Pic at height {self.n}: {self.group}, generated by {self.generator}"]
        rows.append(f"{'filtration':>10}  {'order':>5}  source")
        for f in sorted(self.per_filtration):
            rows.append(f"{f:>10}  {self.per_filtration[f]:>5}  {self.provenance[f]}")
        rows.append(f"{'total':>10}  {self.total_order:>5}  lower bound {self.lower_bound}")
        return "\n".join(rows) + "\n"


def assemble_picard(ctx: RingContext) -> PicardReport:
    from .analysis import periodicity_lower_bound

    n = ctx.n
    census = census_and_import(ctx)
    fringe = [e for e in census if e.fate == FRINGE]
    expected = [2 ** (k - 1) for k in range(1, n + 1)]
    if [e.cls.ell for e in fringe] != expected:
        raise EngineError(f"fringe classes at l={[e.cls.ell for e in fringe]}, expected {expected}")
    per = {0: 2, 1: h1_order()}
    prov = {
        0: "H^0(C2; Pic(E_n)) = Z/2, declared",
        1: "H^1(C2; E_0^x) = Z/2, domain argument",
    }
    for k, entry in enumerate(fringe, start=1):
        if entry.page != 2 ** (k + 1) - 1:
            raise EngineError(f"fringe class l={entry.cls.ell} dies on page {entry.page}")
        kernel = twisted_kernel(k, ctx, entry.module_at_death)
        per[entry.cls.filtration] = kernel.order
        prov[entry.cls.filtration] = (
            f"fringe d{entry.page}(x) + x^2 on {entry.module_at_death.describe()}, "
            f"kernel {{{', '.join(kernel.solutions)}}}"
        )
    upper = 1
    for order in per.values():
        upper *= order
    lower = periodicity_lower_bound(n)
    if upper < lower:
        raise EngineError(f"upper bound {upper} below lower bound {lower}")
    if upper % lower:
        raise EngineError(f"lower bound {lower} does not divide {upper}")
    generator = "Sigma E_n^{hC2}" if upper == lower else "undetermined"
    return PicardReport(n, per, upper, lower, generator, prov, census)


def picard_order(n: int) -> int:
    return assemble_picard(RingContext(n)).total_order


__all__ = [
    "FRINGE",
    "IMPORTED_SOURCE",
    "IMPORTED_TARGET",
    "CensusEntry",
    "PicardClass",
    "PicardReport",
    "TwistedKernel",
    "assemble_picard",
    "census_and_import",
    "enumerate_twisted_kernel",
    "gf_mul",
    "h1_order",
    "picard_order",
    "twisted_kernel",
    "two_torsion_units",
]
