"""Independent models used only by the tests.

``set_homology_einf`` runs the fixed point spectral sequence on explicit
basis sets: every cell holds the monomials 2^v u_1^e1 ... of its truncated
coefficient module and each page is homology of a monomial map, so a
kernel is a set difference.  It re-encodes the differentials from their
formula and never touches the engine's page turning or the module rule
table.

``c2_cohomology`` computes H^s(C_2; Z with a sign action) from the periodic
resolution ... -> Z[C_2] -(1-g)-> Z[C_2] -(1+g)-> Z[C_2] -> Z.
"""

from __future__ import annotations

from itertools import product

from ssforge.coefficients import catalog
from ssforge.oracles import basis


def _nu(b: int) -> int:
    return (b & -b).bit_length() - 1


def hfpss_e2_sets(n: int, stems, filts, depth: int) -> dict:
    """Integer-graded E_2 as {(a, b, c): set of (v, e_1..e_{n-1})}."""
    cells = {}
    for x in range(*stems):
        for c in range(*filts):
            if c < 0 or (x - c) % 4:
                continue
            b = (x - c) // 4
            a = 2 * b + c
            vs = range(0, depth + 1) if c == 0 else (0,)
            cells[(a, b, c)] = {
                (v,) + e for v in vs for e in product(range(depth + 1), repeat=n - 1)
            }
    return cells


def hfpss_differential(n: int, mono):
    """(r, target monomial, l): d_r(u2s^b) = u_l ubar^{2^{v+1}-1} u2s^{b-2^v} asig^r."""
    a, b, c = mono
    if b == 0:
        return None
    v = _nu(b)
    if v >= n:
        return None
    r = 2 ** (v + 2) - 1
    return r, (a + 2 ** (v + 1) - 1, b - 2**v, c + r), v + 1


def set_homology_einf(n: int, stems, filts, pad: int = 24, depth: int = 6) -> dict:
    """E_infinity cells inside the window, each a basis set at trusted depth."""
    big_stems = (stems[0] - pad, stems[1] + pad)
    big_filts = (0, filts[1] + 4 * pad)
    cells = hfpss_e2_sets(n, big_stems, big_filts, depth)
    pages = sorted({2 ** (v + 2) - 1 for v in range(n)})
    for r in pages:
        moves = []
        for mono, S in cells.items():
            if not S:
                continue
            hit = hfpss_differential(n, mono)
            if hit is None or hit[0] != r or hit[1] not in cells:
                continue
            moves.append((mono, hit[1], hit[2]))
        new = {m: set(S) for m, S in cells.items()}
        for src, tgt, l in moves:
            T = cells[tgt]
            for x in cells[src]:
                y = list(x)
                if l < n:
                    y[l] += 1
                y = tuple(y)
                if y[0] != 0:
                    continue
                if max(y) > depth:
                    new[src].discard(x)
                elif y in T:
                    new[src].discard(x)
                    new[tgt].discard(y)
        cells = new
    trusted = depth - len(pages)
    out = {}
    for (a, b, c), S in cells.items():
        stem = a + 2 * b
        if not (stems[0] <= stem < stems[1] and filts[0] <= c < filts[1]):
            continue
        S = {x for x in S if max(x) <= trusted}
        if S:
            out[(stem, c)] = frozenset(S)
    return out, trusted


def identify(n: int, S, depth: int):
    """The unique catalog module whose truncated basis is S up to translation.

    Principal ideals such as 2W or u_1 F[[u_1, u_2]] are isomorphic to the
    ring, so S is first moved by its componentwise minimum.
    """
    low = tuple(min(x[i] for x in S) for i in range(n))
    moved = {tuple(a - b for a, b in zip(x, low)) for x in S}

    def box(m):
        return {
            y for y in basis(m, n, depth) if all(a + b <= depth for a, b in zip(y, low))
        }

    found = [m for m in catalog(n) if not m.zero and box(m) == moved]
    if len(found) != 1:
        raise AssertionError(f"{len(found)} catalog modules match a cell")
    return found[0]


def oracle_einf_descriptors(n: int, stems, filts) -> dict:
    sets, trusted = set_homology_einf(n, stems, filts)
    return {key: identify(n, S, trusted) for key, S in sorted(sets.items())}


def c2_cohomology(sign: int, s: int) -> str:
    """H^s(C_2; Z) with g acting by ``sign``, as 'Z', 'Z/2' or '0'.

    Apply Hom(-, Z_sign) to the periodic resolution: the cochain maps are
    multiplication by (1 - sign) out of even degrees and (1 + sign) out of
    odd degrees.
    """

    def out_of(k):
        return (1 - sign) if k % 2 == 0 else (1 + sign)

    incoming = None if s == 0 else out_of(s - 1)
    outgoing = out_of(s)
    if outgoing != 0:
        return "0"
    if incoming is None or incoming == 0:
        return "Z"
    return f"Z/{abs(incoming)}"
