"""Headline computations on E_infinity pages.

Homotopy groups are reported as associated graded data: the surviving cell
descriptors in each stem.  Everything here depends only on which stems are
zero, on orders, or on periodicity, none of which needs extensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .pages import EngineError, Page, Window, last_page
from .presets import PresetId, SpectralSequence, period, tate_rules


class AnalysisError(EngineError):
    """A computed report contradicts itself (an engine bug, not bad input)."""


def default_window(n: int) -> Window:
    """Two periods of stems; filtrations up to just past the vanishing line."""
    return Window((0, 2 * period(n)), (0, 2 ** (n + 1) + 1))


@lru_cache(maxsize=32)
def _sequence(pid: str, n: int, window: Window) -> SpectralSequence:
    return SpectralSequence.of(pid, n, window)


def einf_page(pid, n: int, window: Optional[Window] = None) -> Page:
    """E_infinity of a preset cropped to ``window`` (cached)."""
    return _sequence(PresetId(pid).value, n, window or default_window(n)).view()


def homotopy_table(p: Page, rules, stems=None) -> dict[int, list[tuple[int, str]]]:
    """Per stem, the surviving (filtration, module) pairs of a converged page."""
    if p.r <= last_page(rules):
        raise AnalysisError(f"page {p.r} is not converged; d{last_page(rules)} still to run")
    w = p.view or p.window
    stems = range(*w.stems) if stems is None else stems
    out = {}
    for s in stems:
        if not w.stems[0] <= s < w.stems[1]:
            raise AnalysisError(f"stem {s} outside the window {w.stems}")
        cells = []
        for key in sorted(p.cells):
            if key[0] == s:
                cells.extend((key[1], m.module.describe()) for m in p.cells[key])
        out[s] = cells
    return out


def stem_profile(p: Page) -> dict[int, tuple]:
    """Stem to its sorted (filtration, descriptors) pairs; labels ignored."""
    out: dict = {}
    for key, desc in sorted(p.descriptors().items()):
        out.setdefault(key[0], []).append((key[1], desc))
    return {s: tuple(v) for s, v in out.items()}


def zero_stems(p: Page, stems) -> list[int]:
    occupied = {key[0] for key in p.cells}
    return [s for s in stems if s not in occupied]


def _gap_residues(p: Page, n: int) -> set[int]:
    P = period(n)
    lo, hi = (p.view or p.window).stems
    zeros = set(zero_stems(p, range(lo, hi)))
    return {j % P for j in range(lo, hi - 2) if {j, j + 1, j + 2} <= zeros}


@dataclass(frozen=True)
class Witness:
    j: int
    i: int
    exps: tuple[int, int, int]
    stem: int
    survives: bool


@dataclass
class GapReport:
    n: int
    period: int
    residues: tuple[int, ...]
    witnesses: list = field(default_factory=list)

    @property
    def residue(self) -> int:
        return self.residues[0]

    def to_json(self) -> dict:
        return {
            "height": self.n,
            "period": self.period,
            "residues": list(self.residues),
            "witness_families": len({w.j for w in self.witnesses}),
            "witness_classes": len(self.witnesses),
            "all_witnesses_survive": all(w.survives for w in self.witnesses),
        }


def witness_classes(n: int) -> list[tuple[int, int, tuple[int, int, int]]]:
    """(j, i, exponents) of (ubar^i asig^i) ubar^A u2s^B, 1 <= j <= n.

    A = (2^{j-1}-1) 2^{n+2-j}, B = A/2 and 1 <= i <= 2^{n+2-j}-2.  Each
    family is a slope one line of permanent cycles in filtration i.
    """
    out = []
    for j in range(1, n + 1):
        b = (2 ** (j - 1) - 1) * 2 ** (n + 1 - j)
        for i in range(1, 2 ** (n + 2 - j) - 1):
            out.append((j, i, (i + 2 * b, b, i)))
    return out


def find_gap(n: int, window: Optional[Window] = None) -> GapReport:
    """Residues k mod 2^{n+2} with pi_k = pi_{k+1} = pi_{k+2} = 0."""
    p = einf_page(PresetId.HFPSS_EN, n, window)
    residues = tuple(sorted(_gap_residues(p, n)))
    if len(residues) != 1:
        raise AnalysisError(f"expected one gap per period, found residues {residues}")
    witnesses = []
    for j, i, exps in witness_classes(n):
        stem = p.key_of(exps)[0]
        witnesses.append(Witness(j, i, exps, stem, p.find(exps) is not None))
    return GapReport(n, period(n), residues, witnesses)


@dataclass
class PeriodicityReport:
    n: int
    period: int
    periodic: bool
    class_exps: tuple[int, int, int]
    permanent: bool
    mismatches: list = field(default_factory=list)


def periodicity(n: int, window: Optional[Window] = None) -> PeriodicityReport:
    """E_infinity is 2^{n+2}-periodic and u2s^{2^n} ubar^{2^{n+1}} is permanent."""
    window = window or default_window(n)
    P = period(n)
    ss = _sequence(PresetId.HFPSS_EN.value, n, window)
    p = ss.view()
    desc = p.descriptors()
    lo, hi = window.stems
    bad = []
    for s in range(lo, hi - P):
        for f in range(*window.filts):
            if desc.get((s, f, 0), ()) != desc.get((s + P, f, 0), ()):
                bad.append((s, f))
    exps = (2 ** (n + 1), 2**n, 0)
    permanent = p.find(exps) is not None and not any(rule.matches(exps, 0) for rule in ss.rules)
    return PeriodicityReport(n, P, not bad, exps, permanent, bad)


def periodicity_lower_bound(n: int) -> int:
    """Smallest period of the zero-stem pattern of E_infinity.

    Sigma^d E is never equivalent to E when the zero stems are not d-periodic,
    so this bounds the order of the suspension in Pic from below.
    """
    P = period(n)
    p = einf_page(PresetId.HFPSS_EN, n)
    zeros = set(zero_stems(p, range(0, 2 * P)))
    for d in range(1, P + 1):
        if P % d:
            continue
        if all((s in zeros) == (s + d in zeros) for s in range(0, P)):
            return d
    raise AnalysisError("no period found")


@dataclass
class ShiftReport:
    n: int
    shift: int
    method: str
    candidates: dict = field(default_factory=dict)

    @property
    def mod4_ok(self) -> bool:
        return self.shift % 4 == self.n % 4

    def to_json(self) -> dict:
        return {
            "height": self.n,
            "shift": self.shift,
            "method": self.method,
            "candidates": {k: list(v) for k, v in sorted(self.candidates.items())},
            "shift_mod_4_equals_height_mod_4": self.mod4_ok,
        }


def shift_by_gap(n: int) -> list[int]:
    """l = j + 3 for every gap start j in the dual's E_infinity."""
    p = einf_page(PresetId.HFPSS_IEN, n)
    return sorted((j + 3) % period(n) for j in _gap_residues(p, n))


def shift_by_pattern(n: int) -> list[int]:
    """Every d with the dual's E_infinity equal to E_infinity moved up d stems."""
    P = period(n)
    w = default_window(n)
    ien = stem_profile(einf_page(PresetId.HFPSS_IEN, n, w))
    en = stem_profile(einf_page(PresetId.HFPSS_EN, n, Window((w.stems[0] - P, w.stems[1]), w.filts)))
    found = []
    for d in range(P):
        if all(ien.get(s, ()) == en.get(s - d, ()) for s in range(*w.stems)):
            found.append(d)
    return found


def gh_shift(n: int, method: str = "both") -> ShiftReport:
    """The l with I E^{hC2} = Sigma^l E^{hC2}, from its E_infinity page."""
    if method not in ("gap", "pattern", "both"):
        raise ValueError(f"unknown method {method!r}")
    candidates = {}
    if method in ("gap", "both"):
        candidates["gap"] = tuple(shift_by_gap(n))
    if method in ("pattern", "both"):
        candidates["pattern"] = tuple(shift_by_pattern(n))
    for name, found in candidates.items():
        if len(found) != 1:
            raise AnalysisError(f"{name} method found {len(found)} shifts: {found}")
    values = {found[0] for found in candidates.values()}
    if len(values) != 1:
        raise AnalysisError(f"methods disagree: {candidates}")
    report = ShiftReport(n, values.pop(), method, candidates)
    if not report.mod4_ok:
        raise AnalysisError(f"shift {report.shift} is not {n} mod 4")
    return report


def longest_differential_trace(n: int) -> list[tuple[int, int, tuple[int, int]]]:
    """Source and target of d_{2^{n+1}-1} in filtration 0 along k = 0..n.

    Each entry is (k, source stem, target (stem, filtration)) in the Tate
    sequence of E_n/I_k^oo, the first source stem >= 0 the rules fire on.
    """
    r = 2 ** (n + 1) - 1
    out = []
    for k in range(n + 1):
        (rule,) = [rule for rule in tate_rules(n, k) if rule.page == r]
        e = next(e for e in range(rule.modulus) if rule.matches((e, 0), 0))
        te, tj = rule.target((e, 0))
        out.append((k, 2 * e, (2 * te + tj, tj)))
    return out


@dataclass
class ExoticReport:
    n: int
    gh_shift: int
    gh_source: str
    dual_shift: int
    det_shift: int
    delta: int

    @property
    def period(self) -> int:
        return period(self.n)

    @property
    def twist(self) -> int:
        return self.delta

    def to_json(self) -> dict:
        return {
            "height": self.n,
            "gross_hopkins_shift": self.gh_shift,
            "gross_hopkins_source": self.gh_source,
            "declared_dual_shift": self.dual_shift,
            "declared_det_shift": self.det_shift,
            "delta": self.delta,
            "delta_mod_period": self.delta % self.period,
            "exotic_twist": self.twist,
        }


def exotic_ledger(n: int, shift: Optional[int] = None) -> ExoticReport:
    """Compare two computations of the shift of P tensored with E^{hC2}.

    Through Gross-Hopkins duality the shift is (gh + n^2); through the
    declared Spanier-Whitehead and determinant twists it is
    n^2 - n + 1 - (-1)^n.  Their difference is the exotic twist.
    """
    source = "given"
    if shift is None:
        if n <= 4:
            shift, source = gh_shift(n, "both").shift, "computed"
        else:
            shift, source = 4 + n, "declared"
    dual_shift = -(n**2)
    det_shift = 1 - (-1) ** n
    via_gh = shift + n**2
    via_declared = -dual_shift - n + det_shift
    delta = via_gh - via_declared
    if delta % period(n) == 0:
        raise AnalysisError(f"delta {delta} vanishes mod {period(n)}")
    return ExoticReport(n, shift, source, dual_shift, det_shift, delta)


__all__ = [
    "AnalysisError",
    "ExoticReport",
    "GapReport",
    "PeriodicityReport",
    "ShiftReport",
    "default_window",
    "einf_page",
    "exotic_ledger",
    "find_gap",
    "gh_shift",
    "homotopy_table",
    "longest_differential_trace",
    "periodicity",
    "periodicity_lower_bound",
    "shift_by_gap",
    "shift_by_pattern",
    "stem_profile",
    "witness_classes",
    "zero_stems",
]
