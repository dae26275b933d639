"""Sparse pages of cyclic summands and page turning.

A page maps a cell key ``(stem, filt, y)`` to a tuple of summands.  ``y`` is
the sigma-coefficient of an RO(C2) degree and is 0 on integer-graded pages.
Each summand is a generator monomial (exponents over the page's alphabet)
times a catalog module.

Differential rules are generator-level: a congruence on a linear form of
the exponents selects sources; the target is the source shifted by a fixed
exponent vector, and the module map is multiplication by u_l (u_n = 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .coefficients import (
    CatalogError,
    CyclicModule,
    Kind,
    pair_kernel_cokernel,
    pontryagin_dual,
)

SCHEMA = "ssforge-page/1"


class EngineError(RuntimeError):
    """A page operation met data that violates its contract."""


@dataclass(frozen=True)
class RODegree:
    """The virtual representation x + y*sigma."""

    x: int
    y: int

    def __add__(self, other: "RODegree") -> "RODegree":
        return RODegree(self.x + other.x, self.y + other.y)

    def __mul__(self, k: int) -> "RODegree":
        return RODegree(self.x * k, self.y * k)

    __rmul__ = __mul__

    @property
    def integral(self) -> bool:
        return self.y == 0


RHO = RODegree(1, 1)
SIGMA = RODegree(0, 1)


@dataclass(frozen=True)
class Alphabet:
    name: str
    gens: tuple[str, ...]
    degrees: tuple[RODegree, ...]
    filts: tuple[int, ...]

    def degree(self, exps: Sequence[int]) -> tuple[RODegree, int]:
        deg = RODegree(0, 0)
        filt = 0
        for e, d, f in zip(exps, self.degrees, self.filts):
            deg = deg + d * e
            filt += f * e
        return deg, filt

    def index(self, gen: str) -> int:
        return self.gens.index(gen)

    def render(self, exps: Sequence[int]) -> str:
        parts = []
        for g, e in zip(self.gens, exps):
            if e == 1:
                parts.append(g)
            elif e:
                parts.append(f"{g}^{e}")
        return "*".join(parts) or "1"


HFPSS_ALPHABET = Alphabet(
    "hfpss", ("ubar", "u2s", "asig"), (RHO, RODegree(2, -2), RODegree(0, -1)), (0, 0, 1)
)
TATE_ALPHABET = Alphabet("tate", ("u", "alpha"), (RODegree(2, 0), RODegree(1, 0)), (0, 1))
HOSS_ALPHABET = Alphabet("hoss", ("u", "a"), (RODegree(2, 0), RODegree(1, 0)), (0, 1))
ALPHABETS = {a.name: a for a in (HFPSS_ALPHABET, TATE_ALPHABET, HOSS_ALPHABET)}


@dataclass(frozen=True)
class Summand:
    exps: tuple[int, ...]
    module: CyclicModule
    label: str


@dataclass(frozen=True)
class Window:
    """Half-open stem, filtration and sigma ranges."""

    stems: tuple[int, int]
    filts: tuple[int, int]
    ys: tuple[int, int] = (0, 1)

    def __post_init__(self):
        for lo, hi in (self.stems, self.filts, self.ys):
            if hi <= lo:
                raise ValueError(f"empty window {self}")

    def contains(self, key: tuple[int, int, int]) -> bool:
        s, f, y = key
        return (
            self.stems[0] <= s < self.stems[1]
            and self.filts[0] <= f < self.filts[1]
            and self.ys[0] <= y < self.ys[1]
        )

    def pad(self, ds: int, df: int, dy: int = 0) -> "Window":
        return Window(
            (self.stems[0] - ds, self.stems[1] + ds),
            (self.filts[0] - df, self.filts[1] + df),
            (self.ys[0] - dy, self.ys[1] + dy),
        )

    def shift(self, d: int) -> "Window":
        return Window((self.stems[0] + d, self.stems[1] + d), self.filts, self.ys)

    def to_json(self) -> dict:
        return {"stems": list(self.stems), "filts": list(self.filts), "ys": list(self.ys)}

    @classmethod
    def from_json(cls, d: dict) -> "Window":
        return cls(tuple(d["stems"]), tuple(d["filts"]), tuple(d.get("ys", (0, 1))))


@dataclass(frozen=True)
class DifferentialRule:
    """``d_page`` on every monomial whose exponents satisfy the congruence.

    Sources satisfy ``sum(coeffs[i] * exps[i]) + offset = residue (mod
    modulus)`` and, if set, ``filt >= min_filt``.  The target monomial is
    ``exps + shift`` and the module map is multiplication by u_multiplier.
    """

    page: int
    coeffs: tuple[int, ...]
    modulus: int
    residue: int
    shift: tuple[int, ...]
    multiplier: int
    offset: int = 0
    min_filt: Optional[int] = None
    name: str = field(default="", compare=False)

    def matches(self, exps: Sequence[int], filt: int) -> bool:
        if self.min_filt is not None and filt < self.min_filt:
            return False
        val = sum(c * e for c, e in zip(self.coeffs, exps)) + self.offset
        return val % self.modulus == self.residue % self.modulus

    def target(self, exps: Sequence[int]) -> tuple[int, ...]:
        return tuple(e + s for e, s in zip(exps, self.shift))

    def reversed(self, filt_of_shift: int) -> "DifferentialRule":
        """The same differential read from target to source.

        ``filt_of_shift`` is the filtration change of ``shift`` in the
        alphabet's own grading.
        """
        lin = sum(c * s for c, s in zip(self.coeffs, self.shift))
        min_filt = None if self.min_filt is None else self.min_filt + filt_of_shift
        return replace(
            self,
            offset=self.offset - lin,
            shift=tuple(-s for s in self.shift),
            min_filt=min_filt,
            name=f"dual({self.name})",
        )

    def canonical(self) -> tuple:
        return (
            self.page,
            self.coeffs,
            self.modulus,
            (self.residue - self.offset) % self.modulus,
            self.shift,
            self.multiplier,
            self.min_filt,
        )


@dataclass(frozen=True)
class Page:
    """One page of a spectral sequence, restricted to a window.

    Cell keys are computed from the native degree of each monomial through
    ``stem_sign * stem + stem_offset``.  ``homological`` pages have
    differentials of filtration -r; all others +r.  ``base_divided`` lists
    the variables divided on the E_2 page; a variable frozen later keeps the
    exponent -1 if it is listed there and 0 otherwise.
    """

    preset: str
    n: int
    r: int
    alphabet: Alphabet
    window: Window
    cells: Mapping[tuple[int, int, int], tuple[Summand, ...]]
    homological: bool = False
    ro_graded: bool = False
    stem_sign: int = 1
    stem_offset: int = 0
    base_divided: frozenset[int] = frozenset()
    k: Optional[int] = None
    view: Optional[Window] = None

    def key_of(self, exps: Sequence[int]) -> tuple[int, int, int]:
        deg, filt = self.alphabet.degree(exps)
        return (self.stem_sign * deg.x + self.stem_offset, filt, deg.y if self.ro_graded else 0)

    def summands(self) -> Iterable[tuple[tuple[int, int, int], Summand]]:
        for key in sorted(self.cells):
            for s in self.cells[key]:
                yield key, s

    def find(self, exps: Sequence[int]) -> Optional[Summand]:
        exps = tuple(exps)
        for s in self.cells.get(self.key_of(exps), ()):
            if s.exps == exps:
                return s
        return None

    def cell(self, stem: int, filt: int, y: int = 0) -> tuple[Summand, ...]:
        return self.cells.get((stem, filt, y), ())

    def descriptors(self, window: Optional[Window] = None) -> dict:
        """Cell key to sorted module descriptors, labels ignored."""
        out = {}
        for key, ss in self.cells.items():
            if window is not None and not window.contains(key):
                continue
            out[key] = tuple(sorted(s.module.sort_key() for s in ss))
        return out

    def crop(self, window: Optional[Window] = None) -> "Page":
        w = window or self.view or self.window
        cells = {k: v for k, v in self.cells.items() if w.contains(k)}
        return replace(self, cells=cells, window=w, view=None)

    def degree_audit(self) -> None:
        for key, s in self.summands():
            if self.key_of(s.exps) != key:
                raise EngineError(f"summand {s.label} stored at {key}, degree {self.key_of(s.exps)}")
            if s.module.zero:
                raise EngineError(f"zero module stored at {key}")
            if self.alphabet is HFPSS_ALPHABET and s.exps[2] > 0 and s.module.kind is Kind.WITT:
                raise EngineError(f"a_sigma multiple with Witt coefficients at {key}")
        labels = [s.label for _, s in self.summands()]
        if len(labels) != len(set(labels)):
            raise EngineError("duplicate summand labels")


def make_page(preset, n, alphabet, window, summands, **kw) -> Page:
    """Assemble a page at r = 2 from summands, dropping those outside ``window``."""
    proto = Page(preset, n, 2, alphabet, window, {}, **kw)
    cells: dict = {}
    for s in summands:
        key = proto.key_of(s.exps)
        if window.contains(key):
            cells.setdefault(key, []).append(s)
    return replace(
        proto, cells={k: tuple(sorted(v, key=lambda s: s.label)) for k, v in cells.items()}
    )


def leibniz_differential(page: Page, s: Summand, rules: Sequence[DifferentialRule]):
    """The rule firing on ``s`` at ``page.r``: ``(target exponents, multiplier, rule)``."""
    filt = page.alphabet.degree(s.exps)[1]
    hits = [rule for rule in rules if rule.page == page.r and rule.matches(s.exps, filt)]
    if not hits:
        return None
    if len(hits) > 1:
        raise EngineError(f"rules {[h.name for h in hits]} all fire on {s.label}")
    rule = hits[0]
    return rule.target(s.exps), rule.multiplier, rule


def _relabel(label: str, old: CyclicModule, new: CyclicModule, g, partner: CyclicModule) -> str:
    """Kernel label: records how the source module was cut down."""
    if old.kind is Kind.WITT and new.kind is Kind.WITT:
        if new.ideal:
            gens = ["2"] + [f"u{j}" for j in sorted(new.ideal)]
            return f"({','.join(gens)}){label}"
        return f"2{label}"
    if old.kind is Kind.QZ and new.kind is Kind.MOD2:
        return f"{label}[2]"
    if isinstance(g, int) and g in old.divided:
        return f"{label}|u{g}^-1"
    lost = old.surviving - partner.surviving if old.kind is partner.kind else frozenset()
    if new == old and lost:
        return "".join(f"u{j}" for j in sorted(lost)) + label
    return label


def _corelabel(label: str, old: CyclicModule, new: CyclicModule, g) -> str:
    """Cokernel label: records what the target was divided by."""
    if new.kind is Kind.QZ or isinstance(g, int) and g in old.divided:
        return f"{label}/im"
    if isinstance(g, int) and g in old.surviving:
        return f"{label}/u{g}"
    return f"{label}/2"


def turn_page(p: Page, rules: Sequence[DifferentialRule]) -> Page:
    """Homology of ``d_r``: each source/target pair becomes kernel/cokernel."""
    sign = -1 if p.homological else 1
    pairs = []
    targets: dict = {}
    sources = set()
    for key, s in p.summands():
        hit = leibniz_differential(p, s, rules)
        if hit is None:
            continue
        texps, g, rule = hit
        tkey = p.key_of(texps)
        if tkey[:2] != (key[0] - 1, key[1] + sign * p.r) or tkey[2] != key[2]:
            raise EngineError(f"rule {rule.name} moves {key} to {tkey}")
        t = p.find(texps)
        if t is None:
            continue
        if tkey in targets and t.label in targets[tkey]:
            raise EngineError(f"two sources hit {t.label} at cell {tkey}")
        targets.setdefault(tkey, set()).add(t.label)
        sources.add(s.label)
        pairs.append((key, s, tkey, t, g, rule))
    hit_labels = {lab for labs in targets.values() for lab in labs}
    if sources & hit_labels:
        raise EngineError(f"summands both source and target on page {p.r}: {sorted(sources & hit_labels)}")
    replaced: dict = {}
    for key, s, tkey, t, g, rule in pairs:
        try:
            ker, coker = pair_kernel_cokernel(s.module, t.module, g, p.n)
        except CatalogError as exc:
            if p.view is not None and not (p.view.contains(key) and p.view.contains(tkey)):
                # Padding cells lose partners that lie beyond the padded
                # window, so their modules can drift out of step.  Such
                # cells never influence the view; drop them.
                replaced[(key, s.label)] = None
                replaced[(tkey, t.label)] = None
                continue
            raise EngineError(f"page {p.r}, cell {key} -> {tkey}: {exc}") from exc
        if ker == s.module and coker == t.module:
            continue
        replaced[(key, s.label)] = (
            None if ker.zero else Summand(s.exps, ker, _relabel(s.label, s.module, ker, g, t.module))
        )
        replaced[(tkey, t.label)] = (
            None if coker.zero else Summand(t.exps, coker, _corelabel(t.label, t.module, coker, g))
        )
    cells = {}
    for key, ss in p.cells.items():
        new = []
        for s in ss:
            s2 = replaced.get((key, s.label), s)
            if s2 is not None:
                new.append(s2)
        if new:
            cells[key] = tuple(new)
    return replace(p, r=p.r + 1, cells=cells)


def last_page(rules: Sequence[DifferentialRule]) -> int:
    return max((rule.page for rule in rules), default=1)


def advance(p: Page, rules: Sequence[DifferentialRule], to_page: int) -> Page:
    """Turn pages until page ``to_page`` is reached."""
    if to_page < p.r:
        raise EngineError(f"cannot go back from page {p.r} to {to_page}")
    pages = {rule.page for rule in rules}
    while p.r < to_page:
        p = turn_page(p, rules) if p.r in pages else replace(p, r=p.r + 1)
    return p


def einf(p: Page, rules: Sequence[DifferentialRule]) -> Page:
    """E_infinity inside the padded window."""
    return advance(p, rules, max(p.r, last_page(rules) + 1))


def pages(p: Page, rules: Sequence[DifferentialRule]) -> dict[int, Page]:
    """Every page from ``p.r`` up to E_infinity, keyed by page index."""
    out = {p.r: p}
    end = max(p.r, last_page(rules) + 1)
    while p.r < end:
        p = advance(p, rules, p.r + 1)
        out[p.r] = p
    return out


def restrict_to_integer_grading(p: Page) -> Page:
    """Keep monomials of sigma-degree 0, keyed by (stem, filt)."""
    if not p.ro_graded:
        raise EngineError("page is already integer graded")
    cells = {k: v for k, v in p.cells.items() if k[2] == 0}
    w = p.window
    win = Window(w.stems, w.filts)
    view = Window(p.view.stems, p.view.filts) if p.view else None
    return replace(p, cells=cells, ro_graded=False, window=win, view=view)


def shift_page(p: Page, d: int) -> Page:
    """Re-key every cell by (stem + d, filt)."""
    if d == 0:
        return p
    cells = {(k[0] + d, k[1], k[2]): v for k, v in p.cells.items()}
    view = p.view.shift(d) if p.view else None
    return replace(p, cells=cells, stem_offset=p.stem_offset + d, window=p.window.shift(d), view=view)


def _flip(w: Window) -> Window:
    return Window((1 - w.stems[1], 1 - w.stems[0]), w.filts, w.ys)


def dualize(p: Page) -> Page:
    """Pontryagin dual page: cell (stem, s) goes to (-stem, s).

    Homological pages become cohomological and vice versa; modules are
    dualized one by one.
    """
    cells = {}
    for key, ss in p.cells.items():
        new = []
        for s in ss:
            try:
                dm = pontryagin_dual(s.module)
            except CatalogError as exc:
                raise EngineError(f"cell {key} ({s.label}): {exc}") from exc
            new.append(Summand(s.exps, dm, _dual_label(s.label)))
        cells[(-key[0], key[1], key[2])] = tuple(new)
    return replace(
        p,
        cells=cells,
        homological=not p.homological,
        stem_sign=-p.stem_sign,
        stem_offset=-p.stem_offset,
        window=_flip(p.window),
        view=_flip(p.view) if p.view else None,
    )


def _dual_label(label: str) -> str:
    return label[2:-1] if label.startswith("D(") and label.endswith(")") else f"D({label})"


def dualize_rules(p: Page, rules: Sequence[DifferentialRule]) -> list[DifferentialRule]:
    """Rules of the dual page: every differential read backwards."""
    out = []
    for rule in rules:
        _, dfilt = p.alphabet.degree(rule.shift)
        out.append(rule.reversed(dfilt))
    return out


def page_to_json(p: Page, preset_label: Optional[str] = None) -> dict:
    cells = []
    for key in sorted(p.cells):
        entry = {
            "stem": key[0],
            "filt": key[1],
            "summands": [
                {
                    "label": s.label,
                    "module": s.module.to_json(),
                    "exponents": dict(zip(p.alphabet.gens, s.exps)),
                }
                for s in sorted(p.cells[key], key=lambda s: s.label)
            ],
        }
        if p.ro_graded:
            entry["y"] = key[2]
        cells.append(entry)
    return {
        "schema": SCHEMA,
        "preset": preset_label or p.preset,
        "height": p.n,
        "page": p.r,
        "window": p.window.to_json(),
        "view": p.view.to_json() if p.view else None,
        "alphabet": p.alphabet.name,
        "homological": p.homological,
        "ro_graded": p.ro_graded,
        "stem_sign": p.stem_sign,
        "stem_offset": p.stem_offset,
        "base_divided": sorted(p.base_divided),
        "k": p.k,
        "cells": cells,
    }


def page_from_json(d: dict) -> Page:
    if d.get("schema") != SCHEMA:
        raise EngineError(f"unsupported schema {d.get('schema')!r}")
    alphabet = ALPHABETS[d["alphabet"]]
    cells = {}
    for c in d["cells"]:
        key = (c["stem"], c["filt"], c.get("y", 0))
        cells[key] = tuple(
            sorted(
                (
                    Summand(
                        tuple(s["exponents"][g] for g in alphabet.gens),
                        CyclicModule.from_json(s["module"]),
                        s["label"],
                    )
                    for s in c["summands"]
                ),
                key=lambda s: s.label,
            )
        )
    return Page(
        preset=d["preset"],
        n=d["height"],
        r=d["page"],
        alphabet=alphabet,
        window=Window.from_json(d["window"]),
        cells=cells,
        homological=d["homological"],
        ro_graded=d["ro_graded"],
        stem_sign=d["stem_sign"],
        stem_offset=d["stem_offset"],
        base_divided=frozenset(d["base_divided"]),
        k=d["k"],
        view=Window.from_json(d["view"]) if d.get("view") else None,
    )


def dumps(p: Page) -> str:
    return json.dumps(page_to_json(p), sort_keys=True, indent=1)


def loads(text: str) -> Page:
    return page_from_json(json.loads(text))
