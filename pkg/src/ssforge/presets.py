"""E_2 pages and differentials of every spectral sequence in the package."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .coefficients import RingContext, mod2, qz, witt
from .pages import (
    HFPSS_ALPHABET,
    HOSS_ALPHABET,
    TATE_ALPHABET,
    DifferentialRule,
    EngineError,
    Page,
    Summand,
    Window,
    advance,
    dualize,
    dualize_rules,
    einf,
    last_page,
    make_page,
    restrict_to_integer_grading,
    shift_page,
)


class PresetId(str, Enum):
    HFPSS_EN = "hfpss-en"
    TATE_EN = "tate-en"
    TATE_EN_MOD_IK = "tate-en-mod-ik"
    TATE_VKINV = "tate-vkinv"
    HOSS_EN_MOD_IN = "hoss-en-mod-in"
    HFPSS_IEN = "hfpss-ien"
    PIC_SS = "pic-ss"


def period(n: int) -> int:
    return 2 ** (n + 2)


def padding(n: int) -> tuple[int, int]:
    """Stem and filtration padding around a requested window.

    A cell's fate on page r+1 depends on its partner under d_r, whose fate
    depends on earlier partners, and so on.  Such chains have at most one
    link per page with a differential, each link at most 2^{n+1}-1 long in
    filtration and 1 in stem.
    """
    return 2 ** (n + 1), n * 2 ** (n + 1)


def _nu(x: int) -> int:
    return (x & -x).bit_length() - 1


def _range(lo_hi):
    return range(lo_hi[0], lo_hi[1])


def hfpss_rules(n: int) -> list[DifferentialRule]:
    """d_{2^{v+2}-1} on monomials whose u_{2sigma}-exponent has 2-adic valuation v."""
    rules = []
    for v in range(n):
        r = 2 ** (v + 2) - 1
        rules.append(
            DifferentialRule(
                page=r,
                coeffs=(0, 1, 0),
                modulus=2 ** (v + 1),
                residue=2**v,
                shift=(2 ** (v + 1) - 1, -(2**v), r),
                multiplier=v + 1,
                name=f"hfpss d{r}: nu(u2s)={v}",
            )
        )
    return rules


def tate_rules(n: int, k: int) -> list[DifferentialRule]:
    """Differential families of the Tate spectral sequence of E_n/I_k^oo.

    For l < k the sources have u-exponent -1 mod 2^{l+1}; for k <= l <= n
    they have u-exponent 2^l + 2^k - 1 mod 2^{l+1}.  In both cases d_r with
    r = 2^{l+1}-1 lowers the u-exponent by 2^l, raises the alpha-exponent
    by r and multiplies the coefficient by u_l.  k = 0 is E_n itself.
    """
    if not 0 <= k <= n:
        raise EngineError(f"need 0 <= k <= n, got k={k}, n={n}")
    rules = []
    for l in range(1, n + 1):
        r = 2 ** (l + 1) - 1
        m = 2 ** (l + 1)
        if l < k:
            residue, fam = m - 1, 1
        else:
            residue, fam = (2**l + (2**k if k else 1) - 1) % m, 2
        rules.append(
            DifferentialRule(
                page=r,
                coeffs=(1, 0),
                modulus=m,
                residue=residue,
                shift=(-(2**l), r),
                multiplier=l,
                name=f"tate k={k} family ({fam}) l={l}",
            )
        )
    return rules


def vkinv_rules(n: int, k: int) -> list[DifferentialRule]:
    """Differentials of the Tate spectral sequence of v_k^{-1}E_n/I_k^oo."""
    if k == 0:
        return []
    return [rule for rule in tate_rules(n, k) if rule.multiplier <= k]


def tate_to_hoss_rule(rule: DifferentialRule) -> DifferentialRule:
    """Read a Tate differential in negative filtration as a homotopy orbit one.

    Tate class u^e alpha^j with j <= -1 corresponds to orbit class u^w a^s
    with s = -j - 1 and w = e + j.
    """
    de, dj = rule.shift
    return DifferentialRule(
        page=rule.page,
        coeffs=(1, 1),
        offset=1,
        modulus=rule.modulus,
        residue=rule.residue,
        shift=(de + dj, -dj),
        multiplier=rule.multiplier,
        min_filt=rule.page,
        name=f"orbit {rule.name}",
    )


def hoss_rules(n: int) -> list[DifferentialRule]:
    return [tate_to_hoss_rule(rule) for rule in tate_rules(n, n)]


def _prefix(k: int) -> str:
    if k <= 0:
        return ""
    return "/(2" + "".join(f"u{i}" for i in range(1, k)) + ")"


def _hfpss_summands(n, window, ro, tate=False):
    allv = range(1, n)
    ys = _range(window.ys) if ro else (0,)
    out = []
    for x in _range(window.stems):
        for c in _range(window.filts):
            if c < 0 and not tate:
                continue
            for y in ys:
                if (x + y + c) % 2 or (x - y - c) % 4:
                    continue
                exps = ((x + y + c) // 2, (x - y - c) // 4, c)
                module = witt(allv) if c == 0 and not tate else mod2((), allv)
                out.append(Summand(exps, module, HFPSS_ALPHABET.render(exps)))
    return out


def _tate_summands(n, window, parity, module, prefix):
    out = []
    for x in _range(window.stems):
        for j in _range(window.filts):
            if (x - j) % 2:
                continue
            e = (x - j) // 2
            if e % 2 != parity:
                continue
            exps = (e, j)
            out.append(Summand(exps, module, TATE_ALPHABET.render(exps) + prefix))
    return out


def _hoss_summands(n, window):
    allv = range(1, n)
    out = []
    for x in _range(window.stems):
        for s in _range(window.filts):
            if s < 0 or (x - s) % 2:
                continue
            w = (x - s) // 2
            if s == 0:
                if w % 2:
                    continue
                module = qz(allv)
            else:
                if (w - s) % 2:
                    continue
                module = mod2(allv, ())
            exps = (w, s)
            out.append(Summand(exps, module, HOSS_ALPHABET.render(exps) + _prefix(n)))
    return out


def build(pid, ctx: RingContext, window: Window, k: Optional[int] = None, ro: bool = False):
    """E_2 page (padded) and differential rules of a preset.

    The returned page covers ``window`` enlarged by :func:`padding`; its
    ``view`` is ``window`` itself.  ``ro`` asks for the RO(C2)-graded page
    of ``hfpss-en``.
    """
    pid = PresetId(pid)
    n = ctx.n
    ds, df = padding(n)
    padded = window.pad(ds, df)
    allv = tuple(range(1, n))
    label = pid.value
    if pid in (PresetId.TATE_EN_MOD_IK, PresetId.TATE_VKINV):
        if k is None:
            raise EngineError(f"{pid.value} needs k")
        lo = 1 if pid is PresetId.TATE_EN_MOD_IK else 0
        if not lo <= k <= n:
            raise EngineError(f"{pid.value} needs {lo} <= k <= n, got k={k}, n={n}")
        label = f"{pid.value}({k})"
    if pid is PresetId.HFPSS_EN:
        page = make_page(label, n, HFPSS_ALPHABET, padded, _hfpss_summands(n, padded, ro), ro_graded=ro)
        rules = hfpss_rules(n)
    elif pid is PresetId.TATE_EN:
        summands = _tate_summands(n, padded, 0, mod2((), allv), "")
        page = make_page(label, n, TATE_ALPHABET, padded, summands, k=0)
        rules = tate_rules(n, 0)
    elif pid is PresetId.TATE_EN_MOD_IK:
        module = mod2(range(1, k), range(k, n))
        summands = _tate_summands(n, padded, 1, module, _prefix(k))
        page = make_page(
            label, n, TATE_ALPHABET, padded, summands, k=k, base_divided=frozenset(range(1, k))
        )
        rules = tate_rules(n, k)
    elif pid is PresetId.TATE_VKINV:
        if k == 0:
            summands = []
        else:
            laurent = (k,) if k < n else ()
            module = mod2(range(1, k), range(k + 1, n), laurent)
            summands = _tate_summands(n, padded, 1, module, _prefix(k))
        page = make_page(
            label, n, TATE_ALPHABET, padded, summands, k=k, base_divided=frozenset(range(1, k))
        )
        rules = vkinv_rules(n, k)
    elif pid is PresetId.HOSS_EN_MOD_IN:
        page = make_page(
            label,
            n,
            HOSS_ALPHABET,
            padded,
            _hoss_summands(n, padded),
            homological=True,
            k=n,
            base_divided=frozenset(allv),
        )
        rules = hoss_rules(n)
    elif pid is PresetId.HFPSS_IEN:
        hwin = Window((n + 1 - window.stems[1], n + 1 - window.stems[0]), window.filts)
        hoss, hrules = build(PresetId.HOSS_EN_MOD_IN, ctx, hwin)
        page = dualize(shift_page(hoss, -n))
        rules = dualize_rules(hoss, hrules)
        page = replace(page, preset=label)
        return page, rules
    else:
        add, arules = build(PresetId.HFPSS_EN, ctx, window.shift(-1))
        page = shift_page(add, 1)
        cells = {key: v for key, v in page.cells.items() if key[0] + key[1] >= 2}
        page = replace(page, preset=label, cells=cells)
        rules = [replace(rule, min_filt=rule.page + 1, name=f"imported {rule.name}") for rule in arules]
        return page, rules
    return replace(page, view=window), rules


@dataclass
class SpectralSequence:
    """A preset with its pages computed lazily and cached."""

    e2: Page
    rules: list
    _pages: dict = field(default_factory=dict, repr=False)

    @classmethod
    def of(cls, pid, n: int, window: Window, k: Optional[int] = None, ro: bool = False, rules=None):
        e2, default = build(pid, RingContext(n), window, k=k, ro=ro)
        return cls(e2, list(default if rules is None else rules))

    @property
    def n(self) -> int:
        return self.e2.n

    @property
    def last(self) -> int:
        return last_page(self.rules) + 1

    def page(self, r: int) -> Page:
        """Padded page r (pages past the last differential are E_infinity)."""
        r = max(2, min(r, max(self.last, 2)))
        if r not in self._pages:
            below = [q for q in self._pages if q <= r]
            start = self._pages[max(below)] if below else self.e2
            self._pages[r] = advance(start, self.rules, r)
        return self._pages[r]

    def einf(self) -> Page:
        return self.page(self.last)

    def view(self, r: Optional[int] = None) -> Page:
        """Page r (E_infinity if None) cropped to the requested window."""
        return (self.einf() if r is None else self.page(r)).crop()


def compute(pid, n: int, window: Window, page: Optional[int] = None, k=None, ro=False) -> Page:
    """Page ``page`` (E_infinity if None) of a preset, cropped to ``window``."""
    return SpectralSequence.of(pid, n, window, k=k, ro=ro).view(page)


def integer_page(pid, n: int, window: Window, page: Optional[int] = None) -> Page:
    """Integer-graded page computed through the RO(C2)-graded one."""
    ss = SpectralSequence.of(pid, n, window, ro=True)
    return restrict_to_integer_grading(ss.view(page))


def ro_tate_page(n: int, window: Window) -> Page:
    """RO(C2)-graded Tate E_2 page: the homotopy fixed point page with a_sigma inverted."""
    ds, df = padding(n)
    padded = window.pad(ds, df)
    summands = _hfpss_summands(n, padded, True, tate=True)
    page = make_page("hfpss-en[a^-1]", n, HFPSS_ALPHABET, padded, summands, ro_graded=True)
    return replace(page, view=window)


def ro_to_tate(exps: tuple[int, int, int]) -> tuple[int, int]:
    """ubar^a u2s^b asig^c with a = 2b + c is u^{2b} alpha^c."""
    a, b, c = exps
    if a != 2 * b + c:
        raise EngineError(f"{exps} is not integer graded")
    return (2 * b, c)


__all__ = [
    "PresetId",
    "SpectralSequence",
    "build",
    "compute",
    "einf",
    "hfpss_rules",
    "hoss_rules",
    "integer_page",
    "padding",
    "period",
    "ro_tate_page",
    "ro_to_tate",
    "tate_rules",
    "vkinv_rules",
]
