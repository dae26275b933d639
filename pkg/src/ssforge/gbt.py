"""Transporting differentials along a fiber sequence of Tate spectral sequences.

The sequences are ``E_n/I_k^oo -> v_k^{-1}E_n/I_k^oo -> E_n/I_{k+1}^oo`` (X, Y,
Z).  Classes are single monomials: a page monomial (u and alpha exponents)
with absolute exponents of u_1..u_{n-1}.  Three inference rules produce new
differentials, and each one checks its hypotheses on computed pages before
it emits anything:

* the connecting map, when the middle E_2 page vanishes at both ends;
* naturality along a map of spectral sequences;
* the eight-class pattern where ``d_r'`` on X and ``d_r`` on Y force ``d_r'`` on Z.

:func:`derive_families` runs the induction on k and turns each witness into a
rule: differentials are alpha-linear and u^{2^{l+1}} is a d_r-cycle for
r <= 2^{l+1}-1, so one witness fixes a whole congruence class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from .coefficients import CyclicModule, Kind
from .pages import DifferentialRule, Window, leibniz_differential
from .presets import PresetId, SpectralSequence, tate_rules, vkinv_rules


class WitnessError(ValueError):
    """A hypothesis of an inference rule failed on the computed pages."""


@dataclass(frozen=True)
class Element:
    """A monomial class: page exponents plus absolute u_i exponents."""

    exps: tuple[int, ...]
    coeffs: tuple[int, ...]

    def times_u(self, l: int) -> "Element":
        if l > len(self.coeffs):
            return self
        c = list(self.coeffs)
        c[l - 1] += 1
        return Element(self.exps, tuple(c))

    def render(self) -> str:
        e, j = self.exps
        num = [f"u^{e}"] + ([f"alpha^{j}"] if j else [])
        num += [f"u{i}^{c}" for i, c in enumerate(self.coeffs, 1) if c]
        return "*".join(num)

    def to_json(self) -> dict:
        return {"u": self.exps[0], "alpha": self.exps[1], "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, d: dict) -> "Element":
        return cls((d["u"], d["alpha"]), tuple(d["coeffs"]))


def in_module(m: CyclicModule, coeffs, base_divided) -> bool:
    """Whether the monomial with these u_i exponents is a basis element of ``m``."""
    if m.zero or m.kind is not Kind.MOD2:
        return False
    for i, c in enumerate(coeffs, 1):
        if i in m.divided:
            ok = c <= -1
        elif i in m.surviving:
            ok = c >= 0
        elif i in m.laurent:
            ok = True
        else:
            ok = c == (-1 if i in base_divided else 0)
        if not ok:
            return False
    return not m.ideal or any(coeffs[j - 1] >= 1 for j in m.ideal)


def alive(ss: SpectralSequence, x: Element, r: int) -> bool:
    page = ss.page(r)
    s = page.find(x.exps)
    return s is not None and in_module(s.module, x.coeffs, page.base_divided)


def death_page(ss: SpectralSequence, x: Element, r: int) -> Optional[int]:
    """First page at or below ``r`` where ``x`` is no longer present."""
    for q in range(2, r + 1):
        if not alive(ss, x, q):
            return q
    return None


def differential(ss: SpectralSequence, x: Element, r: int) -> Optional[Element]:
    """d_r of a class alive on page r, read from the rules; None when zero."""
    page = ss.page(r)
    if not alive(ss, x, r):
        raise WitnessError(f"{x.render()} is not present on page {r} of {page.preset}")
    hit = leibniz_differential(page, page.find(x.exps), ss.rules)
    if hit is None:
        return None
    texps, g, _ = hit
    y = Element(texps, x.coeffs).times_u(g)
    return y if alive(ss, y, r) else None


@dataclass(frozen=True)
class DifferentialWitness:
    where: str
    r: int
    source: Element
    target: Element
    provenance: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "where": self.where,
            "r": self.r,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "provenance": list(self.provenance),
        }


def check_witness(ss: SpectralSequence, w: DifferentialWitness) -> None:
    got = differential(ss, w.source, w.r)
    if got != w.target:
        shown = got.render() if got else "0"
        raise WitnessError(
            f"d{w.r}({w.source.render()}) = {shown} on {ss.e2.preset}, not {w.target.render()}"
        )


@dataclass
class PageMap:
    """A map of spectral sequences given on monomial classes."""

    name: str
    source: SpectralSequence
    target: SpectralSequence
    fn: Callable[[Element], Optional[Element]]

    def __call__(self, x: Element) -> Optional[Element]:
        return self.fn(x)


def identity_map(ss: SpectralSequence) -> PageMap:
    return PageMap("id", ss, ss, lambda x: x)


@dataclass
class FiberSequenceSpec:
    """X -> Y -> Z with maps i, p and the connecting map d: Z -> X."""

    n: int
    k: int
    X: SpectralSequence
    Y: SpectralSequence
    Z: SpectralSequence

    def i(self, x: Element) -> Optional[Element]:
        if self.k == 0:
            return None
        return x

    def p(self, y: Element) -> Optional[Element]:
        if self.k == 0 or y.coeffs[self.k - 1] >= 0:
            return None
        return y

    def boundary(self, z: Element) -> Optional[Element]:
        if self.k != 0:
            return None
        e, j = z.exps
        return Element((e - 1, j + 1), z.coeffs)

    def boundary_inverse(self, x: Element) -> Element:
        if self.k != 0:
            raise WitnessError("the connecting map vanishes on E_2 for k >= 1")
        e, j = x.exps
        return Element((e + 1, j - 1), x.coeffs)

    @property
    def i_map(self) -> PageMap:
        return PageMap("i", self.X, self.Y, self.i)

    @property
    def p_map(self) -> PageMap:
        return PageMap("p", self.Y, self.Z, self.p)


def derivation_window(n: int) -> Window:
    return Window((-(2 ** (n + 3)), 2 ** (n + 3)), (-(2 ** (n + 2)), 2 ** (n + 2)))


def fiber_sequence(n: int, k: int, x_rules=None, y_rules=None, z_rules=None, window=None):
    """The fiber sequence for E_n/I_k^oo (k = 0 is E_n itself)."""
    window = window or derivation_window(n)
    if k == 0:
        X = SpectralSequence.of(PresetId.TATE_EN, n, window, rules=x_rules)
    else:
        X = SpectralSequence.of(PresetId.TATE_EN_MOD_IK, n, window, k=k, rules=x_rules)
    Y = SpectralSequence.of(PresetId.TATE_VKINV, n, window, k=k, rules=y_rules)
    Z = SpectralSequence.of(PresetId.TATE_EN_MOD_IK, n, window, k=k + 1, rules=z_rules)
    return FiberSequenceSpec(n, k, X, Y, Z)


def apply_connecting(fs: FiberSequenceSpec, known: DifferentialWitness) -> DifferentialWitness:
    """d_r(d^{-1} a) = d^{-1}(d_r a) where the middle E_2 page vanishes."""
    check_witness(fs.X, known)
    za = fs.boundary_inverse(known.source)
    zb = fs.boundary_inverse(known.target)
    if fs.boundary(za) != known.source or fs.boundary(zb) != known.target:
        raise WitnessError("connecting map does not invert")
    y2 = fs.Y.e2
    for z, x in ((za, known.source), (zb, known.target)):
        for key in (fs.Z.e2.key_of(z.exps), fs.X.e2.key_of(x.exps)):
            if y2.cells.get(key):
                raise WitnessError(f"middle E_2 page is non-zero at {key[:2]}; connecting map not invertible")
    for z in (za, zb):
        if not alive(fs.Z, z, known.r):
            raise WitnessError(f"{z.render()} does not reach page {known.r} of {fs.Z.e2.preset}")
    return DifferentialWitness(
        fs.Z.e2.preset, known.r, za, zb, ("connecting", known.where, known.source.render())
    )


def apply_naturality(f: PageMap, known: DifferentialWitness) -> DifferentialWitness:
    """d_r f(x) = f(d_r x), once both sides are checked on computed pages."""
    check_witness(f.source, known)
    fx, fy = f(known.source), f(known.target)
    if fx is None:
        raise WitnessError(f"{f.name} sends {known.source.render()} to zero")
    if fy is None:
        raise WitnessError(f"{f.name} sends {known.target.render()} to zero")
    for z in (fx, fy):
        died = death_page(f.target, z, known.r)
        if died is not None:
            raise WitnessError(f"{z.render()} dies on page {died} of {f.target.e2.preset}")
    if f.name == "id":
        return known
    return DifferentialWitness(
        f.target.e2.preset, known.r, fx, fy, ("naturality", f.name, known.where, known.source.render())
    )


@dataclass(frozen=True)
class GBTWitness:
    r: int
    r_prime: int
    x: Element
    x_prime: Element
    y1: Element
    y1_prime: Element
    y2: Element
    y2_prime: Element
    z: Element
    z_prime: Element

    def to_json(self) -> dict:
        out = {"r": self.r, "r_prime": self.r_prime}
        for name in ("x", "x_prime", "y1", "y1_prime", "y2", "y2_prime", "z", "z_prime"):
            out[name] = getattr(self, name).to_json()
        return out

    @classmethod
    def from_json(cls, d: dict) -> "GBTWitness":
        names = ("x", "x_prime", "y1", "y1_prime", "y2", "y2_prime", "z", "z_prime")
        return cls(d["r"], d["r_prime"], *(Element.from_json(d[x]) for x in names))


def apply_gbt_case3(fs: FiberSequenceSpec, w: GBTWitness) -> DifferentialWitness:
    """From d_r' x = x', d_r y1 = y1', d_r y2 = y2', i x = y1', i x' = y2',
    p y1 = z and p y2 = z', conclude d_r' z = z'."""
    if not w.r < w.r_prime:
        raise WitnessError(f"need r < r', got r={w.r}, r'={w.r_prime}")
    relations = [
        ("d_r' x = x'", lambda: differential(fs.X, w.x, w.r_prime) == w.x_prime),
        ("d_r y1 = y1'", lambda: differential(fs.Y, w.y1, w.r) == w.y1_prime),
        ("d_r y2 = y2'", lambda: differential(fs.Y, w.y2, w.r) == w.y2_prime),
        ("i(x) = y1'", lambda: fs.i(w.x) == w.y1_prime),
        ("i(x') = y2'", lambda: fs.i(w.x_prime) == w.y2_prime),
        ("p(y1) = z", lambda: fs.p(w.y1) == w.z),
        ("p(y2) = z'", lambda: fs.p(w.y2) == w.z_prime),
    ]
    for name, check in relations:
        try:
            ok = check()
        except WitnessError as exc:
            raise WitnessError(f"relation {name} fails: {exc}") from exc
        if not ok:
            raise WitnessError(f"relation {name} fails")
    zpage = fs.Z.e2
    kz, kzp = zpage.key_of(w.z.exps), zpage.key_of(w.z_prime.exps)
    if kzp[:2] != (kz[0] - 1, kz[1] + w.r_prime):
        raise WitnessError(f"degrees: z at {kz[:2]}, z' at {kzp[:2]}, r'={w.r_prime}")
    for z in (w.z, w.z_prime):
        died = death_page(fs.Z, z, w.r_prime)
        if died is not None:
            raise WitnessError(f"{z.render()} dies on page {died} of {zpage.preset}")
    return DifferentialWitness(
        zpage.preset, w.r_prime, w.z, w.z_prime, ("case 3", w.x.render(), w.y1.render(), w.y2.render())
    )


def generalize(w: DifferentialWitness, n: int) -> DifferentialRule:
    """The congruence family of a single Tate differential."""
    m = w.r + 1
    if m & (m - 1):
        raise WitnessError(f"page {w.r} is not of the form 2^(l+1)-1")
    diff = [b - a for a, b in zip(w.source.coeffs, w.target.coeffs)]
    if any(d not in (0, 1) for d in diff) or sum(diff) > 1:
        raise WitnessError("coefficient change is not multiplication by a single u_l")
    l = diff.index(1) + 1 if 1 in diff else n
    if m != 2 ** (l + 1):
        raise WitnessError(f"d{w.r} multiplies by u{l}")
    rule = DifferentialRule(
        page=w.r,
        coeffs=(1, 0),
        modulus=m,
        residue=w.source.exps[0] % m,
        shift=tuple(b - a for a, b in zip(w.source.exps, w.target.exps)),
        multiplier=l,
        name=f"derived {w.where} l={l}",
    )
    return rule


def representative(ss: SpectralSequence, rule: DifferentialRule, j: int) -> Element:
    """Lowest positive source of ``rule`` in filtration j.

    Coefficients sit at the bottom (-1 for divided variables, 0 otherwise),
    except that a divided multiplier variable sits at -2 so the image is
    non-zero.
    """
    e = rule.residue % rule.modulus
    if e == 0:
        e = rule.modulus
    base = ss.e2.base_divided
    coeffs = [-1 if i in base else 0 for i in range(1, ss.n)]
    if rule.multiplier in base:
        coeffs[rule.multiplier - 1] = -2
    return Element((e, j), tuple(coeffs))


def preimage(rule: DifferentialRule, target: Element, n: int) -> Element:
    """The source of ``rule`` hitting ``target``."""
    exps = tuple(t - s for t, s in zip(target.exps, rule.shift))
    coeffs = list(target.coeffs)
    if rule.multiplier < n:
        coeffs[rule.multiplier - 1] -= 1
    return Element(exps, tuple(coeffs))


def witness_of(ss: SpectralSequence, x: Element, r: int, where: str) -> DifferentialWitness:
    y = differential(ss, x, r)
    if y is None:
        raise WitnessError(f"d{r}({x.render()}) vanishes on {ss.e2.preset}")
    return DifferentialWitness(where, r, x, y, ("computed",))


@dataclass
class Derivation:
    """Rules and witnesses produced for one step k -> k+1."""

    n: int
    k: int
    y_rules: list = field(default_factory=list)
    z_rules: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    gbt: list = field(default_factory=list)


def ro_derived_tate_rules(n: int) -> list[DifferentialRule]:
    """Tate differentials of E_n read off the RO(C2)-graded fixed point rules.

    The integer-graded class ubar^{2b+c} u2s^b asig^c is u^{2b} alpha^c, so the
    rule on u2s-exponents becomes a rule on u-exponents.
    """
    from .presets import hfpss_rules

    out = []
    for rule in hfpss_rules(n):
        da, db, dc = rule.shift
        out.append(
            DifferentialRule(
                page=rule.page,
                coeffs=(1, 0),
                modulus=2 * rule.modulus,
                residue=2 * rule.residue,
                shift=(2 * db, dc),
                multiplier=rule.multiplier,
                name=f"tate from {rule.name}",
            )
        )
    return out


def derive_step(n: int, k: int, x_rules, window=None) -> Derivation:
    """Differentials of Z = E_n/I_{k+1}^oo (and Y) from those of X = E_n/I_k^oo."""
    out = Derivation(n, k)
    fs = fiber_sequence(n, k, x_rules, [], [], window)
    for l in range(1, n + 1):
        r = 2 ** (l + 1) - 1
        (x_rule,) = [rule for rule in x_rules if rule.page == r]
        if k == 0:
            x = representative(fs.X, x_rule, 1)
            zw = apply_connecting(fs, witness_of(fs.X, x, r, fs.X.e2.preset))
        elif l <= k:
            x = representative(fs.X, x_rule, 0)
            yw = apply_naturality(fs.i_map, witness_of(fs.X, x, r, fs.X.e2.preset))
            out.witnesses.append(yw)
            out.y_rules.append(generalize(yw, n))
            fs = fiber_sequence(n, k, x_rules, out.y_rules, out.z_rules, window)
            c = list(yw.source.coeffs)
            c[k - 1] = -2
            y = Element(yw.source.exps, tuple(c))
            zw = apply_naturality(fs.p_map, witness_of(fs.Y, y, r, fs.Y.e2.preset))
        else:
            rk = 2 ** (k + 1) - 1
            (y_iso,) = [rule for rule in out.y_rules if rule.page == rk]
            x = representative(fs.X, x_rule, 0)
            xp = differential(fs.X, x, r)
            y1p, y2p = fs.i(x), fs.i(xp)
            y1, y2 = preimage(y_iso, y1p, n), preimage(y_iso, y2p, n)
            w = GBTWitness(rk, r, x, xp, y1, y1p, y2, y2p, fs.p(y1), fs.p(y2))
            out.gbt.append(w)
            zw = apply_gbt_case3(fs, w)
        out.witnesses.append(zw)
        out.z_rules.append(generalize(zw, n))
        fs = fiber_sequence(n, k, x_rules, out.y_rules, out.z_rules, window)
    return out


def derive_families(n: int, window=None) -> dict[int, Derivation]:
    """Run the induction from E_n up to E_n/I_n^oo; keyed by k+1."""
    x_rules = ro_derived_tate_rules(n)
    out = {}
    for k in range(n):
        d = derive_step(n, k, x_rules, window)
        out[k + 1] = d
        x_rules = d.z_rules
    return out


def canonical(rules) -> list:
    return sorted(rule.canonical() for rule in rules)


def closed_form_matches(n: int, derivations: dict[int, Derivation]) -> dict[str, bool]:
    """Derived families against the closed forms, per sequence."""
    out = {}
    for kk, d in derivations.items():
        out[f"tate-en-mod-ik({kk})"] = canonical(d.z_rules) == canonical(tate_rules(n, kk))
        if d.k >= 1:
            out[f"tate-vkinv({d.k})"] = canonical(d.y_rules) == canonical(vkinv_rules(n, d.k))
    return out


def worked_example(n: int = 2, k: int = 1, l: int = 2) -> tuple[GBTWitness, FiberSequenceSpec]:
    """The eight classes behind d_{2^{l+1}-1} on E_n/I_{k+1}^oo, with their sequence."""
    derivations = derive_families(n)
    d = derivations[k + 1]
    x_rules = derivations[k].z_rules if k else ro_derived_tate_rules(n)
    fs = fiber_sequence(n, k, x_rules, d.y_rules, d.z_rules)
    (w,) = [g for g in d.gbt if g.r_prime == 2 ** (l + 1) - 1]
    return w, fs


def dump_witness(w: GBTWitness, n: int, k: int, l: int) -> str:
    return json.dumps({"n": n, "k": k, "l": l, "witness": w.to_json()}, sort_keys=True, indent=1)


def load_witness(name: str = "worked_example_n2.json") -> tuple[dict, GBTWitness]:
    """A stored eight-class witness from the package data: (header, witness)."""
    from importlib.resources import files

    d = json.loads(files("ssforge").joinpath("data", name).read_text())
    return {k: d[k] for k in ("n", "k", "l")}, GBTWitness.from_json(d["witness"])
