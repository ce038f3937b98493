"""Signs of the Y-functions attached to Springer local systems.

On a unipotent class C with component group A = A(u0), the function Y_E is
delta_E * Tr(a, E_u0) on the G^F-class of C^F labelled by the A-class of a.
Given p~ (the Q_1-expansion coefficients) the value of Q_1 on each piece is a
signed combination of character values of A; comparing with fixed-point
counts eliminates sign vectors.
"""
from __future__ import annotations

import cmath
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .lusztig_shoji import class_index, evaluate_poly, format_poly, parse_poly
from .weyl import root_system


class SignDataError(ValueError):
    pass


class SignContradiction(ValueError):
    def __init__(self, message, resolution=None):
        super().__init__(message)
        self.resolution = resolution


# -- component groups --------------------------------------------------------------

@dataclass(frozen=True)
class ComponentGroupTable:
    group_id: str
    class_labels: tuple
    class_sizes: tuple
    char_labels: tuple
    values: tuple          # values[char][class]

    @property
    def order(self) -> int:
        return sum(self.class_sizes)

    def class_pos(self, label) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise SignDataError(f"{self.group_id} has no class {label!r}") from None

    def char_pos(self, label) -> int:
        try:
            return self.char_labels.index(label)
        except ValueError:
            raise SignDataError(f"{self.group_id} has no character {label!r}") from None

    def value(self, char, cls):
        return self.values[self.char_pos(char)][self.class_pos(cls)]

    def dim(self, char):
        return self.value(char, self.class_labels[0])

    def centraliser_order(self, cls) -> int:
        return self.order // self.class_sizes[self.class_pos(cls)]

    def validate(self) -> None:
        X = np.array(self.values, dtype=complex)
        sizes = np.array(self.class_sizes, dtype=float)
        n = len(self.class_labels)
        if X.shape != (n, n) or self.class_labels[0] != "1" or self.char_labels[0] != "1":
            raise SignDataError(f"{self.group_id}: table is not square or not normalised")
        rows = (X * sizes) @ X.conj().T / self.order
        cols = X.conj().T @ X
        if not np.allclose(rows, np.eye(n), atol=1e-9):
            raise SignDataError(f"{self.group_id}: row orthogonality fails")
        if not np.allclose(cols, np.diag(self.order / sizes), atol=1e-9):
            raise SignDataError(f"{self.group_id}: column orthogonality fails")


def _table(gid, classes, sizes, chars, values):
    t = ComponentGroupTable(gid, tuple(classes), tuple(sizes), tuple(chars),
                            tuple(tuple(r) for r in values))
    t.validate()
    return t


def _builtin_groups() -> dict:
    w = cmath.exp(2j * cmath.pi / 3)
    s3 = (("1", "(12)", "(123)"), (1, 3, 2), ("1", "r", "sgn"),
          ((1, 1, 1), (2, 0, -1), (1, -1, 1)))
    z2 = ((1, 1), (1, -1))
    groups = [
        _table("trivial", ["1"], [1], ["1"], [[1]]),
        _table("Z2", ["1", "(12)"], [1, 1], ["1", "eps"], z2),
        _table("Z3", ["1", "g", "g2"], [1, 1, 1], ["1", "w", "w2"],
               [[1, 1, 1], [1, w, w * w], [1, w * w, w]]),
        _table("S3", *s3),
        _table("S4", ["1", "(12)", "(12)(34)", "(123)", "(1234)"], [1, 6, 3, 8, 6],
               ["1", "[31]", "[22]", "[211]", "[1111]"],
               [[1, 1, 1, 1, 1], [3, 1, -1, 0, -1], [2, 0, 2, -1, 0],
                [3, -1, -1, 0, 1], [1, -1, 1, 1, -1]]),
        _table("D8", ["1", "z", "r", "s", "sr"], [1, 1, 2, 2, 2],
               ["1", "a", "b", "c", "2"],
               [[1, 1, 1, 1, 1], [1, 1, 1, -1, -1], [1, 1, -1, 1, -1],
                [1, 1, -1, -1, 1], [2, -2, 0, 0, 0]]),
        _table("S5", ["1", "(12)", "(12)(34)", "(123)", "(123)(45)", "(1234)", "(12345)"],
               [1, 10, 15, 20, 20, 30, 24],
               ["1", "[41]", "[32]", "[311]", "[221]", "[2111]", "[11111]"],
               [[1, 1, 1, 1, 1, 1, 1], [4, 2, 0, 1, -1, 0, -1], [5, 1, 1, -1, 1, -1, 0],
                [6, 0, -2, 0, 0, 0, 1], [5, -1, 1, -1, -1, 1, 0],
                [4, -2, 0, 1, 1, 0, -1], [1, -1, 1, 1, -1, -1, 1]]),
    ]
    # Z2 x S3 as a direct product, characters eps^i (x) psi
    cls, sizes, chars, vals = [], [], [], []
    for zc, zs in (("", 1), ("z", 1)):
        for c, s in zip(s3[0], s3[1]):
            cls.append(c if not zc else ("z" if c == "1" else "z" + c))
            sizes.append(zs * s)
    for zi, zl in enumerate(("", "eps")):
        for psi, row in zip(s3[2], s3[3]):
            chars.append(psi if not zl else (zl if psi == "1" else f"{zl}.{psi}"))
            vals.append([z2[zi][zj] * x for zj in range(2) for x in row])
    groups.append(_table("Z2xS3", cls, sizes, chars, vals))
    return {g.group_id: g for g in groups}


COMPONENT_GROUPS = _builtin_groups()
_GROUP_ALIASES = {"1": "trivial", "S2": "Z2", "Z/2": "Z2", "Z/3": "Z3", "Dih8": "D8",
                  "Z2*S3": "Z2xS3", "S1": "trivial"}


def component_group(gid: str) -> ComponentGroupTable:
    gid = _GROUP_ALIASES.get(gid, gid)
    try:
        return COMPONENT_GROUPS[gid]
    except KeyError:
        raise SignDataError(f"unknown component group {gid!r}") from None


def _exact(x):
    """Collapse a (possibly complex) value to an int or Fraction when real."""
    if isinstance(x, complex):
        if abs(x.imag) > 1e-9:
            return x
        x = x.real
    if isinstance(x, float):
        r = round(x)
        if abs(x - r) > 1e-9:
            raise SignDataError(f"non-integral value {x}")
        return r
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


# -- class data ----------------------------------------------------------------

@dataclass
class GFRep:
    a: str
    cent: list              # |C_G(u_a)^F| as coefficients in q
    word: str | None = None


@dataclass
class LocalSystem:
    char: str
    localsys: str
    pinned: int | None = None


@dataclass
class Element:
    name: str
    a: str | None           # None: the A-class of the element is not known
    word: str


@dataclass
class GFClassData:
    label: str
    dim_c: int
    group: ComponentGroupTable
    reps: list
    systems: list
    ptilde: dict = field(default_factory=dict)
    elements: list = field(default_factory=list)
    type_label: str | None = None
    p: str | None = None
    source: str = ""

    def __post_init__(self):
        self.check()

    @property
    def chars(self) -> list:
        return [s.char for s in self.systems]

    def system(self, char) -> LocalSystem:
        for s in self.systems:
            if s.char == char:
                return s
        raise SignDataError(f"{char} is not attached to {self.label}")

    def rep(self, a) -> GFRep:
        for r in self.reps:
            if r.a == a:
                return r
        raise SignDataError(f"{self.label}: no G^F-class for A-class {a!r}")

    def element(self, name) -> Element:
        for e in self.elements:
            if e.name == name:
                return e
        raise SignDataError(f"{self.label}: no element named {name!r}")

    def check(self) -> None:
        g = self.group
        seen = [r.a for r in self.reps]
        if sorted(seen) != sorted(g.class_labels):
            raise SignDataError(f"{self.label}: G^F-classes {seen} do not match the "
                                f"classes {list(g.class_labels)} of {g.group_id}")
        # |C_G(u_a)^F| = |C_A(a)| * (common polynomial)
        common = None
        for r in self.reps:
            c = [x / g.centraliser_order(r.a) for x in r.cent]
            if common is None:
                common = c
            elif c != common:
                raise SignDataError(f"{self.label}: centraliser orders are not "
                                    "proportional to those in A(u)")
        if common is not None and len(common) - 1 > self.dim_c:
            raise SignDataError(f"{self.label}: centraliser degree exceeds dim C")
        for s in self.systems:
            g.char_pos(s.localsys)
        triv = [s for s in self.systems if s.localsys == "1"]
        if len(triv) != 1:
            raise SignDataError(f"{self.label}: need exactly one trivial local system")

    def ties(self) -> list:
        """Pairs of A-classes whose G^F-classes have equal centraliser orders;
        for these the matching cannot come from centralisers alone."""
        out = []
        for r, s in itertools.combinations(self.reps, 2):
            if r.cent == s.cent:
                out.append((r.a, s.a))
        return out

    def match_centraliser(self, order: int, q: int) -> list:
        return [r.a for r in self.reps if evaluate_poly(r.cent, q) == order]

    def ptilde_at(self, q: int) -> dict:
        return {c: _exact(evaluate_poly(v, q)) for c, v in self.ptilde.items()}

    def to_text(self) -> str:
        lines = [f"# {ln}" for ln in self.source.splitlines() if ln]
        if self.type_label:
            lines.append(f"type {self.type_label} p={self.p}")
        lines.append(f"class {self.label} dimC={self.dim_c} A={self.group.group_id}")
        for r in self.reps:
            extra = f' word="{r.word}"' if r.word else ""
            lines.append(f"rep a={r.a} cent={format_poly(r.cent)}{extra}")
        for s in self.systems:
            extra = f" pinned={s.pinned:+d}" if s.pinned else ""
            lines.append(f"system char={s.char} localsys={s.localsys}{extra}")
        for c, v in self.ptilde.items():
            lines.append(f"ptilde char={c} value={format_poly(v)}")
        for e in self.elements:
            lines.append(f'element name={e.name} a={e.a or "any"} word="{e.word}"')
        return "\n".join(lines) + "\n"


_TOKEN = re.compile(r'(\S+?=)"([^"]*)"|(\S+)')


def _split(line: str) -> list:
    """Whitespace tokens; ``key="..."`` values may contain spaces.  Labels
    carry primes, so shell quoting rules do not apply."""
    return [m[1] + m[2] if m[1] else m[3] for m in _TOKEN.finditer(line)]


def _kv(tokens, where) -> dict:
    out = {}
    for t in tokens:
        k, sep, v = t.partition("=")
        if not sep:
            raise SignDataError(f"{where}: expected key=value, got {t!r}")
        out[k] = v
    return out


def parse_class_data(text: str, source="<string>") -> list:
    """Read ``class``/``rep``/``system``/``ptilde``/``element`` records.
    Several classes may share a file; ``type <L> p=<p>`` applies to the ones
    that follow it."""
    out, cur, comments = [], None, []
    type_label = p = None

    def close():
        if cur is not None:
            out.append(GFClassData(source="\n".join(comments), **cur))

    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        where = f"{source}:{n}"
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line.lstrip("# "))
            continue
        head, *rest = _split(line)
        kv = _kv(rest[1:] if head in ("type", "class") else rest, where)
        if head == "type":
            type_label, p = rest[0], kv.get("p")
        elif head == "class":
            close()
            cur = dict(label=rest[0], dim_c=int(kv["dimC"]), group=component_group(kv["A"]),
                       reps=[], systems=[], ptilde={}, elements=[],
                       type_label=type_label, p=p)
        elif cur is None:
            raise SignDataError(f"{where}: {head} record before any class")
        elif head == "rep":
            cur["reps"].append(GFRep(kv["a"], parse_poly(kv["cent"]), kv.get("word")))
        elif head == "system":
            pin = kv.get("pinned")
            cur["systems"].append(LocalSystem(kv["char"], kv["localsys"],
                                              int(pin) if pin else None))
        elif head == "ptilde":
            cur["ptilde"][kv["char"]] = parse_poly(kv["value"])
        elif head == "element":
            a = kv.get("a", "any")
            cur["elements"].append(Element(kv["name"], None if a == "any" else a, kv["word"]))
        else:
            raise SignDataError(f"{where}: unknown record {head!r}")
    close()
    if not out:
        raise SignDataError(f"{source}: no class records")
    return out


CLASS_FILES = {
    "G2-G2(a1)": "classes/G2_G2a1.txt",
    "F4-F4(a1)": "classes/F4_a1.txt",
    "F4-F4(a2)": "classes/F4_a2.txt",
    "F4-F4(a3)": "classes/F4_a3.txt",
    "F4-C3(a1)": "classes/F4_C3a1.txt",
    "E6-E6(a3)": "classes/E6_a3.txt",
    "2E6-E6(a3)": "classes/2E6_a3.txt",
    "E7-E7(a3)": "classes/E7_a3.txt",
    "E7-E7(a4)": "classes/E7_a4.txt",
    "E7-E7(a5)": "classes/E7_a5.txt",
    "E7-E6(a3)": "classes/E7_E6a3.txt",
    "E8-E8(b6)": "classes/E8_b6.txt",
}


@lru_cache(maxsize=None)
def bundled_class_data(key: str) -> GFClassData:
    try:
        name = CLASS_FILES[key]
    except KeyError:
        raise SignDataError(f"no bundled class data {key!r}") from None
    text = resources.files("chevgreen").joinpath("data", name).read_text()
    (cd,) = parse_class_data(text, name)
    return cd


def attach_ptilde(cd: GFClassData, ptilde: dict) -> GFClassData:
    """Fill p~ from an LS solution (values or coefficient lists) for the
    characters of ``cd``; entries already present must agree."""
    for c in cd.chars:
        if c not in ptilde:
            raise SignDataError(f"p~ has no entry for {c}")
        v = ptilde[c]
        v = list(v) if isinstance(v, (list, tuple)) else [Fraction(v)]
        if c in cd.ptilde and cd.ptilde[c] != v and len(v) > 1:
            raise SignDataError(f"p~ for {c} disagrees with the class data")
        cd.ptilde[c] = v
    return cd


# -- sign hypotheses ----------------------------------------------------------------

@dataclass(frozen=True)
class SignHypothesis:
    signs: tuple                    # sorted (char, +-1) pairs
    pinned: frozenset = frozenset()

    def __post_init__(self):
        for c, v in self.signs:
            if v not in (1, -1):
                raise SignDataError(f"delta_{c} = {v} is not a sign")
        if not self.pinned <= set(self.as_dict()):
            raise SignDataError("pinned characters without a sign")

    @classmethod
    def of(cls, signs: dict, pinned=()) -> "SignHypothesis":
        return cls(tuple(sorted(signs.items())), frozenset(pinned))

    def as_dict(self) -> dict:
        return dict(self.signs)

    def __getitem__(self, char) -> int:
        d = self.as_dict()
        if char not in d:
            raise SignDataError(f"unresolved sign delta_{char} referenced")
        return d[char]

    def __contains__(self, char) -> bool:
        return char in self.as_dict()

    def with_signs(self, signs: dict) -> "SignHypothesis":
        d = self.as_dict()
        for c, v in signs.items():
            if c in self.pinned and d[c] != v:
                raise SignDataError(f"delta_{c} is pinned to {d[c]:+d}")
            d[c] = v
        return SignHypothesis.of(d, self.pinned)

    def restrict(self, chars) -> "SignHypothesis":
        d = self.as_dict()
        keep = [c for c in chars if c in d]
        return SignHypothesis.of({c: d[c] for c in keep}, self.pinned & set(keep))

    def merge(self, other: "SignHypothesis") -> "SignHypothesis":
        out = self
        for c, v in other.signs:
            if c in out and out[c] != v:
                raise SignDataError(f"conflicting values for delta_{c}")
            out = SignHypothesis.of({**out.as_dict(), c: v}, out.pinned | (other.pinned & {c}))
        return out

    def __str__(self) -> str:
        return ", ".join(f"{c}:{v:+d}" for c, v in self.signs)


def pin_trivial_system_signs(ls, springer) -> SignHypothesis:
    """delta_{E0} = 1/p_{E0,E1} for trivial local systems with p_{E0,E1} != 0,
    where E1 is the trivial character of W (the regular class)."""
    triv = min(ls.labels, key=lambda c: ls.d[c])
    if ls.d[triv] != 0:
        raise SignDataError("no character with d = 0 in the LS solution")
    out = {}
    for row in springer.rows:
        if row.local_system != "1":
            continue
        v = ls.p(row.char, triv)
        if v == 0:
            continue
        if v not in (1, -1):
            raise SignDataError(f"p_{{{row.char},{triv}}} = {v} is not 0 or +-1")
        out[row.char] = int(v)
    return SignHypothesis.of(out, out)


def pinned_from_data(classes) -> SignHypothesis:
    out = {}
    for cd in classes:
        for s in cd.systems:
            if s.pinned:
                out[s.char] = s.pinned
    return SignHypothesis.of(out, out)


def predict_Q1(cd: GFClassData, hyp, q: int, ptilde: dict | None = None) -> dict:
    """Q_1(u_a) = sum_E' p~_E' delta_E' Tr(a, E'_u0) for every A-class a."""
    pt = ptilde if ptilde is not None else cd.ptilde_at(q)
    g = cd.group
    out = {}
    for a in g.class_labels:
        tot = 0
        for s in cd.systems:
            if s.char not in pt:
                raise SignDataError(f"missing p~ entry for {s.char}")
            tot += Fraction(pt[s.char]) * hyp[s.char] * g.value(s.localsys, a)
        out[a] = _exact(tot)
    return out


def power_lift(hyp: SignHypothesis, m: int, m_independent=()) -> SignHypothesis:
    """Signs over F_{p^m} from those over F_p: delta = (delta#)^m, except for
    characters whose sign is known not to depend on m."""
    if m < 1:
        raise ValueError("m must be positive")
    keep = set(m_independent)
    return SignHypothesis.of({c: v if c in keep else v ** m for c, v in hyp.signs},
                             hyp.pinned)


# -- observations and resolution -----------------------------------------------------

@dataclass(frozen=True)
class Observation:
    cls: str
    a: str | None           # None: any piece of the class
    kind: str               # "exact" | "lower"
    value: int
    note: str = ""

    def admits(self, v) -> bool:
        if isinstance(v, complex):
            return False
        return v == self.value if self.kind == "exact" else v >= self.value

    def __str__(self) -> str:
        tag = self.cls if self.a == "1" else f"{self.cls}:{self.a or 'any'}"
        op = "=" if self.kind == "exact" else ">="
        return f"{tag}{op}{self.value}" + (f" [{self.note}]" if self.note else "")


_OBS = re.compile(r"^\s*(?P<tag>.+?)\s*(?P<op>>=|=)\s*(?P<val>\d+)\s*$")


def parse_observation(text: str, note="") -> Observation:
    """``F4(a1)=19``, ``F4(a3):any=5818`` or ``E8(b6):(12)>=4352957``; without an
    A-class the observation concerns the chosen representative u0."""
    m = _OBS.match(text)
    if not m:
        raise SignDataError(f"bad observation {text!r}")
    tag = m["tag"]
    cls, sep, a = tag.partition(":")
    a = a if sep else "1"
    return Observation(cls, None if a == "any" else a,
                       "exact" if m["op"] == "=" else "lower", int(m["val"]), note)


@dataclass
class Resolution:
    unknowns: list
    surviving: list
    eliminated: list            # (hypothesis, [reasons])
    identified: dict            # observation text -> A-classes consistent with it
    q: int

    @property
    def unique(self) -> SignHypothesis | None:
        return self.surviving[0] if len(self.surviving) == 1 else None

    def determined(self) -> dict:
        """Signs that take the same value on every surviving hypothesis."""
        out = {}
        for c in self.unknowns:
            vals = {h[c] for h in self.surviving}
            if len(vals) == 1:
                out[c] = vals.pop()
        return out

    def lines(self) -> list:
        out = [f"q = {self.q}; unknown signs: {', '.join(self.unknowns) or '(none)'}"]
        out.append(f"{len(self.surviving)} of {len(self.surviving) + len(self.eliminated)} "
                   "hypotheses survive")
        for h in self.surviving:
            out.append(f"  consistent: {h.restrict(self.unknowns) or '(no unknowns)'}")
        det = self.determined()
        open_ = [c for c in self.unknowns if c not in det]
        for c, v in det.items():
            out.append(f"  delta_{c} = {v:+d}")
        for c in open_:
            out.append(f"  delta_{c} undetermined")
        for k, v in self.identified.items():
            out.append(f"  {k}: piece(s) {', '.join(v) or '(none)'}")
        return out


def resolve(classes, observations, q: int, pinned: SignHypothesis | None = None,
            nonnegative: bool = True, ptilde: dict | None = None) -> Resolution:
    """Every sign vector consistent with the observations and with Q_1 >= 0.

    A lower bound on an unspecified piece eliminates a hypothesis only when
    every piece's prediction falls below it.
    """
    classes = list(classes)
    by_label = {cd.label: cd for cd in classes}
    base = pinned_from_data(classes)
    if pinned is not None:
        base = base.merge(pinned)
    chars = [c for cd in classes for c in cd.chars]
    unknowns = [c for c in chars if c not in base]
    for ob in observations:
        if ob.cls not in by_label:
            raise SignDataError(f"observation on unknown class {ob.cls!r}")
    surviving, eliminated = [], []
    for vals in itertools.product((1, -1), repeat=len(unknowns)):
        h = base.merge(SignHypothesis.of(dict(zip(unknowns, vals))))
        preds = {cd.label: predict_Q1(cd, h, q, ptilde) for cd in classes}
        why = []
        if nonnegative:
            for lab, pr in preds.items():
                for a, v in pr.items():
                    if not isinstance(v, complex) and v < 0:
                        why.append(f"Q1({lab}:{a}) = {v} < 0")
        for ob in observations:
            pr = preds[ob.cls]
            pieces = [ob.a] if ob.a is not None else list(pr)
            if not any(ob.admits(pr[a]) for a in pieces):
                shown = ", ".join(f"{a}:{pr[a]}" for a in pieces)
                why.append(f"{ob} violated (predicted {shown})")
        (eliminated.append((h, why)) if why else surviving.append(h))
    identified = {}
    for ob in observations:
        pieces = set()
        for h in surviving:
            pr = predict_Q1(by_label[ob.cls], h, q, ptilde)
            cand = [ob.a] if ob.a is not None else list(pr)
            pieces.update(a for a in cand if ob.admits(pr[a]))
        identified[str(ob)] = [a for a in by_label[ob.cls].group.class_labels if a in pieces]
    res = Resolution(unknowns, surviving, eliminated, identified, q)
    if not surviving:
        report = ["no sign vector is consistent:"]
        for h, why in eliminated:
            report.append(f"  {h or '(no unknowns)'}: " + "; ".join(why))
        raise SignContradiction("\n".join(report), res)
    return res


# -- Green functions on unipotent classes --------------------------------------------

@dataclass
class GreenTable:
    w: tuple
    q: int
    rows: list          # (class, A-class, value)

    def value(self, cls, a="1"):
        for c, b, v in self.rows:
            if c == cls and b == a:
                return v
        raise KeyError((cls, a))

    def lines(self, tsv=False) -> list:
        sep = "\t" if tsv else "  "
        return [sep.join(["class", "piece", "Q_w"])] + [sep.join([c, a, str(v)]) for c, a, v in self.rows]


def assemble_green_restrictions(ls, signs: SignHypothesis, class_data, w, table, springer,
                                rs=None) -> GreenTable:
    """Q_w(u_a) = sum_E Tr(w,E) sum_E' q^{d_E} p_{E',E} delta_E' Tr(a, E'_u0).

    ``class_data`` maps unipotent class labels to GFClassData; classes without
    an entry must carry only the trivial local system and give one row."""
    rs = rs or root_system(table.type_label)
    col = class_index(rs, table, tuple(w))
    chi = {c: int(table.values[table.index(c)][col]) for c in ls.labels}
    q = ls.q
    rows = []
    for C in springer.classes:
        block = springer.block(C)
        cd = class_data.get(C)
        if cd is None:
            if any(r.local_system != "1" for r in block):
                raise SignDataError(f"class {C} needs class data (non-trivial local systems)")
            pieces, trace = ["1"], (lambda r, a: 1)
        else:
            pieces = list(cd.group.class_labels)
            g = cd.group
            trace = (lambda r, a, g=g: g.value(r.local_system, a))
        coeff = {}
        for r in block:
            tot = sum((Fraction(chi[E]) * Fraction(q) ** ls.d[E] * ls.p(r.char, E)
                       for E in ls.labels), Fraction(0))
            if tot != 0:
                coeff[r.char] = tot
        for a in pieces:
            v = sum((coeff[r.char] * signs[r.char] * trace(r, a) for r in block
                     if r.char in coeff), Fraction(0))
            v = _exact(v)
            if isinstance(v, Fraction):
                raise SignDataError(f"Q_w({C}:{a}) = {v} is not an integer")
            rows.append((C, a, v))
    return GreenTable(tuple(w), q, rows)
