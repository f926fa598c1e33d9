"""Finite matrix groups: closure, pseudo-reflections, hyperplane orbits,
Reynolds averaging and Molien series."""
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from tensorquot import linalg
from tensorquot.errors import (
    InvalidGeneratorError,
    OrderBoundError,
    ParseError,
    UnknownFamilyError,
)
from tensorquot.polyalg import MPoly, linear_substitute
from tensorquot.scalar import (
    CycScalar,
    conductor_of,
    lcm,
    qnorm,
    root_of_unity_order,
    scalar_div,
    zeta,
)

DEFAULT_MAX_ORDER = 10000


def _norm(c):
    if isinstance(c, CycScalar):
        return c.simplify()
    return qnorm(c)


def x_names(n):
    return ("u",) if n == 1 else tuple(f"x{i + 1}" for i in range(n))


def f_names(n):
    return ("v",) if n == 1 else tuple(f"f{i + 1}" for i in range(n))


class GroupElement:
    """An invertible square matrix with exact scalar entries."""

    __slots__ = ("matrix", "_hash")

    def __init__(self, matrix):
        self.matrix = tuple(tuple(_norm(c) for c in row) for row in matrix)
        self._hash = None

    @property
    def dim(self):
        return len(self.matrix)

    @classmethod
    def identity(cls, n):
        return cls(linalg.identity(n))

    def is_identity(self):
        n = self.dim
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def __mul__(self, other):
        return GroupElement(linalg.mat_mul(self.matrix, other.matrix))

    def inverse(self):
        return GroupElement(linalg.scalar_inverse(self.matrix))

    def det(self):
        return linalg.scalar_det(self.matrix)

    def apply(self, point):
        return [_norm(sum((a * b for a, b in zip(row, point)), 0)) for row in self.matrix]

    def minus_identity(self):
        n = self.dim
        return [[self.matrix[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]

    def trace(self):
        return _norm(sum((self.matrix[i][i] for i in range(self.dim)), 0))

    def conductor(self):
        c = 1
        for row in self.matrix:
            for x in row:
                c = lcm(c, conductor_of(x))
        return c

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.matrix)
        return self._hash

    def __repr__(self):
        from tensorquot.parsing import format_scalar
        rows = ", ".join("[" + ", ".join(format_scalar(c) for c in r) + "]" for r in self.matrix)
        return f"GroupElement([{rows}])"


@dataclass
class FiniteMatrixGroup:
    dim: int
    elements: list
    generators: list
    faithful: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._index()

    def _index(self):
        if "index" not in self._cache:
            self._cache["index"] = set(self.elements)
        return self._cache["index"]

    @property
    def conductor(self):
        if "conductor" not in self._cache:
            c = 1
            for g in self.generators:
                c = lcm(c, g.conductor())
            self._cache["conductor"] = c
        return self._cache["conductor"]

    @property
    def names(self):
        return x_names(self.dim)


def _as_element(g):
    return g if isinstance(g, GroupElement) else GroupElement(g)


def enumerate_group(generators, max_order=DEFAULT_MAX_ORDER, dim=None):
    """Close a list of generators under multiplication."""
    gens = [_as_element(g) for g in generators]
    if dim is None:
        dim = gens[0].dim if gens else 1
    for g in gens:
        if g.dim != dim or any(len(r) != dim for r in g.matrix):
            raise InvalidGeneratorError(f"generator is not a {dim}x{dim} matrix")
        if not g.det():
            raise InvalidGeneratorError("generator is not invertible")
    ident = GroupElement.identity(dim)
    seen = {ident}
    elements = [ident]
    frontier = [ident]
    gens_nt = [g for g in gens if not g.is_identity()]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens_nt:
                p = g * h
                if p not in seen:
                    seen.add(p)
                    elements.append(p)
                    nxt.append(p)
                    if len(elements) > max_order:
                        raise OrderBoundError(f"group closure exceeds max_order={max_order}")
        frontier = nxt
    return FiniteMatrixGroup(dim, elements, gens)


# -- pseudo-reflections ---------------------------------------------------------

@dataclass(frozen=True)
class PseudoReflection:
    element: GroupElement
    form: tuple        # normalized coefficients of the mirror's linear form
    eigenvalue: object
    order: int

    def linear_form(self):
        return MPoly.linear_form(list(self.form))


def normalize_form(coeffs):
    lead = next(c for c in coeffs if c)
    inv = scalar_div(1, lead)
    return tuple(_norm(c * inv) for c in coeffs)


def find_pseudo_reflections(G):
    key = "reflections"
    if key in G._cache:
        return G._cache[key]
    out = []
    for g in G.elements:
        if g.is_identity():
            continue
        m = g.minus_identity()
        if linalg.rank(m, G.dim) != 1:
            continue
        row = next(r for r in m if any(r))
        eig = _norm(1 + sum((m[i][i] for i in range(G.dim)), 0))
        out.append(PseudoReflection(g, normalize_form(row), eig, root_of_unity_order(eig)))
    G._cache[key] = out
    return out


@dataclass(frozen=True)
class ReflectionComponent:
    forms: tuple       # hyperplane forms in the orbit, as coefficient tuples
    order: int

    def hyperplane_orbit(self):
        return [MPoly.linear_form(list(f)) for f in self.forms]

    def witness(self):
        """Product over the orbit of alpha_H^r, an invariant polynomial."""
        w = MPoly.one(len(self.forms[0]))
        for a in self.hyperplane_orbit():
            w = w * a ** self.order
        return w


def _act_on_form(g_inv, form):
    # (g.alpha)(x) = alpha(g^{-1} x): new row = alpha * g^{-1}
    n = len(form)
    row = [_norm(sum((form[i] * g_inv.matrix[i][j] for i in range(n)), 0)) for j in range(n)]
    return normalize_form(row)


def _form_key(form):
    from tensorquot.parsing import format_scalar
    return tuple((0, format_scalar(c)) if not isinstance(c, CycScalar) else (1, format_scalar(c)) for c in form)


def generic_point(form, avoid_forms, elements=None, start=0):
    """A deterministic rational point on {form = 0} avoiding other mirrors.

    Free coordinates take small distinct integers; the parameters are bumped
    until the point lies on no other hyperplane in ``avoid_forms`` and, when
    ``elements`` is given, is fixed only by elements fixing the hyperplane.
    """
    n = len(form)
    k = next(i for i, c in enumerate(form) if c)
    shift = start
    while True:
        pt = [0] * n
        val = 2 + shift
        for j in range(n):
            if j != k:
                pt[j] = val
                val = val * 2 + 1 + shift
        pt[k] = _norm(-sum((form[j] * pt[j] for j in range(n) if j != k), 0))
        ok = all(_norm(sum((a * b for a, b in zip(f, pt)), 0)) != 0 for f in avoid_forms if f != form)
        if ok and elements is not None:
            for g in elements:
                if g.apply(pt) == pt and not g.is_identity():
                    m = g.minus_identity()
                    if linalg.rank(m, n) != 1 or normalize_form(next(r for r in m if any(r))) != form:
                        ok = False
                        break
        if ok:
            return pt
        shift += 1


def pointwise_stabilizer(G, point):
    pt = [_norm(c) for c in point]
    return [g for g in G.elements if g.apply(pt) == pt]


def reflection_components(G):
    key = "components"
    if key in G._cache:
        return G._cache[key]
    refl = find_pseudo_reflections(G)
    forms = []
    for r in refl:
        if r.form not in forms:
            forms.append(r.form)
    inverses = [g.inverse() for g in G.generators]
    remaining = list(forms)
    comps = []
    while remaining:
        seed = remaining[0]
        orbit = [seed]
        stack = [seed]
        while stack:
            f = stack.pop()
            for gi in inverses:
                h = _act_on_form(gi, f)
                if h not in orbit:
                    orbit.append(h)
                    stack.append(h)
        pt = generic_point(seed, forms, G.elements)
        order = len(pointwise_stabilizer(G, pt))
        orbit.sort(key=_form_key)
        comps.append(ReflectionComponent(tuple(orbit), order))
        remaining = [f for f in remaining if f not in orbit]
    comps.sort(key=lambda c: _form_key(c.forms[0]))
    G._cache[key] = comps
    return comps


def hyperplane_orders(G):
    """Map each mirror form to the order of its pointwise stabilizer."""
    out = {}
    for c in reflection_components(G):
        for f in c.forms:
            out[f] = c.order
    return out


def is_reflection_group(G):
    refl = find_pseudo_reflections(G)
    if G.order == 1:
        return True
    if not refl:
        return False
    sub = enumerate_group([r.element for r in refl], max_order=G.order, dim=G.dim)
    return sub.order == G.order


# -- averaging ------------------------------------------------------------------

def act_on_poly(g, p):
    """(g.p)(x) = p(g^{-1} x)."""
    return linear_substitute(p, g.inverse().matrix)


def is_invariant_poly(G, p):
    return all(linear_substitute(p, g.matrix) == p for g in G.generators)


def reynolds(G, p):
    acc = MPoly.zero(p.nvars)
    for g in G.elements:
        acc = acc + linear_substitute(p, g.matrix)
    return acc.scale(Fraction(1, G.order))


def _charpoly_coeffs(mat):
    """c_1..c_n with det(I - t M) = 1 + c_1 t + ... + c_n t^n."""
    n = len(mat)
    coeffs = [1]
    m = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k)/k
        am = linalg.mat_mul(mat, m) if k > 1 else [[0] * n for _ in range(n)]
        m = [[am[i][j] + (coeffs[k - 1] if i == j else 0) for j in range(n)] for i in range(n)]
        am = linalg.mat_mul(mat, m)
        tr = sum((am[i][i] for i in range(n)), 0)
        coeffs.append(_norm(scalar_div(-tr, k)))
    return coeffs


def _series_inverse(c, cap):
    out = [0] * (cap + 1)
    out[0] = scalar_div(1, c[0])
    for d in range(1, cap + 1):
        s = 0
        for k in range(1, min(d, len(c) - 1) + 1):
            if c[k]:
                s = s + c[k] * out[d - k]
        out[d] = _norm(-s * out[0])
    return out


def molien_series(G, degree_cap):
    total = [0] * (degree_cap + 1)
    for g in G.elements:
        inv = _series_inverse(_charpoly_coeffs(g.matrix), degree_cap)
        total = [a + b for a, b in zip(total, inv)]
    out = []
    for c in total:
        c = _norm(scalar_div(c, G.order))
        if isinstance(c, CycScalar) or Fraction(c).denominator != 1:
            raise ArithmeticError(f"non-integral Molien coefficient {c!r}")
        out.append(int(c))
    return out


def invariant_dimension(G, degree):
    """Rank of the Reynolds operator on degree-d monomials."""
    from itertools import combinations_with_replacement
    n = G.dim
    monos = []
    for combo in combinations_with_replacement(range(n), degree):
        e = [0] * n
        for i in combo:
            e[i] += 1
        monos.append(tuple(e))
    index = {e: i for i, e in enumerate(monos)}
    rows = []
    for e in monos:
        r = reynolds(G, MPoly.monomial(e))
        row = [0] * len(monos)
        for ex, c in r.terms.items():
            row[index[ex]] = c
        rows.append(row)
    return linalg.rank(rows, len(monos))


# -- built-in families and specs ----------------------------------------------------

def _diag(entries):
    n = len(entries)
    return [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]


def _transposition(n, i, j):
    m = linalg.identity(n)
    m[i][i] = m[j][j] = 0
    m[i][j] = m[j][i] = 1
    return m


def _block(a, b):
    na, nb = len(a), len(b)
    out = [[0] * (na + nb) for _ in range(na + nb)]
    for i in range(na):
        for j in range(na):
            out[i][j] = a[i][j]
    for i in range(nb):
        for j in range(nb):
            out[na + i][na + j] = b[i][j]
    return out


@dataclass
class Family:
    """A parsed built-in family identifier."""
    kind: str
    args: tuple

    def dim(self):
        if self.kind == "cyclic":
            return 1
        if self.kind in ("symmetric", "trivial"):
            return self.args[0]
        if self.kind == "wreath":
            return self.args[-1]
        return self.args[0].dim() + self.args[1].dim()

    def generators(self):
        k, a = self.kind, self.args
        if k == "cyclic":
            return [[[zeta(a[0]) if a[0] > 2 else -1 if a[0] == 2 else 1]]]
        if k == "trivial":
            return []
        if k == "symmetric":
            n = a[0]
            return [_transposition(n, i, i + 1) for i in range(n - 1)]
        if k == "wreath":
            m, n = a[0], a[-1]
            z = zeta(m) if m > 2 else (-1 if m == 2 else 1)
            gens = [_diag([z] + [1] * (n - 1))] if m > 1 else []
            return gens + [_transposition(n, i, i + 1) for i in range(n - 1)]
        ga, gb = a[0].generators(), a[1].generators()
        da, db = a[0].dim(), a[1].dim()
        return [_block(g, linalg.identity(db)) for g in ga] + [_block(linalg.identity(da), g) for g in gb]

    def __str__(self):
        if self.kind == "product":
            return f"product({self.args[0]},{self.args[1]})"
        return f"{self.kind}({','.join(str(x) for x in self.args)})"


_FAMILY_TOKEN = re.compile(r"\s*(?:([A-Za-z_]+)|(\d+)|(.))")


def parse_family(text):
    """Parse identifiers such as ``symmetric(3)`` or ``product(cyclic(2),cyclic(3))``."""
    toks = []
    for m in _FAMILY_TOKEN.finditer(text):
        if m.group(1):
            toks.append(("name", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("num", int(m.group(2)), m.start(2)))
        elif m.group(3) and not m.group(3).isspace():
            toks.append(("op", m.group(3), m.start(3)))
    toks.append(("end", None, len(text)))
    pos = [0]

    def take():
        t = toks[pos[0]]
        pos[0] += 1
        return t

    def expect(op):
        t = take()
        if t[1] != op:
            raise UnknownFamilyError(f"malformed family {text!r} at column {t[2] + 1}")

    def fam():
        t = take()
        if t[0] != "name":
            raise UnknownFamilyError(f"malformed family {text!r} at column {t[2] + 1}")
        kind = t[1]
        expect("(")
        args = []
        while True:
            if kind == "product":
                args.append(fam())
            else:
                nt = take()
                if nt[0] != "num":
                    raise UnknownFamilyError(f"malformed family {text!r} at column {nt[2] + 1}")
                args.append(nt[1])
            sep = take()
            if sep[1] == ")":
                break
            if sep[1] != ",":
                raise UnknownFamilyError(f"malformed family {text!r} at column {sep[2] + 1}")
        arity = {"cyclic": (1,), "symmetric": (1,), "trivial": (1,), "wreath": (2, 3), "product": (2,)}
        if kind not in arity:
            raise UnknownFamilyError(f"unknown family {kind!r}")
        if len(args) not in arity[kind]:
            raise UnknownFamilyError(f"{kind} takes {arity[kind]} arguments")
        if kind == "wreath" and len(args) == 3 and args[1] != 1:
            raise UnknownFamilyError("only wreath(m,1,n) = G(m,1,n) is supported")
        if kind != "product" and any(x < 1 for x in args):
            raise UnknownFamilyError("family parameters must be positive")
        return Family(kind, tuple(args))

    f = fam()
    if toks[pos[0]][0] != "end":
        raise UnknownFamilyError(f"trailing input in family {text!r}")
    return f


def builtin_group(family, max_order=DEFAULT_MAX_ORDER):
    fam = parse_family(family) if isinstance(family, str) else family
    return enumerate_group(fam.generators(), max_order=max_order, dim=fam.dim())


def group_from_spec(spec):
    """Build a group from a JSON object or text (built-in or explicit generators)."""
    from tensorquot.parsing import parse_scalar
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            try:
                spec = json.loads(s)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", s, exc.pos) from exc
        else:
            return builtin_group(s)
    if "builtin" in spec:
        return builtin_group(spec["builtin"], spec.get("max_order", DEFAULT_MAX_ORDER))
    if spec.get("kernel") not in (None, [], 1):
        raise InvalidGeneratorError("non-faithful actions are not accepted; pass the faithful quotient group")
    if "dim" not in spec:
        raise InvalidGeneratorError("a group spec needs 'builtin' or 'dim' with 'generators'")
    n = int(spec["dim"])
    conductor = int(spec.get("conductor", 1))
    gens = []
    for g in spec.get("generators", []):
        flat = [x for row in g for x in row] if g and isinstance(g[0], list) else list(g)
        if len(flat) != n * n:
            raise InvalidGeneratorError(f"generator has {len(flat)} entries, expected {n * n}")
        vals = [parse_scalar(str(x), conductor) for x in flat]
        gens.append([vals[i * n:(i + 1) * n] for i in range(n)])
    return enumerate_group(gens, max_order=int(spec.get("max_order", DEFAULT_MAX_ORDER)), dim=n)
