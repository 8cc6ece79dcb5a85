"""Exact finite categories with dense integer ids.

Objects of a category are 0..n_obj-1 and morphisms 0..n_mor-1; source, target,
identity and composition are lookup tables.  Everything downstream (double
categories, fair structures, the comparison functors) is built out of these,
so all checks here are brute force and exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class FinCat:
    """A finite category.  ``comp[(g, f)]`` is the composite g-after-f."""

    __slots__ = ("n_obj", "src", "tgt", "identity", "comp", "_hom", "_inv")

    def __init__(self, n_obj, src, tgt, identity, comp):
        self.n_obj = n_obj
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.identity = tuple(identity)
        self.comp = dict(comp)
        self._hom = None
        self._inv = {}

    @property
    def n_mor(self):
        return len(self.src)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, FinCat)
                and self.n_obj == other.n_obj
                and self.src == other.src
                and self.tgt == other.tgt
                and self.identity == other.identity
                and self.comp == other.comp)

    def __repr__(self):
        return "FinCat(%d obj, %d mor)" % (self.n_obj, self.n_mor)

    def hom(self, x, y):
        if self._hom is None:
            table = {}
            for m in range(self.n_mor):
                table.setdefault((self.src[m], self.tgt[m]), []).append(m)
            self._hom = {k: tuple(v) for k, v in table.items()}
        return self._hom.get((x, y), ())

    def compose(self, g, f):
        """g after f; ValueError if the pair is not composable."""
        try:
            return self.comp[(g, f)]
        except KeyError:
            raise ValueError("morphisms %d after %d are not composable" % (g, f)) from None

    def inverse(self, m):
        """Two-sided inverse of m, or None."""
        if m in self._inv:
            return self._inv[m]
        x, y = self.src[m], self.tgt[m]
        found = None
        for n in self.hom(y, x):
            if (self.comp.get((n, m)) == self.identity[x]
                    and self.comp.get((m, n)) == self.identity[y]):
                found = n
                break
        self._inv[m] = found
        return found

    def is_iso(self, m):
        return self.inverse(m) is not None


def discrete(n):
    ids = tuple(range(n))
    return FinCat(n, ids, ids, ids, {(i, i): i for i in ids})


def chaotic(n):
    """Exactly one morphism between each ordered pair of objects."""
    src = tuple(m // n for m in range(n * n))
    tgt = tuple(m % n for m in range(n * n))
    identity = tuple(x * n + x for x in range(n))
    comp = {}
    for x in range(n):
        for y in range(n):
            for z in range(n):
                comp[(y * n + z, x * n + y)] = x * n + z
    return FinCat(n, src, tgt, identity, comp)


def thin_from_preorder(n, pairs):
    """Thin category on 0..n-1 with one morphism x -> y per pair (x, y).

    pairs must be reflexive and transitive; ValueError otherwise.
    """
    pairs = set(pairs)
    for x in range(n):
        if (x, x) not in pairs:
            raise ValueError("preorder is not reflexive at %d" % x)
    for (x, y) in pairs:
        for (y2, z) in pairs:
            if y2 == y and (x, z) not in pairs:
                raise ValueError("preorder is not transitive")
    labels = sorted(pairs)
    mor_id = {t: i for i, t in enumerate(labels)}
    src = tuple(t[0] for t in labels)
    tgt = tuple(t[1] for t in labels)
    identity = tuple(mor_id[(x, x)] for x in range(n))
    comp = {}
    for (x, y) in labels:
        for (y2, z) in labels:
            if y2 == y:
                comp[(mor_id[(y, z)], mor_id[(x, y)])] = mor_id[(x, z)]
    return FinCat(n, src, tgt, identity, comp)


def disjoint_union(cats):
    """Coproduct; returns (cat, obj_offsets, mor_offsets)."""
    obj_off, mor_off = [], []
    src, tgt, identity = [], [], []
    comp = {}
    o = m = 0
    for c in cats:
        obj_off.append(o)
        mor_off.append(m)
        src.extend(x + o for x in c.src)
        tgt.extend(x + o for x in c.tgt)
        identity.extend(e + m for e in c.identity)
        for (g, f), h in c.comp.items():
            comp[(g + m, f + m)] = h + m
        o += c.n_obj
        m += c.n_mor
    return FinCat(o, src, tgt, identity, comp), obj_off, mor_off


def validate_category(cat):
    """Check the category laws; returns a list of violations (empty = fine).

    Malformed tables (indices out of range, mismatched lengths) raise
    ValueError instead: those are broken inputs, not lawfully-shaped
    categories that happen to break a law.
    """
    n, m = cat.n_obj, cat.n_mor
    if len(cat.tgt) != m or len(cat.identity) != n:
        raise ValueError("table lengths disagree")
    if any(not 0 <= x < n for x in cat.src) or any(not 0 <= x < n for x in cat.tgt):
        raise ValueError("source/target out of range")
    if any(not 0 <= e < m for e in cat.identity):
        raise ValueError("identity table out of range")
    for (g, f), h in cat.comp.items():
        if not (0 <= g < m and 0 <= f < m and 0 <= h < m):
            raise ValueError("composition table mentions unknown morphisms")

    problems = []
    for x in range(n):
        e = cat.identity[x]
        if cat.src[e] != x or cat.tgt[e] != x:
            problems.append("identity of object %d is not an endomorphism of it" % x)
    for g in range(m):
        for f in range(m):
            defined = (g, f) in cat.comp
            composable = cat.src[g] == cat.tgt[f]
            if composable and not defined:
                problems.append("composite of %d after %d is missing" % (g, f))
            elif defined and not composable:
                problems.append("composite defined for non-composable pair (%d, %d)" % (g, f))
            elif defined:
                h = cat.comp[(g, f)]
                if cat.src[h] != cat.src[f] or cat.tgt[h] != cat.tgt[g]:
                    problems.append("composite %d of (%d, %d) has wrong endpoints" % (h, g, f))
    for f in range(m):
        e0, e1 = cat.identity[cat.src[f]], cat.identity[cat.tgt[f]]
        if cat.comp.get((f, e0)) != f:
            problems.append("right identity law fails at morphism %d" % f)
        if cat.comp.get((e1, f)) != f:
            problems.append("left identity law fails at morphism %d" % f)
    for h in range(m):
        for g in range(m):
            if cat.src[h] != cat.tgt[g]:
                continue
            hg = cat.comp.get((h, g))
            for f in range(m):
                if cat.src[g] != cat.tgt[f]:
                    continue
                gf = cat.comp.get((g, f))
                if gf is None or hg is None:
                    continue
                if cat.comp.get((h, gf)) != cat.comp.get((hg, f)):
                    problems.append("associativity fails on (%d, %d, %d)" % (h, g, f))
    return problems


def iso_classes(cat):
    """Isomorphism classes of objects.

    Returns (classes, class_of): sorted lists ordered by least member, and the
    quotient map object id -> class index.
    """
    parent = list(range(cat.n_obj))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in range(cat.n_mor):
        if cat.is_iso(m):
            a, b = find(cat.src[m]), find(cat.tgt[m])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for x in range(cat.n_obj):
        groups.setdefault(find(x), []).append(x)
    classes = sorted(groups.values())
    class_of = [0] * cat.n_obj
    for i, cls in enumerate(classes):
        for x in cls:
            class_of[x] = i
    return classes, tuple(class_of)


def iso_classes_map(fun):
    """Action of a functor on iso classes: class index of source -> of target."""
    classes_a, _ = iso_classes(fun.source)
    _, class_of_b = iso_classes(fun.target)
    return tuple(class_of_b[fun.obj_map[cls[0]]] for cls in classes_a)


def is_homotopically_discrete(cat):
    """(flag, witness): at most one morphism per ordered pair, all invertible.

    The witness is an offending morphism when the flag is False.
    """
    seen = set()
    for m in range(cat.n_mor):
        key = (cat.src[m], cat.tgt[m])
        if key in seen:
            return False, m
        seen.add(key)
    for m in range(cat.n_mor):
        if not cat.is_iso(m):
            return False, m
    return True, None


@dataclass
class Discretization:
    classes: list
    discrete: FinCat
    quotient: "FunctorMap"
    section: "FunctorMap"


def discretize(cat):
    """Discrete category on the iso classes, with quotient and section.

    The section picks the least object of each class, and quotient . section
    is the identity.  Rejects categories that are not homotopically discrete.
    """
    flag, witness = is_homotopically_discrete(cat)
    if not flag:
        raise ValueError("not homotopically discrete, witness morphism %d" % witness)
    classes, class_of = iso_classes(cat)
    d = discrete(len(classes))
    quotient = FunctorMap(cat, d, class_of,
                          [class_of[cat.src[m]] for m in range(cat.n_mor)])
    section = FunctorMap(d, cat, [cls[0] for cls in classes],
                         [cat.identity[cls[0]] for cls in classes])
    assert compose_functors(quotient, section) == identity_functor(d)
    return Discretization(classes, d, quotient, section)


@dataclass
class FunctorMap:
    source: FinCat
    target: FinCat
    obj_map: tuple
    mor_map: tuple

    def __post_init__(self):
        self.obj_map = tuple(self.obj_map)
        self.mor_map = tuple(self.mor_map)

    def obj(self, x):
        return self.obj_map[x]

    def mor(self, m):
        return self.mor_map[m]


def identity_functor(cat):
    return FunctorMap(cat, cat, range(cat.n_obj), range(cat.n_mor))


def compose_functors(g, f):
    """g after f."""
    if g.source != f.target:
        raise ValueError("functors are not composable")
    return FunctorMap(f.source, g.target,
                      [g.obj_map[x] for x in f.obj_map],
                      [g.mor_map[m] for m in f.mor_map])


def validate_functor(fun):
    """Functor laws as a violation list; malformed maps raise ValueError."""
    a, b = fun.source, fun.target
    if len(fun.obj_map) != a.n_obj or len(fun.mor_map) != a.n_mor:
        raise ValueError("functor map lengths disagree with the source")
    if any(not 0 <= x < b.n_obj for x in fun.obj_map):
        raise ValueError("object map out of range")
    if any(not 0 <= m < b.n_mor for m in fun.mor_map):
        raise ValueError("morphism map out of range")
    problems = []
    for m in range(a.n_mor):
        fm = fun.mor_map[m]
        if b.src[fm] != fun.obj_map[a.src[m]] or b.tgt[fm] != fun.obj_map[a.tgt[m]]:
            problems.append("morphism %d is not sent to a morphism between its image endpoints" % m)
    for x in range(a.n_obj):
        if fun.mor_map[a.identity[x]] != b.identity[fun.obj_map[x]]:
            problems.append("identity of object %d is not preserved" % x)
    for (g, f), h in a.comp.items():
        want = b.comp.get((fun.mor_map[g], fun.mor_map[f]))
        if want != fun.mor_map[h]:
            problems.append("composition of (%d, %d) is not preserved" % (g, f))
    return problems


@dataclass
class NatTransf:
    source: FunctorMap
    target: FunctorMap
    components: tuple

    def __post_init__(self):
        self.components = tuple(self.components)


def validate_nat(nat):
    """Naturality as a violation list; malformed components raise ValueError."""
    f, g = nat.source, nat.target
    if f.source != g.source or f.target != g.target:
        raise ValueError("the two functors are not parallel")
    a, b = f.source, f.target
    if len(nat.components) != a.n_obj:
        raise ValueError("one component per source object is required")
    if any(not 0 <= c < b.n_mor for c in nat.components):
        raise ValueError("component out of range")
    problems = []
    for x in range(a.n_obj):
        c = nat.components[x]
        if b.src[c] != f.obj_map[x] or b.tgt[c] != g.obj_map[x]:
            problems.append("component at object %d has wrong endpoints" % x)
            return problems
    for m in range(a.n_mor):
        x, y = a.src[m], a.tgt[m]
        left = b.comp.get((g.mor_map[m], nat.components[x]))
        right = b.comp.get((nat.components[y], f.mor_map[m]))
        if left != right:
            problems.append("naturality square at morphism %d does not commute" % m)
    return problems


def is_nat_iso(nat):
    return not validate_nat(nat) and all(nat.source.target.is_iso(c) for c in nat.components)


def equivalence_flags(fun):
    """Fully-faithful / essentially-surjective / injective-on-objects flags."""
    a, b = fun.source, fun.target
    ff = True
    for x in range(a.n_obj):
        for y in range(a.n_obj):
            image = [fun.mor_map[m] for m in a.hom(x, y)]
            if len(set(image)) < len(image) or set(b.hom(fun.obj_map[x], fun.obj_map[y])) != set(image):
                ff = False
    hit = set(fun.obj_map)
    eso = all(any(x in hit for x in cls) for cls in iso_classes(b)[0])
    return {
        "fully_faithful": ff,
        "essentially_surjective": eso,
        "injective_on_objects": len(set(fun.obj_map)) == a.n_obj,
        "is_equivalence": ff and eso,
    }


def is_equivalence(fun):
    return equivalence_flags(fun)["is_equivalence"]


@dataclass
class FiberChain:
    cat: FinCat
    obj_label: tuple
    mor_label: tuple
    obj_id: dict
    mor_id: dict
    projections: list


def chain_fiber_product(factors, right_maps, left_maps):
    """Iterated fiber product factors[0] x_B0 factors[1] x_B1 ...

    right_maps[i] : factors[i] -> B_i and left_maps[i] : factors[i+1] -> B_i
    give the matching constraints.  Objects and morphisms are the tuples that
    agree under them; composition is componentwise.  Labels and projection
    functors come along for free.
    """
    k = len(factors)
    if not (len(right_maps) == len(left_maps) == k - 1):
        raise ValueError("a chain of %d factors needs %d constraint pairs" % (k, k - 1))

    def tuples(sizes, right_of, left_of):
        out = [(v,) for v in range(sizes[0])]
        for i in range(1, k):
            buckets = {}
            for v in range(sizes[i]):
                buckets.setdefault(left_of[i - 1](v), []).append(v)
            out = [t + (v,) for t in out for v in buckets.get(right_of[i - 1](t[-1]), ())]
        return out

    objs = tuples([c.n_obj for c in factors],
                  [r.obj for r in right_maps], [l.obj for l in left_maps])
    mors = tuples([c.n_mor for c in factors],
                  [r.mor for r in right_maps], [l.mor for l in left_maps])
    obj_id = {t: i for i, t in enumerate(objs)}
    mor_id = {t: i for i, t in enumerate(mors)}
    src = [obj_id[tuple(factors[i].src[t[i]] for i in range(k))] for t in mors]
    tgt = [obj_id[tuple(factors[i].tgt[t[i]] for i in range(k))] for t in mors]
    identity = [mor_id[tuple(factors[i].identity[t[i]] for i in range(k))] for t in objs]
    by_src = {}
    for i, x in enumerate(src):
        by_src.setdefault(x, []).append(i)
    comp = {}
    for fi, f in enumerate(mors):
        for gi in by_src.get(tgt[fi], ()):
            g = mors[gi]
            comp[(gi, fi)] = mor_id[tuple(factors[i].comp[(g[i], f[i])] for i in range(k))]
    cat = FinCat(len(objs), src, tgt, identity, comp)
    projections = [
        FunctorMap(cat, factors[i], [t[i] for t in objs], [t[i] for t in mors])
        for i in range(k)
    ]
    return FiberChain(cat, tuple(objs), tuple(mors), obj_id, mor_id, projections)


def pullback(f, g):
    """Fiber product of the cospan f : A -> C <- B : g."""
    if f.target != g.target:
        raise ValueError("the cospan legs land in different categories")
    return chain_fiber_product([f.source, g.source], [f], [g])


def mediating_functor(chain, cone_maps):
    """The unique functor into a fiber product matching the given cone.

    cone_maps[i] : T -> factors[i] must agree under the chain's constraint
    maps (ValueError otherwise); the projections are jointly injective, so
    uniqueness is forced and the mediating functor is the tuple pairing.
    """
    t = cone_maps[0].source
    if len(cone_maps) != len(chain.projections):
        raise ValueError("one cone leg per factor is required")
    obj_map, mor_map = [], []
    for x in range(t.n_obj):
        lab = tuple(c.obj_map[x] for c in cone_maps)
        if lab not in chain.obj_id:
            raise ValueError("cone legs disagree on object %d" % x)
        obj_map.append(chain.obj_id[lab])
    for m in range(t.n_mor):
        lab = tuple(c.mor_map[m] for c in cone_maps)
        if lab not in chain.mor_id:
            raise ValueError("cone legs disagree on morphism %d" % m)
        mor_map.append(chain.mor_id[lab])
    return FunctorMap(t, chain.cat, obj_map, mor_map)


def full_subcategory(cat, objects):
    """(subcategory, inclusion) on the given objects, kept in sorted order."""
    objects = sorted(set(objects))
    obj_new = {x: i for i, x in enumerate(objects)}
    keep = [m for m in range(cat.n_mor)
            if cat.src[m] in obj_new and cat.tgt[m] in obj_new]
    mor_new = {m: i for i, m in enumerate(keep)}
    sub = FinCat(len(objects),
                 [obj_new[cat.src[m]] for m in keep],
                 [obj_new[cat.tgt[m]] for m in keep],
                 [mor_new[cat.identity[x]] for x in objects],
                 {(mor_new[g], mor_new[f]): mor_new[cat.comp[(g, f)]]
                  for (g, f) in cat.comp
                  if g in mor_new and f in mor_new})
    incl = FunctorMap(sub, cat, objects, keep)
    return sub, incl


@dataclass
class Boff:
    mid: FinCat
    to_mid: FunctorMap
    from_mid: FunctorMap
    mor_label: tuple
    mor_id: dict


def boff_factorize(fun):
    """Factor a functor as (fully faithful) . (bijective on objects).

    The middle category keeps the source's objects; its morphism x -> y
    labelled (x, y, m) is a target morphism m between the images.
    """
    a, b = fun.source, fun.target
    labels = []
    for x in range(a.n_obj):
        for y in range(a.n_obj):
            labels.extend((x, y, m) for m in b.hom(fun.obj_map[x], fun.obj_map[y]))
    labels.sort()
    mor_id = {t: i for i, t in enumerate(labels)}
    identity = [mor_id[(x, x, b.identity[fun.obj_map[x]])] for x in range(a.n_obj)]
    by_src = {}
    for t in labels:
        by_src.setdefault(t[0], []).append(t)
    comp = {}
    for t1 in labels:
        for t2 in by_src.get(t1[1], ()):
            comp[(mor_id[t2], mor_id[t1])] = mor_id[(t1[0], t2[1], b.comp[(t2[2], t1[2])])]
    mid = FinCat(a.n_obj, [t[0] for t in labels], [t[1] for t in labels], identity, comp)
    to_mid = FunctorMap(a, mid, range(a.n_obj),
                        [mor_id[(a.src[m], a.tgt[m], fun.mor_map[m])] for m in range(a.n_mor)])
    from_mid = FunctorMap(mid, b, fun.obj_map, [t[2] for t in labels])
    return Boff(mid, to_mid, from_mid, tuple(labels), mor_id)


@dataclass
class Retraction:
    forward: FunctorMap
    backward: FunctorMap
    counit: NatTransf


def retraction_pseudo_inverse(fun):
    """Retraction of an injective-on-objects equivalence F, with G . F = Id.

    Counit components FG => Id are identities on the image of F; off the
    image the smallest witnessing object and then the smallest iso are
    chosen, so the result is deterministic.
    """
    flags = equivalence_flags(fun)
    if not (flags["is_equivalence"] and flags["injective_on_objects"]):
        raise ValueError("need an injective-on-objects equivalence")
    a, b = fun.source, fun.target
    preim = {fun.obj_map[x]: x for x in range(a.n_obj)}
    gobj, eps = [], []
    for y in range(b.n_obj):
        if y in preim:
            gobj.append(preim[y])
            eps.append(b.identity[y])
        else:
            found = next((x, m) for x in range(a.n_obj)
                         for m in b.hom(fun.obj_map[x], y) if b.is_iso(m))
            gobj.append(found[0])
            eps.append(found[1])
    gmor = []
    for m in range(b.n_mor):
        y0, y1 = b.src[m], b.tgt[m]
        conj = b.comp[(b.inverse(eps[y1]), b.comp[(m, eps[y0])])]
        cand = [n for n in a.hom(gobj[y0], gobj[y1]) if fun.mor_map[n] == conj]
        assert len(cand) == 1, "fully faithful transport must have a unique preimage"
        gmor.append(cand[0])
    g = FunctorMap(b, a, gobj, gmor)
    counit = NatTransf(compose_functors(fun, g), identity_functor(b), eps)
    return Retraction(fun, g, counit)
