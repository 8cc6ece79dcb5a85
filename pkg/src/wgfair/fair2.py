"""Fair structures: semi-category data for arrows and weak units over points.

A presentation keeps a category of points, a semi-category of arrows with
source and target anchors, and a semi-category of weak units embedded into
the arrows.  No unit laws are imposed on either composition; associativity
is strict and checked by enumeration.  Evaluation turns a presentation into
levels indexed by colored ordinals: plain edges read arrows, colored edges
read units, and the contravariant action folds paths using the two
compositions, pushing units into arrows where a plain edge crosses a
colored run.  Tuples read left to right in diagram order, matching the
double-category module.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import deltasite as ds
from . import fincat as fc


class FairPresentation:
    """Points, arrows and units with their anchors and compositions.

    src and tgt anchor arrows at points; value anchors units, and as_arrow
    embeds units into arrows over their value on both sides.  pair_arrows
    and pair_units are the strict composable-pair categories the two
    composition functors act on.
    """

    def __init__(self, points, arrows, units, src, tgt, value, as_arrow,
                 pair_arrows, comp_arrows, pair_units, comp_units):
        self.points = points
        self.arrows = arrows
        self.units = units
        self.src = src
        self.tgt = tgt
        self.value = value
        self.as_arrow = as_arrow
        self.pair_arrows = pair_arrows
        self.comp_arrows = comp_arrows
        self.pair_units = pair_units
        self.comp_units = comp_units


def from_presentation(points, arrows, units, src, tgt, value, as_arrow,
                      compose_arrow_obj, compose_arrow_mor,
                      compose_unit_obj, compose_unit_mor):
    """Assemble a fair presentation from generating data, checking laws.

    The compose callables give the composite of a strictly composable pair
    in diagram order, objects and morphisms separately.  There are no unit
    laws to check; associativity, anchor compatibility and the unit
    embedding being a semi-functor all raise ValueError with a witness.
    """
    for name, fun, fsrc, ftgt in (("source", src, arrows, points),
                                  ("target", tgt, arrows, points),
                                  ("value", value, units, points),
                                  ("unit", as_arrow, units, arrows)):
        if fun.source != fsrc or fun.target != ftgt:
            raise ValueError("%s map has wrong endpoints" % name)
        bad = fc.validate_functor(fun)
        if bad:
            raise ValueError("%s map is not a functor: %s" % (name, bad[0]))
    for name, anchor in (("start", src), ("end", tgt)):
        if fc.compose_functors(anchor, as_arrow) != value:
            raise ValueError("unit arrows do not %s at their point" % name)

    pair_arrows = fc.chain_fiber_product([arrows, arrows], [tgt], [src])
    comp_arrows = fc.FunctorMap(
        pair_arrows.cat, arrows,
        [compose_arrow_obj(*t) for t in pair_arrows.obj_label],
        [compose_arrow_mor(*t) for t in pair_arrows.mor_label])
    pair_units = fc.chain_fiber_product([units, units], [value], [value])
    comp_units = fc.FunctorMap(
        pair_units.cat, units,
        [compose_unit_obj(*t) for t in pair_units.obj_label],
        [compose_unit_mor(*t) for t in pair_units.mor_label])
    for tag, comp in (("", comp_arrows), ("unit ", comp_units)):
        bad = fc.validate_functor(comp)
        if bad:
            raise ValueError("%scomposition is not functorial: %s" % (tag, bad[0]))
    pr = pair_arrows.projections
    if fc.compose_functors(src, comp_arrows) != fc.compose_functors(src, pr[0]):
        raise ValueError("composition does not start where the first factor starts")
    if fc.compose_functors(tgt, comp_arrows) != fc.compose_functors(tgt, pr[1]):
        raise ValueError("composition does not end where the second factor ends")
    pru = pair_units.projections
    if fc.compose_functors(value, comp_units) != fc.compose_functors(value, pru[0]):
        raise ValueError("unit composition does not stay over its point")

    for tag, fac, chain, comp in (("", arrows, pair_arrows, comp_arrows),
                                  ("unit ", units, pair_units, comp_units)):
        anchors = (tgt, src) if tag == "" else (value, value)
        tri = fc.chain_fiber_product([fac] * 3, [anchors[0]] * 2, [anchors[1]] * 2)
        for lab, pid, cid in ((tri.obj_label, chain.obj_id, comp.obj),
                              (tri.mor_label, chain.mor_id, comp.mor)):
            for t in lab:
                f, g, h = t
                fg, gh = cid(pid[(f, g)]), cid(pid[(g, h)])
                if cid(pid[(fg, h)]) != cid(pid[(f, gh)]):
                    raise ValueError("%scomposition is not associative at"
                                     " triple %r" % (tag, t))
    for lab, pid, uid, cu, ca in (
            (pair_units.obj_label, pair_arrows.obj_id, as_arrow.obj,
             comp_units.obj, comp_arrows.obj),
            (pair_units.mor_label, pair_arrows.mor_id, as_arrow.mor,
             comp_units.mor, comp_arrows.mor)):
        for i, t in enumerate(lab):
            if uid(cu(i)) != ca(pid[(uid(t[0]), uid(t[1]))]):
                raise ValueError("unit embedding is not a semi-functor at"
                                 " pair %r" % (t,))
    return FairPresentation(points, arrows, units, src, tgt, value, as_arrow,
                            pair_arrows, comp_arrows, pair_units, comp_units)


# ---------------------------------------------------------------------------
# Evaluation on the colored ordinal window


def _fold(chain, comp, entries, use_mor):
    ids = chain.mor_id if use_mor else chain.obj_id
    app = comp.mor if use_mor else comp.obj
    acc = entries[0]
    for e in entries[1:]:
        acc = app(ids[(acc, e)])
    return acc


class FairDiagram:
    """A presentation evaluated on the truncation window, caches included.

    Levels are built edgewise, so the Segal maps are identities by
    construction; the action of a colored map against the diagram direction
    is a functor between levels.
    """

    def __init__(self, p, window=None):
        self.p = p
        self.window = window if window is not None else ds.TruncationWindow()
        self._shapes = None
        self._chains = {}
        self._actions = {}
        self._disc = None

    def shapes(self):
        if self._shapes is None:
            self._shapes = ds.window_objects(self.window)
        return self._shapes

    def discretization(self):
        if self._disc is None:
            self._disc = fc.discretize(self.p.points)
        return self._disc

    def edge_cats(self, shape):
        return [self.p.units if i in shape.colored else self.p.arrows
                for i in range(shape.dots - 1)]

    def left_anchor(self, shape, i):
        return self.p.value if i in shape.colored else self.p.src

    def right_anchor(self, shape, i):
        return self.p.value if i in shape.colored else self.p.tgt

    def chain(self, shape):
        if shape not in self._chains:
            n = shape.dots - 1
            self._chains[shape] = fc.chain_fiber_product(
                self.edge_cats(shape),
                [self.right_anchor(shape, i) for i in range(n - 1)],
                [self.left_anchor(shape, i + 1) for i in range(n - 1)])
        return self._chains[shape]

    def level(self, shape):
        n = shape.dots - 1
        if n == 0:
            return self.p.points
        if n == 1:
            return self.edge_cats(shape)[0]
        return self.chain(shape).cat

    def obj_entries(self, shape, o):
        if shape.dots == 2:
            return (o,)
        return self.chain(shape).obj_label[o]

    def mor_entries(self, shape, m):
        if shape.dots == 2:
            return (m,)
        return self.chain(shape).mor_label[m]

    def pack_obj(self, shape, parts):
        if shape.dots == 2:
            return parts[0]
        return self.chain(shape).obj_id[tuple(parts)]

    def pack_mor(self, shape, parts):
        if shape.dots == 2:
            return parts[0]
        return self.chain(shape).mor_id[tuple(parts)]

    def dot_obj(self, shape, o, d):
        if shape.dots == 1:
            return o
        t = self.obj_entries(shape, o)
        if d < shape.dots - 1:
            return self.left_anchor(shape, d).obj(t[d])
        return self.right_anchor(shape, d - 1).obj(t[d - 1])

    def dot_mor(self, shape, m, d):
        if shape.dots == 1:
            return m
        t = self.mor_entries(shape, m)
        if d < shape.dots - 1:
            return self.left_anchor(shape, d).mor(t[d])
        return self.right_anchor(shape, d - 1).mor(t[d - 1])

    def action(self, fat):
        """Functor induced on levels, against the direction of the map."""
        if fat not in self._actions:
            self._actions[fat] = self._build_action(fat)
        return self._actions[fat]

    def _build_action(self, fat):
        top = self.level(fat.tgt)
        if fat.src.dots == 1:
            d = fat.dotmap[0]
            return fc.FunctorMap(
                top, self.p.points,
                [self.dot_obj(fat.tgt, o, d) for o in range(top.n_obj)],
                [self.dot_mor(fat.tgt, m, d) for m in range(top.n_mor)])
        obj_map = [self.pack_obj(fat.src,
                                 self._pull(fat, self.obj_entries(fat.tgt, o), False))
                   for o in range(top.n_obj)]
        mor_map = [self.pack_mor(fat.src,
                                 self._pull(fat, self.mor_entries(fat.tgt, m), True))
                   for m in range(top.n_mor)]
        return fc.FunctorMap(top, self.level(fat.src), obj_map, mor_map)

    def _pull(self, fat, entries, use_mor):
        out = []
        for j in range(fat.src.dots - 1):
            lo, hi = fat.dotmap[j], fat.dotmap[j + 1]
            path = [(entries[i], i in fat.tgt.colored) for i in range(lo, hi)]
            out.append(self._composite(path, j in fat.src.colored, use_mor))
        return out

    def _composite(self, path, into_units, use_mor):
        p = self.p
        if into_units:
            # a colored edge only ever covers colored edges
            return _fold(p.pair_units, p.comp_units,
                         [e for e, _c in path], use_mor)
        pieces, run = [], []
        for e, colored in path:
            if colored:
                run.append(e)
            else:
                if run:
                    pieces.append(self._realize(run, use_mor))
                    run = []
                pieces.append(e)
        if run:
            pieces.append(self._realize(run, use_mor))
        return _fold(p.pair_arrows, p.comp_arrows, pieces, use_mor)

    def _realize(self, run, use_mor):
        p = self.p
        w = _fold(p.pair_units, p.comp_units, run, use_mor)
        return (p.as_arrow.mor if use_mor else p.as_arrow.obj)(w)


def build_fair(p, window=None):
    """Evaluate a presentation and verify functoriality on the window.

    Every composable pair of window maps is checked; a failure names the
    pair.  With the presentation laws already enforced this is a defense
    line, not an expected exit.
    """
    d = FairDiagram(p, window)
    shapes = d.shapes()
    homs = {}
    for a in shapes:
        for b in shapes:
            homs[(a, b)] = ds.enumerate_hom(a, b)
    for a in shapes:
        for b in shapes:
            for f in homs[(a, b)]:
                af = d.action(f)
                for c in shapes:
                    for g in homs[(b, c)]:
                        if d.action(ds.compose_fat(g, f)) != \
                                fc.compose_functors(af, d.action(g)):
                            raise ValueError(
                                "evaluation is not functorial at the pair"
                                " (%r, %r)" % (f, g))
    return d


# ---------------------------------------------------------------------------
# The fair axioms over discrete points


def unit_generator_maps():
    """The window maps whose actions are the weak unit comparisons."""
    o = ds.parse_ordinal("o")
    oo = ds.parse_ordinal("o-o")
    uu = ds.parse_ordinal("o=o")
    return [
        ("left unit anchor", ds.FatMap(o, uu, (0,))),
        ("right unit anchor", ds.FatMap(o, uu, (1,))),
        ("unit absorbed on the left", ds.FatMap(oo, ds.parse_ordinal("o=o-o"), (0, 2))),
        ("unit absorbed on the right", ds.FatMap(oo, ds.parse_ordinal("o-o=o"), (0, 2))),
        ("composition of unit pairs", ds.FatMap(uu, ds.parse_ordinal("o=o=o"), (0, 2))),
    ]


def vertical_window_maps(window):
    """Window maps that collapse to an identity, identities excluded."""
    out = []
    shapes = ds.window_objects(window)
    for a in shapes:
        for b in shapes:
            for f in ds.enumerate_hom(a, b):
                c = ds.collapse(f)
                if c == ds.identity_simplex(c.src_rank) and \
                        f != ds.fat_identity(a):
                    out.append(f)
    return out


def validate_fair2(d):
    """Axioms of the discrete-points fair structure, one line per failure."""
    problems = []
    p = d.p
    if p.points.n_mor != p.points.n_obj:
        problems.append("points are not discrete")
    named = set()
    for name, fat in unit_generator_maps():
        named.add(fat)
        flags = fc.equivalence_flags(d.action(fat))
        if not flags["is_equivalence"]:
            problems.append(
                "the %s map is not an equivalence (fully_faithful=%s,"
                " essentially_surjective=%s)"
                % (name, flags["fully_faithful"], flags["essentially_surjective"]))
    # the five generators force every unit-inserting map to an equivalence;
    # sweeping them all keeps that consequence honest
    for fat in vertical_window_maps(d.window):
        if fat not in named and not fc.is_equivalence(d.action(fat)):
            problems.append("vertical map %r is not sent to an equivalence"
                            % (fat,))
    return problems


# ---------------------------------------------------------------------------
# The weakly globular variant


def class_chain(d, shape):
    """Edgewise fiber product over the point classes instead of the points."""
    gamma = d.discretization().quotient
    n = shape.dots - 1
    return fc.chain_fiber_product(
        d.edge_cats(shape),
        [fc.compose_functors(gamma, d.right_anchor(shape, i)) for i in range(n - 1)],
        [fc.compose_functors(gamma, d.left_anchor(shape, i + 1)) for i in range(n - 1)])


def induced_segal(d, shape):
    """Embedding of the strict level into the class-composable tuples."""
    return fc.mediating_functor(class_chain(d, shape), d.chain(shape).projections)


def validate_fairwg(d):
    """Axioms of the weakly globular fair structure, one line per failure."""
    problems = []
    flag, wit = fc.is_homotopically_discrete(d.p.points)
    if not flag:
        problems.append("axiom (a): points are not homotopically discrete"
                        " (witness morphism %d)" % wit)
        return problems
    # axiom (b) asks each level to be the edgewise fiber product of its
    # one-edge levels; the evaluation builds levels that way, so the Segal
    # maps are identities and there is nothing to enumerate
    for shape in d.shapes():
        if shape.dots < 3:
            continue
        flags = fc.equivalence_flags(induced_segal(d, shape))
        if not flags["is_equivalence"]:
            problems.append(
                "axiom (c): induced Segal map at %s is not an equivalence"
                " (fully_faithful=%s, essentially_surjective=%s)"
                % (shape.text(), flags["fully_faithful"],
                   flags["essentially_surjective"]))
    for name, fat in unit_generator_maps():
        if not fc.is_equivalence(d.action(fat)):
            problems.append("axiom (d): the %s map is not an equivalence" % name)
    return problems


# ---------------------------------------------------------------------------
# Fundamental category and hom fibers


@dataclass
class FairPi1:
    cat: fc.FinCat
    point_classes: list
    point_class_of: tuple
    arrow_classes: list
    arrow_class_of: tuple


def pi1_fair(d):
    """Fundamental category: iso classes levelwise, composition descended.

    Verifies on the way that composition descends single-valuedly, that the
    pairs level is the strict fiber product of classes, and that the units
    give well-defined identities; any failure raises ValueError rather than
    guessing.
    """
    p = d.p
    point_classes, pcof = fc.iso_classes(p.points)
    arrow_classes, acof = fc.iso_classes(p.arrows)
    src = [pcof[p.src.obj(cls[0])] for cls in arrow_classes]
    tgt = [pcof[p.tgt.obj(cls[0])] for cls in arrow_classes]
    ident = [None] * len(point_classes)
    for w in range(p.units.n_obj):
        c = pcof[p.value.obj(w)]
        a = acof[p.as_arrow.obj(w)]
        if ident[c] is None:
            ident[c] = a
        elif ident[c] != a:
            raise ValueError("unit classes disagree at point class %d" % c)
    for c, a in enumerate(ident):
        if a is None:
            raise ValueError("point class %d has no unit" % c)
    table = {}
    for i, (f, g) in enumerate(p.pair_arrows.obj_label):
        key = (acof[g], acof[f])
        val = acof[p.comp_arrows.obj(i)]
        if table.setdefault(key, val) != val:
            raise ValueError("descended composition is not single-valued at"
                             " classes (%d, %d)" % key)
    for mg in range(len(arrow_classes)):
        for mf in range(len(arrow_classes)):
            if tgt[mf] == src[mg] and (mg, mf) not in table:
                raise ValueError("no composable representatives for classes"
                                 " (%d, %d)" % (mg, mf))
    pair_classes, _ = fc.iso_classes(p.pair_arrows.cat)
    seen = set()
    for cls in pair_classes:
        f, g = p.pair_arrows.obj_label[cls[0]]
        key = (acof[f], acof[g])
        if key in seen:
            raise ValueError("pairs level does not descend to the fiber product"
                             " of classes at %r" % (key,))
        seen.add(key)
    composable = {(mf, mg) for mf in range(len(arrow_classes))
                  for mg in range(len(arrow_classes)) if tgt[mf] == src[mg]}
    if seen != composable:
        raise ValueError("pairs level misses some composable class pair")
    cat = fc.FinCat(len(point_classes), src, tgt, ident, table)
    bad = fc.validate_category(cat)
    if bad:
        raise ValueError("descended category law fails: %s" % bad[0])
    return FairPi1(cat, point_classes, pcof, arrow_classes, acof)


def hom_fiber_fair(d, a, b):
    """Full subcategory of arrows from point class a to point class b.

    Returns (category, inclusion into the arrows).
    """
    p = d.p
    _, pcof = fc.iso_classes(p.points)
    objs = [f for f in range(p.arrows.n_obj)
            if pcof[p.src.obj(f)] == a and pcof[p.tgt.obj(f)] == b]
    return fc.full_subcategory(p.arrows, objs)


# ---------------------------------------------------------------------------
# Maps of fair structures


@dataclass
class FairMap:
    source: FairDiagram
    target: FairDiagram
    on_points: fc.FunctorMap
    on_arrows: fc.FunctorMap
    on_units: fc.FunctorMap


def validate_fair_map(fmap):
    """Componentwise functor squares, as a violation list."""
    problems = []
    x, y = fmap.source.p, fmap.target.p
    for fun, tag in ((fmap.on_points, "point"), (fmap.on_arrows, "arrow"),
                     (fmap.on_units, "unit")):
        bad = fc.validate_functor(fun)
        if bad:
            problems.append("%s component is not a functor: %s" % (tag, bad[0]))
    for name, ax, ay, comp in (("source", x.src, y.src, fmap.on_arrows),
                               ("target", x.tgt, y.tgt, fmap.on_arrows),
                               ("value", x.value, y.value, fmap.on_units)):
        if fc.compose_functors(ay, comp) != fc.compose_functors(fmap.on_points, ax):
            problems.append("%s square does not commute" % name)
    if fc.compose_functors(fmap.on_arrows, x.as_arrow) != \
            fc.compose_functors(y.as_arrow, fmap.on_units):
        problems.append("unit embedding square does not commute")
    for tag, chx, chy, cx, cy, comp in (
            ("", x.pair_arrows, y.pair_arrows, x.comp_arrows, y.comp_arrows,
             fmap.on_arrows),
            ("unit ", x.pair_units, y.pair_units, x.comp_units, y.comp_units,
             fmap.on_units)):
        legs = [fc.compose_functors(comp, pr) for pr in chx.projections]
        two = fc.mediating_functor(chy, legs)
        if fc.compose_functors(cy, two) != fc.compose_functors(comp, cx):
            problems.append("%scomposition square does not commute" % tag)
    return problems


def level_map_fair(fmap, shape):
    """The induced functor on the level of a colored ordinal."""
    n = shape.dots - 1
    if n == 0:
        return fmap.on_points
    comps = [fmap.on_units if i in shape.colored else fmap.on_arrows
             for i in range(n)]
    if n == 1:
        return comps[0]
    legs = [fc.compose_functors(comps[i], fmap.source.chain(shape).projections[i])
            for i in range(n)]
    return fc.mediating_functor(fmap.target.chain(shape), legs)


def identity_fair_map(d):
    return FairMap(d, d, fc.identity_functor(d.p.points),
                   fc.identity_functor(d.p.arrows),
                   fc.identity_functor(d.p.units))


def compose_fair_maps(g, f):
    if g.source is not f.target and g.source.p is not f.target.p:
        raise ValueError("fair maps are not composable")
    return FairMap(f.source, g.target,
                   fc.compose_functors(g.on_points, f.on_points),
                   fc.compose_functors(g.on_arrows, f.on_arrows),
                   fc.compose_functors(g.on_units, f.on_units))


def pi1_fair_map(fmap, p_src=None, p_tgt=None):
    """Functor induced on fundamental categories."""
    p_src = p_src if p_src is not None else pi1_fair(fmap.source)
    p_tgt = p_tgt if p_tgt is not None else pi1_fair(fmap.target)
    fun = fc.FunctorMap(
        p_src.cat, p_tgt.cat,
        [p_tgt.point_class_of[fmap.on_points.obj(cls[0])]
         for cls in p_src.point_classes],
        [p_tgt.arrow_class_of[fmap.on_arrows.obj(cls[0])]
         for cls in p_src.arrow_classes])
    bad = fc.validate_functor(fun)
    if bad:
        raise ValueError("induced map is not functorial: %s" % bad[0])
    return fun


def is_2equivalence_fair(fmap):
    """Hom-fiber equivalences plus fundamental-category equivalence.

    Same shape of verdicts as the double-category version: the relaxed one
    only asks the fundamental map to be surjective on objects.
    """
    x, y = fmap.source, fmap.target
    p_src, p_tgt = pi1_fair(x), pi1_fair(y)
    pf = pi1_fair_map(fmap, p_src, p_tgt)
    pflags = fc.equivalence_flags(pf)
    fibers_ok = True
    for a in range(len(p_src.point_classes)):
        for b in range(len(p_src.point_classes)):
            sub_x, incl_x = hom_fiber_fair(x, a, b)
            if sub_x.n_obj == 0:
                continue
            a2, b2 = pf.obj(a), pf.obj(b)
            sub_y, incl_y = hom_fiber_fair(y, a2, b2)
            pos_obj = {incl_y.obj(o): o for o in range(sub_y.n_obj)}
            pos_mor = {incl_y.mor(m): m for m in range(sub_y.n_mor)}
            rest = fc.FunctorMap(
                sub_x, sub_y,
                [pos_obj[fmap.on_arrows.obj(incl_x.obj(o))]
                 for o in range(sub_x.n_obj)],
                [pos_mor[fmap.on_arrows.mor(incl_x.mor(m))]
                 for m in range(sub_x.n_mor)])
            if not fc.is_equivalence(rest):
                fibers_ok = False
    surj = set(pf.obj_map) == set(range(p_tgt.cat.n_obj))
    return {
        "hom_fiber_equivalences": fibers_ok,
        "pi1_equivalence": pflags["is_equivalence"],
        "pi1_surjective_on_objects": surj,
        "is_2equivalence": fibers_ok and pflags["is_equivalence"],
        "is_2equivalence_relaxed": fibers_ok and surj,
    }


# ---------------------------------------------------------------------------
# Rebasing onto the point classes


class FairCleavage:
    """Chosen transports of arrows and units along point isomorphisms.

    arrows maps (arrow, iso into its source point) to a transported arrow
    with that source and an invertible connecting cell; units maps (unit,
    iso into its value) likewise inside the unit semi-category.  unit_of
    remembers the least preimage of each unit arrow.
    """

    def __init__(self, arrows, units, unit_of):
        self.arrows = arrows
        self.units = units
        self.unit_of = unit_of


def _only(items):
    assert len(items) == 1
    return items[0]


def _dragged(section, class_of, xo, sf, t):
    # both endpoints of a transported arrow move: the target is carried by
    # the same class permutation that moves sf to xo (a pair of section
    # swaps), and stays put when it lives in a different class.  Fixing the
    # target instead leaves the rebased composition non-associative as soon
    # as a composite lands in the unit image.
    c = class_of[sf]
    if class_of[t] != c:
        return t
    sec = section.obj(c)
    for y in (sf, xo):
        if t == sec:
            t = y
        elif t == y:
            t = sec
    return t


def build_fair_cleavage(p):
    """Search lawful transports, least transported object and cell first.

    Raises ValueError when an arrow or unit has no transport along some
    point isomorphism; that is an honest obstruction of the instance, not
    a bug.
    """
    disc = fc.discretize(p.points)
    _, class_of = fc.iso_classes(p.points)
    members = {}
    for o in range(p.points.n_obj):
        members.setdefault(class_of[o], []).append(o)
    arrows = {}
    for f in range(p.arrows.n_obj):
        sf, tf = p.src.obj(f), p.tgt.obj(f)
        for xo in members[class_of[sf]]:
            phi = _only(p.points.hom(xo, sf))
            if xo == sf:
                arrows[(f, phi)] = (f, p.arrows.identity[f])
                continue
            tf2 = _dragged(disc.section, class_of, xo, sf, tf)
            psi = _only(p.points.hom(tf2, tf))
            best = None
            for lam in range(p.arrows.n_mor):
                if p.arrows.tgt[lam] != f or not p.arrows.is_iso(lam):
                    continue
                g = p.arrows.src[lam]
                if p.src.obj(g) != xo or p.tgt.obj(g) != tf2:
                    continue
                if p.src.mor(lam) != phi or p.tgt.mor(lam) != psi:
                    continue
                if best is None or (g, lam) < best:
                    best = (g, lam)
            if best is None:
                raise ValueError("no transport of arrow %d along point"
                                 " isomorphism %d" % (f, phi))
            arrows[(f, phi)] = best
    units = {}
    for w in range(p.units.n_obj):
        v = p.value.obj(w)
        for xo in members[class_of[v]]:
            phi = _only(p.points.hom(xo, v))
            if xo == v:
                units[(w, phi)] = (w, p.units.identity[w])
                continue
            best = None
            for iot in range(p.units.n_mor):
                if p.units.tgt[iot] != w or not p.units.is_iso(iot):
                    continue
                w2 = p.units.src[iot]
                if p.value.obj(w2) != xo or p.value.mor(iot) != phi:
                    continue
                if best is None or (w2, iot) < best:
                    best = (w2, iot)
            if best is None:
                raise ValueError("no transport of unit %d along point"
                                 " isomorphism %d" % (w, phi))
            units[(w, phi)] = best
    unit_of = {}
    for w in range(p.units.n_obj):
        unit_of.setdefault(p.as_arrow.obj(w), w)
    return FairCleavage(arrows, units, unit_of)


@dataclass
class FairRetractions:
    strategy: str
    arrow_pairs: fc.FiberChain
    muhat_arrows: fc.FunctorMap
    nu_arrows: fc.FunctorMap
    counit_arrows: fc.NatTransf
    unit_pairs: fc.FiberChain
    muhat_units: fc.FunctorMap
    nu_units: fc.FunctorMap
    counit_units: fc.NatTransf


def _arrow_walk(p, cl, hat, strict_chain):
    """Cleavage-strategy section on class-composable arrow pairs.

    Anchors the first component and transports the second to start exactly
    where the first ends; a component that is a unit arrow is transported
    inside the unit semi-category instead and re-embedded, which is what
    later makes the unit embedding survive the rebasing.
    """
    walks = []
    for t in hat.obj_label:
        objs, lams = [t[0]], [p.arrows.identity[t[0]]]
        for a in t[1:]:
            anchor = p.tgt.obj(objs[-1])
            w = cl.unit_of.get(a)
            if w is not None:
                phi = _only(p.points.hom(anchor, p.value.obj(w)))
                w2, iot = cl.units[(w, phi)]
                objs.append(p.as_arrow.obj(w2))
                lams.append(p.as_arrow.mor(iot))
            else:
                phi = _only(p.points.hom(anchor, p.src.obj(a)))
                g, lam = cl.arrows[(a, phi)]
                objs.append(g)
                lams.append(lam)
        walks.append((tuple(objs), tuple(lams)))
    return _walk_functor(p.arrows, walks, hat, strict_chain)


def _unit_walk(p, cl, hat, strict_chain):
    """Same anchoring for class-composable unit pairs."""
    walks = []
    for t in hat.obj_label:
        objs, lams = [t[0]], [p.units.identity[t[0]]]
        for w in t[1:]:
            anchor = p.value.obj(objs[-1])
            phi = _only(p.points.hom(anchor, p.value.obj(w)))
            w2, iot = cl.units[(w, phi)]
            objs.append(w2)
            lams.append(iot)
        walks.append((tuple(objs), tuple(lams)))
    return _walk_functor(p.units, walks, hat, strict_chain)


def _walk_functor(level, walks, hat, strict_chain):
    obj_map = [strict_chain.obj_id[w[0]] for w in walks]
    mor_map = []
    for mt in hat.mor_label:
        mid = hat.mor_id[mt]
        _, lams_a = walks[hat.cat.src[mid]]
        _, lams_b = walks[hat.cat.tgt[mid]]
        parts = tuple(
            level.compose(level.inverse(lams_b[j]),
                          level.compose(mt[j], lams_a[j]))
            for j in range(len(mt)))
        mor_map.append(strict_chain.mor_id[parts])
    nu = fc.FunctorMap(hat.cat, strict_chain.cat, obj_map, mor_map)
    counit = [hat.mor_id[lams] for _, lams in walks]
    return nu, counit


def pair_retractions(d, strategy="cleavage", cleavage=None):
    """Chosen retractions of the pair embeddings over the point classes.

    Both the arrow pairs and the unit pairs get a section nu with
    nu . muhat the identity on the nose and an invertible counit
    muhat . nu => Id; strategy "cleavage" uses the anchored transport walk,
    "retraction" the generic minimal-identity retraction.
    """
    p = d.p
    gamma = d.discretization().quotient
    hat_a = fc.chain_fiber_product(
        [p.arrows, p.arrows],
        [fc.compose_functors(gamma, p.tgt)], [fc.compose_functors(gamma, p.src)])
    hat_u = fc.chain_fiber_product(
        [p.units, p.units],
        [fc.compose_functors(gamma, p.value)],
        [fc.compose_functors(gamma, p.value)])
    mu_a = fc.mediating_functor(hat_a, p.pair_arrows.projections)
    mu_u = fc.mediating_functor(hat_u, p.pair_units.projections)
    if strategy == "retraction":
        ra, ru = fc.retraction_pseudo_inverse(mu_a), fc.retraction_pseudo_inverse(mu_u)
        out = FairRetractions(strategy, hat_a, mu_a, ra.backward, ra.counit,
                              hat_u, mu_u, ru.backward, ru.counit)
    elif strategy == "cleavage":
        cl = cleavage if cleavage is not None else build_fair_cleavage(p)
        nu_a, ca = _arrow_walk(p, cl, hat_a, p.pair_arrows)
        nu_u, cu = _unit_walk(p, cl, hat_u, p.pair_units)
        out = FairRetractions(
            strategy, hat_a, mu_a, nu_a,
            fc.NatTransf(fc.compose_functors(mu_a, nu_a),
                         fc.identity_functor(hat_a.cat), ca),
            hat_u, mu_u, nu_u,
            fc.NatTransf(fc.compose_functors(mu_u, nu_u),
                         fc.identity_functor(hat_u.cat), cu))
    else:
        raise ValueError("unknown strategy %r" % (strategy,))
    for nu, mu, level in ((out.nu_arrows, mu_a, p.pair_arrows.cat),
                          (out.nu_units, mu_u, p.pair_units.cat)):
        if fc.compose_functors(nu, mu) != fc.identity_functor(level):
            raise ValueError("section law fails for the %s strategy" % strategy)
    return out


def discretize_fair(d, strategy="cleavage", cleavage=None):
    """Rebase a weakly globular fair structure onto its point classes.

    The arrow and unit levels stay what they were; only the anchors move to
    the class quotient and the compositions are re-based through the chosen
    pair retractions.  On an input whose points are already discrete the
    result is the input again.  The output is assembled through the full
    law checks, so a strategy whose retraction breaks associativity or the
    unit embedding surfaces as a ValueError, not as silent damage.
    """
    p = d.p
    disc = d.discretization()
    retr = pair_retractions(d, strategy, cleavage)
    gamma = disc.quotient

    # the rebased pair chains re-enumerate exactly the class-composable
    # tuples, so the labels below agree with the walked chains
    def comp_arrow_obj(f, g):
        return p.comp_arrows.obj(retr.nu_arrows.obj(retr.arrow_pairs.obj_id[(f, g)]))

    def comp_arrow_mor(m, n):
        return p.comp_arrows.mor(retr.nu_arrows.mor(retr.arrow_pairs.mor_id[(m, n)]))

    def comp_unit_obj(w1, w2):
        return p.comp_units.obj(retr.nu_units.obj(retr.unit_pairs.obj_id[(w1, w2)]))

    def comp_unit_mor(m, n):
        return p.comp_units.mor(retr.nu_units.mor(retr.unit_pairs.mor_id[(m, n)]))

    out = from_presentation(
        disc.discrete, p.arrows, p.units,
        fc.compose_functors(gamma, p.src), fc.compose_functors(gamma, p.tgt),
        fc.compose_functors(gamma, p.value), p.as_arrow,
        comp_arrow_obj, comp_arrow_mor, comp_unit_obj, comp_unit_mor)
    return build_fair(out, d.window)


# ---------------------------------------------------------------------------
# Generators


def fair_from_category(base):
    """A category as a fair structure: discrete levels, strict everything.

    Arrows are the morphisms of base with no cells between them, units are
    the objects sitting on their identity arrows, and both compositions
    come from base itself.
    """
    points = fc.discrete(base.n_obj)
    arrows = fc.discrete(base.n_mor)
    units = fc.discrete(base.n_obj)
    src = fc.FunctorMap(arrows, points, list(base.src), list(base.src))
    tgt = fc.FunctorMap(arrows, points, list(base.tgt), list(base.tgt))
    value = fc.FunctorMap(units, points, list(range(base.n_obj)),
                          list(range(base.n_obj)))
    as_arrow = fc.FunctorMap(units, arrows, list(base.identity), list(base.identity))
    p = from_presentation(
        points, arrows, units, src, tgt, value, as_arrow,
        lambda f, g: base.comp[(g, f)], lambda m, n: base.comp[(n, m)],
        lambda w1, w2: w1, lambda m, n: m)
    return build_fair(p)
