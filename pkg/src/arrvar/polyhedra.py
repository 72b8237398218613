"""Exact rational polyhedral cones, fans and truncated cells.

Both descriptions of a cone are produced by the double description
method with the combinatorial adjacency test, run on integer data.
"""

import itertools
from functools import lru_cache
from fractions import Fraction
from math import ceil, floor, gcd as _gcd

from .exactmath import (dot, orthogonal_complement, primitive_of_rational, primitive_vector,
                        rank, rref, solve_linear)


def _saturate(vectors, d):
    """Canonical basis of span(vectors): primitive rows of its rref."""
    vectors = tuple(tuple(v) for v in vectors if any(v))
    return _canonical_basis(vectors) if vectors else ()


@lru_cache(maxsize=8192)
def _canonical_basis(vectors):
    R, piv = rref(vectors)
    return tuple(primitive_of_rational(R[k]) for k in range(len(piv)))


def _prim(v):
    return primitive_vector(v) if any(v) else tuple(0 for _ in v)


def _projector(basis, d):
    """Integer map v -> primitive orthogonal projection of v onto span(basis)^perp."""
    if not basis:
        return _prim
    M = _projection_matrix(tuple(tuple(b) for b in basis), d)
    return lambda v: _prim([dot(row, v) for row in M])


@lru_cache(maxsize=4096)
def _projection_matrix(basis, d):
    k = len(basis)
    # W = G^{-1} B from one elimination of [G | B]
    aug = [[dot(a, b) for b in basis] + list(a) for a in basis]
    R, _ = rref(aug)
    W = [row[k:] for row in R[:k]]
    L = 1
    for row in W:
        for x in row:
            L = L * x.denominator // _gcd(L, x.denominator)
    Wi = [[int(x * L) for x in row] for row in W]
    return tuple(tuple((L if i == j else 0) - sum(basis[t][i] * Wi[t][j] for t in range(k))
                       for j in range(d)) for i in range(d))


def _project_out(v, basis):
    """Orthogonal projection of v onto the complement of span(basis)."""
    return _projector(basis, len(v))(v)


def double_description(ineqs, d):
    """Generators of {x in Q^d : a.x >= 0 for a in ineqs}.

    Returns (lineality basis, extreme rays modulo lineality); rays are
    primitive integer vectors orthogonal to the lineality space.
    """
    lin = [tuple(1 if i == j else 0 for j in range(d)) for i in range(d)]
    rays = []  # (vector, frozenset of tight inequality indices)
    for k, a in enumerate(ineqs):
        idx = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if idx is not None:
            l = lin.pop(idx)
            al = dot(a, l)
            if al < 0:
                l = tuple(-x for x in l)
                al = -al
            lin = [_prim(tuple(al * y - dot(a, l2) * x for x, y in zip(l, l2)))
                   for l2 in lin]
            new = []
            for r, Z in rays:
                ar = dot(a, r)
                r2 = _prim(tuple(al * y - ar * x for x, y in zip(l, r)))
                new.append((r2, Z | {k}))
            new.append((l, frozenset(range(k))))
            rays = new
            continue
        vals = [dot(a, r) for r, _ in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        new = [rays[i] for i in pos] + [(rays[i][0], rays[i][1] | {k}) for i in zero]
        need = d - len(lin) - 2
        for i in pos:
            Zi = rays[i][1]
            for j in neg:
                common = Zi & rays[j][1]
                if len(common) < need:
                    continue
                if any(common <= rays[t][1] for t in range(len(rays)) if t != i and t != j):
                    continue
                p, n = rays[i][0], rays[j][0]
                ap, an = vals[i], vals[j]
                w = _prim(tuple(ap * y - an * x for x, y in zip(p, n)))
                new.append((w, common | {k}))
        rays = new
    out = []
    seen = set()
    project = _projector(lin, d)
    for r, _ in rays:
        v = project(r)
        if any(v) and v not in seen:
            seen.add(v)
            out.append(v)
    return [tuple(l) for l in lin], out


class Cone:
    """A rational polyhedral cone with both descriptions.

    rays        extreme rays modulo the lineality space (primitive)
    lineality   basis of the lineality space
    facets      inward facet normals, primitive, inside lin(cone)
    equations   basis of lin(cone)^perp
    """

    __slots__ = ("ambient_dim", "rays", "lineality", "facets", "equations",
                 "_hash")

    def __init__(self, ambient_dim, rays, lineality, facets, equations):
        self.ambient_dim = ambient_dim
        self.rays = tuple(sorted(tuple(r) for r in rays))
        self.lineality = _saturate(lineality, ambient_dim)
        self.facets = tuple(sorted(tuple(f) for f in facets))
        self.equations = _saturate(equations, ambient_dim)
        self._hash = None

    @classmethod
    def from_generators(cls, generators, ambient_dim=None, lineality=()):
        gens = [tuple(int(x) for x in g) for g in generators if any(g)]
        lin_in = [tuple(int(x) for x in g) for g in lineality if any(g)]
        if ambient_dim is None:
            if not gens and not lin_in:
                raise ValueError("ambient dimension needed for the zero cone")
            ambient_dim = len((gens or lin_in)[0])
        d = ambient_dim
        if not gens and not lin_in:
            eqs = [tuple(1 if i == j else 0 for j in range(d)) for i in range(d)]
            return cls(d, [], [], [], eqs)
        dual_ineqs = gens + lin_in + [tuple(-x for x in g) for g in lin_in]
        eqs, facets = double_description(dual_ineqs, d)
        lin, rays = double_description(list(facets) + list(eqs) +
                                       [tuple(-x for x in e) for e in eqs], d)
        return cls(d, rays, lin, facets, eqs)

    @classmethod
    def from_inequalities(cls, ineqs, equations, ambient_dim):
        d = ambient_dim
        allin = [tuple(a) for a in ineqs] + [tuple(e) for e in equations] + \
            [tuple(-x for x in e) for e in equations]
        lin, rays = double_description(allin, d)
        span = [list(v) for v in list(rays) + list(lin)]
        if not span:
            eqs = [tuple(1 if i == j else 0 for j in range(d)) for i in range(d)]
        elif rank(span) == d:
            eqs = []
        else:
            eqs = orthogonal_complement(span, d)
        dim = d - len(eqs)
        # the facets are the input inequalities tight on a codimension-one set of rays
        facets = set()
        project = _projector(eqs, d)
        for a in ineqs:
            f = project(a)
            if not any(f) or f in facets:
                continue
            tight = [r for r in rays if dot(f, r) == 0]
            if len(tight) < len(rays) and span_rank(tight + list(lin)) == dim - 1:
                facets.add(f)
        return cls(d, rays, lin, facets, eqs)

    # -- queries --------------------------------------------------------------

    @property
    def dim(self):
        return self.ambient_dim - len(self.equations)

    @property
    def is_pointed(self):
        return not self.lineality

    def contains(self, v):
        return all(dot(e, v) == 0 for e in self.equations) and \
            all(dot(f, v) >= 0 for f in self.facets)

    def relative_interior_contains(self, v):
        return all(dot(e, v) == 0 for e in self.equations) and \
            all(dot(f, v) > 0 for f in self.facets)

    def interior_point(self):
        """An integer point of the relative interior."""
        p = [0] * self.ambient_dim
        for r in self.rays:
            p = [a + b for a, b in zip(p, r)]
        return tuple(p)

    def contains_cone(self, other):
        return all(self.contains(r) for r in other.rays) and \
            all(self.contains(l) and self.contains(tuple(-x for x in l))
                for l in other.lineality)

    def intersect(self, other):
        return intersect(self, other)

    def facet_ray_sets(self):
        """For a pointed cone: the set of rays on each facet."""
        return [frozenset(i for i, r in enumerate(self.rays) if dot(f, r) == 0)
                for f in self.facets]

    def faces(self):
        """All faces of a pointed cone as frozensets of ray indices."""
        full = frozenset(range(len(self.rays)))
        faces = {full}
        frontier = {full}
        fsets = self.facet_ray_sets()
        while frontier:
            nxt = set()
            for F in frontier:
                for S in fsets:
                    G = F & S
                    if G != F and G not in faces:
                        faces.add(G)
                        nxt.add(G)
            frontier = nxt
        return faces

    def __eq__(self, other):
        return isinstance(other, Cone) and self.ambient_dim == other.ambient_dim \
            and self.rays == other.rays and self.equations == other.equations \
            and self.lineality == other.lineality

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.rays, self.equations,
                               self.lineality))
        return self._hash

    def __repr__(self):
        s = f"Cone(rays={list(self.rays)}"
        if self.lineality:
            s += f", lineality={list(self.lineality)}"
        return s + ")"


def dual_description(generators, ambient_dim=None):
    return Cone.from_generators(generators, ambient_dim)


def intersect(c1, c2):
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return Cone.from_inequalities(c1.facets + c2.facets,
                                  c1.equations + c2.equations, c1.ambient_dim)


def relative_interior_contains(cone, v):
    return cone.relative_interior_contains(v)


def is_face_of(small, big):
    """Is `small` a face of `big`? Both pointed."""
    if not big.contains_cone(small):
        return False
    if small.dim == big.dim:
        return small == big
    p = small.interior_point()
    tight = [f for f in big.facets if dot(f, p) == 0]
    face_rays = [r for r in big.rays if all(dot(f, r) == 0 for f in tight)]
    return set(face_rays) == set(small.rays)


class Fan:
    """A fan (or quasifan) given by its maximal cones."""

    def __init__(self, maximal_cones, ambient_dim=None):
        cones = list(maximal_cones)
        if ambient_dim is None:
            ambient_dim = cones[0].ambient_dim
        self.ambient_dim = ambient_dim
        self.maximal_cones = cones

    @property
    def is_pointed(self):
        return all(c.is_pointed for c in self.maximal_cones)

    def rays(self):
        out = set()
        for c in self.maximal_cones:
            out.update(c.rays)
        return sorted(out)

    def support_contains(self, v):
        return any(c.contains(v) for c in self.maximal_cones)

    def __len__(self):
        return len(self.maximal_cones)


def remove_nonmaximal(cones):
    """Drop zero cones, duplicates and cones contained in another one."""
    uniq = []
    for c in cones:
        if c.dim == 0 and not c.lineality:
            continue
        if c not in uniq:
            uniq.append(c)
    uniq.sort(key=lambda c: -c.dim)
    kept = []
    for c in uniq:
        if not any(k.dim > c.dim and k.contains_cone(c) for k in kept):
            kept.append(c)
    return kept


def refine_fan(F, G):
    """The common refinement {s & t : s in F, t in G}, maximal cones only."""
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("ambient dimensions differ")
    pieces = [intersect(s, t) for s in F.maximal_cones for t in G.maximal_cones]
    return Fan(remove_nonmaximal(pieces), F.ambient_dim)


def covered_by(sigma, cones, pieces=None):
    """Is the pointed cone `sigma` contained in the union of `cones`?

    The cones are assumed to form a fan. Pieces sigma & tau of full
    dimension must have every facet either on the boundary of sigma or
    shared with another full-dimensional piece. Precomputed pieces may
    be passed in.
    """
    if sigma.dim == 0:
        return True
    if pieces is None:
        pieces = [intersect(sigma, t) for t in cones]
    full = [p for p in pieces if p.dim == sigma.dim]
    if not full:
        return False
    if any(p == sigma for p in full):
        return True
    facet_keys = []
    for p in full:
        keys = []
        for f in p.facets:
            rays = frozenset(r for r in p.rays if dot(f, r) == 0)
            keys.append(rays)
        facet_keys.append(keys)
    for idx, p in enumerate(full):
        for rays in facet_keys[idx]:
            on_boundary = any(all(dot(g, r) == 0 for r in rays) for g in sigma.facets)
            if on_boundary:
                continue
            shared = any(rays in facet_keys[j] for j in range(len(full)) if j != idx)
            if not shared:
                return False
    return True


def meets_coordinate_subspace(sigma, first):
    """Does the relative interior of `sigma` meet {x : x_0 = .. = x_{first-1} = 0}?

    Exact feasibility: lambda >= 1 on the extreme rays with the leading
    coordinates of sum(lambda_i v_i) equal to zero.
    """
    if not sigma.is_pointed:
        raise ValueError("pointed cone expected")
    if not sigma.rays:
        return True
    cols = [tuple(r[:first]) for r in sigma.rays]
    target = tuple(-sum(c[i] for c in cols) for i in range(first))
    if not any(target):
        return True
    gens = [c for c in cols if any(c)]
    if not gens:
        return False
    return Cone.from_generators(gens, first).contains(target)


class TruncatedCell:
    """cone & {x : <u, x> >= -1}."""

    def __init__(self, cone, u):
        self.cone = cone
        self.u = tuple(Fraction(x) for x in u)

    @property
    def bounded(self):
        return self.cone.is_pointed and all(dot(self.u, r) < 0 for r in self.cone.rays)

    def unbounded_rays(self):
        out = [r for r in self.cone.rays if dot(self.u, r) >= 0]
        return out + list(self.cone.lineality)

    def vertices(self):
        if not self.bounded:
            raise ValueError("not log-terminal cell: unbounded")
        return [tuple(Fraction(x) / -dot(self.u, r) for x in r) for r in self.cone.rays]

    def contains(self, v):
        return self.cone.contains(v) and dot(self.u, v) >= -1

    def on_outer_boundary(self, v):
        return dot(self.u, v) == -1


def lattice_points(cell):
    """All integer points of a bounded truncated cell."""
    if not cell.bounded:
        raise ValueError("not log-terminal cell: unbounded")
    d = cell.cone.ambient_dim
    verts = cell.vertices()
    lo = [min([0] + [v[i] for v in verts]) for i in range(d)]
    hi = [max([0] + [v[i] for v in verts]) for i in range(d)]
    ranges = [range(ceil(a), floor(b) + 1) for a, b in zip(lo, hi)]
    eqs = cell.cone.equations
    out = []
    for p in itertools.product(*ranges):
        if any(dot(e, p) for e in eqs):
            continue
        if cell.contains(p):
            out.append(p)
    return out


def span_rank(vectors):
    return rank([list(v) for v in vectors]) if vectors else 0


def lin_complement(vectors, d):
    return orthogonal_complement([list(v) for v in vectors], d)
