"""Tropical quasifan of X, cone types, elementary cones and the rays of
the refinement Sigma ⊓ trop(X); push-down and shift of relations.
"""

from dataclasses import dataclass
from itertools import combinations, product
from math import prod

from .arrangement import is_connected_flat, matroid_components
from .exactmath import solve_linear, vector_gcd
from .polyhedra import Cone, Fan, covered_by, intersect, meets_coordinate_subspace, refine_fan
from .varietycore import bits


# -- quasifan -------------------------------------------------------------------

def _factor_flats(arr, cols):
    """Flats of the restriction of the matroid to `cols` (global indices)."""
    found = set()
    for k in range(len(cols) + 1):
        for S in combinations(cols, k):
            cl = arr.closure(S) & frozenset(cols)
            found.add(cl)
    return found


def _chains(arr, cols, flats):
    top = arr.rank_of(cols)
    proper = [F for F in flats if 0 < arr.rank_of(F) < top]
    by_rank = {}
    for F in proper:
        by_rank.setdefault(arr.rank_of(F), []).append(F)
    chains = [[F] for F in by_rank.get(1, [])]
    for k in range(2, top):
        chains = [ch + [F] for ch in chains for F in by_rank.get(k, []) if ch[-1] < F]
    return [tuple(ch) for ch in chains] if top > 1 else [()]


def _nested_sets(arr, cols, flats):
    """Maximal nested sets of proper connected flats (building set of all
    connected flats, the whole ground set included)."""
    top = arr.rank_of(cols)
    ground = frozenset(cols)
    connected = [F for F in flats if 0 < arr.rank_of(F) < top and is_connected_flat(arr, F)]
    building = set(connected) | {ground}

    def join(fs):
        return arr.closure(frozenset().union(*fs)) & ground

    out = []
    for S in combinations(sorted(connected, key=lambda F: (len(F), sorted(F))), top - 1):
        ok = True
        for k in range(2, len(S) + 1):
            for sub in combinations(S, k):
                if all(not (a <= b or b <= a) for a, b in combinations(sub, 2)) \
                        and join(sub) in building:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(S))
    return out if top > 1 else [()]


@dataclass
class TropicalData:
    """trop(X) = Delta x Q^s, Delta a fan in Q^r with rays e_S."""
    r: int
    s: int
    base_cones: list        # list of tuples of flats (frozensets of block indices)
    ray_of: dict            # flat -> vector in Z^r
    coarse: bool

    @property
    def ambient_dim(self):
        return self.r + self.s

    def base_rays(self):
        return sorted({self.ray_of[F] for ch in self.base_cones for F in ch})

    def cones(self):
        """Maximal cones of trop(X) as polyhedral cones in Q^{r+s}."""
        if getattr(self, "_cones", None) is None:
            d = self.r + self.s
            lin = [tuple(1 if k == self.r + i else 0 for k in range(d)) for i in range(self.s)]
            out = []
            for ch in self.base_cones:
                gens = [self.ray_of[F] + (0,) * self.s for F in ch]
                out.append(Cone.from_generators(gens, d, lineality=lin))
            self._cones = out
        return self._cones

    def fan(self):
        return Fan(self.cones(), self.ambient_dim)

    def contains(self, v):
        return any(c.contains(v) for c in self.cones())

    def lineality_subspace_contains(self, v):
        return not any(v[:self.r])


def trop_quasifan(arr, s, factors=None, coarsen=False):
    """Chain-of-flats structure (or the nested-set coarsening) of trop(X).

    `factors` lists the column groups of an arrangement product; each
    group gets its own coordinates and its own e_0.
    """
    ncols = arr.r + 1
    if factors is None:
        factors = [tuple(range(ncols))]
    r = ncols - len(factors)
    ray_of = {}
    per_factor = []
    row = 0
    for fac in factors:
        fac = tuple(fac)
        flats = _factor_flats(arr, fac)
        if coarsen:
            if len(matroid_components(len(fac), lambda I: arr.rank_of(fac[i] for i in I))) > 1:
                raise ValueError("coarse structure needs a connected arrangement")
            cones = _nested_sets(arr, fac, flats)
        else:
            cones = _chains(arr, fac, flats)
        unit = {}
        for k, i in enumerate(fac):
            e = [0] * r
            if k == 0:
                for t in range(len(fac) - 1):
                    e[row + t] = -1
            else:
                e[row + k - 1] = 1
            unit[i] = e
        for ch in cones:
            for F in ch:
                v = [0] * r
                for i in F:
                    v = [a + b for a, b in zip(v, unit[i])]
                g = vector_gcd(v)
                ray_of[F] = tuple(x // g for x in v) if g else tuple(v)
        per_factor.append(cones)
        row += len(fac) - 1
    base = [tuple(x for part in combo for x in part) for combo in product(*per_factor)]
    return TropicalData(r, s, base, ray_of, coarsen)


def _all_connected(ring):
    arr = ring.arrangement
    for fac in ring.factors:
        fac = tuple(fac)
        if len(matroid_components(len(fac), lambda I: arr.rank_of(fac[i] for i in I))) > 1:
            return False
    return True


def tropical_data(v, coarsen=None):
    """Quasifan structure on trop(X) for the variety `v`.

    With coarsen=None the nested-set structure is used whenever every
    factor arrangement is connected; otherwise chains of flats.
    """
    ring = v.ring
    if coarsen is None:
        coarsen = _all_connected(ring)
    key = ("trop", coarsen)
    if key not in v._cache:
        v._cache[key] = trop_quasifan(ring.arrangement, ring.s, ring.factors, coarsen)
    return v._cache[key]


# -- cone types -------------------------------------------------------------------

def _pieces(sigma, trop):
    return [intersect(sigma, t) for t in trop.cones()]


def classify_cone(sigma, trop, pieces=None):
    """'leaf', 'big' or 'special'.

    A cone that is both contained in trop(X) and big counts as leaf.
    """
    if pieces is None:
        pieces = _pieces(sigma, trop)
    if covered_by(sigma, trop.cones(), pieces):
        return "leaf"
    if meets_coordinate_subspace(sigma, trop.r):
        return "big"
    for p in pieces:
        if p.dim > 0 and sigma.relative_interior_contains(p.interior_point()):
            return "special"
    raise ValueError("not an X-cone: relative interior misses trop(X)")


def classify_cones(v, gammas=None, coarsen=None):
    """Type of each given cone of Sigma (default: the maximal cones)."""
    trop = tropical_data(v, coarsen)
    out = {}
    for g in (gammas if gammas is not None else v.maximal_cones):
        out[frozenset(g)] = classify_cone(v.cone_of(g), trop)
    return out


@dataclass(frozen=True)
class ElementaryCone:
    generators: frozenset   # variable indices of the cone
    kind: str               # 'special' or 'big'
    chosen: tuple           # ((block i, variable j_i), ...) over I
    weights: tuple          # ell_{sigma,i} aligned with `chosen`
    v_sigma: tuple
    c_sigma: int

    @property
    def blocks(self):
        return tuple(i for i, _ in self.chosen)

    @property
    def ray(self):
        return tuple(x // self.c_sigma for x in self.v_sigma)


def elementary_data(ring, gens):
    """(chosen, weights, v_sigma, c_sigma) from the formula, or None if
    the cone has two generators in one block or no T generator."""
    e = ring.exponents
    chosen = {}
    for j in sorted(gens):
        i = e.block_of(j)
        if i is None:
            continue
        if i in chosen:
            return None
        chosen[i] = j
    if not chosen:
        return None
    items = tuple(sorted(chosen.items()))
    ls = [e.exponent(j) for _, j in items]
    total = prod(ls)
    weights = tuple(total // l for l in ls)
    cols = ring.columns
    v = [0] * len(cols[0])
    for w, (_, j) in zip(weights, items):
        v = [a + w * b for a, b in zip(v, cols[j])]
    return items, weights, tuple(v), vector_gcd(v)


def elementary_cones(v, coarsen=None):
    """All elementary cones among the cones of Sigma."""
    trop = tropical_data(v, coarsen)
    key = ("elem", trop.coarse)
    if key in v._cache:
        return v._cache[key]
    out = []
    for mask in sorted(v.cone_masks):
        gens = frozenset(bits(mask))
        data = elementary_data(v.ring, gens)
        if data is None:
            continue
        sigma = v.cone_of(gens)
        pieces = _pieces(sigma, trop)
        if not any(p.dim > 0 and sigma.relative_interior_contains(p.interior_point())
                   for p in pieces):
            continue
        kind = classify_cone(sigma, trop, pieces)
        if kind == "leaf":
            continue
        if not any(sigma.relative_interior_contains(r) for p in pieces for r in p.rays):
            continue
        out.append(ElementaryCone(gens, kind, *data))
    v._cache[key] = out
    return out


def refinement_rays(v, coarsen=None):
    """Rays of Sigma ⊓ trop(X): the columns of P and the rays of the
    elementary cones."""
    rays = {tuple(c) for c in v.columns}
    rays |= {e.ray for e in elementary_cones(v, coarsen)}
    return sorted(rays)


def refined_fan(v, coarsen=None):
    """Sigma ⊓ trop(X) by direct intersection of maximal cones."""
    trop = tropical_data(v, coarsen)
    key = ("refined", trop.coarse)
    if key not in v._cache:
        sigma_fan = Fan(v._maximal_cone_objects, v.ambient_dim)
        v._cache[key] = refine_fan(sigma_fan, trop.fan())
    return v._cache[key]


# -- push-down and shift --------------------------------------------------------------

def pushdown(g, P):
    """Push-down of a homogeneous polynomial along the torus map given by P.

    g maps exponent tuples over the columns of P to coefficients. Returns
    a polynomial in len(P) variables without monomial factors; a single
    monomial pushes down to a constant.
    """
    terms = sorted(g.items())
    a0 = terms[0][0]
    Pt = [[P[i][j] for i in range(len(P))] for j in range(len(P[0]))]
    out = {}
    for a, c in terms:
        diff = [x - y for x, y in zip(a, a0)]
        sol = solve_linear(Pt, diff, len(P))
        if sol is None or any(x.denominator != 1 for x in sol.particular) or sol.kernel:
            raise ValueError("not shiftable: relation is not homogeneous for P")
        out[tuple(int(x) for x in sol.particular)] = c
    return _strip(out)


def _strip(poly):
    lo = [min(col) for col in zip(*poly)]
    return {tuple(x - m for x, m in zip(k, lo)): c for k, c in poly.items()}


def shift(h, P_new):
    """Pull back a push-down along P_new and strip monomial factors."""
    out = {}
    for u, c in h.items():
        a = tuple(sum(P_new[i][j] * u[i] for i in range(len(P_new)))
                  for j in range(len(P_new[0])))
        out[a] = out.get(a, 0) + c
    return _strip({k: c for k, c in out.items() if c})


def pushdown_shift(g, P, P_new):
    return shift(pushdown(g, P), P_new)
