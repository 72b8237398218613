"""Explicit varieties X(A, P, Sigma): faces of the orthant, local
criteria, divisor class cones and the GIT fan of an ample class.

Faces gamma_0 of the positive orthant are handled as bitmasks over the
flattened variables; bit j set means e_j lies in gamma_0 (the variable
is allowed to be nonzero).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .arrangement import is_flat
from .exactmath import rank, rational_kernel, solve_linear
from .polyhedra import Cone

MAX_VARS = 22


def bits(mask):
    out, j = [], 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def to_mask(indices):
    m = 0
    for j in indices:
        m |= 1 << j
    return m


def _submasks(positions):
    """All masks with bits only at the given positions."""
    k = len(positions)
    idx = np.arange(1 << k, dtype=np.int64)
    out = np.zeros(1 << k, dtype=np.int64)
    for i, p in enumerate(positions):
        out |= ((idx >> i) & 1) << p
    return out


@dataclass(frozen=True)
class FaceRecord:
    gamma0: frozenset
    alive: frozenset        # monomials with all variables in gamma0
    gradient: frozenset     # monomials with one exponent-one variable off gamma0
    xbar_face: bool
    x_face: bool


@dataclass(frozen=True)
class SmoothnessReport:
    status: str             # "smooth", "quasismooth", "singular"
    witness: frozenset = None
    reason: str = ""


@dataclass(frozen=True)
class DivisorClassCones:
    eff: Cone
    mov: Cone
    sample: Cone
    tau_plus: Cone = None
    tau_minus: Cone = None

    @property
    def ample_nonempty(self):
        return self.sample.dim == self.sample.ambient_dim

    def is_ample(self, w):
        return self.ample_nonempty and self.sample.relative_interior_contains(w)


class _FaceCore:
    """Orthant faces of a graded ring, before any fan is chosen."""

    def __init__(self, ring):
        self.ring = ring
        self.N = ring.num_vars
        if self.N > MAX_VARS:
            raise ValueError(f"too many variables ({self.N})")
        G = ring.grading
        self.rho = G.rank
        self.weights = [G.free_part(G.degree(j)) for j in range(self.N)]

    @cached_property
    def block_masks(self):
        e = self.ring.exponents
        return [to_mask(e.block_vars(i)) for i in range(len(e.l))]

    @cached_property
    def exponent_one_mask(self):
        e = self.ring.exponents
        return to_mask(j for j in range(e.n_total) if e.exponent(j) == 1)

    @cached_property
    def _flat_lookup(self):
        arr = self.ring.arrangement
        nb = len(self.block_masks)
        table = np.zeros(1 << nb, dtype=bool)
        for z in range(1 << nb):
            table[z] = is_flat(arr, bits(z))
        return table

    @cached_property
    def all_masks(self):
        return np.arange(1 << self.N, dtype=np.int64)

    @cached_property
    def xbar_array(self):
        masks = self.all_masks
        dead = np.zeros_like(masks)
        for i, bm in enumerate(self.block_masks):
            dead |= ((masks & bm) != bm).astype(np.int64) << i
        return self._flat_lookup[dead]

    def dead_blocks(self, mask):
        z = 0
        for i, bm in enumerate(self.block_masks):
            if mask & bm != bm:
                z |= 1 << i
        return z

    def gradient_blocks(self, mask):
        g = 0
        for i, bm in enumerate(self.block_masks):
            off = bm & ~mask
            if off and off & (off - 1) == 0 and off & self.exponent_one_mask:
                g |= 1 << i
        return g


class VarietyData(_FaceCore):
    """X(A, P, Sigma) for a ring with d rows and a fan.

    The fan is given either by maximal cones (iterables of variable
    indices) or by an ample class in the free part of K.
    """

    def __init__(self, ring, maximal_cones=None, ample=None, allow_wall=False):
        super().__init__(ring)
        self.columns = ring.columns
        self.ample = None
        if maximal_cones is None:
            if ample is None:
                raise ValueError("need a fan or an ample class")
            self.ample = tuple(Fraction(x) for x in ample)
            maximal_cones = fan_from_ample(ring, self.ample, _core=self,
                                           allow_wall=allow_wall)
        self.maximal_cones = tuple(sorted((frozenset(c) for c in maximal_cones),
                                          key=lambda c: (-len(c), sorted(c))))
        self._cone_cache = {}
        # GIT fans are fans by construction; only their rays need checking
        self._check_fan(pairwise=self.ample is None)
        self._cache = {}

    # -- basic data -----------------------------------------------------------

    @property
    def dim(self):
        return self.ring.s + self.ring.c

    @property
    def picard_rank(self):
        return self.rho

    @property
    def ambient_dim(self):
        return len(self.ring.P)

    def cone_of(self, indices):
        key = frozenset(indices)
        cone = self._cone_cache.get(key)
        if cone is None:
            cone = Cone.from_generators([self.columns[j] for j in sorted(key)],
                                        self.ambient_dim)
            self._cone_cache[key] = cone
        return cone

    def _check_fan(self, pairwise=True):
        covered = set()
        cones = []
        for c in self.maximal_cones:
            cone = self.cone_of(c)
            want = sorted(tuple(self.columns[j]) for j in c)
            if list(cone.rays) != want or not cone.is_pointed:
                raise ValueError(f"cone {sorted(c)}: listed columns are not its rays")
            cones.append(cone)
            covered |= c
        if covered != set(range(self.N)):
            missing = sorted(set(range(self.N)) - covered)
            raise ValueError(f"columns {missing} are not rays of the fan")
        for a in range(len(cones) if pairwise else 0):
            for b in range(a + 1, len(cones)):
                common = self.maximal_cones[a] & self.maximal_cones[b]
                meet = cones[a].intersect(cones[b])
                if meet != self.cone_of(common):
                    raise ValueError("maximal cones "
                                     f"{sorted(self.maximal_cones[a])} and "
                                     f"{sorted(self.maximal_cones[b])} do not meet in a face")
        self._maximal_cone_objects = cones

    @cached_property
    def cone_mask_array(self):
        """Sorted masks (over variables) of all cones of Sigma."""
        parts = [np.zeros(1, dtype=np.int64)]
        for c, cone in zip(self.maximal_cones, self._maximal_cone_objects):
            if len(cone.rays) == cone.dim:
                parts.append(_submasks(sorted(c)))
                continue
            ray_var = {tuple(self.columns[j]): j for j in c}
            order = [ray_var[r] for r in cone.rays]
            parts.append(np.array([to_mask(order[k] for k in F) for F in cone.faces()],
                                  dtype=np.int64))
        return np.unique(np.concatenate(parts))

    @cached_property
    def cone_masks(self):
        return set(int(m) for m in self.cone_mask_array)

    def cones(self):
        return sorted((frozenset(bits(m)) for m in self.cone_masks),
                      key=lambda c: (len(c), sorted(c)))

    # -- faces ----------------------------------------------------------------

    @cached_property
    def x_array(self):
        full = (1 << self.N) - 1
        comp = full ^ self.all_masks
        return self.xbar_array & np.isin(comp, self.cone_mask_array)

    @cached_property
    def minimal_x_faces(self):
        """X-faces having no X-face among their facets gamma_0 - e_j."""
        return _locally_minimal(self.x_array, self.all_masks, self.N)

    def face_record(self, gamma0):
        mask = to_mask(gamma0)
        return FaceRecord(frozenset(bits(mask)),
                          frozenset(bits(~self.dead_blocks(mask) & ((1 << len(self.block_masks)) - 1))),
                          frozenset(bits(self.gradient_blocks(mask))),
                          bool(self.xbar_array[mask]), bool(self.x_array[mask]))

    def projected_cone(self, gamma0):
        """P(gamma_0^*): the cone over the columns not in gamma_0."""
        return self.cone_of(set(range(self.N)) - set(gamma0))

    def weight_cone(self, gamma0):
        gens = [self.weights[j] for j in gamma0]
        return Cone.from_generators(gens, self.rho)

    # -- local criteria on masks ---------------------------------------------

    def _stratum_smooth_mask(self, mask):
        cols = ~self.dead_blocks(mask) | self.gradient_blocks(mask)
        cols &= (1 << len(self.block_masks)) - 1
        key = ("strat", cols)
        if key not in self._cache:
            rel = self.ring.relations
            if not rel:
                self._cache[key] = True
            else:
                sub = [[v[i] for i in bits(cols)] for v in rel]
                self._cache[key] = bool(cols) and rank(sub) == len(rel)
        return self._cache[key]

    def _factoriality_mask(self, mask):
        key = ("fact", mask)
        if key not in self._cache:
            idx = bits(mask)
            if self.ring.grading.generates(idx):
                res = "factorial"
            elif self.rho == 0 or rank([list(self.weights[j]) for j in idx] or [[0] * self.rho]) == self.rho:
                res = "Q-factorial"
            else:
                res = "neither"
            self._cache[key] = res
        return self._cache[key]


def _locally_minimal(flags, masks, N):
    has_sub = np.zeros_like(flags)
    for j in range(N):
        bit = 1 << j
        with_bit = (masks & bit) != 0
        has_sub |= with_bit & flags[masks & ~bit]
    return [int(m) for m in masks[flags & ~has_sub]]


# -- public operations ---------------------------------------------------------

def xbar_face_test(v, gamma0):
    """Does the orbit of the complementary face meet X-bar?

    The vanishing monomials must form a flat of the column matroid of A
    (of any rank; the full set is realized by the origin of C^{c+1}).
    """
    return bool(v.xbar_array[to_mask(gamma0)])


def xbar_face_by_solving(ring, gamma0):
    """Independent check: solve for x with <a_i, x> = 0 exactly on the
    dead monomials, by exact elimination."""
    e = ring.exponents
    dead = [i for i in range(len(e.l)) if not set(e.block_vars(i)) <= set(gamma0)]
    alive = [i for i in range(len(e.l)) if i not in dead]
    cols = ring.arrangement.columns
    dim = len(cols[0])
    eqs = [list(cols[i]) for i in dead]
    sol = solve_linear(eqs, [0] * len(eqs), dim) if eqs else None
    basis = list(sol.kernel) if eqs else [tuple(1 if a == b else 0 for b in range(dim))
                                           for a in range(dim)]
    # a generic combination of the solution space avoids every alive hyperplane
    # iff no alive a_i vanishes on all of it
    for i in alive:
        if all(sum(a * b for a, b in zip(cols[i], x)) == 0 for x in basis):
            return False
    return True


def x_faces(v):
    """All X-faces, with their monomial data."""
    out = []
    for mask in np.nonzero(v.x_array)[0]:
        out.append(v.face_record(bits(int(mask))))
    return out


def stratum_smooth(v, face):
    """Is the X-bar stratum of the face smooth?

    Each monomial i contributes a nonzero gradient exactly when i is
    alive or has a single exponent-one variable off the face; gradients
    of different monomials have disjoint support, so the Jacobian rank is
    the rank of the relation matrix on those columns.
    """
    gamma0 = face.gamma0 if isinstance(face, FaceRecord) else face
    return v._stratum_smooth_mask(to_mask(gamma0))


def point_factoriality(v, face):
    gamma0 = face.gamma0 if isinstance(face, FaceRecord) else face
    return v._factoriality_mask(to_mask(gamma0))


def smoothness_report(v):
    """smooth / quasismooth / singular with a witness X-face.

    Both local criteria only improve when the face grows, so it suffices
    to test the X-faces minimal with respect to dropping one variable.
    """
    faces = v.minimal_x_faces
    for mask in faces:
        if not v._stratum_smooth_mask(mask):
            return SmoothnessReport("singular", frozenset(bits(mask)),
                                    "singular X-bar stratum")
    for mask in faces:
        f = v._factoriality_mask(mask)
        if f != "factorial":
            return SmoothnessReport("quasismooth", frozenset(bits(mask)),
                                    f"point is {f} only" if f != "neither"
                                    else "point is not Q-factorial")
    return SmoothnessReport("smooth")


def _det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def divisor_class_cones(v):
    rho = v.rho
    W = v.weights
    eff = Cone.from_generators(W, rho)
    mov = eff
    seen = set()
    for j in range(v.N):
        key = frozenset(W[k] for k in range(v.N) if k != j)
        if key in seen:
            continue
        seen.add(key)
        mov = mov.intersect(Cone.from_generators(list(key), rho))
    sample = eff
    seen = set()
    for mask in v.minimal_x_faces:
        key = frozenset(W[k] for k in bits(mask))
        if key in seen:
            continue
        seen.add(key)
        sample = sample.intersect(Cone.from_generators(list(key), rho))
    tp = tm = None
    if rho == 2 and len(eff.rays) == 2 and len(sample.rays) == 2:
        eR, eL = _order_pair(eff.rays)
        sR, sL = _order_pair(sample.rays)
        tp = Cone.from_generators([sL, eL], 2)
        tm = Cone.from_generators([eR, sR], 2)
    return DivisorClassCones(eff, mov, sample, tp, tm)


def _order_pair(rays):
    """(clockwise ray, counterclockwise ray) of a 2-dim pointed cone."""
    a, b = rays
    return (a, b) if _det2(a, b) > 0 else (b, a)


def relation_lift(ring):
    """Sum of exponent vectors of one monomial per relation."""
    out = [0] * ring.num_vars
    for v in ring.relations:
        i = next(k for k, x in enumerate(v) if x)
        out = [a + b for a, b in zip(out, ring.monomial(i))]
    return out


def anticanonical_lift(ring):
    """An integer vector in Z^{n+m} mapping to -K_X under Q."""
    lift = relation_lift(ring)
    return [1 - x for x in lift]


def anticanonical_class(v_or_ring):
    """(-K_X as an element of K, its free part as Fractions)."""
    ring = getattr(v_or_ring, "ring", v_or_ring)
    G = ring.grading
    k = G.element(anticanonical_lift(ring))
    return k, tuple(Fraction(x) for x in G.free_part(k))


def rational_anticanonical(ring):
    """(Qtilde, -w_X) from a rational kernel basis of P.

    -w_X = sum of all columns of Qtilde minus (r - c) times the degree
    of T_0^{l_0}.
    """
    Qt = rational_kernel(ring.P, ring.num_vars) if ring.P else \
        [tuple(1 if i == j else 0 for j in range(ring.num_vars)) for i in range(ring.num_vars)]
    nrel = len(ring.relations)
    mono = ring.monomial(0)
    w = [sum(row) - nrel * sum(a * b for a, b in zip(row, mono)) for row in Qt]
    return [list(r) for r in Qt], tuple(Fraction(x) for x in w)


def is_fano(v):
    """Is -K_X ample? Ample classes are those in the relative interior of
    Q(gamma0) for every X-face; on non-Q-factorial X this set spans less
    than all of K_Q."""
    if is_ample(v, anticanonical_class(v)[1]):
        return True
    if divisor_class_cones(v).sample.dim == 0:
        raise ValueError("not projective over the chosen data")
    return False


def gorenstein_index(v):
    """Cartier index of -K_X, checked at every minimal X-face.

    At points of X(gamma_0) a class is Cartier iff it lies in the
    subgroup generated by Q(e_j), e_j in gamma_0. Returns (index, bad
    faces); the index is None when some chart is not Q-Cartier.
    """
    from math import lcm
    lift = anticanonical_lift(v.ring)
    G = v.ring.grading
    idx, bad = 1, []
    for mask in v.minimal_x_faces:
        o = G.order_modulo(lift, bits(mask))
        if o is None:
            bad.append(frozenset(bits(mask)))
        else:
            idx = lcm(idx, o)
    return (None if bad else idx), bad


# -- GIT fan from an ample class ------------------------------------------------

def _interior_flags(core, u, masks, xbar, relative=False):
    """(u in Q(gamma0)^o, u in Q(gamma0) but not in Q(gamma0)^o) per mask.

    With relative=False the interior is taken in K_Q, so lower-dimensional
    cones through u count as boundary; with relative=True it is the
    relative interior.
    """
    W = core.weights
    rho = core.rho
    if rho == 1:
        if u[0] <= 0:
            raise ValueError("class is not in the interior of the moving cone")
        pos = to_mask(j for j in range(core.N) if W[j][0] > 0)
        inside = (masks & pos) != 0
        return inside, np.zeros_like(inside)
    if rho == 2:
        left = right = ray = 0
        for j, w in enumerate(W):
            d = _det2(u, w)
            if d > 0:
                left |= 1 << j
            elif d < 0:
                right |= 1 << j
            elif u[0] * w[0] + u[1] * w[1] > 0:
                ray |= 1 << j
        has_l = (masks & left) != 0
        has_r = (masks & right) != 0
        on_ray = (masks & ray) != 0
        inside = has_l & has_r
        boundary = ~inside & on_ray
        if relative:
            only_ray = on_ray & ~has_l & ~has_r
            inside = inside | only_ray
            boundary = boundary & ~only_ray
        return inside, boundary
    inside = np.zeros(len(masks), dtype=bool)
    boundary = np.zeros(len(masks), dtype=bool)
    cache = {}
    for m in np.nonzero(xbar)[0]:
        key = frozenset(W[j] for j in bits(int(m)))
        if key not in cache:
            cone = Cone.from_generators(list(key), rho) if key else None
            if cone is None:
                cache[key] = (False, False)
            else:
                full = relative or cone.dim == rho
                rel = cone.relative_interior_contains(u)
                cache[key] = (full and rel, cone.contains(u) and not (full and rel))
        inside[m], boundary[m] = cache[key]
    return inside, boundary


def x_faces_for_ample(ring, u, _core=None, allow_wall=False):
    """Masks flags of X-faces for the GIT quotient of the class u.

    On a wall the quotient belongs to the lower-dimensional GIT cone of
    u; it is only built when allow_wall is set.
    """
    core = _core if _core is not None else _FaceCore(ring)
    masks = core.all_masks
    xbar = core.xbar_array
    u = tuple(Fraction(x) for x in u)
    if len(u) != core.rho:
        raise ValueError(f"ample class needs {core.rho} coordinates")
    inside, boundary = _interior_flags(core, u, masks, xbar, relative=allow_wall)
    if not allow_wall and np.any(xbar & boundary):
        raise ValueError("ambiguous chamber: class lies on a wall")
    return xbar & inside


def _check_pointed(core):
    W = core.weights
    if any(not any(w) for w in W):
        raise ValueError("grading is not pointed: a generator has degree zero")
    if core.rho and not Cone.from_generators(W, core.rho).is_pointed:
        raise ValueError("grading is not pointed: effective cone contains a line")


def fan_from_ample(ring, u, _core=None, allow_wall=False):
    """Maximal cones (variable index sets) of the fan on which u is ample."""
    core = _core if _core is not None else _FaceCore(ring)
    _check_pointed(core)
    flags = x_faces_for_ample(ring, u, core, allow_wall)
    if not flags.any():
        raise ValueError("class is not in the effective cone")
    cand = _locally_minimal(flags, core.all_masks, core.N)
    minimal = [m for m in cand if not any(o != m and o & m == o for o in cand)]
    full = (1 << core.N) - 1
    return [frozenset(bits(full ^ m)) for m in sorted(minimal)]


def is_ample(v, u):
    """u lies in the relative interior of Q(gamma0) for every X-face."""
    u = tuple(Fraction(x) for x in u)
    if v.rho == 1 and u[0] <= 0:
        return False
    inside, _ = _interior_flags(v, u, v.all_masks, v.x_array, relative=True)
    return bool(np.all(inside[v.x_array]))


# -- numeric oracle ---------------------------------------------------------------

def sample_stratum_point(ring, gamma0, rng):
    """A random complex point of X-bar with support exactly gamma0.

    Block monomial values t = A^T x with x random on the common zero set
    of the dead blocks; the last variable of each alive block takes a
    root of what its monomial still needs. Returns None when the face is
    not an X-bar face (some alive monomial vanishes identically).
    """
    e = ring.exponents
    gamma0 = set(gamma0)
    cols = np.array(ring.arrangement.columns, dtype=float)
    dead = [i for i in range(len(e.l)) if not set(e.block_vars(i)) <= gamma0]
    dim = cols.shape[1]
    if dead:
        _, sv, vt = np.linalg.svd(cols[dead])
        null = vt[int((sv > 1e-9).sum()):]
    else:
        null = np.eye(dim)
    if len(null) == 0:
        x = np.zeros(dim, dtype=complex)
    else:
        coef = rng.normal(size=len(null)) + 1j * rng.normal(size=len(null))
        x = coef @ null
    t = cols @ x
    point = np.zeros(e.num_vars, dtype=complex)
    for j in gamma0:
        point[j] = rng.normal() + 1j * rng.normal()
    for i in range(len(e.l)):
        if i in dead:
            continue
        if abs(t[i]) < 1e-9:
            return None
        vs = e.block_vars(i)
        *rest, last = vs
        partial = np.prod([point[j] ** e.exponent(j) for j in rest]) if rest else 1.0
        point[last] = (t[i] / partial) ** (1.0 / e.exponent(last))
    return point


def numeric_jacobian(ring, point):
    e = ring.exponents
    J = np.zeros((len(ring.relations), e.num_vars), dtype=complex)
    for k, rel in enumerate(ring.relations):
        for i, coef in enumerate(rel):
            if not coef:
                continue
            vs = e.block_vars(i)
            for j in vs:
                p = e.exponent(j)
                others = np.prod([point[q] ** e.exponent(q) for q in vs if q != j])
                J[k, j] = coef * p * point[j] ** (p - 1) * others
    return J


def numeric_stratum_smooth(ring, gamma0, samples=100, seed=0, tol=1e-7):
    """Full Jacobian rank at every sampled point of the stratum.

    Returns True, False, or None when no point could be sampled.
    """
    rng = np.random.default_rng(seed)
    nrel = len(ring.relations)
    seen = set()
    for _ in range(samples):
        pt = sample_stratum_point(ring, gamma0, rng)
        if pt is None:
            return None
        J = numeric_jacobian(ring, pt)
        if nrel == 0:
            seen.add(True)
            continue
        sv = np.linalg.svd(J, compute_uv=False)
        scale = max(1.0, float(np.abs(J).max()))
        seen.add(int((sv > tol * scale).sum()) == nrel)
    if len(seen) > 1:
        raise ValueError("Jacobian rank varies along the stratum")
    return seen.pop()
