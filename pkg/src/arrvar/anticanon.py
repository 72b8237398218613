"""Discrepancies along the rays of Sigma ⊓ trop(X), the anticanonical
complex and the resulting singularity verdict."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, prod

from .exactmath import dot, solve_linear
from .polyhedra import TruncatedCell, lattice_points
from .tropical import elementary_cones, refined_fan, refinement_rays
from .varietycore import anticanonical_lift


@dataclass(frozen=True)
class RayDiscrepancy:
    ray: tuple
    source: object          # "original" or the ElementaryCone it comes from
    ell: int | None
    c: int
    discrepancy: Fraction

    @property
    def bounded(self):
        return self.discrepancy > -1

    @property
    def vertex(self):
        """Point where the ray leaves the complex, None when unbounded."""
        if not self.bounded:
            return None
        t = self.discrepancy + 1
        return tuple(Fraction(x) / t for x in self.ray)


@dataclass
class ACComplex:
    rays: dict              # ray -> RayDiscrepancy
    cells: list             # TruncatedCell per maximal cone of the refined fan
    fan: object

    @property
    def bounded(self):
        return all(c.bounded for c in self.cells)

    def vertices(self):
        return sorted({d.vertex for d in self.rays.values() if d.bounded})

    def unbounded_rays(self):
        return sorted(r for r, d in self.rays.items() if not d.bounded)


@dataclass
class SingularityVerdict:
    kind: str               # terminal, canonical, log-terminal, not-log-terminal
    witnesses: list = field(default_factory=list)

    @property
    def is_canonical(self):
        return self.kind in ("terminal", "canonical")

    def __str__(self):
        if self.kind == "canonical":
            return "canonical (not terminal)"
        if self.kind == "log-terminal":
            return "log-terminal (not canonical)"
        return self.kind


def vanishing_relations(ring, blocks):
    """Number of relations vanishing on V(T_{i j_i}; i in blocks).

    This is the dimension of the space of relations supported in
    `blocks`, so it does not depend on the chosen relation basis.
    """
    blocks = tuple(blocks)
    return len(blocks) - ring.arrangement.rank_of(blocks)


def ell_sigma(v, sigma):
    """(ell_sigma, k) for an elementary cone."""
    ring = getattr(v, "ring", v)
    k = vanishing_relations(ring, sigma.blocks)
    e = ring.exponents
    total = prod(e.exponent(j) for _, j in sigma.chosen)
    return sum(sigma.weights) - k * total, k


def ray_discrepancies(v, coarsen=None):
    """Discrepancy data for every ray of the refined fan."""
    out = {}
    for col in v.columns:
        out[tuple(col)] = RayDiscrepancy(tuple(col), "original", None, 1, Fraction(0))
    for e in elementary_cones(v, coarsen):
        ell, _ = ell_sigma(v, e)
        d = RayDiscrepancy(e.ray, e, ell, e.c_sigma, Fraction(ell, e.c_sigma) - 1)
        old = out.get(e.ray)
        if old is not None and old.discrepancy != d.discrepancy:
            raise ValueError(f"conflicting discrepancies on ray {e.ray}")
        out.setdefault(e.ray, d)
    return out


def _solve_chart(rays, disc, d):
    rows = [list(r) for r in rays]
    rhs = [-(disc[r].discrepancy + 1) for r in rays]
    sol = solve_linear(rows, rhs, d)
    if sol is None:
        return None
    return sol.particular


def anticanonical_complex(v, coarsen=None):
    key = ("acomplex", coarsen)
    if key in v._cache:
        return v._cache[key]
    disc = ray_discrepancies(v, coarsen)
    fan = refined_fan(v, coarsen)
    expected = set(refinement_rays(v, coarsen))
    if set(fan.rays()) != expected:
        raise ValueError("refined fan has rays outside the elementary cones; "
                         "the arrangement is probably not connected")
    d = v.ambient_dim
    cells = []
    for cone in fan.maximal_cones:
        u = _solve_chart(cone.rays, disc, d)
        if u is None:
            raise ValueError(f"not Q-Gorenstein on chart {list(cone.rays)}")
        cells.append(TruncatedCell(cone, u))
    out = ACComplex(disc, cells, fan)
    v._cache[key] = out
    return out


def singularity_type(v, coarsen=None):
    ac = anticanonical_complex(v, coarsen)
    if not ac.bounded:
        return SingularityVerdict("not-log-terminal", ac.unbounded_rays())
    originals = {tuple(c) for c in v.columns}
    inner, extra = set(), set()
    for cell in ac.cells:
        for p in lattice_points(cell):
            if not any(p):
                continue
            if not cell.on_outer_boundary(p):
                inner.add(p)
            if p not in originals:
                extra.add(p)
    if inner:
        return SingularityVerdict("log-terminal", sorted(inner))
    if extra:
        return SingularityVerdict("canonical", sorted(extra))
    return SingularityVerdict("terminal")


@dataclass
class GorensteinReport:
    charts: dict            # maximal cone -> Cartier index of -K_X there (None: not Q-Cartier)
    index: int | None

    @property
    def q_gorenstein(self):
        return self.index is not None


def gorenstein_check(v):
    """Cartier index of -K_X on the chart of every maximal cone of Sigma."""
    G = v.ring.grading
    lift = anticanonical_lift(v.ring)
    charts, idx = {}, 1
    for gens in v.maximal_cones:
        face = [j for j in range(v.N) if j not in gens]
        k = G.order_modulo(lift, face)
        charts[gens] = k
        idx = None if (k is None or idx is None) else lcm(idx, k)
    return GorensteinReport(charts, idx)


def check_vertex_consistency(ac):
    """Every bounded ray vertex lies on the outer boundary of its cells."""
    bad = []
    for cell in ac.cells:
        for r in cell.cone.rays:
            vert = ac.rays[r].vertex
            if vert is not None and dot(cell.u, vert) != -1:
                bad.append((r, cell.u))
    return bad
