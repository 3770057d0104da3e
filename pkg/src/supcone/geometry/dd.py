"""Double description: generators of homogeneous inequality cones.

cone_rays computes a generating set for {x in R^dim : <row, x> <= 0 for all
rows}. The cone is embedded through x = u - v into the nonnegative orthant of
R^(2*dim), which keeps every intermediate cone pointed; the textbook
combinatorial adjacency test is only valid for pointed cones, and this
sidesteps separate lineality bookkeeping. Constraints are inserted in
lexicographic order of their primitive forms and the output is sorted, so the
conversion is deterministic. Intermediate generator counts are capped.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import SizingError
from .vec import Vec, dot, is_zero_vec, primitive, unit_vec

DEFAULT_ROW_CAP = 10**6


def cone_rays(rows: Sequence[Vec], dim: int, cap: int = DEFAULT_ROW_CAP) -> list[Vec]:
    """Generators (primitive, lex-sorted) of the cone {x : <row, x> <= 0}."""
    clean = sorted({primitive(tuple(r)) for r in rows if not is_zero_vec(tuple(r))})
    emb = 2 * dim
    # <a, u - v> <= 0 lifts to <(a, -a), (u, v)> <= 0.
    lifted = [r + tuple(-x for x in r) for r in clean]

    def zero_set(ray: Vec, upto: int) -> frozenset[int]:
        tight = {i for i in range(emb) if ray[i] == 0}
        for j in range(upto):
            if dot(lifted[j], ray) == 0:
                tight.add(emb + j)
        return frozenset(tight)

    current: list[tuple[Vec, frozenset[int]]] = []
    for k in range(emb):
        r = unit_vec(emb, k)
        current.append((r, zero_set(r, 0)))

    for j, a in enumerate(lifted):
        zero: list[tuple[Vec, frozenset[int]]] = []
        neg: list[tuple[Vec, frozenset[int]]] = []
        pos: list[tuple[Vec, frozenset[int], Fraction]] = []
        for ray, zs in current:
            d = dot(a, ray)
            if d == 0:
                zero.append((ray, zs | {emb + j}))
            elif d < 0:
                neg.append((ray, zs))
            else:
                pos.append((ray, zs, d))
        fresh: list[Vec] = []
        for rp, zp, dp in pos:
            for rn, zn in neg:
                dn = dot(a, rn)
                common = zp & zn
                adjacent = True
                for r3, z3 in current:
                    if r3 is rp or r3 is rn:
                        continue
                    if common <= z3:
                        adjacent = False
                        break
                if adjacent:
                    comb = primitive(tuple(dp * xn - dn * xp for xp, xn in zip(rp, rn)))
                    fresh.append(comb)
        seen = {ray for ray, _ in zero} | {ray for ray, _ in neg}
        nxt = zero + neg
        for ray in fresh:
            if ray not in seen:
                seen.add(ray)
                nxt.append((ray, zero_set(ray, j + 1)))
        if len(nxt) > cap:
            raise SizingError(
                f"double description exceeded {cap} intermediate generators "
                f"after inserting {j + 1} of {len(lifted)} constraints"
            )
        current = nxt

    out = set()
    for ray, _ in current:
        x = tuple(ray[i] - ray[dim + i] for i in range(dim))
        if not is_zero_vec(x):
            out.add(primitive(x))
    return sorted(out)
