"""Smooth Fano members of the product family over a small (k1, k2) grid.

Run with:  python demos/product_family.py
"""

from fractions import Fraction

from arrvar.classifier import admissible_a_vectors, product_family

for k1 in (5, 6):
    for k2 in (5, 6):
        for a in admissible_a_vectors(k2, 1):
            m = product_family(k1, k2, a)
            bound = Fraction(k1 - 2, k2 - 2)
            print(f"k=({k1},{k2}) a={list(a)}  dim {m.dim}  {m.smooth:<7} "
                  f"Fano={m.fano}  (a1 <= {bound})")
