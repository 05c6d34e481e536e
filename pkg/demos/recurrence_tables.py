"""
Integer recurrence tables
=========================

The Taylor coefficients of sigma and of the thetas come from two-index
recurrences whose entries stay integers. They are built with exact Python
integers and printed here as small triangles.
"""

from ellipticore.recur import build_table, sigma_coefficient_A, sigma_coefficient_C, sigma_series_g

A = build_table("A", 5)
print("A[m, n], rows by m + n")
for total in range(6):
    print("  ", [A[m, total - m] for m in range(total + 1)])

# sigma = sum C_k x^(2k+1)/(2k+1)!, from the A table and from a derivation
print()
for k in range(5):
    print(f"C_{k}: {sigma_coefficient_A(k)!s:24s} {sigma_coefficient_C(k)}")

# big integers appear fast
G = build_table("G", 20)
print()
print("G[10, 10] =", G[10, 10])

# the series at a point with g2 = 1, g3 = 0 against a few orders
for order in (4, 8, 16):
    print(f"sigma(0.5; 1, 0), order {order:2d}: {sigma_series_g(0.5, 1, 0, order).real:.16f}")
