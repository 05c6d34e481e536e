"""
Two routes to the same theta value
==================================

The q-series sums the defining exponential series directly. The series route
builds Taylor coefficients in x from exact integer recurrences and plugs in
theta constants. Away from the series' radius they agree to rounding.
"""

from ellipticore.reduced import evaluate

tau = 0.3 + 1.2j
x = 0.25 + 0.1j

# both routes for the four thetas and the four sigmas
for name in ("theta1", "theta2", "theta3", "theta4", "sigma", "sigma1", "sigma2", "sigma3"):
    q = evaluate(name, x, tau).value
    s = evaluate(name, x, tau, method="series", order=18)
    print(f"{name:7s} {q:.15f}  rel diff {abs(s.value - q) / abs(q):.1e}  ({s.terms_used} terms)")

# truncating the series earlier shows where the error comes from
print()
for order in (4, 8, 12, 16):
    s = evaluate("sigma", x, tau, method="series", order=order).value
    q = evaluate("sigma", x, tau).value
    print(f"order {order:2d}: rel diff {abs(s - q) / abs(q):.1e}")
