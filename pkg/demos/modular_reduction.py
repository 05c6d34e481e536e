"""
Reducing the modulus
====================

Near the real axis the nome q = exp(pi i tau) is close to 1 and the
q-series crawls. Mapping tau into the fundamental domain first keeps
|q| <= exp(-pi sqrt(3)/2), about 0.066, and the transformation law carries
the value back.
"""

import cmath

from ellipticore.modular import reduce_to_fundamental, transform_theta1
from ellipticore.qkernel import EvalOptions, jtheta
from ellipticore.reduced import evaluate

tau = 0.5 + 0.01j
r = reduce_to_fundamental(tau)
print("tau          ", tau)
print("reduced tau  ", r.reduced_tau.value)
print("map (a,b,c,d)", r.map.as_tuple())
print("|q| before   ", abs(cmath.exp(1j * cmath.pi * tau)))
print("|q| after    ", abs(cmath.exp(1j * cmath.pi * r.reduced_tau.value)))

# the term count tells the story
x = 0.1
slow = evaluate("theta3", x, tau, reduce_first=False, opts=EvalOptions(max_terms=5000))
fast = evaluate("theta3", x, tau)
print()
print(f"direct : {slow.value:.12e}  terms {slow.terms_used}")
print(f"reduced: {fast.value:.12e}  terms {fast.terms_used}")

# theta1 under the reducing map, checked against direct evaluation at the image
m = r.map
lhs = transform_theta1(x, tau, m)
rhs = jtheta(1, x / m.factor(tau), m.apply(tau))
print()
print("law residual", abs(lhs - rhs) / abs(rhs))
