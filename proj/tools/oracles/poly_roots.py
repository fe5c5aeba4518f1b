#!/usr/bin/env python3
"""Reference roots of the asymptotic characteristic polynomials.

Produces the frozen constants used by tests/test_odecore.cpp:
  - roots of the ZK cubic lambda^3 - lambda + 1  (sigma=1, k=0)
  - slow root of the gKP quartic lambda^4 - lambda^2 + sigma*lambda + k^2
    for sigma=1 and small k, compared against -k^2/sigma
  - roots of the KP-BBM quartic c*l^4 - s*l^3 - (c-1)*l^2 + s*l + k^2
    at c=2, sigma=1, k=1
"""
import numpy as np

np.set_printoptions(precision=15)


def show(label, coeffs):
    roots = np.roots(coeffs)
    roots = roots[np.argsort(roots.real)]
    print(label)
    for r in roots:
        print(f"  {r.real:+.15f} {r.imag:+.15f}i")
    return roots


show("zk cubic  l^3 - l + 1 (sigma=1, k=0):", [1, 0, -1, 1])

print()
for k in (0.01, 0.03, 0.1):
    roots = np.roots([1, 0, -1, 1, k * k])
    slow = roots[np.argmin(np.abs(roots + k * k))]
    rel = abs(slow + k * k) / (k * k)
    print(f"gkp1 slow root sigma=1 k={k}: {slow:.12g}  "
          f"rel err vs -k^2/sigma = {rel:.3e}")

print()
show("kpbbm quartic c=2 sigma=1 k=1 (2l^4 - l^3 - l^2 + l + 1):",
     [2, -1, -1, 1, 1])

print()
show("nls quartic sigma=1 k=0 ((l^2-1)^2 + 1 = l^4 - 2l^2 + 2):",
     [1, 0, -2, 0, 2])
