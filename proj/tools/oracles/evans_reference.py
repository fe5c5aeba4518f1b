#!/usr/bin/env python3
"""Independent Evans-function check of the gkp1 p=2 unstable band.

Integrates the Lambda^2(C^4) compound system of V' = A(x,sigma,k)V from
both ends with the growth of the target wedge tilted away (rhs uses
A^(2) - (sum of group roots) I), canonical Schur-normalized initial data,
and domain half-length adapted to the slowest root. The wedge pairing at
x=0 is then O(1) and real for real sigma.
"""
import numpy as np
from scipy.integrate import solve_ivp
from itertools import combinations

PAIRS = list(combinations(range(4), 2))


def wedge_lift(A):
    B = np.zeros((6, 6), dtype=complex)
    for a, (i, j) in enumerate(PAIRS):
        for b, (kk, ll) in enumerate(PAIRS):
            val = 0.0 + 0j
            if j == ll:
                val += A[i, kk]
            if j == kk:
                val -= A[i, ll]
            if i == kk:
                val += A[j, ll]
            if i == ll:
                val -= A[j, kk]
            B[a, b] = val
    return B


def a_matrix(x, sigma, k):
    sech = 1.0 / np.cosh(x / 2.0)
    th = np.tanh(x / 2.0)
    W = 3.0 * sech ** 2
    Wp = -3.0 * sech ** 2 * th
    Wpp = 1.5 * sech ** 2 * (2.0 * th ** 2 - sech ** 2)
    A = np.zeros((4, 4), dtype=complex)
    A[0, 1] = A[1, 2] = A[2, 3] = 1.0
    A[3, 0] = -k * k - Wpp
    A[3, 1] = -sigma - 2.0 * Wp
    A[3, 2] = 1.0 - W
    return A


def init_wedge(sigma, k, side):
    lam = np.roots([1, 0, -1, sigma, k * k])
    sel = lam[lam.real < 0] if side == "+" else lam[lam.real > 0]
    assert len(sel) == 2, (sigma, k, lam)
    e1, e2 = sel[0] + sel[1], sel[0] * sel[1]
    h = [1.0 + 0j, e1, e1 * e1 - e2]
    w = np.zeros(6, dtype=complex)
    for a, (i, j) in enumerate(PAIRS):
        w[a] = e2 ** i * h[j - i - 1]
    return w, e1, np.min(np.abs(lam.real))


def evans(sigma, k):
    halves = {}
    for side, sgn in (("+", 1.0), ("-", -1.0)):
        w0, e1, gap = init_wedge(sigma, k, side)
        X = min(300.0, max(24.0, 14.0 / gap))

        def rhs(x, y):
            v = y[:6] + 1j * y[6:]
            dv = (wedge_lift(a_matrix(x, sigma, k)) - e1 * np.eye(6)) @ v
            return np.concatenate([dv.real, dv.imag])

        y0 = np.concatenate([w0.real, w0.imag])
        sol = solve_ivp(rhs, (sgn * X, 0.0), y0, rtol=1e-10, atol=1e-13)
        halves[side] = sol.y[:6, -1] + 1j * sol.y[6:, -1]
    wp, wm = halves["+"], halves["-"]
    sgn = {(0, 1): 1, (0, 2): -1, (0, 3): 1, (1, 2): 1, (1, 3): -1,
           (2, 3): 1}
    D = 0j
    for a, pa in enumerate(PAIRS):
        comp = tuple(sorted(set(range(4)) - set(pa)))
        b = PAIRS.index(comp)
        D += sgn[pa] * wm[a] * wp[b]
    return D


if __name__ == "__main__":
    for k in (0.1, 0.25, 0.35, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.9, 1.99):
        sigmas = np.linspace(0.02, 1.2, 60)
        vals = np.array([evans(s, k) for s in sigmas])
        re = vals.real
        zs = []
        for i in np.where(np.sign(re[:-1]) * np.sign(re[1:]) < 0)[0]:
            a, b = sigmas[i], sigmas[i + 1]
            fa = re[i]
            for _ in range(50):
                m = 0.5 * (a + b)
                fm = evans(m, k).real
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            zs.append(0.5 * (a + b))
        imax = np.max(np.abs(vals.imag) / np.abs(vals))
        print(f"k={k:<5}: zeros: " +
              (", ".join(f"{z:.6f}" for z in zs) or "none") +
              f"   max|ImD|/|D|={imax:.1e}  |D| range "
              f"[{np.abs(vals).min():.2e}, {np.abs(vals).max():.2e}]")
