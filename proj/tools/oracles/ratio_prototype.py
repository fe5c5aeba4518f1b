#!/usr/bin/env python3
"""Prototype of the gkp1 k->0 continuation ratio r = D~(s,k)/(s*D_1d(s,0)).

D~ uses the slow-split wedge initialization v(mu)^v(lambda_fast) (no
Vandermonde division); the reduced 1D Evans value D_1d uses the canonical
normalization. The first integral c(x).V of the 4th-order system equals
sigma for the slow solution, which forces r -> -1 for every sigma. The
spread across sigma after Richardson extrapolation in k^2 is the
acceptance-criterion quantity.
"""
import numpy as np
from scipy.integrate import solve_ivp
from itertools import combinations
import sys
sys.path.insert(0, "tools/oracles")
from debug_evans_gkp1 import wedge_lift, a_matrix, PAIRS


def b_matrix(x, sigma):
    sech = 1.0 / np.cosh(x / 2.0)
    th = np.tanh(x / 2.0)
    W = 3.0 * sech ** 2
    Wp = -3.0 * sech ** 2 * th
    B = np.zeros((3, 3), dtype=complex)
    B[0, 1] = B[1, 2] = 1.0
    B[2, 0] = -sigma - Wp
    B[2, 1] = 1.0 - W
    return B


def transport(rhs_mat, w0, x0, tilt, dim):
    def rhs(x, y):
        v = y[:dim] + 1j * y[dim:]
        dv = (rhs_mat(x) - tilt * np.eye(dim)) @ v
        return np.concatenate([dv.real, dv.imag])
    y0 = np.concatenate([w0.real, w0.imag])
    sol = solve_ivp(rhs, (x0, 0.0), y0, rtol=1e-11, atol=1e-14)
    return sol.y[:dim, -1] + 1j * sol.y[dim:, -1]


def evans_tilde(sigma, k, X=24.0):
    lam = np.roots([1, 0, -1, sigma, k * k])
    stab = lam[lam.real < 0]
    unst = lam[lam.real > 0]
    mu = stab[np.argmin(np.abs(stab + k * k / sigma))]
    lf = stab[np.argmax(np.abs(stab + k * k / sigma))]
    # slow-split wedge: v(mu) ^ v(lf), no Vandermonde division
    vmu = np.array([1, mu, mu ** 2, mu ** 3], dtype=complex)
    vlf = np.array([1, lf, lf ** 2, lf ** 3], dtype=complex)
    wp0 = np.zeros(6, dtype=complex)
    for a, (i, j) in enumerate(PAIRS):
        wp0[a] = vmu[i] * vlf[j] - vmu[j] * vlf[i]
    e1p = mu + lf
    wp = transport(lambda x: wedge_lift(a_matrix(x, sigma, k)), wp0, X,
                   e1p, 6)
    # unstable side: canonical
    e1m, e2m = unst[0] + unst[1], unst[0] * unst[1]
    h = [1.0 + 0j, e1m, e1m * e1m - e2m]
    wm0 = np.zeros(6, dtype=complex)
    for a, (i, j) in enumerate(PAIRS):
        wm0[a] = e2m ** i * h[j - i - 1]
    wm = transport(lambda x: wedge_lift(a_matrix(x, sigma, k)), wm0, -X,
                   e1m, 6)
    sgn = {(0, 1): 1, (0, 2): -1, (0, 3): 1, (1, 2): 1, (1, 3): -1,
           (2, 3): 1}
    D = 0j
    for a, pa in enumerate(PAIRS):
        comp = tuple(sorted(set(range(4)) - set(pa)))
        b = PAIRS.index(comp)
        D += sgn[pa] * wm[a] * wp[b]
    # undo the tilts so the value is the true D~
    return D * np.exp((e1p + e1m) * X)


def evans_1d(sigma, X=24.0):
    lam = np.roots([1, 0, -1, sigma])
    lf = lam[lam.real < 0][0]
    unst = lam[lam.real > 0]
    v = transport(lambda x: b_matrix(x, sigma),
                  np.array([1, lf, lf ** 2], dtype=complex), X, lf, 3)
    e1, e2 = unst[0] + unst[1], unst[0] * unst[1]
    w0 = np.array([1.0 + 0j, e1, e2])  # canonical Lambda^2(C^3) wedge
    w = transport(lambda x: wedge_lift3(b_matrix(x, sigma)), w0, -X, e1, 3)
    D = v[0] * w[2] - v[1] * w[1] + v[2] * w[0]
    return D * np.exp((lf + e1) * X)


def wedge_lift3(B):
    P3 = list(combinations(range(3), 2))
    M = np.zeros((3, 3), dtype=complex)
    for a, (i, j) in enumerate(P3):
        for b, (kk, ll) in enumerate(P3):
            val = 0.0 + 0j
            if j == ll:
                val += B[i, kk]
            if j == kk:
                val -= B[i, ll]
            if i == kk:
                val += B[j, ll]
            if i == ll:
                val -= B[j, kk]
            M[a, b] = val
    return M


if __name__ == "__main__":
    for sigma in (0.5, 1.0):
        d1 = evans_1d(sigma)
        rs = []
        for k in (0.04, 0.02, 0.01):
            dt = evans_tilde(sigma, k)
            r = dt / (sigma * d1)
            rs.append(r)
            print(f"sigma={sigma} k={k:5}: D~={dt:.8e}  r={r:.8f}")
        r_rich = rs[2] + (rs[2] - rs[1]) / 3.0  # Richardson in k^2
        print(f"sigma={sigma}: Richardson r = {r_rich:.8f}  |r|="
              f"{abs(r_rich):.8f}")
