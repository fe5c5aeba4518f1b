#!/usr/bin/env python3
"""Independent Fourier-collocation reference for all five models.

Dense numpy/scipy eigensolves of the 1D operators L, J(ik), S(ik), M_k and
of J(ik)(L+S(ik)). Values printed here are frozen into the C++ unit and
acceptance tests (tests/test_colloc.cpp, tests/test_specfind.cpp,
tests/acceptance_main.cpp), which cite this file by name.

Operators per model (x-Fourier symbol xi, transverse wavenumber k):
  gkp1   L = -dxx + 1 - p*Q^(p-1),  J = dx,            S(ik) = k^2/xi^2
  nls    L = diag(L1, L2), L1 = -dxx+1-3Q^2, L2 = -dxx+1-Q^2,
         J = [[0,1],[-1,0]],                           S(ik) = k^2*I
  zk     L = -dxx + 1 - 2Q,  J = dx,                   S(ik) = k^2*I
  bou    L = [[B-2q, c*B(ik)^1/2],[c*B(ik)^1/2, B]] with B(ik) =
         1+xi^2+k^2/xi^2,  J = [[0,G],[G,0]], G = dx*B(ik)^(-1/2)
  kpbbm  L = -c*dxx + (c-1) - p*Q^(p-1),  J = dx/(1+xi^2), S(ik) = k^2/xi^2

The mean Fourier mode is excluded wherever J contains dx (the continuum
operators act on L^2(R), where constants are not admissible).
"""
import numpy as np
from scipy import linalg

np.random.seed(7)


def grid(N, L):
    h = 2.0 * L / N
    x = -L + h * np.arange(N)
    xi = 2.0 * np.pi * np.fft.fftfreq(N, d=h)
    return x, xi


def mult(N, sym):
    F = np.fft.fft(np.eye(N), axis=0)
    return np.real(np.fft.ifft(sym[:, None] * F, axis=0))


def zero_mean_basis(N):
    v = np.ones((N, 1)) / np.sqrt(N)
    Q, _ = np.linalg.qr(np.hstack([v, np.eye(N)[:, 1:]]))
    return Q[:, 1:]


def localized(vec, x, Ldom, frac=0.99):
    m = np.abs(vec) ** 2
    inner = m[np.abs(x) <= Ldom / 2].sum()
    return inner >= frac * m.sum()


# ---------------------------------------------------------------- profiles
def q_gkp1(x, p):
    return ((p + 1) / 2.0) ** (1.0 / (p - 1)) * \
        np.cosh((p - 1) * x / 2.0) ** (-2.0 / (p - 1))


def q_nls(x):
    return np.sqrt(2.0) / np.cosh(x)


def q_zk(x):
    return 1.5 / np.cosh(x / 2.0) ** 2


def q_bou(x, c):
    a = 1.0 - c * c
    return 1.5 * a / np.cosh(np.sqrt(a) * x / 2.0) ** 2


def q_kpbbm(x, c, p):
    return (c - 1.0) ** (1.0 / (p - 1)) * q_gkp1(np.sqrt(1.0 - 1.0 / c) * x, p)


# ---------------------------------------------------------- model builders
def ops_gkp1(N, L, k, p=2):
    x, xi = grid(N, L)
    Dx = mult(N, 1j * xi)
    Dxx = mult(N, -xi ** 2)
    W = p * q_gkp1(x, p) ** (p - 1)
    Lmat = -Dxx + np.eye(N) - np.diag(W)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_sym = np.where(xi != 0.0, k ** 2 / xi ** 2, 0.0)
    Smat = mult(N, s_sym + 0j)
    V = zero_mean_basis(N)
    JLS = V.T @ (Dx @ (Lmat + Smat)) @ V
    Mk = V.T @ (Dx @ Lmat @ Dx) @ V - k ** 2 * np.eye(N - 1)
    return x, V, JLS, Mk, Lmat


def ops_nls(N, L, k):
    x, xi = grid(N, L)
    Dxx = mult(N, -xi ** 2)
    Q2 = q_nls(x) ** 2
    L1 = -Dxx + (1 + k ** 2) * np.eye(N) - 3 * np.diag(Q2)
    L2 = -Dxx + (1 + k ** 2) * np.eye(N) - np.diag(Q2)
    Z = np.zeros((N, N))
    JLS = np.block([[Z, L2], [-L1, Z]])
    Mk = np.block([[-L2, Z], [Z, -L1]])
    return x, None, JLS, Mk, (L1 - k ** 2 * np.eye(N),
                              L2 - k ** 2 * np.eye(N))


def ops_zk(N, L, k):
    x, xi = grid(N, L)
    Dx = mult(N, 1j * xi)
    Dxx = mult(N, -xi ** 2)
    Lmat = -Dxx + np.eye(N) - 2 * np.diag(q_zk(x))
    V = zero_mean_basis(N)
    JLS = V.T @ (Dx @ (Lmat + k ** 2 * np.eye(N))) @ V
    Mk = V.T @ (Dx @ Lmat @ Dx + k ** 2 * Dxx) @ V
    return x, V, JLS, Mk, Lmat


def ops_bou(N, L, k, c=0.75):
    x, xi = grid(N, L)
    with np.errstate(divide="ignore", invalid="ignore"):
        bik = np.where(xi != 0.0, 1 + xi ** 2 + k ** 2 / xi ** 2, np.inf)
        Bh = mult(N, np.where(xi != 0.0, np.sqrt(bik), 0.0) + 0j)
        Bih = mult(N, np.where(xi != 0.0, 1.0 / np.sqrt(bik), 0.0) + 0j)
        G = mult(N, np.where(xi != 0.0,
                             1j * xi / np.sqrt(np.where(xi != 0, bik, 1.0)),
                             0.0))
    Dxx = mult(N, -xi ** 2)
    Dx = mult(N, 1j * xi)
    q = q_bou(x, c)
    V = zero_mean_basis(N)
    # J(L+S) = [[c*dx, dx*B^1/2],[dx*B^1/2 - 2*G*q, c*dx]]
    TL = V.T @ (c * Dx) @ V
    TR = V.T @ (Dx @ Bh) @ V
    BL = V.T @ (Dx @ Bh - 2 * G @ np.diag(q)) @ V
    JLS = np.block([[TL, TR], [BL, TL]])
    # M_k = [[dxx, c*dxx*B^-1/2],[c*dxx*B^-1/2, dxx - 2*G*q*G]]
    A11 = V.T @ Dxx @ V
    A12 = V.T @ (c * Dxx @ Bih) @ V
    A22 = V.T @ (Dxx - 2 * G @ np.diag(q) @ G) @ V
    Mk = np.block([[A11, A12], [A12, A22]])
    return x, V, JLS, Mk, q


def ops_kpbbm(N, L, k, c=2.0, p=2):
    x, xi = grid(N, L)
    Dx = mult(N, 1j * xi)
    W = p * q_kpbbm(x, c, p) ** (p - 1)
    Dxx = mult(N, -xi ** 2)
    Lmat = -c * Dxx + (c - 1) * np.eye(N) - np.diag(W)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_sym = np.where(xi != 0.0, k ** 2 / xi ** 2, 0.0)
    Smat = mult(N, s_sym + 0j)
    Jm = mult(N, 1j * xi / (1 + xi ** 2))
    Pm = mult(N, 1.0 / (1 + xi ** 2) + 0j)
    V = zero_mean_basis(N)
    JLS = V.T @ (Jm @ (Lmat + Smat)) @ V
    Mk = V.T @ (Pm @ (Dx @ Lmat @ Dx - k ** 2 * np.eye(N)) @ Pm) @ V
    return x, V, JLS, Mk, Lmat


# --------------------------------------------------------------- reporting
def sym_err(A):
    return np.abs(A - A.T).max()


def unstable_sigma(name, builder, ks, N, L, components=1, **kw):
    print(f"\n{name}: localized unstable eigenvalues of J(ik)(L+S(ik)), "
          f"N={N} L={L}")
    x, _ = grid(N, L)
    for k in ks:
        _, V, JLS, _, _ = builder(N, L, k, **kw)
        w, vecs = linalg.eig(JLS)
        sel = []
        for i in range(len(w)):
            if w[i].real <= 0.02:
                continue
            v = vecs[:, i]
            n = JLS.shape[0] // components
            ok = True
            for cidx in range(components):
                comp = v[cidx * n:(cidx + 1) * n]
                phys = (V @ comp) if V is not None else comp
                if np.linalg.norm(phys) > 1e-8 and not localized(phys, x, L):
                    ok = False
            if ok:
                sel.append(w[i])
        sel = sorted(sel, key=lambda z: -z.real)
        print(f"  k={k:<5}: " + (", ".join(
            f"{z.real:+.9f}{z.imag:+.9f}i" for z in sel) or "none"))


def mumax_scan(name, builder, ks, N, L, **kw):
    print(f"\n{name}: mu_max(k) of M_k, N={N} L={L}")
    prev = None
    for k in ks:
        _, _, _, Mk, _ = builder(N, L, k, **kw)
        se = sym_err(Mk)
        mu = linalg.eigh(Mk, eigvals_only=True,
                         subset_by_index=[Mk.shape[0] - 1,
                                          Mk.shape[0] - 1])[0]
        mono = "" if prev is None else ("  (dec)" if mu < prev else "  (INC)")
        print(f"  k={k:<6}: mu_max={mu:+.9f}   sym_err={se:.2e}{mono}")
        prev = mu


if __name__ == "__main__":
    N, Ld = 512, 40.0

    # --- soliton residuals (stationary equations, spectral second derivative)
    x, xi = grid(N, Ld)
    Dxx = mult(N, -xi ** 2)
    for nm, Q, res in [
        ("gkp1 p=2", q_gkp1(x, 2), lambda Q: -Dxx @ Q + Q - Q ** 2),
        ("gkp1 p=3", q_gkp1(x, 3), lambda Q: -Dxx @ Q + Q - Q ** 3),
        ("nls", q_nls(x), lambda Q: -Dxx @ Q + Q - Q ** 3),
        ("zk", q_zk(x), lambda Q: -Dxx @ Q + Q - Q ** 2),
        ("bou c=0.75", q_bou(x, 0.75),
         lambda Q: -Dxx @ Q + (1 - 0.75 ** 2) * Q - Q ** 2),
        ("kpbbm c=2 p=2", q_kpbbm(x, 2.0, 2),
         lambda Q: -2.0 * Dxx @ Q + (2.0 - 1) * Q - Q ** 2),
    ]:
        print(f"soliton residual {nm:<14}: {np.abs(res(Q)).max():.3e}")

    # --- nls anchors
    _, _, _, _, (L1, L2) = ops_nls(N, Ld, 0.0)
    ev1 = np.sort(linalg.eigh(L1, eigvals_only=True))[:4]
    print(f"\nnls L1 lowest eigenvalues (expect -3, 0): {ev1}")
    _, _, _, M0, _ = ops_nls(N, Ld, 0.0)
    mu0 = linalg.eigh(M0, eigvals_only=True)[-1]
    print(f"nls mu_max(0) (expect 3): {mu0:.9f}")

    # --- gkp1 anchors
    _, _, _, M0g, Lg = ops_gkp1(N, Ld, 0.0)
    mu0g = linalg.eigh(M0g, eigvals_only=True)[-1]
    print(f"\ngkp1 p=2 mu_max(0): {mu0g:.9f}   k0 = sqrt: {np.sqrt(mu0g):.9f}")
    evg = np.sort(linalg.eigh(Lg, eigvals_only=True))[:3]
    print(f"gkp1 p=2 L lowest eigenvalues: {evg}")
    Qp = np.real(np.fft.ifft(1j * xi * np.fft.fft(q_gkp1(x, 2))))
    print(f"gkp1 p=2 ||L Q'||_inf: {np.abs(Lg @ Qp).max():.3e}")

    # --- zk / kpbbm / bou mu_max(0) and crossings
    for nm, b, kw in [("zk", ops_zk, {}),
                      ("kpbbm c=2 p=2", ops_kpbbm, {}),
                      ("bou c=0.75", ops_bou, {})]:
        _, _, _, M0m, _ = b(384, Ld, 0.0, **kw)
        mu = linalg.eigh(M0m, eigvals_only=True)[-1]
        print(f"{nm} mu_max(0): {mu:.9f}")

    mumax_scan("bou c=0.75", ops_bou, [0.0, 0.25, 0.5, 0.75, 1.0, 1.5,
                                       2.0, 2.5, 3.0], 384, Ld)
    mumax_scan("zk", ops_zk, [0.0, 0.25, 0.5, 0.75, 1.0, 1.25], 384, Ld)
    mumax_scan("kpbbm c=2 p=2", ops_kpbbm, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
               384, Ld)

    # crossing bisection on mu_max
    def crossing(builder, lo, hi, N, L, **kw):
        def mu(k):
            _, _, _, Mk, _ = builder(N, L, k, **kw)
            return linalg.eigh(Mk, eigvals_only=True)[-1]
        a, b = lo, hi
        fa = mu(a)
        for _ in range(40):
            m = 0.5 * (a + b)
            fm = mu(m)
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
            if b - a < 1e-5:
                break
        return 0.5 * (a + b)


    print(f"\nnls M_k crossing k0 (expect sqrt(3)={np.sqrt(3):.6f}): "
          f"{crossing(ops_nls, 1.0, 2.5, 384, Ld):.6f}")
    print(f"gkp1 p=2 M_k crossing k0 (expect sqrt(3)/4={np.sqrt(3)/4:.6f}): "
          f"{crossing(ops_gkp1, 0.3, 0.6, 384, Ld):.6f}")
    print(f"zk M_k crossing k0: {crossing(ops_zk, 0.5, 1.5, 384, Ld):.6f}")
    print(f"kpbbm c=2 p=2 M_k crossing k0: "
          f"{crossing(ops_kpbbm, 0.1, 1.0, 384, Ld):.6f}")
    print(f"bou c=0.75 M_k crossing k0: "
          f"{crossing(ops_bou, 0.01, 0.25, 384, Ld):.6f}")

    # --- unstable eigenvalues along k (the sigma(k) oracle)
    unstable_sigma("nls", ops_nls, [0.5, 1.0, 1.5, 1.8, 2.0], N, Ld,
                   components=2)
    unstable_sigma("gkp1 p=2", ops_gkp1,
                   [0.1, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 1.0, 3.5],
                   N, Ld)
    unstable_sigma("zk", ops_zk, [0.25, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 1.0,
                                  1.25], 384, Ld)
    unstable_sigma("kpbbm c=2 p=2", ops_kpbbm,
                   [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4], 384, Ld)
    unstable_sigma("bou c=0.75", ops_bou, [0.02, 0.05, 0.1, 0.15, 0.2, 0.25,
                                           0.5, 1.0], 384, Ld, components=2)

    # --- boussinesq splitting: quartic roots stay off the imaginary axis
    print("\nbou c=0.75 splitting min|Re lambda| over 20 random sigma, "
          "k in {0, 0.5, 1}:")
    rng = np.random.default_rng(11)
    worst = np.inf
    for _ in range(20):
        s = complex(rng.uniform(0.1, 2.0), rng.uniform(-2.0, 2.0))
        for k in (0.0, 0.5, 1.0):
            c = 0.75
            roots = np.roots([1, 0, -(1 - c * c), -2 * c * s, k * k + s * s])
            worst = min(worst, np.abs(roots.real).min())
    print(f"  min over draws: {worst:.6e}")
