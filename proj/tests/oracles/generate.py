"""Independent reference values for the C++ tests.

Uses mpmath (50 digits) and numpy/scipy only; none of the library code.
Run: python3 tests/oracles/generate.py
"""
import mpmath as mp
import numpy as np
import scipy.linalg as sla

mp.mp.dps = 50


def eps_g(lam, g, w=1):
    return 1 - w * g**2 / (w + 4 * lam)


def omega_bar(lam, w=1):
    return mp.sqrt(w**2 + 4 * lam * w)


def heisenberg_x(lam, g, t):
    # X(t) = X cos(W t) + P sin(W t) / sqrt(eps_g), W = omega_bar sqrt(eps_g)
    e = eps_g(lam, g)
    W = omega_bar(lam) * mp.sqrt(e)
    return mp.sin(W * t) / (mp.sqrt(2) * mp.sqrt(e))


def heisenberg_x2(lam, g, t):
    e = eps_g(lam, g)
    W = omega_bar(lam) * mp.sqrt(e)
    # <X^2>_0 = <P^2>_0 = 1, <G>_0 = 0
    return mp.cos(W * t) ** 2 + mp.sin(W * t) ** 2 / e


def closed_point(lam, g, t):
    x = heisenberg_x(lam, g, t)
    dx = mp.diff(lambda gg: heisenberg_x(lam, gg, t), g)
    var = heisenberg_x2(lam, g, t) - x**2
    return x, dx, var, dx**2 / var


def dissipative_point(lam, g, gm, gp, t):
    # exact solution of the linear moment system via the matrix exponential
    def moments(gg):
        wb = omega_bar(lam)
        e = 4 * wb**2 * eps_g(lam, gg)
        k = e / (4 * wb)
        A = mp.matrix([
            [-gm / 2, wb, 0, 0, 0, 0],
            [-k, -gm / 2, 0, 0, 0, 0],
            [0, 0, -gm, 0, wb, gp / 2],
            [0, 0, 0, -gm, -k, gp / 2],
            [0, 0, -2 * k, 2 * wb, -gm, 0],
            [0, 0, 0, 0, 0, 0],
        ])
        y0 = mp.matrix([0, 1 / mp.sqrt(2), 1, 1, 0, 1])
        return mp.expm(A * t) * y0

    y = moments(g)
    x = y[0]
    var = y[2] - x**2
    dx = mp.diff(lambda gg: moments(gg)[0], g)
    return x, dx, var, dx**2 / var


def boson_ops(n):
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    x = (a + a.T) / np.sqrt(2)
    p2 = -((a.T - a) @ (a.T - a)) / 2
    return a, x, p2


def generator_qfi(lam, g, t, n=400):
    w = 1.0
    wb = float(omega_bar(lam))
    e = float(eps_g(lam, g))
    dz = -2 * w * g / (w + 4 * lam)
    _, x, p2 = boson_ops(n + 4)
    x2 = (x @ x)[:n, :n]
    p2 = p2[:n, :n]
    h = wb / 2 * (p2 + e * x2)
    h1 = wb / 2 * x2
    E, V = np.linalg.eigh(h)
    psi = np.zeros(n, complex)
    psi[0] = 1 / np.sqrt(2)
    psi[1] = 1j / np.sqrt(2)
    c = V.T @ psi
    m = V.T @ h1 @ V
    d = E[:, None] - E[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(np.abs(d) < 1e-12, t, (np.exp(1j * d * t) - 1) / (1j * d))
    hz = m * k
    v = hz @ c
    mean = np.vdot(c, v)
    var = np.vdot(v, v).real - abs(mean) ** 2
    return dz**2 * 4 * var


def finite_frequency_delta(lam, g, eta, n_peak=1, ncut=128):
    w = 1.0
    Om = eta * w
    wb = np.sqrt(w * w + 4 * lam * w)
    e = 1 - w * g * g / (w + 4 * lam)
    eps = 4 * wb * wb * e
    tau = 2 * np.pi * n_peak / np.sqrt(eps)
    a, x, _ = boson_ops(ncut)
    num = a.T @ a
    sz = np.diag([-1.0, 1.0])  # index 0 = down
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])

    def H(gg):
        c = np.sqrt(w * Om) / 2 * gg * (1 + 4 * lam / w) ** -0.25
        return (np.kron(np.eye(2), wb * num) + np.kron(Om / 2 * sz, np.eye(ncut))
                + c * np.kron(sx, a + a.T))

    psi0 = np.zeros(2 * ncut, complex)
    psi0[0] = 1 / np.sqrt(2)
    psi0[1] = 1j / np.sqrt(2)
    X = np.kron(np.eye(2), x)

    def evolve(gg):
        E, V = np.linalg.eigh(H(gg))
        return V @ (np.exp(-1j * E * tau) * (V.T @ psi0))

    def xmean(gg):
        s = evolve(gg)
        return np.vdot(s, X @ s).real

    psi = evolve(g)
    xm = np.vdot(psi, X @ psi).real
    x2 = np.vdot(psi, X @ (X @ psi)).real
    hstep = 1e-4 * g
    d1 = (xmean(g + hstep) - xmean(g - hstep)) / (2 * hstep)
    d2 = (xmean(g + hstep / 2) - xmean(g - hstep / 2)) / hstep
    dx = (4 * d2 - d1) / 3
    iv = dx * dx / (x2 - xm * xm)
    peak = n_peak**2 * np.pi**2 * w * w * g * g / (2 * (w + 4 * lam) ** 2) * e**-3
    return (iv - peak) / peak


def main():
    print("squeeze r(lambda=-0.2475) =", mp.nstr(mp.log(mp.mpf("0.01")) / 4, 17))
    print("squeeze r(lambda=0.75)    =", mp.nstr(mp.log(4) / 4, 17))
    print("g_c(lambda=-0.2)          =", mp.nstr(mp.sqrt(mp.mpf("0.2")), 17))
    print("eps_g_alpha(g=1.2)        =", mp.nstr(1 - (1 / mp.mpf("1.44")) ** 2, 17))
    for lam, g, t in [(0, mp.mpf("0.9"), 5), (mp.mpf("-0.2475"), mp.mpf("0.099"), 100),
                      (mp.mpf("-0.247"), mp.mpf("0.1"), 37)]:
        vals = closed_point(lam, g, t)
        print("closed", float(lam), float(g), t, [mp.nstr(v, 17) for v in vals])
    e = mp.mpf("0.19")
    print("peak n=1 g=0.9 =", mp.nstr(mp.pi**2 * mp.mpf("0.81") / 2 / e**3, 17))
    print("tau_1 g=0.9 =", mp.nstr(2 * mp.pi / mp.sqrt(4 * e), 17))
    for lam, g, t in [(mp.mpf("-0.247"), mp.mpf("0.1"), 100), (0, mp.mpf("0.1"), 30)]:
        vals = dissipative_point(lam, g, mp.mpf("0.01"), mp.mpf("0.03"), t)
        print("dissipative", float(lam), float(g), t, [mp.nstr(v, 17) for v in vals])
    for t in [5.0, 10.0, 20.0]:
        print("generator qfi g=0.9 t=", t, repr(generator_qfi(0.0, 0.9, t)))
    for lam, g, eta in [(0.0, 0.9, 100.0), (0.0, 0.9, 1000.0), (-0.247, 0.1, 100.0)]:
        print("delta", lam, g, eta, repr(finite_frequency_delta(lam, g, eta)))


if __name__ == "__main__":
    main()
