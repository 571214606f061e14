"""The sigma-covariant and induced-covariant forms of h_ij coincide.

Both are evaluated symbolically for an arbitrary radial function on S^2;
derivatives of r are then replaced by free jet variables and the difference
is sampled at random jets.
"""
import numpy as np
import sympy as sp

th, ph = sp.symbols("theta phi")
X = (th, ph)


def christoffel(G):
    Gi = G.inv()
    return [[[sum(Gi[k, l] * (sp.diff(G[l, i], X[j]) + sp.diff(G[l, j], X[i]) - sp.diff(G[i, j], X[l])) / 2
                  for l in range(2)) for j in range(2)] for i in range(2)] for k in range(2)]


def build_difference():
    R = sp.Function("r")(th, ph)
    lam, lam_p = sp.cosh(R), sp.sinh(R)
    sigma = sp.diag(1, sp.sin(th) ** 2)
    dr = [sp.diff(R, v) for v in X]
    rr = sp.Matrix(2, 2, lambda i, j: dr[i] * dr[j])
    g = lam**2 * sigma - rr

    def hess(C):
        return sp.Matrix(2, 2, lambda i, j: sp.diff(R, X[i], X[j]) - sum(C[k][i][j] * dr[k] for k in range(2)))

    ups = sp.sqrt(1 - (dr[0] ** 2 + dr[1] ** 2 / sp.sin(th) ** 2) / lam**2)
    sff = (hess(christoffel(sigma)) + lam * lam_p * sigma - 2 * lam_p / lam * rr) / ups
    hor = ups * (hess(christoffel(g)) + lam_p / lam * g + lam_p / lam * rr)
    jet = sp.symbols("r0 r1 r2 r11 r12 r22")
    sub = {sp.diff(R, th, 2): jet[3], sp.diff(R, th, ph): jet[4], sp.diff(R, ph, 2): jet[5],
           sp.diff(R, th): jet[1], sp.diff(R, ph): jet[2], R: jet[0]}
    return sp.lambdify((th, *jet), (sff - hor).xreplace(sub), "numpy"), sp.lambdify(
        (th, *jet), sff.xreplace(sub), "numpy")


def test_hessian_forms_agree_on_random_jets():
    diff, sff = build_difference()
    rng = np.random.default_rng(7)
    for _ in range(50):
        theta = rng.uniform(0.1, np.pi - 0.1)
        r0 = rng.uniform(0.2, 2.5)
        # keep the jet spacelike: |Dr|_sigma < cosh r
        grad = rng.uniform(-0.4, 0.4, 2) * np.array([1.0, np.sin(theta)]) * np.cosh(r0)
        jet = [r0, *grad, *rng.uniform(-2, 2, 3)]
        d = np.asarray(diff(theta, *jet), dtype=float)
        scale = np.max(np.abs(np.asarray(sff(theta, *jet), dtype=float)))
        assert np.max(np.abs(d)) <= 1e-12 * max(scale, 1.0)
