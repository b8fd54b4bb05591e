"""Independent dense reference values for the unit and acceptance tests.

Builds the truncated Fock space with itertools, the fiber Hamiltonians as dense
numpy matrices, and diagonalizes them with numpy.linalg.eigh. Nothing here
shares code with the C++ implementation. Run:

    python3 tests/oracles/dense_oracle.py > tests/oracles/values.json

and copy the printed numbers into the tests that freeze them.
"""

import itertools
import json
import math

import numpy as np

RHO_PREFACTOR = (2.0 * math.pi) ** -1.5


def axes_rule():
    dirs = np.array([[0, 0, 1], [0, 0, -1], [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]], float)
    return dirs, np.full(6, 4.0 * math.pi / 6.0)


def build_modes(lam, kappa, n_steps, radial_order):
    gamma = (kappa / lam) ** (1.0 / n_steps)
    x, w = np.polynomial.legendre.leggauss(radial_order)
    dirs, dw = axes_rule()
    ks, ws, shells = [], [], []
    for n in range(1, n_steps + 1):
        lo, hi = lam * gamma**n, lam * gamma ** (n - 1)
        for xi, wi in zip(x, w):
            r = 0.5 * (hi - lo) * xi + 0.5 * (hi + lo)
            wr = 0.5 * (hi - lo) * wi * r * r
            for d, a in zip(dirs, dw):
                ks.append(r * d)
                ws.append(wr * a)
                shells.append(n)
    return gamma, np.array(ks), np.array(ws), np.array(shells)


class Instance:
    def __init__(self, lam=8.0, kappa=1.0, n_steps=6, m=1.0, mu=2.0, b_max=2, radial_order=1,
                 p=(0.0, 0.0, 0.2)):
        self.m, self.mu, self.b_max, self.n_steps = m, mu, b_max, n_steps
        self.gamma, self.k, self.w, self.shell = build_modes(lam, kappa, n_steps, radial_order)
        self.omega = np.sqrt((self.k**2).sum(1) + mu * mu)
        self.rho = RHO_PREFACTOR / np.sqrt(2.0 * self.omega)
        self.p = np.array(p, float)

    def states(self, scale):
        active = [j for j in range(len(self.w)) if self.shell[j] <= scale]
        out = [()]
        for b in range(1, self.b_max + 1):
            out += list(itertools.combinations_with_replacement(active, b))
        return out

    def hamiltonian(self, n, g, scale, p=None):
        p = self.p if p is None else np.asarray(p, float)
        st = self.states(scale)
        index = {s: i for i, s in enumerate(st)}
        h = np.zeros((len(st), len(st)))
        for i, s in enumerate(st):
            pf = self.k[list(s)].sum(0) if s else np.zeros(3)
            h[i, i] = math.sqrt(((p - pf) ** 2).sum() + self.m**2) + self.omega[list(s)].sum()
            if len(s) < self.b_max:
                for j in range(len(self.w)):
                    if self.shell[j] <= n:
                        t = tuple(sorted(s + (j,)))
                        v = g * math.sqrt(self.w[j]) * self.rho[j] * math.sqrt(s.count(j) + 1)
                        h[i, index[t]] = h[index[t], i] = v
        return st, h

    def velocity(self, st, psi, p=None):
        p = self.p if p is None else np.asarray(p, float)
        v = np.zeros(3)
        for i, s in enumerate(st):
            q = p - (self.k[list(s)].sum(0) if s else np.zeros(3))
            v += psi[i] ** 2 * q / math.sqrt((q**2).sum() + self.m**2)
        return v / (psi @ psi)

    def raise_mode(self, st, psi, j):
        index = {s: i for i, s in enumerate(st)}
        y = np.zeros(len(st))
        for i, s in enumerate(st):
            if len(s) < self.b_max and psi[i] != 0.0:
                y[index[tuple(sorted(s + (j,)))]] += psi[i] * math.sqrt(s.count(j) + 1)
        return y

    def ladder(self, g):
        """Energies, gaps, projected norms, alpha, delta E and final velocity per scale."""
        rows = []
        chain = np.ones(1)
        st_prev = self.states(0)
        for n in range(0, self.n_steps + 1):
            st, h = self.hamiltonian(n, g, n)
            e, v = np.linalg.eigh(h)
            emb = np.zeros(len(st))
            index = {s: i for i, s in enumerate(st)}
            for i, s in enumerate(st_prev):
                emb[index[s]] = chain[i]
            ground = v[:, 0]
            chain = ground * (ground @ emb)
            row = {"n": n, "E": e[0], "gap": (e[1] - e[0]) if len(e) > 1 else None,
                   "norm_sq": chain @ chain, "basis_size": len(st)}
            if n > 0:
                _, hp = self.hamiltonian(n - 1, g, n)
                ep, vp = np.linalg.eigh(hp)
                psi = vp[:, 0]
                a = hp - ep[0] * np.eye(len(st))
                alpha = de = 0.0
                for j in np.nonzero(self.shell == n)[0]:
                    y = self.raise_mode(st, psi, j)
                    x = np.linalg.lstsq(a, y, rcond=None)[0]
                    wr2 = self.w[j] * self.rho[j] ** 2
                    alpha += wr2 * (x @ x)
                    de += g * g * wr2 * (y @ x)
                row["alpha"], row["delta_e"] = alpha, de
            rows.append(row)
            st_prev = st
        return rows, self.velocity(st, ground)

    def free_closed_forms(self, p=None):
        """g = 0 reference: per-shell alpha, second-order shift coefficient and one-boson gap."""
        p = self.p if p is None else np.asarray(p, float)
        e0 = math.sqrt(p @ p + self.m**2)
        den = np.sqrt(((p - self.k) ** 2).sum(1) + self.m**2) + self.omega - e0
        wr2 = self.w * self.rho**2
        alpha = [float((wr2 / den**2)[self.shell == n].sum()) for n in range(1, self.n_steps + 1)]
        shift = [float((wr2 / den)[self.shell == n].sum()) for n in range(1, self.n_steps + 1)]
        gap = [float(den[self.shell <= n].min()) for n in range(1, self.n_steps + 1)]
        return {"alpha": alpha, "shift_over_g2": shift, "gap": gap,
                "s_total": float((wr2 / self.omega).sum())}


def main():
    out = {}
    desk = Instance()
    out["desk_mode_count"] = len(desk.w)
    out["desk_basis_sizes"] = [len(desk.states(n)) for n in range(0, 7)]
    for g in (0.03, 0.01):
        rows, vel = desk.ladder(g)
        out[f"desk_g{g}"] = {"rows": rows, "velocity": vel.tolist()}
    out["desk_free"] = desk.free_closed_forms()

    # two-shell instance for the linear-algebra oracle (projector and resolvent)
    small = Instance(lam=4.0, n_steps=2, b_max=2)
    st, h = small.hamiltonian(2, 0.5, 2)
    st1, h1 = small.hamiltonian(1, 0.5, 2)
    e, v = np.linalg.eigh(h1)
    start = np.array([math.sin(1.0 + 0.7 * i) for i in range(len(st))])
    out["small"] = {
        "basis_size": len(st),
        "E_scale2": float(np.linalg.eigh(h)[0][0]),
        "E_prev": float(e[0]), "gap_prev": float(e[1] - e[0]),
        "projection_of_sin_start": (v[:, 0] * (v[:, 0] @ start)).tolist(),
        "resolvent_at_E_minus_half": np.linalg.solve(h1 - (e[0] - 0.5) * np.eye(len(st)), start).tolist(),
    }
    print(json.dumps(out, indent=1, default=float))


if __name__ == "__main__":
    main()
