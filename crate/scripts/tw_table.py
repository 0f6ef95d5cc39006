#!/usr/bin/env python3
"""Regenerate the embedded Tracy-Widom CDF tables.

The CDF is evaluated as a Fredholm determinant on L2(s, inf), discretised
with Gauss-Legendre quadrature (Nystrom method):

    F1(s) = det(I - K1),  K1(x, y) = Ai((x + y) / 2) / 2
    F2(s) = det(I - KAi), KAi(x, y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)

log det is taken as sum(log1p(-mu)) over the eigenvalues of the symmetric
Nystrom matrix so that the upper tail keeps relative precision.

As an independent check, the Hastings-McLeod solution of Painleve II
(q'' = s q + 2 q^3, q ~ Ai at +inf) is integrated backwards and

    F2(s) = exp(-int_s^inf (x - s) q(x)^2 dx)
    F1(s) = exp(-1/2 int_s^inf q(x) dx) * sqrt(F2(s))

is compared against the determinant values at a set of probe points.

Usage:
    python3 scripts/tw_table.py            # writes crates/core/data/tw_beta{1,2}.csv
    python3 scripts/tw_table.py --check    # cross-check only, print quantiles
"""

import argparse
import os
import sys

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq
from scipy.special import airy

NODES = 160
STEP = 0.01
# beta -> (x_min, x_max); right endpoints chosen so that 1 - F(x_max) < 1e-9
# while adjacent table values stay distinct in double precision.
RANGES = {1: (-10.0, 10.0), 2: (-10.0, 6.0)}


def log_cdf(s, beta, m=NODES):
    if beta == 1:
        length = max(2.0 * (16.0 - s), 12.0)
    else:
        length = max(16.0 - s, 8.0)
    t, w = leggauss(m)
    x = (t + 1.0) * length / 2.0
    w = w * length / 2.0
    sw = np.sqrt(w)
    if beta == 1:
        k = 0.5 * airy((x[:, None] + x[None, :]) / 2.0 + s)[0]
    else:
        ai, aip, _, _ = airy(x + s)
        diff = x[:, None] - x[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / diff
        k[np.diag_indices(m)] = aip**2 - (x + s) * ai**2
    a = sw[:, None] * k * sw[None, :]
    mu = np.linalg.eigvalsh(0.5 * (a + a.T))
    return float(np.sum(np.log1p(-mu)))


def cdf(s, beta):
    return float(np.exp(log_cdf(s, beta)))


def painleve_cdf(points, s0=8.0):
    """F1 and F2 at `points` from the Painleve II representation."""
    ai, aip, _, _ = airy(s0)
    # u = int_s^inf q^2, w = int_s^inf (x - s) q^2 = int_s^inf u, v = int_s^inf q
    u0 = aip**2 - s0 * ai**2
    w0 = (2.0 * s0**2 * ai**2 - 2.0 * s0 * aip**2 - ai * aip) / 3.0
    v0 = quad(lambda x: airy(x)[0], s0, np.inf, epsabs=1e-16, epsrel=1e-14)[0]

    def rhs(s, y):
        q, dq, u, w, v = y
        return [dq, s * q + 2.0 * q**3, -(q**2), -u, -q]

    pts = sorted(points, reverse=True)
    sol = solve_ivp(rhs, (s0, min(pts)), [ai, aip, u0, w0, v0], method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True)
    out = {}
    for s in points:
        _, _, _, w, v = sol.sol(s)
        f2 = np.exp(-w)
        out[s] = (float(np.exp(-0.5 * v) * np.sqrt(f2)), float(f2))
    return out


def quantile(alpha, beta):
    return brentq(lambda s: cdf(s, beta) - (1.0 - alpha), -8.0, 8.0, xtol=1e-13)


def check():
    probes = [-3.0, -2.0, -1.2065, 0.0, 1.0, 2.0, 3.0]
    pii = painleve_cdf(probes)
    worst = 0.0
    for s in probes:
        f1, f2 = cdf(s, 1), cdf(s, 2)
        p1, p2 = pii[s]
        worst = max(worst, abs(f1 - p1), abs(f2 - p2))
        print(f"s={s:+.4f}  F1 det={f1:.12f} pii={p1:.12f}  F2 det={f2:.12f} pii={p2:.12f}")
    print(f"max |det - painleve| = {worst:.3e}")
    for beta in (1, 2):
        for alpha in (0.1, 0.05, 0.01, 0.005, 0.001):
            print(f"beta={beta} alpha={alpha}: s = {quantile(alpha, beta):.10f}")
    return worst


def write_tables(out_dir):
    for beta, (lo, hi) in RANGES.items():
        count = int(round((hi - lo) / STEP)) + 1
        grid = [lo + i * STEP for i in range(count)]
        values = [cdf(x, beta) for x in grid]
        for a, b in zip(values, values[1:]):
            if not b > a:
                sys.exit(f"beta={beta}: table not strictly increasing")
        if not (values[0] < 1e-9 and values[-1] > 1.0 - 1e-9):
            sys.exit(f"beta={beta}: table does not cover the tails")
        path = os.path.join(out_dir, f"tw_beta{beta}.csv")
        with open(path, "w") as fh:
            fh.write("x,cdf\n")
            for x, f in zip(grid, values):
                fh.write(f"{x:.2f},{f:.17e}\n")
        print(f"wrote {path} ({count} rows)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true")
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "crates", "core", "data"))
    args = parser.parse_args()
    worst = check()
    if worst > 1e-9:
        sys.exit("determinant and Painleve II routes disagree")
    if not args.check:
        write_tables(args.out)


if __name__ == "__main__":
    main()
