"""Generate the RE21 (four-bar truss) Pareto set and front.

x3 sits at its lower bound on the whole front (it only raises f1 and f2).
f1 is linear and f2 is convex and separable in x1, x2, x4, so the front is
convex and minimising f1 + c * f2 for c > 0 traces all of it; each coordinate's
minimiser is the unconstrained root clipped to its box.

Writes ps_RE21.txt, ref_front_RE21.txt and bounds_RE21.txt into the data dir.
"""

import argparse
import pathlib

import numpy as np

F, SIGMA, L, E = 10.0, 10.0, 200.0, 2.0e5
A = F / SIGMA
LOWER = np.array([A, np.sqrt(2.0) * A, np.sqrt(2.0) * A, A])
UPPER = np.full(4, 3.0 * A)


def objectives(x):
    x1, x2, x3, x4 = x.T
    r2 = np.sqrt(2.0)
    f1 = L * (2 * x1 + r2 * x2 + np.sqrt(x3) + x4)
    f2 = (F * L / E) * (2 / x1 + 2 * r2 / x2 - 2 * r2 / x3 + 2 / x4)
    return np.stack([f1, f2], axis=1)


def pareto_set(c):
    c = np.asarray(c)[:, None]
    # d/dx of f1 + c f2 set to zero, coordinate by coordinate.
    roots = np.hstack([
        np.sqrt(c * F / E),
        np.sqrt(2 * c * F / E),
        np.zeros_like(c),
        np.sqrt(2 * c * F / E),
    ])
    x = np.clip(roots, LOWER, UPPER)
    x[:, 2] = LOWER[2]
    return x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--points", type=int, default=2000)
    args = ap.parse_args()

    c = np.geomspace(1e3, 1e6, 200001)
    xs = pareto_set(c)
    fs = objectives(xs)
    ideal, nadir = fs.min(axis=0), fs.max(axis=0)

    # Even spacing along the normalized front.
    z = (fs - ideal) / (nadir - ideal)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(z, axis=0), axis=1))])
    targets = np.linspace(0.0, arc[-1], args.points)
    c_even = np.exp(np.interp(targets, arc, np.log(c)))
    ps = pareto_set(c_even)
    pf = objectives(ps)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = "RE21 four-bar truss, generated by tools/gen_re21_front.py"
    np.savetxt(out / "ps_RE21.txt", ps, fmt="%.17g", header=header)
    np.savetxt(out / "ref_front_RE21.txt", pf, fmt="%.17g", header=header)
    np.savetxt(out / "bounds_RE21.txt", np.vstack([ideal, nadir]), fmt="%.17g",
               header=header + "\nideal\nnadir")


if __name__ == "__main__":
    main()
