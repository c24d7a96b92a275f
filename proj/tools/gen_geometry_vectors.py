#!/usr/bin/env python3
"""Reference values for the Poincare-ball kernel, evaluated in 50-digit
arithmetic with mpmath. Writes one JSON object per line:
{"op": ..., "c": ..., <inputs>, "expected": ...}.

Usage: gen_geometry_vectors.py OUT.jsonl
"""

import json
import random
import sys

import mpmath as mp

mp.mp.dps = 50


def norm(v):
    return mp.sqrt(sum(x * x for x in v))


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def mobius_add(x, y, c):
    xy, x2, y2 = dot(x, y), dot(x, x), dot(y, y)
    num_x = 1 + 2 * c * xy + c * y2
    num_y = 1 - c * x2
    den = 1 + 2 * c * xy + c * c * x2 * y2
    return [(num_x * a + num_y * b) / den for a, b in zip(x, y)]


def scalar_mul(r, x, c):
    n = norm(x)
    sc = mp.sqrt(c)
    return [mp.tanh(r * mp.atanh(sc * n)) * a / (sc * n) for a in x]


def matvec(m, rows, cols, x, c):
    mx = [sum(m[i * cols + j] * x[j] for j in range(cols)) for i in range(rows)]
    nx, nmx = norm(x), norm(mx)
    sc = mp.sqrt(c)
    f = mp.tanh(nmx / nx * mp.atanh(sc * nx)) / (sc * nmx)
    return [f * a for a in mx]


def exp0(v, c):
    n = norm(v)
    sc = mp.sqrt(c)
    return [mp.tanh(sc * n) * a / (sc * n) for a in v]


def log0(x, c):
    n = norm(x)
    sc = mp.sqrt(c)
    return [mp.atanh(sc * n) * a / (sc * n) for a in x]


def distance(x, y, c):
    sc = mp.sqrt(c)
    return 2 / sc * mp.atanh(sc * norm(mobius_add([-a for a in x], y, c)))


def ball_point(rng, dim, c, frac):
    v = [rng.gauss(0, 1) for _ in range(dim)]
    n = sum(a * a for a in v) ** 0.5
    r = rng.uniform(0.0, frac) / c ** 0.5
    return [a / n * r for a in v]


def out(x):
    return [float(a) for a in x]


def main():
    rng = random.Random(20240611)
    lines = []
    for c in (0.5, 1.0, 2.0):
        for _ in range(40):
            dim = rng.randint(2, 5)
            x = ball_point(rng, dim, c, 0.95)
            y = ball_point(rng, dim, c, 0.95)
            mc = mp.mpf(c)
            xm, ym = [mp.mpf(a) for a in x], [mp.mpf(a) for a in y]
            lines.append({"op": "mobius_add", "c": c, "x": x, "y": y, "expected": out(mobius_add(xm, ym, mc))})
            r = rng.uniform(-3.0, 3.0)
            lines.append({"op": "mobius_scalar_mul", "c": c, "r": r, "x": x,
                          "expected": out(scalar_mul(mp.mpf(r), xm, mc))})
            rows = rng.randint(2, 5)
            m = [rng.uniform(-1.0, 1.0) for _ in range(rows * dim)]
            lines.append({"op": "mobius_matvec", "c": c, "m": m, "rows": rows, "cols": dim, "x": x,
                          "expected": out(matvec([mp.mpf(a) for a in m], rows, dim, xm, mc))})
            v = [rng.uniform(-2.0, 2.0) for _ in range(dim)]
            lines.append({"op": "exp_map_origin", "c": c, "v": v,
                          "expected": out(exp0([mp.mpf(a) for a in v], mc))})
            lines.append({"op": "log_map_origin", "c": c, "x": x, "expected": out(log0(xm, mc))})
            lines.append({"op": "distance", "c": c, "x": x, "y": y, "expected": float(distance(xm, ym, mc))})
    with open(sys.argv[1], "w") as f:
        for line in lines:
            f.write(json.dumps(line) + "\n")


if __name__ == "__main__":
    main()
