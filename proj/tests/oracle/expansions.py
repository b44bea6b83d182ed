"""Reference expansions computed with sympy rational functions.

Each exchange x_k' = (P + N) / x_k is carried out in the field of rational
functions and cancelled, so nothing here shares code or algorithms with the
C++ engine. d-vectors come from the reduced denominator (x = f / x^d with no
x_j dividing f), not from minimal exponents.

Usage: python3 expansions.py > ../fixtures/expansions.json
"""
import json
import sys

import sympy as sp


def mutate_matrix(b, k):
    rows, cols = len(b), len(b[0])
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            if i == k or j == k:
                out[i][j] = -b[i][j]
            else:
                out[i][j] = b[i][j] + b[i][k] * max(-b[k][j], 0) + max(b[i][k], 0) * b[k][j]
    return out


def canonical_text(expr, xs):
    """Grammar of the C++ to_string: ascending lex order of exponent vectors."""
    expr = sp.expand(expr)
    if expr == 0:
        return "0"
    terms = []
    for t in sp.Add.make_args(expr):
        coeff, rest = t.as_coeff_Mul()
        powers = rest.as_powers_dict() if rest != 1 else {}
        exps = tuple(int(powers.get(x, 0)) for x in xs)
        terms.append((exps, int(coeff)))
    terms.sort()
    out = ""
    for idx, (exps, c) in enumerate(terms):
        factors = []
        for i, e in enumerate(exps):
            if e == 0:
                continue
            factors.append(f"x{i + 1}" + ("" if e == 1 else f"^{e}"))
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        if idx == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out


def denominator_vector(expr, xs, n):
    _, den = sp.fraction(sp.cancel(sp.together(expr)))
    powers = sp.factor(den).as_powers_dict()
    d = []
    num, _ = sp.fraction(sp.cancel(sp.together(expr)))
    for j in range(n):
        dj = int(powers.get(xs[j], 0))
        if dj == 0:
            # x_j may instead divide the numerator: d_j is then negative.
            e = 0
            q = num
            while sp.simplify(q.subs(xs[j], 0)) == 0:
                q = sp.cancel(q / xs[j])
                e += 1
            dj = -e
        d.append(dj)
    return d


def run(name, b, walk):
    n = len(b[0])
    arity = len(b)
    xs = sp.symbols(f"x1:{arity + 1}")
    cluster = list(xs[:n])
    vertices = []

    def record(path):
        vertices.append({
            "path": path,
            "matrix": [row[:] for row in b_cur],
            "vars": [canonical_text(v, xs) for v in cluster],
            "dvectors": [denominator_vector(v, xs, n) for v in cluster],
        })

    b_cur = [row[:] for row in b]
    record([])
    for step, k1 in enumerate(walk):
        k = k1 - 1
        pos = sp.Integer(1)
        neg = sp.Integer(1)
        for j in range(arity):
            var = cluster[j] if j < n else xs[j]
            if b_cur[j][k] > 0:
                pos *= var ** b_cur[j][k]
            elif b_cur[j][k] < 0:
                neg *= var ** (-b_cur[j][k])
        cluster[k] = sp.cancel((pos + neg) / cluster[k])
        b_cur = mutate_matrix(b_cur, k)
        record(walk[: step + 1])
    return {"name": name, "B": b, "walk": walk, "vertices": vertices}


CASES = [
    ("A2", [[0, 1], [-1, 0]], [1, 2, 1, 2, 1]),
    ("A2 principal", [[0, 1], [-1, 0], [1, 0], [0, 1]], [1, 2, 1, 2, 1]),
    ("B2", [[0, 1], [-2, 0]], [1, 2, 1, 2, 1, 2]),
    ("G2", [[0, 1], [-3, 0]], [1, 2, 1, 2, 1, 2, 1, 2]),
    ("Kronecker", [[0, 2], [-2, 0]], [1, 2, 1, 2]),
    ("A3", [[0, 1, 0], [-1, 0, 1], [0, -1, 0]], [1, 2, 3, 1, 2]),
    ("Markov", [[0, 2, -2], [-2, 0, 2], [2, -2, 0]], [1, 2, 3, 1]),
    ("C3 with coefficients", [[0, 1, 0], [-1, 0, 2], [0, -1, 0], [1, -1, 2]], [2, 1, 3, 2]),
]


def main():
    cases = [run(*c) for c in CASES]
    json.dump({"cases": cases}, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
