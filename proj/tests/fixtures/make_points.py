"""Writes builtin_points.txt: constraint values of every built-in at 5 pinned points.

Formulas are transcribed independently of the problem files. Run from this
directory: python3 make_points.py
"""

ex1 = [
    lambda F, Q: -25 + Q * (1 / F - 0.5) + 10 / F,
    lambda F, Q: -190 + 10 / F + Q / F,
    lambda F, Q: -270 + 250 / F + Q / F,
    lambda F, Q: 260 - 250 / F - Q / F,
]

PROBLEMS = {
    "ex1": (["F_H1", "Q_c"], [(1, 1.8), (0, 300)], ex1),
    "ex1-trimmed": (["F_H1", "Q_c"], [(1, 1.8), (0, 300)], ex1 + [lambda F, Q: 1.7 - F]),
    "ex1-trimmed-prose": (["F_H1", "Q_c"], [(1, 1.8), (0, 300)], ex1 + [lambda F, Q: F - 1.7]),
    "ex2": (["theta1", "theta2"], [(-6, 6), (-4, 42)], [
        lambda a, b: b + a**2 - a - 40,
        lambda a, b: a**2 + a - b - 2,
        lambda a, b: b - 4 * a - 30,
    ]),
    "ex3": (["theta1", "theta2"], [(-10, 10), (-15, 15)], [
        lambda a, b: b - 2 * a - 15,
        lambda a, b: a**2 / 2 + 4 * a - 5 - b,
        lambda a, b: b * (6 + a) - 80,
        lambda a, b: 10 - (a - 4) ** 2 / 5 - 2 * b**2,
    ]),
    "ex4": (["theta1", "theta2"], [(-2, 2), (-1, 1)], [
        lambda a, b: 4 * a**2 - 2.1 * a**4 + a**6 / 3 + a * b - 4 * b**2 + 4 * b**4,
        lambda a, b: 2 * a - b - 3,
        lambda a, b: -0.8 * a + b - 1.8,
    ]),
    "ex5": (["theta", "z"], [(1, 2), (-20, 20)], [
        lambda t, z: -z + t,
        lambda t, z: z - 2 * t + 2 - 0.5,
    ]),
    "ex6": (["theta", "z"], [(1, 2), (-20, 20)], [
        lambda t, z: -z + t,
        lambda t, z: z - 2 * t + 2 - 1,
        lambda t, z: -z + 6 * t - 9 * 1,
    ]),
    "ex7": (["theta1", "theta2", "theta3", "z"], [(0, 4), (0, 4), (0, 4), (-100, 100)], [
        lambda a, b, c, z: -z - a + 0.5 * b**2 + 2.0 * c**2 + 3 - 3 * 1 - 8,
        lambda a, b, c, z: -z - a / 3 - b - c / 3 + 1 + 8 / 3,
        lambda a, b, c, z: z + a * a - b - 3 + c - 4,
    ]),
}

FRACTIONS = [
    [0.1, 0.9, 0.35, 0.6],
    [0.25, 0.5, 0.75, 0.45],
    [0.5, 0.125, 0.2, 0.52],
    [0.7, 0.3, 0.95, 0.49],
    [0.95, 0.65, 0.05, 0.55],
]

with open("builtin_points.txt", "w") as out:
    out.write("# name | point | g values in declaration order\n")
    for name, (names, box, fs) in PROBLEMS.items():
        for frac in FRACTIONS:
            x = [lo + f * (hi - lo) for (lo, hi), f in zip(box, frac)]
            point = ",".join(f"{n}={v!r}" for n, v in zip(names, x))
            values = ",".join(repr(float(f(*x))) for f in fs)
            out.write(f"{name} | {point} | {values}\n")
