"""Independent brute-force / bisection oracles used to freeze golden values
in the C++ tests. Run: python3 tests/oracles/oracles.py"""
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar


def bisect(f, lo, hi, iters=400):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def u(z, eta):
    return math.log(z) if eta == 1 else (z ** (1 - eta) - 1) / (1 - eta)


print("== prosumer direct response grid search (eta=1, C=1, Z=1000) ==")
for lam in (2.0, 0.5):
    s = np.arange(1 - 1000, 1 + 1e-12, 1e-4)
    s = s[1 - s > 0]
    obj = lam * s + np.log(1 - s)
    best = s[np.argmax(obj)]
    print(f"lambda={lam}: x-d={best:.4f}")

print("== participation bound eta=1 C=3 lambda=p=2 ==")
print(f"bound={2*2.5+math.log(0.5)-math.log(3):.10f}")
print(f"P*(C=2,lam=1)={1+math.log(1)-math.log(2):.10f}")

print("== single-node benchmark, reference scenario ==")
lam = bisect(lambda l: l - (2 * 0.01 * (100 - 50 + 1 / l) + 1), 1, 10)
print(f"lambda={lam:.15f} closed={1+math.sqrt(1.02):.15f} x-d={50-1/lam:.12f} y={50+1/lam:.12f}")
W = math.log(1 / lam) - (0.01 * (50 + 1 / lam) ** 2 + (50 + 1 / lam))
print(f"welfare={W:.12f}")

print("== no-DER C=0 ==")
lam = bisect(lambda l: l - (0.02 * (100 + 1 / l) + 1), 1, 10)
print(f"lambda={lam:.12f}")

print("== one-part price C=4 eta=2 lambda=1 ==")
p = bisect(lambda p: -p + 2 * 4 * p ** 1.5 - 1, 4 ** -2, 1)
grid = np.linspace(1e-6, 1, 1_000_001)
prof = (1 - grid) * np.maximum(4 - grid ** -0.5, 0)
print(f"p*={p:.12f} grid argmax={grid[np.argmax(prof)]:.6f}")

print("== one-part dispatch, reference scenario ==")
def one_part(C, D=100.0, a=0.01, b=1.0):
    if C == 0:
        return 0.0, a * D * D + b * D
    g = lambda x: C / (C - x) ** 2 - (2 * a * (D - x) + b)
    hi = min(C, D) * (1 - 1e-15)
    x = 0.0 if g(0) >= 0 else bisect(g, 0.0, hi)
    y = D - x
    return x, a * y * y + b * y + x / (C - x)
x, cost = one_part(50)
print(f"x*={x:.12f} y={100-x:.12f} cost={cost:.12f}")
# brute-force confirmation by minimizing the cost directly
r = minimize_scalar(lambda x: 0.01 * (100 - x) ** 2 + (100 - x) + x / (50 - x),
                    bounds=(0, 49.999), method="bounded", options={"xatol": 1e-12})
print(f"direct min x={r.x:.9f}")

print("== PoAg sweep (opportunity-cost normalisation) ==")
def efficient(C, D=100.0, a=0.01, b=1.0, n_pros=1):
    # single node, n identical log-utility prosumers: consumption z = 1/lam each
    f = lambda l: l - (2 * a * (D - n_pros * (C - min(1 / l, 1000.0))) + b)
    lam = bisect(f, 1e-6, 100)
    z = min(1 / lam, 1000.0)
    y = D - n_pros * (C - z)
    W = n_pros * math.log(z) - (a * y * y + b * y)
    return lam, C - z, y, W
prev = None
for C in np.linspace(0, 100, 51):
    lam, s, y, W = efficient(C)
    if C == 0:
        poag = 1.0
    else:
        xo, co = one_part(C)
        ca = 0.01 * y * y + y + math.log(C) - math.log(C - s)
        poag = co / ca
    if C in (2, 50, 100) or (prev is not None and poag < prev - 1e-9):
        print(f"C={C:.0f} lam={lam:.10f} W={W:.10f} poag={poag:.12f}")
    prev = poag
print("== efficient welfare at C=0 with one and two prosumers ==")
from scipy.optimize import brentq as _brentq
for n in (1, 2):
    lam0 = _brentq(lambda l: 2 * 0.01 * (100 + n / l) + 1 - l, 1, 10)
    y0 = 100 + n / lam0
    print(f"prosumers={n} lambda={lam0:.12f} W={n * math.log(1 / lam0) - (0.01 * y0 * y0 + y0):.10f}")

print("done")
