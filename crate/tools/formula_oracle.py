"""High-precision reference values for the cost formulas.

Independent of the Rust code: evaluates every expression with mpmath at
60 significant digits and locates crossovers by the same doubling + 1% scan.
Run: python3 tools/formula_oracle.py
"""
from mpmath import mp, mpf, log, ceil, floor

mp.dps = 60
LOG2 = lambda x: log(x, 2)


def f_terms(n):
    m = 3 * n
    lm = LOG2(m)
    q = m ** mpf("0.25")
    inner = 2 * q + 220 * lm + 2 * q + mpf(1) / 2 * lm * lm * q * 3200 * lm
    return LOG2(m / (60 * lm)), inner


def f(n):
    c = ceil(LOG2(n))
    a, b = f_terms(n)
    return c * (c + 1) / 2 * a * b


def f_dist(n):
    a, b = f_terms(n)
    return ceil(LOG2(n)) * a * b


def h(n):
    return 800 * LOG2(n) ** 6 * n ** mpf("0.25")


def g(n):
    return 20 * n ** (mpf(1) / 3) * LOG2(n) ** 4


def mem_q(n, w=1):
    return 720 * n ** mpf("1.75") * LOG2(n) * LOG2(n * w)


def mem_t(n, w=1):
    return 2 * n ** 2 * LOG2(n) * LOG2(n * w)


def mem_c(n, w=1):
    return 4 * n ** (mpf(4) / 3) * LOG2(n) * LOG2(n * w) + n * LOG2(n) * LOG2(n * w)


def crossover(lhs, rhs, step=mpf("1.01")):
    x = mpf(2) ** 10
    prev = None
    while not lhs(x) < rhs(x):
        prev = x
        x *= 2
    y = prev
    while not lhs(y) < rhs(y):
        y *= step
    return y


if __name__ == "__main__":
    for n in [mpf(2) ** 12, mpf(10) ** 18, mpf(2.6e11), mpf(2) ** 40]:
        print("n=%s f=%s h=%s g=%s fd=%s" % (mp.nstr(n, 8), mp.nstr(f(n), 15), mp.nstr(h(n), 15), mp.nstr(g(n), 15), mp.nstr(f_dist(n), 15)))
    ident = lambda n: n
    print("cross h", mp.nstr(crossover(h, ident), 15))
    print("cross f", mp.nstr(crossover(f, ident), 15))
    print("cross f_dist", mp.nstr(crossover(f_dist, ident), 15))
    print("cross g", mp.nstr(crossover(g, ident), 15))
    print("cross log f", mp.nstr(crossover(lambda n: LOG2(n) * f(n), ident), 15))
    print("cross log g", mp.nstr(crossover(lambda n: LOG2(n) * g(n), ident), 15))
    print("cross mem", mp.nstr(crossover(mem_q, mem_t), 15))
    # first power of two from which f >= h holds on every power up to 2^80
    bad = [k for k in range(10, 81) if f(mpf(2) ** k) < h(mpf(2) ** k)]
    print("f<h at 2^k for k in", bad)
