"""Regenerates tests/data/e1_series.txt.

E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), summed in 80-digit
arithmetic so the alternating series stays exact up to x = 30.
"""
import mpmath as mp

mp.mp.dps = 80


def e1_series(x):
    x = mp.mpf(x)
    total = mp.mpf(0)
    term = mp.mpf(1)
    k = 1
    while True:
        term *= -x / k
        add = term / k
        total += add
        if abs(add) < mp.mpf(10) ** -70 * max(1, abs(total)):
            break
        k += 1
    return -mp.euler - mp.log(x) - total


if __name__ == "__main__":
    n = 61
    for i in range(n):
        x = mp.mpf(10) ** (-6 + (mp.log10(30) + 6) * i / (n - 1))
        xs = mp.nstr(x, 17, strip_zeros=False)
        v = e1_series(mp.mpf(xs))
        assert abs(v - mp.e1(mp.mpf(xs))) < mp.mpf(10) ** -40 * v
        print(xs, mp.nstr(v, 20, strip_zeros=False))
