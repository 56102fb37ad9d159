#!/usr/bin/env python3
"""Derives the Plancherel constant c_P of the inverse spherical transform.

The transform of H(1, .) is c_H e^{-(s^2+1/4)} with c_H = 1 (the transform
at s = i/2 is the total mass, which is 1). Evaluating the inverse at r = 0
gives H(1, 0) = c_P \\int_0^inf e^{-(s^2+1/4)} s tanh(pi s) ds, so
c_P = H(1, 0) / that integral. H(1, 0) comes from the McKean integral.
"""
import mpmath as mp

mp.mp.dps = 40


def heat_kernel_origin(t):
    # H(t, 0) = sqrt2 e^{-t/4} / (4 pi t)^{3/2} \int_0^inf s e^{-s^2/4t} / sqrt(cosh s - 1) ds
    pref = mp.sqrt(2) * mp.exp(-t / 4) / (4 * mp.pi * t) ** mp.mpf(1.5)
    f = lambda s: s * mp.exp(-s * s / (4 * t)) / (mp.sqrt(2) * mp.sinh(s / 2))
    return pref * mp.quad(f, [0, 1, 4, 16, 64])


def main():
    h = heat_kernel_origin(mp.mpf(1))
    den = mp.quad(lambda s: mp.exp(-(s * s + mp.mpf(1) / 4)) * s * mp.tanh(mp.pi * s), [0, 2, 6, mp.inf])
    c_p = h / den
    print(f"H(1,0)      = {mp.nstr(h, 25)}")
    print(f"density int = {mp.nstr(den, 25)}")
    print(f"c_P         = {mp.nstr(c_p, 25)}")
    print(f"1/(2 pi)    = {mp.nstr(1 / (2 * mp.pi), 25)}")
    print(f"c_P as double: {float(c_p)!r}")


if __name__ == "__main__":
    main()
