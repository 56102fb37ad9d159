#!/usr/bin/env python3
"""Golden values of the spherical function phi_s(r) = P_{-1/2+is}(cosh r).

Conical (Mehler) Legendre function from mpmath at 40 digits, cross-checked
against the circle integral. Writes tests/fixtures/spherical_golden.txt.
"""
import pathlib

import mpmath as mp

mp.mp.dps = 40

S_VALUES = ["0", "0.25", "0.5", "1", "2", "5", "8"]
R_VALUES = ["0.01", "0.5", "1", "2", "3", "5", "8", "12"]


def legendre(s, r):
    v = mp.legenp(mp.mpf(-0.5) + 1j * s, 0, mp.cosh(r), type=3)
    if abs(mp.im(v)) > mp.mpf(10) ** -30 * max(1, abs(v)):
        raise RuntimeError(f"complex Legendre value at s={s} r={r}")
    return mp.re(v)


def circle(s, r):
    def integrand(t):
        x = mp.exp(-r) + 2 * mp.sinh(r) * mp.sin(t / 2) ** 2
        return mp.cos(s * mp.log(x)) / mp.sqrt(x)

    pts = [0] + [mp.pi * mp.mpf(2) ** -k for k in range(int(2 * r) + 4, 0, -1)] + [mp.pi]
    return mp.quad(integrand, pts) / mp.pi


def main():
    out = pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "spherical_golden.txt"
    lines = ["# s r phi_s(r) tol; tolerance is relative to max(|phi|, exp(-r/2))"]
    for s in map(mp.mpf, S_VALUES):
        for r in map(mp.mpf, R_VALUES):
            v = legendre(s, r)
            if r <= 5:
                c = circle(s, r)
                if abs(c - v) > mp.mpf(10) ** -20 * max(abs(v), mp.exp(-r / 2)):
                    raise RuntimeError(f"oracle mismatch at s={s} r={r}: {v} vs {c}")
            lines.append(f"{mp.nstr(s, 6)} {mp.nstr(r, 6)} {mp.nstr(v, 20)} 1e-12")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} values to {out}")


if __name__ == "__main__":
    main()
