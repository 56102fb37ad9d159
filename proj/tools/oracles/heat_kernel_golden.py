#!/usr/bin/env python3
"""Reference values of the hyperbolic-plane heat kernel H(t, d).

Evaluates the defining integral directly in arbitrary precision, with
mpmath's tanh-sinh quadrature absorbing the inverse square-root endpoint
singularity (no change of variables shared with the C++ code).

Usage: heat_kernel_golden.py > tests/fixtures/heat_kernel_golden.txt
"""
import mpmath as mp

mp.mp.dps = 40

T_VALUES = ["0.1", "0.5", "1", "2", "5", "10"]
D_VALUES = ["0", "0.25", "0.5", "1", "2", "3", "5", "8"]
TOL = "1e-12"


def heat_kernel(t, d):
    t = mp.mpf(t)
    d = mp.mpf(d)

    # Integrate in v = s - d so nodes near the singular endpoint keep full
    # relative precision; cosh s - cosh d = 2 sinh(d + v/2) sinh(v/2).
    def integrand(v):
        if v <= 0:
            return mp.mpf(0)
        s = d + v
        # e^{-s^2/4t} = e^{-d^2/4t} e^{-v(2d+v)/4t}; the first factor is
        # applied outside so mpmath's absolute stopping rule sees O(1) values.
        return s * mp.exp(-v * (2 * d + v) / (4 * t)) / mp.sqrt(2 * mp.sinh(d + v / 2) * mp.sinh(v / 2))

    # Near v = 0 the integrand decays on the scale 2t/d; geometric
    # breakpoints run from there to the Gaussian cutoff.
    scale = min(mp.mpf(1), 2 * t / max(d, mp.mpf("1e-3")))
    top = 40 * mp.sqrt(t) + 10
    pts = [mp.mpf(0)]
    w = scale / 64
    while w < top:
        pts.append(w)
        w *= 2
    pts.append(top)
    val, err = mp.quad(integrand, pts, error=True, maxdegree=10)
    if err > mp.mpf("1e-14") * abs(val):
        raise RuntimeError(f"oracle quadrature inaccurate at t={t}, d={d}: {err}")
    return mp.sqrt(2) / (4 * mp.pi * t) ** mp.mpf("1.5") * mp.exp(-t / 4 - d * d / (4 * t)) * val


def main():
    print("# t d H(t,d) rel_tol  -- mpmath tanh-sinh, 40 digits")
    for t in T_VALUES:
        for d in D_VALUES:
            print(f"{t} {d} {mp.nstr(heat_kernel(t, d), 20)} {TOL}")


if __name__ == "__main__":
    main()
