"""Phaseless observation matrix of the disk c = (1, 0.25), r = 0.12 at k = 1
with L = 32 varying incident directions and M = 64 observation directions
(disk grid), evaluated with mpmath at 30 digits.

Writes ../data/disk_k1_L32_M64.csv with rows `m,l,value` (1-based).
Run: python3 disk_observations.py
"""
import os

import mpmath as mp

mp.mp.dps = 30

K = mp.mpf(1)
CENTER = (mp.mpf(1), mp.mpf("0.25"))
R = mp.mpf("0.12")
L, M = 32, 64
NMAX = 40


def coefficients():
    kr = K * R
    return [mp.besselj(n, kr) / mp.hankel1(n, kr) for n in range(NMAX)]


def far_field(coef, d_angle, x_angle):
    theta = x_angle - d_angle
    s = coef[0] + sum(2 * coef[n] * mp.cos(n * theta) for n in range(1, NMAX))
    d = (mp.cos(d_angle), mp.sin(d_angle))
    x = (mp.cos(x_angle), mp.sin(x_angle))
    phase = mp.expj(K * (CENTER[0] * (d[0] - x[0]) + CENTER[1] * (d[1] - x[1])))
    return -mp.exp(-1j * mp.pi / 4) * mp.sqrt(2 / (mp.pi * K)) * s * phase


def main():
    coef = coefficients()
    inc = [-mp.pi / 2 + 2 * mp.pi * l / (L + 1) for l in range(L + 1)]
    obs = [-mp.pi / 2 + 2 * mp.pi * m / M for m in range(1, M + 1)]
    base = [far_field(coef, inc[0], x) for x in obs]
    path = os.path.join(os.path.dirname(__file__), "..", "data", "disk_k1_L32_M64.csv")
    with open(path, "w") as f:
        f.write("m,l,value\n")
        for l in range(1, L + 1):
            for m, x in enumerate(obs, start=1):
                v = abs(base[m - 1] + far_field(coef, inc[l], x))
                f.write(f"{m},{l},{mp.nstr(v, 20, min_fixed=0, max_fixed=0)}\n")


if __name__ == "__main__":
    main()
