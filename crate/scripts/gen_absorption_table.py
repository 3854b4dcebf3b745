#!/usr/bin/env python3
"""Generate the bundled D-band absorption coefficient table.

Uses the simplified molecular absorption model for 100-450 GHz of
Kokkoniemi, Lehtomaki and Juntti (water-vapour lines at 119, 183, 325, 380,
439 and 448 GHz plus a continuum term), evaluated at T = 296 K,
relative humidity 50 % and p = 101325 Pa. Output: frequency_hz,kappa_per_m
at 0.5 GHz resolution over 110-170 GHz.

Usage: python3 scripts/gen_absorption_table.py > crates/core/data/dband_standard_atmosphere.csv
"""

import math

C = 299_792_458.0
T_K = 296.0
P_PA = 101_325.0
RH = 0.50


def water_mixing_ratio(t_k, p_pa, rh):
    t_c = t_k - 273.15
    p_hpa = p_pa / 100.0
    # Buck saturation vapour pressure (hPa)
    p_w = 6.1121 * (1.0007 + 3.46e-6 * p_hpa) * math.exp(17.502 * t_c / (t_c + 240.97))
    return rh * p_w / p_hpa


def kappa(f_hz, mu):
    v = f_hz / (100.0 * C)  # wavenumber, cm^-1
    lines = [
        (5.159e-5 * (1 - mu) * (-6.65e-5 * (1 - mu) + 0.0159), (-2.09e-4 * (1 - mu) + 0.05) ** 2, 3.96),
        (0.1925 * mu * (0.1350 * mu + 0.0318), (0.4241 * mu + 0.0998) ** 2, 6.11),
        (0.2251 * mu * (0.1314 * mu + 0.0297), (0.4127 * mu + 0.0932) ** 2, 10.84),
        (2.053 * mu * (0.1717 * mu + 0.0306), (0.5394 * mu + 0.0961) ** 2, 12.68),
        (0.177 * mu * (0.0832 * mu + 0.0213), (0.2615 * mu + 0.0668) ** 2, 14.65),
        (2.146 * mu * (0.1206 * mu + 0.0277), (0.3789 * mu + 0.0871) ** 2, 14.94),
    ]
    k = sum(a / (b + (v - c) ** 2) for a, b, c in lines)
    k += mu / 0.0157 * (2e-4 + 0.915e-112 * f_hz ** 9.42)
    return k


def main():
    mu = water_mixing_ratio(T_K, P_PA, RH)
    print("# D-band absorption coefficients for Beer-Lambert transmittance exp(-kappa*d).")
    print("# Source: simplified molecular absorption model for 100-450 GHz")
    print("# (Kokkoniemi, Lehtomaki, Juntti), water-vapour volume mixing ratio from the")
    print("# Buck saturation vapour pressure equation.")
    print(f"# temperature_k={T_K:g}")
    print(f"# pressure_pa={P_PA:g}")
    print(f"# relative_humidity={RH:g}")
    print(f"# water_mixing_ratio={mu:.6g}")
    print("frequency_hz,kappa_per_m")
    for i in range(121):
        f = 110e9 + 0.5e9 * i
        print(f"{f:.1f},{kappa(f, mu):.9e}")


if __name__ == "__main__":
    main()
