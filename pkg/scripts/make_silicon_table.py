"""Regenerate the bundled crystalline-silicon index table.

n: single-term Sellmeier n^2 = 1 + B l^2 / (l^2 - l0^2) with B = 10.6301,
l0^2 = 0.09766 um^2, fitted to n(1000 nm) = 3.5750 and n(1550 nm) = 3.4757;
it reproduces n(633 nm) = 3.880, n(1064 nm) = 3.554, n(1310 nm) = 3.503.
k: band-edge absorption coefficient (300 K) interpolated log-linearly between
anchor values, converted with k = a * lambda / (4 pi).
"""

import numpy as np

B, L0SQ = 10.6301, 0.09766
ANCHORS_NM = np.array([900, 950, 1000, 1050, 1100, 1150, 1200, 1250.0])
ABS_PER_CM = np.array([306, 157, 64, 16.3, 3.5, 0.32, 0.022, 0.0016])


def main(path="src/helscat/data/silicon.txt"):
    lam = np.arange(900, 1251, 1.0)
    um = lam / 1000
    n = np.sqrt(1 + B * um**2 / (um**2 - L0SQ))
    a = np.exp(np.interp(lam, ANCHORS_NM, np.log(ABS_PER_CM)))
    k = a * (lam * 1e-7) / (4 * np.pi)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# crystalline silicon, 300 K\n")
        fh.write("# n: Sellmeier fit (B=10.6301, l0^2=0.09766 um^2); "
                 "k: band-edge absorption, k = a*lambda/(4*pi)\n")
        fh.write("# wavelength_nm  n  k\n")
        for row in zip(lam, n, k):
            fh.write(f"{row[0]:.1f}  {row[1]:.6f}  {row[2]:.6e}\n")


if __name__ == "__main__":
    main()
