"""Clausius heat sums, binomial box entropy, and the Earth's radiative entropy production.

Run: python demos/04_entropy_calculators.py
"""
import math

from bellarrow import thermo

# %% Heat flowing from hot to cold always produces entropy
for t_hot in (300, 350, 600, 1200):
    print(f"q = 300 J, T_hot = {t_hot:4d} K, T_cold = 300 K  ->  dS = {thermo.contact_delta_s(300, t_hot, 300):.4f} J/K")

print("two-step Clausius sum:", thermo.clausius_delta_s([(-100, 500), (100, 250)]), "J/K")

# %% Counting microstates of the divided box
n = 1000
for j in (0, 1, 10, 100, 250, 500):
    print(f"n = {n}, j = {j:4d}   S/k_B = ln C(n, j) = {thermo.box_entropy(n, j):9.3f}")
print(f"n ln 2 = {n * math.log(2):.3f}; with the -1/2 ln(pi n / 2) correction: "
      f"{n * math.log(2) - 0.5 * math.log(math.pi * n / 2):.3f}")

# %% Sunlight in at ~5800 K, infrared out at ~300 K
rate = thermo.earth_entropy_rate(1.0, 5800, 300)
print(f"\nentropy production per watt: {rate:.4e} W/K")
print(f"for ~1.2e17 W absorbed: {thermo.earth_entropy_rate(1.2e17, 5800, 300):.3e} W/K")
