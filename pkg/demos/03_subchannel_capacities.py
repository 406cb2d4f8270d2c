#!/usr/bin/env python3
"""Characterize the per-plane sub-channels at one operating point.

Estimates BSC transition probabilities and binary-input AWGN mutual
informations (kNN estimator), then cross-checks the estimates against the
exact quadrature values.
"""

import numpy as np

from dte_recon import (Detection, Direction, DteConfig, awgn_model,
                       binary_entropy, mi_bit_continuous_oracle,
                       mi_gaussian_analytic, params_for_target_snr, snr,
                       subchannel_report)

params = params_for_target_snr(0.0, mod_variance=1.0, excess_noise=0.02,
                               detection=Detection.HETERODYNE)
model = awgn_model(params)
print(f"Operating point: heterodyne, SNR = 0 dB, tau = {params.transmittance:.4f}")
print(f"Channel mutual information I(x;y) = "
      f"{mi_gaussian_analytic(snr(params)):.4f} bits\n")

reports = subchannel_report(params, DteConfig(4), n=10_000, repeats=20, seed=7)

print("level   p_i      C_BSC    mi_rr (kNN)   mi_rr (exact)   mi_dr (kNN)")
for rep in reports:
    exact = mi_bit_continuous_oracle(rep.level, model, Direction.REVERSE)
    print(f"  {rep.level}   {rep.p_transition:.4f}   {rep.bsc_capacity:.4f}"
          f"   {rep.mi_rr:.4f}+-{rep.mi_rr_se:.4f}   {exact:.4f}"
          f"        {rep.mi_dr:.4f}")

print("\nReading the table:")
print(" * deeper planes are noisier: p_i climbs toward the fair coin 0.5,")
print("   so quantizing BOTH sides (BSC route) loses most of the deep planes;")
print(" * keeping one side continuous (BIAWGN route) dominates the BSC")
print("   capacity at every level, as the data-processing inequality demands;")
print(" * the kNN estimate tracks the exact quadrature value to a few")
print("   millibits at n = 10^4.")

p1 = reports[0].p_transition
rho = np.sqrt(0.5)
closed = 0.5 - np.arcsin(rho) / np.pi
print(f"\nClosed-form check at 0 dB: p_1 = 1/2 - arcsin(rho)/pi = {closed:.4f} "
      f"(estimated {p1:.4f})")
print(f"A fair-coin plane would have capacity {1 - binary_entropy(0.5):.1f}; "
      f"plane 4 retains {reports[3].bsc_capacity:.4f} bits as a BSC but "
      f"{reports[3].mi_rr:.4f} bits against the continuous side.")
