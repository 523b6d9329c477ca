"""Reconstructing the essential phase-space density from MGF data.

The essential P distribution lives on the 3D Stokes vector S; its MGF
along imaginary arguments is a damped characteristic function, so one
FFT undoes the transform.  For a classical ensemble the result must be
a probability density, which makes this a self-checking pipeline:

1. draw a complex-Gaussian ensemble of coherent pairs around
   alpha = 2, beta = 0 (Stokes mean on the north pole, |S| ~ 4),
2. tabulate M(i k; tau) on the dual grid with the analytic kernel,
3. invert with a raised-cosine window on a 32^3 grid,
4. compare against a histogram of 200k direct Stokes samples.

Run:  python3 demos/phase_space_reconstruction.py
Writes pess_z_marginal.csv (S_z, reconstructed, sampled).
"""

import csv

import numpy as np

from stokespace import (
    Grid3,
    default_tau,
    dual_grid,
    gaussian_ensemble,
    invert_to_pess,
    l1_distance,
    mgf_imaginary_grid,
    pess_mc_oracle,
)


def main():
    ens = gaussian_ensemble(0.12, mean_alpha=2.0, mean_beta=0.0)
    grid = Grid3(mins=(-2.0, -2.0, 2.0), maxs=(2.0, 2.0, 6.0), ns=(32, 32, 32))
    tau = default_tau(grid)
    print(f"grid 32^3 over [-2,2] x [-2,2] x [2,6], damping tau = {tau:.4f}")

    values = mgf_imaginary_grid(ens, dual_grid(grid), tau)
    print(f"tabulated {values.size} MGF points on the dual grid")

    pess = invert_to_pess(values, grid, tau)
    oracle = pess_mc_oracle(ens, grid, 200_000, seed=5)
    print(f"reconstruction: total mass {pess.total_mass:.5f}, "
          f"min/peak {pess.min_value / pess.peak:+.2e}")
    print(f"L1 distance to the 200k-sample histogram: "
          f"{l1_distance(pess, oracle):.4f}")

    # marginal along S_z: integrate out the transverse plane
    dx, dy, _ = grid.spacing()
    rec_z = pess.values.sum(axis=(0, 1)) * dx * dy
    mc_z = oracle.values.sum(axis=(0, 1)) * dx * dy
    z = grid.axes()[2]
    peak = int(np.argmax(rec_z))
    print("\n  S_z    reconstructed  sampled")
    for l in range(max(0, peak - 3), min(len(z), peak + 4)):
        print(f"  {z[l]:5.2f}  {rec_z[l]:12.5f}  {mc_z[l]:8.5f}")
    print("  the density concentrates at S_z = |alpha|^2 = 4 as it must")

    with open("pess_z_marginal.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["S_z", "reconstructed", "sampled"])
        for l in range(len(z)):
            w.writerow([f"{z[l]:.10g}", f"{rec_z[l]:.10g}", f"{mc_z[l]:.10g}"])
    print("\nwrote pess_z_marginal.csv")


if __name__ == "__main__":
    main()
