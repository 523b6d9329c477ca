"""Click counting on two-mode squeezed vacuum with imperfect detectors.

Photon-number-resolving detectors are rare; arrays of D on-off APDs are
not.  This demo measures a two-mode squeezed vacuum behind the identity
splitter with two 4-APD arrays (60% efficiency, small dark-count rate)
and shows that the click statistics still hand back the essential MGF:

* the exact joint click table P(i clicks, j clicks),
* dark-corrected click moments mu_{k,l}, which land exactly on MGF
  values M(t e; tau) at the lattice points the detector exposes,
* moment estimates from 200k simulated runs with standard errors.

Run:  python3 demos/squeezed_light_clicks.py
Writes click_moments.csv (k, l, t, tau, exact, estimate, std_error).
"""

import csv
import math

from stokespace import (
    ClickDetectorConfig,
    MgfQuery,
    TmsvSpec,
    click_distribution,
    click_moment_to_mgf_point,
    direction_to_beamsplitter,
    estimate_mgf_from_samples,
    make_state,
    mgf,
    moments_from_clicks,
    sample_clicks,
)


def main():
    state = make_state(TmsvSpec(xi=math.atanh(0.5)), cutoff=40)
    d = direction_to_beamsplitter((0.0, 0.0, 1.0))
    cfg = ClickDetectorConfig(apds=4, eta=0.6, nu=0.01, eps=1.0)
    clicks = click_distribution(state, d, cfg, cfg)

    print("== joint click probabilities P(i, j), 4 APDs per arm ==")
    print("        " + "".join(f"  j={j}    " for j in range(5)))
    for i in range(5):
        row = "".join(f"{clicks.c[i, j]:9.5f}" for j in range(5))
        print(f"  i={i}  {row}")
    print("  photon pairs keep the table nearly diagonal even at 60%")
    print("  efficiency; dark counts populate the off-diagonal.\n")

    print("== click moments land on the MGF lattice ==")
    samples = sample_clicks(clicks, 200_000, seed=11)
    rows = []
    for k in range(5):
        for l in range(5):
            exact = moments_from_clicks(clicks, k, l)
            t, tau = click_moment_to_mgf_point(k, l, cfg, cfg)
            ref = mgf(state, MgfQuery(d, t, tau)).real
            est, err = estimate_mgf_from_samples(samples, k, l, cfg, cfg)
            rows.append((k, l, t, tau, exact, est, err))
            if k == l:
                print(f"  mu_{k}{l} = {exact:.6f}   M(t={t:+.3f}, tau={tau:.3f}) = "
                      f"{ref:.6f}   estimate {est:.6f} +- {err:.6f}")
    pulls = [abs(r[5] - r[4]) / r[6] for r in rows if r[6] > 0.0]
    print(f"\n  largest deviation over 24 estimated moments: "
          f"{max(pulls):.2f} standard errors")

    with open("click_moments.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "l", "t", "tau", "exact", "estimate", "std_error"])
        for k, l, t, tau, exact, est, err in rows:
            w.writerow([k, l, f"{t:.10g}", f"{tau:.10g}", f"{exact:.10g}",
                        f"{est:.10g}", f"{err:.10g}"])
    print("wrote click_moments.csv")


if __name__ == "__main__":
    main()
