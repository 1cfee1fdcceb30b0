#!/usr/bin/env python3
"""What happens when h' has poles on the unit circle itself.

The flat-sided family h'(z) = p z^(p-1) / (1 + z^(2p+m-1)) puts its poles at
the (2p+m-1)-th roots of -1.  Three effects are shown on the 5-pointed star:

1. the boundary velocity phi'(t) cancels identically between the poles,
   so the whole circle maps onto finitely many points (the star's tips);
2. circles just inside the boundary map to nearly straight sides;
3. tracing the boundary circle itself clamps the sample that would land
   exactly on a pole.
"""

import math

import numpy as np

from hvl import (
    boundary_velocity_many,
    eval_h_prime_many,
    presets,
    segment_collinearity,
    trace_circle,
)


def main():
    star = presets.star()
    n_sides = 2 * star.p + star.m - 1

    # 1. boundary velocity collapses
    rng = np.random.default_rng(8)
    ts = rng.uniform(-math.pi, math.pi, 400)
    pole_angles = (2 * np.arange(n_sides) + 1) * math.pi / n_sides - math.pi
    keep = np.array([np.min(np.abs(np.angle(np.exp(1j * (t - pole_angles))))) > 1e-2
                     for t in ts])
    ts = ts[keep]
    vel = boundary_velocity_many(star, ts)
    scale = np.max(np.abs(eval_h_prime_many(star.h, np.exp(1j * ts))))
    print(f"boundary speed at {ts.size} random non-pole angles:")
    print(f"  max |phi'| = {np.max(np.abs(vel)):.3e}   (term scale {scale:.2f})")
    print("  the two terms of phi' cancel exactly on |z| = 1 for this family\n")

    # 2. straight sides just inside the boundary
    tr = trace_circle(star, 0.9999, n=8192)
    breaks = np.sort(np.mod(2 * math.pi * np.arange(n_sides) / n_sides + math.pi,
                            2 * math.pi) - math.pi)
    defects = segment_collinearity(tr, breaks)
    print(f"collinearity defect of the {n_sides} sides at r = 0.9999:")
    print("  " + ", ".join(f"{d:.2e}" for d in defects) + "\n")

    # 3. clamping on the boundary circle
    on_boundary = trace_circle(star, 1.0, n=4096)
    n_clamped = int(on_boundary.clamped.sum())
    where = on_boundary.t[on_boundary.clamped]
    print(f"boundary trace at r = 1: {n_clamped} of 4096 samples clamped")
    for t in where:
        print(f"  t = {t:+.6f} sits on the pole at z = e^(i t)")
    print("  (samples are pulled to r = 1 - 1e-6 so the trace stays finite)")


if __name__ == "__main__":
    main()
