#!/usr/bin/env python3
# Copyright the himod authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""Writes the tabulated profiles used by the example configurations (lengths in mm)."""

import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def eplane_filter(samples_per_unit=16):
    # WR-75 E-plane filter: 8 + 45 + 4 sinusoidal units of 3.825 mm, heights as below.
    a0, b0, unit = 19.05, 9.525, 3.825
    gap, h_min, h_max = 6.0, 1.6, 8.6
    n_in, n_mid, n_out = 8, 45, 4
    n_units = n_in + n_mid + n_out
    rows = []
    for i in range(n_units * samples_per_unit + 1):
        u = i / samples_per_unit
        k = min(int(u), n_units - 1)
        if k < n_in:
            w = 0.5 * (1.0 - math.cos(math.pi * u / n_in))
            h, mean = h_min * w, b0 + (gap + 0.5 * h_min - b0) * w
        elif k < n_in + n_mid:
            j = k - n_in
            h = h_max if j >= n_mid - 4 else h_min + (h_max - h_min) * j / (n_mid - 4)
            mean = gap + 0.5 * h
        else:
            w = 0.5 * (1.0 - math.cos(math.pi * (n_units - u) / n_out))
            h, mean = h_max * w, b0 + (gap + 0.5 * h_max - b0) * w
        b = mean - 0.5 * h * math.cos(2.0 * math.pi * u)
        rows.append((u * unit, a0, b))
    rows[0] = (0.0, a0, b0)
    rows[-1] = (n_units * unit, a0, b0)
    return rows


def smooth_height_taper(n=49):
    # Monotone height taper with zero end slopes, 10.16 mm -> 5.08 mm over 47.08 mm.
    a0, b0, bL, length = 22.86, 10.16, 5.08, 47.08
    rows = []
    for i in range(n):
        t = i / (n - 1)
        s = t - math.sin(2.0 * math.pi * t) / (2.0 * math.pi)
        rows.append((t * length, a0, b0 * math.exp(math.log(bL / b0) * s)))
    return rows


def write(name, rows):
    with open(HERE / name, "w", encoding="ascii") as f:
        f.write("z,a,b\n")
        for z, a, b in rows:
            f.write(f"{z:.12g},{a:.12g},{b:.12g}\n")


if __name__ == "__main__":
    write("eplane_filter_profile.csv", eplane_filter())
    write("height_taper_profile.csv", smooth_height_taper())
