#!/usr/bin/env python3
"""Sweep the cut tight-binding susceptibility over system size and fit its growth.

d = 1 half-filled chains show chi_E = a ln L + b; d = 2 strips show
a L ln L + b L + c.  Writes two-column (L, chi_E) data files suitable for
plotting and prints the fit summary with significance.
"""

import argparse

from entsus.tightbinding import TightBindingSpec, half_space_spec, scaling_fit, tight_binding_chi_e


def run_dimension(dim: int, sizes, out_prefix: str | None):
    values = []
    for size in sizes:
        if dim == 1:
            spec = half_space_spec(1, size)
        else:
            spec = TightBindingSpec(dim=dim, transverse_length=size, width_a=size, width_b=size)
        values.append(tight_binding_chi_e(spec))
        print(f"  d={dim}  L={size:<5d}  chi_E={values[-1]:.10f}")
    if len(sizes) >= 5:
        fit = scaling_fit(sizes, values, dim=dim)
        print(
            f"  fit: a={fit.log_coefficient:.6f} (+-{fit.log_coefficient_stderr:.1e}, "
            f"{fit.log_significance:.1f} sigma), b={fit.linear_coefficient:.6f}, "
            f"c={fit.constant:.6f}, R^2={fit.r_squared:.6f}"
        )
    else:
        print("  (fit skipped: need at least 5 sizes)")
    if out_prefix:
        path = f"{out_prefix}_d{dim}.dat"
        with open(path, "w") as f:
            for size, value in zip(sizes, values):
                f.write(f"{size} {value!r}\n")
        print(f"  wrote {path}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-l-1d", type=int, default=4096)
    parser.add_argument("--max-l-2d", type=int, default=96)
    parser.add_argument("--out-prefix", default=None, help="write <prefix>_d{1,2}.dat plot data")
    args = parser.parse_args()

    sizes_1d = [64]
    while sizes_1d[-1] * 2 <= args.max_l_1d:
        sizes_1d.append(sizes_1d[-1] * 2)
    print("half-filled chain, L_A = L_B = L/2:")
    run_dimension(1, sizes_1d, args.out_prefix)

    sizes_2d = [s for s in (16, 24, 32, 48, 64, 80, 96) if s <= args.max_l_2d]
    print("half-filled square strip, L_A = L_B = L:")
    run_dimension(2, sizes_2d, args.out_prefix)


if __name__ == "__main__":
    main()
