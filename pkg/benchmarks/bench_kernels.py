"""Compare the compiled and pure-Python quadrature kernels.

    python benchmarks/bench_kernels.py [--points 40] [--repeat 3]

Times each density kernel over a grid with both backends and reports the
speedup and the largest disagreement between them.
"""

import argparse
import time

import numpy as np

from expchar.characterization import MAX2_THIRD_TOL, SUM2_TOL, SUM3_INNER_TOL, SUM3_OUTER_TOL
from expchar.distributions import DistributionSpec
from expchar.kernels import backends
from expchar.quadrature import MAX_DEPTH

SPECS = {
    "exponential": DistributionSpec.exponential(1.0),
    "weibull(2)": DistributionSpec.weibull(2.0),
    "gamma(2)": DistributionSpec.gamma(2.0),
}


def cases():
    yield "max2-third", lambda mod, a, x: mod.max2_third_density(*a, x, MAX2_THIRD_TOL, MAX_DEPTH)
    yield "scaled-sum n=2", lambda mod, a, x: mod.scaled_sum2_density(*a, x, SUM2_TOL, MAX_DEPTH)
    yield "scaled-sum n=3", lambda mod, a, x: mod.scaled_sum3_density(
        *a, x, SUM3_INNER_TOL, SUM3_OUTER_TOL, MAX_DEPTH)


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    mods = backends()
    if "cython" not in mods:
        print("compiled kernels are not built; only the Python backend is available")
    xs = np.linspace(0.05, 8.0, args.points)
    header = f"{'kernel':<16}{'family':<14}" + "".join(f"{n + ' [s]':>14}" for n in mods)
    print(header + f"{'speedup':>10}{'max |diff|':>13}")
    for label, call in cases():
        for fam, spec in SPECS.items():
            a = spec.kernel_args
            times, vals = {}, {}
            for name, mod in mods.items():
                t, v = best_time(lambda: [call(mod, a, float(x))[0] for x in xs], args.repeat)
                times[name], vals[name] = t, np.array(v)
            row = f"{label:<16}{fam:<14}" + "".join(f"{times[n]:>14.4f}" for n in mods)
            if len(mods) == 2:
                row += f"{times['python'] / times['cython']:>9.1f}x"
                row += f"{np.max(np.abs(vals['python'] - vals['cython'])):>13.2e}"
            print(row)


if __name__ == "__main__":
    main()
