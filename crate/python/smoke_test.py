"""Smoke test for the pyfracdyn extension module.

Install the module first (see README), then run:  python3 python/smoke_test.py
"""

import json
import math
import os
import tempfile

import pyfracdyn as fd


def check(label, ok):
    print(("ok   " if ok else "FAIL ") + label)
    return ok


def main():
    results = []

    tri = fd.sierpinski_triangle(512)
    est = tri.box_dimension()
    results.append(check(f"triangle box dimension {est.dimension:.4f}",
                         abs(est.dimension - math.log(3) / math.log(2)) < 0.05))
    results.append(check("counts are (scale, count) pairs", est.counts[0] == (256.0, 3)))

    disk = fd.disk(120)
    radial = disk.radial_dimension()
    results.append(check(f"disk radial dimension {radial.dimension:.4f}",
                         abs(radial.dimension - 2.0) < 0.1))

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "tri.pgm")
        tri.save_pgm(path)
        back = fd.BinaryRaster.load(path, 128)
        results.append(check("PGM round trip", back.occupancy_count() == tri.occupancy_count()))
        try:
            fd.BinaryRaster.load(os.path.join(tmp, "missing.pgm"), 128)
            results.append(check("missing file raises", False))
        except fd.FracdynError as e:
            results.append(check("missing file raises", "missing.pgm" in str(e)))

    years = [1900, 1915, 1924, 1935, 1956, 1986, 2006, 2013]
    dims = [1 + 0.699952 / (1 + 2.07022e40 * math.exp(-0.049432 * t)) for t in years]
    fit = fd.fit_logistic(years, dims)
    results.append(check(f"logistic K {fit['K']:.6f}, b {fit['b']:.6f}",
                         abs(fit["K"] / 0.699952 - 1) < 0.01 and fit["class"] == "LargeNeighborhoodStable"))

    results.append(check("b = 3.1 oscillates", fd.classify_stability(3.1) == "PeriodTwoOscillation"))
    orbit = fd.simulate_difference(1.5, 0.2, 200)
    results.append(check("orbit reaches 1 - 1/b", abs(orbit[-1] - 1 / 3) < 1e-9))

    t = [2000 + i for i in range(21)]
    d = [0.003 * x - 4.5 + (x - 660) ** 2 * math.sin(x - 1.8) / 1.8e8 for x in t]
    diff = fd.fit_difference(t, d, starts=4)
    results.append(check(f"difference fit L1 {diff['objective']:.2e}", diff["objective"] <= 1e-6))

    segments = [
        {"kind": "exponential", "t_start": 1640, "t_end": 1742, "a": 7e-15, "b": 1.0247},
        {"kind": "exponential", "t_start": 1780, "t_end": 1870, "a": 3e-21, "b": 1.0324},
        {"kind": "exponential", "t_start": 1880, "t_end": 1920, "a": 3e-10, "b": 1.0187},
        {"kind": "linear", "t_start": 1930, "t_end": 1980, "a": 1e7, "b": -4527},
        {"kind": "exponential", "t_start": 1990, "t_end": 2020, "a": 2.5486, "b": 1.0062},
    ]
    alphas = dict(fd.alpha_ratios(json.dumps(segments)))
    results.append(check(f"alpha ratios {alphas}",
                         sorted(alphas) == [2, 3, 5] and abs(alphas[2] / 95.9158 - 1) < 0.05))

    pop_years = list(range(0, 31))
    pop = [100 * 1.1 ** y if y <= 15 else 20 * 1.2 ** y for y in pop_years]
    model = fd.fit_population(pop_years, pop, [(0, 15, "exponential"), (16, 30, "exponential")])
    same = fd.compare_similarity(model, model, 0.01)
    results.append(check("model is similar to itself", same == [(2, True)]))

    if not all(results):
        raise SystemExit(1)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
