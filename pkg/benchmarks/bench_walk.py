"""Time the compiled and pure-Python stopping kernels on the same trials.

    python3 benchmarks/bench_walk.py --m 100 --c 2 --trials 300 --max-tosses 1000000
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from evsc.stopping import StoppingConfig
from evsc.stopping.simulate import available_backends, run_walks


def best_of(repeats: int, fn):
    times, out = [], None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=100)
    ap.add_argument("--c", type=float, default=2.0)
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--max-tosses", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--max-jump", type=int, default=1 << 62,
                    help="1 reproduces the naive one-toss-at-a-time walk")
    args = ap.parse_args()

    cfg = StoppingConfig(m=args.m, c=args.c, trials=args.trials, max_tosses=args.max_tosses,
                         seed=args.seed, max_jump=args.max_jump)
    results = {}
    for backend in available_backends():
        secs, (stops, cut) = best_of(args.repeats, lambda b=backend: run_walks(cfg, backend=b))
        results[backend] = {"seconds": secs, "trials_per_second": cfg.trials / secs,
                            "stops": stops, "truncated": cut}

    report = {"config": {k: getattr(cfg, k) for k in ("m", "c", "trials", "max_tosses", "seed", "max_jump")}}
    for name, r in results.items():
        report[name] = {"seconds": round(r["seconds"], 4),
                        "trials_per_second": round(r["trials_per_second"], 1)}
    if len(results) == 2:
        a, b = results["compiled"], results["python"]
        report["speedup"] = round(b["seconds"] / a["seconds"], 1)
        report["identical_output"] = bool(np.array_equal(a["stops"], b["stops"])
                                          and np.array_equal(a["truncated"], b["truncated"]))
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
