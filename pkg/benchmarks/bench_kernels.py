"""Compare the compiled and numpy kernel backends.

Two measurements per backend: raw kernel calls on random CPTs of growing
parent count, and end-to-end dynamic conditioning on a diamond ladder and an
adder (all beliefs).  Usage::

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from dyncond import kernels
from dyncond.dynamic import DynamicConditioning
from dyncond.netgen import diamond_ladder, n_bit_adder


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_case(n_parents, card, seed=0):
    rng = np.random.default_rng(seed)
    cards = (card,) * n_parents
    cpt = rng.random((card ** n_parents, card))
    cpt /= cpt.sum(axis=1, keepdims=True)
    msgs = [rng.random(card) for _ in cards]
    return np.ascontiguousarray(cpt), cards, msgs, rng.random(card)


def bench_kernels(repeat, calls=2000):
    rows = []
    for n_parents, card in ((1, 2), (2, 2), (3, 2), (3, 3), (4, 4)):
        cpt, cards, msgs, lam = kernel_case(n_parents, card)
        lam_msgs = [None] + msgs[1:]
        row = [f"kernels parents={n_parents} card={card}"]
        for name in sorted(kernels.BACKENDS):
            mod = kernels.BACKENDS[name]

            def work():
                for _ in range(calls):
                    mod.pi_kernel(cpt, cards, msgs)
                    mod.lambda_kernel(cpt, cards, lam_msgs, lam, 0)
            row.append((name, best_of(work, repeat) / calls * 1e6))
        rows.append(row)
    return rows


def bench_engine(repeat):
    rows = []
    for label, net in (("ladder k=30", diamond_ladder(30, seed=1)),
                       ("adder n=12", n_bit_adder(12, noise=0.01, seed=1))):
        row = [f"engine {label}"]
        for name in sorted(kernels.BACKENDS):
            previous = kernels.use_backend(name)
            try:
                row.append((name, best_of(lambda: DynamicConditioning(net).beliefs(), repeat) * 1e6))
            finally:
                kernels.use_backend(previous)
        rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    names = sorted(kernels.BACKENDS)
    print(f"{'case':<34}" + "".join(f"{n + ' us':>16}" for n in names) + f"{'speedup':>10}")
    for row in bench_kernels(args.repeat) + bench_engine(args.repeat):
        t = dict(row[1:])
        speed = f"{t['python'] / t['compiled']:.2f}x" if "compiled" in t else "n/a"
        print(f"{row[0]:<34}" + "".join(f"{t[n]:>16.2f}" for n in names) + f"{speed:>10}")


if __name__ == "__main__":
    main()
