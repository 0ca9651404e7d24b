"""CHSH search, LP verdicts on a few setting families, and the qubit-model Monte Carlo rate."""
from __future__ import annotations

import math

import numpy as np

from pathspin.elements import BeamSplitterParams, SpinSetting
from pathspin.experiments import prepare_pan_home
from pathspin.noncontextual import chsh_search, feasibility_lp, mc_error_scaling
from pathspin.qcore import PathSpinState, SpinState


def main(seed: int = 0) -> None:
    entangled = prepare_pan_home()
    product = PathSpinState.product([1, 0], SpinState.up())

    for name, state in (("entangled", entangled), ("product", product)):
        res = chsh_search(state, 48)
        print(f"chsh {name:9s} value={res.value:.12f}  gammas=({res.path_settings[0].gamma:.6f}, "
              f"{res.path_settings[1].gamma:.6f})  thetas=({res.spin_settings[0].theta:.6f}, "
              f"{res.spin_settings[1].theta:.6f})")

    rng = np.random.default_rng(seed)
    print("\nLP feasibility on random settings (entangled state):")
    for m, n in ((1, 1), (2, 2), (3, 3), (4, 4)):
        verdicts = []
        for _ in range(20):
            paths = [BeamSplitterParams.from_gamma(g) for g in rng.random(m)]
            spins = [SpinSetting(t) for t in rng.random(n) * math.pi]
            verdicts.append(feasibility_lp(paths, spins, entangled).feasible)
        print(f"  m={m} n={n}: {sum(verdicts):2d}/20 feasible")

    sizes = [10**3, 10**4, 10**5, 10**6]
    errs = mc_error_scaling([0, 0, 1], SpinSetting(math.pi / 8).axis, sizes, repeats=16, seed=seed)
    print("\nqubit model mean |error|:")
    for n, e in zip(sizes, errs):
        print(f"  N={n:>8d}  {e:.3e}  sqrt(N)*err={e * math.sqrt(n):.3f}")


if __name__ == "__main__":
    main()
