"""Imputation from a complete repository under differential-dependency rules,
and the cost-model tuning of the imputation grid index.
"""
import numpy as np

from skystream import (CostModelParams, CostRule, Repository, RepositoryIndex,
                       StreamObject, build_lattice, estimate_cost,
                       impute_object, rank_lattice, tune_cell_size)
from skystream.dd import DDRule


def main():
    repo = Repository(np.array([
        [90.0, 2.0, 2.0, 3.0],
        [60.0, 1.0, 1.0, 1.0],
        [70.0, 2.0, 2.0, 2.0],
        [90.0, 2.0, 3.0, 2.0],
    ]))
    # rule: tuples within 10 on A must be within 2 on D
    rule = DDRule(frozenset({0}), 3, ((0, 10.0), (3, 2.0)))
    lattice = rank_lattice(build_lattice([rule]), repo)
    index = RepositoryIndex(repo, dependent=3, dims=[0], u=5.0)

    obj = StreamObject("o5", 6, 11, (70.0, 2.0, 2.0, None))
    imputed = impute_object(obj, {3: lattice}, {3: index}, repo)
    print(f"imputing D for {obj.attrs}:")
    for inst in imputed.instances:
        print(f"  D={inst.attrs[3]:.0f} with probability {inst.p:.2f}")

    rng = np.random.default_rng(0)
    big = Repository(rng.uniform(0, 10, (5000, 4)))
    params = CostModelParams(
        beta=0.5, t_cell=1e-7, t_sr=1e-6, d2=4.0, n=2000,
        lengths=tuple(float(v) for v in big.lengths),
        rules=(CostRule((0,), (0.5,)), CostRule((1, 2), (0.3, 0.3))))
    u_star = tune_cell_size(params)
    print(f"\ntuned grid cell size u = {u_star:.4f}")
    for u in (u_star / 4, u_star, u_star * 4):
        print(f"  estimated cost at u={u:.4f}: {estimate_cost(params, u):.6g}")


if __name__ == "__main__":
    main()
