"""Seeded random MILPs that are feasible and bounded by construction."""

import numpy as np

from nfvcache.milp import model_from_arrays


def random_milp(seed, max_binaries=8, max_continuous=6):
    rng = np.random.default_rng(seed)
    nb = int(rng.integers(1, max_binaries + 1))
    nc = int(rng.integers(1, max_continuous + 1))
    n = nb + nc
    upper = np.concatenate([np.ones(nb), rng.integers(2, 10, nc).astype(float)])
    x0 = np.concatenate([rng.integers(0, 2, nb), rng.random(nc) * upper[nb:]])
    rows = int(rng.integers(2, 7))
    A = np.round(rng.normal(size=(rows, n)), 2)
    sense = rng.random(rows) < 0.6
    slack = np.round(rng.random(rows), 2)
    # rows hold at x0: <= rows get slack above, >= rows are negated onto <=
    A_ub = np.where(sense[:, None], A, -A)
    b_ub = A_ub @ x0 + slack
    c = np.round(rng.normal(size=n), 2)
    bounds = [(0.0, float(u)) for u in upper]
    integrality = np.concatenate([np.ones(nb, int), np.zeros(nc, int)])
    return model_from_arrays(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, integrality=integrality,
                             name=f"rand{seed}")
