"""Central finite-difference gradient oracle.

Independent of the autograd engine on purpose: it only ever calls a loss
function that maps parameter values to a float, perturbing raw numpy
arrays coordinate by coordinate.
"""

from __future__ import annotations

import numpy as np

from ssorl.nn.params import ParamSet


def fd_gradients(
    loss_fn, ps: ParamSet, step: float = 1e-5, names: list[str] | None = None
) -> dict[str, np.ndarray]:
    """Central differences of `loss_fn()` w.r.t. every value in `ps`.

    `loss_fn` takes no arguments and must read the current parameter values
    from `ps` each call.
    """
    out = {}
    for name in names if names is not None else ps.names():
        data = ps.params[name].data
        g = np.zeros_like(data)
        flat = data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            up = float(loss_fn())
            flat[i] = orig - step
            down = float(loss_fn())
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * step)
        out[name] = g
    return out


def max_rel_error(
    analytic: dict[str, np.ndarray], numeric: dict[str, np.ndarray], floor: float = 1e-6
) -> float:
    """Worst relative error per coordinate, with an absolute floor for
    coordinates whose gradient magnitude is tiny."""
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        denom = np.maximum(np.abs(a), np.maximum(np.abs(n), floor))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
