"""Path functionals with Lipschitz constant at most one (sup norm).

Each functional carries a batched evaluator over arrays of breakpoint values
(shape (n, m+1, r)); for piecewise-linear paths the presets are exact, no
quadrature error. Evaluations are charged to the ledger at m+1 per call.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .euler import Path
from .ledger import CostLedger


@dataclass(frozen=True)
class Functional:
    label: str
    lipschitz_bound: float
    eval_batch: Callable[[np.ndarray], np.ndarray]

    def __call__(self, path: Path) -> float:
        return float(self.eval_batch(path.values[None])[0])


def _terminal(values: np.ndarray) -> np.ndarray:
    return values[:, -1, 0]


def _running_max(values: np.ndarray) -> np.ndarray:
    # Piecewise-linear paths attain their max at a breakpoint.
    return np.max(values[:, :, 0], axis=1)


def _time_average(values: np.ndarray) -> np.ndarray:
    # Exact trapezoid on the path's own equidistant breakpoints.
    v = values[:, :, 0]
    m = v.shape[1] - 1
    return (0.5 * (v[:, 0] + v[:, -1]) + v[:, 1:-1].sum(axis=1)) / m


def make_distance_to_ref(ref: np.ndarray) -> Functional:
    """sup_t |x(t) - ref| for a constant reference point ref in R^r.

    1-Lipschitz by the triangle inequality for the sup distance.
    """
    ref = np.asarray(ref, dtype=float)

    def ev(values: np.ndarray) -> np.ndarray:
        return np.max(np.linalg.norm(values - ref, axis=-1), axis=-1)

    return Functional(label="distance_to_ref", lipschitz_bound=1.0,
                      eval_batch=ev)


def make_constant(c: float) -> Functional:
    """Constant functional (Lipschitz constant 0); debug/telescoping probe."""

    def ev(values: np.ndarray) -> np.ndarray:
        return np.full(values.shape[0], c, dtype=float)

    return Functional(label=f"const_{c}", lipschitz_bound=0.0, eval_batch=ev)


_PRESETS = {
    "terminal": lambda: Functional("terminal", 1.0, _terminal),
    "running_max": lambda: Functional("running_max", 1.0, _running_max),
    "time_average": lambda: Functional("time_average", 1.0, _time_average),
}


def preset_functional(name: str, x0: np.ndarray | None = None) -> Functional:
    """Named Lip-1 functional; distance_to_ref needs the problem's x0."""
    if name in _PRESETS:
        return _PRESETS[name]()
    if name == "distance_to_ref":
        if x0 is None:
            raise ValueError("distance_to_ref requires a reference point x0")
        return make_distance_to_ref(x0)
    raise ValueError(f"unknown functional preset {name!r}; choose from "
                     f"{sorted([*_PRESETS, 'distance_to_ref'])}")


def preset_functional_names() -> list[str]:
    return sorted([*_PRESETS, "distance_to_ref"])


def eval_with_cost(f: Functional, x: Path, ledger: CostLedger) -> float:
    """Evaluate f at a path on a dyadic grid, charging m+1 to info_cost."""
    m = x.m
    if m & (m - 1) != 0:
        raise ValueError(f"cost model requires a dyadic step count, got m={m}")
    ledger.info_cost += m + 1
    return f(x)
