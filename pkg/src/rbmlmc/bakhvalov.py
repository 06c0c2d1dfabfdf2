"""Pairwise-independent dyadic uniforms from few independent generators.

Two constructions, both exact on numerators mod 2^q (the shifted sum of two
cell midpoints is again a midpoint, so no float arithmetic is involved):

* quadratic trick: 2n independent generators yield n^2 outputs
  out[(j1-1)n + j2] = G[j1] + G[n + j2] + 2^-(q+1) mod 1, i.e. numerator
  (g[j1] + g[n+j2] + 1) mod 2^q;
* logarithmic variant: 2n generators G[i][j] (i in {1,2}, j = 1..n) yield
  2^n outputs indexed by (i_1..i_n), numerator (sum_j g[i_j][j] + n-1) mod 2^q.

Each output is uniform on the midpoint grid and the family is pairwise
independent, which is checkable exactly by enumerating all generator
realizations for small n*q.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bitsource import BitSource
from .errors import FeasibilityError

_CHECK_BIT_CAP = 24
_LOG_N_CAP = 24


@dataclass(frozen=True)
class PairwiseFamily:
    q: int
    d: int
    count: int
    generators_used: int
    numerators: np.ndarray  # shape (count, d), int64 in [0, 2^q)

    @property
    def values(self) -> np.ndarray:
        return (self.numerators + 0.5) / 2.0 ** self.q


def pairwise_quadratic(src: BitSource, n: int, q: int,
                       d: int = 1) -> PairwiseFamily:
    """n^2 pairwise-independent dyadic uniforms from 2n generator draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = src.draw_dyadic_numerators(q, (2 * n, d))
    out = quadratic_outputs(g[:n], g[n:], q)
    return PairwiseFamily(q=q, d=d, count=n * n, generators_used=2 * n,
                          numerators=out)


def quadratic_outputs(g_left: np.ndarray, g_right: np.ndarray,
                      q: int) -> np.ndarray:
    """Combine generator numerators (n, d) x (n, d) -> (n^2, d), index
    (j1-1)*n + j2 running over j1 major, j2 minor."""
    n = g_left.shape[0]
    out = (g_left[:, None, :] + g_right[None, :, :] + 1) % (1 << q)
    return out.reshape(n * n, -1)


def pairwise_logarithmic(src: BitSource, n: int, q: int,
                         d: int = 1) -> PairwiseFamily:
    """2^n pairwise-independent dyadic uniforms from 2n generator draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > _LOG_N_CAP:
        raise FeasibilityError(f"output count 2^{n} exceeds cap 2^{_LOG_N_CAP}")
    g = src.draw_dyadic_numerators(q, (2, n, d))
    return PairwiseFamily(q=q, d=d, count=1 << n, generators_used=2 * n,
                          numerators=logarithmic_outputs(g, q))


def logarithmic_outputs(g: np.ndarray, q: int) -> np.ndarray:
    """Combine generator numerators (2, n, d) -> (2^n, d); output index i
    selects generator row bit_j(i) in slot j (bit 0 = slot 0)."""
    _, n, d = g.shape
    idx = np.arange(1 << n, dtype=np.int64)
    choice = (idx[:, None] >> np.arange(n)) & 1  # (2^n, n)
    picked = np.where(choice[:, :, None] == 0, g[0][None], g[1][None])
    return (picked.sum(axis=1) + n - 1) % (1 << q)


def _enumerate_generators(n_gen: int, q: int) -> np.ndarray:
    """All 2^(n_gen*q) generator realizations as numerators (R, n_gen).

    Generator j's bits occupy the j-th q-bit field of the realization code,
    most significant field first, matching the draw order of a BitSource.
    """
    total_bits = n_gen * q
    if total_bits > _CHECK_BIT_CAP:
        raise FeasibilityError(
            f"enumeration of {n_gen}*{q} = {total_bits} bits exceeds cap "
            f"{_CHECK_BIT_CAP}")
    codes = np.arange(1 << total_bits, dtype=np.int64)
    shifts = total_bits - q * np.arange(1, n_gen + 1)
    return (codes[:, None] >> shifts[None, :]) & ((1 << q) - 1)


def _all_outputs(n: int, q: int, variant: str) -> np.ndarray:
    """Outputs (R, count) over every generator realization, d = 1."""
    if variant == "quadratic":
        g = _enumerate_generators(2 * n, q)
        left = g[:, :n]
        right = g[:, n:]
        return ((left[:, :, None] + right[:, None, :] + 1) % (1 << q)
                ).reshape(g.shape[0], n * n)
    if variant == "logarithmic":
        g = _enumerate_generators(2 * n, q).reshape(-1, 2, n)
        idx = np.arange(1 << n, dtype=np.int64)
        choice = ((idx[:, None] >> np.arange(n)) & 1)  # (2^n, n)
        picked = np.where(choice[None, :, :] == 0, g[:, 0, None, :],
                          g[:, 1, None, :])
        return (picked.sum(axis=2) + n - 1) % (1 << q)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class PairwiseCheckReport:
    variant: str
    n: int
    q: int
    count: int
    realizations: int
    passed: bool
    failures: tuple

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.variant} n={self.n} q={self.q}: {self.count} outputs, "
                f"{self.realizations} realizations enumerated -> {status}"
                + (f" failures={self.failures}" if self.failures else ""))


def exact_pairwise_check(n: int, q: int, variant: str) -> PairwiseCheckReport:
    """Exhaustively verify uniform marginals and pairwise-joint uniformity."""
    outs = _all_outputs(n, q, variant)
    big_r, count = outs.shape
    atoms = 1 << q
    failures = []
    expect_marginal = big_r // atoms
    for i in range(count):
        c = np.bincount(outs[:, i], minlength=atoms)
        if not np.all(c == expect_marginal):
            failures.append(("marginal", i))
    expect_joint = big_r // (atoms * atoms)
    for i, j in combinations(range(count), 2):
        c = np.bincount(outs[:, i] * atoms + outs[:, j],
                        minlength=atoms * atoms)
        if not np.all(c == expect_joint):
            failures.append(("pair", i, j))
    return PairwiseCheckReport(variant=variant, n=n, q=q, count=count,
                               realizations=big_r, passed=not failures,
                               failures=tuple(failures))


def joint_is_uniform(n: int, q: int, variant: str, indices) -> bool:
    """Exact check whether the outputs at the given indices are jointly
    uniform on the midpoint grid to the power len(indices)."""
    outs = _all_outputs(n, q, variant)
    big_r = outs.shape[0]
    atoms = 1 << q
    cells = atoms ** len(indices)
    if big_r % cells != 0:
        return False
    idx = np.zeros(big_r, dtype=np.int64)
    for i in indices:
        idx = idx * atoms + outs[:, i]
    return bool(np.all(np.bincount(idx, minlength=cells) == big_r // cells))


def find_nonuniform_tuple(n: int, q: int, variant: str,
                          size: int) -> tuple | None:
    """First index tuple of the given size whose exact joint is not uniform."""
    count = n * n if variant == "quadratic" else 1 << n
    for t in combinations(range(count), size):
        if not joint_is_uniform(n, q, variant, t):
            return t
    return None


def find_nonuniform_triple(n: int, q: int,
                           variant: str = "quadratic") -> tuple | None:
    """First triple of output indices whose exact joint is not uniform.

    Returns None if every triple is jointly uniform. For the quadratic
    construction that is in fact always the case: a character-sum argument
    needs every generator to appear with exponents summing to zero, which
    three distinct cells of the (j1, j2) grid cannot achieve, so the first
    dependent sets are 4-tuples (see find_nonuniform_tuple with size 4).
    """
    return find_nonuniform_tuple(n, q, variant, 3)
