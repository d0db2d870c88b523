"""Single uniform chain: closed-form solutions and spectra.

The second-order difference equation
    psi(n-1) - 2*psi(n) + psi(n+1) + (k*a)^2 * psi(n) = 0
has characteristic roots r satisfying r^2 - (2 - k^2 a^2) r + 1 = 0.
Every solution is a combination of the two root powers, which stay on
the unit circle for k*a <= 2 and turn into signed real exponentials
beyond. Closed-form spectra below are for a chain of N subintervals
over length L: value-pinned ends ("dirichlet") and difference-free
ends ("neumann").
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


class NonIntegerPointCountError(ValueError):
    """L/a does not resolve to a whole number of subintervals."""


@dataclass(frozen=True)
class ChainProblem:
    length: float
    points: int  # number of subintervals N >= 2

    def __post_init__(self):
        if self.points < 2:
            raise ValueError(f"points {self.points} < 2")
        if not self.length > 0:
            raise ValueError(f"length {self.length} <= 0")

    @property
    def step(self) -> float:
        return self.length / self.points


def characteristic_roots(k: float, a: float):
    """Both roots of r^2 - (2 - k^2 a^2) r + 1 = 0, as complex numbers.

    Computed from the literal radical formula; the identity checks and
    the stable evaluator cross-validate against this.
    """
    ka2 = (k * a) ** 2
    disc = cmath.sqrt(complex(ka2 * (ka2 - 4.0)))
    r_plus = 1.0 + (-ka2 + disc) / 2.0
    r_minus = 1.0 + (-ka2 - disc) / 2.0
    return r_plus, r_minus


def evaluate_exact_solution(k: float, a: float, coeff_plus, coeff_minus, n):
    """coeff_plus * r_+^n + coeff_minus * r_-^n, evaluated stably.

    Oscillatory regime uses unit-circle phases; beyond the band edge the
    roots are negative reals and signed exponentials are used instead of
    powering near-cancelling radicals. Vectorized over n.
    """
    n = np.asarray(n)
    ka = abs(k * a)
    if ka <= 2.0:
        # roots exp(+-i*phase), phase = 2*arcsin(k*a/2); exact at ka=0 and ka=2
        phase = 2.0 * math.asin(ka / 2.0)
        out = coeff_plus * np.exp(1j * phase * n) + coeff_minus * np.exp(-1j * phase * n)
    else:
        grow = 2.0 * math.acosh(ka / 2.0)
        sign = np.where(n % 2 == 0, 1.0, -1.0)
        out = sign * (coeff_plus * np.exp(-grow * n) + coeff_minus * np.exp(grow * n))
    return out if out.shape else complex(out)


def dirichlet_eigenvalues(problem: ChainProblem) -> np.ndarray:
    """All N-1 nonzero wavenumbers of the value-pinned chain, ascending.

    k_m = (2/a) * sin(pi*m / (2N)), m = 1..N-1.
    """
    N = problem.points
    a = problem.step
    m = np.arange(1, N)
    return (2.0 / a) * np.sin(np.pi * m / (2.0 * N))


def neumann_eigenvalues(problem: ChainProblem) -> np.ndarray:
    """All N-2 nonzero wavenumbers of the difference-free-ends chain,
    ascending. The constant zero mode exists as well and is reported by
    has_zero_mode, not in this list.

    k_m = (2/a) * sin(pi*m / (2(N-1))), m = 1..N-2.
    """
    N = problem.points
    a = problem.step
    m = np.arange(1, N - 1)
    return (2.0 / a) * np.sin(np.pi * m / (2.0 * (N - 1)))


# the difference-free chain always carries the constant k=0 mode
HAS_ZERO_MODE = {"dirichlet": False, "neumann": True}


def chain_eigenvalues(problem: ChainProblem, boundary: str) -> np.ndarray:
    if boundary == "dirichlet":
        return dirichlet_eigenvalues(problem)
    if boundary == "neumann":
        return neumann_eigenvalues(problem)
    raise ValueError(f"unknown boundary {boundary!r}")


def continuum_limit_error(m: int, length: float, steps) -> np.ndarray:
    """|k_m(a) - pi*m/L| for the value-pinned chain at each step in steps.

    Each step must divide the length into a whole number of
    subintervals (to 1e-9 relative), else NonIntegerPointCountError.
    Second-order: halving a divides the error by about 4.
    """
    if m < 0:
        raise ValueError("mode index must be >= 0")
    errs = []
    for a in steps:
        ratio = length / a
        N = round(ratio)
        if abs(ratio - N) > 1e-9 * max(1.0, ratio):
            raise NonIntegerPointCountError(f"step {a} does not divide length {length}")
        if m == 0:
            errs.append(0.0)
            continue
        if m >= N:
            raise ValueError(f"mode {m} does not exist at {N} subintervals")
        k = (2.0 / a) * math.sin(math.pi * m / (2.0 * N))
        errs.append(abs(k - math.pi * m / length))
    return np.asarray(errs)
