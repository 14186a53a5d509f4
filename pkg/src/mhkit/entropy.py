"""Entropies and mutual information (dense and stabilizer-exact), binary-entropy
bounds, and the explicit state families used by the lower-bound certificates.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FeasibilityError, RegionError, ValidationError
from .pauli import StabilizerTableau, as_region, restrict
from .simulate import STATEVECTOR_CAP, StateVector

__all__ = [
    "MiValue",
    "StateFamily",
    "von_neumann",
    "mutual_info_dense",
    "mutual_info_stabilizer",
    "binary_entropy",
    "h_upper",
    "fa_entropy_bound",
    "fa_mi_deviation_bound",
    "build_family",
    "partial_trace",
    "trace_distance",
]

EIG_FLOOR = 1e-12
MI_REGION_CAP = 14


@dataclass(frozen=True)
class MiValue:
    value: float
    exact_integer: int | None = None

    def as_dict(self) -> dict:
        return {"value": self.value, "exact_integer": self.exact_integer}


def _check_density(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValidationError("density matrix does not have unit trace")
    return rho


def von_neumann(rho: np.ndarray) -> float:
    """-sum lambda log2 lambda, with eigenvalues below 1e-12 dropped."""
    rho = _check_density(rho)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w.min() < -1e-8:
        raise ValidationError("density matrix is not positive semidefinite")
    w = w[w > EIG_FLOOR]
    return float(max(-(w * np.log2(w)).sum(), 0.0))


def partial_trace(rho: np.ndarray, keep, n: int) -> np.ndarray:
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    t = np.asarray(rho).reshape([2] * (2 * n)).transpose(keep + rest + [q + n for q in keep] + [q + n for q in rest])
    a, b = 1 << len(keep), 1 << len(rest)
    return np.einsum("ibjb->ij", t.reshape(a, b, a, b))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of the difference."""
    d = np.asarray(rho) - np.asarray(sigma)
    return float(0.5 * np.abs(np.linalg.eigvalsh((d + d.conj().T) / 2)).sum())


def _regions(a, b, n):
    a = as_region(a, n)
    b = as_region(b, n)
    if set(a) & set(b):
        raise RegionError(f"regions overlap: {a} and {b}")
    return a, b


def _reduced(state, region, n):
    if isinstance(state, StateVector):
        return state.reduced_density(region)
    return partial_trace(state, region, n)


def mutual_info_dense(state, a, b, n: int | None = None) -> MiValue:
    """I(A:B) = E(A) + E(B) - E(AB) from dense reduced states.

    `state` is a StateVector or a 2**n x 2**n density matrix.
    """
    if isinstance(state, StateVector):
        n = state.n
    elif n is None:
        n = int(round(math.log2(np.asarray(state).shape[0])))
    a, b = _regions(a, b, n)
    if len(a) + len(b) > MI_REGION_CAP:
        raise FeasibilityError(f"|A|+|B| = {len(a) + len(b)} exceeds {MI_REGION_CAP}")
    ab = tuple(sorted(a + b))
    val = von_neumann(_reduced(state, a, n)) + von_neumann(_reduced(state, b, n)) - von_neumann(_reduced(state, ab, n))
    return MiValue(float(max(val, 0.0)))


def mutual_info_stabilizer(t: StabilizerTableau, a, b) -> MiValue:
    """Integer mutual information |S_AB| - |S_A| - |S_B| of a stabilizer state."""
    a, b = _regions(a, b, t.n)
    ab = tuple(sorted(a + b))
    val = restrict(t, ab).rank - restrict(t, a).rank - restrict(t, b).rank
    return MiValue(float(val), int(val))


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValidationError(f"probability {p} outside [0, 1]")
    if p in (0, 1):
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def h_upper(eps: float) -> float:
    """Power-law upper bound e * eps**(1/ln 4) on the binary entropy."""
    if eps < 0:
        raise ValidationError("eps must be nonnegative")
    return float(math.e * eps ** (1 / math.log(4)))


def fa_entropy_bound(eps: float, n: int) -> float:
    """Fannes-Audenaert: |E(rho) - E(sigma)| <= eps*n + H(eps) for n qubits."""
    return eps * n + binary_entropy(eps)


def fa_mi_deviation_bound(eps: float, size_a: int, size_b: int) -> float:
    """Largest change of I(A:B) between states eps-close in trace distance."""
    if not 0 <= eps <= 1:
        raise ValidationError(f"eps {eps} outside [0, 1]")
    return 2 * eps * (size_a + size_b) + 3 * binary_entropy(eps)


# ---------------------------------------------------------------------------
# state families


@dataclass(frozen=True)
class StateFamily:
    kind: str  # "biased_cat", "w_state" or "cat_history"
    n: int
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("biased_cat", "w_state", "cat_history"):
            raise ValidationError(f"unknown family {self.kind!r}")
        if self.n < 1:
            raise ValidationError("n must be positive")
        if self.kind == "biased_cat" and (self.gamma is None or not 0 <= self.gamma <= 1):
            raise ValidationError("biased_cat needs gamma in [0, 1]")

    @property
    def width(self) -> int:
        return 2 * self.n if self.kind == "cat_history" else self.n

    def analytic_mi(self, a, b) -> float | None:
        """Closed-form I(A:B) where one is known, else None."""
        if self.kind != "biased_cat":
            return None
        a, b = _regions(a, b, self.n)
        if not a or not b:
            return 0.0
        h = binary_entropy(self.gamma)
        return 2 * h if len(a) + len(b) == self.n else h


def build_family(f: StateFamily) -> StateVector:
    if f.width > STATEVECTOR_CAP:
        raise FeasibilityError(f"{f.kind} on {f.width} qubits exceeds the dense cap")
    n = f.n
    amps = np.zeros(1 << f.width, dtype=complex)
    if f.kind == "biased_cat":
        amps[0] += math.sqrt(f.gamma)
        amps[-1] += math.sqrt(1 - f.gamma)
    elif f.kind == "w_state":
        for q in range(n):
            amps[1 << (n - 1 - q)] = 1 / math.sqrt(n)
    else:
        # clock register first (unary t = 1^t 0^(n-t)), then the state register
        # holding CAT_t 0^(n-t); n + 1 terms, so the norm is 1/sqrt(n + 1)
        norm = 1 / math.sqrt(n + 1)
        for t in range(n + 1):
            clock = ((1 << t) - 1) << (n - t)
            if t == 0:
                amps[clock << n] += norm
            else:
                ones = ((1 << t) - 1) << (n - t)
                amps[(clock << n) | 0] += norm / math.sqrt(2)
                amps[(clock << n) | ones] += norm / math.sqrt(2)
    return StateVector(f.width, amps)


def w_state_alpha(n: int) -> float:
    """Smallest pairwise single-qubit mutual information of the W state."""
    psi = build_family(StateFamily("w_state", n))
    # permutation symmetry: every pair has the same value
    return mutual_info_dense(psi, [0], [1]).value
