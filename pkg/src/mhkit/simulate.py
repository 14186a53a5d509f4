"""Simulation engines: dense statevectors, stabilizer tableaux, measurement programs,
and the local-observable estimator for Clifford-then-shallow circuits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .circuit import CLIFFORD_BLOCK_KINDS, Gate, LayeredCircuit, gate_matrix
from .errors import (
    DimensionError,
    FeasibilityError,
    GateClassError,
    ImpossibleOutcomeError,
    ValidationError,
)
from .lightcone import back_lightcone, induced_subcircuit
from .pauli import (
    CLIFFORD_KINDS,
    PauliString,
    StabilizerTableau,
    apply_clifford_gate,
    as_region,
    canonicalize,
    conjugate_by_clifford,
    purify,
    reduced_density,
    tableau_statevector,
)

__all__ = [
    "StateVector",
    "dense_run",
    "tableau_run",
    "Round",
    "MeasurementProgram",
    "Transcript",
    "run_measurement_program",
    "estimate_local_observable_a1cq",
    "parse_observable",
]

STATEVECTOR_CAP = 26
DENSITY_CAP = 12
OBSERVABLE_CONE_CAP = 20
PURIFIED_CAP = 24
DEFAULT_SEED = 0x3115EED


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n > STATEVECTOR_CAP:
            raise FeasibilityError(f"statevector refused for n={self.n} > {STATEVECTOR_CAP}")
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != 1 << self.n:
            raise DimensionError(f"expected {1 << self.n} amplitudes, got {a.size}")
        if abs(np.linalg.norm(a) - 1) > 1e-10:
            raise ValidationError("statevector is not normalized")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        a = np.zeros(1 << n, dtype=complex)
        a[0] = 1
        return cls(n, a)

    @classmethod
    def basis(cls, n: int, bits) -> "StateVector":
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        a = np.zeros(1 << n, dtype=complex)
        a[idx] = 1
        return cls(n, a)

    @classmethod
    def from_tableau(cls, t: StabilizerTableau) -> "StateVector":
        return cls(t.n, tableau_statevector(t))

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def reduced_density(self, region) -> np.ndarray:
        region = as_region(region, self.n)
        rest = [q for q in range(self.n) if q not in region]
        psi = self.amplitudes.reshape([2] * self.n).transpose(list(region) + rest)
        m = psi.reshape(1 << len(region), -1)
        return m @ m.conj().T

    def expectation(self, op: np.ndarray, region) -> float:
        rho = self.reduced_density(region)
        return float(np.real(np.trace(op @ rho)))

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def _apply_matrix(psi: np.ndarray, u: np.ndarray, qubits) -> np.ndarray:
    """Apply a k-qubit matrix to axes `qubits` of a (2,)*n tensor."""
    k = len(qubits)
    ut = u.reshape([2] * (2 * k))
    out = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def _apply_fanout(psi: np.ndarray, qubits) -> np.ndarray:
    ctrl, targets = qubits[0], qubits[1:]
    out = psi.copy()
    sel = [slice(None)] * psi.ndim
    sel[ctrl] = 1
    sel = tuple(sel)
    part = out[sel]
    # removing the control axis shifts later axes down by one
    axes = [t - (t > ctrl) for t in targets]
    out[sel] = np.flip(part, axis=axes)
    return out


def _apply_gate_tensor(psi: np.ndarray, g: Gate) -> np.ndarray:
    if g.kind == "FANOUT":
        return _apply_fanout(psi, g.qubits)
    return _apply_matrix(psi, gate_matrix(g), g.qubits)


def _tensor_run(c: LayeredCircuit, psi: np.ndarray) -> np.ndarray:
    for layer in c.layers:
        for g in layer:
            if not g.is_unitary:
                raise ValidationError(f"{g.kind} in a unitary-only simulation")
            psi = _apply_gate_tensor(psi, g)
    return psi


def dense_run(c: LayeredCircuit, psi0: StateVector | None = None) -> StateVector:
    """Apply the circuit layer by layer to a dense statevector."""
    if c.n > STATEVECTOR_CAP:
        raise FeasibilityError(f"dense simulation refused for n={c.n} > {STATEVECTOR_CAP}")
    psi0 = StateVector.zeros(c.n) if psi0 is None else psi0
    if psi0.n != c.n:
        raise DimensionError("state and circuit widths differ")
    psi = _tensor_run(c, psi0.amplitudes.reshape([2] * c.n))
    return StateVector(c.n, psi.reshape(-1))


def apply_to_density(c: LayeredCircuit, rho: np.ndarray) -> np.ndarray:
    """U rho U^dagger for a unitary circuit on a dense density matrix."""
    n = c.n
    if n > DENSITY_CAP:
        raise FeasibilityError(f"density simulation refused for n={n}")
    t = rho.reshape([2] * (2 * n))
    for layer in c.layers:
        for g in layer:
            if not g.is_unitary:
                raise ValidationError(f"{g.kind} in a unitary-only simulation")
            t = _apply_gate_tensor(t, g)
            # conj(U) on the bra axes
            if g.kind == "FANOUT":
                t = _apply_fanout(t, [q + n for q in g.qubits])
            else:
                t = _apply_matrix(t, gate_matrix(g).conj(), [q + n for q in g.qubits])
    return t.reshape(1 << n, 1 << n)


def tableau_run(c: LayeredCircuit, t0: StabilizerTableau | None = None) -> StabilizerTableau:
    """Clifford-only circuit on a stabilizer tableau."""
    t0 = StabilizerTableau.zero_state(c.n) if t0 is None else t0
    return conjugate_by_clifford(t0, c)


# ---------------------------------------------------------------------------
# measurement programs


@dataclass(frozen=True, eq=False)
class Round:
    """Quantum block, then Z measurements on `measured`, then Pauli corrections.

    `classical_map` is an F2 matrix of shape (2n, total outcomes so far);
    rows 0..n-1 give X-correction bits, rows n..2n-1 give Z-correction bits.
    Outcome bits are numbered in measurement order across rounds.
    """

    block: LayeredCircuit
    measured: tuple[int, ...]
    classical_map: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class MeasurementProgram:
    n: int
    rounds: tuple[Round, ...]
    inputs: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()

    @property
    def num_outcomes(self) -> int:
        return sum(len(r.measured) for r in self.rounds)

    def quantum_depths(self) -> list[int]:
        return [r.block.depth for r in self.rounds]


@dataclass
class Transcript:
    outcomes: list[int] = field(default_factory=list)
    probabilities: list[float] = field(default_factory=list)
    corrections: list[np.ndarray] = field(default_factory=list)


class _OutcomeSource:
    def __init__(self, forced, seed):
        self.forced = None if forced is None else [int(b) for b in forced]
        self.pos = 0
        self.rng = np.random.default_rng(np.random.SeedSequence(DEFAULT_SEED if seed is None else seed))

    def next(self, p_one: float) -> int:
        if self.forced is not None:
            if self.pos >= len(self.forced):
                raise ValidationError("forced outcome list is too short")
            b = self.forced[self.pos]
            self.pos += 1
            p = p_one if b else 1 - p_one
            if p < 1e-12:
                raise ImpossibleOutcomeError(f"forced outcome {b} has probability 0")
            return b
        return int(self.rng.random() < p_one)


def _dense_measure(psi: np.ndarray, q: int, src: _OutcomeSource):
    sel1 = [slice(None)] * psi.ndim
    sel1[q] = 1
    p1 = float(np.sum(np.abs(psi[tuple(sel1)]) ** 2))
    b = src.next(p1)
    p = p1 if b else 1 - p1
    out = psi.copy()
    sel0 = [slice(None)] * psi.ndim
    sel0[q] = 1 - b
    out[tuple(sel0)] = 0
    return out / np.sqrt(p), b, p


def _tableau_measure(xs, zs, ph, q: int, src: _OutcomeSource):
    """Z measurement on a pure tableau held as mutable arrays."""
    n = xs.shape[1]
    anti = np.flatnonzero(xs[:, q])
    if anti.size:
        b = src.next(0.5)
        p = anti[0]
        others = anti[1:]
        if others.size:
            from .pauli import _phase_terms

            extra = _phase_terms(xs[others], zs[others], xs[p][None, :], zs[p][None, :]).sum(axis=1)
            ph[others] = (ph[others] + ph[p] + extra) % 4
            xs[others] ^= xs[p]
            zs[others] ^= zs[p]
        xs[p] = 0
        zs[p] = 0
        zs[p, q] = 1
        ph[p] = 2 * b
        return b, 0.5
    # deterministic: +-Z_q lies in the group; find the combination
    target = np.zeros(2 * n, np.uint8)
    target[n + q] = 1
    mat = np.hstack([xs, zs]).T
    coeffs = gf2.solve(mat, target)
    if coeffs is None:
        raise ValidationError("tableau is not pure; cannot measure")
    acc = PauliString.identity(n)
    for i in np.flatnonzero(coeffs):
        acc = acc * PauliString(xs[i], zs[i], ph[i])
    b = int(acc.phase == 2)
    src.next(float(b))
    return b, 1.0


def _apply_corrections(state, engine, bits: np.ndarray, n: int):
    xbits, zbits = bits[:n], bits[n:]
    if engine == "dense":
        for q in np.flatnonzero(xbits):
            state = _apply_matrix(state, gate_matrix(Gate("X", [int(q)])), [int(q)])
        for q in np.flatnonzero(zbits):
            state = _apply_matrix(state, gate_matrix(Gate("Z", [int(q)])), [int(q)])
        return state
    xs, zs, ph = state
    for q in np.flatnonzero(xbits):
        apply_clifford_gate(xs, zs, ph, "X", [int(q)])
    for q in np.flatnonzero(zbits):
        apply_clifford_gate(xs, zs, ph, "Z", [int(q)])
    return state


def run_measurement_program(
    p: MeasurementProgram,
    psi0: StateVector | StabilizerTableau | None = None,
    outcomes=None,
    seed: int | None = None,
):
    """Execute rounds with Born sampling (seeded) or forced outcomes.

    A StabilizerTableau input selects the stabilizer engine (Clifford blocks
    only); otherwise the dense engine is used. Returns (final state,
    Transcript), where the final state has the input's type.
    """
    src = _OutcomeSource(outcomes, seed)
    transcript = Transcript()
    if isinstance(psi0, StabilizerTableau):
        engine = "tableau"
        if not psi0.is_pure or psi0.n != p.n:
            raise DimensionError("tableau input must be pure and span the program")
        state = (psi0.xs.copy(), psi0.zs.copy(), psi0.phases.astype(np.int64).copy())
    else:
        engine = "dense"
        psi0 = StateVector.zeros(p.n) if psi0 is None else psi0
        if psi0.n != p.n:
            raise DimensionError("state and program widths differ")
        state = psi0.amplitudes.reshape([2] * p.n)
    for rnd in p.rounds:
        if engine == "dense":
            state = _tensor_run(rnd.block, state)
        else:
            for layer in rnd.block.layers:
                for g in layer:
                    if g.kind not in CLIFFORD_KINDS:
                        raise GateClassError(f"{g.kind} in stabilizer engine")
                    apply_clifford_gate(*state, g.kind, g.qubits)
        for q in rnd.measured:
            if engine == "dense":
                state, b, prob = _dense_measure(state, q, src)
            else:
                b, prob = _tableau_measure(*state, q, src)
            transcript.outcomes.append(b)
            transcript.probabilities.append(prob)
        if rnd.classical_map is not None:
            y = np.array(transcript.outcomes, dtype=np.uint8)
            m = np.asarray(rnd.classical_map, dtype=np.uint8)
            if m.shape != (2 * p.n, y.size):
                raise DimensionError(f"classical map shape {m.shape} != {(2 * p.n, y.size)}")
            bits = (m.astype(np.int64) @ y.astype(np.int64)) % 2
            transcript.corrections.append(bits.astype(np.uint8))
            state = _apply_corrections(state, engine, bits, p.n)
    if engine == "dense":
        return StateVector(p.n, state.reshape(-1)), transcript
    xs, zs, ph = state
    return canonicalize([PauliString(xs[i], zs[i], ph[i]) for i in range(len(ph))], n=p.n), transcript


# ---------------------------------------------------------------------------
# local observables


def parse_observable(text: str, n: int) -> tuple[PauliString, tuple[int, ...]]:
    """Parse `Z0*Z1` / `X3 Y5` style Pauli observables into (local Pauli, region)."""
    terms: dict[int, str] = {}
    sign = 0
    body = text.strip()
    if body.startswith("-"):
        sign, body = 2, body[1:]
    for tok in body.replace("*", " ").split():
        letter, idx = tok[0].upper(), tok[1:]
        if letter not in "XYZ" or not idx.isdigit():
            raise ValidationError(f"bad observable factor {tok!r}")
        q = int(idx)
        if q in terms:
            raise ValidationError(f"qubit {q} repeated in observable")
        terms[q] = letter
    region = as_region(terms, n)
    local = PauliString.from_sparse(len(region), {j: terms[q] for j, q in enumerate(region)}, sign)
    return local, region


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, PauliString):
        return op.matrix()
    return np.asarray(op, dtype=complex)


def estimate_local_observable_a1cq(cl: LayeredCircuit, q: LayeredCircuit, op, region, method: str = "auto") -> float:
    """Exact <O> on region S for the state q . cl |0^n>, cl Clifford and q shallow.

    Only back_q(S) matters: the Clifford part is tracked as a tableau, its
    reduced state on that cone is formed exactly, and the induced part of q
    is applied densely. Cost is polynomial in n and exponential only in the
    cone size. `method` forces the "density" or "purified" route; "auto"
    uses the density matrix for cones of at most 12 qubits.
    """
    n = cl.n
    if q.n != n:
        raise DimensionError("Clifford and QNC0 circuits differ in width")
    region = as_region(region, n)
    mat = _as_matrix(op)
    if mat.shape != (1 << len(region),) * 2:
        raise DimensionError("observable does not match region size")
    if not np.allclose(mat, mat.conj().T, atol=1e-12):
        raise ValidationError("observable is not Hermitian")
    cone = back_lightcone(q, region)
    k = len(cone)
    if k > OBSERVABLE_CONE_CAP:
        raise FeasibilityError(f"lightcone of size {k} exceeds cap {OBSERVABLE_CONE_CAP}")
    for g in cl.gates():
        if g.kind not in CLIFFORD_KINDS:
            raise GateClassError(f"{g.kind} in the Clifford block")
    tab = tableau_run(cl)
    sub = induced_subcircuit(q, region)
    local = [cone.index(s) for s in region]
    if method == "density" or (method == "auto" and k <= DENSITY_CAP):
        rho = reduced_density(tab, cone)
        out = apply_to_density(sub, rho)
        reduced = _partial(out, local, k)
        return float(np.real(np.trace(mat @ reduced)))
    # larger cones: purify the reduced stabilizer state and run a statevector
    from .pauli import restrict

    mixed = restrict(tab, cone)
    pure = purify(mixed)
    if pure.n > PURIFIED_CAP:
        raise FeasibilityError(f"purified cone needs {pure.n} qubits > {PURIFIED_CAP}")
    psi = StateVector.from_tableau(pure)
    psi = dense_run(sub.widened(pure.n), psi)
    return float(np.real(np.trace(mat @ psi.reduced_density(local))))


def _partial(rho: np.ndarray, keep, n: int) -> np.ndarray:
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n)).transpose(keep + rest + [q + n for q in keep] + [q + n for q in rest])
    a, b = 1 << len(keep), 1 << len(rest)
    t = t.reshape(a, b, a, b)
    return np.einsum("ibjb->ij", t)
