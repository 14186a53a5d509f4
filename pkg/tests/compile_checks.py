"""Shared checks for compiled circuits, used by the compile and acceptance tests."""

from __future__ import annotations

import itertools

import numpy as np

from mhkit.circuit import Gate, LayeredCircuit
from mhkit.pauli import PauliString, StabilizerTableau, canonicalize
from mhkit.simulate import run_measurement_program, tableau_run

from oracles import circuit_unitary


def choi_matches(c: LayeredCircuit, w: LayeredCircuit) -> bool:
    """w acts as c on qubits 0..n-1 with every other qubit starting and ending in |0>.

    Each data qubit is entangled with a fresh reference qubit, so equality of
    the final stabilizer states fixes the whole Clifford action up to a
    global phase.
    """
    n, big = c.n, w.n
    bell = [Gate("H", [big + q]) for q in range(n)] + [Gate("CNOT", [big + q, q]) for q in range(n)]
    pre = LayeredCircuit.from_gates(big + n, bell).widened(big + n)
    got = tableau_run(pre.then(w.widened(big + n)))
    small = LayeredCircuit.from_gates(2 * n, [Gate("H", [n + q]) for q in range(n)] + [Gate("CNOT", [n + q, q]) for q in range(n)])
    ref = tableau_run(small.then(c.widened(2 * n)))
    # move the reference qubits from n..2n-1 to big..big+n-1 and pin ancillas to |0>
    gens = []
    for g in ref.generators:
        x = np.zeros(big + n, np.uint8)
        z = np.zeros(big + n, np.uint8)
        x[:n], z[:n] = g.x[:n], g.z[:n]
        x[big:], z[big:] = g.x[n:], g.z[n:]
        gens.append(PauliString(x, z, g.phase))
    gens += [PauliString.single(big + n, q, "Z") for q in range(n, big)]
    return got == canonicalize(gens, n=big + n)


def dense_matches(c: LayeredCircuit, w: LayeredCircuit, rng) -> bool:
    """Dense check on a random data state (only for small widths)."""
    n = c.n
    a = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    a /= np.linalg.norm(a)
    want = circuit_unitary(c) @ a
    full = np.kron(a, np.eye(1, 1 << (w.n - n), 0).ravel())
    got = circuit_unitary(w) @ full
    return abs(abs(np.vdot(np.kron(want, np.eye(1, 1 << (w.n - n), 0).ravel()), got)) - 1) < 1e-9


def teleport_input(t0: StabilizerTableau, width: int) -> StabilizerTableau:
    gens = [g.embedded(width, range(t0.n)) for g in t0.generators]
    gens += [PauliString.single(width, q, "Z") for q in range(t0.n, width)]
    return canonicalize(gens, n=width)


def teleport_trials(c, prog, t0, outcome_vectors):
    """Count outcome vectors for which the corrected output differs from c|t0>."""
    from mhkit.compile import teleported_output

    want = tableau_run(c, t0)
    start = teleport_input(t0, prog.n)
    bad = 0
    for y in outcome_vectors:
        st, tr = run_measurement_program(prog, start, outcomes=y)
        bad += teleported_output(prog, st, tr) != want
    return bad


def all_outcomes(bits: int):
    for y in itertools.product([0, 1], repeat=bits):
        yield list(y)
