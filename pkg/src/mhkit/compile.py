"""Circuit compilers: gate teleportation for Clifford circuits, coherent fanout
realizations, and the exact/threshold gadget library with TC0 compilation.

Teleportation layout for an n-qubit circuit cut into S stages: the input
register holds qubits 0..n-1, stage s (1-based) owns a Bell half B_s at
n(2s-1).. and a receiving register R_s at 2ns.., and the output is R_S.
All Bell pairs are prepared at once, every stage unitary runs on its R_s in
parallel, and all Bell measurements happen in one round, so the quantum
depth does not grow with S. The Pauli frame left on R_S is an F2-linear
function of the outcomes (the correction map).

Gadgets are phase-polynomial circuits. For a Boolean f on m bits, the phase
pi f(x) o (o the output wire, prepared with H) is a real combination of the
parities of subsets of (x, o); each parity is copied into an ancilla with
fanouts, rotated once, and uncomputed. This gives a Clifford / rotation /
Clifford pattern per gadget with 2^(m+1) ancillas at most.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .circuit import Gate, LayeredCircuit, account, check_relations, gate_matrix
from .errors import DecompositionError, FeasibilityError, GateClassError, ParseError, ValidationError
from .pauli import CLIFFORD_KINDS, PauliString, conjugate_paulis, restrict
from .simulate import MeasurementProgram, Round, tableau_run

__all__ = [
    "CorrectionMap",
    "GadgetReport",
    "Tc0Spec",
    "extract_correction_map",
    "teleport_parallelize",
    "teleported_output",
    "clifford_to_fanout",
    "basis_run",
    "build_exact_gadget",
    "build_threshold_gadget",
    "parse_tc0",
    "evaluate_tc0",
    "compile_tc0",
    "build_tc0_gadget",
]

GADGET_FANIN_CAP = 8
TC0_DEPTH_CAP = 3
TC0_TABLE_CAP = 10
ANGLE_TOL = 1e-12
PRUNE_TOL = 1e-13
FUNCTIONAL_TOL = 1e-9


def _require_clifford(c: LayeredCircuit) -> None:
    for g in c.gates():
        if g.kind not in CLIFFORD_KINDS:
            raise GateClassError(f"{g.kind} is not a Clifford gate")


def _stages(c: LayeredCircuit, layers_per_stage: int) -> list[LayeredCircuit]:
    if layers_per_stage < 1:
        raise ValidationError("layers_per_stage must be positive")
    return [LayeredCircuit(c.n, c.layers[i:i + layers_per_stage]) for i in range(0, c.depth, layers_per_stage)]


# ---------------------------------------------------------------------------
# teleportation


@dataclass(frozen=True, eq=False)
class CorrectionMap:
    """F2 matrix from outcome bits to the (x | z) Pauli frame on the output.

    Columns come in stage blocks of 2n: the Bell-half outcomes of qubits
    0..n-1 (X part of the frame) and then the outcomes of the register being
    teleported (Z part).
    """

    matrix: np.ndarray
    n: int
    stages: int

    @property
    def bits(self) -> int:
        return self.matrix.shape[1]

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (self.bits,):
            raise ValidationError(f"expected {self.bits} outcome bits")
        return ((self.matrix.astype(np.int64) @ y) % 2).astype(np.uint8)

    def as_dict(self) -> dict:
        return {"n": self.n, "stages": self.stages, "matrix": self.matrix.tolist()}


def extract_correction_map(c: LayeredCircuit, layers_per_stage: int = 1) -> CorrectionMap:
    """Frame map obtained by pushing each outcome's Pauli through the rest of the circuit."""
    _require_clifford(c)
    chunks = _stages(c, layers_per_stage)
    n, s_count = c.n, len(chunks)
    m = np.zeros((2 * n, 2 * n * s_count), dtype=np.uint8)
    singles = [PauliString.single(n, q, "X") for q in range(n)] + [PauliString.single(n, q, "Z") for q in range(n)]
    for s in range(s_count):
        suffix = LayeredCircuit(n, [layer for ch in chunks[s:] for layer in ch.layers])
        for j, p in enumerate(conjugate_paulis(singles, suffix)):
            col = 2 * n * s + j
            m[:n, col] = p.x
            m[n:, col] = p.z
    return CorrectionMap(m, n, s_count)


def _teleport_layout(n: int, s_count: int):
    b = [[n * (2 * s - 1) + q for q in range(n)] for s in range(1, s_count + 1)]
    r = [[2 * n * s + q for q in range(n)] for s in range(1, s_count + 1)]
    prev = [list(range(n))] + r[:-1]
    return b, r, prev


def _teleport_gates(chunks, n: int):
    s_count = len(chunks)
    b, r, prev = _teleport_layout(n, s_count)
    gates = [Gate("H", [b[s][q]]) for s in range(s_count) for q in range(n)]
    gates += [Gate("CNOT", [b[s][q], r[s][q]]) for s in range(s_count) for q in range(n)]
    for s, ch in enumerate(chunks):
        for layer in ch.layers:
            for g in layer:
                gates.append(Gate(g.kind, [r[s][q] for q in g.qubits], g.matrix))
    gates += [Gate("CNOT", [prev[s][q], b[s][q]]) for s in range(s_count) for q in range(n)]
    gates += [Gate("H", [prev[s][q]]) for s in range(s_count) for q in range(n)]
    measured = []
    for s in range(s_count):
        measured += b[s] + prev[s]
    return gates, measured, (r[-1] if s_count else list(range(n)))


def teleport_parallelize(c: LayeredCircuit, layers_per_stage: int = 1) -> tuple[MeasurementProgram, CorrectionMap]:
    """One-round measurement program computing a Clifford circuit by gate teleportation."""
    cmap = extract_correction_map(c, layers_per_stage)
    chunks = _stages(c, layers_per_stage)
    n = c.n
    width = n * (2 * len(chunks) + 1)
    gates, measured, outputs = _teleport_gates(chunks, n)
    full = np.zeros((2 * width, cmap.bits), dtype=np.uint8)
    for q, o in enumerate(outputs):
        full[o] = cmap.matrix[q]
        full[width + o] = cmap.matrix[n + q]
    block = LayeredCircuit.from_gates(width, gates).widened(width)
    prog = MeasurementProgram(width, (Round(block, tuple(measured), full),), tuple(range(n)), tuple(outputs))
    return prog, cmap


def teleported_output(p: MeasurementProgram, state, transcript):
    """Output-register state after running a teleportation program.

    Every non-output qubit has been measured, so a dense result is sliced at
    the recorded outcomes and a tableau result is restricted to the outputs.
    """
    measured = [q for r in p.rounds for q in r.measured]
    if sorted(measured + list(p.outputs)) != list(range(p.n)):
        raise ValidationError("program leaves unmeasured non-output qubits")
    from .simulate import StateVector

    if isinstance(state, StateVector):
        t = state.amplitudes.reshape([2] * p.n)
        idx = [slice(None)] * p.n
        for q, b in zip(measured, transcript.outcomes):
            idx[q] = b
        out = t[tuple(idx)]
        # remaining axes are the outputs in increasing qubit order
        order = np.argsort(np.argsort(list(p.outputs)))
        out = np.transpose(out, order) if out.ndim > 1 else out
        return StateVector(len(p.outputs), out.reshape(-1))
    return restrict(state, p.outputs)


def _phase_fix(n: int, gates, measured, outputs, cmap: CorrectionMap, width: int):
    """Diagonal Clifford data that returns the outcome register to |+...+>.

    After coherent corrections the outcome register holds a uniform-magnitude
    stabilizer state independent of the input. Its canonical generators are
    X_j Z^(Gamma_j) up to sign; Gamma off the diagonal gives CZ edges and the
    diagonal marks qubits needing S^dagger.
    """
    # all X corrections before all Z corrections, as in the compiled circuit;
    # the two kinds do not commute when they share an output qubit
    corr = [Gate("CNOT", [y, outputs[q]]) for j, y in enumerate(measured) for q in range(n) if cmap.matrix[q, j]]
    corr += [Gate("CZ", [y, outputs[q]]) for j, y in enumerate(measured) for q in range(n) if cmap.matrix[n + q, j]]
    order = sorted(measured)
    local = {q: i for i, q in enumerate(order)}

    def generators(extra):
        t = tableau_run(LayeredCircuit.from_gates(width, gates + corr + extra).widened(width))
        sub = restrict(t, order)
        k = len(order)
        if sub.rank != k or not np.array_equal(sub.xs, np.eye(k, dtype=np.uint8)):
            raise DecompositionError("outcome register is not in graph form")
        return sub

    sub = generators([])
    gamma = sub.zs.copy()
    edges = [(order[a], order[b]) for a in range(len(order)) for b in range(a + 1, len(order)) if gamma[a, b]]
    diag = [order[a] for a in range(len(order)) if gamma[a, a]]
    extra = [Gate("CZ", [a, b]) for a, b in edges]
    extra += [Gate("Z", [q]) for q in diag] + [Gate("S", [q]) for q in diag]
    sub = generators(extra)
    if sub.zs.any():
        raise DecompositionError("phase fix left Z components")
    signs = [order[a] for a in range(len(order)) if sub.phases[a] == 2]
    return edges, diag, signs, local


def clifford_to_fanout(c: LayeredCircuit, layers_per_stage: int = 1) -> LayeredCircuit:
    """Measurement-free constant-depth realization with at most four fanout layers.

    The teleportation program is made coherent: outcome qubits are copied
    (fanout), X corrections are parities collected with Hadamard-conjugated
    fanouts, Z corrections are fanouts from the output conjugated on the
    copies, the outcome-dependent phase is cancelled by CZ gates between
    copies, the copies are uncomputed (fanout) and the outcome register is
    rotated back to |0>. A final SWAP layer returns the result to qubits
    0..n-1; every other qubit is an ancilla that starts and ends in |0>.
    """
    _require_clifford(c)
    n = c.n
    chunks = _stages(c, layers_per_stage)
    if not chunks:
        return LayeredCircuit.empty(n)
    cmap = extract_correction_map(c, layers_per_stage)
    width = n * (2 * len(chunks) + 1)
    gates, measured, outputs = _teleport_gates(chunks, n)
    edges, diag, signs, _ = _phase_fix(n, gates, measured, outputs, cmap, width)

    # how many times each outcome qubit is read within one layer
    col = {y: j for j, y in enumerate(measured)}
    x_uses = {q: [y for y in measured if cmap.matrix[q, col[y]]] for q in range(n)}
    z_uses = {q: [y for y in measured if cmap.matrix[n + q, col[y]]] for q in range(n)}
    need = {y: [0, 0, 0] for y in measured}
    for q in range(n):
        for y in x_uses[q]:
            need[y][0] += 1
        for y in z_uses[q]:
            need[y][1] += 1
    for a, b in edges:
        need[a][2] += 1
        need[b][2] += 1
    copies = {}
    top = width
    for y in measured:
        k = max(max(need[y]) - 1, 0)
        copies[y] = [y] + list(range(top, top + k))
        top += k
    total = top

    cursor = {}

    def take(y, layer):
        i = cursor.get((y, layer), 0)
        cursor[(y, layer)] = i + 1
        return copies[y][i]

    layers = list(LayeredCircuit.from_gates(total, gates).layers)
    copy_layer = [Gate("FANOUT", copies[y]) for y in measured if len(copies[y]) > 1]
    layers.append(copy_layer)
    for kind, uses in (("X", x_uses), ("Z", z_uses)):
        fan, hads = [], []
        for q in range(n):
            tg = [take(y, kind) for y in uses[q]]
            if not tg:
                continue
            fan.append(Gate("FANOUT", [outputs[q]] + tg))
            hads += tg + ([outputs[q]] if kind == "X" else [])
        hl = [Gate("H", [h]) for h in hads]
        layers += [hl, fan, hl]
    layers.append([Gate("CZ", [take(a, "E"), take(b, "E")]) for a, b in edges])
    layers.append(copy_layer)
    flip = sorted(set(diag) ^ set(signs))
    layers.append([Gate("Z", [q]) for q in flip])
    layers.append([Gate("S", [q]) for q in diag])
    layers.append([Gate("H", [q]) for q in measured])
    layers.append([Gate("SWAP", [outputs[q], q]) for q in range(n)])
    return LayeredCircuit(total, [layer for layer in layers if layer])


# ---------------------------------------------------------------------------
# sparse basis-state simulation


def basis_run(c: LayeredCircuit, bits: int) -> dict[int, complex]:
    """Run a unitary circuit on the basis state |bits> keeping only nonzero amplitudes.

    Basis states are Python integers with qubit 0 as the most significant of
    c.n bits. Suited to gadget circuits, whose branching stays small on
    classical inputs.
    """
    n = c.n
    state = {int(bits): 1.0 + 0j}
    for layer in c.layers:
        for g in layer:
            state = _basis_gate(state, g, n)
        state = {k: v for k, v in state.items() if abs(v) > PRUNE_TOL}
    return state


def _basis_gate(state, g: Gate, n: int):
    pos = [n - 1 - q for q in g.qubits]
    kind = g.kind
    if kind == "X":
        f = 1 << pos[0]
        return {k ^ f: v for k, v in state.items()}
    if kind in ("CNOT", "FANOUT"):
        ctrl = 1 << pos[0]
        flip = 0
        for p in pos[1:]:
            flip |= 1 << p
        return {(k ^ flip if k & ctrl else k): v for k, v in state.items()}
    if kind == "SWAP":
        a, b = 1 << pos[0], 1 << pos[1]
        out = {}
        for k, v in state.items():
            if bool(k & a) != bool(k & b):
                k ^= a | b
            out[k] = v
        return out
    if not g.is_unitary:
        raise ValidationError(f"{kind} in a unitary-only simulation")
    u = gate_matrix(g)
    width = len(pos)
    if np.allclose(u, np.diag(np.diag(u)), atol=0):
        d = np.diag(u)
        out = {}
        for k, v in state.items():
            idx = 0
            for p in pos:
                idx = (idx << 1) | ((k >> p) & 1)
            out[k] = v * d[idx]
        return out
    out: dict[int, complex] = {}
    clear = 0
    for p in pos:
        clear |= 1 << p
    for k, v in state.items():
        idx = 0
        for p in pos:
            idx = (idx << 1) | ((k >> p) & 1)
        base = k & ~clear
        for r in range(1 << width):
            a = u[r, idx]
            if a == 0:
                continue
            kk = base
            for i, p in enumerate(pos):
                if (r >> (width - 1 - i)) & 1:
                    kk |= 1 << p
            out[kk] = out.get(kk, 0) + a * v
    return out


# ---------------------------------------------------------------------------
# gadget construction


class _Alloc:
    def __init__(self, start: int):
        self.top = start

    def take(self, k: int = 1) -> list[int]:
        out = list(range(self.top, self.top + k))
        self.top += k
        return out


# A segmented program is a list of (tag, gates) with tag "C" (Clifford) or
# "Q" (single rotation layer). Parallel composition zips segments, sequential
# composition concatenates and merges equal neighbouring tags.

def _seq(*progs):
    out: list[tuple[str, list[Gate]]] = []
    for p in progs:
        for tag, gates in p:
            if out and out[-1][0] == tag:
                out[-1] = (tag, out[-1][1] + list(gates))
            else:
                out.append((tag, list(gates)))
    return out


def _par(*progs):
    progs = [p for p in progs if p]
    if not progs:
        return []
    pattern = [t for t, _ in progs[0]]
    if any([t for t, _ in p] != pattern for p in progs):
        raise DecompositionError("parallel gadgets have different block patterns")
    return [(tag, [g for p in progs for g in p[i][1]]) for i, tag in enumerate(pattern)]


def _inverse_prog(prog):
    return [(tag, [g.inverse() for g in reversed(gates)]) for tag, gates in reversed(prog)]


def _assemble(n: int, prog) -> LayeredCircuit:
    layers = []
    for _, gates in prog:
        if gates:
            layers += LayeredCircuit.from_gates(n, gates).layers
    return LayeredCircuit(n, layers)


def _walsh(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform (sum_z v(z) (-1)^(T.z))."""
    a = np.array(values, dtype=float)
    h = 1
    while h < a.size:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1).reshape(-1)
        h *= 2
    return a


def _rotation(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)])


def _phase_gadget(inputs, out, f, clean: bool, alloc: _Alloc):
    """out ^= f(x) for a Boolean table f indexed by the input bits (input 0 = bit 0)."""
    wires = list(inputs) + [out]
    m = len(inputs)
    size = 1 << (m + 1)
    phi = np.zeros(size)
    for z in range(size):
        if (z >> m) & 1 and f[z & ((1 << m) - 1)]:
            phi[z] = math.pi
    theta = -2 * _walsh(phi) / size
    holder = {}
    for t in range(1, size):
        if abs(theta[t]) <= ANGLE_TOL:
            continue
        members = [i for i in range(m + 1) if (t >> i) & 1]
        holder[t] = wires[members[0]] if len(members) == 1 else alloc.take()[0]
    multi = [t for t in holder if bin(t).count("1") > 1]

    def fanouts(only_out: bool):
        gates = []
        for i, w in enumerate(wires):
            tg = [holder[t] for t in multi if (t >> i) & 1 and (not only_out or (t >> m) & 1)]
            if tg:
                gates.append(Gate("FANOUT", [w] + tg))
        return gates

    pre = [Gate("H", [out])] + fanouts(False)
    rot = [Gate("GENERIC1", [holder[t]], _rotation(float(theta[t]))) for t in sorted(holder)]
    post = fanouts(not clean)[::-1] + [Gate("H", [out])]
    return [("C", pre), ("Q", rot), ("C", post)]


def _ex_table(m: int, k: int) -> list[int]:
    return [int(bin(x).count("1") == k) for x in range(1 << m)]


def _th_table(m: int, t: int) -> list[int]:
    return [int(bin(x).count("1") >= t) for x in range(1 << m)]


def _ex_prog(inputs, out, k, clean, alloc):
    return _phase_gadget(inputs, out, _ex_table(len(inputs), k), clean, alloc)


def _th_prog(inputs, out, t, clean, alloc):
    """Fanout the inputs, compute EX^k for every k >= t in parallel, take the parity."""
    m = len(inputs)
    ks = list(range(t, m + 1))
    if not ks:
        return [("C", []), ("Q", []), ("C", [])] + ([("Q", []), ("C", [])] if clean else [])
    regs = [alloc.take(m) for _ in ks]
    ex_out = alloc.take(len(ks))
    copy = [Gate("FANOUT", [inputs[i]] + [r[i] for r in regs]) for i in range(m)]
    ex = _par(*[_ex_prog(r, e, k, clean, alloc) for r, e, k in zip(regs, ex_out, ks)])
    hads = [Gate("H", [q]) for q in [out] + ex_out]
    parity = hads + [Gate("FANOUT", [out] + ex_out)] + hads
    prog = _seq([("C", copy)], ex, [("C", parity)])
    if clean:
        prog = _seq(prog, ex, [("C", copy)])
    return prog


@dataclass(frozen=True, eq=False)
class GadgetReport:
    circuit: LayeredCircuit
    accounting: object
    functional_table: list
    clean: bool
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    ceiling: int
    name: str = ""
    violations: tuple[str, ...] = field(default=())

    @property
    def correct(self) -> bool:
        return all(row["p_correct"] >= 1 - FUNCTIONAL_TOL for row in self.functional_table)

    @property
    def restored(self) -> bool:
        return all(row["ancilla_fidelity"] >= 1 - FUNCTIONAL_TOL for row in self.functional_table)

    @property
    def within_ceiling(self) -> bool:
        return self.accounting.mh_level <= self.ceiling and not self.violations

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "clean": self.clean,
            "width": self.circuit.n,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "ceiling": self.ceiling,
            "accounting": self.accounting.as_dict(),
            "violations": list(self.violations),
            "correct": self.correct,
            "restored": self.restored,
            "functional_table": self.functional_table,
        }


def _truth_table(c: LayeredCircuit, inputs, outputs, fn) -> list[dict]:
    n = c.n
    ins = [n - 1 - q for q in inputs]
    outs = [n - 1 - q for q in outputs]
    data = set(inputs) | set(outputs)
    anc_mask = 0
    for q in range(n):
        if q not in data:
            anc_mask |= 1 << (n - 1 - q)
    rows = []
    for x in range(1 << len(inputs)):
        bits = [(x >> i) & 1 for i in range(len(inputs))]
        start = 0
        for b, p in zip(bits, ins):
            start |= b << p
        want = fn(bits)
        final = basis_run(c, start)
        good = anc = 0.0
        for k, v in final.items():
            w = abs(v) ** 2
            if not k & anc_mask:
                anc += w
            if all(((k >> p) & 1) == b for p, b in zip(ins, bits)) and all(
                ((k >> p) & 1) == b for p, b in zip(outs, want)
            ):
                good += w
        rows.append({"input": bits, "expected": list(want), "p_correct": good, "ancilla_fidelity": anc})
    return rows


def _report(name, c, inputs, outputs, fn, clean, ceiling) -> GadgetReport:
    acc = account(c)
    rep = GadgetReport(
        circuit=c,
        accounting=acc,
        functional_table=_truth_table(c, inputs, outputs, fn) if len(inputs) <= GADGET_FANIN_CAP else [],
        clean=clean,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        ceiling=ceiling,
        name=name,
        violations=tuple(check_relations(acc)),
    )
    if not rep.within_ceiling:
        raise DecompositionError(
            f"{name}: mh_level {acc.mh_level} exceeds the ceiling {ceiling} or relations fail {rep.violations}"
        )
    return rep


def _check_fanin(m: int) -> None:
    if m < 1:
        raise ValidationError("gadgets need at least one input")
    if m > GADGET_FANIN_CAP:
        raise FeasibilityError(f"fan-in {m} exceeds the direct-construction cap {GADGET_FANIN_CAP}")


def build_exact_gadget(m: int, k: int, clean: bool = False) -> GadgetReport:
    """EX^k on m inputs: inputs 0..m-1, output m, ancillas after.

    Ceilings on the MH level are 4 (nonclean) and 6 (clean). The nonclean
    variant leaves the input-only parities in their ancillas.
    """
    _check_fanin(m)
    if not 0 <= k <= m:
        raise ValidationError(f"EX^{k} is infeasible on {m} inputs")
    alloc = _Alloc(m + 1)
    prog = _ex_prog(list(range(m)), m, k, clean, alloc)
    c = _assemble(alloc.top, prog)
    return _report(f"EX^{k}_{m}", c, list(range(m)), [m], lambda b: [int(sum(b) == k)], clean, 6 if clean else 4)


def build_threshold_gadget(m: int, t: int, clean: bool = False) -> GadgetReport:
    """TH^t on m inputs (t = m + 1 gives the constant 0); ceilings 4 and 8."""
    _check_fanin(m)
    if not 0 <= t <= m + 1:
        raise ValidationError(f"TH^{t} is infeasible on {m} inputs")
    alloc = _Alloc(m + 1)
    prog = _th_prog(list(range(m)), m, t, clean, alloc)
    c = _assemble(alloc.top, prog)
    return _report(f"TH^{t}_{m}", c, list(range(m)), [m], lambda b: [int(sum(b) >= t)], clean, 8 if clean else 4)


# ---------------------------------------------------------------------------
# TC0


@dataclass(frozen=True)
class Tc0Spec:
    """Layered threshold circuit.

    Wires 0..inputs-1 are the inputs; gate i (in file order) defines wire
    inputs + i. Outputs default to the gates of the last layer.
    """

    inputs: int
    gates: tuple[tuple[int, int, tuple[int, ...]], ...]
    outputs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.inputs < 0:
            raise ValidationError("negative input count")
        defined = {w: 0 for w in range(self.inputs)}
        for i, (layer, t, wires) in enumerate(self.gates):
            if layer < 1:
                raise ValidationError(f"gate {i}: layers start at 1")
            if not wires:
                raise ValidationError(f"gate {i}: no inputs")
            if len(set(wires)) != len(wires):
                raise ValidationError(f"gate {i}: repeated input wire")
            for w in wires:
                if w not in defined:
                    raise ValidationError(f"gate {i}: wire {w} is not defined before it")
                if defined[w] >= layer:
                    raise ValidationError(f"gate {i}: wire {w} comes from layer {defined[w]} >= {layer}")
            if not 0 <= t <= len(wires) + 1:
                raise ValidationError(f"gate {i}: threshold {t} out of range")
            defined[self.inputs + i] = layer
        if not self.outputs and self.gates:
            last = max(g[0] for g in self.gates)
            object.__setattr__(self, "outputs", tuple(self.inputs + i for i, g in enumerate(self.gates) if g[0] == last))
        for w in self.outputs:
            if w not in defined:
                raise ValidationError(f"output wire {w} is not defined")

    @property
    def depth(self) -> int:
        return len({g[0] for g in self.gates})


_TC0_LINE = re.compile(r"^GATE\s+(\d+)\s+TH\s+(\d+)\s+([\d\s,]+)$")


def parse_tc0(text: str) -> Tc0Spec:
    """Parse `INPUTS k`, `GATE <layer> TH <t> <wires>` and optional `OUTPUTS <wires>` lines."""
    inputs = None
    gates = []
    outputs: tuple[int, ...] = ()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0].upper()
        if head == "INPUTS":
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("INPUTS takes one nonnegative integer", ln)
            inputs = int(parts[1])
        elif head == "OUTPUTS":
            try:
                outputs = tuple(int(w) for w in line.split()[1:])
            except ValueError:
                raise ParseError("OUTPUTS takes wire indices", ln) from None
        elif head == "GATE":
            mt = _TC0_LINE.match(line)
            if not mt:
                raise ParseError("expected GATE <layer> TH <t> <input wires>", ln)
            wires = tuple(int(w) for w in mt.group(3).replace(",", " ").split())
            gates.append((int(mt.group(1)), int(mt.group(2)), wires))
        else:
            raise ParseError(f"unknown directive {head!r}", ln)
    if inputs is None:
        raise ParseError("missing INPUTS line")
    try:
        return Tc0Spec(inputs, tuple(gates), outputs)
    except ValidationError as e:
        raise ParseError(str(e)) from None


def evaluate_tc0(spec: Tc0Spec, bits) -> tuple[int, ...]:
    vals = [int(b) for b in bits]
    if len(vals) != spec.inputs:
        raise ValidationError(f"expected {spec.inputs} input bits")
    for _, t, wires in spec.gates:
        vals.append(int(sum(vals[w] for w in wires) >= t))
    return tuple(vals[w] for w in spec.outputs)


def _tc0_prog(spec: Tc0Spec, clean: bool):
    if spec.depth > TC0_DEPTH_CAP:
        raise FeasibilityError(f"TC0 depth {spec.depth} exceeds {TC0_DEPTH_CAP}")
    for _, _, wires in spec.gates:
        _check_fanin(len(wires))
    alloc = _Alloc(spec.inputs)
    qubit = {w: w for w in range(spec.inputs)}
    for i in range(len(spec.gates)):
        qubit[spec.inputs + i] = alloc.take()[0]
    prog = []
    for layer in sorted({g[0] for g in spec.gates}):
        members = [(i, g) for i, g in enumerate(spec.gates) if g[0] == layer]
        fan: dict[int, list[int]] = {}
        private = []
        for _, (_, _, wires) in members:
            regs = alloc.take(len(wires))
            for w, r in zip(wires, regs):
                fan.setdefault(qubit[w], []).append(r)
            private.append(regs)
        copy = [Gate("FANOUT", [src] + tg) for src, tg in fan.items()]
        ths = [_th_prog(regs, qubit[spec.inputs + i], t, False, alloc) for regs, (i, (_, t, _)) in zip(private, members)]
        prog = _seq(prog, [("C", copy)], _par(*ths))
    outs = [qubit[w] for w in spec.outputs]
    if clean:
        result = alloc.take(len(outs))
        copy_out = [Gate("CNOT", [o, r]) for o, r in zip(outs, result)]
        prog = _seq(prog, [("C", copy_out)], _inverse_prog(prog))
        outs = result
    return prog, alloc.top, outs


def compile_tc0(spec: Tc0Spec | str, clean: bool = False) -> tuple[LayeredCircuit, object]:
    """Compile a layered threshold circuit; inputs sit on the first qubits and
    outputs on the last ones. The MH level is at most 4d (8d when clean)."""
    spec = parse_tc0(spec) if isinstance(spec, str) else spec
    prog, width, outs = _tc0_prog(spec, clean)
    c = _assemble(width, prog)
    others = [q for q in range(spec.inputs, width) if q not in set(outs)]
    mapping = {q: q for q in range(spec.inputs)}
    for i, q in enumerate(others + outs):
        mapping[q] = spec.inputs + i
    c = c.relabeled(mapping, width)
    return c, account(c)


def build_tc0_gadget(spec: Tc0Spec | str, clean: bool = False) -> GadgetReport:
    spec = parse_tc0(spec) if isinstance(spec, str) else spec
    c, _ = compile_tc0(spec, clean)
    k = len(spec.outputs)
    outputs = list(range(c.n - k, c.n))
    ceiling = (8 if clean else 4) * spec.depth
    if spec.inputs > TC0_TABLE_CAP:
        acc = account(c)
        rep = GadgetReport(c, acc, [], clean, tuple(range(spec.inputs)), tuple(outputs), ceiling, "tc0",
                           tuple(check_relations(acc)))
        if not rep.within_ceiling:
            raise DecompositionError(f"tc0: mh_level {acc.mh_level} exceeds the ceiling {ceiling}")
        return rep
    return _report("tc0", c, list(range(spec.inputs)), outputs, lambda b: list(evaluate_tc0(spec, b)), clean, ceiling)
