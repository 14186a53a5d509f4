"""Layered circuit IR, the `.mhq` text format, MH block decomposition and accounting.

Format summary (one gate per line, `#` starts a comment)::

    QUBITS 4                 # optional; otherwise inferred from the largest index
    H 0
    /                        # layer separator; a blank line also separates layers
    CNOT 0 1 / FANOUT 1 2 3  # `/` may also appear inline
    GENERIC1 2 re,im re,im re,im re,im
    GENERIC2 0 1 <16 re,im pairs, row-major, may continue on following lines>
    MEASURE_Z 3 0            # measure qubit 3 into classical bit 0
    CLASSICAL_PARITY X 2 0 1 # apply X to qubit 2 if c0 xor c1 = 1
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionError, ParseError, ValidationError
from .pauli import CLIFFORD_KINDS

__all__ = [
    "Gate",
    "LayeredCircuit",
    "Block",
    "MhDecomposition",
    "ComplexityReport",
    "parse_circuit",
    "to_mhq",
    "mh_decompose",
    "account",
    "check_relations",
    "random_circuit",
    "gate_matrix",
]

ONE_QUBIT_KINDS = {"H", "S", "X", "Y", "Z", "T", "GENERIC1"}
TWO_QUBIT_KINDS = {"CNOT", "CZ", "SWAP", "GENERIC2"}
ALL_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS | {"FANOUT", "MEASURE_Z", "CLASSICAL_PARITY"}
# Gate kinds allowed in a Clifford block; measurements and classically
# controlled Paulis are stabilizer operations.
CLIFFORD_BLOCK_KINDS = CLIFFORD_KINDS | {"MEASURE_Z", "CLASSICAL_PARITY"}
UNITARY_TOL = 1e-10
DEFAULT_QNC0_BUDGET = 3

_S2 = 1 / np.sqrt(2)
_FIXED = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = None
    cbits: tuple[int, ...] = ()
    pauli: str = ""

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "cbits", tuple(int(c) for c in self.cbits))
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        _validate_gate(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        same_m = (self.matrix is None and other.matrix is None) or (
            self.matrix is not None and other.matrix is not None and np.array_equal(self.matrix, other.matrix)
        )
        return (self.kind, self.qubits, self.cbits, self.pauli) == (
            other.kind, other.qubits, other.cbits, other.pauli
        ) and same_m

    def __hash__(self) -> int:
        return hash((self.kind, self.qubits, self.cbits, self.pauli))

    @property
    def is_clifford(self) -> bool:
        return self.kind in CLIFFORD_BLOCK_KINDS

    @property
    def is_unitary(self) -> bool:
        return self.kind not in ("MEASURE_Z", "CLASSICAL_PARITY")

    def unitary(self) -> np.ndarray:
        return gate_matrix(self)

    def inverse(self) -> "Gate":
        if self.kind in ("H", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "FANOUT"):
            return self
        if self.kind in ("S", "T"):
            return Gate("GENERIC1", self.qubits, gate_matrix(self).conj().T)
        if self.kind in ("GENERIC1", "GENERIC2"):
            return Gate(self.kind, self.qubits, self.matrix.conj().T)
        raise ValidationError(f"{self.kind} has no inverse")


def _validate_gate(g: Gate) -> None:
    if g.kind not in ALL_KINDS:
        raise ValidationError(f"unknown gate kind {g.kind!r}")
    if len(set(g.qubits)) != len(g.qubits):
        raise ValidationError(f"{g.kind} acts twice on one qubit: {g.qubits}")
    if any(q < 0 for q in g.qubits):
        raise ValidationError("negative qubit index")
    arity = len(g.qubits)
    if g.kind in ONE_QUBIT_KINDS or g.kind in ("MEASURE_Z", "CLASSICAL_PARITY"):
        if arity != 1:
            raise ValidationError(f"{g.kind} takes one qubit, got {arity}")
    elif g.kind in TWO_QUBIT_KINDS and arity != 2:
        raise ValidationError(f"{g.kind} takes two qubits, got {arity}")
    elif g.kind == "FANOUT" and arity < 2:
        raise ValidationError("FANOUT needs a control and at least one target")
    if g.kind in ("GENERIC1", "GENERIC2"):
        dim = 2 if g.kind == "GENERIC1" else 4
        if g.matrix is None or g.matrix.shape != (dim, dim):
            raise ValidationError(f"{g.kind} needs a {dim}x{dim} matrix")
        if not np.allclose(g.matrix.conj().T @ g.matrix, np.eye(dim), atol=UNITARY_TOL, rtol=0):
            raise ValidationError(f"{g.kind} matrix is not unitary")
    if g.kind == "MEASURE_Z" and len(g.cbits) != 1:
        raise ValidationError("MEASURE_Z needs exactly one classical bit")
    if g.kind == "CLASSICAL_PARITY" and (g.pauli not in ("X", "Y", "Z") or not g.cbits):
        raise ValidationError("CLASSICAL_PARITY needs a Pauli letter and classical bits")


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of a gate on its own qubits, in the order listed."""
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    if g.kind in ("GENERIC1", "GENERIC2"):
        return g.matrix
    if g.kind == "FANOUT":
        k = len(g.qubits)
        dim = 1 << k
        idx = np.arange(dim)
        ctrl = (idx >> (k - 1)) & 1
        mask = (1 << (k - 1)) - 1
        image = np.where(ctrl == 1, idx ^ mask, idx)
        u = np.zeros((dim, dim), dtype=complex)
        u[image, idx] = 1
        return u
    raise ValidationError(f"{g.kind} is not a unitary gate")


@dataclass(frozen=True)
class LayeredCircuit:
    n: int
    layers: tuple[tuple[Gate, ...], ...] = ()

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for li, layer in enumerate(layers):
            seen: set[int] = set()
            for g in layer:
                for q in g.qubits:
                    if q >= self.n:
                        raise ValidationError(f"layer {li}: qubit {q} out of range for n={self.n}")
                    if q in seen:
                        raise ValidationError(f"layer {li}: overlapping supports on qubit {q}")
                    seen.add(q)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    @property
    def num_cbits(self) -> int:
        top = -1
        for g in self.gates():
            if g.cbits:
                top = max(top, max(g.cbits))
        return top + 1

    @property
    def is_clifford(self) -> bool:
        return all(g.kind in CLIFFORD_KINDS for g in self.gates())

    @property
    def is_unitary(self) -> bool:
        return all(g.is_unitary for g in self.gates())

    def reversed(self) -> "LayeredCircuit":
        """Same gates with layer order reversed (the wiring of the inverse circuit)."""
        return LayeredCircuit(self.n, self.layers[::-1])

    def inverse(self) -> "LayeredCircuit":
        return LayeredCircuit(self.n, [[g.inverse() for g in layer] for layer in self.layers[::-1]])

    def then(self, other: "LayeredCircuit") -> "LayeredCircuit":
        n = max(self.n, other.n)
        return LayeredCircuit(n, self.layers + other.layers)

    def widened(self, n: int) -> "LayeredCircuit":
        return LayeredCircuit(n, self.layers)

    def relabeled(self, mapping, n: int) -> "LayeredCircuit":
        """Rename qubit q to mapping[q] on an n-qubit register."""
        out = []
        for layer in self.layers:
            out.append([
                Gate(g.kind, [mapping[q] for q in g.qubits], g.matrix, g.cbits, g.pauli) for g in layer
            ])
        return LayeredCircuit(n, out)

    @classmethod
    def from_gates(cls, n: int, gates) -> "LayeredCircuit":
        """Pack a gate sequence into as-soon-as-possible layers."""
        ready = [0] * n
        layers: list[list[Gate]] = []
        cready: dict[int, int] = {}
        for g in gates:
            level = max([ready[q] for q in g.qubits] + [cready.get(c, 0) for c in g.cbits])
            while len(layers) <= level:
                layers.append([])
            layers[level].append(g)
            for q in g.qubits:
                ready[q] = level + 1
            for c in g.cbits:
                cready[c] = level + 1
        return cls(n, layers)

    @classmethod
    def empty(cls, n: int) -> "LayeredCircuit":
        return cls(n, ())

    def to_mhq(self) -> str:
        return to_mhq(self)


# ---------------------------------------------------------------------------
# .mhq parsing / printing


def _parse_complex(tok: str, line: int) -> complex:
    parts = tok.split(",")
    if len(parts) != 2:
        raise ParseError(f"expected re,im pair, got {tok!r}", line)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ParseError(f"bad number in {tok!r}", line) from None


def _parse_int(tok: str, line: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}", line) from None
    if v < 0:
        raise ParseError(f"negative index {v}", line)
    return v


def _build_gate(kind: str, args: list[str], values: list[complex], line: int) -> Gate:
    try:
        if kind == "MEASURE_Z":
            if len(args) != 2:
                raise ParseError("MEASURE_Z expects <qubit> <cbit>", line)
            return Gate(kind, [_parse_int(args[0], line)], cbits=[_parse_int(args[1], line)])
        if kind == "CLASSICAL_PARITY":
            if len(args) < 3:
                raise ParseError("CLASSICAL_PARITY expects <X|Y|Z> <qubit> <cbits...>", line)
            return Gate(kind, [_parse_int(args[1], line)], cbits=[_parse_int(a, line) for a in args[2:]], pauli=args[0])
        qubits = [_parse_int(a, line) for a in args]
        if kind in ("GENERIC1", "GENERIC2"):
            dim = 2 if kind == "GENERIC1" else 4
            return Gate(kind, qubits, np.array(values).reshape(dim, dim))
        return Gate(kind, qubits)
    except ParseError:
        raise
    except ValidationError as exc:
        raise ParseError(str(exc), line) from None


def parse_circuit(text: str, n: int | None = None) -> LayeredCircuit:
    layers: list[list[Gate]] = []
    current: list[Gate] = []
    declared_n = n
    pending = None  # (kind, args, values, line) for a GENERIC gate awaiting numbers

    def need(kind):
        return 4 if kind == "GENERIC1" else 16

    def close_layer():
        nonlocal current
        if current:
            layers.append(current)
            current = []

    def flush_pending(line):
        nonlocal pending
        if pending is not None:
            kind, args, values, start = pending
            if len(values) != need(kind):
                raise ParseError(f"{kind} expects {need(kind)} complex entries, got {len(values)}", start)
            current.append(_build_gate(kind, args, values, start))
            pending = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            flush_pending(lineno)
            close_layer()
            continue
        segments = body.split("/")
        for si, seg in enumerate(segments):
            if si > 0:
                flush_pending(lineno)
                close_layer()
            toks = seg.split()
            if not toks:
                continue
            if pending is not None and "," in toks[0]:
                pending[2].extend(_parse_complex(t, lineno) for t in toks)
                if len(pending[2]) > need(pending[0]):
                    raise ParseError(f"too many matrix entries for {pending[0]}", lineno)
                continue
            flush_pending(lineno)
            kind = toks[0].upper()
            if kind == "QUBITS":
                if len(toks) != 2:
                    raise ParseError("QUBITS expects one integer", lineno)
                declared_n = _parse_int(toks[1], lineno)
                continue
            if kind not in ALL_KINDS:
                raise ParseError(f"unknown gate {toks[0]!r}", lineno)
            if kind in ("GENERIC1", "GENERIC2"):
                nq = 1 if kind == "GENERIC1" else 2
                if len(toks) < 1 + nq:
                    raise ParseError(f"{kind} expects {nq} qubit indices", lineno)
                values = [_parse_complex(t, lineno) for t in toks[1 + nq:]]
                pending = (kind, toks[1:1 + nq], values, lineno)
                if len(values) > need(kind):
                    raise ParseError(f"too many matrix entries for {kind}", lineno)
                continue
            current.append(_build_gate(kind, toks[1:], [], lineno))
    flush_pending(len(text.splitlines()))
    close_layer()
    top = max((q for layer in layers for g in layer for q in g.qubits), default=-1)
    width = top + 1 if declared_n is None else declared_n
    if width <= top:
        raise ParseError(f"QUBITS {width} but qubit {top} is used")
    try:
        return LayeredCircuit(width, layers)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _gate_line(g: Gate) -> str:
    if g.kind == "MEASURE_Z":
        return f"MEASURE_Z {g.qubits[0]} {g.cbits[0]}"
    if g.kind == "CLASSICAL_PARITY":
        return f"CLASSICAL_PARITY {g.pauli} {g.qubits[0]} " + " ".join(map(str, g.cbits))
    head = " ".join([g.kind] + [str(q) for q in g.qubits])
    if g.kind in ("GENERIC1", "GENERIC2"):
        vals = " ".join(f"{_fmt_float(v.real)},{_fmt_float(v.imag)}" for v in g.matrix.reshape(-1))
        return f"{head} {vals}"
    return head


def to_mhq(c: LayeredCircuit) -> str:
    """Deterministic text form; parse_circuit(to_mhq(c)) reproduces c."""
    lines = [f"QUBITS {c.n}"]
    for i, layer in enumerate(c.layers):
        if i:
            lines.append("/")
        lines.extend(_gate_line(g) for g in layer)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# MH decomposition and accounting


@dataclass(frozen=True)
class Block:
    tag: str  # "C" (Clifford) or "Q" (constant-depth two-qubit)
    layers: tuple[tuple[Gate, ...], ...] = ()

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class MhDecomposition:
    n: int
    blocks: tuple[Block, ...]
    qnc0_budget: int

    @property
    def starts_with(self) -> str | None:
        return self.blocks[0].tag if self.blocks else None

    @property
    def mh_level(self) -> int:
        return max(len(self.blocks) - 1, 0)

    @property
    def clifford_rounds(self) -> int:
        return sum(1 for b in self.blocks if b.tag == "C")

    @property
    def qnc0_rounds(self) -> int:
        return sum(1 for b in self.blocks if b.tag == "Q")

    def recompose(self) -> LayeredCircuit:
        return LayeredCircuit(self.n, [layer for b in self.blocks for layer in b.layers])


def _layer_tag(layer) -> str:
    if all(g.kind in CLIFFORD_BLOCK_KINDS for g in layer):
        return "C"
    wide = [g for g in layer if len(g.qubits) > 2]
    if wide:
        raise DecompositionError(
            f"layer mixes non-Clifford gates with a {len(wide[0].qubits)}-qubit {wide[0].kind}"
        )
    return "Q"


def _is_measure_layer(layer) -> bool:
    return any(g.kind == "MEASURE_Z" for g in layer)


def mh_decompose(c: LayeredCircuit, qnc0_budget: int = DEFAULT_QNC0_BUDGET) -> MhDecomposition:
    """Greedy left-to-right split into alternating Clifford / QNC0 blocks.

    All-Clifford layers extend a Clifford block; other layers extend the
    current QNC0 block until it reaches `qnc0_budget` layers. A measurement
    layer closes its block. When two blocks of the same kind would be
    adjacent, an empty block of the other kind is placed between them.
    """
    if qnc0_budget < 1:
        raise ValidationError("qnc0_budget must be at least 1")
    blocks: list[list] = []  # [tag, layers]
    closed = False
    for layer in c.layers:
        tag = _layer_tag(layer)
        if blocks and not closed and blocks[-1][0] == tag and (tag == "C" or len(blocks[-1][1]) < qnc0_budget):
            blocks[-1][1].append(layer)
        else:
            if blocks and blocks[-1][0] == tag:
                blocks.append(["Q" if tag == "C" else "C", []])
            blocks.append([tag, [layer]])
        closed = _is_measure_layer(layer)
    return MhDecomposition(c.n, tuple(Block(t, tuple(ls)) for t, ls in blocks), qnc0_budget)


@dataclass(frozen=True)
class ComplexityReport:
    depth: int
    clifford_rounds: int
    qnc0_rounds: int
    mh_level: int
    t_count: int
    t_depth: int
    fanout_depth: int
    measurement_rounds: int
    fanout_layers: int = 0
    clifford_t: bool = True

    def as_dict(self) -> dict:
        return {
            "depth": self.depth,
            "clifford_rounds": self.clifford_rounds,
            "qnc0_rounds": self.qnc0_rounds,
            "mh_level": self.mh_level,
            "t_count": self.t_count,
            "t_depth": self.t_depth,
            "fanout_depth": self.fanout_depth,
            "fanout_layers": self.fanout_layers,
            "measurement_rounds": self.measurement_rounds,
            "clifford_t": self.clifford_t,
        }


# Each Clifford block can be rebuilt with at most this many fanout layers
# (teleportation-based construction in `compile.clifford_to_fanout`).
FANOUT_LAYERS_PER_CLIFFORD_BLOCK = 4


def account(c, qnc0_budget: int = DEFAULT_QNC0_BUDGET) -> ComplexityReport:
    """Complexity report for a circuit or an existing decomposition.

    `fanout_layers` is the raw number of layers holding a FANOUT gate.
    `fanout_depth` is the fanout depth this circuit is certified to admit:
    per Clifford block, the smaller of its raw fanout layer count and the
    constant achieved by recompiling the block through teleportation.
    FANOUT gates inside QNC0 blocks have two qubits, i.e. they are CNOTs.
    """
    dec = c if isinstance(c, MhDecomposition) else mh_decompose(c, qnc0_budget)
    layers = [layer for b in dec.blocks for layer in b.layers]
    t_count = sum(1 for layer in layers for g in layer if g.kind == "T")
    t_depth = sum(1 for layer in layers if any(g.kind == "T" for g in layer))
    fanout_layers = sum(1 for layer in layers if any(g.kind == "FANOUT" for g in layer))
    fanout_depth = 0
    for b in dec.blocks:
        if b.tag == "C":
            raw = sum(1 for layer in b.layers if any(g.kind == "FANOUT" for g in layer))
            fanout_depth += min(raw, FANOUT_LAYERS_PER_CLIFFORD_BLOCK)
    clifford_t = all(g.kind in CLIFFORD_KINDS or g.kind == "T" for layer in layers for g in layer)
    return ComplexityReport(
        depth=len(layers),
        clifford_rounds=dec.clifford_rounds,
        qnc0_rounds=dec.qnc0_rounds,
        mh_level=dec.mh_level,
        t_count=t_count,
        t_depth=t_depth,
        fanout_depth=fanout_depth,
        measurement_rounds=sum(1 for layer in layers if _is_measure_layer(layer)),
        fanout_layers=fanout_layers,
        clifford_t=clifford_t,
    )


def check_relations(r: ComplexityReport) -> list[str]:
    """Names of violated accounting relations (empty when all hold).

    The T-depth relation is only meaningful for unitary Clifford+T circuits
    and is skipped otherwise.
    """
    bad = []
    half = r.mh_level / 2
    if not half <= r.clifford_rounds:
        bad.append("clifford_rounds >= mh_level/2")
    if not r.clifford_rounds <= half + 1:
        bad.append("clifford_rounds <= mh_level/2 + 1")
    if not half <= r.qnc0_rounds:
        bad.append("qnc0_rounds >= mh_level/2")
    if not r.qnc0_rounds <= half + 1:
        bad.append("qnc0_rounds <= mh_level/2 + 1")
    if r.clifford_t and not half <= r.t_depth:
        bad.append("t_depth >= mh_level/2")
    if not r.t_depth <= r.t_count:
        bad.append("t_depth <= t_count")
    if not r.fanout_depth <= 2 * r.mh_level + 4:
        bad.append("fanout_depth <= 2*mh_level + 4")
    if not r.measurement_rounds <= 2 * r.mh_level + 4:
        bad.append("measurement_rounds <= 2*mh_level + 4")
    return bad


# ---------------------------------------------------------------------------
# random circuits


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


_GATE_SETS = {
    "clifford": (["H", "S", "X", "Y", "Z"], ["CNOT", "CZ", "SWAP"]),
    "clifford_t": (["H", "S", "X", "Z", "T"], ["CNOT", "CZ"]),
    "generic": (["GENERIC1"], ["GENERIC2"]),
    "mixed": (["H", "S", "T", "GENERIC1"], ["CNOT", "CZ", "GENERIC2"]),
}


def _random_layer(n, rng, singles, doubles, fill: float = 0.8, fanout: bool = False):
    order = rng.permutation(n).tolist()
    layer = []
    while order:
        if fanout and len(order) >= 3 and rng.random() < 0.3:
            k = int(rng.integers(3, min(len(order), 5) + 1))
            qs, order = order[:k], order[k:]
            layer.append(Gate("FANOUT", qs))
            continue
        if len(order) >= 2 and rng.random() < 0.5:
            a, b = order.pop(), order.pop()
            if rng.random() < fill:
                kind = str(rng.choice(doubles))
                m = haar_unitary(4, rng) if kind == "GENERIC2" else None
                layer.append(Gate(kind, (a, b), m))
        else:
            a = order.pop()
            if rng.random() < fill:
                kind = str(rng.choice(singles))
                m = haar_unitary(2, rng) if kind == "GENERIC1" else None
                layer.append(Gate(kind, (a,), m))
    return layer


def random_circuit(n: int, depth: int, rng: np.random.Generator, gate_set: str = "clifford", fanout: bool = False) -> LayeredCircuit:
    """Random layered circuit over one of the named gate sets."""
    singles, doubles = _GATE_SETS[gate_set]
    return LayeredCircuit(n, [_random_layer(n, rng, singles, doubles, fanout=fanout) for _ in range(depth)])


def random_accounting_circuit(n: int, depth: int, rng: np.random.Generator) -> LayeredCircuit:
    """Random circuit mixing Clifford, FANOUT, Clifford+T, generic and measurement layers.

    Each layer is drawn from a single family so the result is always decomposable.
    """
    layers = []
    cbit = 0
    for _ in range(depth):
        family = rng.choice(["clifford", "fanout", "clifford_t", "generic", "measure"], p=[0.3, 0.15, 0.3, 0.15, 0.1])
        if family == "measure":
            qs = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
            layer = []
            for q in sorted(qs.tolist()):
                layer.append(Gate("MEASURE_Z", [q], cbits=[cbit]))
                cbit += 1
            layers.append(layer)
        elif family == "fanout":
            layers.append(_random_layer(n, rng, *_GATE_SETS["clifford"], fanout=True))
        else:
            layers.append(_random_layer(n, rng, *_GATE_SETS[str(family)]))
    return LayeredCircuit(n, layers)
