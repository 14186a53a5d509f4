"""Pauli strings and stabilizer tableaux in the symplectic representation.

A Pauli string is stored as two bit vectors (x, z) plus a phase exponent
``phase`` in Z/4, and denotes ``i**phase * P_0 (x) ... (x) P_{n-1}`` where
(x, z) = (1, 0), (0, 1), (1, 1) select X, Z, Y respectively. Qubit 0 is the
most significant bit of a computational-basis index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .errors import (
    DimensionError,
    FeasibilityError,
    GateClassError,
    InvalidGroupError,
    RegionError,
)

__all__ = [
    "PauliString",
    "StabilizerTableau",
    "as_region",
    "pauli_mul",
    "commutes",
    "canonicalize",
    "restrict",
    "reduced_density",
    "overlap",
    "conjugate_by_clifford",
    "group_elements",
    "stabilizer_entropy",
    "CLIFFORD_KINDS",
]

DENSE_REGION_CAP = 12
ENUMERATION_RANK_CAP = 20
CLIFFORD_KINDS = frozenset({"H", "S", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "FANOUT"})

_PREFIX = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PREFIX_OUT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(r"^\s*([+-]?i?)([IXYZ]*)\s*$")


def as_region(indices, n: int) -> tuple[int, ...]:
    """Validate a qubit subset and return it as a sorted tuple."""
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise RegionError(f"region has repeated indices: {idx}")
    for i in idx:
        if i < 0 or i >= n:
            raise RegionError(f"qubit {i} out of range for n={n}")
    return tuple(sorted(idx))


def _phase_rule(x1, z1, x2, z2) -> int:
    if x1 and z1:
        return z2 - x2
    if x1:
        return z2 * (2 * x2 - 1)
    if z1:
        return x2 * (1 - 2 * z2)
    return 0


# indexed by 8 x1 + 4 z1 + 2 x2 + z2
_PHASE_TABLE = np.array([_phase_rule(*map(int, f"{k:04b}")) for k in range(16)], dtype=np.int64)


def _phase_terms(x1, z1, x2, z2) -> np.ndarray:
    """Per-qubit exponent of i picked up when multiplying P1 * P2."""
    idx = (np.asarray(x1, np.uint8) << 3) | (np.asarray(z1, np.uint8) << 2) | (np.asarray(x2, np.uint8) << 1) | np.asarray(z2, np.uint8)
    return _PHASE_TABLE[idx]


@dataclass(frozen=True, eq=False)
class PauliString:
    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.uint8).reshape(-1) & 1
        z = np.asarray(self.z, dtype=np.uint8).reshape(-1) & 1
        if x.shape != z.shape:
            raise DimensionError("x and z bit vectors differ in length")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        m = _PAULI_RE.match(text)
        if not m or m.group(1) not in _PREFIX:
            raise ValueError(f"not a Pauli string: {text!r}")
        letters = m.group(2)
        x = np.array([c in "XY" for c in letters], dtype=np.uint8)
        z = np.array([c in "ZY" for c in letters], dtype=np.uint8)
        return cls(x, z, _PREFIX[m.group(1)])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8), 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[qubit] = letter in "XY"
        z[qubit] = letter in "ZY"
        return cls(x, z, 0)

    @classmethod
    def from_sparse(cls, n: int, terms: dict[int, str], phase: int = 0) -> "PauliString":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        for q, letter in terms.items():
            x[q] = letter in "XY"
            z[q] = letter in "ZY"
        return cls(x, z, phase)

    def letters(self) -> str:
        table = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        return "".join(table[(int(a), int(b))] for a, b in zip(self.x, self.z))

    def __str__(self) -> str:
        return _PREFIX_OUT[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.x | self.z))

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def restricted(self, region) -> "PauliString":
        r = list(region)
        return PauliString(self.x[r], self.z[r], self.phase)

    def embedded(self, n: int, region) -> "PauliString":
        """Place this string on `region` of an n-qubit register."""
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        r = list(region)
        x[r] = self.x
        z[r] = self.z
        return PauliString(x, z, self.phase)

    def matrix(self) -> np.ndarray:
        """Dense 2**n x 2**n matrix (small n only)."""
        if self.n > DENSE_REGION_CAP:
            raise FeasibilityError(f"dense Pauli matrix refused for n={self.n}")
        dim = 1 << self.n
        return apply_pauli_left(self, np.eye(dim, dtype=complex))


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    if p.n != q.n:
        raise DimensionError(f"cannot multiply Paulis on {p.n} and {q.n} qubits")
    extra = int(_phase_terms(p.x, p.z, q.x, q.z).sum())
    return PauliString(p.x ^ q.x, p.z ^ q.z, p.phase + q.phase + extra)


def commutes(p: PauliString, q: PauliString) -> bool:
    if p.n != q.n:
        raise DimensionError(f"cannot compare Paulis on {p.n} and {q.n} qubits")
    form = int(np.dot(p.x, q.z) + np.dot(q.x, p.z))
    return form % 2 == 0


def _index_bits(k: int) -> np.ndarray:
    idx = np.arange(1 << k)
    shifts = np.arange(k - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.int64)


def apply_pauli_left(p: PauliString, mat: np.ndarray) -> np.ndarray:
    """Return P @ mat using the permutation-with-signs action of P."""
    k = p.n
    dim = 1 << k
    if mat.shape[0] != dim:
        raise DimensionError("matrix row count does not match Pauli length")
    bits = _index_bits(k)
    weights = 1 << np.arange(k - 1, -1, -1)
    xmask = int(np.dot(p.x.astype(np.int64), weights))
    sign = 1 - 2 * ((bits @ p.z.astype(np.int64)) % 2)
    coef = (1j) ** ((p.phase + int(np.dot(p.x, p.z))) % 4) * sign
    idx = np.arange(dim)
    out = np.empty_like(mat, dtype=complex)
    shape = (dim,) + (1,) * (mat.ndim - 1)
    out[idx ^ xmask] = coef.reshape(shape) * mat[idx]
    return out


def _rows_to_paulis(xs, zs, ph) -> list[PauliString]:
    return [PauliString(xs[i], zs[i], ph[i]) for i in range(len(ph))]


def _eliminate(xs, zs, ph, cols):
    """Phase-tracking row reduction of the symplectic matrix [X | Z].

    Column c < n refers to X on qubit c, c >= n to Z on qubit c - n.
    Returns (xs, zs, ph, pivots) with rows reordered so pivot rows come first.
    """
    n = xs.shape[1]
    m = np.hstack([xs, zs]).astype(np.uint8)
    ph = np.array(ph, dtype=np.int64) % 4
    rows = m.shape[0]
    pivots: list[int] = []
    r = 0
    for c in cols:
        if r == rows:
            break
        col = m[:, c]
        if not col[r:].any():
            continue
        p = r + int(col[r:].argmax())
        if p != r:
            m[[r, p]] = m[[p, r]]
            ph[[r, p]] = ph[[p, r]]
        targets = m[:, c].nonzero()[0]
        targets = targets[targets != r]
        if targets.size:
            tx, tz = m[targets, :n], m[targets, n:]
            extra = _phase_terms(tx, tz, m[r, :n][None, :], m[r, n:][None, :]).sum(axis=1)
            ph[targets] = (ph[targets] + ph[r] + extra) % 4
            m[targets] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:, :n].copy(), m[:, n:].copy(), ph, pivots


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    """Canonical generating set of a stabilizer group without -I.

    Instances are built by `canonicalize`; `xs`, `zs` are rank x n bit
    matrices and `phases` holds 0 or 2 (sign +1 or -1) per generator.
    """

    n: int
    xs: np.ndarray
    zs: np.ndarray
    phases: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.phases.size)

    @property
    def generators(self) -> list[PauliString]:
        return _rows_to_paulis(self.xs, self.zs, self.phases)

    @property
    def is_pure(self) -> bool:
        return self.rank == self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.phases, other.phases)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.xs.tobytes(), self.zs.tobytes(), self.phases.tobytes()))

    def __str__(self) -> str:
        return "{" + ", ".join(str(g) for g in self.generators) + "}"

    @classmethod
    def from_strings(cls, strings, n: int | None = None) -> "StabilizerTableau":
        return canonicalize([PauliString.from_str(s) for s in strings], n=n)

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        return canonicalize([PauliString.single(n, i, "Z") for i in range(n)], n=n)

    @classmethod
    def maximally_mixed(cls, n: int) -> "StabilizerTableau":
        return canonicalize([], n=n)

    def density(self) -> np.ndarray:
        return reduced_density(self, range(self.n))

    def statevector(self) -> np.ndarray:
        """State vector of a pure tableau, phase fixed so a chosen basis amplitude is real."""
        return tableau_statevector(self)


def canonicalize(gens, n: int | None = None) -> StabilizerTableau:
    """Row-reduce commuting Hermitian generators into canonical form.

    Pivots are taken on X columns first, then Z columns, lowest qubit first,
    and the result is fully reduced, so equal groups give equal tableaux.
    """
    gens = list(gens)
    if n is None:
        if not gens:
            raise DimensionError("qubit count needed for an empty generator list")
        n = gens[0].n
    for g in gens:
        if g.n != n:
            raise DimensionError(f"generator {g} does not act on {n} qubits")
        if not g.is_hermitian:
            raise InvalidGroupError(f"generator {g} is not Hermitian (its square is -I)")
    if not gens:
        empty = np.zeros((0, n), np.uint8)
        return StabilizerTableau(n, empty, empty.copy(), np.zeros(0, np.int64))
    xs = np.array([g.x for g in gens], dtype=np.uint8)
    zs = np.array([g.z for g in gens], dtype=np.uint8)
    ph = np.array([g.phase for g in gens], dtype=np.int64)
    form = (xs.astype(np.int64) @ zs.T.astype(np.int64) + zs.astype(np.int64) @ xs.T.astype(np.int64)) % 2
    if form.any():
        i, j = map(int, np.argwhere(form)[0])
        raise InvalidGroupError(f"generators {gens[i]} and {gens[j]} anticommute")
    xs, zs, ph, pivots = _eliminate(xs, zs, ph, range(2 * n))
    r = len(pivots)
    if np.any(ph[r:] == 2):
        raise InvalidGroupError("generators produce -I")
    for a in (xs, zs, ph):
        a.setflags(write=False)
    return StabilizerTableau(n, xs[:r], zs[:r], ph[:r])


def _restrict_rows(t: StabilizerTableau, region: tuple[int, ...]):
    n = t.n
    comp = [q for q in range(n) if q not in set(region)]
    cols = comp + [n + q for q in comp] + list(region) + [n + q for q in region]
    xs, zs, ph, pivots = _eliminate(t.xs, t.zs, t.phases, cols)
    k = sum(1 for c in pivots if (c % n) in set(comp))
    rows = range(k, len(pivots))
    return [PauliString(xs[i], zs[i], ph[i]).restricted(region) for i in rows]


def restrict(t: StabilizerTableau, region) -> StabilizerTableau:
    """Group S_A of elements of S supported inside A, as a tableau on |A| qubits."""
    region = as_region(region, t.n)
    if len(region) == t.n:
        return t
    return canonicalize(_restrict_rows(t, region), n=len(region))


def stabilizer_entropy(t: StabilizerTableau, region) -> int:
    """Von Neumann entropy (bits) of the reduced state on A: |A| - |S_A|."""
    region = as_region(region, t.n)
    return len(region) - restrict(t, region).rank


def reduced_density(t: StabilizerTableau, region) -> np.ndarray:
    """Dense reduced density matrix 2**-|A| * sum of the elements of S_A."""
    region = as_region(region, t.n)
    k = len(region)
    if k > DENSE_REGION_CAP:
        raise FeasibilityError(f"dense reduced state refused for |A|={k} > {DENSE_REGION_CAP}")
    sub = restrict(t, region)
    rho = np.eye(1 << k, dtype=complex) / (1 << k)
    for g in sub.generators:
        rho = rho + apply_pauli_left(g, rho)
    return rho


def group_elements(t: StabilizerTableau) -> list[PauliString]:
    """All 2**rank group elements (identity first)."""
    if t.rank > ENUMERATION_RANK_CAP:
        raise FeasibilityError(f"group enumeration refused for rank {t.rank}")
    xs = np.zeros((1, t.n), np.uint8)
    zs = np.zeros((1, t.n), np.uint8)
    ph = np.zeros(1, np.int64)
    for i in range(t.rank):
        gx, gz = t.xs[i][None, :], t.zs[i][None, :]
        extra = _phase_terms(xs, zs, gx, gz).sum(axis=1)
        nx, nz, nph = xs ^ gx, zs ^ gz, (ph + t.phases[i] + extra) % 4
        xs, zs, ph = np.vstack([xs, nx]), np.vstack([zs, nz]), np.concatenate([ph, nph])
    return _rows_to_paulis(xs, zs, ph)


def _combine(t: StabilizerTableau, coeffs) -> PauliString:
    out = PauliString.identity(t.n)
    for i in np.flatnonzero(coeffs):
        out = pauli_mul(out, PauliString(t.xs[i], t.zs[i], t.phases[i]))
    return out


def overlap(s: StabilizerTableau, t: StabilizerTableau) -> Fraction:
    """tr(rho_s rho_t) = |S cap S'| / 2**n, or 0 if the groups disagree on a sign."""
    if s.n != t.n:
        raise DimensionError("overlap of tableaux on different qubit counts")
    n = s.n
    a = np.hstack([s.xs, s.zs])
    b = np.hstack([t.xs, t.zs])
    if s.rank == 0 or t.rank == 0:
        return Fraction(1, 1 << n)
    null = gf2.nullspace(np.vstack([a, b]).T)
    for vec in null:
        u, v = vec[: s.rank], vec[s.rank:]
        if _combine(s, u).phase != _combine(t, v).phase:
            return Fraction(0)
    return Fraction(1 << null.shape[0], 1 << n)


# Clifford conjugation rules U P U^dagger on tableau rows; phases live in Z/4
# and only ever shift by 2 here.

def _conj_h(xs, zs, ph, a):
    flip = xs[:, a] & zs[:, a]
    ph += 2 * flip
    xs[:, a], zs[:, a] = zs[:, a].copy(), xs[:, a].copy()


def _conj_s(xs, zs, ph, a):
    ph += 2 * (xs[:, a] & zs[:, a])
    zs[:, a] ^= xs[:, a]


def _conj_cnot(xs, zs, ph, a, b):
    ph += 2 * (xs[:, a] & zs[:, b] & (xs[:, b] ^ zs[:, a] ^ 1))
    xs[:, b] ^= xs[:, a]
    zs[:, a] ^= zs[:, b]


def apply_clifford_gate(xs, zs, ph, kind: str, qubits) -> None:
    """Conjugate every row in place by one Clifford gate."""
    q = list(qubits)
    if kind == "H":
        _conj_h(xs, zs, ph, q[0])
    elif kind == "S":
        _conj_s(xs, zs, ph, q[0])
    elif kind == "X":
        ph += 2 * zs[:, q[0]]
    elif kind == "Z":
        ph += 2 * xs[:, q[0]]
    elif kind == "Y":
        ph += 2 * (xs[:, q[0]] ^ zs[:, q[0]])
    elif kind == "CNOT":
        _conj_cnot(xs, zs, ph, q[0], q[1])
    elif kind == "CZ":
        _conj_h(xs, zs, ph, q[1])
        _conj_cnot(xs, zs, ph, q[0], q[1])
        _conj_h(xs, zs, ph, q[1])
    elif kind == "SWAP":
        a, b = q
        xs[:, [a, b]] = xs[:, [b, a]]
        zs[:, [a, b]] = zs[:, [b, a]]
    elif kind == "FANOUT":
        for tgt in q[1:]:
            _conj_cnot(xs, zs, ph, q[0], tgt)
    else:
        raise GateClassError(f"gate {kind} is not a Clifford gate")
    ph %= 4


def _iter_gates(circuit):
    for layer in circuit.layers:
        yield from layer


def conjugate_paulis(paulis, circuit) -> list[PauliString]:
    """Conjugate each Pauli string by the Clifford unitary of `circuit`."""
    paulis = list(paulis)
    if not paulis:
        return []
    xs = np.array([p.x for p in paulis], dtype=np.uint8)
    zs = np.array([p.z for p in paulis], dtype=np.uint8)
    ph = np.array([p.phase for p in paulis], dtype=np.int64)
    for g in _iter_gates(circuit):
        apply_clifford_gate(xs, zs, ph, g.kind, g.qubits)
    return _rows_to_paulis(xs, zs, ph)


def conjugate_by_clifford(t: StabilizerTableau, circuit) -> StabilizerTableau:
    """Tableau of U rho U^dagger where U is the (Clifford-only) circuit."""
    if circuit.n != t.n:
        raise DimensionError("circuit and tableau qubit counts differ")
    for g in _iter_gates(circuit):
        if g.kind not in CLIFFORD_KINDS:
            raise GateClassError(f"gate {g.kind} is not a Clifford gate")
    return canonicalize(conjugate_paulis(t.generators, circuit), n=t.n)


def random_tableau(n: int, rng: np.random.Generator, depth: int | None = None, rank: int | None = None) -> StabilizerTableau:
    """Random stabilizer state from a random Clifford gate sequence on |0^n>.

    With `rank` < n, trailing generators are dropped to give a mixed state.
    """
    depth = 4 * n if depth is None else depth
    xs = np.zeros((n, n), np.uint8)
    zs = np.eye(n, dtype=np.uint8)
    ph = np.zeros(n, np.int64)
    for _ in range(depth * max(n, 1)):
        kind = rng.choice(["H", "S", "CNOT", "X", "Z"])
        if kind == "CNOT" and n >= 2:
            a, b = rng.choice(n, size=2, replace=False)
            apply_clifford_gate(xs, zs, ph, "CNOT", (int(a), int(b)))
        elif kind != "CNOT":
            apply_clifford_gate(xs, zs, ph, str(kind), (int(rng.integers(n)),))
    gens = _rows_to_paulis(xs, zs, ph)
    if rank is not None:
        gens = gens[:rank]
    return canonicalize(gens, n=n)


STATEVECTOR_CAP = 26


def tableau_statevector(t: StabilizerTableau) -> np.ndarray:
    """Dense amplitudes of a pure stabilizer state.

    A basis state |b> consistent with the Z-only part of the group has
    nonzero overlap with the state, so projecting it with prod (I + g)/2
    and normalizing gives the state exactly.
    """
    if not t.is_pure:
        raise ValueError("statevector requires a pure tableau")
    n = t.n
    if n > STATEVECTOR_CAP:
        raise FeasibilityError(f"statevector refused for n={n}")
    zonly = [i for i in range(t.rank) if not t.xs[i].any()]
    b = np.zeros(n, np.uint8)
    if zonly:
        sol = gf2.solve(t.zs[zonly], (t.phases[zonly] // 2).astype(np.uint8))
        if sol is None:
            raise InvalidGroupError("inconsistent Z-type stabilizers")
        b = sol
    index = int(np.dot(b.astype(np.int64), 1 << np.arange(n - 1, -1, -1))) if n else 0
    vec = np.zeros(1 << n, dtype=complex)
    vec[index] = 1
    for g in t.generators:
        vec = (vec + apply_pauli_left(g, vec)) / 2
    return vec / np.linalg.norm(vec)


def _symp(u, v, n) -> int:
    return int((np.dot(u[:n], v[n:]) + np.dot(u[n:], v[:n])) % 2)


def logical_pairs(t: StabilizerTableau) -> list[tuple[PauliString, PauliString]]:
    """Symplectic basis (Xbar_j, Zbar_j) of the normalizer of S modulo S.

    Returns n - rank pairs of Hermitian Paulis commuting with S, with
    Xbar_j anticommuting only with Zbar_j.
    """
    n = t.n
    stab = np.hstack([t.xs, t.zs]).astype(np.uint8)
    # normalizer: v with symplectic product 0 against every generator
    swapped = np.hstack([t.zs, t.xs]).astype(np.uint8) if t.rank else np.zeros((0, 2 * n), np.uint8)
    normal = gf2.nullspace(swapped) if t.rank else np.eye(2 * n, dtype=np.uint8)
    # complement of span(S) inside the normalizer
    basis = stab.copy()
    extra = []
    for v in normal:
        trial = np.vstack([basis, v[None, :]]) if basis.size else v[None, :]
        if gf2.rank(trial) > basis.shape[0]:
            basis = trial
            extra.append(v.copy())
    pairs = []
    pool = extra
    while pool:
        v = pool.pop(0)
        k = next((i for i, w in enumerate(pool) if _symp(v, w, n)), None)
        if k is None:
            raise InvalidGroupError("normalizer has no symplectic partner")
        w = pool.pop(k)
        rest = []
        for u in pool:
            u = u.copy()
            if _symp(u, w, n):
                u ^= v
            if _symp(u, v, n):
                u ^= w
            rest.append(u)
        pool = rest
        pairs.append((PauliString(v[:n], v[n:], 0), PauliString(w[:n], w[n:], 0)))
    return pairs


def purify(t: StabilizerTableau) -> StabilizerTableau:
    """Pure tableau on n + (n - rank) qubits whose restriction to the first n is t."""
    n, r = t.n, t.rank
    m = 2 * n - r
    gens = [g.embedded(m, range(n)) for g in t.generators]
    for j, (xb, zb) in enumerate(logical_pairs(t)):
        ref = n + j
        gens.append(pauli_mul(xb.embedded(m, range(n)), PauliString.single(m, ref, "X")))
        gens.append(pauli_mul(zb.embedded(m, range(n)), PauliString.single(m, ref, "Z")))
    return canonicalize(gens, n=m)
