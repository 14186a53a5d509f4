"""Desk-scale quantum code machinery.

Code spaces are stored as orthonormal bases (2**n x dim). The space of states
that are l-locally equivalent to psi is realized as the groundspace of the
canonical Hamiltonian sum_A (I - Pi_A), where Pi_A projects onto the support
of psi_A and A runs over regions of size min(l, n). That groundspace always
contains the locally equivalent span, and equals it once its distance
exceeds l; reports carry a `conclusive` flag for that premise.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import eigsh

from .circuit import LayeredCircuit
from .errors import (
    AmbiguityError,
    DimensionError,
    FeasibilityError,
    ParseError,
    RegionError,
    ValidationError,
)
from .lightcone import blowup
from .pauli import (
    PauliString,
    StabilizerTableau,
    apply_pauli_left,
    as_region,
    canonicalize,
    group_elements,
    logical_pairs,
    tableau_statevector,
)
from .simulate import StateVector, _apply_matrix, _tensor_run
from .entropy import trace_distance

__all__ = [
    "CodeSpace",
    "LocalHamiltonian",
    "groundspace",
    "distance_bruteforce",
    "local_stab_code",
    "local_code",
    "canonical_hamiltonian",
    "stabilizer_hamiltonian",
    "history_hamiltonian",
    "history_claims",
    "infectiousness_check",
    "distance_sandwich_check",
    "robustness_params",
    "disentangle_product_check",
    "correlated_regions",
    "containment_residual",
    "parse_hamiltonian",
]

CLUSTER_TOL = 1e-8
AMBIGUITY_TOL = 1e-6
GAPLESS_TOL = 1e-8
DENSE_CAP = 10
SPARSE_CAP = 20
DISTANCE_CAP = 10
BASIS_ENTRY_CAP = 1 << 24
CONTAINMENT_TOL = 1e-7

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
RAISE = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _kron(*mats):
    out = np.array([[1]], dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _orthonormal(vecs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if vecs.shape[1] == 0:
        return vecs
    u, s, _ = np.linalg.svd(vecs, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0])]


def _apply_circuit(c: LayeredCircuit, mat: np.ndarray) -> np.ndarray:
    """U @ mat for the columns of mat."""
    k = mat.shape[1]
    t = _tensor_run(c, mat.reshape([2] * c.n + [k]))
    return t.reshape(1 << c.n, k)


# ---------------------------------------------------------------------------
# code spaces


@dataclass(frozen=True, eq=False)
class CodeSpace:
    n: int
    basis: np.ndarray
    source: str = "basis"
    stabilizers: StabilizerTableau | None = None

    def __post_init__(self):
        v = np.asarray(self.basis, dtype=complex)
        if v.ndim != 2 or v.shape[0] != 1 << self.n:
            raise DimensionError(f"basis must have {1 << self.n} rows")
        if v.shape[1] < 1:
            raise ValidationError("code space is empty")
        if not np.allclose(v.conj().T @ v, np.eye(v.shape[1]), atol=1e-9):
            raise ValidationError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", v)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        if self.n > DENSE_CAP + 2:
            raise FeasibilityError(f"dense projector refused for n={self.n}")
        return self.basis @ self.basis.conj().T

    @classmethod
    def from_vectors(cls, n: int, vecs, source: str = "basis") -> "CodeSpace":
        m = np.asarray(vecs, dtype=complex)
        if m.ndim == 1:
            m = m[:, None]
        return cls(n, _orthonormal(m), source)

    @classmethod
    def from_stabilizers(cls, gens, n: int | None = None, source: str = "stabilizer") -> "CodeSpace":
        """Joint +1 eigenspace of commuting Hermitian Pauli generators."""
        t = canonicalize(gens, n=n)
        k = t.n - t.rank
        if (1 << k) * (1 << t.n) > BASIS_ENTRY_CAP:
            raise FeasibilityError(f"stabilizer code basis of dim 2^{k} on {t.n} qubits is too large")
        pairs = logical_pairs(t)
        ref = canonicalize(list(t.generators) + [z for _, z in pairs], n=t.n)
        psi0 = tableau_statevector(ref)
        cols = []
        for bits in itertools.product((0, 1), repeat=k):
            v = psi0
            for b, (xb, _) in zip(bits, pairs):
                if b:
                    v = apply_pauli_left(xb, v)
            cols.append(v)
        return cls(t.n, np.array(cols).T, source, t)

    def mapped(self, c: LayeredCircuit) -> "CodeSpace":
        """U C for a unitary circuit U."""
        if c.n != self.n:
            raise DimensionError("circuit and code widths differ")
        return CodeSpace(self.n, _orthonormal(_apply_circuit(c, self.basis)), "mapped")

    def contains(self, other: "CodeSpace") -> float:
        """Residual ||(I - P_self) P_other||; below 1e-7 counts as containment."""
        return containment_residual(other, self)


def containment_residual(inner: CodeSpace, outer: CodeSpace) -> float:
    """||(I - P_outer) P_inner||_inf, zero iff inner is a subspace of outer."""
    if inner.n != outer.n:
        raise DimensionError("code widths differ")
    r = inner.basis - outer.basis @ (outer.basis.conj().T @ inner.basis)
    return float(np.linalg.norm(r, 2))


def _same_space(a: CodeSpace, b: CodeSpace) -> float:
    return max(containment_residual(a, b), containment_residual(b, a))


# ---------------------------------------------------------------------------
# local Hamiltonians


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    n: int
    terms: tuple = ()
    normalize: bool = False

    def __post_init__(self):
        fixed = []
        for region, mat in self.terms:
            region = tuple(int(q) for q in region)
            if len(set(region)) != len(region) or not region:
                raise RegionError(f"bad term region {region}")
            if min(region) < 0 or max(region) >= self.n:
                raise RegionError(f"term region {region} outside [0, {self.n})")
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (1 << len(region),) * 2:
                raise DimensionError(f"term on {region} needs a {1 << len(region)}x{1 << len(region)} matrix")
            if not np.allclose(mat, mat.conj().T, atol=1e-10):
                raise ValidationError(f"term on {region} is not Hermitian")
            norm = float(np.abs(np.linalg.eigvalsh(mat)).max())
            if norm > 1 + 1e-10:
                if not self.normalize:
                    raise ValidationError(f"term on {region} has norm {norm} > 1")
                mat = mat / norm
            fixed.append((region, mat))
        object.__setattr__(self, "terms", tuple(fixed))

    @property
    def locality(self) -> int:
        return max((len(r) for r, _ in self.terms), default=0)

    @property
    def m(self) -> int:
        return len(self.terms)

    def apply(self, mat: np.ndarray) -> np.ndarray:
        """H @ mat for a 2**n x k array."""
        k = mat.shape[1]
        t = mat.reshape([2] * self.n + [k])
        out = np.zeros_like(t)
        for region, h in self.terms:
            out += _apply_matrix(t, h, region)
        return out.reshape(1 << self.n, k)

    def sparse(self):
        """scipy CSR matrix of H, assembled term by term from basis-index maps."""
        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.int64)
        rows, cols, vals = [], [], []
        for region, h in self.terms:
            shifts = [self.n - 1 - q for q in region]
            local = np.zeros(dim, dtype=np.int64)
            for s in shifts:
                local = (local << 1) | ((idx >> s) & 1)
            mask = sum(1 << s for s in shifts)
            base = idx & ~mask
            spread = np.zeros(len(h), dtype=np.int64)
            for a in range(len(h)):
                for pos, s in enumerate(shifts):
                    if a >> (len(shifts) - 1 - pos) & 1:
                        spread[a] |= 1 << s
            for a, b in zip(*np.nonzero(np.abs(h) > 1e-15)):
                sel = local == b
                rows.append(base[sel] | spread[a])
                cols.append(idx[sel])
                vals.append(np.full(int(sel.sum()), h[a, b]))
        if not rows:
            return csr_matrix((dim, dim), dtype=complex)
        return coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(dim, dim)).tocsr()

    def dense(self) -> np.ndarray:
        if self.n > DENSE_CAP + 2:
            raise FeasibilityError(f"dense Hamiltonian refused for n={self.n}")
        return self.apply(np.eye(1 << self.n, dtype=complex))

    def energy(self, psi: np.ndarray) -> float:
        v = np.asarray(psi, dtype=complex).reshape(-1, 1)
        return float(np.real(v.conj().T @ self.apply(v))[0, 0])

    def with_ancillas(self, k: int) -> "LocalHamiltonian":
        """Embed into n + k qubits with a -|0><0| term on every ancilla."""
        terms = list(self.terms) + [((self.n + i,), -P0) for i in range(k)]
        return LocalHamiltonian(self.n + k, tuple(terms))

    def to_text(self) -> str:
        lines = [f"QUBITS {self.n}"]
        for region, h in self.terms:
            vals = " ".join(f"{repr(float(z.real))},{repr(float(z.imag))}" for z in h.reshape(-1))
            lines.append(f"TERM {','.join(map(str, region))} : {vals}")
        return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"^TERM\s+([0-9,\s]+?)\s*:\s*(.*)$")


def parse_hamiltonian(text: str, n: int | None = None, normalize: bool = False) -> LocalHamiltonian:
    """Parse `TERM q0,q1,... : re,im re,im ...` lines (row-major entries).

    An optional `QUBITS n` line fixes the width; otherwise it is one more
    than the largest qubit index. `#` starts a comment.
    """
    terms = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("QUBITS"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("QUBITS needs one integer", lineno)
            declared = int(parts[1])
            continue
        m = _TERM_RE.match(line)
        if not m:
            raise ParseError(f"cannot parse {line!r}", lineno)
        try:
            region = tuple(int(q) for q in m.group(1).replace(" ", "").split(",") if q)
        except ValueError:
            raise ParseError("bad qubit list", lineno) from None
        entries = m.group(2).split()
        need = 1 << (2 * len(region))
        if len(entries) != need:
            raise ParseError(f"expected {need} entries, got {len(entries)}", lineno)
        vals = []
        for e in entries:
            try:
                re_, im_ = e.split(",")
                vals.append(complex(float(re_), float(im_)))
            except ValueError:
                raise ParseError(f"bad complex entry {e!r}", lineno) from None
        d = 1 << len(region)
        terms.append((region, np.array(vals).reshape(d, d)))
    width = n if n is not None else declared
    if width is None:
        width = 1 + max((max(r) for r, _ in terms), default=-1)
    return LocalHamiltonian(width, tuple(terms), normalize=normalize)


@dataclass(frozen=True)
class Groundspace:
    code: CodeSpace
    gap: float
    energy: float

    def __iter__(self):
        return iter((self.code, self.gap, self.energy))


def groundspace(h: LocalHamiltonian) -> Groundspace:
    """Eigenvectors within 1e-8 of the lowest eigenvalue, and the gap above them.

    Dense eigendecomposition up to 10 qubits, Lanczos (scipy eigsh) up to 20.
    The gap is inf when the whole space is ground.
    """
    n = h.n
    dim = 1 << n
    if n <= DENSE_CAP:
        w, v = np.linalg.eigh(h.dense())
    elif n <= SPARSE_CAP:
        op = h.sparse()
        # shift-invert below the spectrum: the sum of the terms' smallest
        # eigenvalues lower-bounds the ground energy
        sigma = sum(float(np.linalg.eigvalsh(t).min()) for _, t in h.terms) - 1e-2
        k = 6
        while True:
            v0 = np.random.default_rng(0).standard_normal(dim) + 0j
            w, v = eigsh(op, k=k, sigma=sigma, which="LM", v0=v0, tol=1e-12)
            order = np.argsort(w)
            w, v = w[order], v[:, order]
            if np.count_nonzero(w <= w[0] + CLUSTER_TOL) < k:
                break
            k *= 2
            if k >= dim - 1:
                raise FeasibilityError("groundspace too degenerate for the sparse solver")
    else:
        raise FeasibilityError(f"groundspace refused for n={n} > {SPARSE_CAP}")
    e0 = float(w[0])
    ground = w <= e0 + CLUSTER_TOL
    rest = w[~ground]
    gap = float(rest[0] - e0) if rest.size else math.inf
    if gap < AMBIGUITY_TOL:
        raise AmbiguityError(f"ground cluster not separated: next level {gap:.3g} above the minimum")
    basis = _orthonormal(v[:, ground])
    return Groundspace(CodeSpace(n, basis, "groundspace"), gap, e0)


def stabilizer_hamiltonian(gens, n: int | None = None) -> LocalHamiltonian:
    """sum_g (I - g)/2 restricted to each generator's support."""
    gens = [g if isinstance(g, PauliString) else PauliString.from_str(g) for g in gens]
    n = gens[0].n if n is None else n
    terms = []
    for g in gens:
        if not g.is_hermitian:
            raise ValidationError(f"{g} is not Hermitian")
        sup = g.support or (0,)
        local = g.restricted(sup).matrix()
        terms.append((sup, (np.eye(len(local)) - local) / 2))
    return LocalHamiltonian(n, tuple(terms))


# ---------------------------------------------------------------------------
# distance


def _paulis_of_weight(n: int, w: int):
    for support in itertools.combinations(range(n), w):
        for letters in itertools.product("XYZ", repeat=w):
            yield PauliString.from_sparse(n, dict(zip(support, letters)))


def distance_bruteforce(c: CodeSpace) -> int:
    """Knill-Laflamme distance: smallest weight of a Pauli Q with V^dag Q V not
    proportional to the identity; n + 1 when no such Q exists.

    Since products E^dag F of Paulis on a region range over all Paulis on it,
    checking single Paulis in increasing weight is equivalent to the pair form.
    """
    n = c.n
    if c.dim == 1:
        return n + 1
    if n > DISTANCE_CAP:
        raise FeasibilityError(f"brute-force distance refused for n={n} > {DISTANCE_CAP}")
    v = c.basis
    eye = np.eye(c.dim)
    for w in range(1, n + 1):
        for q in _paulis_of_weight(n, w):
            m = v.conj().T @ apply_pauli_left(q, v)
            lam = np.trace(m) / c.dim
            if np.abs(m - lam * eye).max() > CLUSTER_TOL:
                return w
    return n + 1


def _region_correctable(c: CodeSpace, region) -> bool:
    v = c.basis
    eye = np.eye(c.dim)
    region = list(region)
    for w in range(1, len(region) + 1):
        for support in itertools.combinations(region, w):
            for letters in itertools.product("XYZ", repeat=w):
                q = PauliString.from_sparse(c.n, dict(zip(support, letters)))
                m = v.conj().T @ apply_pauli_left(q, v)
                if np.abs(m - np.trace(m) / c.dim * eye).max() > CLUSTER_TOL:
                    return False
    return True


# ---------------------------------------------------------------------------
# local codes


def local_stab_code(t: StabilizerTableau, ell: int) -> CodeSpace:
    """Joint +1 eigenspace of all stabilizers of weight <= ell."""
    if not t.is_pure:
        raise ValidationError("local_stab_code needs a pure stabilizer state")
    if ell < 1:
        raise ValidationError("ell must be at least 1")
    local = [g for g in group_elements(t) if 0 < g.weight <= ell]
    if not local:
        return CodeSpace(t.n, np.eye(1 << t.n, dtype=complex), "local_stabilizer",
                         StabilizerTableau.maximally_mixed(t.n))
    code = CodeSpace.from_stabilizers(local, n=t.n, source="local_stabilizer")
    return code


def _support_projector(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    keep = v[:, w > tol]
    return keep @ keep.conj().T


def canonical_hamiltonian(psi: StateVector, ell: int) -> LocalHamiltonian:
    """sum over |A| = min(ell, n) of I - Pi_supp(psi_A); trivial terms are skipped."""
    if ell < 1:
        raise ValidationError("ell must be at least 1")
    n = psi.n
    w = min(ell, n)
    terms = []
    for region in itertools.combinations(range(n), w):
        proj = _support_projector(psi.reduced_density(region))
        h = np.eye(len(proj)) - proj
        if np.abs(h).max() > 1e-12:
            terms.append((region, h))
    return LocalHamiltonian(n, tuple(terms))


def local_code(psi: StateVector, ell: int) -> CodeSpace:
    """Groundspace of the canonical Hamiltonian (zero energy)."""
    h = canonical_hamiltonian(psi, ell)
    if not h.terms:
        return CodeSpace(psi.n, np.eye(1 << psi.n, dtype=complex), "local_equivalence")
    gs = groundspace(h)
    return CodeSpace(psi.n, gs.code.basis, "local_equivalence")


# ---------------------------------------------------------------------------
# infectiousness


@dataclass(frozen=True)
class InfectiousnessReport:
    blowup: int
    ell: int
    dims: dict
    distances: dict
    residuals: dict
    premise_holds: bool
    equality_fired: bool
    conclusive: bool
    notes: tuple[str, ...] = ()

    @property
    def chain_holds(self) -> bool:
        return max(self.residuals["inner"], self.residuals["outer"]) < CONTAINMENT_TOL

    def as_dict(self) -> dict:
        return {
            "blowup": self.blowup,
            "ell": self.ell,
            "dims": dict(self.dims),
            "distances": dict(self.distances),
            "residuals": dict(self.residuals),
            "premise_holds": self.premise_holds,
            "equality_fired": self.equality_fired,
            "conclusive": self.conclusive,
            "chain_holds": self.chain_holds,
            "notes": list(self.notes),
        }


def infectiousness_check(phi: StabilizerTableau, u: LayeredCircuit, ell: int) -> InfectiousnessReport:
    """Check C_{B^2 l}(psi) <= U C_{Bl}(phi) <= C_l(psi) for psi = U phi.

    When B < sqrt(d_l(psi)/l) the chain collapses to C_l(psi) = U C^stab_{Bl}(phi)
    and that equality is checked as well.
    """
    n = phi.n
    if n > DISTANCE_CAP:
        raise FeasibilityError(f"infectiousness check refused for n={n} > {DISTANCE_CAP}")
    if not phi.is_pure:
        raise ValidationError("phi must be a pure stabilizer state")
    if u.n != n:
        raise DimensionError("circuit and state widths differ")
    b = blowup(u)
    phi_vec = StateVector.from_tableau(phi)
    psi = StateVector(n, _apply_circuit(u, phi_vec.amplitudes[:, None])[:, 0])

    c_l = local_code(psi, ell)
    c_outer = local_code(psi, b * b * ell)
    c_mid = local_code(phi_vec, b * ell).mapped(u)
    stab_mid = local_stab_code(phi, b * ell).mapped(u)

    notes = []
    d_l = distance_bruteforce(c_l)
    distances = {"l": d_l}
    conclusive = d_l > min(ell, n)
    if not conclusive:
        notes.append("distance of the l-local groundspace does not exceed l")
    premise = b * b * ell < d_l
    residuals = {
        "inner": containment_residual(c_outer, c_mid),
        "outer": containment_residual(c_mid, c_l),
        "stab_vs_local": _same_space(c_mid, stab_mid),
    }
    if premise:
        residuals["equality"] = _same_space(c_l, stab_mid)
    else:
        notes.append("premise B^2 l < d_l(psi) fails")
    return InfectiousnessReport(
        blowup=b,
        ell=ell,
        dims={"l": c_l.dim, "Bl_mapped": c_mid.dim, "B2l": c_outer.dim, "stab_Bl": stab_mid.dim},
        distances=distances,
        residuals=residuals,
        premise_holds=premise,
        equality_fired=premise and residuals["equality"] < CONTAINMENT_TOL,
        conclusive=conclusive,
        notes=tuple(notes),
    )


def distance_sandwich_check(c: CodeSpace, u: LayeredCircuit) -> bool:
    """d(UC)/B <= d(C) <= B d(UC) with brute-force distances."""
    b = blowup(u)
    d = distance_bruteforce(c)
    du = distance_bruteforce(c.mapped(u))
    return du <= b * d and d <= b * du


# ---------------------------------------------------------------------------
# robustness


@dataclass(frozen=True)
class RobustnessReport:
    eps: float
    delta: float
    ell: int
    gap: float
    m: int
    frustration_free: bool
    trials: int = 0
    worst_ratio: float = 0.0  # max over trials of distance / sqrt(local_eps m / gap)
    empirical_ok: bool = True

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def robustness_params(h: LocalHamiltonian, eps: float, trials: int = 0, seed: int = 0) -> RobustnessReport:
    """(eps, sqrt(eps m / gap), l) robustness of the groundspace.

    The energy argument behind the formula needs every term to be PSD with
    norm at most 1 and zero energy on the groundspace; `frustration_free`
    records whether that holds. With `trials` > 0, random perturbations of
    ground states are measured for their l-local closeness eps' and their
    distance to the groundspace is compared with sqrt(eps' m / gap).
    """
    if not 0 <= eps <= 1:
        raise ValidationError(f"eps {eps} outside [0, 1]")
    gs = groundspace(h)
    if not gs.gap > GAPLESS_TOL or math.isinf(gs.gap):
        raise ValidationError("Hamiltonian is gapless")
    ff = abs(gs.energy) < 1e-8 and all(np.linalg.eigvalsh(t).min() > -1e-10 for _, t in h.terms)
    delta = math.sqrt(eps * h.m / gs.gap)
    if trials <= 0:
        return RobustnessReport(eps, delta, h.locality, gs.gap, h.m, ff)
    rng = np.random.default_rng(seed)
    v = gs.code.basis
    regions = list(itertools.combinations(range(h.n), min(h.locality, h.n)))
    worst = 0.0
    for _ in range(trials):
        g = v @ (rng.standard_normal(v.shape[1]) + 1j * rng.standard_normal(v.shape[1]))
        g /= np.linalg.norm(g)
        r = rng.standard_normal(1 << h.n) + 1j * rng.standard_normal(1 << h.n)
        eta = 10 ** rng.uniform(-3, -1)
        vec = g + eta * r / np.linalg.norm(r)
        vec /= np.linalg.norm(vec)
        proj = v @ (v.conj().T @ vec)
        near = proj / np.linalg.norm(proj)
        psi, ref = StateVector(h.n, vec), StateVector(h.n, near)
        local = max(trace_distance(psi.reduced_density(a), ref.reduced_density(a)) for a in regions)
        dist = math.sqrt(max(1 - np.linalg.norm(proj) ** 2, 0.0))
        bound = math.sqrt(local * h.m / gs.gap)
        worst = max(worst, dist / bound if bound > 0 else (math.inf if dist > 1e-12 else 0.0))
    return RobustnessReport(eps, delta, h.locality, gs.gap, h.m, ff, trials, worst, worst <= 1 + 1e-9)


# ---------------------------------------------------------------------------
# disentangling and correlations


def _ordered_rdm(psi: StateVector, order) -> np.ndarray:
    order = list(order)
    rest = [q for q in range(psi.n) if q not in order]
    t = psi.amplitudes.reshape([2] * psi.n).transpose(order + rest)
    m = t.reshape(1 << len(order), -1)
    return m @ m.conj().T


def _factorization_gap(psi: StateVector, a, b) -> float:
    """½||rho_AB - rho_A (x) rho_B||_1 with A's qubits first."""
    a, b = list(a), list(b)
    if not a or not b:
        return 0.0
    rho = _ordered_rdm(psi, a + b)
    return trace_distance(rho, np.kron(_ordered_rdm(psi, a), _ordered_rdm(psi, b)))


@dataclass(frozen=True)
class DisentangleReport:
    region: tuple[int, ...]
    boundary: tuple[int, ...]
    rest: tuple[int, ...]
    max_gap: float
    factorizes: bool
    vacuous: bool = False

    def __bool__(self) -> bool:
        return self.factorizes


def disentangle_product_check(projectors, region, n: int | None = None, states=None) -> DisentangleReport:
    """Check rho_{MC} = rho_M (x) rho_C on the code of commuting projectors.

    `projectors` is a list of (qubits, matrix) pairs. The boundary is every
    qubit outside M sharing a projector with M, and C is the complement of
    M plus boundary. The codewords checked are a basis plus seeded random
    combinations, or `states` when given (negative controls).
    """
    projectors = [(tuple(int(q) for q in r), np.asarray(p, dtype=complex)) for r, p in projectors]
    if n is None:
        n = 1 + max(max(r) for r, _ in projectors)
    dense = [LocalHamiltonian(n, ((r, p),)).dense() for r, p in projectors]
    for p in dense:
        if not np.allclose(p @ p, p, atol=1e-9):
            raise ValidationError("a term is not a projector")
    for p, q in itertools.combinations(dense, 2):
        if np.abs(p @ q - q @ p).max() > 1e-9:
            raise ValidationError("projectors do not commute")
    m_reg = as_region(region, n)
    bnd = sorted({q for r, _ in projectors if set(r) & set(m_reg) for q in r} - set(m_reg))
    nbhd = sorted(set(m_reg) | set(bnd))
    rest = tuple(q for q in range(n) if q not in nbhd)
    prod = np.eye(1 << n, dtype=complex)
    for p in dense:
        prod = prod @ p
    w, v = np.linalg.eigh((prod + prod.conj().T) / 2)
    code = CodeSpace(n, _orthonormal(v[:, w > 0.5]), "commuting_projectors")
    if not rest:
        # C is empty, so rho_MC = rho_M and the product form holds trivially
        return DisentangleReport(tuple(m_reg), tuple(bnd), rest, 0.0, True, vacuous=True)
    if states is None:
        if not _region_correctable(code, nbhd):
            raise ValidationError(f"region {tuple(nbhd)} is not correctable")
        rng = np.random.default_rng(0)
        vecs = [code.basis[:, i] for i in range(code.dim)]
        for _ in range(min(4, code.dim)):
            c = rng.standard_normal(code.dim) + 1j * rng.standard_normal(code.dim)
            x = code.basis @ c
            vecs.append(x / np.linalg.norm(x))
        states = [StateVector(n, x) for x in vecs]
    worst = max(_factorization_gap(s, m_reg, rest) for s in states)
    return DisentangleReport(tuple(m_reg), tuple(bnd), rest, worst, worst < CLUSTER_TOL)


def correlated_regions(psi: StateVector, partition, gamma: float):
    """Longest prefix of `partition` whose regions are pairwise more than gamma
    correlated; returns (prefix, {(i, j): value}) over all pairs examined."""
    regions = [as_region(r, psi.n) for r in partition]
    seen = set()
    for r in regions:
        if not r:
            raise RegionError("empty region")
        if seen & set(r):
            raise RegionError("regions overlap")
        seen |= set(r)
    if 2 * max(len(r) for r in regions) > 14:
        raise FeasibilityError("region pair too large for dense reduced states")
    values = {}
    keep = []
    for j, r in enumerate(regions):
        ok = True
        for i in range(len(keep)):
            val = _factorization_gap(psi, regions[i], r)
            values[(i, j)] = val
            ok = ok and val > gamma
        if not ok:
            break
        keep.append(r)
    return keep, values


# ---------------------------------------------------------------------------
# CAT history state


def history_hamiltonian(n: int) -> LocalHamiltonian:
    """Feynman-Kitaev Hamiltonian with a unary clock for the CAT preparation.

    Qubits 0..n-1 are the clock (bit k is 1 iff t > k), n..2n-1 the state.
    Step 1 applies H to the first state qubit, step t >= 2 a CNOT from it to
    state qubit t-1. Terms: input (state qubits start at 0 while the clock
    reads 0), clock legality (no 0 followed by 1), and one propagation term
    per step, each a projector; locality is 5.
    """
    if n < 2:
        raise ValidationError("history Hamiltonian needs n >= 2")
    terms = []
    for i in range(n):
        terms.append(((0, n + i), _kron(P0, P1)))
    for k in range(n - 1):
        terms.append(((k, k + 1), _kron(P0, P1)))
    for t in range(1, n + 1):
        gate, gq = (HAD, (n,)) if t == 1 else (CNOT, (n, n + t - 1))
        # clock window around bit t-1, which flips 0 -> 1 at step t
        left = [t - 2] if t >= 2 else []
        right = [t] if t < n else []
        clock = tuple(left + [t - 1] + right)
        pre = _kron(*([P1] * len(left) + [P0] + [P0] * len(right)))
        post = _kron(*([P1] * len(left) + [P1] + [P0] * len(right)))
        hop = _kron(*([P1] * len(left) + [RAISE] + [P0] * len(right)))
        d = len(gate)
        h = 0.5 * (_kron(post, np.eye(d)) + _kron(pre, np.eye(d)) - _kron(hop, gate) - _kron(hop, gate).conj().T)
        terms.append((clock + gq, h))
    return LocalHamiltonian(2 * n, tuple(terms))


def history_claims(psi: StateVector, n: int) -> dict:
    """The traces behind the pairwise-correlation claim for the CAT history state.

    For state qubits i < j among the first n/2 (1-based) with A_i = |0><0| and
    B_j = |1><1|: min and max of tr(Psi A_i B_j), min tr(Psi A_i),
    min tr(Psi B_j), and the smallest ½||Psi_ij - Psi_i (x) Psi_j||_1.
    """
    half = n // 2
    ab, a_vals, b_vals, corr = [], [], [], []
    for i, j in itertools.combinations(range(half), 2):
        qi, qj = n + i, n + j
        ab.append(psi.expectation(_kron(P0, P1), (qi, qj)))
        a_vals.append(psi.expectation(P0, (qi,)))
        b_vals.append(psi.expectation(P1, (qj,)))
        corr.append(_factorization_gap(psi, (qi,), (qj,)))
    return {
        "pairs": len(ab),
        "ab_max_abs": float(max(abs(x) for x in ab)) if ab else 0.0,
        "a_min": float(min(a_vals)) if a_vals else math.nan,
        "b_min": float(min(b_vals)) if b_vals else math.nan,
        "correlation_min": float(min(corr)) if corr else math.nan,
    }
