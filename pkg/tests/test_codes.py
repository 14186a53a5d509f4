import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mhkit.circuit import Gate, LayeredCircuit, haar_unitary, random_circuit
from mhkit.codes import (
    CodeSpace,
    LocalHamiltonian,
    canonical_hamiltonian,
    containment_residual,
    correlated_regions,
    disentangle_product_check,
    distance_bruteforce,
    distance_sandwich_check,
    groundspace,
    history_claims,
    history_hamiltonian,
    infectiousness_check,
    local_code,
    local_stab_code,
    parse_hamiltonian,
    robustness_params,
    stabilizer_hamiltonian,
)
from mhkit.entropy import StateFamily, build_family
from mhkit.errors import AmbiguityError, ParseError, ValidationError
from mhkit.pauli import PauliString, StabilizerTableau, random_tableau
from mhkit.simulate import StateVector
from oracles import embed, pauli_matrix

P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
FIVE_QUBIT = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def code_of(strings):
    return CodeSpace.from_stabilizers([PauliString.from_str(s) for s in strings])


def oracle_stab_projector(strings):
    n = len(strings[0].lstrip("+-"))
    p = np.eye(1 << n, dtype=complex)
    for s in strings:
        p = p @ (np.eye(1 << n) + pauli_matrix(s)) / 2
    return p


def oracle_stab_distance(strings):
    """Min weight of a Pauli commuting with every generator but outside the group."""
    n = len(strings[0])
    gens = [pauli_matrix(s) for s in strings]
    group = []
    for bits in itertools.product([0, 1], repeat=len(gens)):
        m = np.eye(1 << n, dtype=complex)
        for b, g in zip(bits, gens):
            if b:
                m = m @ g
        group.append(m)
    best = n + 1
    for letters in itertools.product("IXYZ", repeat=n):
        w = sum(c != "I" for c in letters)
        if w == 0 or w >= best:
            continue
        p = pauli_matrix("".join(letters))
        if not all(np.allclose(p @ g, g @ p) for g in gens):
            continue
        if any(abs(abs(np.trace(p @ g)) - (1 << n)) < 1e-9 for g in group):
            continue
        best = w
    return best


class TestCodeSpace:
    def test_stabilizer_basis_matches_projector(self):
        c = code_of(["XXXX", "ZZZZ"])
        assert c.dim == 4
        np.testing.assert_allclose(c.projector, oracle_stab_projector(["XXXX", "ZZZZ"]), atol=1e-10)

    def test_signed_generators(self):
        c = code_of(["-ZZ", "XX"])
        np.testing.assert_allclose(c.projector, oracle_stab_projector(["-ZZ", "XX"]), atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_stabilizer_dims_are_powers_of_two(self, n, drop, seed):
        rng = np.random.default_rng(seed)
        t = random_tableau(n, rng)
        gens = t.generators[: max(t.rank - drop, 0)] or [PauliString.identity(n)]
        c = CodeSpace.from_stabilizers(gens, n=n)
        assert c.dim & (c.dim - 1) == 0
        assert c.dim == 2 ** (n - min(len(gens), t.rank) if gens[0].weight else n)
        np.testing.assert_allclose(c.projector @ c.projector, c.projector, atol=1e-9)

    def test_containment(self):
        big = code_of(["ZZZZ"])
        small = code_of(["XXXX", "ZZZZ"])
        assert containment_residual(small, big) < 1e-12
        assert containment_residual(big, small) > 0.5


class TestGroundspace:
    def test_number_operator(self):
        n = 4
        h = LocalHamiltonian(n, tuple(((q,), P1) for q in range(n)))
        code, gap, e0 = groundspace(h)
        assert code.dim == 1
        assert abs(code.basis[0, 0]) == pytest.approx(1.0)
        assert gap == pytest.approx(1.0) and e0 == pytest.approx(0.0, abs=1e-12)

    def test_ghz_hamiltonian(self):
        gens = ["XXXX", "ZZII", "IZZI", "IIZZ"]
        h = stabilizer_hamiltonian(gens)
        code, gap, _ = groundspace(h)
        dense = sum((np.eye(16) - pauli_matrix(g)) / 2 for g in gens)
        w = np.linalg.eigvalsh(dense)
        assert code.dim == 1
        assert gap == pytest.approx(w[1] - w[0]) and gap == pytest.approx(1.0)

    def test_history_ground_state(self):
        n = 4
        gs = groundspace(history_hamiltonian(n))
        psi = build_family(StateFamily("cat_history", n))
        assert gs.code.dim == 1
        assert abs(np.vdot(gs.code.basis[:, 0], psi.amplitudes)) ** 2 >= 1 - 1e-8
        assert gs.energy == pytest.approx(0.0, abs=1e-10)

    def test_history_locality_and_terms(self):
        for n in (4, 6, 8):
            h = history_hamiltonian(n)
            assert h.locality == 5
            assert h.m == 3 * n - 1

    def test_sparse_route_matches_dense(self):
        rng = np.random.default_rng(5)
        n = 11
        terms = []
        for q in range(n - 1):
            m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            m = (m + m.conj().T) / 2
            terms.append(((q, q + 1), m / np.abs(np.linalg.eigvalsh(m)).max()))
        h = LocalHamiltonian(n, tuple(terms))
        w = np.linalg.eigvalsh(h.dense())
        gs = groundspace(h)
        assert gs.energy == pytest.approx(w[0], abs=1e-9)
        assert gs.gap == pytest.approx(w[1] - w[0], abs=1e-8)

    def test_ambiguous_cluster(self):
        h = LocalHamiltonian(2, (((0,), np.diag([0, 1e-7]).astype(complex)), ((1,), P1)))
        with pytest.raises(AmbiguityError):
            groundspace(h)

    def test_norm_enforced(self):
        with pytest.raises(ValidationError):
            LocalHamiltonian(1, (((0,), 2 * P1),))
        h = LocalHamiltonian(1, (((0,), 2 * P1),), normalize=True)
        assert np.abs(h.terms[0][1]).max() == pytest.approx(1.0)

    def test_ancilla_embedding(self):
        h = LocalHamiltonian(2, (((0,), P1), ((1,), P1))).with_ancillas(2)
        code, gap, e0 = groundspace(h)
        assert h.n == 4 and code.dim == 1
        assert abs(code.basis[0, 0]) == pytest.approx(1.0)
        assert e0 == pytest.approx(-2.0)


class TestDistance:
    def test_422(self):
        assert distance_bruteforce(code_of(["XXXX", "ZZZZ"])) == 2

    def test_513(self):
        assert distance_bruteforce(code_of(FIVE_QUBIT)) == 3

    def test_dim_one(self):
        for n in (1, 3, 6):
            assert distance_bruteforce(CodeSpace.from_stabilizers(StabilizerTableau.zero_state(n).generators)) == n + 1

    @pytest.mark.parametrize("seed", range(8))
    def test_against_normalizer_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 6))
        t = random_tableau(n, rng)
        keep = int(rng.integers(1, n))
        gens = t.generators[:keep]
        # the oracle works up to phase, which does not affect the distance
        assert distance_bruteforce(CodeSpace.from_stabilizers(gens, n=n)) == oracle_stab_distance([g.letters() for g in gens])


class TestLocalCodes:
    def test_ghz_l2(self):
        ghz = StabilizerTableau.from_strings(["XXXX", "ZZII", "IZZI", "IIZZ"])
        c = local_stab_code(ghz, 2)
        assert c.dim == 2
        target = np.zeros((16, 2), dtype=complex)
        target[0, 0] = target[15, 1] = 1
        assert containment_residual(c, CodeSpace.from_vectors(4, target)) < 1e-12

    def test_product_l1(self):
        assert local_stab_code(StabilizerTableau.zero_state(5), 1).dim == 1

    def test_bell_pairs_unconstrained(self):
        bb = StabilizerTableau.from_strings(["XXII", "ZZII", "IIXX", "IIZZ"])
        assert local_stab_code(bb, 1).dim == 16

    @pytest.mark.parametrize("seed", range(10))
    def test_canonical_equals_local_stabilizer_code(self, seed):
        # for stabilizer states the support of every reduced state is the +1
        # space of the local stabilizers, so the two constructions agree
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 7))
        t = random_tableau(n, rng)
        ell = int(rng.integers(1, n + 1))
        a = local_code(StateVector.from_tableau(t), ell)
        b = local_stab_code(t, ell)
        assert max(containment_residual(a, b), containment_residual(b, a)) < 1e-8

    def test_canonical_terms_are_projectors(self):
        psi = build_family(StateFamily("w_state", 4))
        h = canonical_hamiltonian(psi, 2)
        for _, m in h.terms:
            np.testing.assert_allclose(m @ m, m, atol=1e-10)

    @pytest.mark.parametrize("seed", range(12))
    def test_codes_equal_below_distance(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(3, 7))
        t = random_tableau(n, rng)
        psi = StateVector.from_tableau(t)
        for ell in range(1, n):
            c = local_code(psi, ell)
            d = distance_bruteforce(c)
            if d <= ell:
                continue
            for ell2 in range(ell, min(d, n + 1)):
                c2 = local_code(psi, ell2)
                assert max(containment_residual(c, c2), containment_residual(c2, c)) < 1e-8


class TestInfectiousness:
    def test_identity_ghz(self):
        ghz = StabilizerTableau.from_strings(["XXXX", "ZZII", "IZZI", "IIZZ"])
        r = infectiousness_check(ghz, LayeredCircuit.empty(4), 2)
        assert r.blowup == 1
        assert r.residuals["stab_vs_local"] < 1e-10
        assert r.chain_holds

    def test_single_qubit_layer(self):
        rng = np.random.default_rng(2)
        ghz = StabilizerTableau.from_strings(["XXXX", "ZZII", "IZZI", "IIZZ"])
        u = LayeredCircuit(4, [[Gate("GENERIC1", (q,), haar_unitary(2, rng)) for q in range(4)]])
        r = infectiousness_check(ghz, u, 2)
        assert r.blowup == 1
        assert max(r.residuals["inner"], r.residuals["outer"]) < 1e-8

    def test_premise_fails_for_large_blowup(self):
        rng = np.random.default_rng(4)
        t = random_tableau(5, rng)
        u = random_circuit(5, 3, rng, "generic")
        r = infectiousness_check(t, u, 2)
        assert r.blowup ** 2 * 2 >= r.distances["l"]
        assert not r.premise_holds and not r.equality_fired

    def test_equality_branch(self):
        # product state, local generic layer: C_1(psi) is psi alone, d = n+1 > B^2 l
        t = StabilizerTableau.zero_state(4)
        rng = np.random.default_rng(8)
        u = LayeredCircuit(4, [[Gate("GENERIC1", (q,), haar_unitary(2, rng)) for q in range(4)]])
        r = infectiousness_check(t, u, 1)
        assert r.premise_holds and r.equality_fired and r.conclusive


class TestSandwich:
    def test_identity(self):
        assert distance_sandwich_check(code_of(["XXXX", "ZZZZ"]), LayeredCircuit.empty(4))

    def test_swap_layer(self):
        c = code_of(["XXXX", "ZZZZ"])
        u = LayeredCircuit(4, [[Gate("SWAP", (0, 1)), Gate("SWAP", (2, 3))]])
        assert distance_bruteforce(c.mapped(u)) == 2
        assert distance_sandwich_check(c, u)

    def test_five_qubit_random(self):
        rng = np.random.default_rng(9)
        u = random_circuit(5, 2, rng, "generic")
        assert distance_sandwich_check(code_of(FIVE_QUBIT), u)


class TestRobustness:
    def test_zero_eps(self):
        h = stabilizer_hamiltonian(["XX", "ZZ"])
        assert robustness_params(h, 0.0).delta == 0.0

    def test_ghz6(self):
        gens = ["XXXXXX", "ZZIIII", "IZZIII", "IIZZII", "IIIZZI", "IIIIZZ"]
        r = robustness_params(stabilizer_hamiltonian(gens), 1e-4, trials=25, seed=1)
        assert r.m == 6 and r.gap == pytest.approx(1.0)
        assert r.delta == pytest.approx(math.sqrt(6e-4))
        assert r.frustration_free and r.empirical_ok

    def test_history(self):
        r = robustness_params(history_hamiltonian(4), 1e-3, trials=10, seed=2)
        assert r.delta == pytest.approx(math.sqrt(1e-3 * 11 / r.gap))
        assert r.frustration_free and r.empirical_ok

    def test_gapless(self):
        with pytest.raises(ValidationError):
            robustness_params(LocalHamiltonian(2, (((0,), np.zeros((2, 2))),)), 1e-3)


BELL_PROJ = np.zeros((4, 4), dtype=complex)
BELL_PROJ[np.ix_([0, 3], [0, 3])] = 0.5


class TestDisentangle:
    def test_product_code(self):
        r = disentangle_product_check([((q,), P0) for q in range(4)], [1])
        assert r.factorizes and not r.vacuous

    def test_422_single_qubit(self):
        x4 = (np.eye(16) + pauli_matrix("XXXX")) / 2
        z4 = (np.eye(16) + pauli_matrix("ZZZZ")) / 2
        r = disentangle_product_check([((0, 1, 2, 3), x4), ((0, 1, 2, 3), z4)], [0])
        assert r.factorizes

    def test_bell_pairs(self):
        r = disentangle_product_check([((0, 1), BELL_PROJ), ((2, 3), BELL_PROJ)], [0])
        assert r.boundary == (1,) and r.rest == (2, 3)
        assert r.factorizes

    def test_negative_control(self):
        ghz = np.zeros(16, dtype=complex)
        ghz[0] = ghz[15] = 1 / math.sqrt(2)
        r = disentangle_product_check([((q,), P0) for q in range(4)], [0], states=[StateVector(4, ghz)])
        assert not r.factorizes

    def test_noncommuting(self):
        px = (np.eye(2) + pauli_matrix("X")) / 2
        with pytest.raises(ValidationError):
            disentangle_product_check([((0,), P0), ((0,), px), ((1,), P0)], [1])


class TestCorrelatedRegions:
    def test_product(self):
        keep, _ = correlated_regions(StateVector.zeros(4), [[0], [1], [2]], 0.01)
        assert len(keep) <= 1

    def test_ghz6(self):
        amps = np.zeros(64, dtype=complex)
        amps[0] = amps[-1] = 1 / math.sqrt(2)
        keep, vals = correlated_regions(StateVector(6, amps), [[q] for q in range(6)], 0.4)
        assert len(keep) == 6
        for v in vals.values():
            assert v == pytest.approx(0.5)

    def test_history(self):
        n = 8
        psi = build_family(StateFamily("cat_history", n))
        keep, vals = correlated_regions(psi, [[n + i] for i in range(n // 2)], 1 / 16)
        assert len(keep) == n // 2
        assert min(vals.values()) >= 1 / 16


class TestHistoryClaims:
    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_claim_chain(self, n):
        psi = build_family(StateFamily("cat_history", n))
        c = history_claims(psi, n)
        assert c["ab_max_abs"] <= 1e-10
        assert c["a_min"] >= 0.5 - 1e-10
        assert c["b_min"] >= 0.25 - 1e-10
        assert c["a_min"] * c["b_min"] >= 1 / 8 - 1e-10
        assert c["correlation_min"] >= 1 / 16

    def test_claims_against_oracle(self):
        n = 4
        psi = build_family(StateFamily("cat_history", n))
        rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
        a = embed(P0, [n], 2 * n)
        b = embed(P1, [n + 1], 2 * n)
        c = history_claims(psi, n)
        assert c["a_min"] == pytest.approx(np.trace(rho @ a).real)
        assert c["b_min"] == pytest.approx(np.trace(rho @ b).real)
        assert abs(np.trace(rho @ a @ b)) < 1e-12


class TestHamiltonianText:
    def test_round_trip(self):
        h = history_hamiltonian(3)
        back = parse_hamiltonian(h.to_text())
        assert back.n == h.n and back.m == h.m
        np.testing.assert_allclose(back.dense(), h.dense(), atol=0)

    def test_inferred_width(self):
        h = parse_hamiltonian("TERM 2 : 0,0 0,0 0,0 1,0\n")
        assert h.n == 3

    @pytest.mark.parametrize("text,line", [
        ("TERM 0 : 1,0 0,0 0,0\n", 1),
        ("# c\nTERM 0 1,0 0,0 0,0 0,0\n", 2),
        ("QUBITS x\n", 1),
        ("TERM 0 : 1,0 0,0 0,0 a,0\n", 1),
    ])
    def test_errors(self, text, line):
        with pytest.raises(ParseError, match=f"line {line}"):
            parse_hamiltonian(text)
