import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mhkit.circuit import Gate, LayeredCircuit, account, check_relations, haar_unitary, random_circuit
from mhkit.compile import (
    Tc0Spec,
    basis_run,
    build_exact_gadget,
    build_threshold_gadget,
    build_tc0_gadget,
    clifford_to_fanout,
    compile_tc0,
    evaluate_tc0,
    extract_correction_map,
    parse_tc0,
    teleport_parallelize,
    teleported_output,
)
from mhkit.errors import FeasibilityError, GateClassError, ParseError, ValidationError
from mhkit.pauli import StabilizerTableau, random_tableau
from mhkit.simulate import StateVector, dense_run, run_measurement_program, tableau_run

from compile_checks import all_outcomes, choi_matches, dense_matches, teleport_trials
from oracles import circuit_unitary, pauli_matrix

GHZ4 = LayeredCircuit(4, [[Gate("H", [0])], [Gate("CNOT", [0, 1])], [Gate("CNOT", [1, 2])], [Gate("CNOT", [2, 3])]])


def _letters(x, z):
    return "".join("IXZY"[a + 2 * b] for a, b in zip(x, z))


class TestCorrectionMap:
    def test_identity_block(self):
        m = extract_correction_map(LayeredCircuit(3, [[]]))
        np.testing.assert_array_equal(m.matrix, np.eye(6, dtype=np.uint8))

    def test_cnot_column(self):
        m = extract_correction_map(LayeredCircuit(2, [[Gate("CNOT", [0, 1])]]))
        assert _letters(m.matrix[:2, 0], m.matrix[2:, 0]) == "XX"
        assert _letters(m.matrix[:2, 3], m.matrix[2:, 3]) == "ZZ"

    @pytest.mark.parametrize("seed", range(4))
    def test_columns_against_dense_conjugation(self, seed):
        rng = np.random.default_rng(seed)
        c = random_circuit(3, 4, rng)
        m = extract_correction_map(c, 2)
        for s in range(m.stages):
            suffix = LayeredCircuit(3, c.layers[2 * s:])
            u = circuit_unitary(suffix)
            for j, letter in enumerate(["X"] * 3 + ["Z"] * 3):
                p = pauli_matrix("".join(letter if q == j % 3 else "I" for q in range(3)))
                col = m.matrix[:, 6 * s + j]
                q = pauli_matrix(_letters(col[:3], col[3:]))
                overlap = np.trace(q.conj().T @ u @ p @ u.conj().T) / 8
                assert abs(abs(overlap) - 1) < 1e-9

    def test_linearity(self):
        rng = np.random.default_rng(3)
        m = extract_correction_map(random_circuit(5, 6, rng))
        for _ in range(100):
            a = rng.integers(0, 2, m.bits)
            b = rng.integers(0, 2, m.bits)
            np.testing.assert_array_equal(m(a ^ b), m(a) ^ m(b))

    def test_non_clifford(self):
        with pytest.raises(GateClassError):
            extract_correction_map(LayeredCircuit(1, [[Gate("T", [0])]]))


class TestTeleport:
    def test_cnot_all_outcomes_dense(self):
        rng = np.random.default_rng(0)
        c = LayeredCircuit(2, [[Gate("CNOT", [0, 1])]])
        prog, cmap = teleport_parallelize(c)
        assert cmap.stages == 1 and prog.num_outcomes == 4
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a /= np.linalg.norm(a)
        want = circuit_unitary(c) @ a
        start = StateVector(prog.n, np.kron(a, np.eye(1, 1 << (prog.n - 2), 0).ravel()))
        for y in all_outcomes(4):
            st, tr = run_measurement_program(prog, start, outcomes=y)
            out = teleported_output(prog, st, tr)
            assert abs(abs(np.vdot(want, out.amplitudes)) - 1) < 1e-9

    def test_identity_any_staging(self):
        rng = np.random.default_rng(1)
        c = LayeredCircuit(2, [[], [], []])
        t0 = random_tableau(2, rng)
        for stage in (1, 2, 3):
            prog, cmap = teleport_parallelize(c, stage)
            y = rng.integers(0, 2, prog.num_outcomes).tolist()
            assert teleport_trials(c, prog, t0, [y]) == 0

    def test_empty_circuit(self):
        prog, cmap = teleport_parallelize(LayeredCircuit.empty(3))
        assert prog.n == 3 and prog.outputs == (0, 1, 2) and cmap.bits == 0

    @pytest.mark.parametrize("n,depth", [(1, 3), (2, 2), (3, 1)])
    def test_exhaustive_outcomes(self, n, depth):
        rng = np.random.default_rng(10 * n + depth)
        c = random_circuit(n, depth, rng)
        prog, _ = teleport_parallelize(c)
        assert teleport_trials(c, prog, random_tableau(n, rng), all_outcomes(prog.num_outcomes)) == 0

    def test_depth30_staged(self):
        rng = np.random.default_rng(2)
        c = random_circuit(6, 30, rng)
        prog, _ = teleport_parallelize(c, 5)
        assert prog.quantum_depths()[0] <= 5 + 4
        bad = 0
        for _ in range(50):
            t0 = random_tableau(6, rng)
            y = rng.integers(0, 2, prog.num_outcomes).tolist()
            bad += teleport_trials(c, prog, t0, [y])
        assert bad == 0

    def test_quantum_depth_is_constant(self):
        rng = np.random.default_rng(4)
        depths = {teleport_parallelize(random_circuit(4, d, rng))[0].quantum_depths()[0] for d in (2, 8, 32)}
        assert max(depths) <= 5

    def test_sampled_outcomes_n64(self):
        rng = np.random.default_rng(5)
        c = random_circuit(64, 2, rng)
        prog, _ = teleport_parallelize(c)
        t0 = random_tableau(64, rng)
        ys = [rng.integers(0, 2, prog.num_outcomes).tolist() for _ in range(5)]
        assert teleport_trials(c, prog, t0, ys) == 0


class TestCliffordToFanout:
    def test_identity(self):
        w = clifford_to_fanout(LayeredCircuit.empty(3))
        assert w.depth == 0 and account(w).fanout_depth == 0

    def test_ghz(self):
        w = clifford_to_fanout(GHZ4)
        assert account(w).fanout_layers <= 4
        assert choi_matches(GHZ4, w)
        # the data register ends in the GHZ state
        t = tableau_run(w)
        from mhkit.pauli import restrict, tableau_statevector

        want = dense_run(GHZ4).amplitudes
        got = tableau_statevector(restrict(t, range(4)))
        assert abs(abs(np.vdot(want, got)) - 1) < 1e-9

    def test_twenty_layers(self):
        rng = np.random.default_rng(6)
        c = random_circuit(5, 20, rng)
        w = clifford_to_fanout(c, 5)
        r = account(w)
        assert r.fanout_layers <= 4 and r.fanout_depth <= 4
        assert check_relations(r) == []
        assert choi_matches(c, w)

    def test_dense_small(self):
        rng = np.random.default_rng(7)
        c = LayeredCircuit(1, [[Gate("H", [0])], [Gate("S", [0])]])
        w = clifford_to_fanout(c)
        assert w.n <= 14
        assert dense_matches(c, w, rng)

    def test_depth_does_not_grow(self):
        rng = np.random.default_rng(8)
        depths = [clifford_to_fanout(random_circuit(2, d, rng)).depth for d in (2, 6, 12)]
        assert max(depths) <= 20

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 4), st.integers(1, 2), st.integers(0, 2**32 - 1))
    def test_random_cliffords(self, n, depth, stage, seed):
        c = random_circuit(n, depth, np.random.default_rng(seed))
        w = clifford_to_fanout(c, stage)
        assert account(w).fanout_layers <= 4
        assert choi_matches(c, w)

    def test_non_clifford(self):
        with pytest.raises(GateClassError):
            clifford_to_fanout(LayeredCircuit(1, [[Gate("T", [0])]]))


class TestBasisRun:
    @pytest.mark.parametrize("seed", range(6))
    def test_against_dense(self, seed):
        rng = np.random.default_rng(seed)
        c = random_circuit(5, 5, rng, "mixed", fanout=False)
        c = c.then(random_circuit(5, 2, rng, "clifford", fanout=True))
        x = int(rng.integers(0, 32))
        sparse = basis_run(c, x)
        dense = circuit_unitary(c)[:, x]
        got = np.zeros(32, dtype=complex)
        for k, v in sparse.items():
            got[k] = v
        np.testing.assert_allclose(got, dense, atol=1e-10)


def _dense_table(rep):
    c = rep.circuit
    u_cols = {}
    n = c.n
    for x in range(1 << len(rep.inputs)):
        start = 0
        for i, q in enumerate(rep.inputs):
            start |= ((x >> i) & 1) << (n - 1 - q)
        psi = dense_run(c, StateVector.basis(n, [(start >> (n - 1 - q)) & 1 for q in range(n)]))
        u_cols[x] = psi.amplitudes
    return u_cols


class TestExactGadget:
    def test_m2_k1(self):
        rep = build_exact_gadget(2, 1)
        assert [row["expected"][0] for row in rep.functional_table] == [0, 1, 1, 0]
        assert rep.correct

    def test_m4_k2(self):
        rep = build_exact_gadget(4, 2)
        assert len(rep.functional_table) == 16 and rep.correct
        assert rep.accounting.clifford_rounds <= 3 and rep.accounting.qnc0_rounds <= 2
        assert rep.within_ceiling

    def test_clean_m3(self):
        rep = build_exact_gadget(3, 1, clean=True)
        assert rep.correct and rep.restored
        assert rep.accounting.mh_level <= 6

    @pytest.mark.parametrize("m,k,clean", [(2, 0, False), (2, 2, True), (3, 1, False)])
    def test_dense_oracle(self, m, k, clean):
        rep = build_exact_gadget(m, k, clean)
        n = rep.circuit.n
        for x, amps in _dense_table(rep).items():
            bits = [(x >> i) & 1 for i in range(m)]
            out = n - 1 - rep.outputs[0]
            p = sum(abs(a) ** 2 for idx, a in enumerate(amps) if ((idx >> out) & 1) == int(sum(bits) == k))
            assert p >= 1 - 1e-9

    def test_errors(self):
        with pytest.raises(FeasibilityError):
            build_exact_gadget(9, 1)
        with pytest.raises(ValidationError):
            build_exact_gadget(4, 5)
        with pytest.raises(ValidationError):
            build_exact_gadget(0, 0)


class TestThresholdGadget:
    def test_constant_one(self):
        rep = build_threshold_gadget(3, 0)
        assert all(row["expected"] == [1] for row in rep.functional_table) and rep.correct

    def test_m4_t2(self):
        rep = build_threshold_gadget(4, 2)
        assert rep.correct and rep.within_ceiling and rep.accounting.mh_level <= 4

    def test_clean_m3_t2(self):
        rep = build_threshold_gadget(3, 2, clean=True)
        assert rep.correct and rep.restored
        assert rep.accounting.mh_level <= 8 and check_relations(rep.accounting) == []

    def test_constant_zero(self):
        rep = build_threshold_gadget(2, 3)
        assert rep.correct and all(row["expected"] == [0] for row in rep.functional_table)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_all_thresholds(self, m):
        for t in range(m + 2):
            for clean in (False, True):
                rep = build_threshold_gadget(m, t, clean)
                assert rep.correct
                assert not clean or rep.restored

    def test_structure(self):
        rep = build_threshold_gadget(3, 1)
        kinds = [{g.kind for g in layer} for layer in rep.circuit.layers]
        assert "FANOUT" in kinds[0]
        assert any("GENERIC1" in k for k in kinds)


MAJ3 = "INPUTS 3\nGATE 1 TH 2 0 1 2\n"
AND_OF_MAJ = "INPUTS 4\nGATE 1 TH 2 0 1 2\nGATE 1 TH 2 1 2 3\nGATE 2 TH 2 4 5\n"


class TestTc0:
    def test_majority(self):
        rep = build_tc0_gadget(MAJ3)
        assert rep.correct and rep.accounting.mh_level <= 4

    def test_and_of_majorities(self):
        spec = parse_tc0(AND_OF_MAJ)
        c, r = compile_tc0(spec)
        assert r.mh_level <= 8 and check_relations(r) == []
        rep = build_tc0_gadget(spec)
        assert rep.correct and len(rep.functional_table) == 16

    def test_clean(self):
        rep = build_tc0_gadget(AND_OF_MAJ, clean=True)
        assert rep.correct and rep.restored and rep.accounting.mh_level <= 16

    def test_empty(self):
        c, r = compile_tc0(Tc0Spec(3, ()))
        assert c.depth == 0 and r.mh_level == 0

    def test_evaluator(self):
        spec = parse_tc0(AND_OF_MAJ)
        for bits in itertools.product([0, 1], repeat=4):
            maj1 = int(bits[0] + bits[1] + bits[2] >= 2)
            maj2 = int(bits[1] + bits[2] + bits[3] >= 2)
            assert evaluate_tc0(spec, bits) == (maj1 & maj2,)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_specs(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        gates = []
        wires = list(range(k))
        for layer in (1, 2):
            new = []
            for _ in range(int(rng.integers(1, 3))):
                fan = int(rng.integers(1, min(len(wires), 3) + 1))
                ins = tuple(int(w) for w in rng.choice(wires, size=fan, replace=False))
                gates.append((layer, int(rng.integers(0, fan + 2)), ins))
                new.append(k + len(gates) - 1)
            wires = wires + new
        rep = build_tc0_gadget(Tc0Spec(k, tuple(gates)))
        assert rep.correct and rep.accounting.mh_level <= 8

    @pytest.mark.parametrize("text", [
        "GATE 1 TH 1 0\n",
        "INPUTS 2\nGATE 1 MAJ 0 1\n",
        "INPUTS 2\nGATE 1 TH 1 0 5\n",
        "INPUTS 2\nGATE 1 TH 1 0\nGATE 1 TH 1 2\n",
        "INPUTS x\n",
    ])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_tc0(text)

    def test_caps(self):
        wide = Tc0Spec(9, ((1, 3, tuple(range(9))),))
        with pytest.raises(FeasibilityError):
            compile_tc0(wide)
        deep = Tc0Spec(1, tuple((layer, 1, (layer - 1 if layer > 1 else 0,)) for layer in range(1, 5)))
        with pytest.raises(FeasibilityError):
            compile_tc0(deep)
