import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mhkit.circuit import (
    ComplexityReport,
    Gate,
    LayeredCircuit,
    account,
    check_relations,
    haar_unitary,
    mh_decompose,
    parse_circuit,
    random_accounting_circuit,
    random_circuit,
    to_mhq,
)
from mhkit.errors import DecompositionError, ParseError, ValidationError
from oracles import circuit_unitary

BELL = "H 0 / CNOT 0 1"


class TestParse:
    def test_bell_inline(self):
        c = parse_circuit(BELL)
        assert c.depth == 2 and c.n == 2
        psi = circuit_unitary(c)[:, 0]
        assert np.allclose(psi, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_blank_line_layers(self):
        c = parse_circuit("H 0\nH 1\n\nCNOT 0 1\n")
        assert [len(layer) for layer in c.layers] == [2, 1]

    def test_overlap_error(self):
        with pytest.raises(ParseError):
            parse_circuit("H 0\nX 0")

    def test_fanout_single_gate(self):
        c = parse_circuit("FANOUT 0 1 2 3")
        (g,) = c.layers[0]
        assert g.kind == "FANOUT" and g.qubits == (0, 1, 2, 3) and g.is_clifford

    def test_fanout_truth_table(self):
        u = parse_circuit("FANOUT 0 1 2 3").layers[0][0].unitary()
        for b in range(16):
            ctrl = b >> 3
            expected = b ^ (0b111 if ctrl else 0)
            assert u[expected, b] == 1

    def test_syntax_error_line_number(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_circuit("H 0\n# comment\nFOO 1\n")

    def test_non_unitary_generic(self):
        with pytest.raises(ParseError):
            parse_circuit("GENERIC1 0 1,0 1,0 0,0 1,0")

    def test_generic2_continuation(self):
        m = np.eye(4)
        pairs = [f"{v.real},{v.imag}" for v in m.reshape(-1).astype(complex)]
        text = "GENERIC2 0 1 " + " ".join(pairs[:8]) + "\n" + " ".join(pairs[8:]) + "\n/\nH 0\n"
        c = parse_circuit(text)
        assert c.depth == 2 and np.allclose(c.layers[0][0].matrix, np.eye(4))

    def test_roundtrip_bytes(self):
        rng = np.random.default_rng(0)
        c = random_circuit(5, 6, rng, gate_set="mixed", fanout=True)
        text = to_mhq(c)
        again = parse_circuit(text)
        assert to_mhq(again) == text
        assert np.allclose(circuit_unitary(again), circuit_unitary(c))

    def test_measure_and_parity_syntax(self):
        c = parse_circuit("MEASURE_Z 0 0 / CLASSICAL_PARITY X 1 0")
        assert c.layers[0][0].cbits == (0,) and c.layers[1][0].pauli == "X"
        assert c.num_cbits == 1

    def test_fanout_needs_two(self):
        with pytest.raises(ValidationError):
            Gate("FANOUT", [0])


class TestDecompose:
    def test_all_clifford(self):
        d = mh_decompose(parse_circuit("H 0 / CNOT 0 1 / S 1"), 1)
        assert len(d.blocks) == 1 and d.mh_level == 0

    def test_generic_single_block(self):
        rng = np.random.default_rng(1)
        c = random_circuit(4, 3, rng, gate_set="generic")
        d = mh_decompose(c, 3)
        assert [b.tag for b in d.blocks] == ["Q"] and d.mh_level == 0

    def test_c_q_c(self):
        d = mh_decompose(parse_circuit("H 0 / T 0 / H 0"), 1)
        assert [b.tag for b in d.blocks] == ["C", "Q", "C"] and d.mh_level == 2

    def test_budget_splits_qnc0(self):
        d = mh_decompose(parse_circuit("T 0 / T 0 / T 0"), 2)
        assert [(b.tag, b.depth) for b in d.blocks] == [("Q", 2), ("C", 0), ("Q", 1)]

    def test_infeasible(self):
        with pytest.raises(DecompositionError):
            mh_decompose(parse_circuit("FANOUT 0 1 2\nT 3"), 1)

    def test_measurement_closes_block(self):
        d = mh_decompose(parse_circuit("H 0 / MEASURE_Z 0 0 / H 1"), 1)
        assert [b.tag for b in d.blocks] == ["C", "Q", "C"]

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 8), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_recompose_is_identity(self, n, depth, budget, seed):
        rng = np.random.default_rng(seed)
        c = random_circuit(n, depth, rng, gate_set="mixed")
        d = mh_decompose(c, budget)
        tags = [b.tag for b in d.blocks]
        assert all(a != b for a, b in zip(tags, tags[1:]))
        assert np.allclose(circuit_unitary(d.recompose()), circuit_unitary(c), atol=1e-10)
        for b in d.blocks:
            if b.tag == "Q":
                assert b.depth <= budget
                assert all(len(g.qubits) <= 2 for layer in b.layers for g in layer)


class TestAccount:
    def test_bell(self):
        r = account(parse_circuit(BELL))
        assert (r.depth, r.t_count, r.mh_level) == (2, 0, 0)

    def test_t_layer(self):
        r = account(parse_circuit("T 0\nT 1\nT 2"))
        assert (r.t_count, r.t_depth) == (3, 1)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        c = random_accounting_circuit(6, 12, rng)
        assert account(c) == account(c) == account(mh_decompose(c))

    def test_fanout_counts(self):
        r = account(parse_circuit("FANOUT 0 1 2 / FANOUT 0 1 2 / H 0"))
        assert r.fanout_layers == 2 and r.fanout_depth == 2


class TestRelations:
    def test_satisfied(self):
        r = ComplexityReport(depth=5, clifford_rounds=2, qnc0_rounds=1, mh_level=2, t_count=1,
                             t_depth=1, fanout_depth=0, measurement_rounds=0)
        assert check_relations(r) == []

    def test_lower_chain_violation(self):
        r = ComplexityReport(depth=5, clifford_rounds=1, qnc0_rounds=2, mh_level=4, t_count=2,
                             t_depth=2, fanout_depth=0, measurement_rounds=0)
        assert "clifford_rounds >= mh_level/2" in check_relations(r)

    def test_random_reports(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            c = random_accounting_circuit(int(rng.integers(1, 8)), int(rng.integers(0, 15)), rng)
            assert check_relations(account(c, int(rng.integers(1, 4)))) == []
