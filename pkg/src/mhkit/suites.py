"""Canned reproduction suites, one per acceptance criterion.

Every suite takes a trial count (None selects the default) and a seed, runs
the library's independent routes against each other and returns a
SuiteResult. The CLI `suite` command and the acceptance tests share them.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .certificates import (
    CAT_GLUING_CONSTANT,
    LN4,
    eval_cat_gluing_eps_indep,
    eval_dim_power2,
    pauli_spread,
)
from .circuit import Gate, LayeredCircuit, account, check_relations, haar_unitary, random_accounting_circuit, random_circuit
from .codes import (
    CodeSpace,
    distance_bruteforce,
    distance_sandwich_check,
    groundspace,
    history_claims,
    history_hamiltonian,
    infectiousness_check,
)
from .compile import (
    Tc0Spec,
    build_exact_gadget,
    build_tc0_gadget,
    build_threshold_gadget,
    clifford_to_fanout,
    extract_correction_map,
    teleport_parallelize,
    teleported_output,
)
from .entropy import (
    StateFamily,
    binary_entropy,
    build_family,
    fa_mi_deviation_bound,
    mutual_info_dense,
    mutual_info_stabilizer,
    trace_distance,
    von_neumann,
)
from .errors import ValidationError
from .lightcone import back_lightcone, double_lightcone, find_disjoint_pair
from .pauli import PauliString, canonicalize, random_tableau
from .simulate import DEFAULT_SEED, StateVector, dense_run, estimate_local_observable_a1cq, run_measurement_program, tableau_run

__all__ = ["SuiteResult", "SUITES", "CRITERIA", "run_suite"]

MI_TOL = 1e-9
CHAIN_TOL = 1e-9
ESTIMATOR_TOL = 1e-9
HISTORY_TOL = 1e-10
CONTAINMENT_LIMIT = 1e-7


@dataclass
class SuiteResult:
    name: str
    criterion: int
    passed: bool
    trials: int
    seed: int
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "trials": self.trials,
            "seed": self.seed,
            "elapsed": self.elapsed,
            "details": self.details,
            "failures": self.failures[:20],
        }


def _disjoint_pair(n: int, rng) -> tuple[list[int], list[int]]:
    """Random nonempty disjoint A, B (needs n >= 2)."""
    labels = rng.integers(0, 3, size=n)
    i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
    labels[i], labels[j] = 1, 2
    a = [q for q in range(n) if labels[q] == 1]
    b = [q for q in range(n) if labels[q] == 2]
    return a, b


def worker_count() -> int:
    """Worker cap from MHKIT_THREADS (default 1, serial)."""
    raw = os.environ.get("MHKIT_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise ValidationError(f"MHKIT_THREADS must be an integer, got {raw!r}") from None
    if k < 1:
        raise ValidationError("MHKIT_THREADS must be at least 1")
    return k


def _pmap(fn, items) -> list:
    """Order-preserving map; results do not depend on the worker count."""
    k = worker_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def _random_state(n: int, rng) -> StateVector:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StateVector(n, v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# 1. integer mutual information of stabilizer states


def suite_integrality(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 500 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures, worst = [], 0.0
    for i in range(trials):
        n = int(rng.integers(2, 11))
        t = random_tableau(n, rng)
        a, b = _disjoint_pair(n, rng)
        stab = mutual_info_stabilizer(t, a, b)
        dense = mutual_info_dense(StateVector.from_tableau(t), a, b).value
        err = abs(stab.value - dense)
        worst = max(worst, err)
        if stab.exact_integer is None or stab.value != stab.exact_integer or err > MI_TOL:
            failures.append({"trial": i, "n": n, "A": a, "B": b, "stabilizer": stab.value, "dense": dense})
    return SuiteResult("integrality", 1, not failures, trials, seed,
                       details={"max_abs_error": worst}, failures=failures)


# ---------------------------------------------------------------------------
# 2. analytic MI of the biased CAT family


def suite_biased_cat(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    gammas = [round(0.05 * k, 2) for k in range(11)]
    sizes = (4, 6, 8)
    failures, worst, pairs = [], 0.0, 0
    for n in sizes:
        # every proper region once; MI of a pair is read off cached entropies
        regions = [r for k in range(1, n) for r in itertools.combinations(range(n), k)]
        for g in gammas:
            psi = build_family(StateFamily("biased_cat", n, g))
            ent = {r: von_neumann(psi.reduced_density(r)) for r in regions}
            want = binary_entropy(g)
            for labels in itertools.product(range(3), repeat=n):
                a = tuple(q for q in range(n) if labels[q] == 1)
                b = tuple(q for q in range(n) if labels[q] == 2)
                if not a or not b or len(a) + len(b) == n or a[0] > b[0]:
                    continue
                pairs += 1
                got = ent[a] + ent[b] - ent[tuple(sorted(a + b))]
                err = abs(got - want)
                worst = max(worst, err)
                if err > MI_TOL:
                    failures.append({"n": n, "gamma": g, "A": list(a), "B": list(b), "mi": got, "H": want})
    # the cached route must agree with the public dense MI
    rng = np.random.default_rng(seed)
    for _ in range(20):
        n = int(rng.choice(sizes))
        g = float(rng.choice(gammas))
        psi = build_family(StateFamily("biased_cat", n, g))
        a, b = _disjoint_pair(n, rng)
        if len(a) + len(b) == n:
            b = b[:-1] or b
            if len(a) + len(b) == n:
                continue
        got = mutual_info_dense(psi, a, b).value
        if abs(got - binary_entropy(g)) > MI_TOL:
            failures.append({"n": n, "gamma": g, "A": a, "B": b, "mi": got, "route": "mutual_info_dense"})
    return SuiteResult("biased_cat", 2, not failures, pairs, seed,
                       details={"pairs": pairs, "gammas": gammas, "sizes": list(sizes), "max_abs_error": worst},
                       failures=failures)


# ---------------------------------------------------------------------------
# 3. data processing along lightcones


def suite_data_processing(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 200 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures, draws, slack = [], 0, math.inf
    done = 0
    while done < trials:
        draws += 1
        n = int(rng.integers(4, 11))
        depth = int(rng.integers(1, 4))
        u = random_circuit(n, depth, rng, "generic")
        pair = find_disjoint_pair(u, range(n), "fwd_back")
        if pair is None:
            continue
        i, j = pair
        prime = _random_state(n, rng)
        psi = dense_run(u, prime)
        bi, bj = back_lightcone(u, [i]), back_lightcone(u, [j])
        di, dj = double_lightcone(u, [i]), double_lightcone(u, [j])
        low = mutual_info_dense(psi, [i], [j]).value
        mid = mutual_info_dense(prime, bi, bj).value
        high = mutual_info_dense(psi, di, dj).value
        done += 1
        slack = min(slack, mid - low + CHAIN_TOL, high - mid + CHAIN_TOL)
        if low > mid + CHAIN_TOL or mid > high + CHAIN_TOL:
            failures.append({"n": n, "depth": depth, "pair": [i, j], "chain": [low, mid, high]})
    return SuiteResult("data_processing", 3, not failures, trials, seed,
                       details={"draws": draws, "min_slack": slack}, failures=failures)


# ---------------------------------------------------------------------------
# 4. MI continuity under small perturbations


def suite_fannes_audenaert(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 200 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures, worst = [], 0.0
    for i in range(trials):
        n = int(rng.integers(2, 7))
        rho = random_tableau(n, rng).density()
        mix = float(rng.uniform(0, 0.05))
        v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        v /= np.linalg.norm(v)
        sigma = (1 - mix) * rho + mix * np.outer(v, v.conj())
        eps = trace_distance(rho, sigma)
        a, b = _disjoint_pair(n, rng)
        dev = abs(mutual_info_dense(sigma, a, b, n).value - mutual_info_dense(rho, a, b, n).value)
        bound = fa_mi_deviation_bound(eps, len(a), len(b))
        worst = max(worst, dev / bound if bound > 0 else 0.0)
        if eps > 0.05 + 1e-12 or dev > bound:
            failures.append({"trial": i, "n": n, "eps": eps, "deviation": dev, "bound": bound})
    return SuiteResult("fannes_audenaert", 4, not failures, trials, seed,
                       details={"max_ratio": worst}, failures=failures)


# ---------------------------------------------------------------------------
# 5. local observables after a Clifford block


def _ghz_prep(n: int) -> LayeredCircuit:
    # log-depth doubling tree
    layers, have = [[Gate("H", (0,))]], 1
    while have < n:
        layers.append([Gate("CNOT", (s, s + have)) for s in range(have) if s + have < n])
        have *= 2
    return LayeredCircuit(n, layers)


def _random_hermitian(k: int, rng) -> np.ndarray:
    m = rng.standard_normal((1 << k, 1 << k)) + 1j * rng.standard_normal((1 << k, 1 << k))
    return (m + m.conj().T) / 2


def suite_estimator(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 100 if trials is None else trials
    rng = np.random.default_rng(seed)
    n = 12
    failures, worst = [], 0.0
    for i in range(trials):
        cl = random_circuit(n, int(rng.integers(1, 9)), rng, "clifford", fanout=True)
        q = random_circuit(n, int(rng.integers(0, 4)), rng, "generic")
        k = int(rng.integers(1, 4))
        region = sorted(int(x) for x in rng.choice(n, size=k, replace=False))
        op = _random_hermitian(k, rng)
        got = estimate_local_observable_a1cq(cl, q, op, region)
        want = dense_run(q, dense_run(cl)).expectation(op, region)
        err = abs(got - want)
        worst = max(worst, err)
        if err > ESTIMATOR_TOL:
            failures.append({"trial": i, "region": region, "estimate": got, "dense": want})
    big = 200
    t0 = time.perf_counter()
    zz = np.diag([1.0, -1.0, -1.0, 1.0])
    val = estimate_local_observable_a1cq(_ghz_prep(big), LayeredCircuit.empty(big), zz, [0, big - 1])
    ghz_time = time.perf_counter() - t0
    if abs(val - 1.0) > ESTIMATOR_TOL or ghz_time >= 1.0:
        failures.append({"ghz_n": big, "value": val, "seconds": ghz_time})
    return SuiteResult("estimator", 5, not failures, trials, seed,
                       details={"max_abs_error": worst, "ghz200_seconds": ghz_time, "ghz200_value": val},
                       failures=failures)


# ---------------------------------------------------------------------------
# 6. teleportation compiler


def _embed_input(t0, width: int):
    gens = [g.embedded(width, range(t0.n)) for g in t0.generators]
    gens += [PauliString.single(width, q, "Z") for q in range(t0.n, width)]
    return canonicalize(gens, n=width)


def _teleport_mismatches(c, lps, t0, outcome_vectors) -> int:
    prog, _ = teleport_parallelize(c, lps)
    want = tableau_run(c, t0)
    start = _embed_input(t0, prog.n)
    bad = 0
    for y in outcome_vectors:
        st, tr = run_measurement_program(prog, start, outcomes=y)
        bad += teleported_output(prog, st, tr) != want
    return bad


def _teleport_case(case) -> dict:
    n, depth, lps, c, t0 = case
    bits = 2 * n * -(-depth // lps)
    vecs = [list(y) for y in itertools.product((0, 1), repeat=bits)]
    bad = _teleport_mismatches(c, lps, t0, vecs)
    return {"n": n, "depth": depth, "layers_per_stage": lps, "runs": len(vecs), "mismatches": bad,
            "fanout_layers": account(clifford_to_fanout(c, lps)).fanout_layers}


def suite_teleport(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 500 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures = []
    # forced outcomes, every vector, for each staging with at most 12 outcome bits
    cases = []
    for n in range(1, 6):
        for depth in range(1, 7):
            c = random_circuit(n, depth, rng, "clifford")
            t0 = random_tableau(n, rng)
            for lps in range(1, depth + 1):
                stages = -(-depth // lps)
                if 2 * n * stages > 12 or (lps > 1 and -(-depth // (lps - 1)) == stages):
                    continue
                cases.append((n, depth, lps, c, t0))
    rows = _pmap(_teleport_case, cases)
    exhaustive_runs = sum(r["runs"] for r in rows)
    fanout_max = max(r["fanout_layers"] for r in rows)
    failures += [r for r in rows if r["mismatches"] or r["fanout_layers"] > 4]
    # random outcomes at n = 64 with two stages
    n, depth, lps = 64, 4, 2
    c = random_circuit(n, depth, rng, "clifford")
    t0 = random_tableau(n, rng, depth=6)
    prog, cmap = teleport_parallelize(c, lps)
    vecs = [rng.integers(0, 2, size=prog.num_outcomes).tolist() for _ in range(trials)]
    bad = _teleport_mismatches(c, lps, t0, vecs)
    if bad:
        failures.append({"n": n, "random_trials": trials, "mismatches": bad})
    # linearity of the correction map over F2
    lin_checks = 0
    for _ in range(50):
        nn = int(rng.integers(1, 6))
        cc = random_circuit(nn, int(rng.integers(1, 7)), rng, "clifford")
        m = extract_correction_map(cc, int(rng.integers(1, 3)))
        zero = np.zeros(m.bits, dtype=np.uint8)
        if m(zero).any():
            failures.append({"linearity": "nonzero image of zero"})
        for _ in range(10):
            y1 = rng.integers(0, 2, size=m.bits).astype(np.uint8)
            y2 = rng.integers(0, 2, size=m.bits).astype(np.uint8)
            lin_checks += 1
            if not np.array_equal(m(y1 ^ y2), m(y1) ^ m(y2)):
                failures.append({"linearity": "additivity", "n": nn})
    return SuiteResult("teleport", 6, not failures, trials, seed,
                       details={"exhaustive_runs": exhaustive_runs, "random_trials_n64": trials,
                                "linearity_checks": lin_checks, "max_fanout_layers": fanout_max,
                                "n64_width": prog.n},
                       failures=failures)


# ---------------------------------------------------------------------------
# 7. exact / threshold gadgets and TC0 compilation


def _random_tc0(rng) -> Tc0Spec:
    k = int(rng.integers(2, 6))
    gates, wires = [], list(range(k))
    for layer in (1, 2):
        new = []
        for _ in range(int(rng.integers(1, 3))):
            fan = int(rng.integers(1, min(len(wires), 3) + 1))
            ins = tuple(int(w) for w in rng.choice(wires, size=fan, replace=False))
            if layer == 2 and not any(w >= k for w in ins):
                ins = (wires[-1],) + tuple(w for w in ins if w != wires[-1])[: fan - 1]
            gates.append((layer, int(rng.integers(0, len(ins) + 2)), ins))
            new.append(k + len(gates) - 1)
        wires = wires + new
    return Tc0Spec(k, tuple(gates))


def suite_gadgets(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 10 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures, built = [], 0
    levels = {}

    def check(rep, key, extra=None):
        nonlocal built
        built += 1
        acc = rep.accounting
        levels[key] = max(levels.get(key, 0), acc.mh_level)
        ok = rep.correct and rep.within_ceiling and (rep.restored or not rep.clean)
        if extra is not None:
            ok = ok and extra(acc)
        if not ok:
            failures.append({"gadget": rep.name, "clean": rep.clean, "mh_level": acc.mh_level,
                             "clifford_rounds": acc.clifford_rounds, "qnc0_rounds": acc.qnc0_rounds,
                             "correct": rep.correct, "restored": rep.restored})

    for m in range(1, 7):
        for k in range(m + 1):
            check(build_exact_gadget(m, k), "EX",
                  lambda a: a.mh_level <= 4 and a.clifford_rounds <= 3 and a.qnc0_rounds <= 2)
            check(build_exact_gadget(m, k, clean=True), "EX_clean", lambda a: a.mh_level <= 6)
        for t in range(m + 2):
            check(build_threshold_gadget(m, t), "TH", lambda a: a.mh_level <= 4)
            check(build_threshold_gadget(m, t, clean=True), "TH_clean", lambda a: a.mh_level <= 8)
    for _ in range(trials):
        spec = _random_tc0(rng)
        if spec.depth != 2:
            raise ValidationError("random TC0 generator must emit depth 2")
        check(build_tc0_gadget(spec), "TC0_d2", lambda a: a.mh_level <= 8)
    return SuiteResult("gadgets", 7, not failures, built, seed,
                       details={"gadgets_built": built, "max_mh_level": levels}, failures=failures)


# ---------------------------------------------------------------------------
# 8. CAT history state


def suite_history(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    failures, rows = [], []
    for n in (4, 6, 8):
        psi = build_family(StateFamily("cat_history", n))
        c = history_claims(psi, n)
        gs = groundspace(history_hamiltonian(n))
        overlap = float(np.linalg.norm(gs.code.basis.conj().T @ psi.amplitudes) ** 2)
        row = {"n": n, **c, "gap": gs.gap, "gap_n2": gs.gap * n * n, "ground_dim": gs.code.dim,
               "history_in_groundspace": overlap}
        rows.append(row)
        ok = (c["ab_max_abs"] <= HISTORY_TOL and c["a_min"] >= 0.5 - HISTORY_TOL
              and c["b_min"] >= 0.25 - HISTORY_TOL and c["correlation_min"] >= 1 / 16
              and abs(overlap - 1) < 1e-8)
        if not ok:
            failures.append(row)
    scaled = [r["gap_n2"] for r in rows]
    # gap * n^2 bounded below and nondecreasing over the three sizes
    monotone = all(b >= a for a, b in zip(scaled, scaled[1:])) and scaled[0] > 0
    if not monotone:
        failures.append({"gap_n2": scaled})
    return SuiteResult("history", 8, not failures, len(rows), seed,
                       details={"rows": rows, "gap_n2_monotone": monotone}, failures=failures)


# ---------------------------------------------------------------------------
# 9. codes


_FOUR_TWO_TWO = ["XXXX", "ZZZZ"]
_FIVE_ONE_THREE = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def _code(strings) -> CodeSpace:
    return CodeSpace.from_stabilizers([PauliString.from_str(s) for s in strings])


def _shallow(n: int, rng) -> LayeredCircuit:
    if rng.random() < 0.5:
        return random_circuit(n, int(rng.integers(1, 3)), rng, "generic")
    return random_circuit(n, int(rng.integers(1, 4)), rng, "clifford")


def suite_codes(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 50 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures = []
    d422 = distance_bruteforce(_code(_FOUR_TWO_TWO))
    d513 = distance_bruteforce(_code(_FIVE_ONE_THREE))
    if d422 != 2 or d513 != 3:
        failures.append({"d_422": d422, "d_513": d513})
    for n in range(1, 7):
        t = random_tableau(n, rng)
        d = distance_bruteforce(CodeSpace.from_stabilizers(t.generators, n=n))
        if d != n + 1:
            failures.append({"dim1_n": n, "distance": d})
    for i in range(trials):
        n = int(rng.integers(3, 6))
        t = random_tableau(n, rng)
        keep = int(rng.integers(1, n))
        c = CodeSpace.from_stabilizers(t.generators[:keep], n=n)
        if not distance_sandwich_check(c, _shallow(n, rng)):
            failures.append({"sandwich_trial": i, "n": n})
    worst, conclusive = 0.0, 0
    for i in range(20):
        n = int(rng.integers(4, 9))
        phi = random_tableau(n, rng, depth=int(rng.integers(1, 4)))
        if i % 2:
            u = LayeredCircuit(n, [[Gate("GENERIC1", (q,), haar_unitary(2, rng)) for q in range(n)]])
        else:
            pairs = [Gate("GENERIC2", (q, q + 1), haar_unitary(4, rng)) for q in range(0, n - 1, 2)]
            u = LayeredCircuit(n, [pairs])
        r = infectiousness_check(phi, u, int(rng.integers(1, 3)))
        res = max(r.residuals["inner"], r.residuals["outer"])
        worst = max(worst, res)
        conclusive += r.conclusive
        if res >= CONTAINMENT_LIMIT:
            failures.append({"infectiousness_trial": i, "n": n, "residuals": r.residuals})
    return SuiteResult("codes", 9, not failures, trials, seed,
                       details={"d_422": d422, "d_513": d513, "infectious_max_residual": worst,
                                "infectious_conclusive": conclusive}, failures=failures)


# ---------------------------------------------------------------------------
# 10. certificates


def suite_certificates(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    failures = []
    rng = np.random.default_rng(seed)
    for alpha, beta in [(0.5, 0.031), (0.3, 0.01), (0.4, 0.02), (0.2, 0.005)]:
        cert = eval_cat_gluing_eps_indep(alpha, beta, 1e-12, 1024)
        gap = cert.explicit["gap"]
        want = 0.037 * gap ** math.log(4)
        got = cert.explicit["eps_threshold"]
        if f"{got:.6g}" != f"{want:.6g}":
            failures.append({"alpha": alpha, "beta": beta, "threshold": got, "expected": want})
    if CAT_GLUING_CONSTANT != 0.037 or abs(LN4 - math.log(4)) > 1e-15:
        failures.append({"constants": [CAT_GLUING_CONSTANT, LN4]})
    fired_dims = []
    for dim in range(1, 65):
        ell, d = int(rng.integers(1, 4)), int(rng.integers(4, 12))
        cert = eval_dim_power2(ell, 3, 0.5, d, dim)
        power = dim & (dim - 1) == 0
        if cert.fired == power:
            failures.append({"dim": dim, "fired": cert.fired})
        if cert.fired:
            fired_dims.append(dim)
            if abs(cert.bound - 0.5 * math.log2(d / ell)) > 1e-12:
                failures.append({"dim": dim, "bound": cert.bound})
    n = 6
    witness = LayeredCircuit(n, [[Gate("FANOUT", tuple(range(n)))], [Gate("T", (q,)) for q in range(n)]])
    spread = pauli_spread(witness, "X0", "schrodinger")
    if spread != 2 ** n:
        failures.append({"witness_spread": spread})
    counts = []
    for size in (6, 8, 10):
        r = np.random.default_rng(seed)
        cl = random_circuit(size, 4, r, "clifford", fanout=True)
        g = [haar_unitary(4, r) for _ in range(3)]
        q = LayeredCircuit(size, [
            [Gate("GENERIC2", (0, 1), g[0]), Gate("GENERIC2", (2, 3), g[1])],
            [Gate("GENERIC2", (1, 2), g[2])],
        ])
        counts.append(pauli_spread(cl.then(q), "Z1"))
    if len(set(counts)) != 1:
        failures.append({"a1cq_spread": counts})
    return SuiteResult("certificates", 10, not failures, 64, seed,
                       details={"witness_spread": spread, "a1cq_spread": counts,
                                "dim_power2_fired_count": len(fired_dims)},
                       failures=failures)


# ---------------------------------------------------------------------------
# 11. accounting relations


def suite_accounting(trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    trials = 1000 if trials is None else trials
    rng = np.random.default_rng(seed)
    failures, top = [], 0
    for i in range(trials):
        c = random_accounting_circuit(int(rng.integers(1, 9)), int(rng.integers(0, 13)), rng)
        r = account(c)
        top = max(top, r.mh_level)
        v = check_relations(r)
        if v:
            failures.append({"trial": i, "violations": v})
    return SuiteResult("accounting", 11, not failures, trials, seed,
                       details={"max_mh_level": top}, failures=failures)


SUITES = {
    "integrality": suite_integrality,
    "biased_cat": suite_biased_cat,
    "data_processing": suite_data_processing,
    "fannes_audenaert": suite_fannes_audenaert,
    "estimator": suite_estimator,
    "teleport": suite_teleport,
    "gadgets": suite_gadgets,
    "history": suite_history,
    "codes": suite_codes,
    "certificates": suite_certificates,
    "accounting": suite_accounting,
}

CRITERIA = {name: i + 1 for i, name in enumerate(SUITES)}


def run_suite(name: str, trials: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if trials is not None and trials < 0:
        raise ValidationError("trials must be nonnegative")
    t0 = time.perf_counter()
    res = SUITES[name](trials, seed)
    res.elapsed = time.perf_counter() - t0
    return res
