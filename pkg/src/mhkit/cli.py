"""`mhkit` command line: analysis, simulation, certificates, compilation and suites.

Exit codes: 0 success, 1 a suite reported failures, 2 validation or usage
error, 3 refusal at a feasibility cap.
"""

from __future__ import annotations

import os

# cap BLAS worker pools before numpy loads
_threads = os.environ.get("MHKIT_THREADS")
if _threads and _threads.isdigit() and int(_threads) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import csv
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from .circuit import DEFAULT_QNC0_BUDGET, Gate, LayeredCircuit, account, check_relations, parse_circuit, to_mhq
from .errors import FeasibilityError, MhkitError, ValidationError
from .simulate import DEFAULT_SEED

FLOAT_DIGITS = 12
EXIT_SUITE_FAILED = 1
EXIT_VALIDATION = 2
EXIT_FEASIBILITY = 3


# ---------------------------------------------------------------------------
# output


def _clean(v):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        r = float(f"{v:.{FLOAT_DIGITS}g}")
        return 0.0 if r == 0 else r
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if v is None or isinstance(v, str):
        return v
    return str(v)


def _flatten(d, prefix=""):
    rows = []
    if isinstance(d, dict):
        for k, v in d.items():
            rows += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(d, list) and any(isinstance(x, (dict, list)) for x in d):
        for i, v in enumerate(d):
            rows += _flatten(v, f"{prefix}.{i}" if prefix else str(i))
    else:
        rows.append((prefix, d))
    return rows


def _scalar(v) -> str:
    if isinstance(v, list):
        return " ".join(_scalar(x) for x in v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _render(data, fmt: str) -> str:
    data = _clean(data)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if isinstance(data, list) and data and all(isinstance(r, dict) for r in data):
            # sweep output: one row per record, flattened columns
            flat = [dict(_flatten(r)) for r in data]
            cols = sorted({k for r in flat for k in r})
            w.writerow(cols)
            for r in flat:
                w.writerow([_scalar(r.get(k)) for k in cols])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(data):
                w.writerow([k, _scalar(v)])
        return buf.getvalue()
    return "".join(f"{k}: {_scalar(v)}\n" for k, v in _flatten(data))


def _emit(data, fmt: str, output: str | None) -> None:
    text = _render(data, fmt)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _format_options(f):
    f = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                     help="Write the result here instead of stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json",
                     show_default=True, help="Output format.")(f)
    return f


def _seed(_ctx, _param, value):
    if value is None:
        return DEFAULT_SEED
    try:
        s = int(str(value), 0)
    except ValueError:
        raise click.BadParameter(f"{value!r} is not an integer (decimal or 0x hex)") from None
    if not 0 <= s < 1 << 64:
        raise click.BadParameter("seed must fit in 64 unsigned bits")
    return s


def _ints(text: str | None) -> list[int]:
    if text is None or not text.strip():
        return []
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ValidationError(f"expected comma-separated qubit indices, got {text!r}") from None


def _load_circuit(path: str) -> LayeredCircuit:
    return parse_circuit(Path(path).read_text())


def _need(kind: str, **values):
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ValidationError(f"{kind} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


# ---------------------------------------------------------------------------
# commands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Toolkit for stabilizer mutual information, lightcones, depth certificates and compilation.

    Seeds default to 0x3115EED. MHKIT_THREADS caps worker processes and BLAS threads.
    """


@cli.command()
@click.option("--circuit", required=True, type=click.Path(exists=True, dir_okay=False), help=".mhq circuit file.")
@click.option("--region", default=None, help="Comma-separated qubits, e.g. 0,5,7.")
@click.option("--mode", type=click.Choice(["fwd_back", "back_fwd"]), default="fwd_back", show_default=True)
@_format_options
def lightcone(circuit, region, mode, fmt, output):
    """Backward, forward and double lightcones of a region, the blowup and a disjoint pair."""
    from .lightcone import back_lightcone, blowup, double_lightcone, find_disjoint_pair, forward_lightcone

    c = _load_circuit(circuit)
    reg = _ints(region)
    cands = reg if len(reg) >= 2 else list(range(c.n))
    pair = find_disjoint_pair(c, cands, mode) if c.n >= 2 else None
    data = {
        "n": c.n,
        "depth": c.depth,
        "blowup": blowup(c),
        "region": reg,
        "back": list(back_lightcone(c, reg)),
        "forward": list(forward_lightcone(c, reg)),
        "double": list(double_lightcone(c, reg, mode)),
        "mode": mode,
        "disjoint_pair": list(pair) if pair else None,
    }
    _emit(data, fmt, output)


@cli.command(name="account")
@click.option("--circuit", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--qnc0-budget", type=int, default=DEFAULT_QNC0_BUDGET, show_default=True,
              help="Largest depth of a constant-depth block.")
@_format_options
def account_cmd(circuit, qnc0_budget, fmt, output):
    """Complexity report (depths, rounds, MH level) of a circuit."""
    r = account(_load_circuit(circuit), qnc0_budget)
    _emit({**r.as_dict(), "violations": check_relations(r)}, fmt, output)


def _split_clifford_prefix(c: LayeredCircuit):
    from .pauli import CLIFFORD_KINDS

    k = 0
    while k < c.depth and all(g.kind in CLIFFORD_KINDS for g in c.layers[k]):
        k += 1
    return LayeredCircuit(c.n, c.layers[:k]), LayeredCircuit(c.n, c.layers[k:])


@cli.command()
@click.option("--circuit", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "inp", default="zeros", show_default=True, help="'zeros' or a bitstring of length n.")
@click.option("--observable", required=True, help='Pauli observable such as "Z0*Z1".')
@click.option("--method", type=click.Choice(["auto", "dense", "hybrid"]), default="auto", show_default=True,
              help="hybrid: tableau for the Clifford prefix, dense on the lightcone of the rest.")
@_format_options
def sim(circuit, inp, observable, method, fmt, output):
    """Exact expectation value of a Pauli observable."""
    from .simulate import STATEVECTOR_CAP, StateVector, dense_run, estimate_local_observable_a1cq, parse_observable

    c = _load_circuit(circuit)
    if any(g.kind in ("MEASURE_Z", "CLASSICAL_PARITY") for g in c.gates()):
        raise ValidationError("sim takes unitary circuits; measurement programs are not supported here")
    if inp == "zeros":
        bits = [0] * c.n
    elif len(inp) == c.n and set(inp) <= {"0", "1"}:
        bits = [int(b) for b in inp]
    else:
        raise ValidationError(f"--input must be 'zeros' or a {c.n}-bit string")
    op, region = parse_observable(observable, c.n)
    prep = LayeredCircuit(c.n, [[Gate("X", (q,)) for q in range(c.n) if bits[q]]])
    cl, rest = _split_clifford_prefix(c)
    if method == "auto":
        method = "hybrid" if c.n > 12 else "dense"
    if method == "hybrid":
        val = estimate_local_observable_a1cq(prep.then(cl), rest, op.matrix(), region)
    else:
        if c.n > STATEVECTOR_CAP:
            raise FeasibilityError(f"dense simulation refused for n={c.n} > {STATEVECTOR_CAP}")
        psi = dense_run(c, StateVector.basis(c.n, bits))
        val = psi.expectation(op.matrix(), region)
    _emit({"expectation": val, "method": method, "observable": observable, "n": c.n}, fmt, output)


@cli.command()
@click.option("--family", type=click.Choice(["biased_cat", "w_state", "cat_history"]), default=None)
@click.option("--gamma", type=float, default=None, help="Bias of biased_cat.")
@click.option("--n", "n", type=int, default=None, help="Family size.")
@click.option("--stabilizer", default=None, help='Comma-separated generators, e.g. "XX,ZZ".')
@click.option("--A", "a", required=True, help="Region A, comma-separated.")
@click.option("--B", "b", required=True, help="Region B, comma-separated.")
@_format_options
def mi(family, gamma, n, stabilizer, a, b, fmt, output):
    """Mutual information I(A:B) of a named family (dense) or a stabilizer state (exact)."""
    from .entropy import StateFamily, build_family, mutual_info_dense, mutual_info_stabilizer
    from .pauli import StabilizerTableau

    ra, rb = _ints(a), _ints(b)
    if (family is None) == (stabilizer is None):
        raise ValidationError("give exactly one of --family or --stabilizer")
    if stabilizer is not None:
        t = StabilizerTableau.from_strings([s.strip() for s in stabilizer.split(",") if s.strip()])
        v = mutual_info_stabilizer(t, ra, rb)
        data = {"value": v.value, "exact_integer": v.exact_integer, "analytic": None, "route": "stabilizer"}
    else:
        _need(family, n=n)
        f = StateFamily(family, n, gamma)
        v = mutual_info_dense(build_family(f), ra, rb)
        data = {"value": v.value, "exact_integer": v.exact_integer, "analytic": f.analytic_mi(ra, rb),
                "route": "dense"}
    _emit(data, fmt, output)


def _parse_state(text: str):
    from .entropy import StateFamily, build_family

    parts = text.split(":")
    try:
        if parts[0] == "biased_cat" and len(parts) == 3:
            return build_family(StateFamily("biased_cat", int(parts[2]), float(parts[1])))
        if parts[0] in ("w_state", "cat_history") and len(parts) == 2:
            return build_family(StateFamily(parts[0], int(parts[1])))
    except ValueError:
        pass
    raise ValidationError(f"--state must be biased_cat:<gamma>:<n>, w_state:<n> or cat_history:<n>, got {text!r}")


@cli.command()
@click.option("--kind", required=True, type=click.Choice(
    ["mi_bound", "cat_gluing", "cat_gluing_eps_indep", "dim_power2", "correlation_blowup", "history_state"]))
@click.option("--state", default=None, help="mi_bound premises from a family, e.g. biased_cat:0.1:8.")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--n", "n", type=int, default=None)
@click.option("--s", "s", type=float, default=None, help="Region size parameter of mi_bound (default 2 with --state).")
@click.option("--a", "a", type=float, default=None, help="Ancilla parameter of mi_bound (default 1 with --state).")
@click.option("--ell", type=int, default=None)
@click.option("--m", "m", type=int, default=None)
@click.option("--gap", type=float, default=None)
@click.option("--d", "d", type=int, default=None)
@click.option("--codespace-dim", type=int, default=None)
@click.option("--t", "t", type=int, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--delta", type=float, default=None)
@_format_options
def certify(kind, state, alpha, beta, eps, n, s, a, ell, m, gap, d, codespace_dim, t, gamma, delta, fmt, output):
    """Evaluate a circuit-depth lower-bound certificate."""
    from . import certificates as ce

    if kind == "mi_bound":
        evidence = None
        if state is not None:
            psi = _parse_state(state)
            s = 2 if s is None else s
            a = 1.0 if a is None else a
            prem = ce.check_mi_premises(psi, int(s))
            alpha, beta, n = prem.alpha, prem.beta, psi.n
            evidence = {"state": state, **prem.as_dict()}
        _need(kind, alpha=alpha, beta=beta, s=s, eps=eps, a=a, n=n)
        cert = ce.eval_mi_bound(alpha, beta, s, eps, a, n, premise_evidence=evidence)
    elif kind in ("cat_gluing", "cat_gluing_eps_indep"):
        _need(kind, alpha=alpha, beta=beta, eps=eps, n=n)
        fn = ce.eval_cat_gluing if kind == "cat_gluing" else ce.eval_cat_gluing_eps_indep
        cert = fn(alpha, beta, eps, n)
    elif kind == "dim_power2":
        _need(kind, ell=ell, m=m, gap=gap, d=d, codespace_dim=codespace_dim)
        cert = ce.eval_dim_power2(ell, m, gap, d, codespace_dim)
    elif kind == "correlation_blowup":
        _need(kind, d=d, t=t, ell=ell, n=n, gamma=gamma, delta=delta)
        cert = ce.eval_correlation_blowup(d, t, ell, n, gamma, delta)
    else:
        _need(kind, n=n, gap=gap, m=m)
        cert = ce.eval_history_state(n, gap, m)
    _emit({**cert.as_dict(), "fired": cert.fired}, fmt, output)


@cli.command(name="compile")
@click.option("--target", required=True,
              type=click.Choice(["teleport", "fanout", "exact", "threshold", "tc0"]),
              help="teleport/fanout take --circuit; exact/threshold take --m with --k/--t; tc0 takes --spec.")
@click.option("--circuit", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--layers-per-stage", type=int, default=1, show_default=True)
@click.option("--m", "m", type=int, default=None, help="Gadget fan-in.")
@click.option("--k", "k", type=int, default=None, help="EX^k weight.")
@click.option("--t", "t", type=int, default=None, help="TH^t threshold.")
@click.option("--clean", is_flag=True, help="Restore gadget ancillas.")
@click.option("--spec", type=click.Path(exists=True, dir_okay=False), default=None, help="TC0 description file.")
@click.option("--mhq", type=click.Path(dir_okay=False), default=None, help="Write the compiled circuit here.")
@click.option("--table/--no-table", default=False, help="Include the gadget truth table in the report.")
@_format_options
def compile_cmd(target, circuit, layers_per_stage, m, k, t, clean, spec, mhq, table, fmt, output):
    """Compile a Clifford circuit or build a gadget; emits .mhq and a JSON report."""
    from . import compile as cp

    if target in ("teleport", "fanout"):
        _need(target, circuit=circuit)
        c = _load_circuit(circuit)
        if target == "teleport":
            prog, cmap = cp.teleport_parallelize(c, layers_per_stage)
            out = prog.rounds[0].block
            data = {
                "target": target,
                "n": c.n,
                "width": prog.n,
                "stages": cmap.stages,
                "quantum_depth": out.depth,
                "measured": list(prog.rounds[0].measured),
                "inputs": list(prog.inputs),
                "outputs": list(prog.outputs),
                "correction_map": cmap.as_dict(),
            }
        else:
            out = cp.clifford_to_fanout(c, layers_per_stage)
            r = account(out)
            data = {"target": target, "n": c.n, "width": out.n, "accounting": r.as_dict(),
                    "violations": check_relations(r)}
    else:
        if target == "exact":
            _need(target, m=m, k=k)
            rep = cp.build_exact_gadget(m, k, clean)
        elif target == "threshold":
            _need(target, m=m, t=t)
            rep = cp.build_threshold_gadget(m, t, clean)
        else:
            _need(target, spec=spec)
            rep = cp.build_tc0_gadget(Path(spec).read_text(), clean)
        out = rep.circuit
        data = rep.as_dict()
        data["restored"] = rep.restored
        data["within_ceiling"] = rep.within_ceiling
        if not table:
            data.pop("functional_table")
        data["target"] = target
    if mhq:
        Path(mhq).write_text(to_mhq(out))
        data["mhq"] = mhq
    _emit(data, fmt, output)


@cli.command()
@click.option("--hamiltonian", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Lines 'TERM q0,q1,... : re,im ...'.")
@click.option("--normalize", is_flag=True, help="Rescale terms to unit operator norm.")
@click.option("--distance/--no-distance", default=True, show_default=True,
              help="Brute-force code distance (up to 10 qubits).")
@click.option("--robustness-eps", type=float, default=None, help="Also report robustness parameters at this eps.")
@click.option("--trials", type=int, default=0, show_default=True, help="Empirical robustness trials.")
@click.option("--seed", callback=_seed, default=None, help="Seed for robustness trials (default 0x3115EED).")
@_format_options
def codes(hamiltonian, normalize, distance, robustness_eps, trials, seed, fmt, output):
    """Groundspace (code space) of a local Hamiltonian."""
    from .codes import DISTANCE_CAP, distance_bruteforce, groundspace, parse_hamiltonian, robustness_params

    h = parse_hamiltonian(Path(hamiltonian).read_text(), normalize=normalize)
    gs = groundspace(h)
    data = {"n": h.n, "m": len(h.terms), "dim": gs.code.dim, "gap": gs.gap, "energy": gs.energy}
    if distance:
        if h.n > DISTANCE_CAP:
            raise FeasibilityError(f"distance refused for n={h.n} > {DISTANCE_CAP}; pass --no-distance")
        data["distance"] = distance_bruteforce(gs.code)
    if robustness_eps is not None:
        data["robustness"] = robustness_params(h, robustness_eps, trials=trials, seed=seed).as_dict()
    _emit(data, fmt, output)


@cli.command()
@click.option("--name", required=True, help="Suite name or 'all'.")
@click.option("--trials", type=int, default=None, help="Trial count (suite default when omitted).")
@click.option("--seed", callback=_seed, default=None, help="Seed (default 0x3115EED).")
@click.option("--timing", is_flag=True, help="Include wall-clock times (output is then not byte-stable).")
@_format_options
def suite(name, trials, seed, timing, fmt, output):
    """Run a reproduction suite; exit 1 when it reports failures."""
    from .suites import SUITES, run_suite

    names = list(SUITES) if name == "all" else [name]
    rows = []
    for nm in names:
        d = run_suite(nm, trials, seed).as_dict()
        if not timing:
            d.pop("elapsed")
        rows.append(d)
    data = rows if name == "all" else rows[0]
    if fmt == "text":
        text = "".join(f"{'PASS' if r['passed'] else 'FAIL'} [{r['criterion']}] {r['name']}\n" for r in rows)
        if output:
            Path(output).write_text(text)
        else:
            click.echo(text, nl=False)
    else:
        _emit(data, fmt, output)
    if not all(r["passed"] for r in rows):
        sys.exit(EXIT_SUITE_FAILED)


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    try:
        cli.main(args=argv, prog_name="mhkit", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    except FeasibilityError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_FEASIBILITY
    except (ValidationError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_VALIDATION
    except MhkitError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_VALIDATION
    except SystemExit as e:
        return int(e.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
