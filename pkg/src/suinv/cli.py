"""Command-line interface.

Exit codes: 0 all checks pass, 1 verification failure, 2 invalid input,
3 numerical ambiguity. Generator, particle and tensor indices are 0-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import serialize
from .dfs import compatibility_check, decompose, exchange_gate, exchange_phase_table, logical_paulis
from .errors import DegeneracyError, SuinvError
from .invariants import (
    casimir_c2,
    casimir_c3,
    collective_j2,
    collective_j3,
    invariant_i2,
    invariant_i3,
    invariant_i4,
    InvariantOperator,
)
from .multiparticle import DENSE_CAP, ManyBodyOperator, collective_set, commutation_residuals, embed, max_norm
from .su_basis import build_basis, compute_structure_tensors, verify_identities

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_AMBIGUOUS = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    d: int
    n_particles: int = 1
    tol: float = 1e-10
    format: str = "json"
    seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if self.d < 2:
            raise InputError("d must be ≥ 2")
        if self.n_particles < 1:
            raise InputError("n must be ≥ 1")
        if not self.tol > 0:
            raise InputError("tol must be > 0")
        if self.format not in ("json", "csv"):
            raise InputError("format must be json or csv")
        if self.d ** self.n_particles > DENSE_CAP:
            raise InputError(f"d^n = {self.d ** self.n_particles} exceeds the dense cap {DENSE_CAP}")


def _num(x) -> str:
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# subcommands: each returns (exit_code, payload_dict, csv_text)


def cmd_basis(cfg, args):
    basis = build_basis(cfg.d)
    rows = [
        (i, r, c, _num(g[r, c].real), _num(g[r, c].imag))
        for i, g in enumerate(basis.generators)
        for r in range(cfg.d)
        for c in range(cfg.d)
    ]
    return EXIT_OK, serialize.basis_to_dict(basis), _csv(("index", "row", "col", "re", "im"), rows)


def cmd_structure(cfg, args):
    tensors = compute_structure_tensors(build_basis(cfg.d))
    which = ["f", "d"] if args.tensor == "both" else [args.tensor]
    payload = [serialize.tensor_to_dict(tensors, w, args.full) for w in which]
    rows = [(p["tensor"], i, j, k, _num(v)) for p in payload for i, j, k, v in p["entries"]]
    return EXIT_OK, payload if len(payload) > 1 else payload[0], _csv(("tensor", "i", "j", "k", "value"), rows)


def cmd_verify(cfg, args):
    basis = build_basis(cfg.d)
    reports = verify_identities(compute_structure_tensors(basis), basis, cfg.tol)
    payload = {
        "d": cfg.d,
        "tol": cfg.tol,
        "reports": [
            {"identity": r.identity_name, "max_residual": r.max_residual, "passed": r.passed} for r in reports
        ],
    }
    rows = [(r.identity_name, r.d, _num(r.max_residual), str(r.passed).lower()) for r in reports]
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    if code:
        for r in reports:
            print(f"{r.identity_name:18s} {r.max_residual:.3e} {'ok' if r.passed else 'FAIL'}", file=sys.stderr)
    return code, payload, _csv(("identity", "d", "max_residual", "passed"), rows)


def cmd_collective(cfg, args):
    basis = build_basis(cfg.d)
    tensors = compute_structure_tensors(basis)
    cset = collective_set(basis, cfg.n_particles)
    mats = cset.matrices()
    f = tensors.f.dense
    closure = 0.0
    for i, j in combinations(range(len(cset)), 2):
        comm = mats[i] @ mats[j] - mats[j] @ mats[i]
        closure = max(closure, max_norm(comm - 2j * np.tensordot(f[i, j], mats, axes=1)))
    payload = {
        "d": cfg.d,
        "n": cfg.n_particles,
        "lie_closure_residual": closure,
        "operators": [serialize.operator_to_dict(op) for op in cset.operators],
    }
    rows = [
        (j, r, c, _num(m[r, c].real), _num(m[r, c].imag))
        for j, m in enumerate(mats)
        for r, c in zip(*np.nonzero(m))
    ]
    code = EXIT_OK if closure <= cfg.tol else EXIT_FAIL
    return code, payload, _csv(("index", "row", "col", "re", "im"), rows)


def _parse_particles(text, count, n):
    try:
        parts = tuple(int(x) for x in text.split(",")) if text else ()
    except ValueError as exc:
        raise InputError(f"bad particle list {text!r}") from exc
    if count is not None and len(parts) != count:
        raise InputError(f"expected {count} particle indices, got {text!r}")
    if len(set(parts)) != len(parts) or any(not 0 <= p < n for p in parts):
        raise InputError(f"particle indices {parts} invalid for N={n}")
    return parts


def _build_kind(spec, cfg, basis, tensors, cset):
    name, _, rest = spec.partition(":")
    n = cfg.n_particles
    if name == "J2":
        return collective_j2(cset)
    if name == "J3":
        return collective_j3(cset, tensors)
    if name in ("C2", "C3"):
        (a,) = _parse_particles(rest or "0", 1, n)
        local = casimir_c2(basis) if name == "C2" else casimir_c3(basis, tensors)
        op = embed(local, a, n, f"{name}^({a})")
        return InvariantOperator(name, (a,), op, int(name[1]))
    if name == "I2":
        return invariant_i2(basis, *_parse_particles(rest or "0,1", 2, n), n)
    if name in ("I3", "I4"):
        if n < 3:
            raise InputError(f"{name} needs at least 3 particles (n={n})")
        parts = _parse_particles(rest or "0,1,2", 3, n)
        build = invariant_i3 if name == "I3" else invariant_i4
        return build(tensors, basis, *parts, n)
    raise InputError(f"unknown invariant kind {spec!r}")


def cmd_invariants(cfg, args):
    basis = build_basis(cfg.d)
    tensors = compute_structure_tensors(basis)
    cset = collective_set(basis, cfg.n_particles)
    kinds = args.kinds or ["J2"]
    out, rows = [], []
    worst = 0.0
    for spec in kinds:
        inv = _build_kind(spec, cfg, basis, tensors, cset)
        res = max(commutation_residuals(inv.operator, cset))
        worst = max(worst, res)
        entry = serialize.invariant_to_dict(inv, res)
        entry["spec"] = spec
        out.append(entry)
        for k, ev in enumerate(entry["spectrum"]):
            re, im = (ev if isinstance(ev, list) else (ev, 0.0))
            rows.append((spec, k, _num(re), _num(im), _num(res)))
    payload = {"d": cfg.d, "n": cfg.n_particles, "tol": cfg.tol, "invariants": out}
    code = EXIT_OK if worst <= cfg.tol else EXIT_FAIL
    return code, payload, _csv(("spec", "eig_index", "re", "im", "centrality_residual"), rows)


def _logical_report(basis, tensors, cset, decomp, tol):
    logical = logical_paulis(basis, tensors)
    closure = logical.closure()
    ops = {}
    for name, op in logical.as_dict().items():
        rep = compatibility_check(op, decomp, cset, tol)
        ops[name] = {"commutation_residual": rep.commutation_residual, "max_leakage": rep.max_leakage}
    payload = {
        "operators": ops,
        "closure": {
            k: {"coefficients": [serialize.complex_pair(c) for c in closure.coefficients[k]], "residual": v}
            for k, v in closure.residuals.items()
        },
    }
    ok = closure.max_residual <= 1e-8 and all(
        v["commutation_residual"] <= tol and v["max_leakage"] <= tol for v in ops.values()
    )
    return ok, payload


def _phase_rows(u, a, b):
    return [
        {
            "p": e.p,
            "q": e.q,
            "amplitude": serialize.complex_pair(e.amplitude),
            "expected": serialize.complex_pair(e.expected),
            "error": e.error,
            "off_column": e.off_column,
        }
        for e in exchange_phase_table(u, a, b)
    ]


def cmd_dfs(cfg, args):
    basis = build_basis(cfg.d)
    cset = collective_set(basis, cfg.n_particles)
    decomp = decompose(cset, tol=cfg.tol, seed=cfg.seed)
    payload = serialize.decomposition_to_dict(decomp, include_basis=not args.no_basis)
    payload["checks"] = decomp.validate(cset)
    ok = True
    if cfg.n_particles == 3:
        tensors = compute_structure_tensors(basis)
        ok, payload["logical"] = _logical_report(basis, tensors, cset, decomp, cfg.tol)
    if cfg.n_particles >= 2:
        payload["exchange"] = _phase_rows(exchange_gate(basis, 0, 1, cfg.n_particles), 0, 1)
    rows = [
        (b["id"], b["irrep_dim"], b["multiplicity"], _num(b["casimir_value"]), b.get("j_label", ""))
        for b in payload["blocks"]
    ]
    return (EXIT_OK if ok else EXIT_FAIL), payload, _csv(
        ("id", "irrep_dim", "multiplicity", "casimir_value", "j_label"), rows
    )


def cmd_exchange(cfg, args):
    if cfg.n_particles < 2:
        raise InputError("exchange needs n ≥ 2")
    a, b = _parse_particles(args.pair, 2, cfg.n_particles)
    u = exchange_gate(build_basis(cfg.d), a, b, cfg.n_particles)
    table = _phase_rows(u, a, b)
    ok = all(r["error"] <= cfg.tol and r["off_column"] <= cfg.tol for r in table if r["p"] != r["q"])
    payload = {"d": cfg.d, "n": cfg.n_particles, "pair": [a, b], "entries": table}
    rows = [
        (r["p"], r["q"], *map(_num, r["amplitude"]), *map(_num, r["expected"]), _num(r["error"]), _num(r["off_column"]))
        for r in table
    ]
    header = ("p", "q", "amp_re", "amp_im", "expected_re", "expected_im", "error", "off_column")
    return (EXIT_OK if ok else EXIT_FAIL), payload, _csv(header, rows)


def _build_operator(spec, cfg, basis, tensors, cset):
    name, _, rest = spec.partition(":")
    if name in ("X", "Y", "Z"):
        if cfg.n_particles != 3:
            raise InputError("logical operators need n = 3")
        return logical_paulis(basis, tensors).as_dict()[name]
    if name == "local":
        try:
            j, a = (int(x) for x in rest.split(":"))
        except ValueError as exc:
            raise InputError("local operator spec is local:<generator>:<particle>") from exc
        if not 0 <= j < basis.size:
            raise InputError(f"generator index {j} out of range")
        (a,) = _parse_particles(str(a), 1, cfg.n_particles)
        return embed(basis.generators[j], a, cfg.n_particles, f"l_{j}^({a})")
    return _build_kind(spec, cfg, basis, tensors, cset).operator


def cmd_compat(cfg, args):
    basis = build_basis(cfg.d)
    tensors = compute_structure_tensors(basis)
    cset = collective_set(basis, cfg.n_particles)
    op: ManyBodyOperator = _build_operator(args.op, cfg, basis, tensors, cset)
    decomp = decompose(cset, tol=cfg.tol, seed=cfg.seed)
    rep = compatibility_check(op, decomp, cset, cfg.tol)
    payload = {
        "d": cfg.d,
        "n": cfg.n_particles,
        "operator": args.op,
        "commutation_residual": rep.commutation_residual,
        "compatible": rep.compatible,
        "max_leakage": rep.max_leakage,
        "leakage": [[a, b, v] for (a, b), v in sorted(rep.leakage.items())],
        "blocks": [
            {
                "id": blk.block_id,
                "leakage_out": blk.leakage_out,
                "multiplicity_factor_residual": blk.multiplicity_factor_residual,
                "scalar_residual": blk.scalar_residual,
            }
            for blk in rep.blocks
        ],
    }
    rows = [
        (blk["id"], _num(blk["leakage_out"]), _num(blk["multiplicity_factor_residual"]), _num(blk["scalar_residual"]))
        for blk in payload["blocks"]
    ]
    code = EXIT_OK if rep.compatible else EXIT_FAIL
    return code, payload, _csv(("block", "leakage_out", "multiplicity_factor_residual", "scalar_residual"), rows)


COMMANDS = {
    "basis": (cmd_basis, "generalized Gell-Mann generators"),
    "structure": (cmd_structure, "structure constants f and d"),
    "verify": (cmd_verify, "check the algebraic identities of the structure constants"),
    "collective": (cmd_collective, "collective operators S_j and their Lie closure"),
    "invariants": (cmd_invariants, "invariant spectra and centrality residuals"),
    "dfs": (cmd_dfs, "isotypic / noiseless-subsystem decomposition"),
    "exchange": (cmd_exchange, "exchange-gate phase table"),
    "compat": (cmd_compat, "compatibility of an operator with the DFS structure"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="suinv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--d", type=int, required=True, help="local dimension (≥ 2)")
        p.add_argument("--n", type=int, default=1 if name in ("basis", "structure", "verify") else 2,
                       help="number of particles")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        if name == "structure":
            p.add_argument("--tensor", choices=("f", "d", "both"), default="both")
            p.add_argument("--full", action="store_true", help="emit every nonzero entry, not only i<=j<=k")
        if name == "invariants":
            p.add_argument("--kinds", nargs="+",
                           help="J2, J3, C2:a, C3:a, I2:a,b, I3:a,b,c, I4:a,b,c (0-based particles)")
        if name == "dfs":
            p.add_argument("--no-basis", action="store_true", help="omit basis vectors from the JSON export")
        if name == "exchange":
            p.add_argument("--pair", default="0,1")
        if name == "compat":
            p.add_argument("--op", required=True,
                           help="J2, X|Y|Z (n=3), I2:a,b, I3:..., I4:..., local:<generator>:<particle>")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.d, args.n, args.tol, args.format, args.seed, args.out)
        code, payload, csv_text = COMMANDS[args.command][0](cfg, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostics, default=str), file=sys.stderr)
        return EXIT_AMBIGUOUS
    except SuinvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = _json(payload) if cfg.format == "json" else csv_text
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
