"""Command-line interface: ``excpot <command> [flags]``.

Every run writes one JSON report (stdout, or ``--out``) and a short summary
on stderr.  Exit codes: 0 success, 1 usage error, 2 verification failure,
3 numeric blow-up.  Relative ``--out`` paths are resolved against
``$EXCPOT_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import metadata

from . import backend
from .darboux import PROPER_TOL, darboux_report
from .dynamics import (
    DegeneratePlaneError,
    PhaseState,
    conservation_drift,
    exponent_analysis,
    integrate_hamilton,
    integrate_variational,
    invariant_plane_test,
    particular_solution,
    sample_initial_states,
    variational_system,
)
from .exactnum import I, as_gr
from .mech import (
    TABLE1,
    alpha_of,
    bihom_to_natural,
    bihomogeneous_system,
    catalog,
    exceptional_potential,
    exceptional_system,
    functional_independence,
    is_first_integral,
    natural_system,
    natural_to_bihom,
    poisson_bracket,
    table1_row,
)
from .parser import ParseError, parse, parse_constant, render
from .poly import BIHOM, NATURAL, Poly
from .search import default_weight_cap, direct_search, scan

SCHEMA = 1

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BLOWUP = 0, 1, 2, 3

DISCREPANCIES = {
    "item6-coefficient": (
        "integral for 2*y1*y2 + x1^2*x2^5: the algebraic-integrability list prints leading "
        "coefficient 6, the bracket forces 16 (coefficient of x1*x2^6*y1^2*y2 in {H,J(a)} is 6a-96)"
    ),
    "table1-ordering": (
        "table potentials for (7,2)/(7,5) are written as (q1-i*q2)^5*(q1+i*q2)^2 and "
        "(q1-i*q2)^2*(q1+i*q2)^5; they equal V_{7,2} at alpha=i and V_{7,5} at alpha=-i, no swap needed"
    ),
    "table1-row3-scale": "table integral for k=2l is -1/2 times the bi-homogeneous x1*y1 - x2*y2 mapped back",
    "remark-swap-typo": "the (7,5) symmetry remark lists p2 twice; implemented as the x1<->x2, y1<->y2 swap",
    "nu-relation": "printed -2*nu^2 = mu/(l+1); consistency with x'' = mu*x^(2l-1) at zero energy forces mu = 4*nu^2*l",
    "plane-ode-exponent": "the planar ODE is x'' = mu*x^(2l-1); one line prints x'' = mu*x^l",
    "plane-criterion-edges": (
        "(c^2+1)(2l-k) = 0 over-reports at l=0 (only c=-i is invariant) and l=k (only c=i)"
    ),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - source checkout
        return "0.1.0"


def _alpha(text: str | None):
    if text is None:
        return None
    return parse_constant(text)


def _potential(args) -> tuple[Poly, object]:
    """(potential, system) from ``--potential`` or ``--exceptional``."""
    coords = getattr(args, "coords", "natural")
    if args.exceptional is not None:
        k, l = args.exceptional
        alpha = _alpha(args.alpha)
        if alpha is None:
            entry = catalog(k, l)
            alpha = entry.alpha if entry is not None else as_gr(1)
        sys_ = exceptional_system(k, l, alpha, coords)
        return sys_.potential, sys_
    if args.potential is None:
        raise UsageError("one of --potential or --exceptional is required")
    vars_ = NATURAL if coords == "natural" else BIHOM
    V = parse(args.potential, vars_)
    if V.depends_on_momenta():
        raise UsageError("potential must not contain momenta")
    if V.is_zero() or not V.is_homogeneous():
        raise UsageError("potential must be a nonzero homogeneous polynomial")
    sys_ = natural_system(V) if coords == "natural" else bihomogeneous_system(V)
    return V, sys_


def _add_potential_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--potential", help="homogeneous potential, e.g. 'q1^3 + q2^3'")
    g.add_argument("--exceptional", nargs=2, type=int, metavar=("K", "L"), help="exceptional potential V_{K,L}")
    p.add_argument("--alpha", help="coefficient alpha (default: catalog value, else 1)")
    p.add_argument("--coords", choices=("natural", "bihomogeneous"), default="natural")


# -- commands -------------------------------------------------------------------
def cmd_verify(args) -> tuple[dict, list[str], int]:
    k, l = args.k, args.l
    if k < 1 or not 0 <= l <= k:
        raise UsageError("need k >= 1 and 0 <= l <= k")
    alpha = _alpha(args.alpha)
    entry = catalog(k, l, alpha)
    if entry is None:
        return {"k": k, "l": l, "catalog": None, "message": "no catalog integral"}, [], EXIT_OK
    flags = []
    sys_b = entry.system("bihomogeneous")
    sys_n = entry.system("natural")
    ok_b = is_first_integral(sys_b, entry.J_bihom)
    ok_n = is_first_integral(sys_n, entry.J_natural)
    indep = functional_independence(sys_n, entry.J_natural, seed=args.seed)
    payload = {
        "k": k,
        "l": l,
        "item": entry.item,
        "alpha": str(entry.alpha),
        "beta": str(entry.beta),
        "H_bihomogeneous": render(sys_b.H),
        "J_bihomogeneous": render(entry.J_bihom),
        "J_natural": render(entry.J_natural),
        "bracket_zero_bihomogeneous": ok_b,
        "bracket_zero_natural": ok_n,
        "functionally_independent": indep,
        "notes": list(entry.notes),
    }
    if entry.item in (6, 7):
        flags += ["item6-coefficient", "remark-swap-typo"]
    row = entry.item
    if row in TABLE1 and (row < 6 or k == 7):
        table_alpha = entry.alpha
        V_t, J_t = table1_row(row, k, table_alpha)
        H_t = natural_system(V_t).H
        same_pot = V_t == exceptional_potential(k, l, entry.alpha)
        ratio = None
        lead_c = entry.J_natural.items()[0]
        r = J_t.coeff(lead_c[0]) / lead_c[1]
        if entry.J_natural.scale(r) == J_t:
            ratio = str(r)
        payload["table"] = {
            "row": row,
            "potential": render(V_t),
            "potential_matches_exceptional": same_pot,
            "integral": render(J_t),
            "bracket_zero": poisson_bracket(H_t, J_t).is_zero(),
            "proportional_to_catalog": ratio,
            "ordering": "as printed; equals V_{k,l} at the catalog alpha" if same_pot else "mismatch",
        }
        if row in (6, 7):
            flags.append("table1-ordering")
        if row == 3:
            flags.append("table1-row3-scale")
    passed = ok_b and ok_n and indep and payload.get("table", {}).get("bracket_zero", True)
    payload["passed"] = passed
    return payload, flags, EXIT_OK if passed else EXIT_VERIFY


def cmd_search(args) -> tuple[dict, list[str], int]:
    _, sys_ = _potential(args)
    if args.momentum_max < 1:
        raise UsageError("--momentum-max must be >= 1")
    cap = args.weight_cap
    if args.weight is not None:
        reports = [direct_search(sys_, args.momentum_max, args.weight)]
    else:
        reports = scan(sys_, args.momentum_max, cap)
    findings = [r.to_dict() for r in reports if r.novel_candidates]
    payload = {
        "system": sys_.label(),
        "k": sys_.k,
        "momentum_max": args.momentum_max,
        "weight": args.weight,
        "weight_cap": cap if cap is not None else f"2*k*m (k={sys_.k})",
        "weight_caps": None if args.weight is not None else [
            cap if cap is not None else default_weight_cap(sys_.k, m) for m in range(1, args.momentum_max + 1)
        ],
        "reports_total": len(reports),
        "novel_total": sum(len(r.novel_candidates) for r in reports),
        "findings": findings,
        "all_verified": all(r.verified for r in reports),
        "note": "absence of candidates means none within the searched bounds",
    }
    if args.all_reports:
        payload["reports"] = [r.to_dict() for r in reports]
    return payload, [], EXIT_OK if payload["all_verified"] else EXIT_VERIFY


def cmd_darboux(args) -> tuple[dict, list[str], int]:
    if args.coords != "natural":
        raise UsageError("darboux works in natural coordinates")
    V, _ = _potential(args)
    rep = darboux_report(V, tol=args.tol, seed=args.seed)
    payload = rep.to_dict()
    payload["tolerance"] = args.tol
    status = EXIT_OK
    if args.exceptional is not None:
        k, l = args.exceptional
        identity = (rep.darboux_poly + V.scale(I * (k - 2 * l))).is_zero()
        payload["identity_D_plus_i(k-2l)V_zero"] = identity
        if not identity or rep.proper_points:
            status = EXIT_VERIFY
    return payload, [], status


def cmd_simulate(args) -> tuple[dict, list[str], int]:
    _, sys_ = _potential(args)
    integrals: list[tuple[str, Poly]] = [("H", sys_.H)]
    if args.exceptional is not None:
        entry = catalog(*args.exceptional, alpha=sys_.alpha)
        if entry is not None and (entry.alpha == sys_.alpha):
            J = entry.J_natural if sys_.kinetic_form == "natural" else entry.J_bihom
            integrals.append((f"catalog-item-{entry.item}", J))
    for text in args.integral or []:
        integrals.append((text, parse(text, sys_.vars)))
    runs = []
    status = EXIT_OK
    if args.z0 is not None:
        starts = [PhaseState(tuple(args.z0))]
    else:
        starts = sample_initial_states(args.samples, args.seed, args.radius)
    for idx, z0 in enumerate(starts):
        tr = integrate_hamilton(sys_, z0, args.t_end, args.dt, stride=args.stride, dd=args.dd)
        drift = conservation_drift(tr, [F for _, F in integrals])
        last = tr.states[-1]
        run = {
            "index": idx,
            "z0": [[v.real, v.imag] for v in z0.z],
            "steps": tr.steps,
            "t_final": float(last.t),
            "z_final": [[v.real, v.imag] for v in last.z],
            "drift": {name: d for (name, _), d in zip(integrals, drift)},
            "diagnostic": tr.diagnostic,
        }
        if args.trajectory:
            states = tr.states
            step = max(1, len(states) // 100)
            run["trajectory"] = [[s.t] + [[v.real, v.imag] for v in s.z] for s in states[::step]]
        if tr.blown_up:
            status = EXIT_BLOWUP
        runs.append(run)
    payload = {
        "system": sys_.label(),
        "coords": sys_.kinetic_form,
        "dt": args.dt,
        "t_end": args.t_end,
        "double_double": args.dd,
        "radius": args.radius,
        "integrals": {name: render(F) for name, F in integrals},
        "backend": backend.NAME,
        "runs": runs,
    }
    return payload, [], status


def cmd_galois(args) -> tuple[dict, list[str], int]:
    l = args.l
    alpha = _alpha(args.alpha) if args.alpha is not None else as_gr(1)
    c = parse_constant(args.c)
    plane = invariant_plane_test(2 * l, l, c, alpha)
    payload: dict = {"l": l, "k": 2 * l, "alpha": str(alpha), "c": str(c), "plane_invariant": plane.invariant}
    flags = ["nu-relation", "plane-ode-exponent"]
    if l == 1:
        vs = variational_system(1, alpha, c)
        payload["mu_hat"] = [str(m) for m in vs.mu_hat]
        payload["note"] = "l = 1: constant-coefficient (harmonic) variational equation"
        fp = integrate_variational(vs, tuple(args.t_span), args.dt)
        payload["symplecticity_drift"] = fp.symplecticity_drift
        return payload, flags, EXIT_OK
    try:
        sol = particular_solution(l, alpha, c, args.branch, complex(args.c1))
    except DegeneratePlaneError as exc:
        raise UsageError(str(exc))
    vs = variational_system(l, alpha, c, sol)
    er = exponent_analysis(vs)
    payload["particular_solution"] = sol.to_dict()
    payload["mu_hat"] = [str(m) for m in vs.mu_hat]
    payload["hessian_check"] = vs.hessian_check
    payload["exponents"] = er.to_dict()
    status = EXIT_OK
    if args.integrate:
        fp = integrate_variational(vs, tuple(args.t_span), args.dt)
        payload["t_span"] = list(args.t_span)
        payload["symplecticity_drift"] = fp.symplecticity_drift
        if not fp.symplecticity_drift < args.symplectic_tol:
            status = EXIT_VERIFY
    if not (vs.hessian_check and sol.residual < 1e-9 and sol.energy_residual < 1e-9):
        status = EXIT_VERIFY
    return payload, flags, status


def _exceptional_form(V: Poly) -> dict | None:
    """``{k, l, beta, alpha}`` if ``V`` is ``beta x1^l x2^(k-l)`` in bi-homogeneous variables."""
    if len(V) != 1 or V.depends_on_momenta():
        return None
    (e, c), = V.items()
    if e[2] or e[3]:
        return None
    k, l = e[0] + e[1], e[0]
    return {"k": k, "l": l, "beta": str(c), "alpha": str(alpha_of(k, l, c))}


def cmd_transform(args) -> tuple[dict, list[str], int]:
    if args.direction == "natural-to-bihom":
        src = parse(args.expr, NATURAL)
        out = natural_to_bihom(src)
        back = bihom_to_natural(out)
        _, _, y1, y2 = Poly.gens(BIHOM)
        form = _exceptional_form(out - y1 * y2 * 2 if src.depends_on_momenta() else out)
    else:
        src = parse(args.expr, BIHOM)
        out = bihom_to_natural(src)
        back = natural_to_bihom(out)
        _, _, y1, y2 = Poly.gens(BIHOM)
        form = _exceptional_form(src - y1 * y2 * 2 if src.depends_on_momenta() else src)
    payload = {
        "direction": args.direction,
        "input": render(src),
        "output": render(out),
        "round_trip_identity": back == src,
    }
    if form is not None:
        payload["exceptional"] = form
    return payload, [], EXIT_OK if back == src else EXIT_VERIFY


COMMANDS = {
    "verify": cmd_verify,
    "search": cmd_search,
    "darboux": cmd_darboux,
    "simulate": cmd_simulate,
    "galois": cmd_galois,
    "transform": cmd_transform,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="excpot", description="Integrability toolkit for exceptional planar potentials")
    p.add_argument("--version", action="version", version=f"excpot {_version()}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-reproducibility)")

    v = sub.add_parser("verify", help="verify the catalog integral of V_{k,l}")
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--l", type=int, required=True)
    v.add_argument("--alpha")
    common(v)

    s = sub.add_parser("search", help="direct-method scan for polynomial integrals")
    _add_potential_flags(s)
    s.add_argument("--momentum-max", type=int, default=4)
    s.add_argument("--weight", type=int, help="search a single weight at the momentum bound")
    s.add_argument("--weight-cap", type=int, help="W <= m*k + cap (default cap 2*k*m)")
    s.add_argument("--all-reports", action="store_true")
    common(s)

    d = sub.add_parser("darboux", help="Darboux points of a homogeneous potential")
    _add_potential_flags(d)
    d.add_argument("--tol", type=float, default=PROPER_TOL)
    common(d)

    m = sub.add_parser("simulate", help="RK4 flow and conservation drift")
    _add_potential_flags(m)
    m.add_argument("--dt", type=float, default=1e-4)
    m.add_argument("--t-end", type=float, default=1.0)
    m.add_argument("--samples", type=int, default=1)
    m.add_argument("--radius", type=float, default=0.5)
    m.add_argument("--z0", type=complex, nargs=4, metavar=("Q1", "Q2", "P1", "P2"), help="explicit initial state")
    m.add_argument("--stride", type=int, default=10)
    m.add_argument("--dd", action="store_true", help="double-double arithmetic")
    m.add_argument("--integral", action="append", help="extra polynomial to monitor")
    m.add_argument("--trajectory", action="store_true", help="include a downsampled trajectory")
    common(m)

    g = sub.add_parser("galois", help="variational equation along the k=2l plane solutions")
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--alpha")
    g.add_argument("--c", default="1")
    g.add_argument("--branch", type=int, choices=(1, -1), default=1)
    g.add_argument("--c1", type=complex, default=1)
    g.add_argument("--integrate", action="store_true", help="integrate the fundamental matrix")
    g.add_argument("--t-span", type=float, nargs=2, default=(1.0, 2.0))
    g.add_argument("--dt", type=float, default=1e-4)
    g.add_argument("--symplectic-tol", type=float, default=1e-8)
    common(g)

    t = sub.add_parser("transform", help="symplectic change of coordinates")
    t.add_argument("--direction", choices=("natural-to-bihom", "bihom-to-natural"), default="natural-to-bihom")
    t.add_argument("expr")
    common(t)
    return p


def _resolve_out(path: str) -> str:
    base = os.environ.get("EXCPOT_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _summary(command: str, payload: dict, status: int) -> str:
    word = {EXIT_OK: "ok", EXIT_VERIFY: "verification failed", EXIT_BLOWUP: "numeric blow-up"}[status]
    return f"excpot {command}: {word}"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        t0 = time.perf_counter()
        payload, flags, status = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - t0
    except UsageError as exc:
        print(f"excpot: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"excpot: parse error: {exc.message} at offset {exc.offset}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"excpot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "schema": SCHEMA,
        "tool": "excpot",
        "tool_version": _version(),
        "command": argv,
        "seed": args.seed,
        "payload": payload,
        "discrepancy_flags": [{"id": f, "detail": DISCREPANCIES[f]} for f in sorted(set(flags))],
        "exit_code": status,
    }
    if args.timings:
        report["timings"] = {"total_s": elapsed}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        path = _resolve_out(args.out)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_summary(args.command, payload, status), file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
