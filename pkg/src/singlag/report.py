"""Full pipeline for one system file and report rendering (JSON and text)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import linalg
from .errors import AnalysisError, EmptyFinalManifold
from .geom import canonical_pullback, kernel_basis, pullback_canonical_two_form
from .gnh import (
    ConstraintChain,
    classify,
    compare_chains,
    extended_solutions,
    idempotence_check,
    multiplier_certificate,
    run_gnh,
    run_hinds,
    solution_certificate,
    solve_dynamics,
    tangency_certificate,
)
from .hj import OneFormCandidate, ansatz_search, extension_invariance, verify_candidate
from .lagside import (
    beta_section,
    corollary_check,
    lagrangian_presymplectic,
    run_gnh_tq,
    sode_residual,
    solve_tq_dynamics,
    verify_regular_lagrangian_hj,
)
from .legendre import legendre_analysis
from .symcore import Expr, format_expr, ps, qs, vs
from .system import SystemSpec

SCHEMA_VERSION = "1"
HJ_VARIANTS = ("gnh", "extended", "hinds")


@dataclass
class Report:
    data: dict
    exit_code: int = 0
    warnings: list = field(default_factory=list)


def _exprs(xs):
    return [format_expr(x) for x in xs]


def _zero(xs) -> bool:
    return all(x.is_zero() for x in xs)


def _legendre_section(spec: SystemSpec, leg) -> dict:
    sys = spec.system
    n = sys.n
    fl_ok = [leg.pull_to_tq(c).is_zero() for c in leg.primary_constraints]
    h_ok = leg.pull_to_tq(leg.h1) == leg.energy
    # FL* w_Q against w_L
    w_l, _ = lagrangian_presymplectic(sys)
    pulled = canonical_pullback(qs(n) + vs(n), [Expr.sym(x) for x in qs(n)], leg.momenta_exprs)
    w_ok = all((a - b).is_zero() for ra, rb in zip(pulled, w_l.matrix) for a, b in zip(ra, rb))
    w1 = pullback_canonical_two_form(leg.m1_chart, n)
    return {
        "momenta": _exprs(leg.momenta_exprs),
        "hessian_rank": leg.rank,
        "energy": format_expr(leg.energy),
        "primary_constraints": _exprs(leg.primary_constraints),
        "m1_chart": leg.m1_chart.to_json(),
        "h1": format_expr(leg.h1),
        "solved_velocities": {k.display(): format_expr(v) for k, v in leg.solved_velocities.items()},
        "omega1": [[a.display(), b.display(), format_expr(c)] for a, b, c in w1.terms()],
        "omega1_kernel": [_exprs(k) for k in kernel_basis(w1)],
        "invariants": {
            "constraints_vanish_on_image": all(fl_ok),
            "h1_pulls_back_to_energy": h_ok,
            "pullback_of_canonical_form_is_omega_L": w_ok,
        },
    }


def _dynamics_json(chain: ConstraintChain, X) -> dict:
    out = X.to_json()
    out["ambient"] = _exprs(X.ambient(qs(chain.n) + ps(chain.n)))
    out["certificates"] = {
        "tangency": _exprs(tangency_certificate(chain, X)),
        "solution": _exprs(solution_certificate(chain, X)),
    }
    return out


def _check_references(spec: SystemSpec, leg, gnh_chain, X, warnings: list) -> None:
    refs = spec.reference_exprs
    if "h1" in refs:
        printed = leg.m1_chart.restrict(refs["h1"])
        if printed != leg.h1:
            warnings.append(
                f"reference h1 = {spec.references['h1']} differs from computed h1 = {format_expr(leg.h1)}"
            )
    kernel_keys = sorted(k for k in refs if k.startswith("kernel."))
    if kernel_keys:
        w1 = pullback_canonical_two_form(leg.m1_chart, spec.dim)
        ker = kernel_basis(w1)
        for k in kernel_keys:
            vec = refs[k]
            if len(vec) != leg.m1_chart.dim:
                warnings.append(f"reference {k} has {len(vec)} components, chart has {leg.m1_chart.dim}")
                continue
            span = linalg.rank(ker, leg.m1_chart.excluded, ncols=len(vec)) if ker else 0
            grown = linalg.rank(ker + [vec], leg.m1_chart.excluded, ncols=len(vec))
            if grown != span:
                coords = ", ".join(c.display() for c in leg.m1_chart.coords)
                warnings.append(
                    f"reference {k} = ({spec.references[k]}) over ({coords}) is not in the kernel of omega1, "
                    f"computed kernel {[_exprs(v) for v in ker]}"
                )
    if "dynamics" in refs and X is not None:
        computed = X.ambient(qs(spec.dim) + ps(spec.dim))[: spec.dim]
        computed = [gnh_chain.m_f.restrict(c) for c in computed]
        printed = [gnh_chain.m_f.restrict(c) for c in refs["dynamics"]]
        if any(a != b for a, b in zip(computed, printed)):
            warnings.append(
                f"reference dynamics q-components ({spec.references['dynamics']}) differ from computed ({', '.join(_exprs(computed))})"
            )


def analyze(spec: SystemSpec) -> Report:
    data: dict = {"schema_version": SCHEMA_VERSION, "system": spec.to_json()}
    warnings: list[str] = []
    report = Report(data, 0, warnings)
    try:
        _run(spec, data, warnings)
    except AnalysisError as err:
        report.exit_code = err.exit_code
        chain = err.partial
        if chain is not None and isinstance(chain, ConstraintChain):
            data.setdefault("chains", {})[chain.algorithm] = chain.to_json()
        elif chain is not None:
            data.setdefault("lagside", {})["tq_chain"] = chain.to_json()
        data["outcome"] = {"status": _status_name(err), "exit_code": err.exit_code, "message": str(err)}
    else:
        data["outcome"] = {"status": "ok", "exit_code": 0}
    data["warnings"] = list(warnings)
    return report


def _status_name(err: AnalysisError) -> str:
    if isinstance(err, EmptyFinalManifold):
        return "inconsistent"
    return {2: "invalid", 3: "unsupported"}.get(err.exit_code, "error")


def _run(spec: SystemSpec, data: dict, warnings: list) -> None:
    sys = spec.system
    variants = set(spec.variants)
    leg = legendre_analysis(sys, spec.extension_expr)
    data["legendre"] = _legendre_section(spec, leg)

    chains: dict = {}
    data["chains"] = chains
    gnh_chain = run_gnh(sys, leg, spec.max_steps)
    chains["gnh"] = gnh_chain.to_json()
    hinds_chain = None
    if "hinds" in variants:
        hinds_chain = run_hinds(sys, leg, spec.max_steps)
        chains["hinds"] = hinds_chain.to_json()
        chains["comparison"] = compare_chains(gnh_chain, hinds_chain)
    chains["idempotence"] = _exprs(idempotence_check(gnh_chain))

    data["classification"] = classify(gnh_chain).to_json()

    dyn: dict = {}
    data["dynamics"] = dyn
    X = solve_dynamics(gnh_chain)
    dyn["gnh"] = _dynamics_json(gnh_chain, X)
    dyn["gnh"]["multipliers"] = {
        k.display(): ("free" if v is None else format_expr(v)) for k, v in gnh_chain.final.multipliers.items()
    }
    dyn["gnh"]["certificates"]["multipliers"] = _exprs(multiplier_certificate(gnh_chain))
    fields = {"gnh": X}
    if "extended" in variants:
        E = extended_solutions(gnh_chain, X)
        fields["extended"] = E
        dyn["extended"] = E.to_json()
    if hinds_chain is not None:
        XH = solve_dynamics(hinds_chain)
        fields["hinds"] = XH
        dyn["hinds"] = _dynamics_json(hinds_chain, XH)

    _check_references(spec, leg, gnh_chain, X, warnings)

    hj: dict = {"candidates": {}, "ansatz": {}}
    data["hj"] = hj
    chain_for = {"gnh": gnh_chain, "extended": gnh_chain, "hinds": hinds_chain}
    active = [v for v in HJ_VARIANTS if v == "gnh" or v in variants]
    candidates = {label: OneFormCandidate(comps, spec.constants, label) for label, comps in spec.gamma_exprs.items()}
    for label, cand in candidates.items():
        entry = {"components": cand.to_json(), "verdicts": {}}
        for var in active:
            verdict = verify_candidate(cand, chain_for[var], var, fields[var])
            entry["verdicts"][var] = verdict.to_json()
            entry["verdicts"][var]["equivalence"] = verdict.equivalence_holds
        if verify_candidate(cand, gnh_chain, "gnh", X).image_in_M1.passed:
            mult = {
                int(k.display()[1:]): v for k, v in gnh_chain.final.multipliers.items() if v is not None
            }
            entry["extension_invariance"] = format_expr(extension_invariance(cand, gnh_chain, mult))
        hj["candidates"][label] = entry
    for var in active:
        res = ansatz_search(chain_for[var], spec.ansatz_degree, var)
        hj["ansatz"][var] = res.to_json()
        for c in res.candidates:
            if res.status == "solved" and not verify_candidate(c, chain_for[var], var, fields[var]).passed:
                warnings.append(f"ansatz candidate {c.to_json()} failed verification ({var})")
    for key in sorted(k for k in spec.reference_exprs if k.startswith("gamma.")):
        cand = OneFormCandidate(spec.reference_exprs[key], spec.constants, key)
        verdict = verify_candidate(cand, gnh_chain, "gnh", X)
        if not verdict.passed:
            failed = [
                name for name in ("closed", "image_in_M1", "image_in_Mf", "hj_equation", "related")
                if not getattr(verdict, name).passed
            ]
            msg = f"reference {key} = ({spec.references[key]}) is not an admissible solution: fails {', '.join(failed)}"
            if hj["ansatz"]["gnh"]["status"] == "empty":
                msg += f"; no admissible candidate of degree <= {spec.ansatz_degree}"
            warnings.append(msg)
            hj.setdefault("references", {})[key] = verdict.to_json()

    if "lagrangian_side" in variants:
        data["lagside"] = _lagside(spec, leg, gnh_chain, X, candidates, warnings)


def _lagside(spec, leg, gnh_chain, X, candidates, warnings) -> dict:
    sys = spec.system
    n = sys.n
    w_l, dE = lagrangian_presymplectic(sys)
    out: dict = {
        "omega_L": [[a.display(), b.display(), format_expr(c)] for a, b, c in w_l.terms()],
        "dE_L": _exprs(dE),
    }
    tq = run_gnh_tq(sys, gnh_chain, spec.max_steps)
    out["tq_chain"] = tq.to_json()
    xi = solve_tq_dynamics(sys, tq)
    out["tq_dynamics"] = xi.to_json()
    out["tq_dynamics"]["sode_residual"] = _exprs(sode_residual(xi, n))
    sec = beta_section(X, gnh_chain)
    out["beta_section"] = sec.to_json()
    cors = {}
    for label, cand in candidates.items():
        v = verify_candidate(cand, gnh_chain, "gnh", X)
        if v.passed:
            cors[label] = corollary_check(X, cand, gnh_chain)
    if cors:
        out["corollary"] = cors
    if leg.rank == n and candidates:
        reg = {}
        for label, cand in candidates.items():
            Z = [v.subs(dict(zip(ps(n), cand.components))) for v in (leg.solved_velocities[x] for x in vs(n))]
            reg[label] = {"Z": _exprs(Z), **verify_regular_lagrangian_hj(Z, sys).to_json()}
        out["regular"] = reg
    return out


def emit_json(report: Report) -> str:
    return json.dumps(report.data, indent=2, ensure_ascii=False) + "\n"


def _table(rows: list[list[str]], header: list[str] | None = None) -> list[str]:
    allrows = ([header] if header else []) + rows
    if not allrows:
        return []
    widths = [max(len(r[i]) for r in allrows) for i in range(len(allrows[0]))]
    lines = []
    for i, r in enumerate(allrows):
        lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if header and i == 0:
            lines.append("  " + "  ".join("-" * w for w in widths))
    return lines


def emit_text(report: Report) -> str:
    d = report.data
    out: list[str] = []
    sysd = d["system"]
    out.append(f"system  dim={sysd['dim']}  L = {sysd['lagrangian']}")
    if sysd["excluded"]:
        out.append(f"  excluded: {', '.join(sysd['excluded'])} != 0")
    leg = d.get("legendre")
    if leg:
        out.append("")
        out.append("legendre")
        out.extend(
            _table(
                [
                    ["momenta", ", ".join(leg["momenta"])],
                    ["hessian rank", str(leg["hessian_rank"])],
                    ["energy", leg["energy"]],
                    ["h1", leg["h1"]],
                    ["M1 coords", ", ".join(leg["m1_chart"]["coords"])],
                    ["omega1 kernel", "; ".join("(" + ", ".join(k) + ")" for k in leg["omega1_kernel"]) or "0"],
                ]
            )
        )
    for name, ch in d.get("chains", {}).items():
        if name in ("comparison", "idempotence"):
            continue
        out.append("")
        status = ch["status"] + (f" at level {ch['final_level']}" if "final_level" in ch else "")
        out.append(f"chain ({name}): {status}")
        final = ch["levels"][-1]
        rows = [[c["expr"], str(c["level"]), c["kind"], c["solved_for"] or "-"] for c in final["constraints"]]
        out.extend(_table(rows, ["constraint", "level", "kind", "solved for"]))
        if "residual" in ch:
            out.append(f"  residual: {ch['residual']}")
    cls = d.get("classification")
    if cls:
        out.append("")
        out.append("classification")
        out.extend(_table([[c["constraint"], c["origin"], c["class"]] for c in cls], ["constraint", "origin", "class"]))
    dyn = d.get("dynamics", {})
    if dyn:
        out.append("")
        out.append("dynamics")
        rows = []
        for name, sol in dyn.items():
            rows.append([name, "(" + ", ".join(sol["coords"]) + ")", "(" + ", ".join(sol["general"]) + ")"])
        out.extend(_table(rows, ["variant", "chart", "field"]))
        mult = dyn.get("gnh", {}).get("multipliers")
        if mult:
            out.append("  multipliers: " + ", ".join(f"{k} = {v}" for k, v in mult.items()))
    hj = d.get("hj")
    if hj:
        out.append("")
        out.append("hamilton-jacobi")
        rows = []
        for label, entry in hj["candidates"].items():
            for var, v in entry["verdicts"].items():
                flags = [
                    "ok" if v[k]["pass"] else "FAIL"
                    for k in ("closed", "image_in_M1", "image_in_Mf", "hj_equation", "related")
                ]
                rows.append([label, "(" + ", ".join(entry["components"]) + ")", var] + flags)
        if rows:
            out.extend(_table(rows, ["label", "gamma", "variant", "closed", "M1", "Mf", "hj", "related"]))
        for var, res in hj["ansatz"].items():
            fams = "; ".join("(" + ", ".join(c) + ")" for c in res["candidates"]) or "none"
            out.append(f"  ansatz ({var}, degree {res['degree']}): {res['status']}: {fams}")
    lag = d.get("lagside")
    if lag:
        out.append("")
        out.append("lagrangian side")
        tq = lag["tq_chain"]
        cons = tq["levels"][-1]["constraints"]
        out.append(f"  TQ chain: {tq['status']}, constraints: {', '.join(c['expr'] for c in cons) or 'none'}")
        if "beta_section" in lag:
            b = lag["beta_section"]
            out.append(f"  beta velocities: ({', '.join(b['velocities'])})  certificates {'ok' if b['pass'] else 'FAIL'}")
        for label, c in lag.get("corollary", {}).items():
            out.append(f"  corollary ({label}): {'ok' if c['pass'] else 'FAIL'}")
    if d.get("warnings"):
        out.append("")
        out.append("warnings")
        out.extend("  - " + w for w in d["warnings"])
    oc = d.get("outcome", {})
    out.append("")
    out.append(f"outcome: {oc.get('status')} (exit {oc.get('exit_code')})" + (f": {oc['message']}" if "message" in oc else ""))
    return "\n".join(out) + "\n"
