"""
Laboratory stages

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Each stage runs one family of computations and returns (results, verdicts, tables). Stages take a master seed
and derive their own draws from named streams, so adding a stage never perturbs the draws of another.
"""

__all__ = [
    "stage_seed", "make_family", "instance", "nearness_stage", "renorm_stage", "banach_stage", "rota_stage",
    "dominance_stage", "foguel_stage", "alpha_stage", "crho_stage", "shift_stage", "foguel_pipeline", "zd_pipeline",
    "racz_pipeline_stage",
]

import logging
import math

import numpy as np

from libopsim.car import foguel_hankel, shifted_hankel, power_diff_norm, car_defects, hankel_row_bound
from libopsim.config import ConfigError
from libopsim.dilation import crho_positivity, rho_dilation_check, racz_pipeline, RhoSeq, POSITIVITY_TOL
from libopsim.dominance import PolyFamily, dominance_ratio, paulsen_ratio, zd_pipeline_check
from libopsim.instance import stream, gen_instance
from libopsim.lab.report import Verdict
from libopsim.linalg import op_norm
from libopsim.nearness import quadratic_nearness, row_form_check, asymptotic_nearness, MONOTONE_TOL
from libopsim.renorm import (
    RenormConfig, build_gram, equivalence_check, dominance_step_check, matrix_contraction_check, decay_index,
    banach_norm_value, NonConvergenceError, BRACKET_TOL, STEP_TOL, EXACT_GAMMA_FACTOR,
)
from libopsim.sequences import BetaWeight, quantity_A, quantity_B, abel_swap_check
from libopsim.shifts import truncated_weighted_shift, two_isometry_defect, schaeffer_dilation, sarason_check

LOG = logging.getLogger(__name__)

ROW_FORM_SAMPLES = 200
ROW_FORM_FLOOR = 0.9
ROW_FORM_POLISH = 32
ABEL_TERMS = 1024
HILBERT_ORDER = 3


def stage_seed(seed, label):
    """Integer seed of the named stream (seed, label)"""
    return int(stream(seed, label).integers(2 ** 63))


def _gaussian(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _name(prefix, name):
    return "{}.{}".format(prefix, name) if prefix else name


def nearness_stage(t1, t2, beta, nmax, samples, seed, prefix=""):
    """Quadratic nearness with its partial sums, the row form and the asymptotic envelope"""
    report = quadratic_nearness(t1, t2, beta, nmax)
    drops = np.diff(report.s_partial)
    worst_drop = float(drops.min()) if drops.size else 0.0
    row = row_form_check(t1, t2, beta, N=nmax, samples=samples, seed=stage_seed(seed, _name(prefix, "row-form")),
                         polish=ROW_FORM_POLISH)
    asym = asymptotic_nearness(t1, t2, nmax)
    square = report.s ** 2

    verdicts = [
        Verdict.at_least(_name(prefix, "partials_nondecreasing"), worst_drop, 0.0,
                         MONOTONE_TOL * max(1.0, report.s), N=nmax),
        Verdict.at_most(_name(prefix, "nearness_below_term_root"), report.s, report.u, 1e-10, N=nmax),
        Verdict.at_most(_name(prefix, "row_form_upper"), row, square, 1e-10, relative=True, N=nmax,
                        samples=samples),
    ]
    if report.s > 0:
        verdicts.append(Verdict.at_least(_name(prefix, "row_form_lower"), row, ROW_FORM_FLOOR * square, 0.0,
                                         N=nmax, samples=samples))
    results = {
        "s": report.s, "u": report.u, "s_partial": report.s_partial, "tail_bound": report.tail_bound,
        "N_used": report.N_used, "row_form": row, "asymptotic_envelope": asym.envelope,
    }
    table = [{"n": n, "s_partial": s, "term": term, "power_difference": diff}
             for n, (s, term, diff) in enumerate(zip(report.s_partial, report.terms, asym.norms))]
    return results, verdicts, {_name(prefix, "partials"): table}


def _equivalence_verdicts(cert, prefix):
    eq = equivalence_check(cert)
    return [
        Verdict.at_least(_name(prefix, "equivalence_lower"), eq.lower_margin, 0.0, BRACKET_TOL, d=cert.d,
                         bound=cert.bound_lo ** 2, eigenvalue=cert.eig_lo),
        Verdict.at_least(_name(prefix, "equivalence_upper"), eq.upper_margin, 0.0, BRACKET_TOL, d=cert.d,
                         bound=cert.bound_hi ** 2, eigenvalue=cert.eig_hi),
    ]


def _certificate_results(cert):
    return {
        "mode": cert.mode, "d": cert.d, "gamma": cert.gamma, "s_d": cert.s_d, "eig_lo": cert.eig_lo,
        "eig_hi": cert.eig_hi, "bound_lo": cert.bound_lo, "bound_hi": cert.bound_hi, "sim_const": cert.sim_const,
        "sim_bound": cert.sim_bound, "t1_norm": cert.t1_norm,
    }


def renorm_stage(cfg, trials, seed, prefix=""):
    """
    Gram certificate of the decomposition norm, its equivalence bracket, the similarity bounds, the dominance
    step on seeded matrix polynomials and the Hilbertian matrix inequality
    """
    cert = build_gram(cfg)
    verdicts = _equivalence_verdicts(cert, prefix)
    verdicts.append(Verdict.at_most(_name(prefix, "similarity_bracket"), cert.sim_const,
                                    cert.bound_hi / cert.bound_lo, 1e-6, relative=True, d=cfg.d))
    if cfg.rota or (cfg.gamma == "auto" and cert.s_d > 0):
        verdicts.append(Verdict.at_most(_name(prefix, "similarity_bound"), cert.sim_const, cert.sim_bound, 1e-6,
                                        relative=True, d=cfg.d, gamma=cert.gamma))

    rows = []
    if trials:
        fam = PolyFamily("random_coeff", degree_max=3, count=trials, seed=stage_seed(seed, _name(prefix, "step")))
        rng = stream(seed, _name(prefix, "step-vectors"))
        for level in (1, 2, 3):
            for index, poly in enumerate(fam.sample(level)[:trials]):
                x = _gaussian(rng, poly.size * cfg.n)
                check = dominance_step_check(cfg, poly, x, poly.degree)
                rows.append({"level": level, "index": index, "degree": poly.degree, "lhs": check.lhs,
                             "rhs": check.rhs, "ok": check.ok})
        margin = min(row["rhs"] * (1 + STEP_TOL) - row["lhs"] for row in rows)
        verdicts.append(Verdict.flag(_name(prefix, "dominance_step"), all(row["ok"] for row in rows), margin,
                                     STEP_TOL, trials=len(rows), d=cfg.d, shift_truncation="d+e+deg+4"))

    rng = stream(seed, _name(prefix, "hilbert"))
    scalars = _gaussian(rng, HILBERT_ORDER, HILBERT_ORDER)
    scalars = scalars / op_norm(scalars)
    hilbert = matrix_contraction_check(cert.G, scalars, _gaussian(rng, HILBERT_ORDER, cfg.n))
    verdicts.append(Verdict.flag(_name(prefix, "hilbertian"), hilbert.ok, hilbert.rhs - hilbert.lhs, 1e-12,
                                 order=HILBERT_ORDER))

    results = _certificate_results(cert)
    results["G"] = cert.G
    return results, verdicts, {_name(prefix, "dominance_step"): rows} if rows else {}


def banach_stage(cfg):
    """p != 2: decomposition norms of the basis vectors against the trivial decomposition x = x_0"""
    if not cfg.rota:
        raise ConfigError("params.p", "p != 2 is supported in Rota mode only (no inputs.c)")
    beta0 = cfg.beta(0)
    values, verdicts = [], []
    for j in range(cfg.n):
        basis = np.zeros(cfg.n, dtype=complex)
        basis[j] = 1
        try:
            value = banach_norm_value(cfg.T, basis, cfg.p, cfg.beta, cfg.d)
        except NonConvergenceError as err:
            values.append(err.best)
            verdicts.append(Verdict.inconclusive("banach_trivial[{}]".format(j), str(err), best=err.best))
            continue
        values.append(value)
        verdicts.append(Verdict.at_most("banach_trivial[{}]".format(j), value, beta0, 1e-8, relative=True,
                                        p=cfg.p, d=cfg.d))
    return {"p": cfg.p, "d": cfg.d, "basis_norms": values}, verdicts, {}


def make_family(params, seed, label="family"):
    return PolyFamily(params["family"], degree_max=params["degree"], d=params["vanish"], count=params["count"],
                      seed=stage_seed(seed, label))


def instance(inputs, params, seed):
    """The input operator t, or a seeded instance from the instance parameters"""
    if inputs.get("t") is not None:
        return inputs["t"]
    return gen_instance(params["instance"], params["n"], params["cap"], stage_seed(seed, "instance"))


def rota_stage(t, beta, d, fam, level, prefix=""):
    """Rota renorming: |T1| <= 1, the equivalence bracket and von Neumann's inequality for T1"""
    cert = build_gram(RenormConfig(t, beta=beta, d=d))
    power_norm = op_norm(np.linalg.matrix_power(t, d + 1))
    verdicts = [Verdict.at_most(_name(prefix, "renormed_contraction"), cert.t1_norm, 1.0, 1e-8, d=d,
                                power_norm=power_norm)]
    verdicts += _equivalence_verdicts(cert, prefix)
    verdicts.append(Verdict.at_most(_name(prefix, "similarity_bound"), cert.sim_const, cert.sim_bound, 1e-6,
                                    relative=True, d=d))
    paulsen = None
    if cert.t1_norm <= 1 + 1e-8:
        paulsen = paulsen_ratio(cert.T1, fam, level).max_ratio
        verdicts.append(Verdict.at_most(_name(prefix, "paulsen_renormed"), paulsen, 1.0, 1e-6, level=level,
                                        family=fam.kind, count=fam.count))
    else:
        verdicts.append(Verdict.inconclusive(_name(prefix, "paulsen_renormed"), "T1 is not a contraction"))

    results = _certificate_results(cert)
    results.update({"T": t, "T1": cert.T1, "power_norm": power_norm, "decay_index": decay_index(t),
                    "paulsen_ratio": paulsen})
    return results, verdicts, {}


def dominance_stage(t1, t2, fam, level):
    """Sampled dominance (or Paulsen, without t2) ratios per level; all values are lower bounds"""
    maxima, rows, skipped = {}, [], {}
    for lvl in range(1, level + 1):
        if t2 is None:
            res = paulsen_ratio(t1, fam, lvl)
        else:
            res = dominance_ratio(t1, t2, fam, lvl)
            skipped[lvl] = res.skipped
        maxima[lvl] = res.max_ratio
        rows.extend({"level": lvl, "index": i, "ratio": r} for i, r in enumerate(res.ratios))

    verdicts = [Verdict.at_least("level_embedding[level={}]".format(lvl), maxima[lvl], maxima[1], 1e-12,
                                 relative=True, family=fam.kind, count=fam.count)
                for lvl in range(2, level + 1)]
    results = {"ratio": "paulsen" if t2 is None else "dominance", "max_ratio": maxima, "lower_bound": True,
               "skipped": skipped}
    return results, verdicts, {"ratios": rows}


def foguel_stage(fh, nmax, weight, identity_check, prefix=""):
    """
    Power differences of the Foguel-Hankel operator against the verified majorants: the block identity
    against explicit subtraction, |R(Y)^n - R(0)^n| <= n |Y_{n-1}| and the row-sum bound on |Y_n|
    """
    alpha, N, m = fh.alpha, fh.N, fh.m
    k_max = max(alpha.support_hint, 2 * N + nmax)
    tails = alpha.tails(k_max)
    anti, mixed = car_defects(fh.system)
    verdicts = [Verdict.at_most(_name(prefix, "car_relations"), max(anti, mixed), 0.0, 1e-12, m=m)]

    hankels = {}
    for j in range(nmax + 1):
        if 2 * N - 1 + j > m:
            break
        hankels[j] = op_norm(shifted_hankel(alpha, j, N, m, fh.system))
        verdicts.append(Verdict.at_most(_name(prefix, "hankel_row_bound[n={}]".format(j)), hankels[j],
                                        hankel_row_bound(alpha, j, N), 1e-10, N=N, m=m))

    rows = []
    for n in range(1, nmax + 1):
        diff = power_diff_norm(fh, n, "identity")
        row = {"n": n, "power_diff": diff, "hankel_norm": hankels.get(n - 1),
               "dp_estimate": (n + 1) * math.sqrt(tails[n])}
        if identity_check:
            row["subtraction"] = power_diff_norm(fh, n, "subtraction")
            verdicts.append(Verdict.at_most(_name(prefix, "power_diff_identity[n={}]".format(n)),
                                            abs(diff - row["subtraction"]), 0.0, 1e-10, N=N, m=m))
        if n - 1 in hankels:
            verdicts.append(Verdict.at_most(_name(prefix, "power_diff_majorant[n={}]".format(n)), diff,
                                            n * hankels[n - 1], 1e-10, N=N, m=m))
        rows.append(row)

    results = {
        "alpha_spec": alpha.to_spec(), "A": quantity_A(alpha, k_max).value, "B2": quantity_B(alpha, 2, k_max).bound,
        "B3": quantity_B(alpha, 3, k_max).bound, "N": N, "m": m, "nmax": nmax, "dim": fh.dim,
        "car_defects": {"anticommutator": anti, "mixed": mixed},
        # (n, |R(Y)^n - R(0)^n|, (n + 1) sqrt(tail_n)); the last entry is an estimate, not a verified bound
        "power_diffs": [[row["n"], row["power_diff"], row["dp_estimate"]] for row in rows],
    }
    if weight == "dirichlet":
        results["dirichlet_series"] = math.fsum(row["power_diff"] ** 2 / (row["n"] + 1) for row in rows)
        results["dirichlet_reference"] = math.fsum((n + 1) * tails[n] for n in range(k_max + 1))
    return results, verdicts, {_name(prefix, "power_diff"): rows}


def alpha_stage(alpha, kmax, nmax, eps):
    """A, B_2, B_3, B_{2+eps}, the Abel rearrangement and, for example32, the logarithmic envelope"""
    quant_a = quantity_A(alpha, kmax)
    results = {"A": quant_a.value, "A_diverged": quant_a.diverged, "A_argmax": quant_a.argmax}
    for label, power in (("B2", 2), ("B3", 3), ("B_2+eps", 2 + eps)):
        quant_b = quantity_B(alpha, power, nmax)
        results[label] = {"partial": quant_b.partial, "converged": quant_b.converged, "bound": quant_b.bound}

    terms = None if alpha.kind == "explicit" else min(nmax + 1, ABEL_TERMS)
    abel = abel_swap_check(alpha, terms)
    results["abel"] = abel
    verdicts = [Verdict.at_most("abel_identity", abel.defect, 0.0, 1e-12 * max(1.0, abel.lhs), terms=terms)]

    if alpha.kind == "example32" and kmax >= 2:
        ks = np.arange(2, kmax + 1)
        weighted = (ks + 1.0) ** 2 * alpha.tails(kmax)[2:]
        excess = weighted - 1 / (2 * np.log(ks))
        results["example32_at_kmax"] = float(weighted[-1])
        verdicts.append(Verdict.at_most("example32_envelope", float(excess.max()), 0.0, 0.0, kmax=kmax))
    return results, verdicts, {}


def crho_stage(t, rho, rmax, grid, radii, ntrunc, prefix=""):
    res = crho_positivity(t, rho, rmax, grid, ntrunc, radii)
    margin = None if res.tail_bound is None else res.min_eig + res.tail_bound
    verdict = Verdict(_name(prefix, "crho_positivity"), res.verdict, margin, POSITIVITY_TOL,
                      {"r_max": rmax, "grid": grid, "radii": radii, "N_trunc": ntrunc})
    return dict(res._asdict(), rho=rho), [verdict], {}


def shift_stage(t, beta, N, multiplicity, order):
    """Truncated weighted shift with its sidecar; the Dirichlet 2-isometry and a Schaffer dilation of t"""
    shift = truncated_weighted_shift(beta, N, multiplicity)
    results = {"matrix": shift.matrix, "sidecar": shift.sidecar()}
    verdicts = []
    if beta is not None and beta.kind == "sqrt":
        expected = np.sqrt((np.arange(N - 1) + 2.0) / (np.arange(N - 1) + 1.0))
        verdicts.append(Verdict.at_most("dirichlet_weights", float(np.max(np.abs(shift.weights - expected))),
                                        0.0, 1e-15, N=N))
        if N >= 4:
            defect = two_isometry_defect(shift)
            results["two_isometry_defect"] = defect
            verdicts.append(Verdict.at_most("two_isometry", defect, 0.0, 1e-12, N=N))
    if t is not None:
        unitary, embed = schaeffer_dilation(t, order)
        defect = rho_dilation_check(t, unitary, embed, RhoSeq(), 2 * order)
        results.update({"dilation": unitary, "dilation_defect": defect})
        verdicts.append(Verdict.at_most("schaeffer_dilation", defect, 0.0, 1e-10, n_max=2 * order))
    return results, verdicts, {}


def _merge(stages):
    results, verdicts, tables = {}, [], {}
    for label, (res, ver, tab) in stages:
        results[label] = res
        verdicts.extend(ver)
        tables.update(tab)
    return results, verdicts, tables


def foguel_pipeline(params, seed, dirichlet=False):
    """B_3 (or B_2 with the Dirichlet weight) -> nearness of R(Y) and R(0) -> renorming against R(0)"""
    alpha, N = params["alpha"], params["N"]
    m = params["m"] or 2 * N - 1
    if m < 2 * N - 1:
        raise ConfigError("params.m", "need m >= 2N-1 = {}".format(2 * N - 1))
    beta = BetaWeight.dirichlet() if dirichlet else params["beta"]
    power = 2 if dirichlet else 3
    fh = foguel_hankel(alpha, N, m)
    k_max = max(alpha.support_hint, 2 * N)
    quant = quantity_B(alpha, power, k_max)
    finite = Verdict.flag("B{}_finite".format(power), quant.converged, tolerance=0.0, bound=quant.bound)

    r, r0 = fh.R.toarray(), fh.R0.toarray()
    stages = [
        ("foguel", foguel_stage(fh, N, "dirichlet" if dirichlet else "const", True, "foguel")),
        ("nearness", nearness_stage(r, r0, beta, 2 * N + 1, ROW_FORM_SAMPLES, seed, "nearness")),
        ("renorm", renorm_stage(RenormConfig(r, C=r0, beta=beta, d=params["d"]), params["trials"], seed,
                                "renorm")),
    ]
    results, verdicts, tables = _merge(stages)
    results["B{}".format(power)] = quant.bound
    return results, [finite] + verdicts, tables


def _upper_contraction(n, cap, seed):
    r = np.triu(gen_instance("contraction", n, 1.0, seed))
    size = op_norm(r)
    return r * (min(cap, 1.0) / size) if size else r


def zd_pipeline(params, seed):
    """
    Compress an upper-triangular contraction R to span(e_b .. e_{a-1}) between two invariant subspaces; the
    compression T factors as T^k = P_H R^k|_H, so it is renormed against R and dominated by it
    """
    n = params["n"]
    if n < 2:
        raise ConfigError("params.n", "the zd pipeline needs n >= 2")
    r = _upper_contraction(n, params["cap"], stage_seed(seed, "instance"))
    low, high = n // 4, n - n // 4
    eye = np.eye(n, dtype=complex)
    horizon = params["d"] + params["degree"] + 1
    defect = sarason_check(r, eye[:, :high], eye[:, :low], horizon)
    w = eye[:, low:high]
    t = w.conj().T @ r @ w
    report = zd_pipeline_check(t, w.conj().T, r, w, params["vanish"], horizon, params["beta"])

    beta = params["beta"]
    gamma = "auto"
    if report.s <= 1e-12:
        gamma = EXACT_GAMMA_FACTOR * (beta(0) if beta else 1.0)
    fam = make_family(params, seed)
    level = params["level"]
    paulsen = paulsen_ratio(t, fam, level)
    dominance = dominance_ratio(t, r, fam, level)
    verdicts = [
        Verdict.at_most("sarason", defect, 0.0, 1e-10, n_max=horizon),
        Verdict.at_most("paulsen_compression", paulsen.max_ratio, 1.0, 1e-8, level=level, family=fam.kind),
        Verdict.at_most("dominated_by_dilation", dominance.max_ratio, 1.0, 1e-8, level=level, family=fam.kind),
    ]
    renorm = renorm_stage(RenormConfig(t, C=r, V2=w, V1=w.conj().T, beta=beta, gamma=gamma, d=params["d"]),
                          params["trials"], seed, "renorm")
    results, more, tables = _merge([("renorm", renorm)])
    results.update({"R": r, "T": t, "window": [low, high], "factored_nearness": report.s,
                    "paulsen_ratio": paulsen.max_ratio, "dominance_ratio": dominance.max_ratio,
                    "dominance_skipped": dominance.skipped})
    return results, verdicts + more, tables


def racz_pipeline_stage(params, seed):
    """Square-zero contraction T0 = c u w* (w orthogonal to u) through the rho-dilation pipeline"""
    n = params["n"]
    if n < 2:
        raise ConfigError("params.n", "the racz pipeline needs n >= 2")
    rng = stream(seed, "racz-vectors")
    u = _gaussian(rng, n)
    u = u / np.linalg.norm(u)
    w = _gaussian(rng, n)
    w = w - np.vdot(u, w) * u
    w = w / np.linalg.norm(w)
    t0 = min(params["cap"], 1.0) * np.outer(u, w.conj())
    rho = params["rho"]
    res = racz_pipeline(t0, rho, params["k"], params["M"], params["N"])
    square = res.nearness.s ** 2
    verdicts = [
        Verdict.at_most("rho_dilation", res.dilation_defect, 0.0, 1e-10, n_max=2 * params["N"]),
        Verdict.flag("racz_bound", res.ok, res.bound - square, 1e-10, k=params["k"], M=params["M"]),
    ]
    crho = crho_stage(rho(1) * t0, rho, 0.999, 256, 16, 64, "crho")
    verdicts.extend(crho[1])
    results = {
        "T0": t0, "s": res.nearness.s, "s_squared": square, "bound": res.bound,
        "deficiency": {"partial": res.deficiency.partial, "converged": res.deficiency.converged,
                       "limit_estimate": res.deficiency.limit_estimate},
        "crho": crho[0],
    }
    return results, verdicts, {}
