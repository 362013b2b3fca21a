"""Identity suite, theorem sweeps and implied-constant estimation.

Reports are plain dicts with a ``schema`` field so they serialize to
byte-identical JSON for identical configs.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import incidence as inc
from . import spectral as spec
from .errors import NotApplicable
from .field_core import complete_square_closed_form, complete_square_sum, gauss_sum, gauss_sum_closed_form, make_field
from .motions import MotionSet, enumerate_orthogonal_group, random_motions
from .projections import (
    Projector,
    projection_count_checks,
    projection_density_checks,
    enumerate_affine_flats,
    enumerate_grassmannian,
    flats_incidence_report,
    orthogonal_complement,
    projection_sizes,
)
from .theorems import EXACT, REGISTRY, Instance, evaluate, order_below
from .vector_geometry import PairSet, PointSet, space

SCHEMA = 1
THREADS_ENV = "FFINCIDENCE_THREADS"
DEFAULT_GRID = ((3, 1, 2), (5, 1, 2), (7, 1, 2), (3, 1, 3))

RAW_TOL = 1e-9  # per summand, raw character sums
REL_TOL = 1e-6  # composite identities


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: list) -> list:
    """Order-preserving map, threaded when the env var asks for it."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def instance_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


# -- identity suite --------------------------------------------------------------------------------


@dataclass
class IdentityConfig:
    grid: tuple[tuple[int, int, int], ...] = DEFAULT_GRID
    trials: int = 3
    seed: int = 0
    fault: str | None = None  # "sphere_sign" flips the Gauss-sum term of the sphere closed form


@dataclass
class Check:
    name: str
    p: int
    ell: int
    d: int
    ok: bool
    error: float
    instance: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"check": self.name, "p": self.p, "ell": self.ell, "d": self.d, "ok": self.ok, "error": self.error}


def _sphere_closed(sp, j, m, fault):
    val = spec.sphere_fourier_closed(sp, j, m)
    if fault == "sphere_sign":
        delta = (np.asarray(m) == 0) / sp.q
        return 2 * delta - val
    return val


def _integral(x: float, tol: float = 1e-6) -> int | None:
    r = round(x)
    return int(r) if abs(x - r) <= tol * max(1.0, abs(x)) else None


def identity_checks(p: int, ell: int, d: int, trials: int, seed: int, fault: str | None = None) -> list[Check]:
    ctx = make_field(p, ell)
    sp = space(ctx, d)
    q = ctx.q
    rng = instance_rng(seed, p, ell, d)
    out: list[Check] = []

    def add(name, ok, err, **inst):
        out.append(Check(name, p, ell, d, bool(ok), float(err), inst))

    # Gauss sums
    g1 = gauss_sum(ctx, 1)
    err = abs(g1 - gauss_sum_closed_form(ctx))
    mags = max(abs(abs(gauss_sum(ctx, a)) - math.sqrt(q)) for a in range(1, q))
    add("gauss_closed_form", err <= RAW_TOL * q and mags <= RAW_TOL * q, max(err, mags))

    # completing the square, by enumeration over F_q^d
    worst = 0.0
    for _ in range(trials):
        s = int(rng.integers(1, q))
        beta = int(rng.integers(0, sp.size))
        lhs = np.sum(ctx.chi_table[ctx.add_table[ctx.mul_table[s, sp.norms], sp.dot(np.arange(sp.size), np.full(sp.size, beta))]])
        closed = complete_square_closed_form(ctx, s, sp.coords[beta])
        worst = max(worst, abs(lhs - closed), abs(complete_square_sum(ctx, s, sp.coords[beta]) - closed))
    add("complete_square", worst <= RAW_TOL * sp.size, worst)

    # Plancherel and inversion
    worst = 0.0
    for _ in range(trials):
        A = PointSet.random(sp, rng.uniform(0.1, 0.9), rng)
        sA = spec.dft(sp, A)
        worst = max(worst, abs(sA.power().sum() - A.card / sp.size), float(np.max(np.abs(sA.inverse() - A.indicator()))))
    add("plancherel_inversion", worst <= RAW_TOL * sp.size, worst)

    # sphere spectra, every (j, m)
    m_all = np.arange(sp.size)
    worst = 0.0
    for j in range(q):
        direct = spec.dft(sp, (sp.norms == j).astype(float)).coeffs
        worst = max(worst, float(np.max(np.abs(direct - _sphere_closed(sp, j, m_all, fault)))))
    add("sphere_spectrum", worst <= 1e-8, worst)

    spectra = spec.sphere_spectra(sp)
    worst = 0.0
    for _ in range(trials):
        m, m2 = (int(v) for v in rng.integers(0, sp.size, 2))
        worst = max(worst, abs(spec.sphere_pair_sum_direct(sp, m, m2, spectra) - spec.sphere_pair_sum_closed(sp, m, m2)))
    worst = max(worst, abs(spec.sphere_pair_sum_direct(sp, 0, 0, spectra) - spec.sphere_pair_sum_closed(sp, 0, 0)))
    add("sphere_pair_sum", worst <= 1e-8, worst)

    # the variety ||x|| = ||y||
    if q ** (2 * d) <= 200_000:
        V = spec.variety_indicator(sp)
        direct = spec.dft(V.space, V).coeffs
        idx = np.arange(V.space.size)
        closed = spec.variety_fourier(sp, idx % sp.size, idx // sp.size)
        err = float(np.max(np.abs(direct - closed)))
        scale = q ** (2 * d + 1)
        exact = np.all(np.rint(direct.real * scale) == np.rint(closed * scale))
        add("variety_spectrum", err <= 1e-8 and exact, err)

    # N(P) identities
    for t in range(trials):
        A = PointSet.random(sp, rng.uniform(0.1, 0.6), rng)
        B = PointSet.random(sp, rng.uniform(0.1, 0.6), rng)
        rep = inc.verify_N_identities(PairSet.product(A, B), A, B, REL_TOL)
        ok = rep["product_ok"] and rep["general_ok"] and _integral(rep["product_rhs"]) == rep["N"]
        add("n_product_identity", ok, abs(rep["N"] - rep["product_rhs"]), A=A.indices().tolist(), B=B.indices().tolist())
        P = PairSet.random_pairs(sp, min(0.5, 40 / sp.size), rng)
        rep = inc.verify_N_identities(P, rel=REL_TOL)
        ok = rep["general_ok"] and _integral(rep["general_rhs"]) == rep["N"]
        add("n_general_identity", ok, abs(rep["N"] - rep["general_rhs"]), P=P.indices().tolist())

    # incidence expansion and histogram sums
    group = enumerate_orthogonal_group(ctx, d)
    for t in range(trials):
        P = PairSet.random_pairs(sp, min(0.5, 40 / sp.size), rng)
        R = random_motions(group, min(0.5, 200 / (len(group) * sp.size)), rng)
        res = inc.count_incidences(P, R)
        main, err = inc.incidence_fourier_expansion(P, R)
        total = main + err.real
        ok = abs(total - res.count) <= REL_TOL * max(1, res.count) and _integral(total) == res.count
        add("incidence_expansion", ok, abs(total - res.count), P=P.indices().tolist(), R_g=R.g.tolist(), R_z=R.z.tolist())
        A = PointSet.random(sp, rng.uniform(0.1, 0.9), rng)
        B = PointSet.random(sp, rng.uniform(0.1, 0.9), rng)
        k = int(rng.integers(0, len(group)))
        h = inc.intersection_histogram(A, B, group[k])
        add("histogram_sum", h.total == A.card * B.card, abs(h.total - A.card * B.card), A=A.indices().tolist(), B=B.indices().tolist(), g=k)

    # complements
    bad = 0
    for m in range(1, d):
        for W in enumerate_grassmannian(ctx, d, m):
            perp = orthogonal_complement(W)
            bad += (W.m + perp.m != d) or (orthogonal_complement(perp) != W)
    add("complement_dimension", bad == 0, bad)
    return out


def run_identity_suite(config: IdentityConfig) -> dict:
    jobs = list(config.grid)
    results = _pmap(lambda g: identity_checks(*g, config.trials, config.seed, config.fault), jobs)
    checks = [c for chunk in results for c in chunk]
    failures = [c for c in checks if not c.ok]
    rows = sorted((c.row() for c in checks), key=lambda r: (r["check"], r["p"] ** r["ell"], r["d"]))
    return {
        "schema": SCHEMA,
        "kind": "identity",
        "rows": rows,
        "summary": {"checks": len(checks), "failures": len(failures), "passed": not failures},
        "failures": [
            {"check": c.name, "p": c.p, "ell": c.ell, "d": c.d, "error": c.error, "instance": c.instance} for c in failures
        ],
    }


# -- theorem sweeps -------------------------------------------------------------------------------


@dataclass
class SweepConfig:
    theorem_id: str
    grid: tuple[tuple[int, int, int], ...]
    trials: int = 5
    seed: int = 0
    densities: tuple[float, ...] = (0.1, 0.2, 0.4, 0.7)
    include_structured: bool = True
    # fixed (A, B) point-set files used instead of random sets; each grid entry must match their field
    set_files: tuple[str, str] | None = None


def _row(theorem_id: str, ctx, d: int, trial: int, family: str, observed: float, bound, *, A=None, B=None, P=None, R=None, flags=(), case="") -> dict:
    b = None if bound is None else float(bound)
    return {
        "theorem_id": theorem_id,
        "p": ctx.p,
        "ell": ctx.ell,
        "d": d,
        "q": ctx.q,
        "instance": trial,
        "family": family,
        "case": case,
        "|A|": A,
        "|B|": B,
        "|P|": P,
        "|R|": R,
        "observed": float(observed),
        "bound": b,
        "constant": (float(observed) / b) if b else None,
        "flags": sorted(set(flags)),
    }


def line_family(sp, t: int) -> PointSet:
    """t parallel lines {(x, y, 0, ..) : y < t} (all x)."""
    return PointSet(sp, (sp.coords[:, 1] < t) & np.all(sp.coords[:, 2:] == 0, axis=1))


def _image_lines_t(q: int) -> int:
    # largest t with 2t - 1 < q/2, so A - gB stays below q^2/2 on the stabilizer
    return max(1, math.ceil((q + 2) / 4) - 1)


def _file_pairs(cfg: SweepConfig, ctx, d):
    from .vector_geometry import load_point_set

    A, B = (load_point_set(path, ctx) for path in cfg.set_files)
    if A.d != d or B.d != d:
        raise ValueError(f"set files live in dimension {A.d}, {B.d}, not {d}")
    if A.card > B.card:
        A, B = B, A
    return [("file", A, B)]


def _set_pairs(ctx, d, rng, densities, trials, structured: str | None):
    """(family, A, B) for random densities, plus a structured line family."""
    sp = space(ctx, d)
    out = []
    for t in range(trials):
        dens = densities[t % len(densities)]
        A = PointSet.random(sp, dens, rng)
        B = PointSet.random(sp, dens, rng)
        if A.card > B.card:
            A, B = B, A
        out.append((f"random_{dens}", A, B))
    if structured and d >= 2:
        q = ctx.q
        t = max(1, round(q / 3)) if structured == "third" else _image_lines_t(q)
        L = line_family(sp, t)
        out.append((f"lines_{t}", L, L))
    return out


def _high_incidence_motions(P: PairSet, group) -> MotionSet:
    """All (g, z) with at least the average number of incidences."""
    base = P.base
    gs, zs = [], []
    mean = P.card / base.size
    for k in range(len(group)):
        hist = np.bincount(inc.sg_values(P, group.actions[k]), minlength=base.size)
        z = np.flatnonzero(hist >= max(1.0, mean))
        gs.append(np.full(z.shape, k))
        zs.append(z)
    return MotionSet(group, np.concatenate(gs), np.concatenate(zs))


def _sweep_instance(cfg: SweepConfig, p: int, ell: int, d: int) -> list[dict]:
    tid = cfg.theorem_id
    info = REGISTRY[tid]
    ctx = make_field(p, ell)
    sp = space(ctx, d)
    q = ctx.q
    rng = instance_rng(cfg.seed, p, ell, d)
    rows: list[dict] = []

    def bound_for(**sizes):
        try:
            return evaluate(tid, Instance(p, ell, d, **sizes))
        except NotApplicable:
            return None

    def emit(trial, family, observed, b, **sizes):
        if b is None:
            return
        rows.append(_row(tid, ctx, d, trial, family, observed, b.value, flags=b.flags, case=b.case, **sizes))

    if info.kind == "exceptional":
        group = enumerate_orthogonal_group(ctx, d)
        structured = ("third" if tid != "exceptional_image" else "image") if cfg.include_structured else None
        pairs = _file_pairs(cfg, ctx, d) if cfg.set_files else _set_pairs(ctx, d, rng, cfg.densities, cfg.trials, structured)
        for trial, (fam, A, B) in enumerate(pairs):
            if A.card == 0 or B.card == 0:
                continue
            if tid == "exceptional_image":
                P = PairSet.product(A, B)
                rep = inc.exceptional_set(A, B, group, "image", P=P)
                emit(trial, fam, rep.size, bound_for(P=P.card), A=A.card, B=B.card, P=P.card)
            else:
                E, _ = inc.intersection_exceptions(A, B, group)
                emit(trial, fam, len(E), bound_for(A=A.card, B=B.card), A=A.card, B=B.card)
        if tid == "exceptional_image":
            for trial in range(cfg.trials):
                P = PairSet.random_pairs(sp, cfg.densities[trial % len(cfg.densities)], rng)
                if P.card == 0:
                    continue
                E = [k for k in range(len(group)) if 2 * np.unique(inc.sg_values(P, group.actions[k])).size < sp.size]
                emit(cfg.trials + 1 + trial, "random_pairs", len(E), bound_for(P=P.card), P=P.card)
    elif info.kind == "growth":
        group = enumerate_orthogonal_group(ctx, d)
        if cfg.set_files:
            pairs = _file_pairs(cfg, ctx, d)
        else:
            pairs = _set_pairs(ctx, d, rng, cfg.densities, cfg.trials, "image" if cfg.include_structured else None)
        for trial, (fam, A, B) in enumerate(pairs):
            if A.card == 0 or B.card < 2:
                continue
            if fam.startswith("lines"):
                t = int(fam.split("_")[1])
                lam = q * (2 * t - 1) + 0.5
                eps = math.log(lam) / math.log(B.card) - 1
            else:
                eps = 0.1
            rep = inc.growth_experiment(A, B, eps, group)
            b = bound_for(A=A.card, B=B.card, eps=eps)
            if b is not None:
                b = type(b)(b.theorem_id, b.case, b.value, b.tier, tuple(set(b.flags) | set(rep.flags)))
            emit(trial, fam, rep.size, b, A=A.card, B=B.card)
    elif info.kind == "incidence":
        group = enumerate_orthogonal_group(ctx, d)
        pairs = _file_pairs(cfg, ctx, d) if cfg.set_files else _set_pairs(ctx, d, rng, cfg.densities, cfg.trials, None)
        for trial, (_, A, B) in enumerate(pairs):
            dens = cfg.densities[trial % len(cfg.densities)]
            if A.card == 0:
                continue
            P = PairSet.product(A, B)
            for fam, R in (("random", random_motions(group, dens, rng)), ("high", _high_incidence_motions(P, group))):
                if len(R) == 0:
                    continue
                res = inc.count_incidences(P, R)
                if tid in ("incidence_cauchy_schwarz", "incidence_trivial", "incidence_prime_tiny"):
                    observed = res.count
                else:
                    observed = abs(float(res.error_observed))
                emit(trial, fam, observed, bound_for(A=A.card, B=B.card, P=P.card, R=len(R)), A=A.card, B=B.card, P=P.card, R=len(R))
    elif info.kind in ("spectral", "counting"):
        for trial in range(cfg.trials):
            dens = cfg.densities[trial % len(cfg.densities)]
            if tid in ("quadruple", "spectral_general"):
                P = PairSet.random_pairs(sp, dens, rng) if trial else PairSet.full(space(ctx, 2 * d))
                if P.card == 0:
                    continue
                if tid == "quadruple":
                    observed = abs(inc.count_N(P) - P.card**2 / q)
                else:
                    _, eq_star, _ = spec.pair_spectrum_norm_sums(P)
                    observed = q ** (3 * d - 1) * (q - 1) * eq_star
                emit(trial, "full" if trial == 0 else f"random_{dens}", observed, bound_for(P=P.card), P=P.card)
                continue
            A = PointSet.random(sp, dens, rng)
            B = PointSet.random(sp, dens, rng)
            if A.card > B.card:
                A, B = B, A
            if A.card == 0:
                continue
            sA, sB = spec.dft(sp, A), spec.dft(sp, B)
            if tid == "spectral_plancherel":
                observed = spec.spectral_sum_equal_norms(sA, sB)
            elif tid == "spectral_restricted":
                observed = spec.spectral_sum_equal_norms(sA, sB)
            elif tid == "spectral_plane":
                observed = spec.spectral_sum_equal_norms(sA, sB, "exclude_zero_pair")
            elif tid == "spectral_prime":
                observed = q**6 * spec.spectral_sum_equal_norms(sA, sB)
            elif tid == "sphere_restriction":
                m_star, m_full = spec.restriction_maxima(sA)
                observed = m_full if d % 2 else m_star
                emit(trial, f"random_{dens}", observed, bound_for(A=A.card), A=A.card)
                continue
            elif tid == "zero_sphere":
                emit(trial, f"random_{dens}", spec.zero_sphere_mass(sA), bound_for(A=A.card), A=A.card)
                continue
            elif tid == "isosceles_prime":
                observed = inc.count_N_product(A, A) - A.card**4 / q
                emit(trial, f"random_{dens}", observed, bound_for(A=A.card), A=A.card)
                continue
            else:
                raise NotApplicable(tid)
            emit(trial, f"random_{dens}", observed, bound_for(A=A.card, B=B.card), A=A.card, B=B.card)
    elif info.kind == "projection":
        rows.extend(_projection_rows(cfg, ctx, d, rng))
    return rows


def _projection_rows(cfg: SweepConfig, ctx, d: int, rng, m: int = 1) -> list[dict]:
    tid = cfg.theorem_id
    sp = space(ctx, d)
    q = ctx.q
    subspaces = enumerate_grassmannian(ctx, d, m)
    projectors = [Projector(W) for W in subspaces]
    rows = []
    for trial in range(cfg.trials):
        dens = cfg.densities[trial % len(cfg.densities)]
        A = PointSet.random(sp, dens, rng)
        B = PointSet.random(sp, dens / 3, rng)
        if A.card == 0 or B.card == 0:
            continue
        inst = dict(p=ctx.p, ell=ctx.ell, d=d)
        if tid == "projection_count":
            sizes = projection_sizes(A, subspaces, projectors)
            for c in projection_count_checks(A, m, sizes):
                flags = () if c.ok else ("VIOLATION",)
                rows.append(_row(tid, ctx, d, trial, f"random_{dens}_N{c.N}", c.count, c.bound, A=A.card, flags=flags))
        elif tid == "projection_density":
            sizes = projection_sizes(A, subspaces, projectors)
            for c in projection_density_checks(A, m, sizes):
                rows.append(_row(tid, ctx, d, trial, f"random_{dens}_delta{c['delta']}", c["count"], c["bound"], A=A.card))
        elif tid == "projection_size":
            sizes = projection_sizes(A, subspaces, projectors)
            b = evaluate(tid, Instance(**inst, m=m, E=A.card))
            if b.case == "large_E":
                observed = int(np.count_nonzero(sizes != q**m))
            elif b.case == "medium_E":
                observed = int(np.count_nonzero(10 * sizes <= q**m))
            else:
                observed = int(np.count_nonzero(10 * sizes <= A.card))
            rows.append(_row(tid, ctx, d, trial, f"random_{dens}", observed, b.value, A=A.card, case=b.case))
        elif tid == "projection_intersection":
            common = np.array([pr.image(A).intersect(pr.image(B)).size for pr in projectors])
            b = evaluate(tid, Instance(**inst, m=m, A=A.card, B=B.card))
            if b.case == "2":
                observed = int(np.count_nonzero(common == q**m))
            elif b.case == "3":
                observed = int(np.count_nonzero(10 * common >= B.card))
            else:
                observed = int(np.count_nonzero(2 * common > q**m))
            rows.append(_row(tid, ctx, d, trial, f"random_{dens}", observed, b.value, A=A.card, B=B.card, flags=b.flags, case=b.case))
        elif tid == "flats_incidence":
            pts = enumerate_affine_flats(ctx, d, 0)
            hs = enumerate_affine_flats(ctx, d, d - 1)
            K = [pts[i] for i in np.flatnonzero(rng.random(len(pts)) < dens)]
            H = [hs[i] for i in np.flatnonzero(rng.random(len(hs)) < dens)]
            if not K or not H:
                continue
            rep = flats_incidence_report(K, H)
            rows.append(_row(tid, ctx, d, trial, f"random_{dens}", abs(rep.deviation), rep.bound, flags=rep.flags))
    return rows


def run_theorem_sweep(cfg: SweepConfig) -> dict:
    if cfg.theorem_id not in REGISTRY:
        raise KeyError(cfg.theorem_id)
    chunks = _pmap(lambda g: _sweep_instance(cfg, *g), list(cfg.grid))
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["theorem_id"], r["q"], r["d"], r["instance"], r["family"]))
    info = REGISTRY[cfg.theorem_id]
    summary: dict = {"theorem_id": cfg.theorem_id, "tier": info.tier, "rows": len(rows)}
    if info.tier == EXACT:
        viol = [r for r in rows if r["bound"] is not None and r["observed"] > r["bound"] * (1 + 1e-9)]
        summary["violations"] = len(viol)
        summary["passed"] = not viol
    else:
        try:
            summary["estimate"] = estimate_constant(cfg.theorem_id, rows)
        except NotApplicable as exc:
            summary["estimate"] = {"not_applicable": str(exc)}
    return {"schema": SCHEMA, "kind": "sweep", "rows": rows, "summary": summary}


def estimate_constant(theorem_id: str, rows: Iterable[dict]) -> dict:
    """Max observed / bound per q over rows inside the validity range."""
    info = REGISTRY.get(theorem_id)
    if info is None:
        raise KeyError(theorem_id)
    if info.tier == EXACT:
        raise NotApplicable(f"{theorem_id} has an explicit constant; it is asserted, not estimated")
    usable = [r for r in rows if r["theorem_id"] == theorem_id and r["constant"] is not None and "VALIDITY_RANGE" not in r["flags"]]
    if not usable:
        raise NotApplicable("empty grid")
    per_q: dict[int, float] = {}
    for r in usable:
        per_q[r["q"]] = max(per_q.get(r["q"], 0.0), r["constant"])
    qs = sorted(per_q)
    flags = []
    if len(qs) >= 2 and per_q[qs[0]] > 0 and per_q[qs[-1]] > 2 * per_q[qs[0]]:
        flags.append("GROWS_WITH_Q")
    top = [per_q[x] for x in qs[-2:]]
    stable = len(top) == 2 and min(top) > 0 and max(top) < 2 * min(top)
    return {
        "theorem_id": theorem_id,
        "max_constant": max(per_q.values()),
        "median_constant": float(np.median([r["constant"] for r in usable])),
        "per_q": {str(k): per_q[k] for k in qs},
        "finite": all(math.isfinite(v) for v in per_q.values()),
        "stable_top_two": stable,
        "flags": flags,
    }


# -- serialization ----------------------------------------------------------------------------------


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


CSV_FIELDS = ("theorem_id", "p", "ell", "d", "q", "instance", "family", "case", "|A|", "|B|", "|P|", "|R|", "observed", "bound", "constant", "flags")


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.get("kind") == "identity":
        w.writerow(["check", "p", "ell", "d", "ok", "error"])
        for r in report["rows"]:
            w.writerow([r["check"], r["p"], r["ell"], r["d"], r["ok"], repr(r["error"])])
        return buf.getvalue()
    w.writerow(CSV_FIELDS)
    for r in report["rows"]:
        w.writerow([";".join(r[k]) if k == "flags" else ("" if r[k] is None else r[k]) for k in CSV_FIELDS])
    return buf.getvalue()
