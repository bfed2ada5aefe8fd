"""Experiment drivers behind the ``simulate``, ``fit`` and ``diagnose`` commands.

Each driver takes a resolved config dict, writes its outputs into
``config["out"]`` and returns the written paths. Outputs never contain
timestamps or timings, so a rerun with the same config and seed reproduces
them byte for byte.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import bss as bss_mod
from . import comparators as comp
from . import diagnostics as diag
from .core import (
    Dataset,
    InvalidArgumentError,
    SelectionError,
    column_scaling,
    fdr,
    standardize_columns,
    tpr,
)
from .iht import IhtConfig, gradient, iht_iterate, support_of, support_path
from .io import read_table, split_response, write_curve_csv, write_json
from .linalg import lstsq_qr, ols_fit
from .simgen import (
    STREAM_BETA,
    STREAM_DESIGN,
    STREAM_FOLDS,
    STREAM_NOISE_FEATURES,
    STREAM_SPLIT,
    SimConfig,
    augment_noise,
    corner_case,
    covariance_sqrt,
    gen_beta,
    gen_covariance,
    sample_dataset,
    stream,
)

log = logging.getLogger("sparsesel")

METHOD_KINDS = ("iht", "two_stage", "bss", "sis", "lasso", "scad")
PENALIZED = ("lasso", "scad")
DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class MethodSpec:
    kind: str
    name: str = ""
    pi: Optional[int] = None
    l: Optional[int] = None
    a: float = 3.7
    max_size: Optional[int] = None
    tol: Optional[float] = None
    max_iter: int = 500

    @classmethod
    def from_dict(cls, d) -> "MethodSpec":
        if isinstance(d, str):
            d = {"kind": d}
        d = dict(d)
        kind = d.get("kind")
        if kind not in METHOD_KINDS:
            raise InvalidArgumentError(f"unknown method kind {kind!r}; choose from {METHOD_KINDS}")
        d.setdefault("name", kind)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise InvalidArgumentError(f"unknown keys for method {d['name']!r}: {sorted(extra)}")
        return cls(**d)

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def iht_config(self, data: Dataset) -> IhtConfig:
        """IHT settings; unset ``pi`` and ``l`` default to ``min(p, n // 4)``."""
        fallback = max(1, min(data.p, data.n // 4))
        return IhtConfig(
            pi=self.pi or fallback,
            l=self.l or fallback,
            s_hat=1,
            tol=self.tol,
            max_iter=self.max_iter,
        )


def parse_methods(raw) -> List[MethodSpec]:
    if not raw:
        raise InvalidArgumentError("config lists no methods")
    methods = [MethodSpec.from_dict(m) for m in raw]
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"method names must be unique, got {names}")
    return methods


def _setup_logging(out: Path) -> logging.Handler:
    handler = logging.FileHandler(out / "run.log", mode="w")
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    return handler


def _prepare_out(cfg: dict) -> Path:
    # the destination is not part of a run's identity, so it stays out of the embedded config
    out = Path(cfg.pop("out", None) or "out")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot create output directory {out}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# simulate


@lru_cache(maxsize=8)
def _root_for(cov_key) -> np.ndarray:
    from .simgen import CovarianceSpec

    spec = CovarianceSpec(**dict(cov_key))
    return covariance_sqrt(gen_covariance(spec))


def _cov_key(sim: SimConfig):
    d = sim.cov.to_dict()
    d["spikes"] = tuple(d["spikes"])
    return tuple(sorted(d.items()))


def simulate_replicate(sim: SimConfig, r: int):
    """Draw replicate ``r``: returns ``(data, beta)`` before standardization."""
    beta = gen_beta(sim, stream(sim.seed, r, STREAM_BETA))
    data = sample_dataset(sim, beta, stream(sim.seed, r, STREAM_DESIGN), root=_root_for(_cov_key(sim)))
    return data, beta


def _standardized(data: Dataset, mode: str) -> Dataset:
    if mode == "none":
        return data
    return Dataset(standardize_columns(data.x, mode), data.y)


def method_curve(data: Dataset, truth, method: MethodSpec, cfg: dict, fold_rng) -> dict:
    """Selection path of one method on one dataset.

    Returns ``{"points": [(grid_value, fdr, tpr) or None, ...], "cv": ...}``
    with one slot per grid index.
    """
    p, n = data.p, data.n
    budget = int(cfg.get("budget", DEFAULT_BUDGET))
    max_size = min(method.max_size or p, p)
    points: List = []
    cv_point = None
    it_cfg = method.iht_config(data)

    if method.kind == "iht":
        beta, trace = iht_iterate(data, it_cfg)
        if not trace.converged:
            log.info("method %s: IHT hit max_iter=%d", method.name, method.max_iter)
        sets = support_path(beta, gradient(data, beta), it_cfg.pi, range(1, max_size + 1))
        points = [(float(k), fdr(sets[k], truth), tpr(sets[k], truth)) for k in range(1, max_size + 1)]
    elif method.kind == "sis":
        order = [int(j) for j in comp.sis_order(data)]
        for k in range(1, max_size + 1):
            sel = order[:k]
            points.append((float(k), fdr(sel, truth), tpr(sel, truth)))
    elif method.kind in PENALIZED:
        spec = comp.PenaltySpec(method.kind, method.a)
        grid = comp.lambda_grid(data, int(cfg.get("n_lambda", 100)), float(cfg.get("lambda_ratio", 1e-3)))
        path = comp.penalized_path(data, spec, grid)
        if not path.converged.all():
            log.info("method %s: %d lambda values did not converge", method.name, int((~path.converged).sum()))
        for i, (f, t) in enumerate(comp.tpr_fdr_curve(path, truth)):
            points.append((float(grid[i]), f, t))
        folds = int(cfg.get("cv_folds", 10))
        lam_star, _ = comp.cross_validate(data, spec, grid, folds, fold_rng)
        i_star = int(np.flatnonzero(grid == lam_star)[0])
        cv_point = (lam_star, points[i_star][1], points[i_star][2])
    elif method.kind == "two_stage":
        beta, _ = iht_iterate(data, it_cfg)
        cand = support_of(beta)
        for k in range(1, min(max_size, len(cand)) + 1):
            if math.comb(len(cand), k) > budget:
                points.append(None)
                continue
            sel = bss_mod.best_subset_on_support(data, k, cand, budget=budget).best.support
            points.append((float(k), fdr(sel, truth), tpr(sel, truth)))
    elif method.kind == "bss":
        for k in range(1, min(max_size, n) + 1):
            if math.comb(p, k) > budget:
                points.append(None)
                continue
            sel = bss_mod.best_subset(data, k, budget=budget).best.support
            points.append((float(k), fdr(sel, truth), tpr(sel, truth)))
    return {"points": points, "cv": cv_point}


def _simulate_task(args):
    cfg, r = args
    sim = SimConfig.from_dict(cfg["sim"])
    methods = parse_methods(cfg["methods"])
    data, beta = simulate_replicate(sim, r)
    data = _standardized(data, cfg.get("standardize", "zscore"))
    truth = sim.truth
    results, failures = {}, {}
    for m in methods:
        try:
            results[m.name] = method_curve(data, truth, m, cfg, stream(sim.seed, r, STREAM_FOLDS))
        except SelectionError as exc:
            failures[m.name] = f"{type(exc).__name__}: {exc}"
    return results, failures


def _average(per_rep: List[Optional[dict]], key="points"):
    """Pointwise means across replicates, per grid index."""
    length = max((len(d[key]) for d in per_rep if d is not None), default=0)
    rows = []
    for i in range(length):
        vals = [d[key][i] for d in per_rep if d is not None and i < len(d[key]) and d[key][i] is not None]
        if not vals:
            continue
        arr = np.array(vals, dtype=float)
        rows.append((float(arr[:, 0].mean()), float(arr[:, 1].mean()), float(arr[:, 2].mean()), len(vals)))
    return rows


def resolve_simulate_config(cfg: dict) -> dict:
    cfg = dict(cfg)
    if "sim" not in cfg:
        raise InvalidArgumentError("simulate needs a 'sim' section")
    sim_raw = dict(cfg["sim"])
    if "seed" in cfg:
        sim_raw["seed"] = int(cfg["seed"])
    sim = SimConfig.from_dict(sim_raw)
    cfg["sim"] = sim.to_dict()
    cfg["sim"].pop("n")
    cfg["seed"] = sim.seed
    cfg["methods"] = [vars(m) for m in parse_methods(cfg.get("methods"))]
    cfg.setdefault("replicates", 1)
    cfg.setdefault("cv_folds", 10)
    cfg.setdefault("standardize", "zscore")
    cfg.setdefault("budget", DEFAULT_BUDGET)
    if int(cfg["replicates"]) < 1:
        raise InvalidArgumentError("replicates must be >= 1")
    return cfg


def run_simulate(cfg: dict) -> Dict[str, Path]:
    """Replicated TPR-FDR curves, one CSV per method plus CV points."""
    cfg = resolve_simulate_config(cfg)
    out = _prepare_out(cfg)
    handler = _setup_logging(out)
    try:
        threads = int(cfg.pop("threads", 1) or 1)
        n_rep = int(cfg["replicates"])
        sim = SimConfig.from_dict(cfg["sim"])
        log.info("simulate: p=%d s=%d n=%d replicates=%d", sim.p, sim.s, sim.n, n_rep)
        tasks = [(cfg, r) for r in range(n_rep)]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(_simulate_task, tasks))
        else:
            outcomes = [_simulate_task(t) for t in tasks]

        meta = {"config": cfg, "seed": cfg["seed"]}
        written: Dict[str, Path] = {}
        summary = {"config": cfg, "seed": cfg["seed"], "methods": {}}
        for m in parse_methods(cfg["methods"]):
            per_rep = [res.get(m.name) for res, _ in outcomes]
            fails = [(r, f[m.name]) for r, (_, f) in enumerate(outcomes) if m.name in f]
            for r, msg in fails:
                log.warning("method %s replicate %d excluded: %s", m.name, r, msg)
            rows = [(m.name,) + row for row in _average(per_rep)]
            path = out / f"{m.name}.csv"
            write_curve_csv(path, rows, meta)
            written[m.name] = path
            entry = {"replicates_ok": n_rep - len(fails), "replicates_failed": len(fails)}
            if m.kind in PENALIZED:
                cv = [{"points": [d["cv"]]} if d is not None else None for d in per_rep]
                cv_rows = [(m.name,) + row for row in _average(cv)]
                cv_path = out / f"{m.name}_cv.csv"
                write_curve_csv(cv_path, cv_rows, meta)
                written[f"{m.name}_cv"] = cv_path
                if cv_rows:
                    entry["cv_point"] = {"lambda": cv_rows[0][1], "fdr": cv_rows[0][2], "tpr": cv_rows[0][3]}
            summary["methods"][m.name] = entry
            log.info("method %s: %d curve points, %d failures", m.name, len(rows), len(fails))
        write_json(out / "summary.json", summary)
        written["summary"] = out / "summary.json"
        return written
    finally:
        log.removeHandler(handler)
        handler.close()


# ---------------------------------------------------------------------------
# fit


def _r2(y, pred) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - pred) ** 2))
    if ss_tot <= 0:
        return float("nan")
    return 1.0 - ss_res / ss_tot


def _refit_predict(train: Dataset, x_test: np.ndarray, support) -> np.ndarray:
    if not support:
        return np.zeros(x_test.shape[0])
    cols = list(support)
    coef = lstsq_qr(train.x[:, cols], train.y)
    return x_test[:, cols] @ coef


def _cv_sizes(train: Dataset, sizes, select, folds: int, rng) -> int:
    """Pick the model size minimizing K-fold refit error; ties go to the smaller size.

    ``select(fold_train, sizes)`` must return ``{size: support}``.
    """
    ids = comp.fold_ids(train.n, folds, rng)
    sse = {k: 0.0 for k in sizes}
    for f in range(folds):
        te = ids == f
        tr = train.subset_rows(np.flatnonzero(~te))
        sets = select(tr, sizes)
        for k in sizes:
            if k not in sets:
                sse[k] = math.inf
                continue
            pred = _refit_predict(tr, train.x[te], sets[k])
            sse[k] += float(np.sum((train.y[te] - pred) ** 2))
    return min(sizes, key=lambda k: (sse[k], k))


def _ols_t_stats(train: Dataset, support) -> np.ndarray:
    fit = ols_fit(train, support)
    k = len(support)
    dof = train.n - k - 1
    xs = train.x[:, list(support)]
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma2 = fit.rss / dof if dof > 0 else math.nan
        cov = np.linalg.pinv(xs.T @ xs) * sigma2
        se = np.sqrt(np.clip(np.diag(cov), 0, None))
        t = fit.coefficients / se
    # a perfect fit gives 0/0 or x/0; rank those by coefficient size instead
    t = np.where(np.isfinite(t), t, np.sign(fit.coefficients) * np.inf)
    return fit.coefficients, t


def fit_method(train: Dataset, x_test: np.ndarray, method: MethodSpec, cfg: dict, rng_seed: int) -> dict:
    """Tune ``method`` by CV on ``train``; return selection and test predictions."""
    folds = int(cfg.get("cv_folds", 10))
    budget = int(cfg.get("budget", DEFAULT_BUDGET))
    fold_n = train.n - int(math.ceil(train.n / folds))
    cap = max(1, min(train.p, method.max_size or train.p, fold_n - 2))

    def folds_rng():
        return stream(rng_seed, 0, STREAM_FOLDS)

    if method.kind in PENALIZED:
        spec = comp.PenaltySpec(method.kind, method.a)
        grid = comp.lambda_grid(train, int(cfg.get("n_lambda", 100)), float(cfg.get("lambda_ratio", 1e-3)))
        lam_star, _ = comp.cross_validate(train, spec, grid, folds, folds_rng())
        path = comp.penalized_path(train, spec, grid)
        i_star = int(np.flatnonzero(grid == lam_star)[0])
        coef = path.coefs[i_star]
        return {
            "tuning": {"lambda": lam_star},
            "support": path.support(i_star),
            "pred": x_test @ coef,
        }

    if method.kind == "iht":
        def select(d, sizes):
            it_cfg = method.iht_config(d)
            beta, _ = iht_iterate(d, it_cfg)
            return support_path(beta, gradient(d, beta), it_cfg.pi, sizes)
    elif method.kind == "sis":
        def select(d, sizes):
            order = [int(j) for j in comp.sis_order(d)]
            return {k: tuple(sorted(order[:k])) for k in sizes}
    elif method.kind == "two_stage":
        cap = min(cap, method.iht_config(train).pi)

        def select(d, sizes):
            beta, _ = iht_iterate(d, method.iht_config(d))
            cand = support_of(beta)
            return {
                k: bss_mod.best_subset_on_support(d, k, cand, budget=budget).best.support
                for k in sizes
                if k <= len(cand) and math.comb(len(cand), k) <= budget
            }
    else:  # bss
        def select(d, sizes):
            return {
                k: bss_mod.best_subset(d, k, budget=budget).best.support
                for k in sizes
                if math.comb(d.p, k) <= budget
            }

    sizes = list(range(1, cap + 1))
    k_star = _cv_sizes(train, sizes, select, folds, folds_rng())
    support = select(train, [k_star])[k_star]
    return {
        "tuning": {"size": k_star},
        "support": support,
        "pred": _refit_predict(train, x_test, support),
    }


def run_fit(cfg: dict) -> Dict[str, Path]:
    """Train/test evaluation of each method on a user-supplied CSV."""
    cfg = dict(cfg)
    for key in ("input", "response"):
        if key not in cfg:
            raise InvalidArgumentError(f"fit needs {key!r}")
    cfg["methods"] = [vars(m) for m in parse_methods(cfg.get("methods"))]
    cfg.setdefault("seed", 0)
    cfg.setdefault("train_fraction", 0.8)
    cfg.setdefault("cv_folds", 10)
    cfg.setdefault("standardize", "unitnorm")
    cfg.setdefault("refit_top", 10)
    cfg.setdefault("augment_noise", 0)
    cfg.setdefault("budget", DEFAULT_BUDGET)
    cfg.pop("threads", None)
    out = _prepare_out(cfg)
    handler = _setup_logging(out)
    try:
        seed = int(cfg["seed"])
        header, values, rejected = read_table(cfg["input"])
        names, x, y = split_response(header, values, cfg["response"])
        if rejected:
            log.warning("rejected %d rows with missing values", rejected)
        data = Dataset(x, y)
        p_orig = data.p
        p_n = int(cfg["augment_noise"])
        if p_n > 0:
            data = augment_noise(data, p_n, stream(seed, 0, STREAM_NOISE_FEATURES))
            names = names + [f"noise_{i}" for i in range(p_n)]
        frac = float(cfg["train_fraction"])
        if not 0 < frac < 1:
            raise InvalidArgumentError("train_fraction must lie in (0, 1)")
        perm = stream(seed, 0, STREAM_SPLIT).permutation(data.n)
        n_train = int(round(frac * data.n))
        if n_train < 2 or n_train >= data.n:
            raise InvalidArgumentError(f"split leaves {n_train} training rows out of {data.n}")
        tr_idx, te_idx = np.sort(perm[:n_train]), np.sort(perm[n_train:])

        mode = cfg["standardize"]
        x_tr, x_te = data.x[tr_idx], data.x[te_idx]
        if mode == "none":
            center, scale = x_tr.mean(axis=0), 1.0
        else:
            center, scale = column_scaling(x_tr, mode)
        x_tr, x_te = (x_tr - center) / scale, (x_te - center) / scale
        y_mean = float(data.y[tr_idx].mean())
        train = Dataset(x_tr, data.y[tr_idx] - y_mean)
        y_test = data.y[te_idx]

        report = {
            "config": cfg,
            "seed": seed,
            "n_train": int(train.n),
            "n_test": int(len(te_idx)),
            "p": int(data.p),
            "rows_rejected": int(rejected),
            "methods": {},
        }
        for m in parse_methods(cfg["methods"]):
            try:
                res = fit_method(train, x_te, m, cfg, seed)
            except SelectionError as exc:
                log.warning("method %s failed: %s", m.name, exc)
                report["methods"][m.name] = {"error": f"{type(exc).__name__}: {exc}"}
                continue
            support = list(res["support"])
            entry = {
                "tuning": res["tuning"],
                "test_r2": _r2(y_test, res["pred"] + y_mean),
                "model_size": len(support),
            }
            if support:
                coef, t = _ols_t_stats(train, support)
                order = sorted(range(len(support)), key=lambda i: (-abs(t[i]), -abs(coef[i]), support[i]))
                ranked = [support[i] for i in order]
                entry["features"] = [
                    {"name": names[support[i]], "index": support[i], "refit_coef": coef[i], "t_stat": t[i]}
                    for i in order
                ]
                top = sorted(ranked[: int(cfg["refit_top"])])
                entry["refit_top_r2"] = _r2(y_test, _refit_predict(train, x_te, top) + y_mean)
            else:
                entry["features"] = []
                entry["refit_top_r2"] = _r2(y_test, np.full(len(y_test), y_mean))
            if p_n > 0:
                entry["noise_selected"] = sum(1 for j in support if j >= p_orig)
            report["methods"][m.name] = entry
            log.info("method %s: size %d, test R2 %.4f", m.name, len(support), entry["test_r2"])
        path = out / "fit_report.json"
        write_json(path, report)
        return {"report": path}
    finally:
        log.removeHandler(handler)
        handler.close()


# ---------------------------------------------------------------------------
# diagnose


def _diagnose_source(cfg: dict):
    """Return ``(data, beta_true, sigma, label)`` for the configured source."""
    mode = cfg.get("standardize", "none")
    if cfg.get("fixture"):
        if cfg["fixture"] != "corner":
            raise InvalidArgumentError(f"unknown fixture {cfg['fixture']!r}")
        data, beta = corner_case(float(cfg.get("eta_design", 0.5)))
        data = _standardized(data, mode)
        return data, beta, float(cfg.get("sigma", 0.0)), "fixture:corner"
    if "sim" in cfg:
        sim = SimConfig.from_dict(cfg["sim"])
        data, beta = simulate_replicate(sim, 0)
        return _standardized(data, mode), beta, sim.sigma, "sim"
    if "input" in cfg:
        header, values, _ = read_table(cfg["input"])
        _, x, y = split_response(header, values, cfg.get("response", ""))
        truth = cfg.get("truth")
        if not truth:
            raise InvalidArgumentError("diagnose on a CSV needs a 'truth' support")
        # centering both sides absorbs the intercept before the no-intercept fits
        data = _standardized(Dataset(x - x.mean(axis=0), y - y.mean()), mode)
        fit = ols_fit(data, truth)
        beta = fit.dense(data.p)
        sigma = cfg.get("sigma")
        if sigma is None:
            dof = data.n - len(fit.support)
            sigma = math.sqrt(fit.rss / dof) if dof > 0 else 0.0
        return data, beta, float(sigma), "csv"
    raise InvalidArgumentError("diagnose needs one of 'fixture', 'sim' or 'input'")


def run_diagnose(cfg: dict) -> Dict[str, Path]:
    """Separation margins, eigenvalue diagnostics and the irrepresentable value."""
    cfg = dict(cfg)
    cfg.setdefault("seed", 0)
    cfg.setdefault("budget", DEFAULT_BUDGET)
    cfg.setdefault("standardize", "none")
    cfg.setdefault("deltas", [0.0, 0.25, 0.5, 0.75, 1.0])
    cfg.setdefault("xi", 2.0)
    cfg.setdefault("eta", 0.5)
    cfg.pop("threads", None)
    if "sim" in cfg:
        sim_raw = dict(cfg["sim"])
        sim_raw["seed"] = int(cfg["seed"])
        cfg["sim"] = SimConfig.from_dict(sim_raw).to_dict()
        cfg["sim"].pop("n")
    out = _prepare_out(cfg)
    handler = _setup_logging(out)
    try:
        data, beta, sigma, label = _diagnose_source(cfg)
        budget = int(cfg["budget"])
        seed = int(cfg["seed"])
        truth = tuple(int(j) for j in np.flatnonzero(beta))
        s = len(truth)
        s_hats = [int(v) for v in cfg.get("s_hats", [s])]
        pi = int(cfg.get("pi", s))
        l = int(cfg.get("l", s))
        log.info("diagnose %s: n=%d p=%d s=%d", label, data.n, data.p, s)

        def rng(tag):
            return stream(seed, 1, tag)

        grid = []
        for i, s_hat in enumerate(s_hats):
            for j, delta in enumerate(cfg["deltas"]):
                rep = diag.tau_star(data, beta, s_hat, float(delta), budget, rng=rng(100 + 16 * i))
                grid.append({
                    "s_hat": s_hat,
                    "delta": float(delta),
                    "tau_star": rep.tau_star,
                    "achieving_set": list(rep.achieving_set),
                    "exact": rep.exact,
                    "subsets_examined": rep.subsets_examined,
                })
        lm = diag.lambda_m(data, truth, budget, rng=rng(1))
        mu = float(np.min(np.abs(beta[list(truth)])))
        thresh = diag.beta_min_threshold(lm.value, data.n, max(data.p, 3), sigma, float(cfg["xi"]), float(cfg["eta"]))
        sups = [
            {"j0": j0, **_sep(diag.tau_sup(data, beta, j0))}
            for j0 in truth
            if data.p > s
        ]
        try:
            irr = diag.irrepresentable(data, truth, np.sign(beta[list(truth)]))
        except SelectionError as exc:
            irr = None
            log.warning("irrepresentable value unavailable: %s", exc)
        kap = diag.kappa(data, pi, l, s, budget, rng=rng(2))
        report = {
            "config": cfg,
            "seed": seed,
            "source": label,
            "n": data.n,
            "p": data.p,
            "truth": list(truth),
            "sigma": sigma,
            "min_abs_beta": mu,
            "tau_star_grid": grid,
            "lambda_m": {"value": lm.value, "achieving_set": list(lm.achieving_set), "exact": lm.exact,
                         "subsets_examined": lm.subsets_examined},
            "beta_min_threshold": {"value": thresh, "xi": float(cfg["xi"]), "eta": float(cfg["eta"]),
                                   "exact": lm.exact, "note": "up to universal constants"},
            "tau_sup": sups,
            "irrepresentable": {"value": irr, "holds": None if irr is None else irr < 1},
            "kappa": {"kappa": kap.kappa, "L": kap.L, "alpha": kap.alpha, "exact": kap.exact,
                      "pi": pi, "l": l},
        }
        path = out / "diagnose_report.json"
        write_json(path, report)
        return {"report": path}
    finally:
        log.removeHandler(handler)
        handler.close()


def _sep(rep) -> dict:
    return {
        "value": rep.tau_star,
        "achieving_set": list(rep.achieving_set),
        "exact": rep.exact,
        "subsets_examined": rep.subsets_examined,
    }
