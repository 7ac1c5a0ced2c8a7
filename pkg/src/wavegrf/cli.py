"""Reproducible experiment runner.

Subcommands: tables, decay, corrlen, sqrt-bench, sample, mlmc, krige,
pattern, filters-dump.  Options come from a JSON config file plus ``--seed``,
``--out`` and ``--threads`` overrides (environment variable
``WAVEGRF_THREADS`` also sets the thread count).  Every output file records
the config hash and package version; reruns are byte-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical failure; errors
emit a machine-readable JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, io, kriging, mlmc, sampling
from .compression import aposteriori_threshold, sparsity_report
from .filters import SUPPORTED_PAIRS, build_filter_bank
from .kernels import KERNEL_NAMES
from .linalg import condition_number, precondition
from .pipeline import CovarianceModel, default_wavelet_for
from .sampling import build_contour, synthesize_field


class ConfigError(ValueError):
    pass


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    cfg["out"] = args.out or cfg.get("out", "out")
    threads = args.threads or int(os.environ.get("WAVEGRF_THREADS", "0"))
    if threads:
        try:
            import threadpoolctl
            threadpoolctl.threadpool_limits(threads)
        except ImportError:
            cfg["threads_note"] = "threadpoolctl unavailable; thread cap ignored"
        cfg["threads"] = threads
    return cfg


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _model(cfg, kernel=None, wavelet=None, p=None) -> CovarianceModel:
    kernel = kernel or cfg.get("kernel", "matern12")
    if kernel not in KERNEL_NAMES:
        raise ConfigError(f"unknown kernel {kernel!r}")
    wavelet = tuple(wavelet or cfg.get("wavelet") or default_wavelet_for(kernel))
    if wavelet not in SUPPORTED_PAIRS:
        raise ConfigError(f"unsupported wavelet pair {wavelet}")
    p = int(p or cfg.get("p", 256))
    if p & (p - 1) or p < 8:
        raise ConfigError(f"p must be a power of two >= 8, got {p}")
    comp = cfg.get("compression", {})
    try:
        return CovarianceModel(kernel=kernel, wavelet=wavelet, p=p,
                               curve=cfg.get("curve", "paper-boundary"),
                               ell=float(cfg.get("ell", 1.0)),
                               a=float(comp.get("a", 2.0)),
                               a_prime=float(comp.get("a_prime", 2.0)),
                               dprime=comp.get("dprime"))
    except ValueError as e:
        raise ConfigError(str(e)) from e


# -- subcommands -----------------------------------------------------------

def cmd_tables(cfg) -> None:
    """Condition numbers and compression rates over dimension."""
    kernel = cfg.get("kernel", "matern12")
    if kernel not in KERNEL_NAMES:
        raise ConfigError(f"unknown kernel {kernel!r}")
    families = [tuple(f) for f in cfg.get("families", _default_families(kernel))]
    p_list = cfg.get("p_list", [32, 64, 128, 256, 512, 1024])
    rows = {"p": [], "level": [], "single_scale_cond": []}
    for d, dt in families:
        rows[f"nnz_pct_{d}{dt}"] = []
        rows[f"cond_{d}{dt}"] = []
    meta = io.standard_meta(cfg)
    for p in p_list:
        first = _model(cfg, wavelet=families[0], p=p)
        rows["p"].append(p)
        rows["level"].append(int(np.log2(p)))
        rows["single_scale_cond"].append(condition_number(first.single_scale))
        for fam in families:
            m = _model(cfg, wavelet=fam, p=p)
            m.verify_spd()
            rows[f"nnz_pct_{fam[0]}{fam[1]}"].append(100.0 * m.pattern.nnz_fraction)
            rows[f"cond_{fam[0]}{fam[1]}"].append(condition_number(m.preconditioned))
        meta.setdefault("model", m.meta)
    io.write_csv(_outdir(cfg) / f"tables_{kernel}.csv", rows, meta)


def _default_families(kernel: str):
    return {"matern12": [(2, 4), (2, 6), (2, 8)],
            "matern32": [(2, 6), (2, 8), (2, 10)],
            "matern52": [(2, 10)]}[kernel]


def cmd_decay(cfg) -> None:
    """Diagonal entries and per-level means of the wavelet-coordinate matrix."""
    out = _outdir(cfg)
    kernels_ = cfg.get("kernels", ["matern12", "matern32", "matern52"])
    p = int(cfg.get("p", 512))
    for kname in kernels_:
        m = _model(cfg, kernel=kname, wavelet=cfg.get("wavelet") or
                   default_wavelet_for(kname), p=p)
        diag = np.diag(m.wavelet_dense)
        lev = m.idx.level_of_position()
        means = [float(np.mean(diag[m.idx.level_slice(j)])) for j in m.idx.levels]
        wl = list(m.idx.levels)[1:]
        slope = (float(np.polyfit(wl, np.log2(np.array(means[1:])), 1)[0])
                 if len(wl) >= 2 else float("nan"))
        meta = io.standard_meta(cfg) | {"model": m.meta, "estimated_order": slope}
        io.write_csv(out / f"decay_{kname}_diag.csv",
                     {"position": np.arange(m.idx.p), "level": lev, "diag": diag}, meta)
        io.write_csv(out / f"decay_{kname}_levels.csv",
                     {"level": list(m.idx.levels), "mean_diag": means,
                      "jump": [float("nan")] + [means[i] / means[i + 1]
                                                for i in range(len(means) - 1)]}, meta)


def cmd_corrlen(cfg) -> None:
    """A-priori vs a-posteriori compression across correlation lengths."""
    kernel = cfg.get("kernel", "matern12")
    ells = cfg.get("ells", [0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8, 1.0])
    delta = float(cfg.get("delta", 1e-6))
    p = int(cfg.get("p", 256))
    rows = {"ell": [], "apriori_nnz_pct": [], "aposteriori_nnz_pct": []}
    meta = io.standard_meta(cfg)
    for ell in ells:
        c2 = dict(cfg)
        c2["ell"] = ell
        m = _model(c2, kernel=kernel, p=p)
        thr = aposteriori_threshold(m.tapered, m.idx, m.order.ra, delta)
        rows["ell"].append(ell)
        rows["apriori_nnz_pct"].append(100.0 * m.pattern.nnz_fraction)
        rows["aposteriori_nnz_pct"].append(100.0 * thr.nnz / m.idx.p**2)
        meta.setdefault("model", m.meta)
    meta["delta"] = delta
    io.write_csv(_outdir(cfg) / f"corrlen_{kernel}.csv", rows, meta)


def cmd_sqrt_bench(cfg) -> None:
    """Square-root error versus node count, with mis-estimated conditioning."""
    p = int(cfg.get("p", 1024))
    m = _model(cfg, p=p)
    Ks = cfg.get("K_list", [1, 5, 10, 15, 20, 25, 30, 40, 50, 60])
    ev = np.linalg.eigvalsh(m.preconditioned.to_dense())
    sq = np.sqrt(ev)
    scale = float(np.max(sq))
    variants = {"exact": (ev[0], ev[-1]),
                "over": (ev[0] / 2.0, ev[-1]),       # condition overestimated 2x
                "under": (ev[0] * 2.0, ev[-1])}      # condition underestimated 2x
    rows = {"K": list(Ks)}
    from .linalg import SpectralBounds
    for name, (lo, hi) in variants.items():
        errs = []
        for K in Ks:
            q = build_contour(SpectralBounds(lo, hi, "dense", 0.0), K)
            errs.append(float(np.max(np.abs(q.scalar_values(ev) - sq)) / scale))
        rows[f"rel_err_{name}"] = errs
    io.write_csv(_outdir(cfg) / "sqrt_bench.csv", rows,
                 io.standard_meta(cfg) | {"model": m.meta,
                                          "cond": float(ev[-1] / ev[0])})


def cmd_sample(cfg) -> None:
    """Draw field samples; write coefficients, synthesized field, metadata."""
    m = _model(cfg)
    count = int(cfg.get("count", 4))
    K = int(cfg.get("K", 40))
    seed = int(cfg["seed"])
    bounds = m.spectral_bounds(exact=cfg.get("exact_bounds", True))
    contour = build_contour(bounds, K)
    sampler = sampling.GrfSampler(m.tapered, m.idx, m.order.ra, contour,
                                  taper_eps_params={"a": m.params.a,
                                                    "a_prime": m.params.a_prime})
    Z = sampler.draw_matrix(seed, count)
    out = _outdir(cfg)
    meta = io.standard_meta(cfg) | {"model": m.meta, "K": K, "seed": seed}
    io.write_csv(out / "sample_coeffs.csv",
                 {f"sample{i}": Z[i] for i in range(count)}, meta)
    res = int(cfg.get("resolution", m.idx.J + 3))
    fields = {f"sample{i}": synthesize_field(m.system, Z[i], res)
              for i in range(count)}
    grid = np.arange(2**res) / 2**res
    io.write_csv(out / "sample_fields.csv", {"t": grid} | fields, meta)
    io.write_meta(out / "sample_meta.json", cfg, {"model": m.meta})


def cmd_mlmc(cfg) -> None:
    """Covariance estimation error table over resolution (mean of R runs)."""
    runs = int(cfg.get("runs", 10))
    p_list = cfg.get("p_list", [8, 16, 32, 64, 128, 256, 512])
    M_finest = int(cfg.get("M_finest", 100))
    seed = int(cfg["seed"])
    rows = {"p": [], "level": [], "M_coarse": [], "op_error": [],
            "rel_error": [], "contraction": [], "work": []}
    meta = io.standard_meta(cfg)
    prev = None
    for p in p_list:
        m = _model(cfg, p=p)
        sched = mlmc.schedule(m.idx.J, m.idx.j0, M_finest=M_finest)
        truth = m.wavelet_dense
        Ceps = m.tapered.to_dense()
        errs = []
        for r in range(runs):
            src = mlmc.GaussianCoefficientSource(Ceps, m.idx, seed=seed + 7919 * r)
            est = mlmc.estimate(m.pattern, sched, src, seed=seed + 7919 * r)
            errs.append(mlmc.error_report(est, truth, m.idx)["op_norm_error"])
        err = float(np.mean(errs))
        rows["p"].append(p)
        rows["level"].append(int(np.log2(p)))
        rows["M_coarse"].append(sched.counts[m.idx.j0])
        rows["op_error"].append(err)
        rows["rel_error"].append(err / float(np.linalg.norm(truth, 2)))
        rows["contraction"].append(float("nan") if prev is None else prev / err)
        rows["work"].append(sched.work())
        prev = err
        meta.setdefault("model", m.meta)
        if cfg.get("dump_estimate") and p == p_list[-1]:
            io.write_matrix_market(_outdir(cfg) / f"mlmc_estimate_p{p}.mtx",
                                   est.matrix.csr, io.standard_meta(cfg))
    meta["runs"] = runs
    io.write_csv(_outdir(cfg) / "mlmc_errors.csv", rows, meta)


def cmd_krige(cfg) -> None:
    """Posterior-mean prediction from box-average observations."""
    m = _model(cfg)
    K = int(cfg.get("K_obs", 32))
    sigma2 = float(cfg.get("sigma2", 1e-2))
    width = float(cfg.get("width", min(4.0 / m.idx.p, 0.5 / K)))
    seed = int(cfg["seed"])
    out = _outdir(cfg)
    obs_file = cfg.get("observations")
    if obs_file:
        raw = io.read_csv(obs_file)
        obs = kriging.ObservationSet(centers=raw["center"], widths=raw["width"],
                                     sigma2=sigma2, values=raw["value"])
        y = np.asarray(obs.values)
    else:
        obs = kriging.equispaced_observations(K, width, sigma2)
        om_tmp = kriging.build_observation_matrix(m.system, obs, m.idx.J, m.curve)
        bounds = m.spectral_bounds()
        contour = build_contour(bounds, int(cfg.get("K", 40)))
        z = sampling.GrfSampler(m.tapered, m.idx, m.order.ra, contour).draw(seed)
        from . import rng as _rng
        noise = _rng.standard_normal(seed, 10**6, obs.K) * np.sqrt(sigma2)
        y = om_tmp.G @ z.coefficients + noise
    om = kriging.build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    mu, res = kriging.posterior_mean(m.tapered, om, m.system, y, sigma2,
                                     cg_tol=float(cfg.get("cg_tol", 1e-10)))
    targets = np.asarray(cfg.get("targets", (np.arange(256) / 256.0)))
    pred = kriging.predict_at(m.system, m.curve, mu, targets)
    meta = io.standard_meta(cfg) | {
        "model": m.meta, "cg_iterations": res.iterations,
        "gram_cond": kriging.gram_condition(m.tapered, om, m.system, sigma2)}
    io.write_csv(out / "krige_predictions.csv", {"t": targets, "value": pred}, meta)
    io.write_csv(out / "krige_observations.csv",
                 {"center": obs.centers, "width": obs.widths, "value": y}, meta)
    if cfg.get("dump_factors"):
        io.write_matrix_market(out / "krige_G_single.mtx", om.G_single,
                               io.standard_meta(cfg))
        io.write_matrix_market(out / "krige_C_eps.mtx", m.tapered.csr,
                               io.standard_meta(cfg))
        T = m.system.ifwt_dual(np.eye(m.idx.p))
        from scipy import sparse as _sp
        io.write_matrix_market(out / "krige_T_dual.mtx",
                               _sp.csr_matrix(np.where(np.abs(T) > 1e-14, T, 0.0)),
                               io.standard_meta(cfg))
    io.write_meta(out / "krige_meta.json", cfg, {"cg_iterations": res.iterations})


def cmd_pattern(cfg) -> None:
    """Taper pattern dumps (matrix market + fingerprint CSV).

    With ``"dump_matrix": true`` the tapered covariance matrix itself is
    assembled and written as matrix market plus a raw entry CSV.
    """
    m = _model(cfg)
    out = _outdir(cfg)
    rep = sparsity_report(m.pattern)
    meta = io.standard_meta(cfg) | {"model": m.meta, "nnz": rep["nnz"],
                                    "nnz_fraction": rep["nnz_fraction"]}
    io.write_matrix_market(out / "pattern.mtx", m.pattern.to_coo(),
                           io.standard_meta(cfg))
    io.write_pattern_fingerprint(out / "pattern_fingerprint.csv", m.pattern, meta)
    if cfg.get("dump_matrix"):
        S = m.tapered
        io.write_matrix_market(out / "covariance_eps.mtx", S.csr,
                               io.standard_meta(cfg))
        coo = S.csr.tocoo()
        io.write_csv(out / "covariance_eps.csv",
                     {"row": coo.row, "col": coo.col, "value": coo.data}, meta)
    io.write_meta(out / "pattern_meta.json", cfg, {"nnz": rep["nnz"]})


def cmd_filters_dump(cfg) -> None:
    """Filter masks as exact rationals, one CSV per supported family."""
    out = _outdir(cfg)
    for d, dt in SUPPORTED_PAIRS:
        fb = build_filter_bank(d, dt)
        rows = {"mask": [], "index": [], "numerator": [], "denominator": [],
                "value": []}
        for name, k, frac in fb.rational_table():
            rows["mask"].append(name)
            rows["index"].append(k)
            rows["numerator"].append(frac.numerator)
            rows["denominator"].append(frac.denominator)
            rows["value"].append(float(frac))
        io.write_csv(out / f"filters_{d}_{dt}.csv", rows, io.standard_meta(cfg))


COMMANDS = {
    "tables": cmd_tables,
    "decay": cmd_decay,
    "corrlen": cmd_corrlen,
    "sqrt-bench": cmd_sqrt_bench,
    "sample": cmd_sample,
    "mlmc": cmd_mlmc,
    "krige": cmd_krige,
    "pattern": cmd_pattern,
    "filters-dump": cmd_filters_dump,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavegrf",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threads", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        COMMANDS[args.command](cfg)
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as e:
        json.dump({"error": "numerical", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except (ConfigError, ValueError) as e:
        json.dump({"error": "config", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
