"""Command-line interface: ``nhbloch spectrum|states|gbz|analyze``.

Every command reads an INI config (see :mod:`nhbloch.config`) and writes
CSV tables and JSON summaries into the output directory.  Each CSV opens
with a ``#`` comment recording the config digest and seed.

Exit status: 0 success, 2 configuration or size error, 3 numerical failure.
"""

from __future__ import annotations

import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import click
import numpy as np

from . import analysis, gbt
from .config import RunConfig, load_config, parse_index_list
from .errors import ConfigError, NHBlochError, SizeError
from .model import build_open_chain, min_cells
from .numerics import (
    canonical_state,
    eig_dense,
    hausdorff,
    jordan_structure,
    localization_fit,
    phase_aligned_deviation,
)
from .polynomial import charpoly_ssh, roots, vieta_residuals

log = logging.getLogger("nhbloch")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
OUT_ENV = "NHBLOCH_OUT"
EPS0_EXCLUDE = 1e-6  # numeric eigenvalues this close to eps0 are edge states outside the ansatz


# -- output helpers ----------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    return obj


class Writer:
    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out = out_dir
        self.stamp = f"# config_sha256={cfg.digest()} seed={cfg.seed}\n"
        self.written = []

    def csv(self, name, header, rows):
        if "csv" not in self.cfg.formats:
            return
        lines = [self.stamp, ",".join(header) + "\n"]
        lines += [",".join(_fmt(v) for v in row) + "\n" for row in rows]
        self._write(name, "".join(lines))

    def json(self, name, payload):
        if "json" not in self.cfg.formats:
            return
        payload = {"config_sha256": self.cfg.digest(), "seed": self.cfg.seed, **payload}
        self._write(name, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")

    def _write(self, name, text):
        _atomic_write(self.out / name, text)
        self.written.append(name)


# -- shared computations -----------------------------------------------------

def _check_size(cfg):
    minimum = min_cells(cfg.spec)
    if cfg.kind == "ssh" and cfg.n_cells < gbt.MIN_CELLS:
        minimum = max(minimum, gbt.MIN_CELLS)
    if cfg.n_cells < minimum:
        raise SizeError(cfg.n_cells, minimum)


def _analytic_applicable(cfg) -> str | None:
    """``None`` when the closed-form solver applies, else the reason it does not."""
    if cfg.kind != "ssh":
        return f"no closed-form spectrum for kind={cfg.kind}"
    p = cfg.params
    if not p.is_real():
        return "closed-form quantization needs real parameters"
    if p.t0 == 0:
        return "t0 = 0: exceptional-point family, see analyze"
    return None


def _analytic(cfg):
    t = cfg.tolerances
    return gbt.analytic_spectrum(
        cfg.params,
        cfg.n_cells,
        boundary=cfg.boundary,
        tol_zero=t["tol_zero"],
        tol_sep=t["tol_sep"],
        tol_root=t["tol_root"],
        tol_cond=t["tol_cond"],
    )


def _numeric_subset(cfg, eig):
    eps0 = complex(cfg.spec.onsite)
    keep = np.abs(eig.eigenvalues - eps0) > EPS0_EXCLUDE
    return keep


# -- commands ----------------------------------------------------------------

def run_spectrum(cfg: RunConfig, w: Writer) -> dict:
    _check_size(cfg)
    h = build_open_chain(cfg.spec, cfg.n_cells)
    eig = eig_dense(h)
    w.csv(
        "spectrum_numeric.csv",
        ["index", "re_E", "im_E", "residual"],
        [(i, e.real, e.imag, r) for i, (e, r) in enumerate(zip(eig.eigenvalues, eig.residuals))],
    )
    scale = max(np.linalg.norm(h, 2), 1.0)
    summary = {
        "n_cells": cfg.n_cells,
        "n_numeric": len(eig),
        "max_numeric_residual": float(eig.residuals.max()),
        "numeric_residual_ok": bool(eig.residuals.max() <= cfg.tolerances["tol_eig"] * scale),
    }
    reason = _analytic_applicable(cfg)
    sols = [] if reason else _analytic(cfg)
    w.csv(
        "spectrum_analytic.csv",
        ["theta", "alpha", "re_E", "im_E", "branch"],
        [(s.theta, s.alpha, s.energy.real, s.energy.imag, s.branch) for s in sols],
    )
    if reason:
        summary["analytic"] = {"available": False, "reason": reason}
    else:
        keep = _numeric_subset(cfg, eig)
        numeric = eig.eigenvalues[keep]
        analytic = np.array([s.energy for s in sols], dtype=complex)
        matching = []
        for j, e in enumerate(analytic):
            d = np.abs(eig.eigenvalues - e)
            k = int(np.argmin(d))
            matching.append({"analytic": j, "numeric": k, "distance": float(d[k])})
        matched = {m["numeric"] for m in matching}
        vieta = 0.0
        for s in sols:
            cp = charpoly_ssh(cfg.params, s.energy)
            vieta = max(vieta, float(vieta_residuals(cp, roots(cp)).max()))
        summary["analytic"] = {
            "available": True,
            "boundary": cfg.boundary,
            "n_analytic": len(sols),
            "n_thetas": len(sols) // 2,
            "n_numeric_excluded_eps0": int((~keep).sum()),
            "unmatched_numeric": [
                [float(eig.eigenvalues[i].real), float(eig.eigenvalues[i].imag)]
                for i in np.flatnonzero(keep)
                if i not in matched
            ],
            "hausdorff": hausdorff(analytic, numeric),
            "max_vieta_residual": vieta,
            "matching": matching,
        }
    w.json("spectrum_compare.json", summary)
    return summary


def _state_rows(psi, analytic=None):
    rows = []
    for l, v in enumerate(psi, start=1):
        a = None if analytic is None else abs(analytic[l - 1])
        rows.append((l, abs(v), v.real, v.imag, a))
    return rows


STATE_HEADER = ["site", "abs_psi", "re_psi", "im_psi", "analytic_abs_psi"]


def run_states(cfg: RunConfig, which, w: Writer) -> dict:
    _check_size(cfg)
    h = build_open_chain(cfg.spec, cfg.n_cells)
    eig = eig_dense(h)
    for i in which:
        if not 0 <= i < len(eig):
            raise click.BadParameter(f"state index {i} outside 0..{len(eig) - 1}", param_hint="--which")
    sols = [] if _analytic_applicable(cfg) else _analytic(cfg)
    states = []
    for i in which:
        e = eig.eigenvalues[i]
        psi = canonical_state(eig.right_eigenvectors[:, i])
        entry = {"index": i, "energy": complex(e)}
        try:
            entry["alpha_fit"], entry["r2"] = localization_fit(psi, cfg.n_cells)
        except NHBlochError as exc:
            entry["alpha_fit"], entry["fit_error"] = None, str(exc)
        ana = None
        if sols:
            best = min(sols, key=lambda s: abs(s.energy - e))
            if abs(best.energy - e) <= 1e-6 * max(1.0, abs(e)):
                ana = gbt.eigenstate_ssh(cfg.params, best, cfg.n_cells, boundary=cfg.boundary)
                entry["analytic_theta"] = best.theta
                entry["analytic_alpha"] = best.alpha
                entry["analytic_deviation"] = phase_aligned_deviation(ana, psi)
        entry["analytic_matched"] = ana is not None
        w.csv(f"state_{i}.csv", STATE_HEADER, _state_rows(psi, ana))
        states.append(entry)

    summary = {"n_cells": cfg.n_cells, "states": states}
    ep = _ep_report(cfg)
    if ep is not None:
        plus, minus = ep.states(cfg.n_cells)
        for tag, v in (("plus", plus), ("minus", minus)):
            v = canonical_state(v)
            w.csv(f"ep_state_{tag}.csv", STATE_HEADER, _state_rows(v, v))
        summary["ep_templates"] = {"case_id": ep.case_id, "files": ["ep_state_plus.csv", "ep_state_minus.csv"]}
    w.json("states_summary.json", summary)
    return summary


def run_gbz(cfg: RunConfig, w: Writer) -> dict:
    _check_size(cfg)
    spec = cfg.spec
    eig = eig_dense(build_open_chain(spec, cfg.n_cells))
    traj = analysis.gbz_trajectory(spec, eig.eigenvalues, cfg.tolerances["tol_gbz"])
    w.csv(
        "gbz_roots.csv",
        ["re_Cz", "im_Cz", "re_E", "im_E", "pair_index"],
        [(p.z.real, p.z.imag, p.energy.real, p.energy.imag, p.pair_index) for p in traj.points],
    )
    mod = traj.moduli
    summary = {
        "n_cells": cfg.n_cells,
        "n_samples": len(traj.samples),
        "n_accepted": traj.n_accepted,
        "min_abs_Cz": float(mod.min()) if len(mod) else None,
        "max_abs_Cz": float(mod.max()) if len(mod) else None,
    }
    rows = []
    if cfg.kind == "ssh" and cfg.params.t0 * cfg.params.t2 != 0:
        cmp = analysis.gbz_vs_alpha(cfg.params, cfg.theta_grid, cfg.tolerances["tol_gbz"])
        for th, a in zip(cmp.thetas, cmp.alphas):
            for sign in (1, -1):
                z = math.exp(a) * complex(math.cos(th), sign * math.sin(th))
                rows.append((th, a, z.real, z.imag))
        summary.update(max_deviation=cmp.max_deviation, n_theta=cfg.theta_grid, n_theta_skipped=cmp.skipped)
    w.csv("gbz_gbt.csv", ["theta", "alpha", "re_z", "im_z"], rows)
    w.json("gbz_summary.json", summary)
    return summary


def _ep_report(cfg):
    if cfg.kind == "ssh":
        return analysis.ep_classify_ssh(cfg.params, cfg.tolerances["tol_cond"])
    if cfg.kind == "ladder":
        return analysis.ep_classify_ladder(cfg.params, cfg.tolerances["tol_cond"])
    return None


def run_analyze(cfg: RunConfig, w: Writer) -> dict:
    _check_size(cfg)
    t = cfg.tolerances
    verdict = {"kind": cfg.kind, "n_cells": cfg.n_cells}
    if cfg.kind == "ssh":
        p = cfg.params
        verdict["skin"] = (
            analysis.skin_condition_ssh(p, t["tol_cond"]).to_dict()
            if p.t0 * p.t2 != 0
            else None
        )
        if abs(p.t0 - p.t2) <= t["tol_cond"] and p.is_real() and p.t0 != 0:
            ks = -math.pi + 2 * math.pi * np.arange(cfg.theta_grid) / cfg.theta_grid
            verdict["pseudo_hermiticity"] = analysis.pseudo_hermiticity_check(p, ks, t["tol_cond"]).to_dict()
    elif cfg.kind == "ladder":
        verdict["skin"] = analysis.skin_condition_ladder(cfg.params, t["tol_cond"]).to_dict()
    else:
        verdict["skin"] = None

    ep = _ep_report(cfg)
    if ep is None:
        verdict["ep"] = None
    else:
        report = ep.to_dict(cfg.n_cells)
        h = build_open_chain(cfg.spec, cfg.n_cells)
        scale = max(np.linalg.norm(h, 2), 1.0)
        report["jordan"] = []
        for e in ep.eigenvalues:
            j = jordan_structure(h, e, tol_cluster=t["tol_cluster"] * scale, tol_rank=t["tol_rank"])
            report["jordan"].append({
                "eigenvalue": complex(e),
                "algebraic": j.algebraic_mult,
                "geometric": j.geometric_mult,
                "cluster_size": j.cluster_size,
            })
        verdict["ep"] = report
    w.json("verdict.json", verdict)
    return verdict


# -- click wiring ------------------------------------------------------------

def _common(f):
    f = click.option("--seed", type=int, default=None, help="Override [run] seed.")(f)
    f = click.option("--n", "n_cells", type=int, default=None, help="Override [run] n (cells).")(f)
    f = click.option(
        "--out", "out_dir", type=click.Path(file_okay=False), default=None,
        help=f"Output directory (default: ${OUT_ENV}, then [output] dir).",
    )(f)
    f = click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)(f)
    return f


def _prepare(config_path, out_dir, n_cells, seed):
    cfg = load_config(config_path)
    if out_dir is None:
        out_dir = os.environ.get(OUT_ENV) or cfg.out_dir
    cfg = cfg.with_overrides(n_cells=n_cells, seed=seed, out_dir=out_dir)
    return cfg, Writer(cfg, Path(cfg.out_dir))


def _guarded(fn, *args):
    try:
        return fn(*args)
    except (ConfigError, SizeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except click.ClickException:
        raise
    except (NHBlochError, np.linalg.LinAlgError, FloatingPointError) as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


def _run(fn, config_path, out_dir, n_cells, seed, *extra):
    def body():
        cfg, w = _prepare(config_path, out_dir, n_cells, seed)
        fn(cfg, *extra, w)
        for name in w.written:
            click.echo(str(w.out / name))

    _guarded(body)


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
def main(verbose):
    """Generalized Bloch solutions of non-Hermitian chains, checked against dense numerics."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@_common
def spectrum(config_path, out_dir, n_cells, seed):
    """Numeric and closed-form spectra plus their comparison."""
    _run(run_spectrum, config_path, out_dir, n_cells, seed)


@main.command()
@_common
@click.option("--which", default=None, help="Comma-separated numeric state indices (default: [run] states).")
def states(config_path, out_dir, n_cells, seed, which):
    """Per-site amplitudes of selected eigenstates."""

    def body():
        cfg, w = _prepare(config_path, out_dir, n_cells, seed)
        idx = cfg.states if which is None else parse_index_list(which, "--which")
        run_states(cfg, idx, w)
        for name in w.written:
            click.echo(str(w.out / name))

    _guarded(body)


@main.command()
@_common
def gbz(config_path, out_dir, n_cells, seed):
    """Generalized Brillouin zone from the open-chain spectrum."""
    _run(run_gbz, config_path, out_dir, n_cells, seed)


@main.command()
@_common
def analyze(config_path, out_dir, n_cells, seed):
    """Skin-effect verdict, exceptional-point report and pseudo-Hermiticity."""
    _run(run_analyze, config_path, out_dir, n_cells, seed)


if __name__ == "__main__":
    main()
