"""INI run configuration with strict validation.

::

    [model]
    kind = ssh            ; ssh | ladder | generic
    eps0 = 0
    t0 = 1
    t1l = 2.5
    t1r = 3.5
    t2 = 1.3

    [run]
    n = 40
    theta_grid = 200
    seed = 0
    boundary = full       ; full | reduced
    states = 0, 1

    [tolerances]
    tol_root = 1e-9

    [output]
    dir = out
    formats = csv, json

Ladder models use ``t0l, t0r, tl_aa, tl_bb, tl_ab, tl_ba, tr_aa, tr_bb,
tr_ab, tr_ba``.  Generic models use ``range`` and one ``hop.<m>.<i>.<j>``
key per amplitude, e.g. ``hop.-1.b.a = 0.5``.  Values accept Python complex
literals (``1.5``, ``0.2+0.1j``).
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .model import HoppingSpec, LadderParams, SSHLongRangeParams, ladder_to_spec, ssh_to_spec

SSH_KEYS = {"eps0": "eps0", "t0": "t0", "t1l": "t1L", "t1r": "t1R", "t2": "t2"}
LADDER_KEYS = {
    "eps0": "eps0", "t0l": "t0L", "t0r": "t0R",
    "tl_aa": "tL_AA", "tl_bb": "tL_BB", "tl_ab": "tL_AB", "tl_ba": "tL_BA",
    "tr_aa": "tR_AA", "tr_bb": "tR_BB", "tr_ab": "tR_AB", "tr_ba": "tR_BA",
}
TOLERANCE_DEFAULTS = {
    "tol_root": 1e-9,
    "tol_vieta": 1e-8,
    "tol_zero": 1e-10,
    "tol_sep": 1e-8,
    "tol_eig": 1e-10,
    "tol_cluster": 1e-6,
    "tol_rank": 1e-8,
    "tol_cond": 1e-10,
    "tol_gbz": 1e-6,
}
RUN_DEFAULTS = {"n": 40, "theta_grid": 200, "seed": 0, "boundary": "full", "states": ""}
OUTPUT_FORMATS = ("csv", "json")
SECTIONS = ("model", "run", "tolerances", "output")


@dataclass(frozen=True)
class RunConfig:
    kind: str
    params: object  # SSHLongRangeParams | LadderParams | HoppingSpec
    n_cells: int = 40
    theta_grid: int = 200
    seed: int = 0
    boundary: str = "full"
    states: tuple = ()
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    out_dir: str = "out"
    formats: tuple = OUTPUT_FORMATS
    source: str = ""

    @property
    def spec(self) -> HoppingSpec:
        if self.kind == "ssh":
            return ssh_to_spec(self.params)
        if self.kind == "ladder":
            return ladder_to_spec(self.params)
        return self.params

    def canonical(self) -> dict:
        """Resolved settings as plain data; output location is excluded."""
        if self.kind == "generic":
            params = {
                "eps0": _cstr(self.params.onsite),
                "range": self.params.range,
                "hops": {f"{m}.{i}.{j}": _cstr(v) for (m, i, j), v in sorted(self.params.hops.items())},
            }
        else:
            params = {k: _cstr(v) for k, v in vars(self.params).items()}
        return {
            "kind": self.kind,
            "params": params,
            "n": self.n_cells,
            "theta_grid": self.theta_grid,
            "seed": self.seed,
            "boundary": self.boundary,
            "states": list(self.states),
            "tolerances": dict(sorted(self.tolerances.items())),
            "formats": list(self.formats),
        }

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, n_cells=None, seed=None, out_dir=None) -> "RunConfig":
        changes = {}
        if n_cells is not None:
            changes["n_cells"] = int(n_cells)
        if seed is not None:
            changes["seed"] = int(seed)
        if out_dir is not None:
            changes["out_dir"] = str(out_dir)
        return replace(self, **changes)


def _cstr(v) -> str:
    v = complex(v)
    return repr(v.real) if v.imag == 0 else repr(v)


def _number(section, key, raw):
    try:
        v = complex(raw.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None
    return v.real if v.imag == 0 else v


def _int(section, key, raw, minimum=None):
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from None
    if minimum is not None and v < minimum:
        raise ConfigError(f"[{section}] {key}: must be >= {minimum}, got {v}")
    return v


def _model(items) -> tuple:
    items = dict(items)
    kind = items.pop("kind", None)
    if kind not in ("ssh", "ladder", "generic"):
        raise ConfigError(f"[model] kind must be ssh, ladder or generic, got {kind!r}")
    if kind in ("ssh", "ladder"):
        table = SSH_KEYS if kind == "ssh" else LADDER_KEYS
        unknown = sorted(set(items) - set(table))
        if unknown:
            raise ConfigError(f"[model] unknown key(s) for kind={kind}: {', '.join(unknown)}")
        values = {table[k]: _number("model", k, v) for k, v in items.items()}
        cls = SSHLongRangeParams if kind == "ssh" else LadderParams
        return kind, cls(**values)

    onsite = _number("model", "eps0", items.pop("eps0", "0"))
    if "range" not in items:
        raise ConfigError("[model] generic models need 'range'")
    rng = _int("model", "range", items.pop("range"), minimum=1)
    hops = {}
    for key, raw in items.items():
        parts = key.split(".")
        if len(parts) != 4 or parts[0] != "hop":
            raise ConfigError(f"[model] unknown key for kind=generic: {key}")
        _, m, i, j = parts
        hops[(_int("model", key, m), i.upper(), j.upper())] = _number("model", key, raw)
    try:
        return kind, HoppingSpec(onsite, rng, hops)
    except ValueError as exc:
        raise ConfigError(f"[model] {exc}") from None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"{source}: unknown section(s): {', '.join(unknown)}")
    if not cp.has_section("model"):
        raise ConfigError(f"{source}: missing [model] section")

    kind, params = _model(cp.items("model"))

    run = dict(cp.items("run")) if cp.has_section("run") else {}
    bad = sorted(set(run) - set(RUN_DEFAULTS))
    if bad:
        raise ConfigError(f"[run] unknown key(s): {', '.join(bad)}")
    run = {**{k: str(v) for k, v in RUN_DEFAULTS.items()}, **run}
    boundary = run["boundary"].strip()
    if boundary not in ("full", "reduced"):
        raise ConfigError(f"[run] boundary must be full or reduced, got {boundary!r}")
    states = parse_index_list(run["states"], "[run] states")

    tols = dict(TOLERANCE_DEFAULTS)
    if cp.has_section("tolerances"):
        for key, raw in cp.items("tolerances"):
            if key not in TOLERANCE_DEFAULTS:
                raise ConfigError(f"[tolerances] unknown key: {key}")
            v = _number("tolerances", key, raw)
            if not isinstance(v, float) or v <= 0:
                raise ConfigError(f"[tolerances] {key} must be a positive real, got {raw!r}")
            tols[key] = v

    out = dict(cp.items("output")) if cp.has_section("output") else {}
    bad = sorted(set(out) - {"dir", "formats"})
    if bad:
        raise ConfigError(f"[output] unknown key(s): {', '.join(bad)}")
    formats = tuple(f.strip() for f in out.get("formats", ",".join(OUTPUT_FORMATS)).split(",") if f.strip())
    if any(f not in OUTPUT_FORMATS for f in formats):
        raise ConfigError(f"[output] formats must be drawn from {OUTPUT_FORMATS}, got {formats}")

    return RunConfig(
        kind=kind,
        params=params,
        n_cells=_int("run", "n", run["n"], minimum=1),
        theta_grid=_int("run", "theta_grid", run["theta_grid"], minimum=1),
        seed=_int("run", "seed", run["seed"]),
        boundary=boundary,
        states=states,
        tolerances=tols,
        out_dir=out.get("dir", "out"),
        formats=formats,
        source=source,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def parse_index_list(raw: str, what: str = "index list") -> tuple:
    raw = (raw or "").strip()
    if not raw:
        return ()
    try:
        return tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated integers, got {raw!r}") from None


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture config such as ``fig2.cfg``."""
    from importlib.resources import files

    return Path(str(files("nhbloch") / "configs" / name))
