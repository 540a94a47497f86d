"""Experiment runner.

Configs are INI files (see README for the schema); `--experiment NAME` runs a
built-in catalog entry.  Everything is computed before the output directory
is touched, so a config that fails validation leaves no files behind.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analytic as an
from .cox import LineScenarioGenerator, ModelParams, PlmScenarioGenerator, PspScenarioGenerator
from .curves import SirCurve, fmt
from .equivalence import map_parameters, tv_distance
from .errors import ConfigError, IntegrationError, ParameterError, UnsupportedOrderError
from .geometry import sample_og, sample_plp, sample_psp, total_length_in
from .laws import HalfLengthLaw, RayleighLaw, law_from_spec, law_to_spec
from .montecarlo import (McConfig, estimate_nn_cdf, estimate_success, fit_plm_halflength,
                         interference_radius, manifest, nearest_transmitter_success,
                         neighbor_count_stats, plm_halflength_samples)

KINDS = ("tau-check", "nn", "neighbor-stats", "success", "plm-fit", "equivalence", "nearest-transmitter")
MODELS = ("OG", "PLP", "PSP", "PLM")
ORDERS = {"OG": (2, 4), "PLP": (2, 4), "PSP": (2, 4), "PLM": (2, 3)}
EXIT_OK, EXIT_PARAM, EXIT_CONFIG, EXIT_UNCONVERGED = 0, 1, 2, 3


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class LawSpec:
    """A half-length law, optionally scaled with mu (`b_per_mu` for Rayleigh)."""

    kind: str
    args: tuple = ()

    def build(self, mu: float) -> HalfLengthLaw:
        kw = dict(self.args)
        if "b_per_mu" in kw:
            kw = {"b": kw.pop("b_per_mu") * mu, **kw}
        return law_from_spec(self.kind, **kw)

    def text(self) -> str:
        return self.kind + "".join(f":{k}={fmt(v)}" for k, v in self.args)


@dataclass(frozen=True)
class McSection:
    n: int = 4000
    seed: int = 0
    r_int: float | None = None  # None: derived from the theta grid
    chunk_size: int = 1000
    ci_level: float = 0.95
    enabled: bool = True
    jobs: int = 1  # set from the command line, not the file


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    models: tuple = ()
    orders: tuple = (2,)
    mus: tuple = ()
    lam: float = 0.6
    p: float = 0.5
    D: float = 0.25
    alpha: float = 4.0
    laws: tuple = ()
    thetas: tuple = ()
    r_grid: tuple = ()
    mc: McSection = McSection()
    out_dir: str = ""
    baselines: tuple = ()
    pair: tuple = ()
    cs: tuple = ()
    n_fields: int = 20
    window: float = 0.0
    radius: float = 10.0

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.lam, self.p, self.D, self.alpha)


def parse_grid(text: str) -> tuple:
    """'logspace:a:b:n', 'linspace:a:b:n' or an explicit comma list."""
    text = text.strip()
    if text.startswith(("logspace:", "linspace:")):
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"grid spec {text!r} needs three fields")
        try:
            a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as e:
            raise ConfigError(f"bad grid spec {text!r}") from e
        if n < 1:
            raise ConfigError("grid needs at least one point")
        g = np.logspace(a, b, n) if parts[0] == "logspace" else np.linspace(a, b, n)
    else:
        g = np.array(_floats(text))
    if g.size == 0 or np.any(np.diff(g) <= 0) or not np.all(np.isfinite(g)):
        raise ConfigError(f"grid {text!r} must be non-empty, finite and strictly increasing")
    return tuple(float(x) for x in g)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from e


def _words(text: str) -> tuple:
    return tuple(w.strip() for w in text.split(",") if w.strip())


def parse_law(text: str) -> LawSpec:
    parts = [p.strip() for p in text.split(":") if p.strip()]
    if not parts:
        raise ConfigError("empty law spec")
    args = []
    for kv in parts[1:]:
        if "=" not in kv:
            raise ConfigError(f"law argument {kv!r} must be key=value")
        k, v = kv.split("=", 1)
        try:
            args.append((k.strip(), float(v)))
        except ValueError as e:
            raise ConfigError(f"law argument {kv!r} is not numeric") from e
    return LawSpec(parts[0].lower(), tuple(args))


_ALLOWED = {
    "experiment": {"kind", "name"},
    "model": {"models", "orders", "baselines"},
    "params": {"lam", "p", "d", "alpha", "mu"},
    "law": {"specs"},
    "grid": {"theta", "r"},
    "mc": {"n", "seed", "r_int", "chunk_size", "ci_level", "enabled"},
    "equivalence": {"pair", "c"},
    "geometry": {"n_fields", "window", "radius"},
    "output": {"dir"},
}


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"unreadable config: {e}") from e
    for sec in cp.sections():
        if sec not in _ALLOWED:
            raise ConfigError(f"unknown section [{sec}]")
        extra = set(cp[sec]) - _ALLOWED[sec]
        if extra:
            raise ConfigError(f"unknown keys in [{sec}]: {', '.join(sorted(extra))}")
    if not cp.has_option("experiment", "kind"):
        raise ConfigError("[experiment] kind is required")
    g = lambda s, k, d=None: cp.get(s, k, fallback=d)
    try:
        mc = McSection(
            n=int(g("mc", "n", McSection.n)),
            seed=int(g("mc", "seed", McSection.seed)),
            r_int=None if g("mc", "r_int", "auto").strip() == "auto" else float(g("mc", "r_int")),
            chunk_size=int(g("mc", "chunk_size", McSection.chunk_size)),
            ci_level=float(g("mc", "ci_level", McSection.ci_level)),
            enabled=cp.getboolean("mc", "enabled", fallback=True),
        )
        cfg = ExperimentConfig(
            name=g("experiment", "name", "experiment"),
            kind=g("experiment", "kind").strip(),
            models=tuple(m.upper() for m in _words(g("model", "models", ""))),
            orders=tuple(int(x) for x in _floats(g("model", "orders", "2"))),
            baselines=tuple(b.upper() for b in _words(g("model", "baselines", ""))),
            mus=tuple(_floats(g("params", "mu", ""))),
            lam=float(g("params", "lam", 0.6)),
            p=float(g("params", "p", 0.5)),
            D=float(g("params", "d", 0.25)),
            alpha=float(g("params", "alpha", 4.0)),
            laws=tuple(parse_law(s) for s in g("law", "specs", "").split(";") if s.strip()),
            thetas=parse_grid(g("grid", "theta", "logspace:-2:2:40")),
            r_grid=parse_grid(g("grid", "r")) if cp.has_option("grid", "r") else (),
            mc=mc,
            out_dir=g("output", "dir", ""),
            pair=tuple(m.upper() for m in _words(g("equivalence", "pair", ""))),
            cs=tuple(_floats(g("equivalence", "c", ""))),
            n_fields=int(g("geometry", "n_fields", 20)),
            window=float(g("geometry", "window", 0.0)),
            radius=float(g("geometry", "radius", 10.0)),
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad value: {e}") from e
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Kind-specific schema checks; raises ConfigError."""
    if cfg.kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}, got {cfg.kind!r}")
    try:
        ModelParams(cfg.lam, cfg.p, cfg.D, cfg.alpha)
        McConfig(n=max(cfg.mc.n, 1), seed=cfg.mc.seed, chunk_size=cfg.mc.chunk_size, ci_level=cfg.mc.ci_level)
    except ParameterError as e:
        raise ConfigError(str(e)) from e
    if cfg.mc.seed < 0:
        raise ConfigError("seed must be non-negative")
    if cfg.mc.r_int is not None and not cfg.mc.r_int > 0:
        raise ConfigError("r_int must be positive or 'auto'")
    for m in cfg.models + cfg.pair:
        if m not in MODELS:
            raise ConfigError(f"unknown model {m!r}")
    if any(mu < 0 for mu in cfg.mus):
        raise ConfigError("mu must be non-negative")
    for spec in cfg.laws:
        try:
            spec.build(1.0)
        except (ParameterError, KeyError, TypeError) as e:
            raise ConfigError(f"bad law spec {spec.text()!r}: {e}") from e
    need_law = set(cfg.models) & {"PSP", "PLM"} or cfg.pair == ("PLM", "PSP")
    if need_law and not cfg.laws and cfg.kind != "plm-fit":
        raise ConfigError("PSP/PLM experiments need a [law] specs entry")
    for b in cfg.baselines:
        if b not in ("PPP1", "PPP2"):
            raise ConfigError(f"baseline must be PPP1 or PPP2, got {b!r}")
    k = cfg.kind
    if k in ("nn", "neighbor-stats", "success", "nearest-transmitter", "tau-check") and not cfg.models:
        raise ConfigError(f"{k} needs [model] models")
    if k != "tau-check" and k != "plm-fit" and k != "equivalence" and not cfg.mus:
        raise ConfigError(f"{k} needs [params] mu")
    if k in ("success", "nn", "nearest-transmitter"):
        for mdl in cfg.models:
            bad = [o for o in cfg.orders if o not in ORDERS[mdl]]
            if bad:
                raise ConfigError(f"order(s) {bad} not defined for {mdl}")
    if k in ("nn", "neighbor-stats") and not cfg.r_grid:
        raise ConfigError(f"{k} needs [grid] r")
    if k in ("nn", "neighbor-stats") and cfg.r_grid[0] < 0:
        raise ConfigError("r grid must be non-negative")
    if k in ("nearest-transmitter", "neighbor-stats", "nn") and not cfg.mc.enabled:
        raise ConfigError(f"{k} is Monte Carlo only; [mc] enabled must be true")
    if k == "nearest-transmitter" and set(cfg.models) - {"PSP", "PLM"}:
        raise ConfigError("nearest-transmitter supports PSP and PLM")
    if k == "neighbor-stats" and set(cfg.models) - {"PSP", "PLM"}:
        raise ConfigError("neighbor-stats supports PSP and PLM")
    if k == "tau-check":
        if set(cfg.models) - {"OG", "PLP", "PSP"}:
            raise ConfigError("tau-check supports OG, PLP and PSP")
        if len(cfg.mus) != 1:
            raise ConfigError("tau-check needs a single mu")
        if not cfg.radius > 0:
            raise ConfigError("[geometry] radius must be positive")
    if k == "plm-fit":
        if not cfg.mus or any(mu <= 0 for mu in cfg.mus):
            raise ConfigError("plm-fit needs positive mu values")
        if cfg.n_fields < 1:
            raise ConfigError("plm-fit needs n_fields >= 1")
    if k == "equivalence":
        pairs = {("OG", "PLP"), ("PLP", "PSP"), ("PLM", "PSP")}
        if cfg.pair not in pairs:
            raise ConfigError(f"equivalence pair must be one of {sorted(pairs)}")
        if cfg.pair == ("PLP", "PSP") and (not cfg.cs or any(c <= 0 for c in cfg.cs)):
            raise ConfigError("PLP,PSP equivalence needs positive [equivalence] c values")
        if not cfg.mus:
            raise ConfigError("equivalence needs [params] mu")
        if cfg.pair == ("PLM", "PSP") and not cfg.mc.enabled:
            raise ConfigError("PLM,PSP equivalence compares against lilypond Monte Carlo")


def config_text(cfg: ExperimentConfig) -> str:
    """Render a config back to INI (used for the manifest and catalog round trips)."""
    j = lambda xs: ", ".join(fmt(x) if isinstance(x, float) else str(x) for x in xs)
    cp = configparser.ConfigParser(interpolation=None)
    cp["experiment"] = {"kind": cfg.kind, "name": cfg.name}
    cp["model"] = {"models": j(cfg.models), "orders": j(cfg.orders), "baselines": j(cfg.baselines)}
    cp["params"] = {"lam": fmt(cfg.lam), "p": fmt(cfg.p), "d": fmt(cfg.D), "alpha": fmt(cfg.alpha),
                    "mu": j(cfg.mus)}
    cp["law"] = {"specs": "; ".join(s.text() for s in cfg.laws)}
    cp["grid"] = {"theta": j(cfg.thetas)}
    if cfg.r_grid:
        cp["grid"]["r"] = j(cfg.r_grid)
    cp["mc"] = {"n": str(cfg.mc.n), "seed": str(cfg.mc.seed),
                "r_int": "auto" if cfg.mc.r_int is None else fmt(cfg.mc.r_int),
                "chunk_size": str(cfg.mc.chunk_size), "ci_level": fmt(cfg.mc.ci_level),
                "enabled": "yes" if cfg.mc.enabled else "no"}
    cp["equivalence"] = {"pair": j(cfg.pair), "c": j(cfg.cs)}
    cp["geometry"] = {"n_fields": str(cfg.n_fields), "window": fmt(cfg.window), "radius": fmt(cfg.radius)}
    cp["output"] = {"dir": cfg.out_dir}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------- catalog

CATALOG = {
    "tau": ("street length per unit area vs mu / 2 mu E[H]", """
[experiment]
kind = tau-check
[model]
models = OG, PLP, PSP
[params]
mu = 1
[law]
specs = deterministic:h0=10; rayleigh:b=0.0103
[geometry]
radius = 10
[mc]
n = 10000
"""),
    "fig3b": ("neighbour-count mean/variance, PLM vs PSP (Rayleigh), mu = 0.01", """
[experiment]
kind = neighbor-stats
[model]
models = PLM, PSP
[params]
lam = 0.3
p = 1
mu = 0.01
[law]
specs = rayleigh:b_per_mu=1.03
[grid]
r = linspace:5:60:12
[mc]
n = 4000
"""),
    "fig4": ("lilypond half-length Rayleigh fit across mu", """
[experiment]
kind = plm-fit
[params]
mu = 0.01, 0.1, 1
[geometry]
n_fields = 20
"""),
    "fig5": ("nearest-neighbour distance CDF, PLM vs PSP (Rayleigh)", """
[experiment]
kind = nn
[model]
models = PSP, PLM
orders = 2
[params]
lam = 0.3
p = 1
mu = 0.01, 1
[law]
specs = rayleigh:b_per_mu=1.04
[grid]
r = linspace:0.05:6:40
[mc]
n = 10000
"""),
    "fig6a": ("PLP success, general vs intersection vehicle", """
[experiment]
kind = success
[model]
models = PLP
orders = 2, 4
[params]
lam = 0.6
p = 0.5
mu = 2
[mc]
n = 4000
"""),
    "fig6b": ("PSP success with h = 10, general vs intersection vehicle", """
[experiment]
kind = success
[model]
models = PSP
orders = 2, 4
[params]
lam = 0.6
p = 0.5
mu = 0.1
[law]
specs = deterministic:h0=10
[mc]
n = 4000
"""),
    "fig6c": ("PLM success, general vs T-junction vehicle", """
[experiment]
kind = success
[model]
models = PLM
orders = 2, 3
[params]
lam = 0.6
p = 0.5
mu = 0.3
[law]
specs = rayleigh:b_per_mu=1.04
[grid]
theta = logspace:-2:2:20
[mc]
n = 4000
"""),
    "fig7": ("PLM Monte Carlo vs the PSP-based approximation", """
[experiment]
kind = equivalence
[equivalence]
pair = PLM, PSP
[params]
lam = 0.6
p = 0.5
mu = 0.01, 1
[law]
specs = rayleigh:b_per_mu=1.04
[grid]
theta = logspace:-2:2:20
[mc]
n = 4000
"""),
    "fig8": ("success when receiving from the nearest active neighbour", """
[experiment]
kind = nearest-transmitter
[model]
models = PLM, PSP
orders = 2
[params]
lam = 1
p = 0.5
mu = 0.01, 1
[law]
specs = rayleigh:b_per_mu=1.04
[grid]
theta = logspace:-2:2:20
[mc]
n = 4000
"""),
    "fig9": ("PSP success against 1-D and 2-D PPP baselines over a wide theta range", """
[experiment]
kind = success
[model]
models = PSP
orders = 2
baselines = PPP1, PPP2
[params]
lam = 0.6
p = 0.5
mu = 0.1
[law]
specs = deterministic:h0=10
[grid]
theta = logspace:-4:3:36
[mc]
enabled = no
"""),
    "plp-limit": ("PSP with stretched sticks approaching the PLP", """
[experiment]
kind = equivalence
[equivalence]
pair = PLP, PSP
c = 10, 100, 1000
[params]
lam = 0.6
p = 0.5
mu = 2
[mc]
enabled = no
"""),
}


def catalog_config(name: str) -> ExperimentConfig:
    if name not in CATALOG:
        raise ConfigError(f"unknown experiment {name!r}; see --list")
    text = CATALOG[name][1]
    if "name =" not in text:
        text = text.replace("[experiment]\n", f"[experiment]\nname = {name}\n", 1)
    return parse_config(text)


def list_experiments() -> str:
    w = max(len(k) for k in CATALOG)
    return "".join(f"{k:<{w}}  {d}\n" for k, (d, _) in CATALOG.items())


# ---------------------------------------------------------------- runners

@dataclass
class Outputs:
    files: dict = field(default_factory=dict)  # name -> text
    summary: list = field(default_factory=list)
    unconverged: int = 0
    extra: dict = field(default_factory=dict)


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _sub_seed(seed: int, *key) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def _tau(model, mu, law):
    return mu if model in ("OG", "PLP") else 2.0 * mu * law.mean


def _mc(cfg, r_int, *key):
    return McConfig(n=cfg.mc.n, seed=_sub_seed(cfg.mc.seed, *key), r_int=r_int, ci_level=cfg.mc.ci_level,
                    chunk_size=cfg.mc.chunk_size, jobs=cfg.mc.jobs)


def _generator(model, order, params, mu, law, radius):
    if model in ("OG", "PLP"):
        return LineScenarioGenerator(model, order, params, mu, radius)
    if model == "PSP":
        return PspScenarioGenerator(order, params, mu, law, radius)
    return PlmScenarioGenerator(order, params, mu, radius)


def _analytic(model, order, cfg, mu, law, thetas, out: Outputs, label):
    """Analytic curve, point by point; unconverged points keep their estimate and are flagged."""
    P = cfg.params
    if model in ("OG", "PLP"):
        fn = lambda t: an.og_plp_success(order, mu, P.lam_p, P.D, P.alpha, t, full_output=True)
    elif model == "PSP":
        fn = lambda t: an.psp_success(order, mu, P.lam_p, P.D, P.alpha, t, law, full_output=True)
    elif order == 2:
        fn = lambda t: an.plm_success_general(mu, P.lam_p, P.D, P.alpha, t, law.b, full_output=True)
    else:
        fn = lambda t: an.plm_success_tjunction(mu, P.lam_p, P.D, P.alpha, t, law.b, full_output=True)
    vals, errs, flags = [], [], []
    for t in thetas:
        try:
            v, e = fn(t)
            flags.append("")
        except IntegrationError as ex:
            v, e = ex.estimate, ex.bound
            flags.append("unconverged")
            out.unconverged += 1
        vals.append(min(max(v, 0.0), 1.0))
        errs.append(e)
    vals, errs = np.array(vals), np.array(errs)
    # flagged points may break monotonicity; widen their error so the curve stays valid
    errs = np.where(np.array(flags) == "", errs, np.maximum(errs, 1.0))
    return SirCurve(np.array(thetas), vals, errs, "analytic", label=label), flags


def _law_for(cfg, mu):
    return cfg.laws[0].build(mu) if cfg.laws else None


def _tag(*parts):
    return "_".join(str(p).replace(".", "p") for p in parts)


def run_success(cfg: ExperimentConfig, out: Outputs, nearest=False):
    P = cfg.params
    th = np.array(cfg.thetas)
    rows = []
    for mu in cfg.mus:
        law = _law_for(cfg, mu)
        for model in cfg.models:
            tau = _tau(model, mu, law)
            r_int = cfg.mc.r_int or interference_radius(P.lam_p, tau, P.D, P.alpha, float(th[-1]))
            for order in cfg.orders:
                key = _tag(model, f"m{order}", f"mu{fmt(mu)}")
                curves = []
                flags = [""] * th.size
                if not nearest:
                    ac, flags = _analytic(model, order, cfg, mu, law, cfg.thetas, out, key + "_analytic")
                    curves.append(ac)
                if cfg.mc.enabled:
                    gen = _generator(model, order, P, mu, law, r_int)
                    est = nearest_transmitter_success if nearest else estimate_success
                    mc = _mc(cfg, r_int, MODELS.index(model), order, int(round(mu * 1e6)))
                    curves.append(est(gen, P, th, mc, label=key + "_mc"))
                    out.extra.setdefault("r_int", {})[key] = r_int
                for c in curves:
                    out.files[c.label + ".csv"] = c.to_csv()
                    for i, t in enumerate(th):
                        rows.append((model, order, mu, t, c.kind, c.values[i], c.errors[i],
                                     flags[i] if c.kind == "analytic" else ""))
                    out.summary.append(_curve_line(c))
        for b in cfg.baselines:
            d = 1 if b == "PPP1" else 2
            lam_d = P.lam_p if d == 1 else P.lam_p * _tau(cfg.models[0], mu, law)
            c = an.ppp_curve(d, lam_d, P.D, P.alpha, th, label=_tag(b, f"mu{fmt(mu)}"))
            out.files[c.label + ".csv"] = c.to_csv()
            rows += [(b, "", mu, t, c.kind, v, e, "") for t, v, e in zip(th, c.values, c.errors)]
            out.summary.append(_curve_line(c))
    out.files["results.csv"] = _table(("model", "order", "mu", "theta", "kind", "value", "err_or_ci", "flag"),
                                      rows)


def _curve_line(c: SirCurve) -> str:
    col = "ci" if c.kind == "monte-carlo" else "err"
    pick = sorted({0, len(c) // 2, len(c) - 1})
    pts = ", ".join(f"p({c.thetas[i]:.3g})={c.values[i]:.4f} {col} {c.errors[i]:.1e}" for i in pick)
    return f"{c.label}: {pts}"


def run_tau(cfg: ExperimentConfig, out: Outputs):
    mu, R = cfg.mus[0], cfg.radius
    area = math.pi * R * R
    rows, jobs = [], []
    for model in cfg.models:
        if model == "PSP":
            jobs += [(model, spec) for spec in cfg.laws]
        else:
            jobs.append((model, None))
    z = McConfig(ci_level=cfg.mc.ci_level).z
    for i, (model, spec) in enumerate(jobs):
        rng = np.random.default_rng(_sub_seed(cfg.mc.seed, i))
        law = spec.build(mu) if spec else None
        sample = {"OG": lambda: sample_og(mu, R, rng), "PLP": lambda: sample_plp(mu, R, rng),
                  "PSP": lambda: sample_psp(mu, law, R, rng)}[model]
        x = np.array([total_length_in(sample(), R) / area for _ in range(cfg.mc.n)])
        expected = _tau(model, mu, law)
        hw = z * x.std(ddof=1) / math.sqrt(x.size)
        name = model + ("" if spec is None else f"[{spec.text()}]")
        rows.append((name, mu, float(x.mean()), float(hw), expected, float(x.mean() / expected - 1.0), x.size))
        out.summary.append(f"{name}: tau={x.mean():.5f} ci {hw:.1e} expected {expected:.5f}")
    out.files["results.csv"] = _table(("model", "mu", "tau_hat", "ci", "tau_expected", "rel_err", "n"), rows)


def run_nn(cfg: ExperimentConfig, out: Outputs):
    r = np.array(cfg.r_grid)
    rows = []
    for mu in cfg.mus:
        law = _law_for(cfg, mu)
        for model in cfg.models:
            for order in cfg.orders:
                gen = _generator(model, order, cfg.params, mu, law, float(r[-1]))
                est = estimate_nn_cdf(gen, r, _mc(cfg, float(r[-1]), MODELS.index(model), order,
                                                  int(round(mu * 1e6))))
                ana, aerr = [], []
                for x in r:
                    if model in ("OG", "PLP"):
                        v, e = an.nn_cdf_og_plp(x, order, mu, cfg.lam, full_output=True)
                    else:
                        # the PLM is compared with its PSP approximation
                        v, e = an.nn_cdf_psp(x, order, mu, cfg.lam, law, full_output=True)
                    ana.append(v)
                    aerr.append(e)
                gap = float(np.max(np.abs(est.cdf - np.array(ana))))
                rows += [(model, order, mu, x, est.cdf[i], est.half_width[i], ana[i], aerr[i])
                         for i, x in enumerate(r)]
                out.summary.append(f"{model} m={order} mu={fmt(mu)}: max |F_mc - F_quad| = {gap:.4f} "
                                   f"(max ci {est.half_width.max():.1e}, n={est.n})")
    out.files["results.csv"] = _table(("model", "order", "mu", "r", "mc_cdf", "mc_ci", "analytic",
                                       "analytic_err"), rows)


def run_neighbor_stats(cfg: ExperimentConfig, out: Outputs):
    r = np.array(cfg.r_grid)
    rows = []
    for mu in cfg.mus:
        law = _law_for(cfg, mu)
        for model in cfg.models:
            gen = _generator(model, 2, cfg.params, mu, law, float(r[-1]))
            st = neighbor_count_stats(gen, r, _mc(cfg, float(r[-1]), MODELS.index(model), int(round(mu * 1e6))))
            rows += [(model, mu, x, st.mean[i], st.mean_hw[i], st.var[i], st.var_hw[i], st.n)
                     for i, x in enumerate(r)]
            i = r.size // 2
            out.summary.append(f"{model} mu={fmt(mu)} r={r[i]:.3g}: mean {st.mean[i]:.3f} ci {st.mean_hw[i]:.2e}, "
                               f"var {st.var[i]:.3f} ci {st.var_hw[i]:.2e}")
        lam2 = cfg.lam * 2.0 * mu * law.mean
        rows += [("PPP2", mu, x, lam2 * math.pi * x * x, 0.0, lam2 * math.pi * x * x, 0.0, 0) for x in r]
    out.files["results.csv"] = _table(("model", "mu", "r", "mean", "mean_ci", "var", "var_ci", "n"), rows)


def run_plm_fit(cfg: ExperimentConfig, out: Outputs):
    rows = []
    z = McConfig(ci_level=cfg.mc.ci_level).z
    for i, mu in enumerate(cfg.mus):
        window = cfg.window or 12.0 / math.sqrt(mu)
        h, frac = plm_halflength_samples(mu, cfg.n_fields, window, _sub_seed(cfg.mc.seed, i))
        b = fit_plm_halflength(h)
        # delta method on b = pi / (4 mean^2)
        hw = z * 2.0 * b * h.std(ddof=1) / (math.sqrt(h.size) * h.mean())
        rows.append((mu, b, hw, b / mu, h.size, frac))
        out.summary.append(f"mu={fmt(mu)}: b_hat={b:.5g} ci {hw:.1e} (b/mu={b / mu:.4f}, sticks={h.size}, "
                           f"truncated={frac:.1e})")
    out.files["results.csv"] = _table(("mu", "b_hat", "ci", "b_over_mu", "n_sticks", "truncated_fraction"), rows)


def run_equivalence(cfg: ExperimentConfig, out: Outputs):
    P = cfg.params
    th = np.array(cfg.thetas)
    reports = []
    for mu in cfg.mus:
        if cfg.pair == ("OG", "PLP"):
            a, _ = _analytic("OG", 2, cfg, mu, None, cfg.thetas, out, _tag("OG", f"mu{fmt(mu)}"))
            tgt = map_parameters("OG", {"mu": mu}, "PLP")
            b, _ = _analytic("PLP", 2, cfg, tgt["mu"], None, cfg.thetas, out, _tag("PLP", f"mu{fmt(mu)}"))
            reports.append((a, b, tv_distance(a, b, 2)))
        elif cfg.pair == ("PLP", "PSP"):
            a, _ = _analytic("PLP", 2, cfg, mu, None, cfg.thetas, out, _tag("PLP", f"mu{fmt(mu)}"))
            for c in cfg.cs:
                tgt = map_parameters("PLP", {"mu": mu}, "PSP", c=c)
                b, _ = _analytic("PSP", 2, cfg, tgt["mu"], tgt["law"], cfg.thetas, out,
                                 _tag("PSP", f"c{fmt(c)}", f"mu{fmt(tgt['mu'])}"))
                reports.append((a, b, tv_distance(a, b, 2)))
        else:
            law = _law_for(cfg, mu)
            if not isinstance(law, RayleighLaw):
                raise ConfigError("PLM,PSP equivalence needs a Rayleigh law")
            tgt = map_parameters("PLM", {"mu": mu, "law": law}, "PSP")
            b, _ = _analytic("PSP", 2, cfg, tgt["mu"], tgt["law"], cfg.thetas, out, _tag("PSP", f"mu{fmt(mu)}"))
            r_int = cfg.mc.r_int or interference_radius(P.lam_p, _tau("PSP", mu, law), P.D, P.alpha, float(th[-1]))
            gen = PlmScenarioGenerator(2, P, mu, r_int)
            a = estimate_success(gen, P, th, _mc(cfg, r_int, int(round(mu * 1e6))), label=_tag("PLM", f"mu{fmt(mu)}"))
            reports.append((a, b, tv_distance(a, b, 2)))
    rows = []
    for a, b, rep in reports:
        out.files[a.label + ".csv"] = a.to_csv()
        out.files[b.label + ".csv"] = b.to_csv()
        rows.append((a.label, b.label, rep.eps, rep.theta_star, "" if rep.eps_low is None else rep.eps_low,
                     "" if rep.eps_high is None else rep.eps_high))
        out.summary.append(f"{a.label} vs {b.label}: " + rep.summary().split(": ", 1)[1]
                           + ("" if rep.ci_aware else f" (quadrature err {max(a.errors.max(), b.errors.max()):.1e})"))
    out.files["results.csv"] = _table(("curve_a", "curve_b", "eps", "theta_star", "eps_low", "eps_high"), rows)


RUNNERS = {
    "success": run_success,
    "nearest-transmitter": lambda cfg, out: run_success(cfg, out, nearest=True),
    "tau-check": run_tau,
    "nn": run_nn,
    "neighbor-stats": run_neighbor_stats,
    "plm-fit": run_plm_fit,
    "equivalence": run_equivalence,
}


def run(cfg: ExperimentConfig, out_dir: Path, jobs: int = 1) -> Outputs:
    """Compute everything, then write the files in one go."""
    cfg = replace(cfg, mc=replace(cfg.mc, jobs=jobs))
    out = Outputs()
    RUNNERS[cfg.kind](cfg, out)
    out.files["summary.txt"] = "".join(s + "\n" for s in out.summary)
    out.files["manifest.json"] = manifest(
        McConfig(n=max(cfg.mc.n, 1), seed=cfg.mc.seed, r_int=1.0, ci_level=cfg.mc.ci_level,
                 chunk_size=cfg.mc.chunk_size),
        experiment=cfg.name, kind=cfg.kind, config=config_text(cfg), mc_enabled=cfg.mc.enabled,
        laws=[law_to_spec(s.build(mu)) for s in cfg.laws for mu in (cfg.mus or (1.0,))],
        unconverged_points=out.unconverged, **out.extra)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(out.files.items()):
        (out_dir / name).write_text(text)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coxnet", description="Run street-network SIR experiments.")
    ap.add_argument("--config", type=Path, help="INI experiment config")
    ap.add_argument("--experiment", help="built-in catalog entry (see --list)")
    ap.add_argument("--seed", type=int, help="override the master seed")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for Monte Carlo")
    ap.add_argument("--list", action="store_true", help="list catalog experiments and exit")
    ap.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        sys.stdout.write(list_experiments())
        return EXIT_OK
    try:
        if bool(args.config) == bool(args.experiment):
            raise ConfigError("give exactly one of --config or --experiment")
        if args.config:
            try:
                text = args.config.read_text()
            except OSError as e:
                raise ConfigError(f"cannot read {args.config}: {e}") from e
            cfg = parse_config(text)
        else:
            cfg = catalog_config(args.experiment)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be non-negative")
            cfg = replace(cfg, mc=replace(cfg.mc, seed=args.seed))
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.print_config:
            sys.stdout.write(config_text(cfg))
            return EXIT_OK
        out_dir = args.out or Path(cfg.out_dir or f"results/{cfg.name}")
        out = run(cfg, out_dir, args.jobs)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParameterError, UnsupportedOrderError) as e:
        print(f"parameter error: {e}", file=sys.stderr)
        return EXIT_PARAM
    for line in out.summary:
        print(line)
    print(f"wrote {len(out.files)} files to {out_dir}")
    if out.unconverged:
        print(f"warning: {out.unconverged} quadrature points did not converge (flagged in results.csv)",
              file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK
