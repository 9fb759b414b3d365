"""Experiment orchestration: repeated sampling, evaluation, sweeps and output.

Seeds
-----
Every (dataset, sampler, repetition) cell gets its own seed::

    cell_seed = hash64(master_seed, dataset_id, method, sampler.params(), rep)

The sampler runs with ``cell_seed`` and the AUC comparisons with
``hash64(cell_seed, "auc")`` (see `lpsampling.rng.hash64`). Seeds never
depend on the measure list, the sampler list order or the worker count.
Standard deviations are population standard deviations (``ddof=0``).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .evaluator import (DEFAULT_AUC_N, Histogram, KINDS, average_histograms, evaluate,
                        probe_distribution)
from .graph import EdgeListError, Graph, generate_synthetic, giant_component, load_edge_list, stats
from .predictors import MEASURES, Measure
from .rng import hash64
from .samplers import Method, SamplerSpec, SamplingError, sample

log = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "DatasetSpec",
    "SweepSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "BestCell",
    "StatsRow",
    "CSV_HEADER",
    "load_dataset",
    "cell_seed",
    "run_experiment",
    "run_with_histograms",
    "run_sweep",
    "best_measure_table",
    "format_best_table",
    "emit_results",
    "read_results_json",
    "stats_report",
    "format_stats_table",
]

CSV_HEADER = ("dataset", "sampler", "s_f", "m", "p_f", "measure", "reps",
              "auc_mean", "auc_std", "precision_mean", "precision_std")
M_CAP = 1000


class ConfigError(ValueError):
    """Invalid experiment configuration or unloadable dataset."""


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset comes from: an edge-list file or a synthetic generator."""

    id: str
    path: str | None = None
    comment: tuple[str, ...] = ("#", "%")
    separator: str | None = None
    one_indexed: bool = False
    synthetic: dict | None = None

    @classmethod
    def from_dict(cls, d) -> "DatasetSpec":
        if isinstance(d, str):
            d = {"path": d}
        d = dict(d)
        if "id" not in d:
            if "path" not in d:
                raise ConfigError("a synthetic dataset needs an 'id'")
            d["id"] = Path(d["path"]).stem
        if isinstance(d.get("comment"), str):
            d["comment"] = (d["comment"],)
        if "comment" in d:
            d["comment"] = tuple(d["comment"])
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown dataset keys: {sorted(unknown)}")
        if (d.get("path") is None) == (d.get("synthetic") is None):
            raise ConfigError(f"dataset {d['id']!r} needs exactly one of 'path' or 'synthetic'")
        return cls(**d)

    def to_dict(self) -> dict:
        d = {"id": self.id}
        if self.path is not None:
            d.update(path=self.path, comment=list(self.comment), separator=self.separator,
                     one_indexed=self.one_indexed)
        else:
            d["synthetic"] = dict(self.synthetic)
        return d


@dataclass(frozen=True)
class SweepSpec:
    method: Method
    param: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        expected = {Method.FS: "m", Method.FF: "p_f"}.get(self.method)
        if expected is None or self.param != expected:
            raise ConfigError("sweeps cover m for FS or p_f for FF, "
                              f"got {self.param!r} for {self.method.value}")
        if not self.values:
            raise ConfigError("sweep values must be non-empty")

    @classmethod
    def from_dict(cls, d) -> "SweepSpec":
        return cls(Method(str(d["method"]).upper()), d["param"], tuple(d["values"]))

    def to_dict(self) -> dict:
        return {"method": self.method.value, "param": self.param, "values": list(self.values)}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's output.

    The on-disk format is a flat JSON object with the same keys as
    `to_dict`; `from_dict` fills in defaults for missing keys.
    """

    datasets: tuple[DatasetSpec, ...]
    samplers: tuple[SamplerSpec, ...] = ()
    measures: tuple[Measure, ...] = MEASURES
    repetitions: int = 100
    s_f: float = 0.9
    auc_n: int = DEFAULT_AUC_N
    seed: int = 0
    out_dir: str | None = None
    formats: tuple[str, ...] = ("csv",)
    jobs: int = 1
    histograms: bool = False
    histogram_degrees: str = "full"
    sweep: SweepSpec | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not 0.0 < self.s_f < 1.0:
            raise ConfigError(f"s_f must lie in (0, 1), got {self.s_f}")
        if self.auc_n < 1:
            raise ConfigError("auc_n must be >= 1")
        if not self.datasets:
            raise ConfigError("no datasets configured")
        if not self.measures:
            raise ConfigError("no measures configured")
        try:
            object.__setattr__(self, "measures",
                               tuple(Measure(str(m).upper()) for m in self.measures))
        except ValueError as exc:
            raise ConfigError(f"invalid measure: {exc}") from exc
        if self.histogram_degrees not in ("full", "train"):
            raise ConfigError("histogram_degrees must be 'full' or 'train', "
                              f"got {self.histogram_degrees!r}")
        bad = set(self.formats) - {"csv", "json"}
        if bad:
            raise ConfigError(f"unknown output formats {sorted(bad)}")
        object.__setattr__(self, "samplers",
                           tuple(replace(s, s_f=self.s_f, seed=0) for s in self.samplers))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            s_f = float(d.get("s_f", 0.9))
            d["datasets"] = tuple(DatasetSpec.from_dict(x) for x in d.get("datasets", ()))
            d["samplers"] = tuple(SamplerSpec.from_dict(
                x if isinstance(x, str) else {**x, "s_f": s_f}) for x in d.get("samplers", ()))
            if "measures" in d:
                d["measures"] = tuple(Measure(str(m).upper()) for m in d["measures"])
            if "formats" in d:
                fm = d["formats"]
                d["formats"] = (fm,) if isinstance(fm, str) else tuple(fm)
            if d.get("sweep") is not None:
                d["sweep"] = SweepSpec.from_dict(d["sweep"])
            return cls(**d)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "datasets": [ds.to_dict() for ds in self.datasets],
            "samplers": [{k: v for k, v in s.to_dict().items() if k not in ("seed", "s_f")}
                         for s in self.samplers],
            "measures": [m.value for m in self.measures],
            "repetitions": self.repetitions,
            "s_f": self.s_f,
            "auc_n": self.auc_n,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "formats": list(self.formats),
            "jobs": self.jobs,
            "histograms": self.histograms,
            "histogram_degrees": self.histogram_degrees,
            "sweep": self.sweep.to_dict() if self.sweep else None,
        }


@dataclass(frozen=True)
class ExperimentResult:
    dataset: str
    sampler: str
    s_f: float
    m: int | None
    p_f: float | None
    measure: str
    reps: int
    auc_mean: float
    auc_std: float
    precision_mean: float
    precision_std: float
    failures: int = 0
    error: str | None = None

    @property
    def sampler_label(self) -> str:
        if self.m is not None:
            return f"{self.sampler}(m={self.m})"
        if self.p_f is not None:
            return f"{self.sampler}(p_f={self.p_f:g})"
        return self.sampler

    def csv_row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(x) if isinstance(x, float) else str(x)
        return [fmt(getattr(self, c)) for c in CSV_HEADER]


def load_dataset(spec: DatasetSpec) -> Graph:
    """Giant component of the dataset described by ``spec``."""
    try:
        if spec.synthetic is not None:
            params = dict(spec.synthetic)
            kind = params.pop("kind")
            g = generate_synthetic(kind, **params)
        else:
            g = load_edge_list(spec.path, comment=spec.comment, separator=spec.separator,
                               one_indexed=spec.one_indexed)
    except (OSError, EdgeListError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load dataset {spec.id!r}: {exc}") from exc
    gcc = giant_component(g)
    if gcc.node_count < 3:
        raise ConfigError(f"dataset {spec.id!r} has a giant component of {gcc.node_count} nodes")
    return gcc


def cell_seed(master: int, dataset: str, spec: SamplerSpec, rep: int) -> int:
    return hash64(master, dataset, spec.method.value, spec.params(), rep)


# --- work units ------------------------------------------------------------

_GRAPHS: dict[str, Graph] = {}


def _init_worker(graphs: dict[str, Graph]) -> None:
    _GRAPHS.clear()
    _GRAPHS.update(graphs)


def _run_unit(unit):
    """One (dataset, sampler, repetition): sample, evaluate, optionally histogram."""
    ds, spec, rep, master, measures, auc_n, hist_mode = unit
    graph = _GRAPHS[ds]
    seed = cell_seed(master, ds, spec, rep)
    try:
        part = sample(graph, replace(spec, seed=seed))
    except SamplingError as exc:
        return None, None, f"rep {rep}: {exc}"
    train = part.train_graph(graph)
    scores = evaluate(train, part.probe_array(), measures, auc_n=auc_n,
                      seed=hash64(seed, "auc"))
    vals = {m.value: (s.auc, s.precision) for m, s in scores.items()}
    hists = None
    if hist_mode:
        dg = train if hist_mode == "train" else None
        hists = {k: probe_distribution(graph, part.probe_array(), k, degree_graph=dg)
                 for k in KINDS}
    return vals, hists, None


def _mean_std(xs: Sequence[float]) -> tuple[float, float]:
    if not xs:
        return math.nan, math.nan
    mean = math.fsum(xs) / len(xs)
    var = math.fsum((x - mean) ** 2 for x in xs) / len(xs)
    return mean, math.sqrt(var)


def _execute(config: ExperimentConfig, graphs: dict[str, Graph]):
    hist_mode = config.histogram_degrees if config.histograms else None
    units = [(ds.id, spec, rep, config.seed, config.measures, config.auc_n, hist_mode)
             for ds in config.datasets for spec in config.samplers
             for rep in range(config.repetitions)]
    if config.jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs, initializer=_init_worker,
                                 initargs=(graphs,)) as pool:
            outputs = list(pool.map(_run_unit, units, chunksize=1))
    else:
        _init_worker(graphs)
        outputs = [_run_unit(u) for u in units]

    results: list[ExperimentResult] = []
    histograms: dict[tuple[str, str, str], Histogram] = {}
    by_cell: dict[tuple[str, SamplerSpec], list] = {}
    for unit, out in zip(units, outputs):
        by_cell.setdefault((unit[0], unit[1]), []).append(out)
    for ds in config.datasets:
        for spec in config.samplers:
            outs = by_cell[(ds.id, spec)]
            errors = [e for _, _, e in outs if e is not None]
            good = [(v, h) for v, h, e in outs if e is None]
            for m in config.measures:
                auc_m, auc_s = _mean_std([v[m.value][0] for v, _ in good])
                pre_m, pre_s = _mean_std([v[m.value][1] for v, _ in good])
                results.append(ExperimentResult(
                    dataset=ds.id, sampler=spec.method.value, s_f=spec.s_f,
                    m=spec.m if spec.method is Method.FS else None,
                    p_f=spec.p_f if spec.method is Method.FF else None,
                    measure=m.value, reps=len(good), auc_mean=auc_m, auc_std=auc_s,
                    precision_mean=pre_m, precision_std=pre_s, failures=len(errors),
                    error=errors[0] if errors else None))
            if config.histograms and good:
                for kind in KINDS:
                    histograms[(ds.id, spec.label, kind)] = average_histograms(
                        [h[kind] for _, h in good])
            if errors:
                log.warning("%s / %s: %d of %d repetitions failed (%s)", ds.id, spec.label,
                            len(errors), len(outs), errors[0])
    return results, histograms


def _graphs(config: ExperimentConfig, graphs: dict[str, Graph] | None) -> dict[str, Graph]:
    graphs = dict(graphs or {})
    for ds in config.datasets:
        if ds.id not in graphs:
            graphs[ds.id] = load_dataset(ds)
    return graphs


def _check_samplers(config: ExperimentConfig, graphs: dict[str, Graph]) -> None:
    if not config.samplers:
        raise ConfigError("no samplers configured")
    for ds in config.datasets:
        n = graphs[ds.id].node_count
        for spec in config.samplers:
            if spec.method is Method.FS and spec.m > n:
                raise ConfigError(f"FS needs m <= |V| = {n} on {ds.id!r}, got m={spec.m}")


def run_with_histograms(config: ExperimentConfig, graphs: dict[str, Graph] | None = None):
    """Like `run_experiment`, also returning averaged probe histograms.

    Histograms are keyed by ``(dataset, sampler label, kind)`` and are only
    computed when ``config.histograms`` is set. ``config.histogram_degrees``
    selects full-graph (default) or training-graph degrees for ``e_pub`` and
    ``e_CN``.
    """
    graphs = _graphs(config, graphs)
    _check_samplers(config, graphs)
    return _execute(config, graphs)


def run_experiment(config: ExperimentConfig,
                   graphs: dict[str, Graph] | None = None) -> list[ExperimentResult]:
    """Run the repeated sample-and-evaluate protocol for every configured cell.

    Parameters
    ----------
    config : ExperimentConfig
    graphs : dict, optional
        Pre-loaded giant components keyed by dataset id; missing ones are
        loaded from their `DatasetSpec`.

    Returns
    -------
    list of ExperimentResult
        One per (dataset, sampler, measure), in config order. Sampler
        failures are counted per cell and do not abort the run.
    """
    return run_with_histograms(config, graphs)[0]


def run_sweep(config: ExperimentConfig, graphs: dict[str, Graph] | None = None
              ) -> list[ExperimentResult]:
    """One `run_experiment` per value of the configured FS ``m`` or FF ``p_f`` sweep.

    ``m`` values are capped at ``min(1000, |V|)`` as in the usual FS tuning
    range; a value above the cap is a configuration error.
    """
    sweep = config.sweep
    if sweep is None:
        raise ConfigError("config has no 'sweep' section")
    graphs = _graphs(config, graphs)
    if sweep.param == "m":
        for ds in config.datasets:
            cap = min(M_CAP, graphs[ds.id].node_count)
            over = [v for v in sweep.values if int(v) > cap]
            if over:
                raise ConfigError(
                    f"FS sweep values {over} exceed the cap min{{1000,|V|}} = {cap} on {ds.id!r}")
    results = []
    for value in sweep.values:
        if sweep.param == "m":
            spec = SamplerSpec(Method.FS, s_f=config.s_f, m=int(value))
        else:
            spec = SamplerSpec(Method.FF, s_f=config.s_f, p_f=float(value))
        results.extend(run_experiment(replace(config, samplers=(spec,), sweep=None), graphs))
    return results


# --- summaries ---------------------------------------------------------------

@dataclass(frozen=True)
class BestCell:
    dataset: str
    sampler: str
    winners: tuple[str, ...]
    best_auc: float


def best_measure_table(results: Iterable[ExperimentResult],
                       tie_tolerance: float = 0.005) -> list[BestCell]:
    """Measures whose mean AUC lies within ``tie_tolerance`` of each cell's best."""
    cells: dict[tuple[str, str], list[ExperimentResult]] = {}
    for r in results:
        cells.setdefault((r.dataset, r.sampler_label), []).append(r)
    order = {m.value: t for t, m in enumerate(MEASURES)}
    out = []
    for (ds, sampler), rs in cells.items():
        valid = [r for r in rs if not math.isnan(r.auc_mean)]
        if not valid:
            out.append(BestCell(ds, sampler, (), math.nan))
            continue
        best = max(r.auc_mean for r in valid)
        winners = sorted((r.measure for r in valid if r.auc_mean >= best - tie_tolerance),
                         key=lambda name: order.get(name, len(order)))
        out.append(BestCell(ds, sampler, tuple(winners), best))
    return out


def format_best_table(cells: Sequence[BestCell]) -> str:
    """Dataset rows by sampler columns, winners joined with ``/``."""
    datasets = list(dict.fromkeys(c.dataset for c in cells))
    samplers = list(dict.fromkeys(c.sampler for c in cells))
    lookup = {(c.dataset, c.sampler): "/".join(c.winners) or "-" for c in cells}
    rows = [["Data Set", *samplers]]
    rows += [[ds, *(lookup.get((ds, s), "") for s in samplers)] for ds in datasets]
    return _render(rows)


def _render(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
                     for r in rows)


def format_results_table(results: Sequence[ExperimentResult]) -> str:
    rows = [["dataset", "sampler", "measure", "reps", "AUC", "precision"]]
    for r in results:
        rows.append([r.dataset, r.sampler_label, r.measure, str(r.reps),
                     f"{r.auc_mean:.4f} ± {r.auc_std:.4f}",
                     f"{r.precision_mean:.4f} ± {r.precision_std:.4f}"])
    return _render(rows)


# --- output ------------------------------------------------------------------

def _nan_to_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def _result_record(r: ExperimentResult) -> dict:
    return {k: _nan_to_none(v) for k, v in asdict(r).items()}


def _hist_records(histograms: dict) -> list[dict]:
    return [{"dataset": ds, "sampler": sampler, **h.to_dict()}
            for (ds, sampler, _), h in histograms.items()]


def emit_results(results: Sequence[ExperimentResult], histograms: dict | None,
                 formats: Iterable[str], directory, config: ExperimentConfig | None = None,
                 stem: str = "results") -> list[Path]:
    """Write results (and histograms) as CSV and/or JSON under ``directory``.

    CSV: ``<stem>.csv`` with the fixed `CSV_HEADER`, plus ``<stem>_histograms.csv``
    when histograms are given. JSON: ``<stem>.json`` with the same records,
    the config echo, histogram bins and the library version.
    """
    directory = Path(directory)
    histograms = histograms or {}
    written = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for fmt in formats:
            if fmt == "csv":
                path = directory / f"{stem}.csv"
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(CSV_HEADER)
                    w.writerows(r.csv_row() for r in results)
                written.append(path)
                if histograms:
                    path = directory / f"{stem}_histograms.csv"
                    with open(path, "w", newline="", encoding="utf-8") as fh:
                        w = csv.writer(fh, lineterminator="\n")
                        w.writerow(("dataset", "sampler", "kind", "bin_lower", "bin_upper",
                                    "mass", "rep_count"))
                        for (ds, sampler, kind), h in histograms.items():
                            uppers = list(h.lower[1:]) + [""]
                            for lo, hi, mass in zip(h.lower, uppers, h.mass):
                                w.writerow((ds, sampler, kind, lo, hi, repr(mass), h.rep_count))
                    written.append(path)
            elif fmt == "json":
                path = directory / f"{stem}.json"
                doc = {
                    "library": "lpsampling",
                    "version": __version__,
                    "std": "population",
                    "config": config.to_dict() if config is not None else None,
                    "results": [_result_record(r) for r in results],
                    "histograms": _hist_records(histograms),
                }
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(doc, fh, indent=2, allow_nan=False)
                    fh.write("\n")
                written.append(path)
            else:
                raise ValueError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write results under {directory}: {exc}") from exc
    return written


def read_results_json(path) -> tuple[list[ExperimentResult], dict, dict | None]:
    """Inverse of the JSON branch of `emit_results`."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    results = [ExperimentResult(**{k: (math.nan if v is None and k in
                                       ("auc_mean", "auc_std", "precision_mean", "precision_std")
                                       else v) for k, v in rec.items()})
               for rec in doc["results"]]
    hists = {}
    for rec in doc.get("histograms", []):
        h = Histogram(rec["kind"], tuple(rec["lower"]), tuple(rec["mass"]), rec["rep_count"])
        hists[(rec["dataset"], rec["sampler"], rec["kind"])] = h
    return results, hists, doc.get("config")


# --- dataset statistics ------------------------------------------------------

@dataclass(frozen=True)
class StatsRow:
    dataset: str
    node_count: int | None = None
    edge_count: int | None = None
    avg_degree: float | None = None
    clustering: float | None = None
    heterogeneity: float | None = None
    error: str | None = None


def stats_report(datasets: Iterable) -> list[StatsRow]:
    """|V|, |E|, average degree, clustering and heterogeneity of each giant component.

    ``datasets`` may hold paths, `DatasetSpec` objects or ``(id, Graph)``
    pairs. Load failures become rows with ``error`` set.
    """
    rows = []
    for item in datasets:
        if isinstance(item, tuple):
            name, graph = item
            graph = giant_component(graph)
        else:
            spec = item if isinstance(item, DatasetSpec) else DatasetSpec.from_dict(
                {"path": os.fspath(item)})
            name = spec.id
            try:
                graph = load_dataset(spec)
            except ConfigError as exc:
                rows.append(StatsRow(name, error=str(exc)))
                continue
        s = stats(graph)
        rows.append(StatsRow(name, s.node_count, s.edge_count, s.avg_degree, s.clustering,
                             s.heterogeneity))
    return rows


def format_stats_table(rows: Sequence[StatsRow]) -> str:
    out = [["Data Set", "|V|", "|E|", "<k>", "C", "H"]]
    for r in rows:
        if r.error:
            out.append([r.dataset, f"error: {r.error}", "", "", "", ""])
        else:
            out.append([r.dataset, str(r.node_count), str(r.edge_count), f"{r.avg_degree:.2f}",
                        f"{r.clustering:.2f}", f"{r.heterogeneity:.2f}"])
    return _render(out)
