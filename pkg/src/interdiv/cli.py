"""``interdiv`` command-line front end.

Exit status: 0 success, 2 configuration error, 3 data error, 4 network
error, 5 internal error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import logging
import math
import os
import sys

from interdiv import __version__, analysis, corpus as corpus_mod, export, metrics, openalex, svgchart
from interdiv.errors import ConfigError, DataError, InterdivError
from interdiv.taxonomy import DOMAINS, FIELDS, N_FIELDS, N_SDGS, SDGS

logger = logging.getLogger("interdiv")

SUBCOMMANDS = (
    "fetch", "distances", "pub-index", "field-trend", "sdg-shares",
    "sdg-trend", "idr-share", "regress", "plot",
)

DEFAULTS = {
    "output": ".",
    "years": "1970:2022",
    "threshold": 0.5,
    "axis": "per-sdg",
    "format": "csv",
    "no_meta": False,
    "what": "corpus",
    "max_records": 1000,
    "per_page": 200,
    "workers": 4,
    "split_year": 2000,
    "alpha": 0.001,
    "mode": "yearly-mean",
    "kind": "auto",
    "width": 960,
    "height": 540,
    "palette_seed": 0,
}
_INTS = {"sdg", "field", "max_records", "per_page", "workers", "split_year", "width", "height", "palette_seed"}
_FLOATS = {"threshold", "alpha"}
_BOOLS = {"no_meta", "verbose"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="interdiv", description="Interdisciplinarity and SDG contribution analytics.")
    p.add_argument("--version", action="version", version=f"interdiv {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--input", help="input file (corpus CSV, term-count CSV, or series CSV for plot)")
    p.add_argument("--output", help="output directory (default: current directory)")
    p.add_argument("--years", help="inclusive year range A:B (default 1970:2022)")
    p.add_argument("--sdg", type=int, help="SDG number 1-17")
    p.add_argument("--field", type=int, help="field number 1-19")
    p.add_argument("--threshold", type=float, help="SDG score threshold for sdg-trend (default 0.5)")
    p.add_argument("--axis", choices=("per-field", "per-sdg"), help="share normalization axis")
    p.add_argument("--format", choices=("csv", "json", "svg"), help="output format")
    p.add_argument("--mailto", help=f"contact email for the OpenAlex polite pool (or ${openalex.MAILTO_ENV})")
    p.add_argument("--no-meta", action="store_true", default=None, help="omit the metadata header line")
    p.add_argument("--config", help="key = value file supplying any option; flags take precedence")
    p.add_argument("--verbose", "-v", action="store_true", default=None)
    g = p.add_argument_group("fetch")
    g.add_argument("--what", choices=("corpus", "terms"), help="fetch a corpus or term counts")
    g.add_argument("--fixtures", help="replay recorded responses from this directory")
    g.add_argument("--record", help="record live responses into this directory")
    g.add_argument("--max-records", type=int, help="records per field and year (default 1000)")
    g.add_argument("--per-page", type=int, help="works per API page, 1-200 (default 200)")
    g.add_argument("--workers", type=int, help="concurrent requests / year workers (default 4)")
    g = p.add_argument_group("pipelines")
    g.add_argument("--distances", help="pub-index: directory of distances_YYYY.csv files to use")
    g.add_argument("--pub-index", help="field-trend: build from a pub-index CSV instead of the corpus")
    g.add_argument("--split-year", type=int, help="regress: first year of the later window (default 2000)")
    g.add_argument("--alpha", type=float, help="regress: significance level (default 0.001)")
    g.add_argument("--mode", choices=("yearly-mean", "pooled"), help="regress: regression granularity")
    g = p.add_argument_group("plot")
    g.add_argument("--kind", choices=("auto", "line", "stacked"), help="chart type")
    g.add_argument("--title")
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--palette-seed", type=int)
    return p


def read_config_file(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _coerce(key, value):
    if not isinstance(value, str):
        return value
    try:
        if key in _INTS:
            return int(value)
        if key in _FLOATS:
            return float(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
    if key in _BOOLS:
        return value.strip().lower() in ("1", "true", "yes", "on")
    return value


def resolve_config(args):
    """Merge flags over config-file values over defaults; validate."""
    cfg = dict(DEFAULTS)
    if args.config:
        file_values = read_config_file(args.config)
        known = set(vars(args))
        for key, value in file_values.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, value)
    for key, value in vars(args).items():
        if value is not None:
            cfg[key] = value
    cfg.setdefault("mailto", None)
    if not cfg.get("mailto"):
        cfg["mailto"] = os.environ.get(openalex.MAILTO_ENV)
    cfg["year_range"] = parse_years(cfg["years"])
    if not 0.0 <= float(cfg["threshold"]) <= 1.0:
        raise ConfigError(f"threshold {cfg['threshold']} outside [0, 1]")
    if cfg.get("sdg") is not None and not 1 <= cfg["sdg"] <= N_SDGS:
        raise ConfigError(f"--sdg must lie in 1..{N_SDGS}")
    if cfg.get("field") is not None and not 1 <= cfg["field"] <= N_FIELDS:
        raise ConfigError(f"--field must lie in 1..{N_FIELDS}")
    if not 1 <= cfg["per_page"] <= 200:
        raise ConfigError("--per-page must lie in 1..200")
    if cfg["max_records"] < 1:
        raise ConfigError("--max-records must be >= 1")
    if cfg["axis"] not in ("per-field", "per-sdg"):
        raise ConfigError(f"invalid axis {cfg['axis']!r}")
    if cfg["format"] not in ("csv", "json", "svg"):
        raise ConfigError(f"invalid format {cfg['format']!r}")
    return cfg


def parse_years(text):
    try:
        a, b = (int(v) for v in str(text).split(":"))
    except ValueError:
        raise ConfigError(f"--years must look like A:B, got {text!r}") from None
    if a > b:
        raise ConfigError(f"empty year range {text!r}")
    return a, b


# --- helpers --------------------------------------------------------------

def _sha256(paths):
    h = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    return h.hexdigest()


def _meta(cfg, inputs=(), **extra):
    if cfg["no_meta"]:
        return None
    meta = {"tool": f"interdiv {__version__}", "command": cfg["subcommand"]}
    if inputs:
        meta["input_sha256"] = _sha256(inputs)
    meta.update(extra)
    return meta


def _require_input(cfg):
    path = cfg.get("input")
    if not path:
        raise ConfigError(f"{cfg['subcommand']} needs --input")
    if not os.path.exists(path):
        raise ConfigError(f"input {path} does not exist")
    return path


def _outdir(cfg):
    out = cfg["output"]
    os.makedirs(out, exist_ok=True)
    return out


def _table_format(cfg):
    return "json" if cfg["format"] == "json" else "csv"


def _write_table(cfg, stem, columns, rows, meta):
    fmt = _table_format(cfg)
    path = os.path.join(_outdir(cfg), f"{stem}.{fmt}")
    export.export_series(columns, rows, path, fmt, meta)
    return path


def _write_svg(cfg, stem, spec, meta):
    if meta:
        spec = dataclasses.replace(spec, extra={"comments": [export.meta_line(meta)[2:]]})
    text = svgchart.render_chart(spec)
    path = os.path.join(_outdir(cfg), f"{stem}.svg")
    try:
        corpus_mod.atomic_write_text(path, text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    return path


def _load_corpus(cfg):
    path = _require_input(cfg)
    corpus = corpus_mod.load_corpus_csv(path)
    start, end = cfg["year_range"]
    restricted, _ = corpus_mod.restrict_years(corpus, start, end)
    return path, restricted


_FIELD_COLS = [f"discip{k}" for k in range(1, N_FIELDS + 1)]


# --- subcommands ----------------------------------------------------------

def cmd_fetch(cfg):
    if cfg.get("fixtures"):
        transport = openalex.FixtureTransport(cfg["fixtures"])
        limiter = openalex.RateLimiter(per_second=0)
    else:
        transport = openalex.HttpTransport()
        limiter = openalex.RateLimiter()
    if cfg.get("record"):
        transport = openalex.RecordingTransport(transport, cfg["record"])
    client = openalex.Client(transport, mailto=cfg["mailto"], rate_limiter=limiter,
                             max_workers=cfg["workers"])
    start, end = cfg["year_range"]
    years = range(start, end + 1)
    meta = _meta(cfg, retrieved=openalex.retrieval_date())
    line = export.meta_line(meta)
    out = _outdir(cfg)
    if cfg["what"] == "terms":
        rows = openalex.fetch_term_counts(years, client)
        path = os.path.join(out, "term_counts.csv")
        corpus_mod.atomic_write_text(path, corpus_mod.term_counts_to_text(rows, line))
    else:
        fields = [cfg["field"]] if cfg.get("field") else range(1, N_FIELDS + 1)
        fetched = openalex.fetch_corpus(fields, years, client, max_records=cfg["max_records"],
                                       per_page=cfg["per_page"])
        path = os.path.join(out, "corpus.csv")
        corpus_mod.write_corpus_csv(fetched, path, meta_line=line)
    return [path]


def cmd_distances(cfg):
    path, corpus = _load_corpus(cfg)
    meta = _meta(cfg, [path])
    written = []
    for r in analysis.year_results(corpus, cfg["year_range"], workers=cfg["workers"]):
        rows = [
            {"field": _FIELD_COLS[a], **{_FIELD_COLS[b]: float(r.matrix.entries[a, b]) for b in range(N_FIELDS)}}
            for a in range(N_FIELDS)
        ]
        written.append(_write_table(cfg, f"distances_{r.year}", ["field"] + _FIELD_COLS, rows, meta))
    if not written:
        raise DataError("no records in the requested year range")
    return written


def load_distance_matrix(path, year=None):
    columns, rows = export.read_table(path)
    if columns != ["field"] + _FIELD_COLS or len(rows) != N_FIELDS:
        raise DataError(f"{path}: not a {N_FIELDS}x{N_FIELDS} distance table")
    entries = [[float(row[c]) for c in _FIELD_COLS] for row in rows]
    return metrics.DistanceMatrix(entries, year=year)


def _pub_index_rows(cfg, corpus):
    rows = []
    start, end = cfg["year_range"]
    for year in range(start, end + 1):
        ys = corpus_mod.slice_by_year(corpus, year)
        if len(ys) == 0:
            continue
        if cfg.get("distances"):
            fmt = _table_format(cfg)
            dpath = os.path.join(cfg["distances"], f"distances_{year}.{fmt}")
            if not os.path.exists(dpath):
                raise DataError(f"missing distance table {dpath}")
            matrix = load_distance_matrix(dpath, year)
        else:
            matrix = metrics.build_distance_matrix(ys)
        deltas, valid = metrics.publication_deltas(ys.field_scores, matrix)
        for i in range(len(ys)):
            if not valid[i]:
                continue
            positive = [str(a + 1) for a in range(ys.n_fields) if ys.field_scores[i, a] > 0]
            rows.append({
                "idwork": ys.work_ids[i], "pyear": year, "citation": int(ys.citations[i]),
                "delta": float(deltas[i]), "fields": ";".join(positive),
            })
    return rows


def cmd_pub_index(cfg):
    path, corpus = _load_corpus(cfg)
    inputs = [path]
    if cfg.get("distances"):
        inputs += sorted(
            os.path.join(cfg["distances"], f) for f in os.listdir(cfg["distances"]) if f.startswith("distances_")
        )
    rows = _pub_index_rows(cfg, corpus)
    columns = ["idwork", "pyear", "citation", "delta", "fields"]
    return [_write_table(cfg, "pub_index", columns, rows, _meta(cfg, inputs))]


def _field_trend_rows(cfg):
    fields = [cfg["field"]] if cfg.get("field") else list(range(1, N_FIELDS + 1))
    if cfg.get("pub_index"):
        _, table = export.read_table(cfg["pub_index"])
        parsed = [
            (int(r["pyear"]), float(r["delta"]), {int(f) for f in r["fields"].split(";") if f})
            for r in table
        ]
        series = {f: analysis.field_trend_from_publication_index(parsed, f, cfg["year_range"]) for f in fields}
        inputs = [cfg["pub_index"]]
    else:
        path, corpus = _load_corpus(cfg)
        series = analysis.field_trends(corpus, cfg["year_range"], fields=fields, workers=cfg["workers"])
        inputs = [path]
    rows = [
        {"field": p.field, "year": p.year, "delta": p.delta, "n_pubs": p.n_pubs}
        for f in fields for p in series[f]
    ]
    return rows, inputs


def cmd_field_trend(cfg):
    rows, inputs = _field_trend_rows(cfg)
    meta = _meta(cfg, inputs)
    if cfg["format"] == "svg":
        return [_write_svg(cfg, "field_trend", chart_from_long(rows, "field", "delta", FIELDS,
                                                               "Interdisciplinarity index", cfg), meta)]
    return [_write_table(cfg, "field_trend", ["field", "year", "delta", "n_pubs"], rows, meta)]


def cmd_sdg_shares(cfg):
    path, corpus = _load_corpus(cfg)
    sdgs = [cfg["sdg"]] if cfg.get("sdg") else list(range(1, N_SDGS + 1))
    meta = _meta(cfg, [path])
    written = []
    for m in sdgs:
        s = analysis.sdg_share_series(corpus, m, cfg["year_range"], cfg["axis"])
        rows = [{"year": y, **{c: float(v) for c, v in zip(_FIELD_COLS, s.shares[i])}}
                for i, y in enumerate(s.years)]
        stem = f"sdg_shares_sdg{m}_{cfg['axis']}"
        if cfg["format"] == "svg":
            kind = "stacked" if cfg["axis"] == "per-sdg" else "line"
            spec = chart_from_wide(rows, kind, f"SDG {m}: {SDGS[m - 1]}", "Share", cfg)
            written.append(_write_svg(cfg, stem, spec, meta))
        else:
            path = _write_table(cfg, stem, ["year"] + _FIELD_COLS, rows, meta)
            if cfg["axis"] == "per-sdg":
                verify_share_table(path)
            written.append(path)
    return written


def verify_share_table(path, tol=1e-9):
    """Re-read a written per-sdg share table and check every year sums to 1."""
    _, rows = export.read_table(path)
    for row in rows:
        total = math.fsum(float(row[c]) for c in _FIELD_COLS)
        if abs(total - 1.0) > tol:
            raise DataError(f"{path}: shares for year {row['year']} sum to {total!r}, not 1")


def cmd_sdg_trend(cfg):
    path, corpus = _load_corpus(cfg)
    sdgs = [cfg["sdg"]] if cfg.get("sdg") else list(range(1, N_SDGS + 1))
    results = analysis.year_results(corpus, cfg["year_range"], workers=cfg["workers"])
    rows = []
    for m in sdgs:
        for p in analysis.sdg_interdisciplinarity_series(corpus, m, cfg["year_range"], cfg["threshold"],
                                                         results=results):
            rows.append({"sdg": p.sdg, "year": p.year, "weighted_delta": p.weighted_delta,
                         "total_weight": p.total_weight, "n_pubs": p.n_pubs})
    meta = _meta(cfg, [path], threshold=cfg["threshold"])
    if cfg["format"] == "svg":
        names = [f"SDG {i + 1}" for i in range(N_SDGS)]
        return [_write_svg(cfg, "sdg_trend", chart_from_long(rows, "sdg", "weighted_delta", names,
                                                             "Weighted interdisciplinarity index", cfg), meta)]
    columns = ["sdg", "year", "weighted_delta", "total_weight", "n_pubs"]
    return [_write_table(cfg, "sdg_trend", columns, rows, meta)]


def cmd_idr_share(cfg):
    path = _require_input(cfg)
    series = analysis.idr_share_series(corpus_mod.load_term_counts_csv(path))
    labels = ["all"] + [f"domain{a}" for a in range(1, len(DOMAINS) + 1)]
    by_year = {}
    for label in labels:
        for year, pct in series.get(label, []):
            by_year.setdefault(year, {"year": year})[label] = pct
    rows = [by_year[y] for y in sorted(by_year)]
    meta = _meta(cfg, [path])
    if cfg["format"] == "svg":
        spec = chart_from_wide(rows, "line", "Term prevalence", "% of works", cfg,
                               names={"all": "All", **{f"domain{a + 1}": d for a, d in enumerate(DOMAINS)}})
        return [_write_svg(cfg, "idr_share", spec, meta)]
    return [_write_table(cfg, "idr_share", ["year"] + labels, rows, meta)]


def cmd_regress(cfg):
    path, corpus = _load_corpus(cfg)
    counts = analysis.count_significant_trends(
        corpus, split_year=cfg["split_year"], year_range=cfg["year_range"], alpha=cfg["alpha"],
        mode=cfg["mode"], workers=cfg["workers"],
    )
    rows = []
    for f, fits in counts.detail.items():
        for window in ("pre", "post"):
            fit = fits[window]
            rows.append({"field": f, "window": window, "slope": fit.slope, "intercept": fit.intercept,
                         "p_value": fit.p_value, "r_squared": fit.r_squared, "year_start": fit.year_range[0],
                         "year_end": fit.year_range[1], "n": fit.n})
    meta = _meta(cfg, [path], split_year=cfg["split_year"], alpha=cfg["alpha"], mode=cfg["mode"])
    columns = ["field", "window", "slope", "intercept", "p_value", "r_squared", "year_start", "year_end", "n"]
    written = [_write_table(cfg, "regress", columns, rows, meta)]
    summary = [{"n_declining_pre": counts.n_declining_pre, "n_rising_post": counts.n_rising_post,
                "split_year": cfg["split_year"], "alpha": cfg["alpha"]}]
    written.append(_write_table(cfg, "regress_summary", list(summary[0]), summary, meta))
    print(f"declining before {cfg['split_year']}: {counts.n_declining_pre}; "
          f"rising from {cfg['split_year']}: {counts.n_rising_post}")
    return written


def _chart_kw(cfg):
    return {"width": cfg["width"], "height": cfg["height"], "palette_seed": cfg["palette_seed"]}


def chart_from_wide(rows, kind, title, y_label, cfg, names=None):
    if not rows:
        raise DataError("empty series: nothing to plot")
    columns = [c for c in rows[0] if c != "year"]
    for row in rows:
        columns += [c for c in row if c != "year" and c not in columns]
    xs = tuple(float(r["year"]) for r in rows)
    series = []
    for c in columns:
        ys = tuple(None if r.get(c) in (None, "") else float(r[c]) for r in rows)
        if kind == "stacked" and not any(ys):
            continue
        label = (names or {}).get(c)
        if label is None and c.startswith("discip"):
            label = FIELDS[int(c[6:]) - 1]
        series.append(svgchart.ChartSeries(label or c, xs, ys))
    return svgchart.ChartSpec(kind, tuple(series), y_label=y_label,
                              title=cfg.get("title") or title, **_chart_kw(cfg))


def chart_from_long(rows, group, value, names, y_label, cfg):
    if not rows:
        raise DataError("empty series: nothing to plot")
    groups = {}
    for r in rows:
        groups.setdefault(int(float(r[group])), []).append((float(r["year"]), float(r[value])))
    series = []
    for g in sorted(groups):
        pts = groups[g]
        series.append(svgchart.ChartSeries(names[g - 1], tuple(p[0] for p in pts), tuple(p[1] for p in pts)))
    return svgchart.ChartSpec("line", tuple(series), y_label=y_label, title=cfg.get("title") or "",
                              **_chart_kw(cfg))


def cmd_plot(cfg):
    path = _require_input(cfg)
    columns, rows = export.read_table(path)
    if not rows:
        raise DataError(f"empty series in {path}: nothing to plot")
    kind = cfg["kind"]
    if "field" in columns and "delta" in columns:
        spec = chart_from_long(rows, "field", "delta", FIELDS, "Interdisciplinarity index", cfg)
    elif "sdg" in columns and "weighted_delta" in columns:
        spec = chart_from_long(rows, "sdg", "weighted_delta", [f"SDG {i + 1}" for i in range(N_SDGS)],
                               "Weighted interdisciplinarity index", cfg)
    elif "year" in columns:
        if kind == "auto":
            kind = "stacked" if "per-sdg" in os.path.basename(path) else "line"
        spec = chart_from_wide(rows, kind, "", "", cfg)
    else:
        raise DataError(f"{path}: cannot find a year column to plot")
    if kind == "stacked" and spec.kind != "stacked":
        spec = dataclasses.replace(spec, kind="stacked")
    stem = os.path.splitext(os.path.basename(path))[0]
    return [_write_svg(cfg, stem, spec, _meta(cfg, [path]))]


COMMANDS = {
    "fetch": cmd_fetch,
    "distances": cmd_distances,
    "pub-index": cmd_pub_index,
    "field-trend": cmd_field_trend,
    "sdg-shares": cmd_sdg_shares,
    "sdg-trend": cmd_sdg_trend,
    "idr-share": cmd_idr_share,
    "regress": cmd_regress,
    "plot": cmd_plot,
}


def run(argv=None):
    """Parse ``argv`` and execute; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        logging.basicConfig(level=logging.INFO if cfg.get("verbose") else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        written = COMMANDS[cfg["subcommand"]](cfg)
    except InterdivError as exc:
        print(f"interdiv: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"interdiv: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        print(f"interdiv: internal error: {exc!r}", file=sys.stderr)
        return 5
    for path in written:
        logger.info("wrote %s", path)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
