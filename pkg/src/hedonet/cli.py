"""Command-line pipeline: build window artifacts, then run analyses over them."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from . import __version__
from .assortativity import (
    AssortativityError,
    correlate,
    happiness_by_degree,
    null_from_pairs,
    partition_by_degree,
    scored_pairs_multi,
)
from .graph import build_reciprocal, ccdf, compute_stats, export_graph, read_edges, write_edges
from .hedonometer import (
    HedonometerError,
    WordBag,
    aggregate,
    bags_from_lines,
    score_bags,
    similarity_null,
    word_shift,
    word_shift_summary,
)
from .ingest import (
    DEFAULT_ANCHOR,
    Granularity,
    WindowSpec,
    estimate_coverage,
    iter_texts,
    read_records,
    window_partition,
    write_replies,
    write_texts,
)
from .lexicon import Lexicon, LexiconError, filter_stop_words, load_lexicon
from .powerlaw import PowerLawError, fit_discrete_powerlaw, gof_pvalue

log = logging.getLogger("hedonet")

SCHEMA_VERSION = 1
MANIFEST = "manifest.json"
SEED_MAX = 2**64 - 1

EXIT_INPUT = 3
EXIT_PARAMETER = 4
EXIT_ANALYSIS = 5


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _param_error(message: str) -> CliError:
    return CliError("invalid_parameter", message, EXIT_PARAMETER)


def _missing(message: str) -> CliError:
    return CliError("missing_artifact", message, EXIT_INPUT)


# ---------------------------------------------------------------- config


@dataclass
class RunConfig:
    command: str
    inputs: list[Path] = field(default_factory=list)
    input_format: str | None = None
    window: Granularity = Granularity.WEEK
    anchor: date = DEFAULT_ANCHOR
    lexicon: Path | None = None
    delta_h: float = 1.0
    alpha: int = 50
    hops: list[int] = field(default_factory=lambda: [1, 2, 3])
    permutations: int = 100
    bootstrap: int = 1000
    seed: int | None = None
    out: Path = Path("hedonet-out")
    exclude_words: list[str] = field(default_factory=list)
    windows: list[int] | None = None
    extra: dict = field(default_factory=dict)

    def parameters(self, *names: str) -> dict:
        out = {}
        for name in names:
            value = getattr(self, name)
            if isinstance(value, Path):
                value = value.name
            elif isinstance(value, Granularity):
                value = value.value
            elif isinstance(value, date):
                value = value.isoformat()
            out[name] = value
        return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _anchor(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"anchor must be YYYY-MM-DD, got {text!r}") from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--input", action="append", type=Path, default=[], help="message stream (JSONL or TSV); repeatable")
    g.add_argument("--input-format", choices=["jsonl", "tsv"], help="override format detection by file extension")
    g.add_argument("--window", choices=[x.value for x in Granularity], default="week")
    g.add_argument("--anchor", type=_anchor, default=DEFAULT_ANCHOR, help="start of window 0, YYYY-MM-DD (UTC)")
    g.add_argument("--lexicon", type=Path, help="labMT word list (TSV)")
    g.add_argument("--delta-h", type=float, default=1.0, help="half-width of the excluded neutral band")
    g.add_argument("--alpha", type=int, default=50, help="minimum lexicon words per scored user")
    g.add_argument("--hops", type=_int_list, default=[1, 2, 3], help="distances, e.g. 1,2,3")
    g.add_argument("--permutations", type=int, default=100)
    g.add_argument("--bootstrap", type=int, default=1000)
    g.add_argument("--seed", type=_seed, help="64-bit seed; required by stochastic commands")
    g.add_argument("--out", type=Path, default=Path("hedonet-out"), help="artifact and report directory")
    g.add_argument("--exclude-words", type=lambda s: [w.strip().lower() for w in s.split(",") if w.strip()], default=[])
    g.add_argument("--windows", type=_int_list, help="restrict to these window indices")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="hedonet", description="Reciprocal-reply network happiness analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("build", "partition input into windows and write reply, text and network artifacts")
    add("stats", "network statistics and degree CCDF per window")
    p = add("happiness", "per-user happiness scores and the degree profile")
    p.add_argument("--bin-edges", type=_int_list, help="degree bin lower edges (default 1,2,4,...,2048)")
    p = add("assort", "happiness correlation across exact-distance pairs")
    p.add_argument("--pairs-csv", action="store_true", help="also write (h_u, h_v) pairs per window and distance")
    add("nullmodel", "score-permutation null model for the happiness correlation")
    add("powerlaw", "discrete power-law fit of the degree distribution with bootstrap p-value")
    p = add("wordshift", "word shift between low- and high-degree users")
    p.add_argument("--degree-split", type=int, default=100, help="reference group has degree below this value")
    p.add_argument("--top", type=int, default=0, help="keep only the N largest contributions in the CSV (0 = all)")
    add("similarity", "word-bag similarity across edges against a bag-permutation null")
    add("coverage", "sample coverage per window")
    p = add("sweep", "rerun the correlation over a range of alpha or delta-h values")
    p.add_argument("--parameter", choices=["alpha", "delta_h"], required=True)
    p.add_argument("--values", type=_float_list, required=True)
    p = add("export", "write networks as CSV edge lists or GEXF")
    p.add_argument("--export-format", choices=["edge_csv", "gexf"], default="edge_csv")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = {
        "input",
        "input_format",
        "window",
        "anchor",
        "lexicon",
        "delta_h",
        "alpha",
        "hops",
        "permutations",
        "bootstrap",
        "seed",
        "out",
        "exclude_words",
        "windows",
        "command",
        "verbose",
    }
    cfg = RunConfig(
        command=ns.command,
        inputs=list(ns.input),
        input_format=ns.input_format,
        window=Granularity(ns.window),
        anchor=ns.anchor,
        lexicon=ns.lexicon,
        delta_h=ns.delta_h,
        alpha=ns.alpha,
        hops=sorted(set(ns.hops)),
        permutations=ns.permutations,
        bootstrap=ns.bootstrap,
        seed=ns.seed,
        out=ns.out,
        exclude_words=ns.exclude_words,
        windows=ns.windows,
        extra={k: v for k, v in vars(ns).items() if k not in base},
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.delta_h < 0 or cfg.delta_h >= 4:
        raise _param_error("--delta-h must lie in [0, 4)")
    if cfg.alpha < 1:
        raise _param_error("--alpha must be >= 1")
    if not cfg.hops or any(d not in (1, 2, 3) for d in cfg.hops):
        raise _param_error("--hops values must be 1, 2 or 3")
    if cfg.permutations < 1:
        raise _param_error("--permutations must be >= 1")
    if cfg.bootstrap != 0 and cfg.bootstrap < 100:
        raise _param_error("--bootstrap must be 0 (fit only) or >= 100")
    stochastic = cfg.command in ("nullmodel", "similarity") or (cfg.command == "powerlaw" and cfg.bootstrap > 0)
    if stochastic and cfg.seed is None:
        raise _param_error(f"{cfg.command} needs --seed")
    if cfg.command == "sweep":
        values = cfg.extra["values"]
        if not values:
            raise _param_error("--values must not be empty")
        if cfg.extra["parameter"] == "alpha" and any(v < 1 or v != int(v) for v in values):
            raise _param_error("alpha sweep values must be integers >= 1")
        if cfg.extra["parameter"] == "delta_h" and any(not 0 <= v < 4 for v in values):
            raise _param_error("delta_h sweep values must lie in [0, 4)")
    if cfg.command == "wordshift" and cfg.extra["degree_split"] < 2:
        raise _param_error("--degree-split must be >= 2")


# ---------------------------------------------------------------- output


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


@contextmanager
def atomic_file(path: Path) -> Iterator[Path]:
    """Yield a temporary sibling path that replaces ``path`` on success."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_text(path: Path, text: str) -> None:
    with atomic_file(path) as tmp:
        tmp.write_text(text, encoding="utf-8")


def write_json(path: Path, payload: dict) -> None:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    write_text(path, json.dumps(_clean(body), sort_keys=True, indent=2, allow_nan=False) + "\n")


def write_csv(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    write_text(path, buf.getvalue())


# ---------------------------------------------------------------- artifacts


def _load_manifest(cfg: RunConfig) -> dict:
    path = cfg.out / MANIFEST
    if not path.exists():
        raise _missing(f"{path} not found; run 'hedonet build' first")
    return json.loads(path.read_text(encoding="utf-8"))


def _selected_windows(cfg: RunConfig, manifest: dict) -> list[int]:
    available = [w["index"] for w in manifest["windows"]]
    if cfg.windows is None:
        return available
    missing = sorted(set(cfg.windows) - set(available))
    if missing:
        raise _missing(f"windows not in manifest: {missing}")
    return sorted(set(cfg.windows))


def _artifact(cfg: RunConfig, stem: str, w: int, ext: str) -> Path:
    path = cfg.out / f"{stem}-{w}.{ext}"
    return path


def _graph(cfg: RunConfig, w: int):
    path = _artifact(cfg, "net", w, "edges")
    if not path.exists():
        raise _missing(f"{path} not found")
    return read_edges(path)


def _lexicon(cfg: RunConfig, delta_h: float | None = None) -> Lexicon:
    if cfg.lexicon is None:
        raise _param_error(f"{cfg.command} needs --lexicon")
    if not cfg.lexicon.exists():
        raise _missing(f"lexicon {cfg.lexicon} not found")
    try:
        lex = load_lexicon(cfg.lexicon)
    except LexiconError as exc:
        raise CliError("invalid_lexicon", str(exc), EXIT_INPUT) from None
    return filter_stop_words(lex, cfg.delta_h if delta_h is None else delta_h)


def _bags(cfg: RunConfig, w: int, lex: Lexicon) -> dict[int, WordBag]:
    path = _artifact(cfg, "texts", w, "tsv")
    if not path.exists():
        raise _missing(f"{path} not found")
    return bags_from_lines(iter_texts(path), lex, w)


def _window_keyed(results: dict[int, dict]) -> dict[str, dict]:
    return {str(w): results[w] for w in sorted(results)}


# ---------------------------------------------------------------- commands


def cmd_build(cfg: RunConfig) -> dict:
    if not cfg.inputs:
        raise _param_error("build needs --input")
    for path in cfg.inputs:
        if not path.exists():
            raise _missing(f"input {path} not found")
    spec = WindowSpec(cfg.window, cfg.anchor)

    def records():
        for path in cfg.inputs:
            yield from read_records(path, cfg.input_format)

    try:
        part = window_partition(records(), spec)
    except OSError as exc:
        raise CliError("unreadable_input", str(exc), EXIT_INPUT) from None
    cfg.out.mkdir(parents=True, exist_ok=True)
    windows = []
    for store in part.sorted_windows():
        w = store.index
        g = build_reciprocal((np.frombuffer(store.reply_from, dtype=np.uint64), np.frombuffer(store.reply_to, dtype=np.uint64)))
        files = {
            "replies": f"replies-{w}.tsv",
            "texts": f"texts-{w}.tsv",
            "network": f"net-{w}.edges",
        }
        with atomic_file(cfg.out / files["replies"]) as tmp:
            write_replies(store, tmp)
        with atomic_file(cfg.out / files["texts"]) as tmp:
            write_texts(store, tmp)
        with atomic_file(cfg.out / files["network"]) as tmp:
            write_edges(g, tmp)
        windows.append(
            {
                "index": w,
                "start": spec.window_start(w).isoformat(),
                "n_messages": store.n_messages,
                "n_replies": store.n_replies,
                "n_authors": len(store.texts),
                "n_nodes": g.n_nodes,
                "n_edges": g.n_edges,
                "coverage": estimate_coverage(store).to_dict(),
                "files": files,
            }
        )
        store.texts.clear()
    report = {
        "command": "build",
        "parameters": {**cfg.parameters("window", "anchor"), "inputs": [p.name for p in cfg.inputs]},
        "n_input": part.n_input,
        "n_replies": part.n_replies,
        "n_non_replies": part.n_non_replies,
        "skipped": dict(sorted(part.skips.items())),
        "windows": windows,
    }
    write_json(cfg.out / MANIFEST, report)
    return report


def cmd_stats(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    results = {}
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        results[w] = compute_stats(g).to_dict()
        if g.n_nodes:
            write_csv(_artifact(cfg, "degree-ccdf", w, "csv"), ["k", "ccdf"], ccdf(g.degrees()))
    report = {"command": "stats", "parameters": {}, "windows": _window_keyed(results)}
    write_json(cfg.out / "stats.json", report)
    return report


def cmd_happiness(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    lex = _lexicon(cfg)
    bin_edges = cfg.extra.get("bin_edges")
    results = {}
    for w in _selected_windows(cfg, manifest):
        bags = _bags(cfg, w, lex)
        scores = score_bags(bags, lex)
        rows = sorted(scores.values(), key=lambda s: s.user_id)
        with atomic_file(_artifact(cfg, "scores", w, "tsv")) as tmp, open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("user_id\twindow_index\th\tlabmt_word_count\n")
            for s in rows:
                fh.write(f"{s.user_id}\t{s.window_index}\t{s.h!r}\t{s.labmt_word_count}\n")
        g = _graph(cfg, w)
        try:
            profile = happiness_by_degree(g, scores, bin_edges, cfg.alpha) if bin_edges else happiness_by_degree(g, scores, alpha=cfg.alpha)
        except AssortativityError as exc:
            raise _param_error(str(exc)) from None
        write_csv(
            _artifact(cfg, "happiness-by-degree", w, "csv"),
            ["k_lower", "k_upper", "mean_h", "n_unique_users"],
            ([r["k_lower"], r["k_upper"], r["mean_h"], r["n_unique_users"]] for r in profile),
        )
        hs = np.array([s.h for s in rows])
        total = aggregate(bags.values())
        window_h = None
        if total:
            window_h = sum(lex.scores[w_] * f for w_, f in total.items()) / sum(total.values())
        results[w] = {
            "n_scored_users": len(rows),
            "n_users_alpha": int(sum(s.labmt_word_count >= cfg.alpha for s in rows)),
            "mean_user_h": float(hs.mean()) if hs.size else None,
            "window_h": window_h,
            "lexicon_words_used": int(sum(total.values())),
            "by_degree": profile,
        }
    report = {
        "command": "happiness",
        "parameters": {**cfg.parameters("delta_h", "alpha", "lexicon"), "lexicon_size": len(lex)},
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "happiness.json", report)
    return report


def _assort_window(cfg: RunConfig, w: int, lex: Lexicon, alpha: int, pairs_csv: bool = False) -> dict:
    g = _graph(cfg, w)
    scores = score_bags(_bags(cfg, w, lex), lex)
    sets = scored_pairs_multi(g, scores, cfg.hops, alpha)
    out = {}
    for d, ps in sets.items():
        res = correlate(ps).to_dict()
        res["n_users_qualifying"] = ps.n_users_qualifying
        out[str(d)] = res
        if pairs_csv:
            write_csv(cfg.out / f"pairs-{w}-d{d}.csv", ["h_u", "h_v"], ps.pairs.tolist())
    return out


def cmd_assort(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    lex = _lexicon(cfg)
    results = {
        w: _assort_window(cfg, w, lex, cfg.alpha, cfg.extra.get("pairs_csv", False))
        for w in _selected_windows(cfg, manifest)
    }
    report = {
        "command": "assort",
        "parameters": cfg.parameters("delta_h", "alpha", "hops", "lexicon"),
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "assort.json", report)
    return report


def cmd_nullmodel(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    lex = _lexicon(cfg)
    results = {}
    failures = []
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        scores = score_bags(_bags(cfg, w, lex), lex)
        per_hop = {}
        for d, ps in scored_pairs_multi(g, scores, cfg.hops, cfg.alpha).items():
            try:
                per_hop[str(d)] = null_from_pairs(ps, cfg.permutations, cfg.seed).to_dict()
            except AssortativityError as exc:
                per_hop[str(d)] = {"error": str(exc)}
                failures.append((w, d))
        results[w] = per_hop
    if results and len(failures) == sum(len(v) for v in results.values()):
        raise CliError("no_qualifying_pairs", "no window has qualifying pairs at the requested distances", EXIT_ANALYSIS)
    report = {
        "command": "nullmodel",
        "parameters": cfg.parameters("delta_h", "alpha", "hops", "permutations", "seed", "lexicon"),
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "nullmodel.json", report)
    return report


def cmd_powerlaw(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    results = {}
    ok = 0
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        k = g.degrees()
        try:
            fit = fit_discrete_powerlaw(k)
        except PowerLawError as exc:
            results[w] = {"error": str(exc), "n_total": int(k.size)}
            continue
        entry = fit.to_dict()
        entry["p_value"] = None
        if cfg.bootstrap:
            gof = gof_pvalue(fit, k, cfg.bootstrap, cfg.seed)
            entry["p_value"] = gof.p_value
            entry["n_bootstrap"] = gof.n_bootstrap
        results[w] = entry
        ok += 1
        write_csv(_artifact(cfg, "powerlaw-ccdf", w, "csv"), ["k", "ccdf"], ccdf(k))
    if results and not ok:
        raise CliError("fit_failed", "power-law fit failed for every window", EXIT_ANALYSIS)
    report = {
        "command": "powerlaw",
        "parameters": cfg.parameters("bootstrap", "seed"),
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "powerlaw.json", report)
    return report


def cmd_wordshift(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    lex = _lexicon(cfg)
    split = cfg.extra["degree_split"]
    top = cfg.extra.get("top", 0)
    results = {}
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        bags = _bags(cfg, w, lex)
        scores = score_bags(bags, lex)
        low, high = partition_by_degree(g, scores, split, cfg.alpha)
        if not low or not high:
            results[w] = {"error": f"need users on both sides of degree {split}", "n_ref_users": len(low), "n_comp_users": len(high)}
            continue
        ref = aggregate(bags[u] for u in low)
        comp = aggregate(bags[u] for u in high)
        try:
            entries = word_shift(ref, comp, lex, cfg.exclude_words)
        except HedonometerError as exc:
            results[w] = {"error": str(exc)}
            continue
        summary = word_shift_summary(ref, comp, lex, entries)
        diff = summary["difference"]
        scale = 100.0 / abs(diff) if diff else None
        kept = entries[:top] if top else entries
        write_csv(
            _artifact(cfg, "wordshift", w, "csv"),
            ["rank", "word", "contribution", "contribution_percent", "sign_class", "h_avg", "p_ref", "p_comp"],
            (
                [i + 1, e.word, e.contribution, e.contribution * scale if scale else None, e.sign_class.value, e.h_avg, e.p_ref, e.p_comp]
                for i, e in enumerate(kept)
            ),
        )
        summary.update({"n_ref_users": len(low), "n_comp_users": len(high)})
        results[w] = summary
    report = {
        "command": "wordshift",
        "parameters": {
            **cfg.parameters("delta_h", "alpha", "exclude_words", "lexicon"),
            "degree_split": split,
        },
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "wordshift.json", report)
    return report


def cmd_similarity(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    lex = _lexicon(cfg)
    results = {}
    edges = np.linspace(0.0, 1.0, 51)
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        bags = _bags(cfg, w, lex)
        try:
            res = similarity_null(g, bags, cfg.permutations, cfg.seed, cfg.alpha)
        except HedonometerError as exc:
            results[w] = {"error": str(exc)}
            continue
        hist, _ = np.histogram(res.observed, bins=edges)
        write_csv(
            _artifact(cfg, "similarity-hist", w, "csv"),
            ["d_lower", "d_upper", "n_edges"],
            ([float(edges[i]), float(edges[i + 1]), int(hist[i])] for i in range(hist.size)),
        )
        results[w] = res.to_dict()
    if results and all("error" in r for r in results.values()):
        raise CliError("no_qualifying_edges", "no window has edges between qualifying users", EXIT_ANALYSIS)
    report = {
        "command": "similarity",
        "parameters": cfg.parameters("delta_h", "alpha", "permutations", "seed", "lexicon"),
        "windows": _window_keyed(results),
    }
    write_json(cfg.out / "similarity.json", report)
    return report


def cmd_coverage(cfg: RunConfig) -> dict:
    if cfg.inputs:
        for path in cfg.inputs:
            if not path.exists():
                raise _missing(f"input {path} not found")
        records = (r for path in cfg.inputs for r in read_records(path, cfg.input_format))
        part = window_partition(records, WindowSpec(cfg.window, cfg.anchor))
        results = {s.index: estimate_coverage(s).to_dict() for s in part.sorted_windows()}
        if cfg.windows is not None:
            results = {w: v for w, v in results.items() if w in cfg.windows}
    else:
        manifest = _load_manifest(cfg)
        by_index = {w["index"]: w["coverage"] for w in manifest["windows"]}
        results = {w: by_index[w] for w in _selected_windows(cfg, manifest)}
    report = {"command": "coverage", "parameters": cfg.parameters("window", "anchor"), "windows": _window_keyed(results)}
    write_json(cfg.out / "coverage.json", report)
    return report


def cmd_sweep(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    parameter = cfg.extra["parameter"]
    values = cfg.extra["values"]
    rows = []
    for w in _selected_windows(cfg, manifest):
        g = _graph(cfg, w)
        if parameter == "alpha":
            lex = _lexicon(cfg)
            bags = _bags(cfg, w, lex)
            scores = score_bags(bags, lex)
            settings = [(int(v), lex, bags, scores) for v in values]
        else:
            settings = []
            for v in values:
                lex = _lexicon(cfg, v)
                bags = _bags(cfg, w, lex)
                settings.append((cfg.alpha, lex, bags, score_bags(bags, lex)))
        for v, (alpha, lex, bags, scores) in zip(values, settings):
            sizes = [b.total_count for b in bags.values()]
            for d, ps in scored_pairs_multi(g, scores, cfg.hops, alpha).items():
                res = correlate(ps)
                rows.append(
                    {
                        "window": w,
                        "value": int(v) if parameter == "alpha" else float(v),
                        "hop": d,
                        "r_spearman": res.r_spearman,
                        "r_pearson": res.r_pearson,
                        "n_pairs": res.n_pairs,
                        "n_users_qualifying": ps.n_users_qualifying,
                        "lexicon_size": len(lex),
                        "mean_bag_size": float(np.mean(sizes)) if sizes else None,
                    }
                )
    header = ["window", "value", "hop", "r_spearman", "r_pearson", "n_pairs", "n_users_qualifying", "lexicon_size", "mean_bag_size"]
    write_csv(cfg.out / f"sweep-{parameter}.csv", header, ([r[h] for h in header] for r in rows))
    params = cfg.parameters("hops", "lexicon", "alpha" if parameter == "delta_h" else "delta_h")
    report = {"command": "sweep", "parameters": {**params, "parameter": parameter, "values": values}, "rows": rows}
    write_json(cfg.out / f"sweep-{parameter}.json", report)
    return report


def cmd_export(cfg: RunConfig) -> dict:
    manifest = _load_manifest(cfg)
    fmt = cfg.extra["export_format"]
    ext = "csv" if fmt == "edge_csv" else "gexf"
    files = {}
    for w in _selected_windows(cfg, manifest):
        target = _artifact(cfg, "net", w, ext)
        with atomic_file(target) as tmp:
            export_graph(_graph(cfg, w), tmp, fmt)
        files[w] = {"file": target.name}
    report = {"command": "export", "parameters": {"export_format": fmt}, "windows": _window_keyed(files)}
    write_json(cfg.out / "export.json", report)
    return report


COMMANDS: dict[str, Callable[[RunConfig], dict]] = {
    "build": cmd_build,
    "stats": cmd_stats,
    "happiness": cmd_happiness,
    "assort": cmd_assort,
    "nullmodel": cmd_nullmodel,
    "powerlaw": cmd_powerlaw,
    "wordshift": cmd_wordshift,
    "similarity": cmd_similarity,
    "coverage": cmd_coverage,
    "sweep": cmd_sweep,
    "export": cmd_export,
}


def _report_error(command: str | None, kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "command": command}, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = config_from_args(ns)
        COMMANDS[cfg.command](cfg)
    except CliError as exc:
        _report_error(ns.command, exc.kind, str(exc))
        return exc.code
    except (AssortativityError, HedonometerError, PowerLawError) as exc:
        _report_error(ns.command, "analysis_error", str(exc))
        return EXIT_ANALYSIS
    except OSError as exc:
        _report_error(ns.command, "io_error", str(exc))
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
