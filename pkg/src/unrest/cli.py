"""Command-line entry point: ``unrest <command> [options]``.

Settings come from built-in defaults, then ``--config`` (a JSON object whose
keys match the long flag names with underscores), then explicit flags.
Exit status is 0 on success, 1 for bad input, 2 for internal failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

from unrest import US_STATES, __version__
from unrest.errors import InputError, InvariantError, UnrestError

log = logging.getLogger("unrest")

COMMANDS = ("simulate", "ingest", "featurize", "select", "train", "evaluate",
            "baselines", "transfer", "watch", "roc")


@dataclass
class RunConfig:
    out: str = "out"
    seed: int = 0
    classifier: str = "logit"
    features: str = "all"
    folds: int = 10
    stale_limit: int = 5
    tweets: str | None = None
    protests: str | None = None
    votes: str | None = None
    violent_lexicon: str | None = None
    sentiment_lexicon: str | None = None
    gazetteer: str | None = None
    matrix: str | None = None
    test_matrix: str | None = None
    predictions: str | None = None
    gen_config: str | None = None
    preset: str = "desk"
    start: str | None = None
    end: str | None = None
    tz: str = "UTC"
    pace: str = "auto"
    horizon_days: int = 7
    lead_threshold: int = 100_000
    corr_threshold: float = 0.8
    ridge: float = 1e-4
    keywords: str = "protest,protests,rally,march,demonstration,walkout"
    window_minutes: int = 60
    signal_threshold: int = 10
    top_k: int = 10
    plots: bool = True

    def check_inputs(self, *names: str) -> list[Path]:
        paths = []
        for n in names:
            v = getattr(self, n)
            if not v:
                raise InputError(f"--{n.replace('_', '-')} is required")
            p = Path(v)
            if not p.is_file():
                raise InputError(f"--{n.replace('_', '-')}: no such file {v}")
            paths.append(p)
        return paths

    def out_dir(self) -> Path:
        p = Path(self.out)
        try:
            p.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InputError(f"cannot create output dir {p}: {exc}") from exc
        return p

    def model_config(self):
        from unrest.models import ModelConfig, canonical_kind

        return ModelConfig(kind=canonical_kind(self.classifier), ridge=self.ridge, seed=self.seed)

    def timezone(self):
        from datetime import timezone

        if self.tz.upper() == "UTC":
            return timezone.utc
        try:
            from zoneinfo import ZoneInfo

            return ZoneInfo(self.tz)
        except Exception as exc:
            raise InputError(f"unknown timezone {self.tz!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"E_USAGE: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="JSON run configuration; flags override it")
    g.add_argument("--seed", type=int)
    g.add_argument("--classifier", choices=["logit", "nb", "tree", "svm"])
    g.add_argument("--features", help="feature mask, e.g. f1,f3 / 1010101 / all / tweet")
    g.add_argument("--folds", type=int)
    g.add_argument("--out", help="output directory")
    g.add_argument("--no-plots", dest="plots", action="store_const", const=False,
                   help="skip figure rendering")

    parser = _Parser(prog="unrest", description="Protest forecasting from geo-tagged tweets.")
    parser.add_argument("--version", action="version", version=f"unrest {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    p = cmd("simulate", "write a synthetic tweets.jsonl / protests.csv / votes.csv")
    p.add_argument("--gen-config", help="generator JSON config (may name a preset)")
    p.add_argument("--preset", choices=["desk", "vote", "null", "event_b"])

    p = cmd("ingest", "parse and cleanse a tweet file")
    p.add_argument("--tweets")

    p = cmd("featurize", "build features.csv from tweets, protests and votes")
    for flag in ("--tweets", "--protests", "--votes", "--violent-lexicon", "--sentiment-lexicon",
                 "--gazetteer", "--start", "--end", "--tz"):
        p.add_argument(flag)
    p.add_argument("--pace", choices=["auto", "count", "pace"])
    p.add_argument("--horizon-days", type=int)
    p.add_argument("--lead-threshold", type=int)
    p.add_argument("--corr-threshold", type=float)

    p = cmd("select", "wrapper feature selection with per-fold inclusion")
    p.add_argument("--matrix")
    p.add_argument("--stale-limit", type=int)
    p.add_argument("--corr-threshold", type=float)

    p = cmd("train", "fit one model on every matrix row and write model.json")
    p.add_argument("--matrix")
    p.add_argument("--ridge", type=float)

    p = cmd("evaluate", "progressive day-by-day evaluation")
    p.add_argument("--matrix")
    p.add_argument("--start")
    p.add_argument("--end")
    p.add_argument("--ridge", type=float)

    p = cmd("baselines", "progressive runs with each feature alone")
    p.add_argument("--matrix")

    p = cmd("transfer", "train on one event, evaluate on another")
    p.add_argument("--matrix", help="training event features.csv")
    p.add_argument("--test-matrix", help="test event features.csv")
    p.add_argument("--ridge", type=float)

    p = cmd("watch", "keyword signal scan and trending hashtags")
    p.add_argument("--tweets")
    p.add_argument("--keywords")
    p.add_argument("--window-minutes", type=int)
    p.add_argument("--signal-threshold", type=int)
    p.add_argument("--top-k", type=int)

    p = cmd("roc", "roc.csv from a predictions.csv")
    p.add_argument("--predictions")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        try:
            merged.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise InputError(f"unknown config keys {sorted(unknown)}")
    for k, v in vars(args).items():
        if k in known and v is not None:
            merged[k] = v
    return RunConfig(**merged)


def _parse_date(s: str | None, flag: str) -> date | None:
    if s is None:
        return None
    try:
        return date.fromisoformat(s)
    except ValueError as exc:
        raise InputError(f"{flag}: {exc}") from exc


# --- commands -------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig, args) -> int:
    from unrest import datagen

    if cfg.gen_config:
        (path,) = cfg.check_inputs("gen_config")
        gen = datagen.GenConfig.load(path)
    else:
        gen = datagen.preset(cfg.preset)
    # a generator file keeps its own seed unless --seed is given
    if args.seed is not None or not cfg.gen_config:
        gen = datagen.GenConfig.from_dict({**gen.to_dict(), "seed": cfg.seed})
    out = cfg.out_dir()
    syn = datagen.generate(gen)
    paths = syn.write(out)
    (out / "gen_config.json").write_text(json.dumps(gen.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"{len(syn.tweets)} tweets, {len(syn.protests)} protest events -> {paths['tweets'].parent}")
    return 0


def _load_corpus(cfg: RunConfig):
    from unrest.corpus import cleanse, ingest

    (path,) = cfg.check_inputs("tweets")
    raw = ingest(path, US_STATES)
    return raw, cleanse(raw)


def cmd_ingest(cfg: RunConfig, args) -> int:
    from unrest.corpus import write_jsonl

    raw, clean = _load_corpus(cfg)
    out = cfg.out_dir()
    write_jsonl(clean, out / "tweets.clean.jsonl")
    summary = {"records": len(raw), "malformed": raw.skipped, "duplicate_ids": raw.duplicates,
               "retained": len(clean), "removed": len(raw) - len(clean)}
    (out / "ingest.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_featurize(cfg: RunConfig, args) -> int:
    from unrest import featmat
    from unrest.corpus import load_election, load_ground_truth
    from unrest.textfeat import load_resources

    cfg.check_inputs("protests", "votes")
    raw, clean = _load_corpus(cfg)
    res = load_resources(cfg.violent_lexicon, cfg.sentiment_lexicon, cfg.gazetteer)
    election = load_election(cfg.votes, None)
    protests = load_ground_truth(cfg.protests)
    unknown = sorted({e.region for e in protests} - set(election))
    if unknown:
        raise InputError(f"{cfg.protests}: protests in regions without election rows: {', '.join(unknown)}")
    start, end = _parse_date(cfg.start, "--start"), _parse_date(cfg.end, "--end")
    dates = None
    if start or end:
        if not (start and end):
            raise InputError("--start and --end go together")
        dates = featmat.date_range(start, end)
    m = featmat.featurize(clean, res, election, protests, list(election), dates,
                          cfg.lead_threshold, cfg.horizon_days, cfg.timezone(), cfg.pace)
    out = cfg.out_dir()
    featmat.write_features(m, out / "features.csv")
    C = featmat.correlation_matrix(m.X)
    with open(out / "correlation.csv", "w", encoding="utf-8") as fh:
        fh.write("feature," + ",".join(featmat.FEATURES) + "\n")
        for name, row in zip(featmat.FEATURES, C):
            fh.write(name + "," + ",".join(f"{v:.6f}" for v in row) + "\n")
    high = [(a, b, C[i, j]) for i, a in enumerate(featmat.FEATURES) for j, b in enumerate(featmat.FEATURES)
            if i < j and abs(C[i, j]) > cfg.corr_threshold]
    for a, b, r in high:
        log.warning("%s and %s correlate at r=%.3f (> %.2f)", a, b, r, cfg.corr_threshold)
    if cfg.plots:
        from unrest.plotting import plot_correlation

        plot_correlation(C, featmat.FEATURES, out / "correlation.png")
    print(f"{len(m)} rows ({len(m.dates)} days x {len(m.regions)} regions), "
          f"{int(m.y.sum())} protest cells -> {out / 'features.csv'}")
    return 0


def _matrix(cfg: RunConfig, name: str = "matrix"):
    from unrest.featmat import read_features

    (path,) = cfg.check_inputs(name)
    return read_features(path)


def cmd_select(cfg: RunConfig, args) -> int:
    from unrest import featmat, selection

    m = _matrix(cfg)
    mask = featmat.parse_mask(cfg.features)
    cols = featmat.mask_indices(mask)
    X = m.X[:, cols]
    mc = cfg.model_config()
    best = selection.wrapper_select(X, m.y, mc, cfg.folds, cfg.stale_limit, cfg.seed)
    inc = selection.fold_inclusion(X, m.y, mc, cfg.folds, cfg.seed, cfg.stale_limit)
    pct = inc.percentages(mask)
    ranked = sorted(mask, key=lambda f: (-pct[f], mask.index(f)))
    retained = featmat.prune_correlated(X, mask, {f: i + 1 for i, f in enumerate(ranked)}, cfg.corr_threshold)
    out = cfg.out_dir()
    meta = {"classifier": mc.kind, "seed": cfg.seed, "stale_limit": cfg.stale_limit,
            "significance_order": ranked, "retained_after_pruning": retained,
            "corr_threshold": cfg.corr_threshold}
    selection.write_report(out / "selection_report.json", best, inc, mask, meta)
    if cfg.plots:
        from unrest.plotting import plot_inclusion

        plot_inclusion(pct, out / "inclusion.png")
    print(f"best subset {best.names(mask)}  cv accuracy {best.cv_accuracy:.4f}")
    for f in mask:
        print(f"  {f}  {pct[f]:5.1f}%")
    return 0


def cmd_train(cfg: RunConfig, args) -> int:
    from unrest import featmat

    m = _matrix(cfg)
    cols = featmat.mask_indices(featmat.parse_mask(cfg.features))
    model = cfg.model_config().fit(m.X[:, cols], m.y)
    out = cfg.out_dir()
    model.save(out / "model.json")
    print(f"{model.kind} on {len(m)} rows, cutoff {model.cutoff:.6f} -> {out / 'model.json'}")
    return 0


def _write_run(cfg: RunConfig, result, title: str) -> None:
    from unrest.evaluation import format_grid

    out = cfg.out_dir()
    result.write_report(out / "report.json")
    result.write_predictions(out / "predictions.csv")
    if result.roc is not None:
        result.roc.write_csv(out / "roc.csv")
    if result.model is not None:
        result.model.save(out / "model.json")  # the last fitted model
    print(format_grid(result.reports, title))
    print(f"pooled AUC: {'n/a' if result.roc is None else f'{100 * result.roc.auc:.2f}%'}")
    if cfg.plots:
        from unrest.plotting import plot_daily, plot_roc

        plot_daily(result.reports, out / "daily.png", title)
        if result.roc is not None:
            plot_roc({title: result.roc}, out / "roc.png")


def cmd_evaluate(cfg: RunConfig, args) -> int:
    from unrest import featmat
    from unrest.evaluation import progressive_run

    m = _matrix(cfg)
    mask = featmat.parse_mask(cfg.features)
    result = progressive_run(m, None, cfg.model_config(), mask,
                             _parse_date(cfg.start, "--start"), _parse_date(cfg.end, "--end"))
    _write_run(cfg, result, f"{cfg.classifier} [{','.join(mask)}]")
    return 0


def cmd_baselines(cfg: RunConfig, args) -> int:
    from unrest import featmat
    from unrest.evaluation import format_grid, single_feature_baselines, write_baselines

    m = _matrix(cfg)
    # without an explicit mask the baselines are the three headline tweet features
    feats = featmat.parse_mask("f1,f2,f3" if cfg.features == "all" else cfg.features)
    results = single_feature_baselines(m, feats, None, cfg.model_config())
    out = cfg.out_dir()
    write_baselines(results, out / "baselines.json")
    for f, r in results.items():
        print(format_grid(r.reports, f"{f} alone"))
        print()
    return 0


def cmd_transfer(cfg: RunConfig, args) -> int:
    from unrest import featmat
    from unrest.evaluation import transfer_run

    train = _matrix(cfg, "matrix")
    test = _matrix(cfg, "test_matrix")
    mask = featmat.parse_mask(cfg.features)
    result = transfer_run(train, test, cfg.model_config(), mask)
    _write_run(cfg, result, f"transfer {cfg.classifier} [{','.join(mask)}]")
    return 0


def cmd_watch(cfg: RunConfig, args) -> int:
    from unrest import signals

    _, clean = _load_corpus(cfg)
    kw = [k.strip() for k in cfg.keywords.split(",") if k.strip()]
    trig = signals.scan_signals(clean, kw, timedelta(minutes=cfg.window_minutes), cfg.signal_threshold)
    out = cfg.out_dir()
    signals.write_signals(trig, out / "signals.csv")
    first = signals.first_fired(trig)
    if first is not None:
        ranking = signals.trending_hashtags(clean, first, cfg.top_k, kw)
    else:
        ranking = signals.HashtagRanking(())
    signals.write_hashtags(ranking, out / "hashtags.csv")
    if cfg.plots:
        from unrest.plotting import plot_signals

        plot_signals(trig, out / "signals.png")
    fired = sum(t.fired for t in trig)
    print(f"{fired}/{len(trig)} windows fired"
          + (f"; first at {first.window_start.isoformat()}" if first else ""))
    for h, c, s in ranking.entries:
        print(f"  {h}  {c}  {100 * s:.1f}%")
    return 0


def cmd_roc(cfg: RunConfig, args) -> int:
    import csv

    from unrest.evaluation import roc

    (path,) = cfg.check_inputs("predictions")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        scores = [float(r["probability"]) for r in rows]
        labels = [int(r["truth"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise InputError(f"{path}: expected columns probability,truth ({exc})") from exc
    curve = roc(scores, labels)
    out = cfg.out_dir()
    curve.write_csv(out / "roc.csv")
    if cfg.plots:
        from unrest.plotting import plot_roc

        plot_roc({path.stem: curve}, out / "roc.png")
    print(f"AUC {100 * curve.auc:.2f}% over {len(scores)} predictions -> {out / 'roc.csv'}")
    return 0


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def _setup_logging() -> None:
    level = os.environ.get("UNREST_LOG", "error").lower()
    levels = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("E_USAGE: a command is required", file=sys.stderr)
        return 1
    try:
        cfg = resolve_config(args)
        return HANDLERS[args.command](cfg, args)
    except UnrestError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last-resort guard
        log.debug("internal error", exc_info=True)
        print(f"{InvariantError.code}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return InvariantError.exit_code


if __name__ == "__main__":
    sys.exit(main())
