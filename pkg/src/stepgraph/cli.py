"""Command-line pipeline: mine, decode, eval, synth, sweep, graphviz.

Every run is reproducible from (config, seed): outputs embed a hash of
the resolved configuration, logs go to stderr, data goes to files. Exit
codes: 0 ok, 2 usage, 3 input format, 4 dimension mismatch, 5 internal.
"""

import argparse
import hashlib
import json
import math
import os
import sys
from multiprocessing import get_context

from . import ingest, sweeps
from .assign import (
    adaptive_gamma,
    anchor_mask,
    fuse_modalities,
    preliminary_assign,
    weighted_fusion,
)
from .decode import BrfConfig, DecodeConfig, PathFinder, brf_decode, correct_sequence
from .errors import DimensionError, FormatError, StepgraphError
from .graph import binarize, load_graph, mine_graph, save_graph, to_cost, to_dot
from .metrics import evaluate
from .synth import SynthConfig, gen_corpus, make_distractor_pool

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_DIMENSION = 4
EXIT_INTERNAL = 5


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_config_file(path) -> dict:
    """Parse a key = value config file (strings, numbers, booleans)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}: line {ln} is not 'key = value'")
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = _parse_value(value.strip())
    return out


def _parse_value(text: str):
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _resolve(args, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    resolved = dict(defaults)
    if getattr(args, "config", None):
        for key, value in _load_config_file(args.config).items():
            if key not in defaults:
                raise FormatError(f"{args.config}: unknown config key {key!r}")
            resolved[key] = value
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


_NON_HASH_KEYS = frozenset(
    ("labels", "vocab", "out", "out_dir", "dot", "scores", "graph", "pred", "gt",
     "config", "jobs")
)


def _provenance(command: str, resolved: dict) -> dict:
    """Hash of the experiment parameters; file locations and execution
    details (worker count) excluded so a relocated or reparallelized
    rerun stays byte-identical."""
    params = {k: v for k, v in resolved.items() if k not in _NON_HASH_KEYS}
    digest = hashlib.sha256(
        json.dumps({"command": command, "config": params}, sort_keys=True).encode()
    ).hexdigest()[:12]
    return {"config_hash": digest, "seed": resolved.get("seed")}


# ---------------------------------------------------------------------------
# mine

MINE_DEFAULTS = {"labels": None, "vocab": None, "out": None, "dot": None,
                 "top": 4, "binarize": False}


def _cmd_mine(args) -> int:
    cfg = _resolve(args, MINE_DEFAULTS)
    for key in ("labels", "vocab", "out"):
        if not cfg[key]:
            raise FormatError(f"mine: missing required option --{key}")
    vocab = ingest.load_vocabulary(cfg["vocab"])
    corpus = ingest.load_labels(cfg["labels"], vocab)
    graph = mine_graph(corpus, len(vocab))
    if cfg["binarize"]:
        graph = binarize(graph)
    prov = _provenance("mine", cfg)
    save_graph(cfg["out"], graph, provenance=prov)
    if cfg["dot"]:
        with open(cfg["dot"], "w", encoding="utf-8") as fh:
            fh.write(to_dot(graph, vocab, top_n=cfg["top"], provenance=prov))
    _log(f"mine: {len(corpus)} sequences -> {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# decode

DECODE_DEFAULTS = {
    "graph": None, "vocab": None, "scores": None, "out": None,
    "modality": "video", "gamma_text": 0.5, "gamma_video": 0.3,
    "adaptive": False, "smoothing": 0.0,
    "decoder": "pathsearch", "epsilon": 0.1, "jobs": 0,
}

_POOL_STATE = {}


def _decode_video(graph, finder, dcfg, bcfg, decoder, adaptive, mats):
    """Decode one video from its per-modality score matrices."""
    if decoder == "brf":
        if "video" in mats and "text" in mats:
            matrix = weighted_fusion(mats["video"], mats["text"])
        else:
            matrix = next(iter(mats.values()))
        return brf_decode(matrix, graph, bcfg)

    def assigned(modality):
        labels, conf = preliminary_assign(mats[modality])
        g = adaptive_gamma(conf) if adaptive else dcfg.gamma_for(modality)
        return labels, conf, anchor_mask(conf, g)

    if "video" in mats and "text" in mats:
        v_labels, v_conf, v_mask = assigned("video")
        t_labels, _, t_mask = assigned("text")
        labels, mask = fuse_modalities((v_labels, v_mask), (t_labels, t_mask))
        conf = v_conf
    else:
        labels, conf, mask = assigned(next(iter(mats)))
    return correct_sequence(labels, conf, mask, graph, dcfg, path_finder=finder)


def _pool_init(graph, dcfg, bcfg, decoder, adaptive):
    _POOL_STATE["args"] = (
        graph, PathFinder(to_cost(graph, dcfg.smoothing)), dcfg, bcfg,
        decoder, adaptive,
    )


def _pool_task(mats):
    return _decode_video(*_POOL_STATE["args"], mats)


def _cmd_decode(args) -> int:
    cfg = _resolve(args, DECODE_DEFAULTS)
    for key in ("graph", "vocab", "scores", "out"):
        if not cfg[key]:
            raise FormatError(f"decode: missing required option --{key}")
    vocab = ingest.load_vocabulary(cfg["vocab"])
    graph = load_graph(cfg["graph"])
    if graph.K != len(vocab):
        raise DimensionError(
            f"{cfg['graph']}: graph has K={graph.K}, vocabulary has {len(vocab)}"
        )
    paths = cfg["scores"] if isinstance(cfg["scores"], list) else [cfg["scores"]]
    matrices = []
    for path in paths:
        matrices.extend(ingest.load_score_corpus(path, vocab))

    modality = cfg["modality"]
    if modality not in ("text", "video", "both"):
        raise FormatError(f"decode: bad modality {modality!r}")
    wanted = ("text", "video") if modality == "both" else (modality,)
    by_video = {}
    for m in matrices:
        if m.modality in wanted:
            by_video.setdefault(m.video_id, {})[m.modality] = m
    if not by_video:
        raise FormatError(f"decode: no {modality!r} score blocks in input")
    for vid, mats in by_video.items():
        missing = [w for w in wanted if w not in mats]
        if missing:
            raise DimensionError(f"decode: {vid} lacks {missing[0]} scores")
        if len(mats) == 2 and mats["text"].T != mats["video"].T:
            raise DimensionError(f"decode: {vid} modalities disagree on T")

    dcfg = DecodeConfig(
        gamma_text=cfg["gamma_text"], gamma_video=cfg["gamma_video"],
        adaptive_threshold=cfg["adaptive"], smoothing=cfg["smoothing"],
    )
    bcfg = BrfConfig(epsilon=cfg["epsilon"])
    decoder = cfg["decoder"]
    if decoder not in ("pathsearch", "brf"):
        raise FormatError(f"decode: bad decoder {decoder!r}")

    tasks = [by_video[vid] for vid in sorted(by_video)]
    jobs = cfg["jobs"] or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        ctx = get_context("fork")
        with ctx.Pool(
            processes=min(jobs, len(tasks)),
            initializer=_pool_init,
            initargs=(graph, dcfg, bcfg, decoder, cfg["adaptive"]),
        ) as pool:
            decoded = pool.map(_pool_task, tasks)
    else:
        finder = PathFinder(to_cost(graph, dcfg.smoothing))
        decoded = [
            _decode_video(graph, finder, dcfg, bcfg, decoder, cfg["adaptive"], mats)
            for mats in tasks
        ]
    decoded.sort(key=lambda seq: seq.video_id)
    ingest.write_labels(cfg["out"], decoded, provenance=_provenance("decode", cfg))
    _log(f"decode: {len(decoded)} videos -> {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval

EVAL_DEFAULTS = {"pred": None, "gt": None, "vocab": None, "out": None,
                 "collapse": False}


def _cmd_eval(args) -> int:
    cfg = _resolve(args, EVAL_DEFAULTS)
    for key in ("pred", "gt", "out"):
        if not cfg[key]:
            raise FormatError(f"eval: missing required option --{key}")
    vocab = ingest.load_vocabulary(cfg["vocab"]) if cfg["vocab"] else None
    preds = ingest.load_labels(cfg["pred"], vocab)
    gts = ingest.load_labels(cfg["gt"], vocab)
    gt_by_id = {g.video_id: g for g in gts}
    missing = [p.video_id for p in preds if p.video_id not in gt_by_id]
    if missing:
        raise FormatError(f"eval: no ground truth for video {missing[0]!r}")
    preds.sort(key=lambda s: s.video_id)
    report = evaluate(preds, [gt_by_id[p.video_id] for p in preds],
                      collapse=cfg["collapse"])
    ingest.write_report(cfg["out"], report.to_dict(),
                        provenance=_provenance("eval", cfg))
    acc = report.mean_acc
    _log(f"eval: mean_acc={acc if acc is None else round(acc, 4)} -> {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth

SYNTH_DEFAULTS = {
    "out_dir": None, "k": 50, "videos": 200, "t_min": 50, "t_max": 50,
    "branching": 4, "mu_true": 0.7, "mu_false": 0.0, "sigma": 0.15,
    "rho": 0.0, "seed": 0,
}


def _synth_config(cfg: dict) -> SynthConfig:
    return SynthConfig(
        K=cfg["k"], n_videos=cfg["videos"], t_min=cfg["t_min"],
        t_max=cfg["t_max"], branching=cfg["branching"], mu_true=cfg["mu_true"],
        mu_false=cfg["mu_false"], sigma=cfg["sigma"], rho=cfg["rho"],
        seed=cfg["seed"],
    )


def _cmd_synth(args) -> int:
    cfg = _resolve(args, SYNTH_DEFAULTS)
    if not cfg["out_dir"]:
        raise FormatError("synth: missing required option --out-dir")
    corpus = gen_corpus(_synth_config(cfg))
    prov = _provenance("synth", cfg)
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    ingest.write_vocabulary(os.path.join(out, "vocab.txt"), corpus.vocab,
                            provenance=prov)
    ingest.write_scores(os.path.join(out, "scores.csv"), corpus.scores, provenance=prov)
    ingest.write_labels(os.path.join(out, "labels.jsonl"), corpus.labels, provenance=prov)
    save_graph(os.path.join(out, "graph.json"), corpus.planted, provenance=prov)
    _log(f"synth: {cfg['videos']} videos -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

SWEEP_DEFAULTS = dict(SYNTH_DEFAULTS, out=None, out_dir="", gamma=0.45,
                      alphas="", gammas="", noise_seed=0)
SWEEP_DEFAULTS["rho"] = 0.4


def _parse_grid(text: str, fallback):
    if not text:
        return fallback
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise FormatError(f"sweep: bad grid {text!r}") from exc


def _cmd_sweep(args) -> int:
    cfg = _resolve(args, SWEEP_DEFAULTS)
    if not cfg["out"]:
        raise FormatError("sweep: missing required option --out")
    gammas = _parse_grid(cfg["gammas"], sweeps.GAMMA_GRID)
    alphas = _parse_grid(cfg["alphas"], sweeps.ALPHA_GRID)
    corpus = gen_corpus(_synth_config(cfg))
    pool = make_distractor_pool(int(math.ceil(max(alphas) * cfg["k"])) + 1)
    rows = sweeps.gamma_sweep(corpus, gammas)
    rows += sweeps.alpha_sweep(corpus, pool, alphas, gamma=cfg["gamma"],
                               noise_seed=cfg["noise_seed"])
    prov = _provenance("sweep", cfg)
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(prov, sort_keys=True) + "\n")
        fh.write("setting,baseline_acc,corrected_acc,relative_gain\n")
        for row in rows:
            fh.write(
                f"{row.setting},{row.baseline_acc:.6f},"
                f"{row.corrected_acc:.6f},{row.relative_gain:.6f}\n"
            )
    _log(f"sweep: {len(rows)} settings -> {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# graphviz

GRAPHVIZ_DEFAULTS = {"graph": None, "vocab": None, "out": None, "top": 4}


def _cmd_graphviz(args) -> int:
    cfg = _resolve(args, GRAPHVIZ_DEFAULTS)
    for key in ("graph", "out"):
        if not cfg[key]:
            raise FormatError(f"graphviz: missing required option --{key}")
    graph = load_graph(cfg["graph"])
    vocab = ingest.load_vocabulary(cfg["vocab"]) if cfg["vocab"] else None
    if vocab is not None and graph.K != len(vocab):
        raise DimensionError(
            f"{cfg['graph']}: graph has K={graph.K}, vocabulary has {len(vocab)}"
        )
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        fh.write(to_dot(graph, vocab, top_n=cfg["top"],
                        provenance=_provenance("graphviz", cfg)))
    _log(f"graphviz: -> {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepgraph",
        description="Mine a keystep transition graph and correct noisy labels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    flag = argparse.BooleanOptionalAction

    p = sub.add_parser("mine", help="mine a transition graph from label sequences")
    p.add_argument("--labels")
    p.add_argument("--vocab")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.add_argument("--top", type=int)
    p.add_argument("--binarize", action=flag, default=None)
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_mine)

    p = sub.add_parser("decode", help="correct label sequences with a graph")
    p.add_argument("--graph")
    p.add_argument("--vocab")
    p.add_argument("--scores", nargs="+")
    p.add_argument("--modality", choices=("text", "video", "both"))
    p.add_argument("--gamma-text", type=float, dest="gamma_text")
    p.add_argument("--gamma-video", type=float, dest="gamma_video")
    p.add_argument("--adaptive", action=flag, default=None)
    p.add_argument("--smoothing", type=float)
    p.add_argument("--decoder", choices=("pathsearch", "brf"))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_decode)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred")
    p.add_argument("--gt")
    p.add_argument("--vocab")
    p.add_argument("--collapse", action=flag, default=None)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--k", type=int)
    p.add_argument("--videos", type=int)
    p.add_argument("--t-min", type=int, dest="t_min")
    p.add_argument("--t-max", type=int, dest="t_max")
    p.add_argument("--branching", type=int)
    p.add_argument("--mu-true", type=float, dest="mu_true")
    p.add_argument("--mu-false", type=float, dest="mu_false")
    p.add_argument("--sigma", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("sweep", help="threshold and vocabulary-noise sweeps")
    for name, kind in (("k", int), ("videos", int), ("t-min", int), ("t-max", int),
                       ("branching", int), ("mu-true", float), ("mu-false", float),
                       ("sigma", float), ("rho", float), ("seed", int),
                       ("gamma", float), ("noise-seed", int)):
        p.add_argument(f"--{name}", type=kind, dest=name.replace("-", "_"))
    p.add_argument("--alphas", help="comma-separated alpha grid")
    p.add_argument("--gammas", help="comma-separated gamma grid")
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("graphviz", help="export top transitions as DOT")
    p.add_argument("--graph")
    p.add_argument("--vocab")
    p.add_argument("--top", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_graphviz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        _log(f"error: missing file: {exc.filename}")
        return EXIT_FORMAT
    except FormatError as exc:
        _log(f"error: {exc}")
        return EXIT_FORMAT
    except DimensionError as exc:
        _log(f"error: {exc}")
        return EXIT_DIMENSION
    except StepgraphError as exc:
        _log(f"error: {exc}")
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        _log(f"internal error: {exc!r}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
