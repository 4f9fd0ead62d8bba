"""Command-line driver: each subcommand reads its inputs from files and writes
its outputs to files, so stages can be chained or rerun on their own."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import ClusterConfig, ClusterTrace, cluster, flatten, from_labels, n_leaves, validate_dendrogram
from .dataio import (
    RunManifest,
    load_dendrogram,
    load_graph,
    load_labels,
    load_points,
    manifest_path,
    save_dendrogram,
    save_graph,
    save_labels,
    write_metrics,
)
from .datasets import gaussian_blobs
from .errors import InvalidInput, SampclustError
from .graph import build_knn_graph
from .metrics import ami, edge_positivity, graph_connectivity, nmi, vertex_positivity
from .pipeline import partition
from .postprocess import PruneConfig, compact, hard_prune, smooth, soft_prune
from .summarize import CONDENSE_MEASURES, SAMPLING_MEASURES, CondenseConfig, SamplingConfig

METRICS = {
    "ami": ami,
    "nmi": lambda a, b: nmi(a, b, "max"),
    "nmi_sqrt": lambda a, b: nmi(a, b, "sqrt"),
}


class _Formatter(argparse.RawDescriptionHelpFormatter):
    # show defaults only where there is a meaningful one
    def _get_help_string(self, action):
        text = action.help or ""
        default = action.default
        if not (default is None or default is False or default == argparse.SUPPRESS or action.required):
            text += " (default: %(default)s)"
        return text


class _Stopwatch:
    def __init__(self, manifest: RunManifest, stage: str):
        self.manifest = manifest
        self.stage = stage

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            self.manifest.record(self.stage, time.perf_counter() - self.start)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return value


def _size_list(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 2:
        raise argparse.ArgumentTypeError("sizes must be integers >= 2")
    return sizes


def _metric_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in METRICS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"unknown metric(s) {unknown}; choose from {sorted(METRICS)}")
    return names


def _add_cluster_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rate", type=_rate, default=0.2, help="fraction of vertices removed per sampling pass")
    p.add_argument("--t", type=_positive_int, default=16, help="out-degree after condensing")
    p.add_argument("--depth", type=int, default=2, help="search depth for condensing candidates")
    p.add_argument("--sample", choices=SAMPLING_MEASURES, default="indegree", help="sampling measure")
    p.add_argument("--condense", choices=CONDENSE_MEASURES, default="visit", help="condensing measure")
    p.add_argument(
        "--precondense",
        choices=CONDENSE_MEASURES + ("none",),
        default="jaccard",
        help="measure for one condensing pass over the whole graph before clustering",
    )
    p.add_argument("--components", choices=("strong", "weak"), default="strong", help="partition unit")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling")


def _cluster_config(args, points) -> ClusterConfig:
    coords = points.points if points is not None else None
    pre = None
    if args.precondense != "none":
        pre = CondenseConfig(args.t, args.depth, args.precondense, points=coords)
    return ClusterConfig(
        sampling=SamplingConfig(args.rate, args.sample, args.seed),
        condensing=CondenseConfig(args.t, args.depth, args.condense, points=coords),
        components=args.components,
        precondense=pre,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampclust",
        description="Sampling clustering on k-nearest-neighbor graphs.",
        formatter_class=_Formatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("knn", help="build a k-NN graph from a points CSV", formatter_class=_Formatter)
    p.add_argument("--input", required=True, help="points CSV (header optional)")
    p.add_argument("--label-column", type=int, default=None, help="column holding class labels; negative counts from the end")
    p.add_argument("--k", type=_positive_int, default=16, help="neighbors per vertex")
    p.add_argument("--method", choices=("tree", "brute"), default="tree", help="search method; both give the same graph")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads for the tree query")
    p.add_argument("--output", required=True, help="graph file to write")
    p.add_argument("--truth-output", default=None, help="also write the label column as an index,label CSV")

    p = sub.add_parser(
        "cluster",
        help="build a dendrogram from a graph file",
        formatter_class=_Formatter,
        description="Build a dendrogram. With --full-pipeline, also smooth, prune to --n "
        "clusters, smooth again and write the flat labeling.",
    )
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--points", default=None, help="points CSV; needed by the euclidean measure")
    p.add_argument("--label-column", type=int, default=None, help="label column of --points, dropped from the features")
    _add_cluster_flags(p)
    p.add_argument("--output", required=True, help="dendrogram file to write")
    p.add_argument("--full-pipeline", action="store_true", help="also produce a flat labeling")
    p.add_argument("--n", type=_positive_int, default=None, help="number of clusters (with --full-pipeline)")
    p.add_argument("--mode", choices=("soft", "hard"), default="soft", help="pruning mode (with --full-pipeline)")
    p.add_argument("--alpha", type=float, default=0.8, help="hard-prune coverage target (with --full-pipeline)")
    p.add_argument("--passes", type=int, default=16, help="smoothing passes before and after pruning (with --full-pipeline)")
    p.add_argument("--labels-output", default=None, help="labels CSV to write (with --full-pipeline)")

    p = sub.add_parser("prune", help="prune a dendrogram", formatter_class=_Formatter)
    p.add_argument("--dendro", required=True, help="dendrogram file")
    p.add_argument("--labels", default=None, help="refill leaves from this labeling (leaf index per vertex) first")
    p.add_argument("--mode", choices=("soft", "hard"), default="soft", help="pruning mode")
    p.add_argument("--n", type=_positive_int, required=True, help="target number of leaves")
    p.add_argument("--alpha", type=float, default=0.8, help="hard mode: share of objects the n largest leaves must hold")
    p.add_argument("--output", required=True, help="pruned dendrogram file to write")

    p = sub.add_parser("smooth", help="majority-vote smoothing of a labeling", formatter_class=_Formatter)
    p.add_argument("--labels", required=True, help="labels CSV")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--passes", type=int, default=16, help="maximum number of synchronous passes")
    p.add_argument("--output", required=True, help="labels CSV to write")

    p = sub.add_parser("label", help="flatten a dendrogram into one label per vertex", formatter_class=_Formatter)
    p.add_argument("--dendro", required=True, help="dendrogram file")
    p.add_argument("--compact", action="store_true", help="renumber labels by first appearance")
    p.add_argument("--output", required=True, help="labels CSV to write")

    p = sub.add_parser("eval", help="compare a predicted labeling with the truth", formatter_class=_Formatter)
    p.add_argument("--pred", required=True, help="predicted labels CSV")
    p.add_argument("--truth", required=True, help="ground-truth labels CSV")
    p.add_argument("--metric", type=_metric_list, default=["ami", "nmi"], help="comma-separated subset of ami,nmi,nmi_sqrt")
    p.add_argument("--output", default=None, help="write the report here instead of standard output")

    p = sub.add_parser("graphstats", help="size, positivity and connectivity of a graph", formatter_class=_Formatter)
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--truth", default=None, help="ground-truth labels CSV (for positivity)")
    p.add_argument("--positivity", action="store_true", help="report vertex positivity")
    p.add_argument("--edge-positivity", action="store_true", help="report edge positivity")
    p.add_argument("--connectivity", action="store_true", help="report mean pairwise max-flow (small graphs only)")
    p.add_argument("--output", default=None, help="write the report here instead of standard output")

    p = sub.add_parser(
        "bench",
        help="time clustering on synthetic Gaussian blobs",
        formatter_class=_Formatter,
        description="Times k-NN construction and clustering separately; the ratio column "
        "compares clustering time with the previous size.",
    )
    p.add_argument("--sizes", type=_size_list, default=[20000, 40000, 80000], help="comma-separated point counts")
    p.add_argument("--repeats", type=_positive_int, default=1, help="runs per size; the median is reported")
    p.add_argument("--k", type=_positive_int, default=16, help="neighbors per vertex")
    p.add_argument("--centers", type=_positive_int, default=10, help="number of blobs")
    p.add_argument("--dim", type=_positive_int, default=8, help="dimension of the blobs")
    p.add_argument("--seed", type=int, default=0, help="seed for data and sampling")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads for the tree query")
    p.add_argument("--output", default=None, help="write the table here instead of standard output")
    return parser


# --- commands ------------------------------------------------------------


def _finish(manifest: RunManifest, *outputs) -> None:
    manifest.outputs = [str(o) for o in outputs if o is not None]
    manifest.write(manifest_path(manifest.outputs[0]))


def cmd_knn(args) -> int:
    m = RunManifest("knn", {"k": args.k, "method": args.method, "label_column": args.label_column, "threads": args.threads})
    m.add_input(args.input)
    with _Stopwatch(m, "load"):
        pts = load_points(args.input, args.label_column)
    with _Stopwatch(m, "knn"):
        g = build_knn_graph(pts, args.k, args.method, workers=args.threads)
    with _Stopwatch(m, "write"):
        save_graph(g, args.output)
        if args.truth_output:
            if pts.labels is None:
                raise InvalidInput("--truth-output needs --label-column")
            save_labels(pts.labels, args.truth_output)
    _finish(m, args.output, args.truth_output)
    return 0


def cmd_cluster(args) -> int:
    if args.full_pipeline and (args.n is None or args.labels_output is None):
        raise InvalidInput("--full-pipeline needs --n and --labels-output")
    m = RunManifest("cluster")
    m.add_input(args.graph)
    with _Stopwatch(m, "load"):
        g = load_graph(args.graph)
        pts = None
        if args.points:
            m.add_input(args.points)
            pts = load_points(args.points, args.label_column)
    cfg = _cluster_config(args, pts)
    config = cfg.as_dict()
    trace = ClusterTrace()
    with _Stopwatch(m, "cluster"):
        d = cluster(g, cfg, trace=trace)
    outputs = [args.output]
    if args.full_pipeline:
        if g.n_vertices and not np.array_equal(g.ids, np.arange(g.n_vertices)):
            raise InvalidInput("--full-pipeline needs vertex ids 0..n-1")
        config["pipeline"] = {"n": args.n, "mode": args.mode, "alpha": args.alpha, "passes": args.passes}
        with _Stopwatch(m, "partition"):
            labels, _ = partition(d, g, args.n, prune=args.mode, alpha=args.alpha, passes=args.passes)
        save_labels(labels, args.labels_output)
        outputs.append(args.labels_output)
    with _Stopwatch(m, "write"):
        save_dendrogram(d, args.output, config)
    m.config = config
    m.config["leaves"] = n_leaves(d)
    _finish(m, *outputs)
    return 0


def cmd_prune(args) -> int:
    m = RunManifest("prune", {"mode": args.mode, "n": args.n, "alpha": args.alpha})
    m.add_input(args.dendro)
    d, config = load_dendrogram(args.dendro, with_config=True)
    if args.labels:
        m.add_input(args.labels)
        labels = load_labels(args.labels)
        refilled = from_labels(d, labels)
        if refilled is None:
            raise InvalidInput("the labeling leaves every leaf empty")
        d = refilled
    with _Stopwatch(m, "prune"):
        if args.mode == "soft":
            pruned = soft_prune(d, args.n)
        else:
            pruned = hard_prune(d, PruneConfig(args.n, args.alpha))
    config = dict(config)
    config["prune"] = m.config
    save_dendrogram(pruned, args.output, config)
    _finish(m, args.output)
    return 0


def cmd_smooth(args) -> int:
    m = RunManifest("smooth", {"passes": args.passes})
    m.add_input(args.labels)
    m.add_input(args.graph)
    labels = load_labels(args.labels)
    g = load_graph(args.graph)
    changes: list[int] = []
    with _Stopwatch(m, "smooth"):
        out = smooth(labels, g, args.passes, changes=changes)
    m.config["changes_per_pass"] = changes
    save_labels(out, args.output)
    _finish(m, args.output)
    return 0


def cmd_label(args) -> int:
    m = RunManifest("label", {"compact": args.compact})
    m.add_input(args.dendro)
    d = load_dendrogram(args.dendro)
    labels = flatten(d)
    validate_dendrogram(d, labels.size)
    if args.compact:
        labels = compact(labels)
    save_labels(labels, args.output)
    _finish(m, args.output)
    return 0


def cmd_eval(args) -> int:
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    rows = [(name, METRICS[name](pred, truth)) for name in args.metric]
    write_metrics(rows, args.output)
    if args.output:
        m = RunManifest("eval", {"metrics": args.metric})
        m.add_input(args.pred)
        m.add_input(args.truth)
        _finish(m, args.output)
    return 0


def cmd_graphstats(args) -> int:
    g = load_graph(args.graph)
    rows = [("vertices", g.n_vertices), ("edges", g.n_edges)]
    if args.positivity or args.edge_positivity:
        if args.truth is None:
            raise InvalidInput("positivity needs --truth")
        truth = load_labels(args.truth)
        if g.n_vertices and g.ids[-1] >= truth.size:
            raise InvalidInput(f"--truth has {truth.size} labels but the graph has vertex {int(g.ids[-1])}")
        if args.positivity:
            rows.append(("vertex_positivity", vertex_positivity(g, truth)))
        if args.edge_positivity:
            rows.append(("edge_positivity", edge_positivity(g, truth)))
    if args.connectivity:
        rows.append(("connectivity", graph_connectivity(g)))
    write_metrics(rows, args.output)
    if args.output:
        m = RunManifest("graphstats")
        m.add_input(args.graph)
        _finish(m, args.output)
    return 0


def cmd_bench(args) -> int:
    lines = ["n,knn_seconds,cluster_seconds,ratio,leaves"]
    prev = None
    for n in args.sizes:
        pts = gaussian_blobs(n, centers=args.centers, dim=args.dim, seed=args.seed)
        knn_t, clu_t = [], []
        for _ in range(args.repeats):
            start = time.perf_counter()
            g = build_knn_graph(pts, args.k, workers=args.threads)
            knn_t.append(time.perf_counter() - start)
            start = time.perf_counter()
            d = cluster(g, ClusterConfig(SamplingConfig(seed=args.seed)))
            clu_t.append(time.perf_counter() - start)
        k_med, c_med = float(np.median(knn_t)), float(np.median(clu_t))
        ratio = "" if prev is None else f"{c_med / prev:.3f}"
        lines.append(f"{n},{k_med:.3f},{c_med:.3f},{ratio},{n_leaves(d)}")
        prev = c_med
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "knn": cmd_knn,
    "cluster": cmd_cluster,
    "prune": cmd_prune,
    "smooth": cmd_smooth,
    "label": cmd_label,
    "eval": cmd_eval,
    "graphstats": cmd_graphstats,
    "bench": cmd_bench,
}


def run(argv=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (SampclustError, OSError, ValueError, RuntimeError) as exc:
        print(f"sampclust {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
