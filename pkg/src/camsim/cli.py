"""Unified command line: simulate, sample, build-dataset, embed, eval, plot.

Exit codes: 0 success, 1 usage error, 2 data error.  All randomness is
controlled by --seed flags; JSON config files merge under CLI-flag
precedence (see camsim.config).  Logs are line-delimited JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import embedding, metrics, sampler, sim_bokeh
from .config import load_config
from .core import (SETTING_RANGES, SettingKind, SettingSet, derive_frame_seed,
                   read_image, write_image)

logger = logging.getLogger("camsim.cli")

_RANGES_HELP = "; ".join(
    f"{k.value} in [{lo:g}, {hi:g}]" for k, (lo, hi) in SETTING_RANGES.items())


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage errors to 1
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


class JsonLineFormatter(logging.Formatter):
    def format(self, record):
        entry = {
            "level": record.levelname.lower(),
            "logger": record.name,
            "event": record.getMessage(),
        }
        ctx = getattr(record, "ctx", None)
        if isinstance(ctx, dict):
            entry.update(ctx)
        return json.dumps(entry, sort_keys=True)


def setup_logging(level: str = "info") -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    root = logging.getLogger("camsim")
    root.handlers[:] = [handler]
    root.setLevel(level.upper())


def _kind(name: str) -> SettingKind:
    try:
        return SettingKind(name)
    except ValueError:
        raise UsageError(f"unknown task {name!r}; choose from "
                         + ", ".join(k.value for k in SettingKind))


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"bad size {text!r}; expected WxH, e.g. 512x384")


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad value list {text!r}; expected comma-separated floats")


def _load_frames(directory: Path) -> list:
    paths = sorted(Path(directory).glob("*.png"))
    if not paths:
        raise FileNotFoundError(f"no PNG frames under {directory}")
    return [read_image(p) for p in paths]


def build_parser() -> _Parser:
    parser = _Parser(prog="camsim",
                     description="Physically-based camera-intrinsics simulation toolkit")
    parser.add_argument("--log-level", default="warning",
                        help="logging threshold (debug, info, warning, error)")
    # Also accepted after the subcommand; SUPPRESS keeps the subparser from
    # clobbering a value parsed by the main parser.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        help="logging threshold (debug, info, warning, error)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("sample", help="sample setting values", parents=[common],
                       description=f"Setting ranges: {_RANGES_HELP}")
    p.add_argument("--kind", required=True, help=f"setting kind ({_RANGES_HELP})")
    p.add_argument("--frames", type=int, required=True, help="values per set (>= 2)")
    p.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    p.add_argument("--discrete", type=int, metavar="BINS",
                   help="snap to a uniform BINS-point grid (ablation baseline)")

    p = sub.add_parser("simulate", parents=[common], help="render one frame",
                       description=f"Setting ranges: {_RANGES_HELP}")
    p.add_argument("--task", required=True, help=f"setting kind ({_RANGES_HELP})")
    p.add_argument("--value", "--kelvin", dest="value", type=float, required=True,
                   help=f"setting value ({_RANGES_HELP})")
    p.add_argument("--input", required=True, help="base image (PNG)")
    p.add_argument("--output", required=True, help="output image (PNG)")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic modes")
    p.add_argument("--stochastic", action="store_true",
                   help="shutter task: enable the sensor noise chain")
    p.add_argument("--disparity", help="bokeh task: disparity map (PNG or CEMB)")
    p.add_argument("--focus-percentile", type=float,
                   help="bokeh task: refocus disparity percentile (default 95)")
    p.add_argument("--out-size", help="focal task: output WxH (default from config)")

    p = sub.add_parser("build-dataset", parents=[common], help="build contrastive sets",
                       description=f"Setting ranges: {_RANGES_HELP}")
    p.add_argument("--task", required=True, help=f"setting kind ({_RANGES_HELP})")
    p.add_argument("--input", required=True, help="directory of base images")
    p.add_argument("--frames", type=int, required=True, help="frames per set (>= 2)")
    p.add_argument("--count", type=int, required=True, help="number of sets")
    p.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--strict", action="store_true",
                   help="fail on quality-gate or caption errors instead of skipping")
    p.add_argument("--jobs", type=int, default=1, help="parallel set builders")

    p = sub.add_parser("embed", parents=[common], help="write a coarse-embedding tensor (CEMB)")
    p.add_argument("--task", required=True, help=f"setting kind ({_RANGES_HELP})")
    p.add_argument("--values", required=True, help="comma-separated setting values")
    p.add_argument("--dims", required=True, metavar="CxHxW",
                   help="channels x height x width of the tensor")
    p.add_argument("--out", required=True, help="output CEMB file")
    p.add_argument("--seed", type=int, default=0, help="seed recorded with the set")
    p.add_argument("--diffs", action="store_true",
                   help="append label-difference channels from the hash provider")
    p.add_argument("--provider-dim", type=int, default=256,
                   help="hash provider vector dimension")

    p = sub.add_parser("eval", parents=[common], help="score generated frames against a reference")
    p.add_argument("--task", required=True, help=f"setting kind ({_RANGES_HELP})")
    p.add_argument("--generated", required=True, help="directory of generated PNG frames")
    p.add_argument("--reference", help="directory of reference PNG frames")
    p.add_argument("--simulate", action="store_true",
                   help="simulate the reference from --base and --values instead")
    p.add_argument("--base", help="base image for --simulate")
    p.add_argument("--values", help="comma-separated setting values for --simulate")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic simulation")
    p.add_argument("--report", required=True, help="output report JSON")
    p.add_argument("--color-reduce", default="diff", choices=("diff", "channels"),
                   help="colortemp trend reduction")

    p = sub.add_parser("plot", parents=[common], help="render trend curves from a report as SVG")
    p.add_argument("--report", required=True, help="report JSON from `camsim eval`")
    p.add_argument("--out", required=True, help="output SVG path")

    return parser


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_sample(args) -> int:
    kind = _kind(args.kind)
    sset = sampler.sample_setting_set(kind, args.frames, args.seed)
    if args.discrete is not None:
        sset = sampler.discretize_setting_set(sset, args.discrete)
    for value in sset.values:
        print(f"{value!r}")
    print(ds.format_set_label(sset))
    return 0


def _cmd_simulate(args) -> int:
    kind = _kind(args.task)
    config = load_config(args.config)
    if args.stochastic:
        config["exposure"]["stochastic"] = True
    if args.focus_percentile is not None:
        config["bokeh"]["focus_percentile"] = args.focus_percentile
    if args.out_size:
        w, h = _parse_size(args.out_size)
        config["focal"]["out_width"], config["focal"]["out_height"] = w, h
    base = read_image(args.input)
    disparity = None
    if kind is SettingKind.BOKEH:
        if not args.disparity:
            raise UsageError("bokeh simulation needs --disparity")
        disparity = sim_bokeh.load_disparity(args.disparity)
    frame = ds.render_frame(kind, base, args.value, derive_frame_seed(args.seed, 0),
                            config, disparity=disparity)
    write_image(frame, args.output)
    logger.info("frame written", extra={"ctx": {
        "task": kind.value, "label": ds.format_label(kind, args.value),
        "output": str(args.output)}})
    return 0


def _cmd_build_dataset(args) -> int:
    kind = _kind(args.task)
    config = load_config(args.config)
    manifest = ds.build_dataset(
        args.input, kind, args.frames, args.count, args.seed, args.out,
        config=config, strict=args.strict, jobs=args.jobs)
    print(manifest)
    return 0


def _cmd_embed(args) -> int:
    kind = _kind(args.task)
    values = _parse_values(args.values)
    try:
        c, h, w = (int(v) for v in args.dims.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad dims {args.dims!r}; expected CxHxW, e.g. 4x32x32")
    sset = SettingSet(kind=kind, values=tuple(values), seed=args.seed)
    tensor = embedding.coarse_embedding(sset, c, h, w)
    if args.diffs:
        provider = embedding.HashEmbeddingProvider(args.provider_dim)
        tensor = embedding.assemble_encoder_input(
            tensor, embedding.setting_diff_features(sset, provider))
    embedding.write_tensor(tensor, args.out)
    logger.info("tensor written", extra={"ctx": {
        "shape": list(tensor.data.shape), "output": str(args.out)}})
    return 0


def _cmd_eval(args) -> int:
    kind = _kind(args.task)
    config = load_config(args.config)
    generated = _load_frames(args.generated)
    values = _parse_values(args.values) if args.values else None
    if args.simulate:
        if not args.base or values is None:
            raise UsageError("--simulate needs --base and --values")
        base = read_image(args.base)
        disparity = None
        if kind is SettingKind.BOKEH:
            sidecar = ds.disparity_sidecar(Path(args.base))
            if not sidecar.exists():
                raise FileNotFoundError(f"no disparity sidecar {sidecar}")
            disparity = sim_bokeh.load_disparity(sidecar)
        reference = [ds.render_frame(kind, base, v, derive_frame_seed(args.seed, i),
                                     config, disparity=disparity)
                     for i, v in enumerate(values)]
    elif args.reference:
        reference = _load_frames(args.reference)
    else:
        raise UsageError("eval needs --reference DIR or --simulate")
    report = metrics.evaluate(generated, reference, kind, values=values,
                              color_reduce=args.color_reduce)
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"accuracy_corrcoef={report.accuracy_corrcoef:.4f} "
          f"consistency={report.consistency:.4f} "
          f"reference_consistency={report.reference_consistency:.4f}")
    return 0


def _cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    gen = np.asarray(report["generated_series"], dtype=np.float64)
    ref = np.asarray(report["reference_series"], dtype=np.float64)
    frames = np.arange(len(gen))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(frames, gen, marker="o", label="generated")
    ax.plot(frames, ref, marker="s", label="reference")
    ax.set_xlabel("frame")
    ax.set_ylabel(f"{report['task']} effect")
    ax.set_title(f"{report['task']} trend "
                 f"(corrcoef {report['accuracy_corrcoef']:.4f})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    plt.close(fig)
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "simulate": _cmd_simulate,
    "build-dataset": _cmd_build_dataset,
    "embed": _cmd_embed,
    "eval": _cmd_eval,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        setup_logging(args.log_level)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"camsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
