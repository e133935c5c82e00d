"""Command-line surface for batch use by training harnesses.

Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 domain failure, 2 input/parse/IO error, 3 external-service
error.  A JSON --config file overrides flags so runs are reproducible from
one artifact; every report embeds the digest of the resolved config.
The SVG_FORGE_EMBEDDER environment variable overrides the embedder URI.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import grpo
from .core.normalize import normalize_viewbox
from .core.parse import parse_svg
from .core.serialize import serialize
from .core.structure import validate_structure
from .datapipe import filter_refactored, filter_refinement_drafts, validate_step_alignment
from .errors import EmbedderError, SvgForgeError, UnknownTokenIdError
from .raster.render import rasterize, write_png
from .raster.ssim import SsimParams
from .rewards.compute import RewardWeights, score
from .rewards.embedders import resolve_embedder
from .rewards.format_check import ModelOutput
from .tokenizer import decode, default_vocabulary, encode, vocabulary_to_json
from .tokenizer.codec import TokenSequence

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2
EXIT_SERVICE = 3


@dataclass
class CliConfig:
    viewbox_size: float = 128.0
    render_size: int = 256
    supersample: int = 4
    w_dino: float = 0.5
    w_lclip: float = 0.25
    w_eff: float = 0.25
    clip_gamma: float = 0.2
    kl_beta: float = 0.01
    adv_epsilon: float = 1e-4
    kl_estimator: str = "k3"
    embedder_uri: str = "builtin:block-luma"
    length_mode: str = "svg_tokens"
    strictness: str = "strict"
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    ssim_k1: float = 0.01
    ssim_k2: float = 0.03
    threshold: float = 0.95
    band_low: float = 0.30
    band_high: float = 0.95
    jobs: int = 1
    timings: bool = False

    @property
    def strict(self) -> bool:
        return self.strictness == "strict"

    def weights(self) -> RewardWeights:
        return RewardWeights(self.w_dino, self.w_lclip, self.w_eff)

    def grpo_config(self) -> grpo.GrpoConfig:
        return grpo.GrpoConfig(self.clip_gamma, self.kl_beta, self.adv_epsilon,
                               self.kl_estimator)

    def ssim_params(self) -> SsimParams:
        return SsimParams(self.ssim_window, self.ssim_sigma, self.ssim_k1,
                          self.ssim_k2)

    def digest(self) -> str:
        # jobs and timings are execution knobs, not result parameters
        fields = {k: v for k, v in asdict(self).items()
                  if k not in ("jobs", "timings")}
        blob = json.dumps(fields, sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _add_config_flags(p: argparse.ArgumentParser):
    defaults = CliConfig()
    p.add_argument("--config", help="JSON config file; overrides flags")
    p.add_argument("--viewbox-size", type=float, default=defaults.viewbox_size)
    p.add_argument("--render-size", type=int, default=defaults.render_size)
    p.add_argument("--supersample", type=int, default=defaults.supersample)
    p.add_argument("--w-dino", type=float, default=defaults.w_dino)
    p.add_argument("--w-lclip", type=float, default=defaults.w_lclip)
    p.add_argument("--w-eff", type=float, default=defaults.w_eff)
    p.add_argument("--clip-gamma", type=float, default=defaults.clip_gamma)
    p.add_argument("--kl-beta", type=float, default=defaults.kl_beta)
    p.add_argument("--adv-epsilon", type=float, default=defaults.adv_epsilon)
    p.add_argument("--kl-estimator", choices=("k1", "k3"), default=defaults.kl_estimator)
    p.add_argument("--embedder", dest="embedder_uri", default=defaults.embedder_uri)
    p.add_argument("--length-mode", choices=("chars", "svg_tokens"),
                   default=defaults.length_mode)
    p.add_argument("--strictness", choices=("strict", "lenient"),
                   default=defaults.strictness)
    p.add_argument("--ssim-window", type=int, default=defaults.ssim_window)
    p.add_argument("--ssim-sigma", type=float, default=defaults.ssim_sigma)
    p.add_argument("--ssim-k1", type=float, default=defaults.ssim_k1)
    p.add_argument("--ssim-k2", type=float, default=defaults.ssim_k2)
    p.add_argument("--threshold", type=float, default=defaults.threshold)
    p.add_argument("--band-low", type=float, default=defaults.band_low)
    p.add_argument("--band-high", type=float, default=defaults.band_high)
    p.add_argument("--jobs", type=int, default=defaults.jobs)
    p.add_argument("--timings", action="store_true")


def _resolve_config(args) -> CliConfig:
    cfg = CliConfig()
    for name in vars(cfg):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fp:
            overrides = json.load(fp)
        for key, value in overrides.items():
            if not hasattr(cfg, key):
                raise SvgForgeError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    env_uri = os.environ.get("SVG_FORGE_EMBEDDER")
    if env_uri:
        cfg.embedder_uri = env_uri
    return cfg


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fp:
        return fp.read()


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_validate(args) -> int:
    cfg = _resolve_config(args)
    try:
        text = _read_text(args.file)
        doc = parse_svg(text, strict=cfg.strict)
    except (OSError, SvgForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = validate_structure(doc)
    for issue in report.issues:
        print(f"{issue.severity.value}: {issue.node_path}: {issue.message}",
              file=sys.stderr)
    _emit({
        "ok": report.ok,
        "issues": [
            {"severity": i.severity.value, "path": i.node_path, "message": i.message}
            for i in report.issues
        ],
        "config_digest": cfg.digest(),
    })
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_render(args) -> int:
    cfg = _resolve_config(args)
    try:
        doc = parse_svg(_read_text(args.file), strict=cfg.strict)
        doc = normalize_viewbox(doc, cfg.viewbox_size)
    except (OSError, SvgForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    size = args.size or cfg.render_size
    img = rasterize(doc, size, args.supersample or cfg.supersample)
    write_png(img, args.out)
    _emit({"out": args.out, "size": size, "config_digest": cfg.digest()})
    return EXIT_OK


def cmd_tokenize(args) -> int:
    cfg = _resolve_config(args)
    vocab = default_vocabulary()
    if args.decode:
        try:
            ids = json.loads(_read_text(args.decode) if os.path.exists(args.decode)
                             else args.decode)
            text = decode(TokenSequence(ids=tuple(int(i) for i in ids)), vocab)
        except UnknownTokenIdError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        _emit({"text": text})
        return EXIT_OK

    if args.text is not None:
        text = args.text
    elif args.file:
        try:
            text = _read_text(args.file)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        print("error: provide a file, --text or --decode", file=sys.stderr)
        return EXIT_INPUT
    try:
        seq = encode(text, vocab, fallback=not cfg.strict or args.fallback)
    except SvgForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    payload: dict = {"count": len(seq.ids), "config_digest": cfg.digest()}
    if not args.stats:
        payload["ids"] = list(seq.ids)
    _emit(payload)
    return EXIT_OK


def cmd_vocab(args) -> int:
    text = vocabulary_to_json(default_vocabulary())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(text)
        _emit({"out": args.out, "tokens": default_vocabulary().size})
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_reward(args) -> int:
    cfg = _resolve_config(args)
    try:
        raw = _read_text(args.output)
        gt_doc = parse_svg(_read_text(args.gt), strict=cfg.strict)
    except (OSError, SvgForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        embedder = resolve_embedder(cfg.embedder_uri)
        breakdown = score(
            ModelOutput(raw_text=raw),
            context=args.instruction,
            gt_doc=gt_doc,
            embedder=embedder,
            weights=cfg.weights(),
            length_mode=cfg.length_mode,
            render_size=cfg.render_size,
            supersample=cfg.supersample,
            strict=cfg.strict,
        )
    except EmbedderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    except SvgForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    payload = breakdown.to_dict(include_timings=cfg.timings)
    payload["config_digest"] = cfg.digest()
    _emit(payload)
    if args.plot:
        from .plots import plot_reward_breakdown

        plot_reward_breakdown(breakdown, args.plot)
    return EXIT_OK


def cmd_score_group(args) -> int:
    cfg = _resolve_config(args)
    try:
        group = grpo.load_rollout_group(args.rollouts)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SvgForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        report = grpo.grpo_objective(group, cfg.grpo_config())
    except SvgForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    payload = report.to_dict()
    payload["config_digest"] = cfg.digest()
    _emit(payload)
    if args.plot:
        from .plots import plot_group_report

        plot_group_report(report, args.plot)
    return EXIT_OK


def _load_manifest(path: str, mode: str) -> tuple[list[str], list[tuple[str, str]]]:
    key_a, key_b = ("original", "refactored") if mode == "refactor" else ("draft", "gt")
    ids, pairs = [], []
    with open(path, encoding="utf-8") as fp:
        for lineno, raw in enumerate(fp, start=1):
            raw = raw.strip()
            if not raw:
                continue
            entry = json.loads(raw)
            if key_a not in entry or key_b not in entry:
                raise SvgForgeError(
                    f"line {lineno}: manifest entries need {key_a!r} and {key_b!r}")

            def load_side(value):
                return value if value.lstrip().startswith("<") else _read_text(value)

            ids.append(str(entry.get("id", lineno)))
            pairs.append((load_side(entry[key_a]), load_side(entry[key_b])))
    return ids, pairs


def cmd_filter(args) -> int:
    cfg = _resolve_config(args)
    try:
        ids, pairs = _load_manifest(args.manifest, args.mode)
    except (OSError, json.JSONDecodeError, SvgForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    params = cfg.ssim_params()
    if args.mode == "refactor":
        report = filter_refactored(pairs, cfg.threshold, cfg.render_size,
                                   cfg.supersample, params, ids=ids, jobs=cfg.jobs)
        thresholds = (cfg.threshold,)
    else:
        report = filter_refinement_drafts(pairs, cfg.band_low, cfg.band_high,
                                          cfg.render_size, cfg.supersample,
                                          params, ids=ids, jobs=cfg.jobs)
        thresholds = (cfg.band_low, cfg.band_high)
    payload = report.to_dict()
    payload["config_digest"] = cfg.digest()
    _emit(payload)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fp:
            fp.write(report.to_csv())
    if args.plot:
        from .plots import plot_filter_report

        plot_filter_report(report, args.plot, thresholds=thresholds,
                           title=f"{args.mode} filter")
    return EXIT_OK


def cmd_align(args) -> int:
    cfg = _resolve_config(args)
    try:
        think = _read_text(args.think)
        doc = parse_svg(_read_text(args.svg), strict=cfg.strict)
    except (OSError, SvgForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = validate_step_alignment(think, doc)
    payload = report.to_dict()
    payload["config_digest"] = cfg.digest()
    _emit(payload)
    return EXIT_OK if report.aligned else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svgforge",
        description="SVG RL environment toolkit: validate, render, tokenize, "
                    "score rewards, evaluate GRPO objectives, filter datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and check group-level structure")
    p.add_argument("file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="rasterize to PNG")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int)
    _add_config_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("tokenize", help="encode/decode with the SVG vocabulary")
    p.add_argument("file", nargs="?")
    p.add_argument("--text")
    p.add_argument("--decode", help="JSON array of ids (inline or a file path)")
    p.add_argument("--stats", action="store_true", help="print only the token count")
    p.add_argument("--fallback", action="store_true",
                   help="byte-fallback even under strict config")
    _add_config_flags(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("vocab", help="export the vocabulary as versioned JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("reward", help="score one model output against ground truth")
    p.add_argument("--output", required=True, help="file with the raw model response")
    p.add_argument("--gt", required=True, help="ground-truth SVG file")
    p.add_argument("--instruction", required=True)
    p.add_argument("--plot", help="write a component bar chart PNG")
    _add_config_flags(p)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("score-group", help="GRPO objective over a rollout-group file")
    p.add_argument("rollouts")
    p.add_argument("--plot", help="write an advantages/KL figure PNG")
    _add_config_flags(p)
    p.set_defaults(func=cmd_score_group)

    p = sub.add_parser("filter", help="batch SSIM filtering from a JSONL manifest")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=("refactor", "refine"), required=True)
    p.add_argument("--csv", help="write the per-item report as CSV")
    p.add_argument("--plot", help="write an SSIM histogram PNG")
    _add_config_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("align", help="check CoT step count against top-level groups")
    p.add_argument("think", help="file with the reasoning text")
    p.add_argument("svg", help="SVG file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_align)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
