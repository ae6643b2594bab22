"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 processing error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ColorKeepError, ConfigError
from .pipeline import PipelineConfig, run
from .styler import StylerSpec

_MODE_NAMES = {
    "color-pre": "color_pre",
    "color-post": "color_post",
    "luminance": "luminance",
}
_VARIANT_NAMES = {
    "cholesky": "cholesky",
    "ia": "image_analogies",
    "mkl": "mkl",
}


class _Parser(argparse.ArgumentParser):
    # the contract reserves exit code 2 for processing errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="colorkeep",
        description=(
            "Keep the content image's colors through artistic style transfer: "
            "match the style's color statistics to the content before (or the "
            "styled result after) styling, or style only the luminance channel."
        ),
    )
    parser.add_argument("--content", required=True, help="content image (PNG or PPM)")
    parser.add_argument("--style", required=True, help="style image (PNG or PPM)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--mode",
        choices=sorted(_MODE_NAMES),
        default=None,
        help="processing mode (default: color-pre)",
    )
    parser.add_argument(
        "--variant",
        choices=sorted(_VARIANT_NAMES),
        default=None,
        help="affine map solver for the color modes (default: ia)",
    )
    parser.add_argument(
        "--lum-match",
        action="store_true",
        help="match the style luminance statistics first (luminance mode only)",
    )
    styler_group = parser.add_mutually_exclusive_group()
    styler_group.add_argument(
        "--styler",
        default=None,
        metavar="{identity|blend:ALPHA}",
        help="built-in styler (default: identity)",
    )
    styler_group.add_argument(
        "--styler-cmd",
        default=None,
        metavar="TEMPLATE",
        help=(
            "external styler command; {content}, {style} and {output} are "
            "replaced with scratch PNG paths"
        ),
    )
    parser.add_argument(
        "--styler-timeout",
        type=float,
        default=600.0,
        metavar="SECONDS",
        help="timeout for the external styler (default: 600)",
    )
    parser.add_argument(
        "--eps",
        type=float,
        default=None,
        help="covariance regularization added before factorizing (default: 1e-8*trace/3)",
    )
    parser.add_argument("--report", default=None, help="write a JSON run report here")
    parser.add_argument(
        "--compare",
        action="store_true",
        help="run both color modes, writing OUT with .pre/.post inserted before the suffix",
    )
    return parser


def _parse_styler(args) -> StylerSpec:
    if args.styler_cmd is not None:
        return StylerSpec(
            kind="external",
            command_template=args.styler_cmd,
            timeout=args.styler_timeout,
        )
    text = args.styler or "identity"
    if text == "identity":
        return StylerSpec(kind="identity")
    if text.startswith("blend:"):
        try:
            alpha = float(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad blend alpha in {text!r}") from None
        return StylerSpec(kind="mock_blend", blend_alpha=alpha)
    raise ConfigError(f"unknown styler {text!r}, expected 'identity' or 'blend:ALPHA'")


def _tagged(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix}"))


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.compare and args.mode is not None:
            raise ConfigError("--compare runs both color modes; do not pass --mode")
        mode = _MODE_NAMES[args.mode or "color-pre"]
        if args.lum_match and (args.compare or mode != "luminance"):
            raise ConfigError("--lum-match only applies to --mode luminance")
        if args.variant is not None and mode == "luminance":
            raise ConfigError("--variant does not apply to luminance mode")
        variant = _VARIANT_NAMES[args.variant or "ia"]
        styler = _parse_styler(args)

        def config(run_mode, out_path, report_path):
            return PipelineConfig(
                content_path=args.content,
                style_path=args.style,
                output_path=out_path,
                mode=run_mode,
                variant=variant,
                lum_match=args.lum_match,
                styler=styler,
                eps=args.eps,
                report_path=report_path,
            )

        if args.compare:
            configs = [
                config("color_pre", _tagged(args.out, "pre"),
                       _tagged(args.report, "pre") if args.report else None),
                config("color_post", _tagged(args.out, "post"),
                       _tagged(args.report, "post") if args.report else None),
            ]
        else:
            configs = [config(mode, args.out, args.report)]
    except ConfigError as exc:
        print(f"colorkeep: error: {exc}", file=sys.stderr)
        return 1

    try:
        for cfg in configs:
            _, report = run(cfg)
            for warning in report.warnings:
                print(f"colorkeep: warning: {warning}", file=sys.stderr)
            wrote = cfg.output_path
            if cfg.report_path:
                wrote += f" (report: {cfg.report_path})"
            print(f"{cfg.mode}: wrote {wrote}")
    except ColorKeepError as exc:
        stage = f" [stage: {exc.stage}]" if exc.stage else ""
        print(f"colorkeep: error{stage}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"colorkeep: error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    entry()
