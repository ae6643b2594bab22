"""End-to-end runs: color transfer before or after styling, or luminance-only styling.

``color_pre``   match the style image's colors to the content's, then style.
``color_post``  style first, then match the result's colors to the content's.
``luminance``   style the luminance planes only (optionally matching the
                style luminance statistics first) and reuse the content's
                chrominance.

Every run produces a RunReport: the input statistics, any solved map with
its residuals and transport cost, luminance statistics where relevant,
per-stage timings and accumulated warnings.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from . import affine, colorstats, luminance
from .errors import ColorKeepError, ConfigError
from .imgio import FloatImage, load_image, save_image
from .styler import StylerSpec, run_styler

MODES = ("color_pre", "color_post", "luminance")

# a solved map whose residuals exceed this (relative) gets a report warning
RESIDUAL_WARN_REL = 1e-8


@dataclass
class PipelineConfig:
    content_path: str
    style_path: str
    output_path: str
    mode: str = "color_pre"
    variant: str = "image_analogies"
    lum_match: bool = False
    styler: StylerSpec = field(default_factory=StylerSpec)
    eps: float | None = None
    report_path: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.mode != "luminance" and self.lum_match:
            raise ConfigError("luminance matching only applies to luminance mode")
        if self.mode != "luminance" and self.variant not in affine.VARIANTS:
            raise ConfigError(
                f"unknown variant {self.variant!r}, expected one of {affine.VARIANTS}"
            )
        if self.eps is not None and self.eps < 0:
            raise ConfigError(f"eps must be non-negative, got {self.eps}")


@dataclass
class RunReport:
    mode: str
    variant: str | None
    lum_match: bool
    content_stats: dict | None = None
    style_stats: dict | None = None
    map: dict | None = None
    luminance: dict | None = None
    timings_ms: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "variant": self.variant,
            "lum_match": self.lum_match,
            "content_stats": self.content_stats,
            "style_stats": self.style_stats,
            "map": self.map,
            "luminance": self.luminance,
            "timings_ms": self.timings_ms,
            "warnings": list(self.warnings),
        }


@contextmanager
def _stage(report: RunReport, name: str):
    """Time a stage and tag errors escaping it with the stage name."""
    t0 = time.monotonic()
    try:
        yield
    except ColorKeepError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    finally:
        report.timings_ms[name] = (time.monotonic() - t0) * 1e3


def _new_report(cfg: PipelineConfig) -> RunReport:
    return RunReport(
        mode=cfg.mode,
        variant=cfg.variant if cfg.mode != "luminance" else None,
        lum_match=cfg.lum_match,
    )


def _load_inputs(cfg, report) -> tuple[FloatImage, FloatImage]:
    with _stage(report, "load_images"):
        content = load_image(cfg.content_path)
        style = load_image(cfg.style_path)
    return content, style


def _input_stats(content, style, report):
    with _stage(report, "compute_stats"):
        c_stats = colorstats.compute_color_stats(content)
        s_stats = colorstats.compute_color_stats(style)
    report.content_stats = colorstats.stats_to_dict(c_stats)
    report.style_stats = colorstats.stats_to_dict(s_stats)
    return c_stats, s_stats


def _solve(source, target, cfg, report) -> affine.AffineColorMap:
    with _stage(report, "solve_affine_map"):
        amap = affine.solve_affine_map(source, target, cfg.variant, cfg.eps)
    report.map = affine.map_report(amap, source, target)
    rel = affine.relative_cov_residual(amap, source, target)
    mean_res = report.map["residuals"]["mean"]
    if rel > RESIDUAL_WARN_REL or mean_res > RESIDUAL_WARN_REL:
        report.warnings.append(
            f"solved map residuals above tolerance (cov {rel:.3e}, mean {mean_res:.3e})"
        )
    norm = affine.map_norm(amap)
    if norm > affine.LARGE_MAP_NORM:
        report.warnings.append(
            f"map gain is very large (|A| = {norm:.3e}); "
            "the source colors are nearly degenerate"
        )
    return amap


def run_color_pre(cfg: PipelineConfig) -> tuple[FloatImage, RunReport]:
    """Match the style image's colors to the content's, then run the styler."""
    report = _new_report(cfg)
    content, style = _load_inputs(cfg, report)
    c_stats, s_stats = _input_stats(content, style, report)
    amap = _solve(s_stats, c_stats, cfg, report)
    with _stage(report, "apply_affine_map"):
        matched_style = affine.apply_affine_map(style, amap)
    with _stage(report, "run_styler"):
        out = run_styler(cfg.styler, content, matched_style, warnings=report.warnings)
    return out, report


def run_color_post(cfg: PipelineConfig) -> tuple[FloatImage, RunReport]:
    """Run the styler on the raw inputs, then match the result to the content."""
    report = _new_report(cfg)
    content, style = _load_inputs(cfg, report)
    c_stats, _ = _input_stats(content, style, report)
    with _stage(report, "run_styler"):
        styled = run_styler(cfg.styler, content, style, warnings=report.warnings)
    with _stage(report, "compute_styled_stats"):
        t_stats = colorstats.compute_color_stats(styled)
    amap = _solve(t_stats, c_stats, cfg, report)
    with _stage(report, "apply_affine_map"):
        out = affine.apply_affine_map(styled, amap)
    return out, report


def run_luminance(cfg: PipelineConfig) -> tuple[FloatImage, RunReport]:
    """Style the luminance planes only; keep the content's chrominance."""
    report = _new_report(cfg)
    content, style = _load_inputs(cfg, report)
    _input_stats(content, style, report)
    with _stage(report, "rgb_to_yiq"):
        content_yiq = luminance.rgb_to_yiq(content)
        style_yiq = luminance.rgb_to_yiq(style)
    with _stage(report, "luminance_stats"):
        mu_c, sigma_c = colorstats.compute_scalar_stats(content_yiq.y)
        mu_s, sigma_s = colorstats.compute_scalar_stats(style_yiq.y)
    report.luminance = {
        "content_mean": mu_c,
        "content_std": sigma_c,
        "style_mean": mu_s,
        "style_std": sigma_s,
    }
    style_y = style_yiq.y
    if cfg.lum_match:
        with _stage(report, "match_luminance"):
            style_y = luminance.match_luminance(
                style_y, (mu_c, sigma_c), (mu_s, sigma_s)
            )
    with _stage(report, "run_styler"):
        styled = run_styler(
            cfg.styler,
            luminance.gray_image(content_yiq.y),
            luminance.gray_image(style_y),
            warnings=report.warnings,
        )
    with _stage(report, "recombine"):
        styled_y = luminance.rgb_to_yiq(styled).y
        out = luminance.recombine(styled_y, content_yiq)
    return out, report


_RUNNERS = {
    "color_pre": run_color_pre,
    "color_post": run_color_post,
    "luminance": run_luminance,
}


def run(cfg: PipelineConfig) -> tuple[FloatImage, RunReport]:
    """Dispatch on mode, write the output image and the optional JSON report."""
    out, report = _RUNNERS[cfg.mode](cfg)
    with _stage(report, "write_output"):
        save_image(out, cfg.output_path)
    if cfg.report_path:
        Path(cfg.report_path).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return out, report
