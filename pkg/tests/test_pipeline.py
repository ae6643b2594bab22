import json

import numpy as np
import pytest

from colorkeep import affine, colorstats, luminance
from colorkeep.errors import DegenerateLuminanceError, DegenerateStatsError
from colorkeep.imgio import FloatImage, load_image
from colorkeep.pipeline import (
    PipelineConfig,
    run,
    run_color_post,
    run_color_pre,
    run_luminance,
)
from colorkeep.errors import ConfigError
from colorkeep.styler import StylerSpec
from conftest import float_image, write_png


def make_config(pair, tmp_path, **kwargs):
    defaults = dict(
        content_path=str(pair["content_path"]),
        style_path=str(pair["style_path"]),
        output_path=str(tmp_path / "out.png"),
    )
    defaults.update(kwargs)
    return PipelineConfig(**defaults)


def blend(alpha):
    return StylerSpec(kind="mock_blend", blend_alpha=alpha)


def test_config_validation(image_pair, tmp_path):
    with pytest.raises(ConfigError):
        make_config(image_pair, tmp_path, mode="watercolor")
    with pytest.raises(ConfigError):
        make_config(image_pair, tmp_path, mode="color_pre", lum_match=True)
    with pytest.raises(ConfigError):
        make_config(image_pair, tmp_path, variant="pca")
    with pytest.raises(ConfigError):
        make_config(image_pair, tmp_path, eps=-1.0)


def test_color_pre_identity_styler_returns_content(image_pair, tmp_path):
    out, report = run_color_pre(make_config(image_pair, tmp_path))
    assert np.array_equal(out.planes, image_pair["content"].planes)
    assert report.map is not None
    assert report.map["variant"] == "image_analogies"


def test_color_pre_blend_full_strength(image_pair, tmp_path):
    cfg = make_config(image_pair, tmp_path, styler=blend(1.0))
    out, report = run_color_pre(cfg)
    # with alpha=1 over equal-size inputs the output is the matched style image
    c_stats = colorstats.compute_color_stats(image_pair["content"])
    s_stats = colorstats.compute_color_stats(image_pair["style"])
    amap = affine.solve_affine_map(s_stats, c_stats, cfg.variant, cfg.eps)
    expected = affine.apply_affine_map(image_pair["style"], amap)
    assert np.array_equal(out.planes, expected.planes)
    raw = affine.transform_planes(image_pair["style"].planes, amap)
    assert np.abs(raw.reshape(3, -1).mean(axis=1) - c_stats.mean).max() < 1e-6
    assert np.abs(np.cov(raw.reshape(3, -1), bias=True) - c_stats.cov).max() < 1e-6


def test_color_pre_degenerate_style_stage_label(tmp_path):
    solid = FloatImage(np.full((3, 8, 8), 0.5))
    content = float_image(40, 8, 8)
    write_png(tmp_path / "c.png", content)
    write_png(tmp_path / "s.png", solid)
    cfg = PipelineConfig(
        content_path=str(tmp_path / "c.png"),
        style_path=str(tmp_path / "s.png"),
        output_path=str(tmp_path / "out.png"),
        mode="color_pre",
        variant="cholesky",
        eps=0.0,
    )
    with pytest.raises(DegenerateStatsError) as err:
        run_color_pre(cfg)
    assert err.value.stage == "solve_affine_map"


def test_color_post_identity_styler(image_pair, tmp_path):
    out, report = run_color_post(make_config(image_pair, tmp_path, mode="color_post"))
    assert np.abs(out.planes - image_pair["content"].planes).max() < 1e-10
    assert report.map is not None


def test_color_post_blend_matches_content_stats(image_pair, tmp_path):
    cfg = make_config(image_pair, tmp_path, mode="color_post", styler=blend(0.5))
    out, report = run_color_post(cfg)
    c_stats = colorstats.compute_color_stats(image_pair["content"])
    # re-derive the styled intermediate to check the pre-clamp contract
    styled = run_styler_for_test(image_pair, 0.5)
    amap = affine.solve_affine_map(
        colorstats.compute_color_stats(styled), c_stats, cfg.variant, cfg.eps
    )
    raw = affine.transform_planes(styled.planes, amap)
    assert np.abs(raw.reshape(3, -1).mean(axis=1) - c_stats.mean).max() < 1e-6
    assert np.abs(np.cov(raw.reshape(3, -1), bias=True) - c_stats.cov).max() < 1e-6
    assert np.array_equal(out.planes, np.clip(raw, 0.0, 1.0))
    # exactly one solved map in the run
    assert report.map is not None
    assert report.map["residuals"]["mean"] < 1e-10


def run_styler_for_test(image_pair, alpha):
    from colorkeep.styler import run_styler

    return run_styler(blend(alpha), image_pair["content"], image_pair["style"])


def test_luminance_identity_roundtrip(image_pair, tmp_path):
    cfg = make_config(image_pair, tmp_path, mode="luminance")
    out, report = run_luminance(cfg)
    assert np.abs(out.planes - image_pair["content"].planes).max() < 1e-6
    assert report.map is None
    assert report.luminance is not None
    out2, _ = run_luminance(make_config(image_pair, tmp_path, mode="luminance", lum_match=True))
    assert np.array_equal(out2.planes, out.planes)  # matching only alters the style path


def test_luminance_blend_full_strength(image_pair, tmp_path):
    cfg = make_config(image_pair, tmp_path, mode="luminance", lum_match=True, styler=blend(1.0))
    out, report = run_luminance(cfg)
    content_yiq = luminance.rgb_to_yiq(image_pair["content"])
    style_y = luminance.rgb_to_yiq(image_pair["style"]).y
    matched = luminance.match_luminance(
        style_y,
        (report.luminance["content_mean"], report.luminance["content_std"]),
        (report.luminance["style_mean"], report.luminance["style_std"]),
    )
    raw = luminance.yiq_to_rgb_planes(
        luminance.YiqImage(y=matched, i=content_yiq.i, q=content_yiq.q)
    )
    in_gamut = ((raw >= 0) & (raw <= 1)).all(axis=0)
    out_yiq = luminance.rgb_to_yiq(out)
    assert np.abs(out_yiq.y - matched)[in_gamut].max() < 1e-6
    assert np.abs(out_yiq.i - content_yiq.i)[in_gamut].max() < 1e-6
    assert np.abs(out_yiq.q - content_yiq.q)[in_gamut].max() < 1e-6


def test_luminance_degenerate_style(tmp_path):
    content = float_image(41, 8, 8)
    solid = FloatImage(np.full((3, 8, 8), 0.7))
    write_png(tmp_path / "c.png", content)
    write_png(tmp_path / "s.png", solid)
    cfg = PipelineConfig(
        content_path=str(tmp_path / "c.png"),
        style_path=str(tmp_path / "s.png"),
        output_path=str(tmp_path / "out.png"),
        mode="luminance",
        lum_match=True,
    )
    with pytest.raises(DegenerateLuminanceError) as err:
        run_luminance(cfg)
    assert err.value.stage == "match_luminance"


@pytest.mark.parametrize("mode", ["color_pre", "color_post", "luminance"])
def test_output_mean_moves_toward_content(image_pair, tmp_path, mode):
    cfg = make_config(image_pair, tmp_path, mode=mode, styler=blend(0.8))
    out, _ = run(cfg)
    c_mean = colorstats.compute_color_stats(image_pair["content"]).mean
    s_mean = colorstats.compute_color_stats(image_pair["style"]).mean
    out_mean = colorstats.compute_color_stats(out).mean
    assert np.linalg.norm(out_mean - c_mean) <= np.linalg.norm(s_mean - c_mean)


def test_run_writes_output_and_report(image_pair, tmp_path):
    cfg = make_config(
        image_pair,
        tmp_path,
        styler=blend(0.5),
        report_path=str(tmp_path / "report.json"),
    )
    out, report = run(cfg)
    loaded = load_image(tmp_path / "out.png")
    assert loaded.planes.shape == out.planes.shape
    data = json.loads((tmp_path / "report.json").read_text())
    assert set(data) == {
        "mode", "variant", "lum_match", "content_stats", "style_stats",
        "map", "luminance", "timings_ms", "warnings",
    }
    assert data["mode"] == "color_pre"
    assert data["map"]["residuals"]["cov"] >= 0.0
    assert data["content_stats"]["pixels"] == 24 * 18
    assert all(v >= 0 for v in data["timings_ms"].values())


def test_repeated_runs_byte_identical(image_pair, tmp_path):
    cfg1 = make_config(image_pair, tmp_path, styler=blend(0.3),
                       output_path=str(tmp_path / "a.png"))
    cfg2 = make_config(image_pair, tmp_path, styler=blend(0.3),
                       output_path=str(tmp_path / "b.png"))
    run(cfg1)
    run(cfg2)
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_degenerate_regularized_warns_large_gain(tmp_path):
    solid = FloatImage(np.full((3, 8, 8), 0.5))
    content = float_image(42, 8, 8)
    write_png(tmp_path / "c.png", content)
    write_png(tmp_path / "s.png", solid)
    cfg = PipelineConfig(
        content_path=str(tmp_path / "c.png"),
        style_path=str(tmp_path / "s.png"),
        output_path=str(tmp_path / "out.png"),
        mode="color_pre",
        eps=1e-9,
    )
    _, report = run_color_pre(cfg)
    assert any("large" in w for w in report.warnings)
