"""Pluggable stand-in for the style-transfer stage.

The pipeline never runs a neural network itself; it hands (content, style)
to a styler and takes an image back. Three kinds exist:

* ``identity``    returns the content image unchanged (testing, dry runs)
* ``mock_blend``  per-pixel alpha blend of style over content, with the
                  style nearest-neighbor resampled to the content size
* ``external``    runs a user command; ``{content}``, ``{style}`` and
                  ``{output}`` in the template are replaced with scratch
                  PNG paths

External invocations each get a private scratch directory that is removed
whether the command succeeds or fails, so concurrent runs do not collide.
"""

from __future__ import annotations

import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    ImageFormatError,
    StylerFailedError,
    StylerTimeoutError,
)
from .imgio import FloatImage, load_image, save_image

KINDS = ("external", "identity", "mock_blend")

_PLACEHOLDERS = ("{content}", "{style}", "{output}")


@dataclass(frozen=True)
class StylerSpec:
    """How to invoke the styling stage."""

    kind: str = "identity"
    command_template: str = ""
    timeout: float = 600.0
    blend_alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown styler kind {self.kind!r}, expected one of {KINDS}")
        if self.kind == "external":
            for ph in _PLACEHOLDERS:
                count = self.command_template.count(ph)
                if count != 1:
                    raise ConfigError(
                        f"styler command must contain {ph} exactly once, found {count}"
                    )
        if self.kind == "mock_blend" and not 0.0 <= self.blend_alpha <= 1.0:
            raise ConfigError(f"blend alpha must be in [0, 1], got {self.blend_alpha}")
        if self.timeout <= 0:
            raise ConfigError(f"styler timeout must be positive, got {self.timeout}")


def nearest_resample(planes: np.ndarray, height: int, width: int) -> np.ndarray:
    """Nearest-neighbor resample of planar data to a new size (exact index math)."""
    src_h, src_w = planes.shape[1], planes.shape[2]
    rows = (np.arange(height) * src_h) // height
    cols = (np.arange(width) * src_w) // width
    return planes[:, rows[:, None], cols[None, :]]


def run_styler(
    spec: StylerSpec,
    content: FloatImage,
    style: FloatImage,
    warnings: list[str] | None = None,
    scratch_root=None,
) -> FloatImage:
    """Run the configured styler; the result always has the content's size.

    ``warnings`` collects non-fatal notes (currently: resampling an
    external result that came back at the wrong size). ``scratch_root``
    overrides where the external scratch directory is created.
    """
    if spec.kind == "identity":
        return FloatImage(content.planes.copy())

    if spec.kind == "mock_blend":
        a = spec.blend_alpha
        style_planes = style.planes
        if style_planes.shape != content.planes.shape:
            style_planes = nearest_resample(style_planes, content.height, content.width)
        out = a * style_planes + (1.0 - a) * content.planes
        np.clip(out, 0.0, 1.0, out=out)
        return FloatImage(np.ascontiguousarray(out))

    return _run_external(spec, content, style, warnings, scratch_root)


def _run_external(spec, content, style, warnings, scratch_root) -> FloatImage:
    scratch = Path(tempfile.mkdtemp(prefix="colorkeep-styler-", dir=scratch_root))
    try:
        content_path = scratch / "content.png"
        style_path = scratch / "style.png"
        output_path = scratch / "output.png"
        save_image(content, content_path)
        save_image(style, style_path)

        argv = [
            tok.replace("{content}", str(content_path))
            .replace("{style}", str(style_path))
            .replace("{output}", str(output_path))
            for tok in shlex.split(spec.command_template)
        ]
        try:
            proc = subprocess.run(
                argv, capture_output=True, timeout=spec.timeout, check=False
            )
        except subprocess.TimeoutExpired as exc:
            raise StylerTimeoutError(
                f"styler did not finish within {spec.timeout:g}s: {argv[0]}"
            ) from exc
        except OSError as exc:
            raise StylerFailedError(f"could not launch styler: {exc}") from exc
        if proc.returncode != 0:
            tail = proc.stderr.decode("utf-8", "replace").strip()[-1000:]
            raise StylerFailedError(
                f"styler exited with status {proc.returncode}: {tail or '(no stderr)'}",
                returncode=proc.returncode,
                stdout=proc.stdout,
                stderr=proc.stderr,
            )
        if not output_path.exists():
            raise ImageFormatError("styler wrote no output image")
        result = load_image(output_path)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)

    if result.planes.shape != content.planes.shape:
        if warnings is not None:
            warnings.append(
                f"styler returned {result.width}x{result.height}, "
                f"resampled to {content.width}x{content.height}"
            )
        result = FloatImage(
            np.ascontiguousarray(
                nearest_resample(result.planes, content.height, content.width)
            )
        )
    return result
