"""8-bit image I/O: minimal PNG and binary PPM codecs plus float conversion.

Decoded images are interleaved uint8 RGB; processing happens on planar
float64 in [0, 1]. Supported containers are deliberately narrow:

* PNG, 8 bits per sample, color types gray / gray+alpha / RGB / RGBA,
  no interlacing, no palette. Alpha is stripped, grayscale replicated.
* binary PPM (P6) with maxval 255. Encoding is byte-exact:
  ``P6\\n{width} {height}\\n255\\n`` followed by the raw samples.

Both codecs roundtrip sample-exactly; PNG output always uses color type 2
with unfiltered scanlines.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionError,
    ImageFormatError,
    NumericError,
    TruncatedDataError,
    UnsupportedDepthError,
)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_PPM_WHITESPACE = b" \t\r\n\x0b\x0c"

# PNG color type -> samples per pixel (8-bit only)
_PNG_CHANNELS = {0: 1, 2: 3, 4: 2, 6: 4}


@dataclass(frozen=True, eq=False)
class Uint8Image:
    """Interleaved 8-bit RGB image; ``pixels`` has shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.dtype != np.uint8:
            raise TypeError("pixels must be a uint8 numpy array")
        if p.ndim != 3 or p.shape[2] != 3:
            raise DimensionError(f"expected (height, width, 3) pixels, got {p.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise DimensionError(f"image dimensions must be at least 1x1, got {p.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class FloatImage:
    """Planar float64 RGB image; ``planes`` has shape (3, height, width), samples in [0, 1]."""

    planes: np.ndarray

    def __post_init__(self):
        p = self.planes
        if not isinstance(p, np.ndarray) or p.dtype != np.float64:
            raise TypeError("planes must be a float64 numpy array")
        if p.ndim != 3 or p.shape[0] != 3:
            raise DimensionError(f"expected (3, height, width) planes, got {p.shape}")
        if p.shape[1] < 1 or p.shape[2] < 1:
            raise DimensionError(f"image dimensions must be at least 1x1, got {p.shape}")
        if not np.isfinite(p).all():
            raise NumericError("image contains non-finite samples")
        if float(p.min()) < 0.0 or float(p.max()) > 1.0:
            raise NumericError("image samples outside [0, 1]")

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def height(self) -> int:
        return self.planes.shape[1]


def to_float(img: Uint8Image) -> FloatImage:
    """Map samples v -> v/255 exactly and deinterleave into planes."""
    planes = img.pixels.astype(np.float64).transpose(2, 0, 1) / 255.0
    return FloatImage(np.ascontiguousarray(planes))


def to_u8(img: FloatImage) -> Uint8Image:
    """Quantize: v -> round(clamp(v, 0, 1) * 255), halves away from zero."""
    p = img.planes
    if not np.isfinite(p).all():
        raise NumericError("cannot quantize non-finite samples")
    v = np.clip(p, 0.0, 1.0) * 255.0
    # all values are >= 0 here, so floor(v + 0.5) rounds halves away from zero
    q = np.floor(v + 0.5).astype(np.uint8)
    return Uint8Image(np.ascontiguousarray(q.transpose(1, 2, 0)))


def decode_image(data: bytes, fmt: str) -> Uint8Image:
    """Decode PNG or PPM bytes into a 3-channel Uint8Image."""
    if fmt == "png":
        return _decode_png(data)
    if fmt == "ppm":
        return _decode_ppm(data)
    raise ValueError(f"unknown format {fmt!r}, expected 'png' or 'ppm'")


def encode_image(img: Uint8Image, fmt: str) -> bytes:
    """Encode a Uint8Image; decode(encode(img)) is sample-identical."""
    if fmt == "png":
        return _encode_png(img)
    if fmt == "ppm":
        return _encode_ppm(img)
    raise ValueError(f"unknown format {fmt!r}, expected 'png' or 'ppm'")


def sniff_format(data: bytes) -> str:
    """Guess 'png' or 'ppm' from magic bytes."""
    if data.startswith(PNG_SIGNATURE):
        return "png"
    if data.startswith(b"P6"):
        return "ppm"
    raise ImageFormatError("unrecognized image data (not PNG or binary PPM)")


def load_image(path) -> FloatImage:
    """Read a PNG or PPM file into the working float representation."""
    data = Path(path).read_bytes()
    return to_float(decode_image(data, sniff_format(data)))


def save_image(img: FloatImage, path) -> None:
    """Quantize and write; format chosen by extension (.ppm -> PPM, else PNG)."""
    p = Path(path)
    fmt = "ppm" if p.suffix.lower() in (".ppm", ".pnm") else "png"
    p.write_bytes(encode_image(to_u8(img), fmt))


# --- PPM (P6) ---------------------------------------------------------------


def _ppm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _PPM_WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#' comment runs to end of line
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _PPM_WHITESPACE:
        pos += 1
    if start == pos:
        raise TruncatedDataError("PPM header ended before all fields were read")
    return data[start:pos], pos


def _decode_ppm(data: bytes) -> Uint8Image:
    magic, pos = _ppm_token(data, 0)
    if magic != b"P6":
        raise ImageFormatError(f"not a binary PPM (magic {magic!r}, expected b'P6')")
    fields = []
    for _ in range(3):
        tok, pos = _ppm_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ImageFormatError(f"invalid PPM header field {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DimensionError(f"PPM dimensions must be at least 1x1, got {width}x{height}")
    if maxval != 255:
        if 255 < maxval <= 65535:
            raise UnsupportedDepthError(f"PPM maxval {maxval} means >8-bit samples")
        raise ImageFormatError(f"unsupported PPM maxval {maxval}")
    # exactly one whitespace byte separates the header from the samples
    if pos >= len(data) or data[pos] not in _PPM_WHITESPACE:
        raise TruncatedDataError("PPM payload missing after header")
    pos += 1
    need = width * height * 3
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedDataError(
            f"PPM payload has {len(payload)} bytes, expected {need}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return Uint8Image(pixels.copy())


def _encode_ppm(img: Uint8Image) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


# --- PNG ---------------------------------------------------------------------


def _png_chunk(ctype: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + ctype
        + payload
        + struct.pack(">I", zlib.crc32(ctype + payload) & 0xFFFFFFFF)
    )


def _encode_png(img: Uint8Image) -> bytes:
    h, w = img.height, img.width
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = bytearray()
    body = img.pixels.tobytes()
    stride = w * 3
    for y in range(h):
        raw.append(0)  # filter type: None
        raw += body[y * stride : (y + 1) * stride]
    return (
        PNG_SIGNATURE
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", zlib.compress(bytes(raw), 6))
        + _png_chunk(b"IEND", b"")
    )


def _decode_png(data: bytes) -> Uint8Image:
    if not data.startswith(PNG_SIGNATURE):
        raise ImageFormatError("missing PNG signature")
    pos = len(PNG_SIGNATURE)
    header = None
    idat = []
    seen_iend = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise TruncatedDataError("PNG ends inside a chunk header")
        length, ctype = struct.unpack(">I4s", data[pos : pos + 8])
        if pos + 12 + length > len(data):
            raise TruncatedDataError(f"PNG ends inside chunk {ctype!r}")
        payload = data[pos + 8 : pos + 8 + length]
        (crc,) = struct.unpack(">I", data[pos + 8 + length : pos + 12 + length])
        if zlib.crc32(ctype + payload) & 0xFFFFFFFF != crc:
            raise ImageFormatError(f"CRC mismatch in chunk {ctype!r}")
        pos += 12 + length

        if ctype == b"IHDR":
            if header is not None:
                raise ImageFormatError("duplicate IHDR chunk")
            header = _parse_ihdr(payload)
        elif ctype == b"IDAT":
            if header is None:
                raise ImageFormatError("IDAT before IHDR")
            idat.append(payload)
        elif ctype == b"IEND":
            seen_iend = True
            break
        # other chunks are ancillary for our purposes and skipped
    if header is None:
        raise ImageFormatError("PNG has no IHDR chunk")
    if not seen_iend:
        raise TruncatedDataError("PNG ends before IEND")
    if not idat:
        raise ImageFormatError("PNG has no IDAT data")

    width, height, channels = header
    try:
        raw = zlib.decompress(b"".join(idat))
    except zlib.error as exc:
        raise ImageFormatError(f"corrupt PNG data stream: {exc}") from None
    stride = width * channels
    expected = height * (stride + 1)
    if len(raw) < expected:
        raise TruncatedDataError(
            f"PNG image data has {len(raw)} bytes, expected {expected}"
        )
    if len(raw) > expected:
        raise ImageFormatError("PNG image data longer than the declared size")

    recon = _unfilter(raw, height, stride, channels)
    arr = np.frombuffer(bytes(recon), dtype=np.uint8).reshape(height, width, channels)
    if channels == 1:
        rgb = np.repeat(arr, 3, axis=2)
    elif channels == 2:  # gray + alpha: replicate gray, drop alpha
        rgb = np.repeat(arr[:, :, :1], 3, axis=2)
    elif channels == 3:
        rgb = arr
    else:  # RGBA: strip alpha
        rgb = arr[:, :, :3]
    return Uint8Image(np.ascontiguousarray(rgb))


def _parse_ihdr(payload: bytes) -> tuple[int, int, int]:
    if len(payload) != 13:
        raise ImageFormatError(f"IHDR payload must be 13 bytes, got {len(payload)}")
    width, height, depth, color, comp, filt, interlace = struct.unpack(
        ">IIBBBBB", payload
    )
    if width < 1 or height < 1:
        raise DimensionError(f"PNG dimensions must be at least 1x1, got {width}x{height}")
    if depth != 8:
        raise UnsupportedDepthError(f"only 8-bit PNG supported, got depth {depth}")
    if color not in _PNG_CHANNELS:
        raise ImageFormatError(f"unsupported PNG color type {color}")
    if comp != 0 or filt != 0:
        raise ImageFormatError("unsupported PNG compression or filter method")
    if interlace != 0:
        raise ImageFormatError("interlaced PNG is not supported")
    return width, height, _PNG_CHANNELS[color]


def _unfilter(raw: bytes, height: int, stride: int, bpp: int) -> bytearray:
    """Undo per-scanline PNG filtering (types 0-4)."""
    out = bytearray(height * stride)
    prev = bytes(stride)
    for y in range(height):
        ftype = raw[y * (stride + 1)]
        line = bytearray(raw[y * (stride + 1) + 1 : (y + 1) * (stride + 1)])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(bpp, stride):
                line[i] = (line[i] + line[i - bpp]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                a = line[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + ((a + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                a = line[i - bpp] if i >= bpp else 0
                b = prev[i]
                c = prev[i - bpp] if i >= bpp else 0
                p = a + b - c
                pa = abs(p - a)
                pb = abs(p - b)
                pc = abs(p - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                line[i] = (line[i] + pred) & 0xFF
        else:
            raise ImageFormatError(f"unknown PNG filter type {ftype}")
        out[y * stride : (y + 1) * stride] = line
        prev = line
    return out
