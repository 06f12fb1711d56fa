"""Raw planar YUV 4:2:0 reading, manifests and GoP segmentation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TEXTURE_CLASSES = ("static", "dynamic_continuous", "dynamic_discrete")


class ManifestError(ValueError):
    """Malformed manifest or an entry that fails validation."""


@dataclass(frozen=True)
class VideoManifestEntry:
    id: str
    path: Path
    width: int
    height: int
    fps: float
    frame_count: int
    texture_class: str | None = None

    @property
    def frame_bytes(self) -> int:
        return frame_size_bytes(self.width, self.height)


@dataclass(frozen=True)
class GopView:
    sequence_id: str
    gop_index: int
    start: int
    stop: int

    @property
    def frame_range(self) -> range:
        return range(self.start, self.stop)


def frame_size_bytes(width: int, height: int) -> int:
    """Bytes per 8-bit 4:2:0 frame; chroma planes are ceil(w/2) x ceil(h/2)."""
    return width * height + 2 * ((width + 1) // 2) * ((height + 1) // 2)


def _entry_from_obj(obj: dict, base: Path) -> VideoManifestEntry:
    try:
        ident = str(obj["id"])
        path = Path(obj["path"])
        width = int(obj["width"])
        height = int(obj["height"])
        fps = float(obj["fps"])
        frames = int(obj["frames"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"bad manifest entry {obj!r}: {exc}") from exc
    cls = obj.get("class")
    if cls is not None and cls not in TEXTURE_CLASSES:
        raise ManifestError(f"{ident}: unknown texture class {cls!r}")
    if width <= 0 or height <= 0:
        raise ManifestError(f"{ident}: non-positive dimensions {width}x{height}")
    if frames < 2:
        raise ManifestError(f"{ident}: frame_count must be >= 2, got {frames}")
    if not path.is_absolute():
        path = base / path
    try:
        size = path.stat().st_size
    except OSError as exc:
        raise ManifestError(f"{ident}: cannot stat {path}: {exc}") from exc
    need = frames * frame_size_bytes(width, height)
    if size < need:
        raise ManifestError(f"{ident}: {path} has {size} bytes, {frames} frames need {need}")
    return VideoManifestEntry(ident, path, width, height, fps, frames, cls)


def load_manifest(path) -> list[VideoManifestEntry]:
    """Parse a JSON manifest; relative video paths resolve against its directory.

    An empty file is an empty manifest.
    """
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    if not isinstance(data, list):
        raise ManifestError(f"{path}: manifest must be a JSON array")
    entries = [_entry_from_obj(obj, path.parent) for obj in data]
    seen = set()
    for e in entries:
        if e.id in seen:
            raise ManifestError(f"duplicate sequence id {e.id!r}")
        seen.add(e.id)
    return entries


def read_luma_frames(entry: VideoManifestEntry, start: int, stop: int) -> list[np.ndarray]:
    """Return Y planes for frames [start, stop) as (height, width) uint8 arrays."""
    if not 0 <= start < stop <= entry.frame_count:
        raise IndexError(f"frame range [{start}, {stop}) outside [0, {entry.frame_count})")
    fb = entry.frame_bytes
    ysize = entry.width * entry.height
    frames = []
    with open(entry.path, "rb") as fh:
        for k in range(start, stop):
            fh.seek(k * fb, os.SEEK_SET)
            buf = fh.read(ysize)
            if len(buf) != ysize:
                raise OSError(f"{entry.path}: short read at frame {k}")
            frames.append(np.frombuffer(buf, dtype=np.uint8).reshape(entry.height, entry.width))
    return frames


def write_yuv420(path, luma_frames, chroma_value: int = 128) -> None:
    """Write luma planes as raw 4:2:0 with flat chroma (synthetic test clips)."""
    with open(path, "wb") as fh:
        for y in luma_frames:
            y = np.asarray(y, dtype=np.uint8)
            h, w = y.shape
            fh.write(np.ascontiguousarray(y).tobytes())
            chroma = np.full(2 * ((w + 1) // 2) * ((h + 1) // 2), chroma_value, dtype=np.uint8)
            fh.write(chroma.tobytes())


def segment_gops(frame_count: int, gop_len: int = 8, sequence_id: str = "") -> list[GopView]:
    """Split into floor(frame_count / gop_len) contiguous GoPs, dropping the tail."""
    if gop_len < 2:
        raise ValueError(f"gop_len must be >= 2, got {gop_len}")
    if frame_count < gop_len:
        raise ValueError(f"frame_count {frame_count} shorter than one GoP of {gop_len}")
    return [
        GopView(sequence_id, g, g * gop_len, (g + 1) * gop_len)
        for g in range(frame_count // gop_len)
    ]
