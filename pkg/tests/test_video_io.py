import json

import numpy as np
import pytest

from texrd.video_io import (
    ManifestError, frame_size_bytes, load_manifest, read_luma_frames, segment_gops, write_yuv420,
)


def _clip(tmp_path, frames, name="a.yuv", **extra):
    write_yuv420(tmp_path / name, frames)
    h, w = frames[0].shape
    entry = {"id": name.split(".")[0], "path": name, "width": w, "height": h, "fps": 25,
             "frames": len(frames), **extra}
    return entry


def _manifest(tmp_path, entries):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(entries))
    return p


def test_frame_size_even_and_odd():
    assert frame_size_bytes(256, 256) == 256 * 256 * 3 // 2
    # chroma planes round up for odd sizes
    assert frame_size_bytes(5, 3) == 15 + 2 * 3 * 2


def test_roundtrip_luma(tmp_path, rng):
    frames = [rng.integers(0, 256, (6, 10), dtype=np.uint8) for _ in range(5)]
    m = _manifest(tmp_path, [_clip(tmp_path, frames, **{"class": "static"})])
    (entry,) = load_manifest(m)
    assert entry.texture_class == "static"
    assert entry.path == tmp_path / "a.yuv"
    got = read_luma_frames(entry, 1, 4)
    assert len(got) == 3
    for g, f in zip(got, frames[1:4]):
        assert g.dtype == np.uint8 and g.shape == (6, 10)
        np.testing.assert_array_equal(g, f)


def test_odd_dimensions_roundtrip(tmp_path, rng):
    frames = [rng.integers(0, 256, (7, 9), dtype=np.uint8) for _ in range(3)]
    (entry,) = load_manifest(_manifest(tmp_path, [_clip(tmp_path, frames)]))
    np.testing.assert_array_equal(read_luma_frames(entry, 2, 3)[0], frames[2])


def test_bad_frame_range(tmp_path, rng):
    frames = [rng.integers(0, 256, (4, 4), dtype=np.uint8) for _ in range(3)]
    (entry,) = load_manifest(_manifest(tmp_path, [_clip(tmp_path, frames)]))
    for start, stop in [(-1, 2), (2, 2), (0, 4)]:
        with pytest.raises(IndexError):
            read_luma_frames(entry, start, stop)


def test_short_file_rejected(tmp_path, rng):
    frames = [rng.integers(0, 256, (4, 4), dtype=np.uint8) for _ in range(3)]
    e = _clip(tmp_path, frames)
    e["frames"] = 4
    with pytest.raises(ManifestError, match="bytes"):
        load_manifest(_manifest(tmp_path, [e]))


@pytest.mark.parametrize("change", [{"width": 0}, {"height": -2}, {"frames": 1}, {"class": "wobbly"}])
def test_invalid_entries(tmp_path, rng, change):
    frames = [rng.integers(0, 256, (4, 4), dtype=np.uint8) for _ in range(3)]
    e = _clip(tmp_path, frames)
    e.update(change)
    with pytest.raises(ManifestError):
        load_manifest(_manifest(tmp_path, [e]))


def test_duplicate_ids_and_malformed(tmp_path, rng):
    frames = [rng.integers(0, 256, (4, 4), dtype=np.uint8) for _ in range(3)]
    e = _clip(tmp_path, frames)
    with pytest.raises(ManifestError, match="duplicate"):
        load_manifest(_manifest(tmp_path, [e, dict(e)]))
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ManifestError):
        load_manifest(p)
    p.write_text('{"id": 1}')
    with pytest.raises(ManifestError, match="array"):
        load_manifest(p)
    with pytest.raises(ManifestError):
        load_manifest(_manifest(tmp_path, [{"id": "x"}]))


def test_empty_manifest(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    assert load_manifest(p) == []
    p.write_text("[]")
    assert load_manifest(p) == []


def test_segment_gops():
    gops = segment_gops(240, 8, "s")
    assert len(gops) == 30
    assert gops[0].frame_range == range(0, 8)
    assert gops[-1].start == 232 and gops[-1].stop == 240
    # tail frames that do not fill a GoP are dropped
    assert len(segment_gops(21, 8)) == 2
    with pytest.raises(ValueError):
        segment_gops(5, 8)
    with pytest.raises(ValueError):
        segment_gops(10, 1)
