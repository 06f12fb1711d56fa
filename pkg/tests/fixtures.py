"""Small on-disk inputs shared by the CLI and acceptance tests."""

import json

import numpy as np

from conftest import smooth_texture
from texrd.formats import format_feature_csv, write_rd_points
from texrd.synthetic import exp_fleet
from texrd.video_io import write_yuv420


def write_clip(directory, ident, frames=24, size=64, step=1, seed=0, cls="dynamic_continuous"):
    base = smooth_texture((size, size), sigma=1.5, seed=seed).round().astype(np.uint8)
    name = f"{ident}.yuv"
    write_yuv420(directory / name, [np.roll(base, k * step, axis=1) for k in range(frames)])
    return {"id": ident, "path": name, "width": size, "height": size, "fps": 25,
            "frames": frames, "class": cls}


def write_manifest(directory, entries, name="manifest.json"):
    p = directory / name
    p.write_text(json.dumps(entries))
    return p


def write_fleet(directory, n_sequences, gops, seed=1, test_sequences=0):
    """Features and RD points CSVs for an exp_fleet; optionally a held-out pair."""
    feats, curves = exp_fleet(n_sequences, gops, seed)
    cut = (n_sequences - test_sequences) * gops
    out = {}
    for tag, sl in (("train", slice(0, cut)), ("test", slice(cut, None))):
        if tag == "test" and not test_sequences:
            continue
        fp, pp = directory / f"{tag}_features.csv", directory / f"{tag}_points.csv"
        fp.write_text(format_feature_csv(feats[sl], "{}"))
        write_rd_points(pp, curves[sl])
        out[tag] = (fp, pp)
    return out
