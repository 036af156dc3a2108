#!/usr/bin/env python3
"""Builds the natural-image test fixtures under tests/data/natural.

Sources are the sample photographs bundled with scikit-image, scikit-learn
and matplotlib. Every source is box-downscaled by an integer factor (which
also wipes any 8x8 grid left by a prior JPEG encode) and center-cropped to
256x256.
"""
import os
import sys

import numpy as np
from PIL import Image

SKIMAGE = "/usr/local/lib/python3.10/dist-packages/skimage/data"
SKLEARN = "/usr/local/lib/python3.10/dist-packages/sklearn/datasets/images"
MPL = "/usr/local/lib/python3.10/dist-packages/matplotlib/mpl-data/sample_data"

# (name, path, downscale factor)
SOURCES = [
    ("astronaut", f"{SKIMAGE}/astronaut.png", 2),
    ("brick", f"{SKIMAGE}/brick.png", 1),
    ("camera", f"{SKIMAGE}/camera.png", 2),
    ("cell", f"{SKIMAGE}/cell.png", 2),
    ("chelsea", f"{SKIMAGE}/chelsea.png", 1),
    ("clock", f"{SKIMAGE}/clock_motion.png", 1),
    ("coffee", f"{SKIMAGE}/coffee.png", 1),
    ("coins", f"{SKIMAGE}/coins.png", 1),
    ("grass", f"{SKIMAGE}/grass.png", 2),
    ("gravel", f"{SKIMAGE}/gravel.png", 2),
    ("ihc", f"{SKIMAGE}/ihc.png", 2),
    ("moon", f"{SKIMAGE}/moon.png", 1),
    ("motorcycle_left", f"{SKIMAGE}/motorcycle_left.png", 1),
    ("motorcycle_right", f"{SKIMAGE}/motorcycle_right.png", 1),
    ("rocket", f"{SKIMAGE}/rocket.jpg", 1),
    ("hubble", f"{SKIMAGE}/hubble_deep_field.jpg", 2),
    ("retina", f"{SKIMAGE}/retina.jpg", 4),
    ("china", f"{SKLEARN}/china.jpg", 1),
    ("flower", f"{SKLEARN}/flower.jpg", 1),
    ("grace_hopper", f"{MPL}/grace_hopper.jpg", 2),
    ("astronaut_detail", f"{SKIMAGE}/astronaut.png", 1),
    ("camera_detail", f"{SKIMAGE}/camera.png", 1),
]

COLOR = {"astronaut", "chelsea", "coffee", "ihc", "motorcycle_left", "rocket",
         "china", "flower", "grace_hopper", "astronaut_detail"}

SIZE = 256


def box_downscale(a, f):
    if f == 1:
        return a
    h, w = a.shape[0] // f * f, a.shape[1] // f * f
    a = a[:h, :w].astype(np.float64)
    a = a.reshape(h // f, f, w // f, f, *a.shape[2:]).mean(axis=(1, 3))
    return np.clip(np.round(a), 0, 255).astype(np.uint8)


def center_crop(a, size):
    h, w = a.shape[:2]
    if h < size or w < size:
        sys.exit(f"source too small: {a.shape}")
    top, left = (h - size) // 2, (w - size) // 2
    return a[top:top + size, left:left + size]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "tests", "data", "natural")
    os.makedirs(f"{out}/gray", exist_ok=True)
    os.makedirs(f"{out}/color", exist_ok=True)
    for name, path, factor in SOURCES:
        rgb = np.asarray(Image.open(path).convert("RGB"))
        rgb = center_crop(box_downscale(rgb, factor), SIZE)
        # Full-range BT.601 luma.
        y = rgb.astype(np.float64) @ np.array([0.299, 0.587, 0.114])
        y = np.clip(np.round(y), 0, 255).astype(np.uint8)
        Image.fromarray(y, "L").save(f"{out}/gray/{name}.png")
        if name in COLOR:
            Image.fromarray(rgb, "RGB").save(f"{out}/color/{name}.png")


if __name__ == "__main__":
    main()
