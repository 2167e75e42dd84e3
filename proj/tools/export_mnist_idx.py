#!/usr/bin/env python3
# Copyright 2026 The HARM Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the MNIST digits 0 and 1 bundled with mlxtend as IDX files.

mlxtend ships 500 images per digit. They are shuffled with a fixed seed and
split into train/test sets in the standard IDX layout read by `harm`.
"""

import argparse
import pathlib
import struct

import numpy as np
from mlxtend.data import mnist_data


def write_idx_images(path, images):
    n, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/mnist01")
    parser.add_argument("--train", type=int, default=800)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    x, y = mnist_data()
    keep = (y == 0) | (y == 1)
    x = np.rint(x[keep]).reshape(-1, 28, 28)
    y = y[keep]
    order = np.random.default_rng(args.seed).permutation(len(y))
    x, y = x[order], y[order]
    if not 0 < args.train < len(y):
        parser.error("--train must leave at least one test image")

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_idx_images(out / "train-images-idx3-ubyte", x[: args.train])
    write_idx_labels(out / "train-labels-idx1-ubyte", y[: args.train])
    write_idx_images(out / "t10k-images-idx3-ubyte", x[args.train :])
    write_idx_labels(out / "t10k-labels-idx1-ubyte", y[args.train :])
    print(f"wrote {args.train} train / {len(y) - args.train} test images to {out}")


if __name__ == "__main__":
    main()
