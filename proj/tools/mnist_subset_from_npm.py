#!/usr/bin/env python3
"""Build an IDX-format MNIST subset from the digits bundled in the npm `mnist` package.

The package ships roughly 1000 28x28 digits per class as JSON arrays of
grey values in [0, 1]. They are re-encoded as uint8 IDX files (the same
layout as the original MNIST distribution), class-interleaved under a
fixed seed so that any prefix is roughly class balanced.

    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    python3 tools/mnist_subset_from_npm.py package/src/digits data/mnist
"""
import argparse
import json
import pathlib
import random
import struct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--seed", type=int, default=20170918)
    args = ap.parse_args()

    samples = []
    for label in range(10):
        raw = json.loads((args.digits_dir / f"{label}.json").read_text())["data"]
        count = len(raw) // 784
        for i in range(count):
            pix = bytes(min(255, max(0, round(v * 255))) for v in raw[i * 784:(i + 1) * 784])
            samples.append((pix, label))
    random.Random(args.seed).shuffle(samples)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.out_dir / "images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for pix, _ in samples:
            f.write(pix)
    with open(args.out_dir / "labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for _, label in samples))
    print(f"wrote {len(samples)} samples to {args.out_dir}")


if __name__ == "__main__":
    main()
