#!/usr/bin/env python3
"""Write the bundled sklearn benchmark datasets to CSV for the ffmlp CLI.

Produces iris.csv, wine.csv, and bcw.csv in the output directory, each with a
header row and a trailing integer ``target`` column. The Pima diabetes CSV is
not bundled anywhere offline; place the published file (768 rows, columns
Pregnancies..Outcome) next to these as pima.csv to run its benchmarks.
"""

import argparse
import os

from sklearn.datasets import load_breast_cancer, load_iris, load_wine


def write(path, data):
    names = [n.replace(" (cm)", "").replace(" ", "_").replace("/", "_") for n in data.feature_names]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + ",target\n")
        for row, label in zip(data.data, data.target):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")
    print(f"wrote {path}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="data")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    write(os.path.join(args.out_dir, "iris.csv"), load_iris())
    write(os.path.join(args.out_dir, "wine.csv"), load_wine())
    write(os.path.join(args.out_dir, "bcw.csv"), load_breast_cancer())


if __name__ == "__main__":
    main()
