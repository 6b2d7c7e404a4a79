#!/usr/bin/env python3
"""Convert bundled UCI dataset copies into LIBSVM text files under data/.

Sources (no direct UCI download needed):
  - letter, satimage, shuttle: .rda files from the CRAN `mlbench` package
    (src/contrib/Archive/mlbench/mlbench_2.1-6.tar.gz, data/ directory)
  - segment: segment.csv.zip bundled inside the `river` Python package sdist

Usage:
  python3 scripts/convert_uci_data.py --mlbench-data /path/to/mlbench/data \
      --river-segment /path/to/segment.csv.zip --out data/

Requires: pandas, rdata  (pip install rdata)
"""
import argparse
import io
import os
import zipfile


def fmt(v: float) -> str:
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def write_libsvm(path, labels, rows):
    with open(path, "w") as fh:
        for label, row in zip(labels, rows):
            parts = [fmt(label) if isinstance(label, (int, float)) else str(label)]
            for j, v in enumerate(row):
                if float(v) != 0.0:
                    parts.append(f"{j + 1}:{fmt(v)}")
            fh.write(" ".join(parts) + "\n")
    print(f"wrote {path}: {len(labels)} rows")


def convert_rda(rda_path, frame_name, label_col, out_path, label_map=None):
    import rdata

    df = rdata.read_rda(rda_path)[frame_name]
    feature_cols = [c for c in df.columns if c != label_col]
    raw = df[label_col]
    if label_map is None:
        uniq = sorted(raw.astype(str).unique())
        label_map = {u: i + 1 for i, u in enumerate(uniq)}
    labels = [label_map[str(v)] for v in raw]
    rows = df[feature_cols].to_numpy(dtype=float)
    write_libsvm(out_path, labels, rows)


def convert_segment(zip_path, out_path):
    import pandas as pd

    z = zipfile.ZipFile(zip_path)
    df = pd.read_csv(io.BytesIO(z.read(z.namelist()[0])))
    uniq = sorted(df["category"].astype(str).unique())
    label_map = {u: i + 1 for i, u in enumerate(uniq)}
    labels = [label_map[str(v)] for v in df["category"]]
    rows = df.drop(columns=["category"]).to_numpy(dtype=float)
    write_libsvm(out_path, labels, rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mlbench-data", required=True)
    ap.add_argument("--river-segment", required=True)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    convert_segment(args.river_segment, os.path.join(args.out, "segment.libsvm"))
    convert_rda(
        os.path.join(args.mlbench_data, "LetterRecognition.rda"),
        "LetterRecognition",
        "lettr",
        os.path.join(args.out, "letter.libsvm"),
    )
    convert_rda(
        os.path.join(args.mlbench_data, "Satellite.rda"),
        "Satellite",
        "classes",
        os.path.join(args.out, "satimage.libsvm"),
    )


if __name__ == "__main__":
    main()
