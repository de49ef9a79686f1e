#!/usr/bin/env python3
"""Combine the UCI Adult files (adult.data, adult.test) into one CSV with a header row."""

import argparse
import csv
import pathlib

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]


def rows(path):
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("|"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != len(COLUMNS):
                continue
            fields[-1] = fields[-1].rstrip(".")
            yield fields


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default="data/adult", help="directory holding adult.data and adult.test")
    parser.add_argument("--out", default=None, help="output CSV (default: <dir>/adult.csv)")
    args = parser.parse_args()
    source = pathlib.Path(args.dir)
    out = pathlib.Path(args.out) if args.out else source / "adult.csv"
    count = 0
    with open(out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COLUMNS)
        for name in ("adult.data", "adult.test"):
            for fields in rows(source / name):
                writer.writerow(fields)
                count += 1
    print(f"wrote {count} rows to {out}")


if __name__ == "__main__":
    main()
