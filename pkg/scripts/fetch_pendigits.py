"""Fetch the Pendigits dataset (10,992 x 16, 10 classes) into data/pendigits.csv.

Tries the UCI archive first. When that host is unreachable, falls back to the
copy bundled in the ``keel-ds`` wheel on PyPI (KEEL calls it ``penbased``; same
instances, different row order).

Output: CSV with header ``f0..f15,label``; the label is the last column.

    python scripts/fetch_pendigits.py [--output data/pendigits.csv]
"""
import argparse
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases/pendigits/"


def from_uci():
    rows = []
    for name in ("pendigits.tra", "pendigits.tes"):
        with urllib.request.urlopen(UCI + name, timeout=20) as fh:
            text = fh.read().decode()
        rows.extend(line for line in text.splitlines() if line.strip())
    return rows


def from_keel():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "keel-ds==0.2.5"],
            check=True,
        )
        wheel = next(Path(tmp).glob("keel_ds-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            text = zf.read("keel_ds/data/balanced/raw/penbased.dat").decode()
    return [line for line in text.splitlines() if line.strip() and not line.startswith("@")]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", default=str(Path(__file__).resolve().parents[1] / "data" / "pendigits.csv"))
    args = parser.parse_args(argv)

    try:
        rows = from_uci()
        source = "uci"
    except OSError as exc:
        print(f"UCI unreachable ({exc}); using keel-ds wheel", file=sys.stderr)
        rows = from_keel()
        source = "keel-ds"

    out = io.StringIO()
    out.write(",".join([f"f{i}" for i in range(16)] + ["label"]) + "\n")
    for line in rows:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 17:
            raise ValueError(f"unexpected row: {line!r}")
        out.write(",".join(str(int(c)) for c in cells) + "\n")
    if len(rows) != 10992:
        raise ValueError(f"expected 10992 rows, got {len(rows)}")

    path = Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(out.getvalue())
    print(f"wrote {len(rows)} rows from {source} to {path}")


if __name__ == "__main__":
    main()
