"""Fetch the GunPoint UCR dataset into ``data/GunPoint``.

GunPoint is redistributed inside the ``aeon`` wheel; this downloads the wheel
with pip (no install) and converts both splits to the UCR tab-separated layout
(label first, one series per row).

    python scripts/fetch_data.py [--out data]
"""
import argparse
import glob
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

MEMBER = "aeon/datasets/data/GunPoint/GunPoint_{split}.ts"


def ts_to_rows(text):
    rows = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower() == "@data":
            in_data = True
            continue
        if not in_data:
            continue
        values, label = line.rsplit(":", 1)
        rows.append([label.strip()] + values.split(","))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args(argv)
    out = Path(args.out) / "GunPoint"
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, "aeon==1.3.0"],
            check=True,
        )
        wheel = glob.glob(f"{tmp}/aeon-*.whl")[0]
        with zipfile.ZipFile(wheel) as zf:
            for split in ("TRAIN", "TEST"):
                rows = ts_to_rows(zf.read(MEMBER.format(split=split)).decode())
                dest = out / f"GunPoint_{split}.tsv"
                dest.write_text("".join("\t".join(r) + "\n" for r in rows))
                print(f"wrote {dest} ({len(rows)} series)")


if __name__ == "__main__":
    main()
