#!/usr/bin/env python3
"""Download and unpack the MovieLens-1M ratings corpus.

Usage: python scripts/fetch_movielens.py [target-dir]

Leaves users.dat, movies.dat and ratings.dat under <target-dir>/ml-1m.
Point STRUCTBANDIT_MOVIELENS_DIR at that directory to enable the
real-corpus tests and to feed `structbandit ingest`.
"""

import sys
import urllib.request
import zipfile
from pathlib import Path

URL = "https://files.grouplens.org/datasets/movielens/ml-1m.zip"


def main() -> None:
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    target.mkdir(parents=True, exist_ok=True)
    archive = target / "ml-1m.zip"
    if not archive.exists():
        print(f"downloading {URL} ...")
        urllib.request.urlretrieve(URL, archive)
    with zipfile.ZipFile(archive) as zf:
        zf.extractall(target)
    print(f"extracted to {target / 'ml-1m'}")


if __name__ == "__main__":
    main()
