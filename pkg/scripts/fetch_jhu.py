"""Download the JHU CSSE global time-series CSVs into a data directory.

    python scripts/fetch_jhu.py data/jhu
    python scripts/fetch_jhu.py data/jhu --commit <sha>   # pin a historical revision

Overwrites the vendored snapshot files in place.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

from epicast.ingest import JHU_FILENAMES, parse_jhu_csv

BASE = "https://raw.githubusercontent.com/CSSEGISandData/COVID-19/{ref}/csse_covid_19_data/csse_covid_19_time_series/{name}"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out", type=Path)
    parser.add_argument("--commit", default="master", help="git ref of the upstream repository")
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    for name in JHU_FILENAMES.values():
        url = BASE.format(ref=args.commit, name=name)
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                text = resp.read().decode("utf-8")
        except OSError as exc:
            print(f"fetch_jhu: {url}: {exc}", file=sys.stderr)
            return 5
        table = parse_jhu_csv(text)  # refuse to save anything the ingest layer would reject
        (args.out / name).write_text(text, encoding="utf-8")
        print(f"{name}: {len(table.rows)} rows, {table.dates[0]} .. {table.dates[-1]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
