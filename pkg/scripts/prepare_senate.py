"""Prepare user-supplied Voteview exports for the senate experiment.

Nothing is downloaded. Fetch the 114th-Senate ``S114_votes.csv`` and
``S114_members.csv`` from voteview.com yourself, then run

    python3 scripts/prepare_senate.py S114_votes.csv S114_members.csv --out data/s114

which writes ``data/s114_rollcalls.csv`` and ``data/s114_nominate.csv`` and
validates the merged file's schema.
"""
import argparse
import sys
from pathlib import Path

from blindrank.errors import DataError
from blindrank.votes import merge_voteview, validate_votes_file


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("votes")
    ap.add_argument("members")
    ap.add_argument("--out", required=True, help="output stem")
    args = ap.parse_args(argv)
    stem = Path(args.out)
    stem.parent.mkdir(parents=True, exist_ok=True)
    merged = stem.with_name(stem.name + "_rollcalls.csv")
    nominate = stem.with_name(stem.name + "_nominate.csv")
    try:
        count = merge_voteview(args.votes, args.members, merged, nominate)
        rows, chambers, congresses = validate_votes_file(merged)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"{merged}: {rows} rows (merged {count}), chambers {chambers}, congresses {congresses}")
    print(f"{nominate}: NOMINATE coordinates")
    return 0


if __name__ == "__main__":
    sys.exit(main())
