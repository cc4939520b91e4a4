"""Roll-call ingestion: vote records become {-1, 0, +1} graph signals.

Input is one CSV row per (member, roll call) with columns ``congress``,
``chamber``, ``rollnumber``, a member id, a member name, a party code and
``cast_code``. Column names follow the Voteview member-votes export merged
with its members table; common aliases are accepted.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

# Voteview cast codes: 1-3 yea / paired yea / announced yea,
# 4-6 announced nay / paired nay / nay, 7-9 present or not voting, 0 not a member.
CAST_CODE_SIGNAL = {1: 1, 2: 1, 3: 1, 4: -1, 5: -1, 6: -1}

REPUBLICAN = "200"
DEMOCRAT = "100"

_ALIASES = {
    "congress": ("congress",),
    "chamber": ("chamber",),
    "rollnumber": ("rollnumber", "roll_number", "rollcall"),
    "member_id": ("icpsr", "member_id", "id"),
    "name": ("bioname", "name", "member_name"),
    "party": ("party_code", "party"),
    "cast_code": ("cast_code",),
}


@dataclass(frozen=True)
class VoteSignalBatch:
    samples: np.ndarray
    node_labels: tuple
    member_ids: tuple
    rollcall_ids: tuple

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if not np.isin(s, (-1.0, 0.0, 1.0)).all():
            raise DataError("vote signals must lie in {-1, 0, +1}")
        if s.shape != (len(self.rollcall_ids), len(self.node_labels)):
            raise DataError("vote matrix shape does not match labels")
        object.__setattr__(self, "samples", s)

    @property
    def m(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]

    def head(self, m):
        """The first ``m`` roll calls."""
        return VoteSignalBatch(self.samples[:m], self.node_labels, self.member_ids, self.rollcall_ids[:m])


def cast_code_signal(code):
    return CAST_CODE_SIGNAL.get(int(code), 0)


def _resolve_columns(fieldnames):
    cols = {}
    missing = []
    for key, options in _ALIASES.items():
        hit = next((c for c in options if c in fieldnames), None)
        if hit is None:
            missing.append(key)
        cols[key] = hit
    if missing:
        raise DataError(f"roll-call CSV lacks required columns: {', '.join(missing)}")
    return cols


def _matches(value, wanted):
    if wanted is None:
        return True
    return str(value).strip().lower() == str(wanted).strip().lower()


def ingest_votes(path, chamber=None, party=None, congress=None):
    """Build the roll-call by member signal matrix.

    Roll calls are ordered by roll number, members by first appearance in the
    file. Members absent from a roll call get 0.
    """
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataError(f"missing roll-call file {path}") from None
    with fh:
        reader = csv.DictReader(fh)
        cols = _resolve_columns(reader.fieldnames or [])
        members = {}
        votes = {}
        rollcalls = set()
        for row in reader:
            if not (_matches(row[cols["chamber"]], chamber) and _matches(row[cols["party"]], party)
                    and _matches(row[cols["congress"]], congress)):
                continue
            mid = row[cols["member_id"]].strip()
            members.setdefault(mid, row[cols["name"]].strip())
            try:
                roll = (int(row[cols["congress"]]), int(float(row[cols["rollnumber"]])))
                code = int(float(row[cols["cast_code"]]))
            except ValueError as exc:
                raise DataError(f"bad numeric field in {path}: {exc}") from None
            rollcalls.add(roll)
            votes[roll, mid] = cast_code_signal(code)
    if not members:
        raise DataError("no members left after filtering")
    member_ids = tuple(members)
    order = sorted(rollcalls)
    col = {mid: k for k, mid in enumerate(member_ids)}
    row_of = {roll: k for k, roll in enumerate(order)}
    samples = np.zeros((len(order), len(member_ids)))
    for (roll, mid), s in votes.items():
        samples[row_of[roll], col[mid]] = s
    ids = tuple(f"{c}-{r}" for c, r in order)
    return VoteSignalBatch(samples, tuple(members[m] for m in member_ids), member_ids, ids)


def read_nominate(path):
    """Map member id to ``(dim1, dim2)`` from a CSV with ``nominate_dim1``/``nominate_dim2``."""
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataError(f"missing NOMINATE file {path}") from None
    with fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        id_col = next((c for c in _ALIASES["member_id"] if c in names), None)
        if id_col is None or "nominate_dim1" not in names or "nominate_dim2" not in names:
            raise DataError("NOMINATE CSV needs a member id column plus nominate_dim1 and nominate_dim2")
        out = {}
        for row in reader:
            try:
                out[row[id_col].strip()] = (float(row["nominate_dim1"]), float(row["nominate_dim2"]))
            except ValueError:
                continue
    return out


def validate_votes_file(path):
    """Check that ``path`` has the roll-call columns and parseable numeric fields.

    Returns ``(rows, chambers, congresses)``; raises DataError on the first problem.
    """
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataError(f"missing roll-call file {path}") from None
    chambers, congresses = set(), set()
    rows = 0
    with fh:
        reader = csv.DictReader(fh)
        cols = _resolve_columns(reader.fieldnames or [])
        for lineno, row in enumerate(reader, start=2):
            try:
                congresses.add(int(row[cols["congress"]]))
                int(float(row[cols["rollnumber"]]))
                int(float(row[cols["cast_code"]]))
            except (TypeError, ValueError):
                raise DataError(f"{path}:{lineno}: non-numeric congress, rollnumber or cast_code") from None
            chambers.add(row[cols["chamber"]])
            rows += 1
    if rows == 0:
        raise DataError(f"{path} has no data rows")
    return rows, sorted(chambers), sorted(congresses)


def merge_voteview(votes_path, members_path, out_path, nominate_out=None):
    """Join a Voteview votes export with its members export into the ingestible schema.

    The votes file carries ``congress, chamber, rollnumber, icpsr, cast_code``;
    the members file adds ``bioname`` and ``party_code`` (and the NOMINATE
    coordinates, written to ``nominate_out`` when given). Returns the row count.
    """
    members = {}
    try:
        with open(members_path, newline="") as fh:
            for row in csv.DictReader(fh):
                members[row["congress"], row["chamber"], row["icpsr"]] = row
    except FileNotFoundError:
        raise DataError(f"missing members file {members_path}") from None
    except KeyError as exc:
        raise DataError(f"members file lacks column {exc}") from None
    header = ["congress", "chamber", "rollnumber", "icpsr", "bioname", "party_code", "cast_code"]
    count = 0
    try:
        src = open(votes_path, newline="")
    except FileNotFoundError:
        raise DataError(f"missing votes file {votes_path}") from None
    with src, open(out_path, "w", newline="") as dst:
        w = csv.writer(dst, lineterminator="\n")
        w.writerow(header)
        for row in csv.DictReader(src):
            try:
                key = (row["congress"], row["chamber"], row["icpsr"])
            except KeyError as exc:
                raise DataError(f"votes file lacks column {exc}") from None
            mem = members.get(key)
            if mem is None:
                continue
            w.writerow([row["congress"], row["chamber"], row["rollnumber"], row["icpsr"],
                        mem.get("bioname", ""), mem.get("party_code", ""), row["cast_code"]])
            count += 1
    if nominate_out is not None:
        with open(nominate_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["icpsr", "nominate_dim1", "nominate_dim2"])
            seen = set()
            for (_, _, icpsr), mem in members.items():
                if icpsr in seen or not mem.get("nominate_dim1"):
                    continue
                seen.add(icpsr)
                w.writerow([icpsr, mem["nominate_dim1"], mem.get("nominate_dim2", "")])
    return count
