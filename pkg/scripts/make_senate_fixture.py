"""Regenerate the bundled synthetic roll-call fixture.

Run from the repository root:  python scripts/make_senate_fixture.py
"""
import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "blindrank" / "data"
ROLLS = 120
REPUBLICANS = 14
DEMOCRATS = 4


def main(seed=114):
    rng = np.random.default_rng(seed)
    members = []
    for k in range(REPUBLICANS):
        members.append((str(40000 + k), f"REP, SENATOR {chr(65 + k)}", "200",
                        rng.normal(0.5, 0.15), rng.normal(0.0, 0.45)))
    for k in range(DEMOCRATS):
        members.append((str(49000 + k), f"DEM, SENATOR {chr(65 + k)}", "100",
                        rng.normal(-0.4, 0.15), rng.normal(0.0, 0.4)))
    rows = []
    # party-line votes dominate; how reliably a member follows the line
    # grows with dimension 2, the rest is spatial voting
    loyalty = {mid: 0.55 + 0.4 / (1.0 + np.exp(-3.0 * d2)) for mid, _, _, _, d2 in members}
    for roll in range(1, ROLLS + 1):
        direction = rng.normal(size=2)
        cut = rng.normal(0.0, 0.3)
        side = {"200": rng.choice([-1.0, 1.0])}
        side["100"] = -side["200"] if rng.random() < 0.7 else side["200"]
        for mid, name, party, d1, d2 in members:
            draw = rng.random()
            if draw < 0.04:
                continue  # not a member of this roll call's record
            if rng.random() < loyalty[mid]:
                utility = side[party]
            else:
                utility = direction @ np.array([d1, d2]) - cut + rng.normal(0.0, 0.3)
            if draw < 0.10:
                code = int(rng.choice([7, 8, 9]))
            elif utility > 0:
                code = int(rng.choice([1, 2, 3], p=[0.9, 0.05, 0.05]))
            else:
                code = int(rng.choice([4, 5, 6], p=[0.05, 0.05, 0.9]))
            rows.append((114, "Senate", roll, mid, name, party, code))
    # a few House records that the chamber filter must drop
    for roll in range(1, 4):
        rows.append((114, "House", roll, "29001", "HOUSE, MEMBER", "200", 1))
    with open(OUT / "senate_fixture.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["congress", "chamber", "rollnumber", "icpsr", "bioname", "party_code", "cast_code"])
        w.writerows(rows)
    with open(OUT / "senate_fixture_nominate.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["icpsr", "bioname", "nominate_dim1", "nominate_dim2"])
        for mid, name, party, d1, d2 in members:
            w.writerow([mid, name, f"{d1:.3f}", f"{d2:.3f}"])


if __name__ == "__main__":
    main()
