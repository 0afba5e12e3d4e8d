"""Regenerate crates/core/data/knots.json from the KnotInfo database.

Requires the `database_knotinfo` package (pip install database_knotinfo).

Signatures are stored with the convention that positive knots have positive
signature, i.e. negated relative to KnotInfo.
"""
import json
import sys
from pathlib import Path

from database_knotinfo import link_list


REFERENCE_COLUMNS = [
    ("odd_reduced_z", "khovanov_odd_integral_polynomial"),
    ("even_reduced_q", "khovanov_reduced_rational_polynomial"),
    ("even_unreduced_z", "khovanov_unreduced_integral_polynomial"),
]


def wanted(row):
    name = row["name"]
    if name.startswith("11n_"):
        return True
    try:
        return int(row["crossing_number"]) <= 10
    except ValueError:
        return False


def main(out):
    rows = link_list()[1:]
    records = []
    for row in rows:
        if not wanted(row):
            continue
        pd = json.loads(row["pd_notation"]) if row["pd_notation"] else []
        rec = {
            "name": row["name"],
            "pd": pd,
            "signature": -int(row["signature"]),
            "jones": row["jones_polynomial"].replace(" ", ""),
            "alternating": row["alternating"] == "Y",
            "source": "KnotInfo",
        }
        reference = {
            key: row[col].replace(" ", "")
            for key, col in REFERENCE_COLUMNS
            if row[col].strip()
        }
        if reference:
            rec["reference"] = reference
        records.append(rec)
    with open(out, "w") as f:
        f.write("[\n")
        f.write(",\n".join(json.dumps(r, separators=(",", ":")) for r in records))
        f.write("\n]\n")
    print(f"wrote {len(records)} records to {out}", file=sys.stderr)


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "crates/core/data/knots.json"
    main(sys.argv[1] if len(sys.argv) > 1 else default)
