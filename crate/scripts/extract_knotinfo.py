#!/usr/bin/env python3
"""Extract the prime knots up to a crossing bound from the KnotInfo CSV dump
(as shipped by the `database_knotinfo` package) into the table format read by
`gordian`.

usage: extract_knotinfo.py KNOTINFO_CSV OUT_CSV [MAX_CROSSINGS]
"""
import csv
import sys


def main():
    src, dst = sys.argv[1], sys.argv[2]
    max_c = int(sys.argv[3]) if len(sys.argv) > 3 else 10
    csv.field_size_limit(10**9)
    with open(src, newline="") as f:
        rows = csv.DictReader(f, delimiter="|")
        next(rows)  # human-readable header line
        out = []
        for row in rows:
            c = row["crossing_number"]
            if not c.isdigit() or int(c) > max_c:
                break
            if row["name"] == "0_1":
                continue
            u = row["unknotting_number"].strip()
            if u.startswith("["):
                lo, hi = u.strip("[]").split(",")
                u = f"{lo.strip()}..{hi.strip()}"
            matrix = row["seifert_matrix"].replace(" ", "")
            sym = row["symmetry_type"].strip()
            out.append({
                "name": row["name"],
                "crossing_number": c,
                "seifert_matrix": matrix,
                "signature": row["signature"],
                "determinant": row["determinant"],
                "s_invariant": row["rasmussen_invariant"],
                "tau_invariant": row["ozsvath_szabo_tau_invariant"],
                "unknotting_number": u,
                "alternating": row["alternating"],
                "bridge_index": row["bridge_index"],
                "amphicheiral": "Y" if "amphicheiral" in sym else "N",
            })
    with open(dst, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(out[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(out)
    print(f"wrote {len(out)} knots to {dst}")


if __name__ == "__main__":
    main()
