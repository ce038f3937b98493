"""Regenerate the bundled Weyl group character tables.

    python3 tools/build_character_tables.py [G2 F4 ...]

Tables are computed with the Dixon-Schneider routine and validated by both
orthogonality relations before they are written.  Aliases give alternative
names used in the literature: E_{d,b} for G2, Spaltenstein/Kondo chi_{d,i}
for the F4 characters that occur in the p=3 critical classes.
"""
import sys
from pathlib import Path

from chevgreen.lusztig_shoji import compute_character_table
from chevgreen.weyl import root_system

ALIASES = {
    "G2": {"E1,0": "phi1,0", "E1,6": "phi1,6", "E1,3'": "phi1,3'", "E1,3''": "phi1,3''",
           "E2,1": "phi2,1", "E2,2": "phi2,2"},
    # placed by Springer position (class, local system), see springer_F4_p3.txt
    "F4": {"chi4,1": "phi4,1", "chi2,3": "phi2,4'", "chi9,1": "phi9,2", "chi2,1": "phi2,4''",
           "chi12": "phi12,4", "chi9,3": "phi9,6'", "chi6,2": "phi6,6''", "chi1,3": "phi1,12'",
           "chi16": "phi16,5", "chi4,3": "phi4,7'"},
}

HEADER = [
    "Irreducible characters of W({label}), computed by tools/build_character_tables.py.",
    "phi<d>,<b>: degree d, b = lowest degree of occurrence in S(V).  Among characters",
    "with equal (d, b), a single prime marks the smaller value on a long simple",
    "reflection (ties broken by the larger value on a short one).",
    "Validated by row and column orthogonality when loaded.",
]


def main(labels):
    out = Path(__file__).resolve().parents[1] / "src" / "chevgreen" / "data"
    for label in labels:
        table = compute_character_table(root_system(label))
        table.aliases = dict(ALIASES.get(label, {}))
        text = table.to_text([h.format(label=label) for h in HEADER])
        (out / f"chartable_{label}.txt").write_text(text)
        print(f"{label}: {len(table.char_labels)} characters written")


if __name__ == "__main__":
    main(sys.argv[1:] or ["G2", "F4"])
