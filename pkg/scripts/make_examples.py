"""Write the data files used by the example specs in scripts/specs/.

Run from the repository root:  python3 scripts/make_examples.py
"""

import json
from pathlib import Path

from ruthsplit import bundle as bd
from ruthsplit import combinatorics as cb
from ruthsplit import ruth as rt
from ruthsplit.cli import plain

DATA = Path(__file__).parent / "data"


def dump(name, obj):
    (DATA / name).write_text(json.dumps(plain(obj), sort_keys=True, indent=1) + "\n")


def main():
    DATA.mkdir(exist_ok=True)
    dump("pair2_tables.json", cb.Groupoid.pair(2).to_json())
    dump("z3_tables.json", cb.Groupoid.cyclic(3).to_json())
    # a loop of order 5: units and inverses exist but composition is not associative
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    dump("broken_tables.json", {
        "objects": ["*"],
        "arrows": [{"name": f"a{i}", "source": 0, "target": 0} for i in range(5)],
        "identity": [0],
        "compose": [[b, a, loop[b][a]] for b in range(5) for a in range(5)],
    })
    dump("point_complex.json", cb.standard_simplex(0, cap=8).to_json())
    nerve = cb.GroupoidNerve(cb.Groupoid.cyclic(2))
    E = rt.random_ruth(nerve, [1, 2], seed=7)
    dump("z2_ruth.json", rt.tabulate(E, 3, 1).to_json(plain))
    V = bd.GaugedBundle(bd.DirectSumBundle(nerve, [1]), seed=2)
    dump("z2_bundle.json", bd.TabulatedBundle.snapshot(V, 3).to_json(plain))


if __name__ == "__main__":
    main()
