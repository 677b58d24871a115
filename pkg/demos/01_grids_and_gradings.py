"""Load a bundled grid, trace it, and walk the gradings of a few states."""

from __future__ import annotations

from collections import Counter

from gridlab import catalog
from gridlab.grid import trace_components
from gridlab.polygons import rectangles_from
from gridlab.states import gradings, nwo_state, state_list


def main() -> None:
    g = catalog.load("trefoil5")
    print(f"trefoil5: n={g.n}, X rows {list(g.x_rows)}, O rows {list(g.o_rows)}")
    print(f"components: {trace_components(g)}")

    x = nwo_state(g)
    m, _, a = gradings(g, x)
    print(f"upper-left state {list(x)}: M={m}, A={a}")

    # every empty rectangle out of x lands one Maslov degree lower;
    # the two rectangles between a pair of states wrap opposite ways
    for r in rectangles_from(g, x)[:4]:
        my, _, ay = gradings(g, r.target)
        print(f"  columns {r.left}->{r.right}, to {list(r.target)}: M={my}, A={ay}, "
              f"O={sum(r.o_count)}, X={sum(r.x_count)}")

    hist = Counter((gradings(g, s)[0], int(gradings(g, s)[2])) for s in state_list(g))
    top = max(a for _, a in hist)
    print(f"{len(state_list(g))} states, Alexander range [{min(a for _, a in hist)}, {top}]")
    print("states in the top Alexander level:", {k: v for k, v in hist.items() if k[1] == top})


if __name__ == "__main__":
    main()
