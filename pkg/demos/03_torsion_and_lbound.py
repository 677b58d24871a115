"""Torsion orders of the catalog knots and the certified bound for the trefoil."""

from __future__ import annotations

from gridlab import catalog
from gridlab.homology import lbound, load_certificate, tilde_dim, torsion_order


def main() -> None:
    for name in catalog.names():
        g = catalog.load(name)
        t = torsion_order(g)
        tors = {k: v for k, v in t.torsion_dims.items() if v}
        print(f"{name:20s} torsion order {t.value}  tilde dim {tilde_dim(g):4d}  torsion at {tors or '-'}")

    for cert in ("trefoil-cert", "trefoil-long-cert", "unknot4-roundtrip-cert"):
        path = catalog.certificate_path(cert)
        rep = lbound(load_certificate(path.read_text(), str(path.parent)))
        tag = "exact" if rep.exact else "interval"
        print(f"{cert:24s} {rep.lower} <= l <= {rep.upper} ({tag}), residual zero: {rep.residual_zero}")


if __name__ == "__main__":
    main()
