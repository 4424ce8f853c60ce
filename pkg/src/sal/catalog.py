"""Registry mapping CLI triple identifiers to spectra and oracle data.

Identifiers: s1, s1nt, s2, s3, s4, t3:s1s2s3, nct2, nct4, podles:q,w,
podless:q,w, file:PATH; an `sq` suffix selects the D^2 spectrum (singular
values squared).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .oracles import (CatalogZeta, catalog_zeta, podles_radius_data,
                      s1_radius_data, s2_radius_data)
from .spectra import (PodlesParams, Spectrum, load_spectrum_jsonl,
                      nctorus_spectrum, podles_spectrum, sphere_spectrum,
                      torus_spectrum)

__all__ = ["ResolvedTriple", "resolve_triple", "default_scale"]


@dataclass
class ResolvedTriple:
    triple_id: str
    spectrum: Spectrum
    zeta: CatalogZeta | None
    params: PodlesParams | None = None
    radius_data: tuple | None = None


def default_scale(p: float, n_strips: int = 24, step: float = 1.0) -> list[float]:
    """Strip boundaries r_k = -p - 1/4 + k*step.

    The quarter offset keeps every line -r_k away from the integer and
    half-integer real parts where catalog poles live.
    """
    r0 = -p - 0.25
    return [r0 + step * k for k in range(n_strips)]


def resolve_triple(triple_id: str, lattice_cut: float = 80.0) -> ResolvedTriple:
    tid = triple_id.strip()
    name, sep, arg = tid.partition(":")
    squared = name.endswith("sq") and name != "sq" and not tid.startswith("file:")
    base = (name[:-2] + sep + arg) if squared else tid

    params = None
    radius_data = None
    if base == "s1":
        spec = sphere_spectrum(1, "trivial")
        zeta = catalog_zeta("s1")
        radius_data = s1_radius_data()
    elif base == "s1nt":
        spec = sphere_spectrum(1, "nontrivial")
        zeta = catalog_zeta("s1nt")
    elif base == "s2":
        spec = sphere_spectrum(2)
        zeta = catalog_zeta("s2")
        radius_data = s2_radius_data()
    elif base == "s3":
        spec = sphere_spectrum(3)
        zeta = catalog_zeta("s3")
    elif base == "s4":
        spec = sphere_spectrum(4)
        zeta = catalog_zeta("s4")
    elif base.startswith("t3"):
        bits = (0, 0, 0)
        if ":" in base:
            code = base.split(":", 1)[1]
            if len(code) != 3 or any(ch not in "01" for ch in code):
                raise ValueError(f"bad T^3 spin structure {code!r}")
            bits = tuple(int(ch) for ch in code)
        spec = torus_spectrum(3, bits, radius_cut=lattice_cut / (2.0 * math.pi))
        zeta = None
    elif base in ("nct2", "nct4"):
        d = int(base[3:])
        spec = nctorus_spectrum(d, radius_cut=lattice_cut)
        zeta = catalog_zeta(base)
    elif base.startswith("podles:") or base.startswith("podless:"):
        simplified = base.startswith("podless:")
        arg = base.split(":", 1)[1]
        qs, ws = arg.split(",")
        params = PodlesParams(float(qs), complex(ws))
        spec = podles_spectrum(params, simplified=simplified)
        zeta = catalog_zeta("podless" if simplified else "podles", params)
        if simplified:
            radius_data = podles_radius_data(params)
    elif base.startswith("file:"):
        spec = load_spectrum_jsonl(base[5:])
        zeta = None
    else:
        raise ValueError(f"unknown triple id {triple_id!r}")

    if squared:
        spec = spec.squared()
        zeta = zeta.squared() if zeta is not None else None
    return ResolvedTriple(tid, spec, zeta, params, radius_data)
