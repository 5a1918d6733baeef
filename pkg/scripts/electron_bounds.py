#!/usr/bin/env python3
"""Evaluate the maximal-acceleration and power-loss bounds for the electron.

Uses CODATA electron constants and a position uncertainty of half the
reduced Compton wavelength, which makes the uncertainty-based bound
coincide with the rest-mass bound 2 m0 c^3 / hbar.
"""

import json

from qgeom.cli import ELECTRON
from qgeom.geometry import ParticleParams, caianiello_bounds


def main() -> None:
    base = ParticleParams(**ELECTRON)
    params = ParticleParams(**ELECTRON, delta_x=base.compton_wavelength / 2)
    out = {
        "constants": dict(ELECTRON),
        "delta_x": params.delta_x,
        "bounds": caianiello_bounds(params),
    }
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
