"""Critical deviations of the switch for the three decoherence regimes.

Prints a table of (Omega0, phi0, dOmega_rel_c, dphi_c) at a fixed detuning
together with the ratio of the two thresholds in common units, which shows
that eta grows at the same rate along both axes.
"""

import argparse
import math

from chiral_switch import Chirality, DecoherenceConfig, critical_deviation, find_switch
from chiral_switch.protocol import AMPLITUDE, PHASE


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=10.0)
    ap.add_argument("--omega-bar", type=float, default=1.0)
    ap.add_argument("--target-eta", type=float, default=0.01)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    args = ap.parse_args()

    ob = args.omega_bar
    print(f"delta = {args.delta}, Omega31 = Omega32 = {ob}, target eta = {args.target_eta}")
    print(f"{'gamma/Omega':>11} {'Omega0':>10} {'phi0':>9} {'dOmega_rel_c':>13} {'dphi_c[deg]':>12} {'dphi_c[rad]/dOmega_rel_c':>25}")
    for ratio in args.ratios:
        dec = DecoherenceConfig.uniform(ratio * ob)
        sw = find_switch(ob, ob, args.delta, dec, silenced=Chirality.RIGHT)
        drives = sw.drives(ob, ob, args.delta)
        amp = critical_deviation(AMPLITUDE, sw, drives, dec, args.target_eta)
        ph = critical_deviation(PHASE, sw, drives, dec, args.target_eta)
        print(f"{ratio:>11g} {sw.omega0:>10.5g} {sw.phi0:>9.4f} {amp:>13.4g} {ph:>12.4g} {math.radians(ph) / amp:>25.3f}")


if __name__ == "__main__":
    main()
