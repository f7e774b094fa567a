"""Monte Carlo fault injection on the 4x4 error-detected circuit.

Sweeps the per-location success rate and compares postselected accuracy with
the unprotected circuit.

    python3 demos/fault_injection.py [trials]
"""

import sys

from gsedetect.encoding import build_gse
from gsedetect.faults import effect_table, monte_carlo
from gsedetect.gadgets import error_detected_circuit
from gsedetect.lattice import build


def main(trials=50_000):
    enc = build_gse(build(4, 4))
    circ = error_detected_circuit(enc, "reduced")
    table = effect_table(circ, enc)  # shared across the sweep
    print(f"{len(table.locations)} fault locations")
    print("s          no-fault   accepted   wrong|accepted  detected|faulty")
    for s in (0.9999, 0.99995, 0.99999, 0.999995):
        st = monte_carlo(circ, enc, s, trials, seed=7, table=table)
        print(f"{s:<10} {st.p_g_empirical:.5f}    {st.accepted / trials:.5f}    "
              f"{st.accepted_error_rate:.5f}         {st.detected_given_faulty:.4f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 50_000)
