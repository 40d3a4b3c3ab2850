"""Entry counts of the ripple-carry adder with superposed inputs.

Runs the adder with H on every input bit in multiframe and single-frame
mode and prints the peak entry counts side by side.

    python3 demos/adder_scaling.py [max_n]
"""

import sys
import time

from framesim import Circuit, Gate, gen_cuccaro, simulate
from framesim.circuit import cuccaro_layout


def superposed_adder(n: int) -> Circuit:
    lay = cuccaro_layout(n)
    prep = [Gate("H", (q,)) for q in lay["a"] + lay["b"]]
    return Circuit(2 * n + 2, prep + gen_cuccaro(n).gates)


def main(max_n: int = 7):
    print(f"{'n':>3} {'multi':>8} {'single':>8} {'ratio':>6} {'seconds':>8}")
    for n in range(2, max_n + 1):
        c = superposed_adder(n)
        start = time.perf_counter()
        multi = simulate(c)[1].max_states
        single = simulate(c, single_frame=True)[1].max_states
        took = time.perf_counter() - start
        print(f"{n:>3} {multi:>8} {single:>8} {single / multi:>6.1f} {took:>8.2f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
