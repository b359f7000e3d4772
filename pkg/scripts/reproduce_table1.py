"""Print MaxN / MinN along n = m for the eight tabulated tensor functions."""

import time

from ramanent.entanglement_scan import TABLE1, diagonal_scan
from ramanent.pt_moments import TensorFunctionSpec


def main():
    start = time.perf_counter()
    print(f"{'spec':<14}{'MinN':>6}{'MaxN':>6}{'expected':>10}")
    for indices, expected in TABLE1.items():
        spec = TensorFunctionSpec(indices)
        scan = diagonal_scan(spec)
        flag = "" if scan.max_n == expected else "  <-- mismatch"
        print(f"{spec.label():<14}{scan.min_n:>6}{scan.max_n:>6}{expected:>10}{flag}")
    print(f"elapsed {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
