"""MaxN versus Stokes detector efficiency with a linear fit."""

import numpy as np

from ramanent.entanglement_scan import efficiency_sweep
from ramanent.pt_moments import TensorFunctionSpec


def main():
    curve = efficiency_sweep(TensorFunctionSpec.parse("1,2,3"), np.round(np.arange(1.0, 0.49, -0.05), 2))
    for p in curve.points:
        print(f"eta={p.parameter:.2f}  MinN={p.min_n}  MaxN={p.max_n}")
    print(f"fit: MaxN ~ {curve.slope:.1f} * eta + {curve.intercept:.1f}  (rms residual {curve.residual_rms:.2f})")


if __name__ == "__main__":
    main()
