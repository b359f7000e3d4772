"""Locate the Gaussian-noise sigma at which the detectable diagonal vanishes."""

import argparse

from ramanent.entanglement_scan import closure_sigma, sigma_window
from ramanent.pt_moments import TensorFunctionSpec

BRACKETS = {"1,2,3": (5.0, 5.6), "1,2,3,4": (10.0, 11.0)}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", choices=sorted(BRACKETS), default="1,2,3")
    parser.add_argument("--step", type=float, default=0.005)
    args = parser.parse_args()
    spec = TensorFunctionSpec.parse(args.spec)
    lo, hi = BRACKETS[args.spec]
    closure = closure_sigma(spec, lo, hi, step=args.step)
    last = sigma_window(spec, closure - args.step)
    print(f"{spec.label()}: closure sigma = {closure:.3f}")
    print(f"last window at sigma = {closure - args.step:.3f}: n = {last.min_n}..{last.max_n}")


if __name__ == "__main__":
    main()
