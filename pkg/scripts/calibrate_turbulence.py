"""Solve for the turbulence scale that gives a target QBER at theta = 0.

With rotation noise off every conclusive-round error comes from detection
flips, so the QBER equals the oracle's mean flip rate. Prints the gain needed
at a fixed rc, and the rc needed at unit gain.

    python scripts/calibrate_turbulence.py --target 0.12 --rc 0.02
"""
import argparse
import dataclasses

from scipy.optimize import brentq

from kmb09sim import ExperimentConfig, RotationNoiseConfig, TurbulenceConfig
from kmb09sim.oracle import mean_flip_rate


def flip_rate(rc: float, gain: float) -> float:
    cfg = ExperimentConfig(
        rotation=RotationNoiseConfig(enabled=False),
        turbulence=TurbulenceConfig(rc=rc, gain=gain),
    )
    return mean_flip_rate(cfg)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--target", type=float, default=0.12)
    p.add_argument("--rc", type=float, default=TurbulenceConfig().rc)
    args = p.parse_args()

    gain = brentq(lambda g: flip_rate(args.rc, g) - args.target, 1e-3, 1e2, xtol=1e-10)
    rc = brentq(lambda r: flip_rate(r, 1.0) - args.target, 1e-4, 10.0, xtol=1e-12)
    default = TurbulenceConfig()
    print(f"target QBER             {args.target}")
    print(f"gain at rc={args.rc:g} m      {gain:.6f}")
    print(f"rc at gain=1            {rc:.6f} m")
    print(f"committed default       rc={default.rc} m gain={default.gain} "
          f"-> QBER {flip_rate(default.rc, default.gain):.6f}")


if __name__ == "__main__":
    main()
