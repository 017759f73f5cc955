"""BB84 against KMB09 on the same collective-rotation channel (theta = pi/4)."""
import math

from kmb09sim import ExperimentConfig, RotationNoiseConfig, TurbulenceConfig
from kmb09sim.experiment import run_experiment
from kmb09sim.oracle import enumeration_oracle

rot = RotationNoiseConfig(theta=math.pi / 4, rho=1.0)
print(f"{'protocol':10s} {'turbulence':10s} {'qber':>8s} {'oracle':>8s} {'efficiency':>10s}")
for protocol in ("bb84", "kmb09"):
    for turb in (False, True):
        cfg = ExperimentConfig(protocol=protocol, iterations=100_000, rotation=rot,
                               turbulence=TurbulenceConfig(enabled=turb))
        s = run_experiment(cfg)
        o = enumeration_oracle(cfg)
        print(f"{protocol:10s} {'on' if turb else 'off':10s} {s.qber:8.4f} {o.expected_qber:8.4f} {s.efficiency:10.4f}")
