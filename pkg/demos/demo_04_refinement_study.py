"""
Refinement study of the explicit remainders
===========================================

Under the admissibility hypothesis the explicit remainder has a conservative
part of size ``h`` in a weak norm and a part of size ``dt / h`` in L1. With
``dt = c h^1.5`` both vanish under refinement.
"""

from eulerent import RunConfig, refinement_study
from eulerent.harness import format_order_table

cfg = RunConfig(scheme="explicit", strategy_rho="limited", strategy_e="limited",
                t_end=0.2, dt_coef=0.5, dt_beta=1.5, ladder=(32, 64, 128, 256))
result = refinement_study(cfg)
print(format_order_table(result))
print("stability ratios:", {k: round(v, 3) for k, v in result["stability_ratio"].items()})
