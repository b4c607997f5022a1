"""Expand vertex configurations of one double row into dimer configurations."""
import numpy as np

from dimerstrip.dimermap import enumerate_double_row_configs, iter_double_row_configs, map_vertex_to_dimers
from dimerstrip.statespace import OccupationState
from dimerstrip.transfer import StripModel, double_row_transfer

model = StripModel(3)
a = OccupationState((1, 0, 0))
b = OccupationState((0, 1, 0))
for cfg in iter_double_row_configs(model, a, b):
    print(f"middle={cfg.middle} f={cfg.f} e={cfg.e}")
    for dc in map_vertex_to_dimers(cfg):
        print("   ", dc.to_text())

u = np.pi / 5
res = enumerate_double_row_configs(model, a, b, u)
print("brute force:", np.round(res.weighted_sum, 12))
print("transfer   :", np.round(np.asarray(double_row_transfer(model, u))[b.index, a.index], 12))
print("dimer configurations:", res.dimer_count, " isotropic weight sum:", res.isotropic_sum)
