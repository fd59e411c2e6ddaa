"""Maxwell's equations through 4D form proxies, with (x1, x2, x3, x4) = (t, x, y, z).

curl(F) = 4 pi G carries Gauss and Ampere, curl(H) = 0 carries Faraday and
div B = 0, and div(curl F) = 0 is charge conservation for free.
"""
import math

import numpy as np

from feec4d import maxwell_demo
from feec4d.exterior import random_field
from feec4d.tensorpoly import TensorPoly4

t, x = TensorPoly4.coordinate(0), TensorPoly4.coordinate(1)
zero = TensorPoly4.zero()

wave = t - x
r = maxwell_demo((zero, wave, zero), (zero, zero, wave))
print("plane wave E_y = B_z = t - x:   |curl F| =", r["curl_F"].max_abs_coeff(), " |curl H| =", r["curl_H"])

r = maxwell_demo((x, zero, zero), (zero, zero, zero), rho=1 / (4 * math.pi))
print("E = (x, 0, 0) with rho = 1/4pi:  Gauss residual =", r["source_residual"])

rng = np.random.default_rng(3)
E = random_field(1, 2, rng).comps[:3]
B = random_field(1, 2, rng).comps[:3]
r = maxwell_demo(E, B)
print("random E, B:                     div curl F =", r["div_curl_F"])
