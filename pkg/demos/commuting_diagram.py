"""Interpolation commutes with the exterior derivative.

Take a random 1-form proxy E of degree k+1, which is too rich to lie in
V^{k,1}. Interpolating and then differentiating gives the same 2-form as
differentiating and then interpolating.
"""
import numpy as np

from feec4d import interpolate, skw_grad
from feec4d.exterior import random_field

rng = np.random.default_rng(1)
k = 2
E = random_field(1, k + 1, rng)

left = skw_grad(interpolate(k, 1, E).field)
right = interpolate(k, 2, skw_grad(E)).field

print("interpolation error of E itself:", interpolate(k, 1, E).field.coeff_distance(E))
print("skwGrad(Pi E) - Pi(skwGrad E):   ", left.coeff_distance(right))
