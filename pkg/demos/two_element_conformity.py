"""Two sheared tesseracts glued along a facet.

Fill both elements from DOF values, copying the values that sit on the
shared facet. The physical traces then agree across the interface: values
for s=0, tangential parts for s=1 and s=2, the normal flux for s=3.
"""
import numpy as np

from feec4d import conformity_pair_check
from feec4d.geometry import TesseractMap

A = np.array([[1.0, 0.2, 0.0, 0.3], [0.1, 0.9, 0.0, -0.2], [0.0, 0.3, 1.1, 0.1], [0.2, 0.0, 0.1, 0.8]])
b = np.zeros(4)
lower = TesseractMap.from_affine(A, b)
upper = TesseractMap.from_affine(A, b + 2 * A[:, 3])

rng = np.random.default_rng(0)
for s in range(4):
    r = conformity_pair_check(2, s, lower, upper, rng=rng)
    print(f"s={s}: {r['shared_dofs']:4d} shared DOFs, largest trace jump {r['max_jump']:.1e}")
