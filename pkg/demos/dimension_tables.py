"""Dimension counts of the tesseract element family.

Each space V^{k,s} splits into DOFs that live on the boundary (shared with
neighbours) and DOFs interior to the cell (bubbles). This script builds the
bases and DOF sets and prints the split next to the closed forms.
"""
from feec4d import build_dofset, bubble_basis, space_basis, space_dim, trace_dof_dim, vol_dof_dim

print(f"{'k':>2} {'s':>2} {'dim':>6} {'trace':>6} {'volume':>6}  closed forms")
for k in range(1, 5):
    for s in range(5):
        ds = build_dofset(k, s)
        dim, trace, vol = len(space_basis(k, s)), ds.trace_count(), len(bubble_basis(k, s))
        forms = (space_dim(k, s), trace_dof_dim(k, s), vol_dof_dim(k, s))
        mark = "ok" if (dim, trace, vol) == forms else "MISMATCH"
        print(f"{k:>2} {s:>2} {dim:>6} {trace:>6} {vol:>6}  {forms}  {mark}")
