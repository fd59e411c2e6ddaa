"""Acceptance criteria 1-10, each with its tolerance and time budget.

Every test prints one PASS/FAIL line. Caches are cleared first wherever
caching would otherwise flatter the timing.
"""
import time

import numpy as np
import pytest

from feec4d import dofs, spaces
from feec4d.dofs import build_dofset, check_unisolvence
from feec4d.exterior import (
    FormField,
    aux_curl,
    aux_div,
    cross_ss,
    cross_vs,
    cross_vv,
    curl4,
    d_proxy,
    div4,
    exterior_derivative,
    grad4,
    random_coeff_form,
    random_field,
    skw_grad,
    upsilon,
)
from feec4d.geometry import TesseractMap
from feec4d.interp import (
    IBP_TAGS,
    commuting_check,
    conformity_pair_check,
    hyperplane_trace,
    ibp_fields,
    ibp_identity_check,
    maxwell_demo,
)
from feec4d.oracles import (
    UNROLLED,
    cross_ss_unrolled,
    cross_vs_unrolled,
    cross_vv_unrolled,
    fd_table,
    symbolic_table,
)
from feec4d.pullback import functoriality_check, naturality_check, random_affine
from feec4d.spaces import bubble_basis, space_basis, span_residual
from feec4d.tensorpoly import TensorPoly4


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail, elapsed, budget):
        status = "PASS" if ok and elapsed < budget else "FAIL"
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {status}  {title}: {detail}  ({elapsed:.2f} s of {budget:g} s)")
        assert ok, detail
        assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"

    return emit


def clear_caches():
    for fn in (spaces.space_basis, spaces.bubble_basis, dofs.build_dofset, dofs.gram, dofs.gram_lu):
        fn.cache_clear()


def closed_forms(k, s):
    return [
        ((k + 1) ** 4, 8 * k * (k**2 + 1), (k - 1) ** 4),
        (4 * k * (k + 1) ** 3, 8 * k * (3 * k**2 + 1), 4 * k * (k - 1) ** 3),
        (6 * k**2 * (k + 1) ** 2, 24 * k**3, 6 * k**2 * (k - 1) ** 2),
        (4 * k**3 * (k + 1), 8 * k**3, 4 * k**3 * (k - 1)),
        (k**4, 0, k**4),
    ][s]


def test_criterion_01_dimension_tables(verdict):
    clear_caches()
    t0 = time.perf_counter()
    bad = []
    for k in (1, 2, 3, 4):
        for s in range(5):
            ds = build_dofset(k, s)
            got = (len(space_basis(k, s)), ds.trace_count(), len(bubble_basis(k, s)))
            if got != closed_forms(k, s) or len(ds) != got[0]:
                bad.append((k, s, got))
    elapsed = time.perf_counter() - t0
    verdict(1, "dimension tables k=1..4, s=0..4", not bad, f"mismatches={bad}", elapsed, 1.0)


def test_criterion_02_unisolvence(verdict):
    clear_caches()
    cases = [(k, s) for k in (1, 2, 3) for s in range(5)] + [(4, 3), (4, 4)]
    t0 = time.perf_counter()
    results = [check_unisolvence(k, s) for k, s in cases]
    elapsed = time.perf_counter() - t0
    worst = min(r["pivot_ratio"] for r in results)
    ok = all(r["pass"] for r in results) and worst > 1e-8
    verdict(2, "unisolvence (17 Gram matrices)", ok, f"min pivot ratio {worst:.3e} > 1e-8", elapsed, 60.0)


def test_criterion_03_exact_sequence_and_proxies(verdict):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    dd, proxy = 0.0, 0.0
    for s in range(4):
        for _ in range(20):
            f = random_coeff_form(s, 3, rng)
            F = upsilon(s, f)
            if s <= 2:
                dd = max(dd, d_proxy(d_proxy(F)).max_abs_coeff())
                ddf = exterior_derivative(exterior_derivative(f))
                dd = max(dd, max(c.max_abs_coeff() for c in ddf.comps.values()))
            proxy = max(proxy, upsilon(s + 1, exterior_derivative(f)).coeff_distance(d_proxy(F)))
    elapsed = time.perf_counter() - t0
    ok = dd < 1e-12 and proxy < 1e-12
    verdict(3, "d o d and proxy identities", ok, f"d o d {dd:.2e}, proxy {proxy:.2e} < 1e-12", elapsed, 5.0)


def test_criterion_04_commuting_diagram(verdict):
    clear_caches()
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst = 0.0
    for k in (1, 2, 3):
        for s in range(4):
            for _ in range(10):
                worst = max(worst, commuting_check(k, s, random_field(s, k + 1, rng)))
    elapsed = time.perf_counter() - t0
    verdict(4, "commuting diagram k=1..3, s=0..3", worst < 1e-10, f"max residual {worst:.2e} < 1e-10", elapsed, 120.0)


def test_criterion_05_pullback_naturality(verdict):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    nat, fun = 0.0, 0.0
    for s in range(5):
        for _ in range(20):
            phi, psi = random_affine(rng), random_affine(rng)
            F = random_field(s, 2, rng)
            if s <= 3:
                nat = max(nat, naturality_check(s, F, phi, rng))
            fun = max(fun, functoriality_check(s, F, phi, psi, rng))
    elapsed = time.perf_counter() - t0
    ok = nat < 1e-11 and fun < 1e-11
    verdict(5, "pullback naturality and functoriality", ok,
            f"naturality {nat:.2e}, functoriality {fun:.2e} < 1e-11", elapsed, 10.0)


def test_criterion_06_integration_by_parts(verdict):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    worst = {}
    for which in IBP_TAGS:
        worst[which] = 0.0
        for _ in range(10):
            r = ibp_identity_check(which, *ibp_fields(which, rng))
            worst[which] = max(worst[which], r["residual"] / r["scale"])
    elapsed = time.perf_counter() - t0
    top = max(worst.values())
    verdict(6, "six integration-by-parts identities", top < 1e-11,
            f"max residual/scale {top:.2e} < 1e-11", elapsed, 20.0)


def test_criterion_07_bubbles(verdict):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    trace, span = 0.0, 0.0
    for k in (1, 2, 3):
        for s in range(5):
            bubbles = bubble_basis(k, s)
            if len(bubbles):
                span = max(span, span_residual(space_basis(k, s), bubbles))
            if s == 4:
                continue
            for facet in range(8):
                t = rng.uniform(-1, 1, (20, 3))
                for b in bubbles:
                    trace = max(trace, float(np.max(np.abs(hyperplane_trace(s, b, facet)(t)))))
    elapsed = time.perf_counter() - t0
    ok = trace < 1e-12 and span < 1e-11
    verdict(7, "bubble traces and span", ok, f"trace {trace:.2e} < 1e-12, span {span:.2e} < 1e-11", elapsed, 30.0)


def test_criterion_08_conformity(verdict):
    rng = np.random.default_rng(8)
    A = np.eye(4) + 0.2 * rng.uniform(-1, 1, (4, 4))
    b = rng.uniform(-1, 1, 4)
    sheared = (TesseractMap.from_affine(A, b), TesseractMap.from_affine(A, b + 2 * A[:, 3]))
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(4):
        for k in (1, 2):
            worst = max(worst, conformity_pair_check(k, s, rng=rng)["max_jump"])
            worst = max(worst, conformity_pair_check(k, s, *sheared, rng=rng)["max_jump"])
    elapsed = time.perf_counter() - t0
    verdict(8, "conformity across a shared facet", worst < 1e-10, f"max jump {worst:.2e} < 1e-10", elapsed, 10.0)


def test_criterion_09_maxwell(verdict):
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        E = random_field(1, 2, rng).comps[:3]
        B = random_field(1, 2, rng).comps[:3]
        r = maxwell_demo(E, B)
        worst = max(worst, r["div_curl_F"], r["div_induced_current"])
    elapsed = time.perf_counter() - t0
    verdict(9, "Maxwell charge conservation", worst < 1e-12, f"max div curl F {worst:.2e} < 1e-12", elapsed, 2.0)


LIBRARY = {"grad": grad4, "skw_grad": skw_grad, "curl": curl4, "div": div4,
           "aux_curl": aux_curl, "aux_div": aux_div}


def eps(*idx):
    """Levi-Civita symbol by inversion counting, zero on repeated indices."""
    if len(set(idx)) < len(idx):
        return 0
    inversions = sum(1 for a in range(4) for b in range(a + 1, 4) if idx[a] > idx[b])
    return -1 if inversions % 2 else 1


def full_skew(w):
    M = np.zeros((4, 4))
    M[np.triu_indices(4, 1)] = w
    return M - M.T


def brute_curl(dF):
    """sum over all 4^4 tuples of eps_ijkl d_j F_kl; dF[j] is the 4x4 matrix d_j F."""
    return [sum(eps(i, j, k, l) * dF[j][k, l] for j in range(4) for k in range(4) for l in range(4))
            for i in range(4)]


def brute_aux_curl(dE):
    """Upper triangle of sum_kl eps_ijkl d_k E_l; dE[l][k] = d_k E_l."""
    M = np.array([[sum(eps(i, j, k, l) * dE[l][k] for k in range(4) for l in range(4))
                   for j in range(4)] for i in range(4)])
    return M[np.triu_indices(4, 1)]


def brute_vv(M, N):
    W = np.array([[sum(eps(i, j, k, l) * M[k] * N[l] for k in range(4) for l in range(4))
                   for j in range(4)] for i in range(4)])
    return W[np.triu_indices(4, 1)]


def brute_vs(M, U):
    F = full_skew(U)
    return [sum(eps(i, j, k, l) * M[j] * F[k, l] for j in range(4) for k in range(4) for l in range(4))
            for i in range(4)]


def brute_ss(U, V):
    A, B = full_skew(U), full_skew(V)
    return sum(eps(i, j, k, l) * A[i, j] * B[k, l] for i in range(4) for j in range(4)
               for k in range(4) for l in range(4)) / 4.0


def random_affine_field(s, rng):
    """Field with constant, unit-scale derivative table."""
    comps = []
    for _ in range((1, 4, 6, 4, 1)[s]):
        c = np.zeros((2, 2, 2, 2))
        c[0, 0, 0, 0] = rng.uniform(-1, 1)
        for a in range(4):
            idx = [0] * 4
            idx[a] = 1
            c[tuple(idx)] = rng.uniform(-1, 1)
        comps.append(TensorPoly4(c))
    return FormField(s, tuple(comps))


def test_criterion_10_cross_oracles(verdict):
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    eps_gap, fd_gap = 0.0, 0.0
    x0 = np.zeros(4)
    for name, (s, unrolled) in UNROLLED.items():
        for _ in range(20):
            # unit-scale constant derivative tables: library vs unrolled vs brute force
            F = random_affine_field(s, rng)
            table = symbolic_table(F, x0)
            lib = np.asarray(LIBRARY[name](F)(x0))
            refs = [unrolled(table)]
            if name == "curl":
                dF = [full_skew([row[j] for row in table]) for j in range(4)]
                refs.append(brute_curl(dF))
            if name == "aux_curl":
                refs.append(brute_aux_curl(table))
            for ref in refs:
                eps_gap = max(eps_gap, float(np.max(np.abs(lib - np.asarray(ref)))))
            # finite differences on a unit-scale degree-3 field
            G = random_field(s, 3, rng)
            G = G * (1.0 / G.max_abs_coeff())
            x = rng.uniform(-1, 1, 4)
            fd_gap = max(fd_gap, float(np.max(np.abs(np.asarray(LIBRARY[name](G)(x)) - unrolled(fd_table(G, x))))))
    for _ in range(20):
        M, N = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
        U, V = rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6)
        eps_gap = max(
            eps_gap,
            float(np.max(np.abs(np.subtract(cross_vv(M, N), cross_vv_unrolled(M, N))))),
            float(np.max(np.abs(np.subtract(cross_vv(M, N), brute_vv(M, N))))),
            float(np.max(np.abs(np.subtract(cross_vs(M, U), cross_vs_unrolled(M, U))))),
            float(np.max(np.abs(np.subtract(cross_vs(M, U), brute_vs(M, U))))),
            abs(cross_ss(U, V) - cross_ss_unrolled(U, V)),
            abs(cross_ss(U, V) - brute_ss(U, V)),
        )
    elapsed = time.perf_counter() - t0
    ok = eps_gap < 1e-14 and fd_gap < 1e-8
    verdict(10, "unrolled vs enumeration vs finite differences", ok,
            f"enumeration {eps_gap:.2e} < 1e-14, FD {fd_gap:.2e} < 1e-8", elapsed, 5.0)
