"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line (visible in ``pytest -v`` output)
and then asserts.  Values marked as fixtures come from the worked examples;
everything else is checked against an independent computation.
"""

import itertools
import json
import math

import numpy as np
import pytest

from sincov import algebra as alg
from sincov import generate as gen
from sincov import groups as gr
from sincov import gruss as gs
from sincov import kernel as kn
from sincov import stability as st
from sincov.cli import main

from conftest import brute_defects


@pytest.fixture
def report(capsys):
    def _report(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return _report


def delta_instances(count=100, n=6):
    """Generator-emitted certified instances, alternating the two control shapes."""
    for seed in range(count):
        yield gen.delta_instance(n, seed=seed, budget=0.1, control=("constant", "ratio")[seed % 2])


# ---------------------------------------------------------------------- 1


def test_criterion_01_triangular2(report):
    spec = alg.triangular2()
    chars = alg.characters(spec)
    # diagonal extraction on [[x, y], [0, x + d]] for x U + y N + d D
    expected = [np.array([1, 0, 0]), np.array([1, 0, 1])]
    got = sorted((c.weights for c in chars), key=lambda w: w.real.tolist())
    chars_ok = len(chars) == 2 and all(np.abs(g - e).max() < 1e-8 for g, e in zip(got, expected))

    radical, semisimple = alg.radical_and_semisimplicity(spec)
    r = radical[0].coeffs / radical[0].coeffs[1] if radical else None
    radical_ok = len(radical) == 1 and not semisimple and np.abs(r - [0, 1, 0]).max() < 1e-8

    T = gen.triangular2_kernel()
    per_char_ok = all(np.abs(T.compose(c).values - 1).max() < 1e-12 for c in chars)
    per_char_ok &= all(r.report.max_defect < 1e-12 for r in st.per_character_check(T, kn.ControlKernel.constant(T.ground, 1.0)))
    max_abs_g = float(np.abs(T.ground.numeric()).max())
    rep = kn.max_defect(T)
    defect_ok = abs(rep.max_defect - max_abs_g) < 1e-12

    ok = chars_ok and radical_ok and per_char_ok and defect_ok
    report(
        "1 triangular2 fixture",
        ok,
        f"chars={len(chars)} radical_dim={len(radical)} max_defect={rep.max_defect} max|g|={max_abs_g}",
    )


# ---------------------------------------------------------------------- 2


def test_criterion_02_phi_roundtrip(report):
    passed, worst_defect, worst_err = 0, 0.0, 0.0
    for seed in range(100):
        phi = gen.random_phi(8, seed)
        S = kn.build_from_phi(range(8), phi)
        d = kn.max_defect(S).max_defect
        rec = kn.recover_phi(S, "anchor")
        err = float(np.abs(kn.build_from_phi(range(8), rec.phi).values - S.values).max())
        worst_defect, worst_err = max(worst_defect, d), max(worst_err, err)
        passed += d < 1e-12 and err < 1e-12
    report("2 phi roundtrip", passed == 100, f"{passed}/100 max_defect<={worst_defect:.2e} rebuild_err<={worst_err:.2e}")


# ---------------------------------------------------------------------- 3


def noisy_kernel(n, seed):
    rng = np.random.default_rng(seed)
    phi = gen.random_phi(n, rng)
    return kn.ScalarKernel(kn.GroundSet.range(n), phi[:, None] / phi[None, :] * np.exp(rng.uniform(-0.01, 0.01, (n, n))))


def grid_oracle(S, half_width=0.04, step=1e-4):
    """Brute-force minimiser of sum_{f,g} (log|S(f,g)| - x_f + x_g)^2 with x_0 = 0, n = 3."""
    A = np.log(np.abs(S.values))
    c1, c2 = A[1, 0], A[2, 0]
    k = int(round(half_width / step))
    offs = np.arange(-k, k + 1) * step
    x1 = (c1 + offs)[:, None]
    x2 = (c2 + offs)[None, :]
    x = [np.zeros_like(x1 + x2), x1 + 0 * x2, x2 + 0 * x1]
    J = sum((A[f, g] - (x[f] - x[g])) ** 2 for f in range(3) for g in range(3))
    i, j = np.unravel_index(int(np.argmin(J)), J.shape)
    return np.array([0.0, x1[i, 0], x2[0, j]])


def test_criterion_03_noisy_recovery(report):
    rel = [kn.recover_phi(noisy_kernel(10, seed), "least_squares") for seed in range(100)]
    worst = max(r.relative_residual for r in rel)
    worst_abs = max(r.residual for r in rel)
    count = sum(r.relative_residual <= 0.021 for r in rel)
    oracle_err = 0.0
    for seed in range(10):
        S = noisy_kernel(3, 1000 + seed)
        fit = np.log(np.abs(kn.recover_phi(S, "least_squares").phi))
        oracle_err = max(oracle_err, float(np.abs(fit - grid_oracle(S)).max()))
    ok = count == 100 and oracle_err <= 1e-3
    report(
        "3 noisy recovery",
        ok,
        f"{count}/100 relative residual<=0.021 (worst {worst:.4f}, absolute worst {worst_abs:.3f}); "
        f"n=3 grid oracle gap {oracle_err:.1e}",
    )


# ---------------------------------------------------------------------- 4


def certified_bound_oracle(S, F):
    """Plain loops over (f, g, h, k)."""
    s, Fv = S.values, F.values
    n = S.n
    out = np.full((n, n, n), np.inf)
    for f, g, h in itertools.product(range(n), repeat=3):
        Gfg = Fv[f, g] * Fv[g, f] - 1
        Gfh = Fv[f, h] * Fv[h, f] - 1
        Ggh = Fv[g, h] * Fv[h, g] - 1
        for k in range(n):
            if abs(s[h, k]) > 0:
                val = ((Gfg + Gfh) * Fv[f, k] + abs(s[f, g]) * Ggh * Fv[g, k]) / abs(s[h, k])
                out[f, g, h] = min(out[f, g, h], val)
    return out


def test_criterion_04_certified_bound(report):
    worst, table_gap, checked = -np.inf, 0.0, 0
    for idx, (S, F) in enumerate(delta_instances()):
        bounds, _ = st.certified_bound_table(S, F)
        D = brute_defects(lambda i, j: S.values[i, j], S.n)
        worst = max(worst, float((D - bounds).max()))
        checked += D.size
        if idx < 10:
            table_gap = max(table_gap, float(np.abs(bounds - certified_bound_oracle(S, F)).max()))
        if idx == 0:
            f, g, h = "1", "3", "5"
            single = st.certified_defect_bound(S, F, f, g, h).bound
            table_gap = max(table_gap, abs(single - bounds[1, 3, 5]))
    exact_max = 0.0
    for seed in range(20):
        S = gen.sincov_instance(6, seed)
        bounds, _ = st.certified_bound_table(S, kn.ControlKernel.constant(6, 1.0))
        exact_max = max(exact_max, float(np.abs(bounds).max()))
    ok = worst <= 1e-9 and checked == 100 * 216 and exact_max == 0 and table_gap < 1e-9
    report(
        "4 certified bound dominates defect",
        ok,
        f"{checked} triples, max(defect - bound)={worst:.3e}; exact-Sincov bound max={exact_max}; oracle gap {table_gap:.1e}",
    )


# ---------------------------------------------------------------------- 5


def test_criterion_05_h_submultiplicative(report):
    violations, instances, triples = 0, 0, 0
    for S, F in delta_instances():
        assert np.all(S.values.imag == 0) and np.all(S.values.real >= 0)
        rep = kn.h_submultiplicativity(S, F)
        H = S.values.real + F.values
        brute = sum(
            H[f, h] > H[f, g] * H[g, h] + 1e-9 * max(1.0, H[f, g] * H[g, h])
            for f, g, h in itertools.product(range(S.n), repeat=3)
        )
        assert rep.premise_holds
        violations += rep.n_violations + brute
        instances += 1
        triples += S.n**3
    report("5 H = S + F submultiplicative", violations == 0, f"{violations} violations over {instances} instances / {triples} triples")


# ---------------------------------------------------------------------- 6


def test_criterion_06_control_conditions(report):
    failures = 0
    worst_diag, worst_gamma = np.inf, np.inf
    for S, F in delta_instances():
        rep = kn.check_control(F)
        Fv = F.values
        brute_sub = all(Fv[f, h] <= Fv[f, g] * Fv[g, h] * (1 + 1e-12) for f, g, h in itertools.product(range(F.n), repeat=3))
        G = Fv * Fv.T - 1
        worst_diag = min(worst_diag, float(np.diag(Fv).min()))
        worst_gamma = min(worst_gamma, float(G.min()))
        ok = rep.positivity and rep.submultiplicativity and brute_sub and np.all(Fv > 0)
        ok &= np.diag(Fv).min() >= 1 - 1e-9 and G.min() >= -1e-9
        ok &= np.allclose(kn.gamma_matrix(F), G, rtol=0, atol=1e-12)
        failures += not ok
    half = kn.check_control(kn.ControlKernel.constant(6, 0.5))
    ok = failures == 0 and not half.passed
    report(
        "6 control necessary conditions",
        ok,
        f"{failures} failing instances; min F(f,f)={worst_diag:.6f} min gamma={worst_gamma:.3e}; F=0.5 passed={half.passed}",
    )


# ---------------------------------------------------------------------- 7


def test_criterion_07_golden_ratio(report):
    F0 = kn.constant_control_for(1.0)
    identity = abs(F0 * F0 - F0 - 1)
    golden = abs(F0 - (1 + math.sqrt(5)) / 2)
    rng = np.random.default_rng(7)
    mismatches, triples, boundary_mix = 0, 0, set()
    tol = kn.DEFAULT_TOL
    for _ in range(20):
        n = 7
        vals = rng.uniform(0, 1.3, (n, n)) * np.exp(1j * rng.uniform(-np.pi, np.pi, (n, n)))
        S = kn.ScalarKernel(kn.GroundSet.range(n), vals)
        rep = kn.check_delta(S, kn.ControlKernel.constant(n, F0), tol, keep_margins=True)
        D = brute_defects(lambda i, j: vals[i, j], n)
        direct = D <= 1 + tol
        mismatches += int(np.sum((rep.per_triple_margins >= -tol) != direct))
        triples += D.size
        boundary_mix |= set(direct.flat)
    richard = gs.richard_check(rng.normal(size=(8, 3)), c=1.0)
    ok = identity < 1e-12 and golden < 1e-15 and mismatches == 0 and boundary_mix == {True, False} and richard.delta_agrees
    report(
        "7 golden-ratio reduction",
        ok,
        f"F={F0!r} |F^2-F-1|={identity:.1e}; {mismatches} mismatches over {triples} triples",
    )


# ---------------------------------------------------------------------- 8


def sign_of(label):
    p = [int(c) for c in label]
    return (-1) ** sum(p[i] > p[j] for i in range(len(p)) for j in range(i + 1, len(p)))


def test_criterion_08_group_bridge(report):
    Z6 = gr.bundled_group("Z6")
    w = np.exp(2j * np.pi / 6)
    _, exp_rep = gr.from_group(Z6, w ** np.arange(6))
    _, non_rep = gr.from_group(Z6, np.arange(6) + 1.0)

    S3 = gr.bundled_group("S3")
    rng = np.random.default_rng(8)
    holds, total, kinds = 0, 0, {True: 0, False: 0}
    for G in (Z6, S3):
        if G is Z6:
            homs = [w ** (j * np.arange(6)) for j in range(6)]
        else:
            homs = [np.ones(6), np.array([sign_of(lab) for lab in S3.labels], dtype=float)]
        for i in range(50):
            if i % 2 == 0:
                fmap = homs[rng.integers(len(homs))].astype(complex)
                if i % 4 == 2:  # break one value
                    fmap = fmap.copy()
                    fmap[rng.integers(1, 6)] *= 1 + rng.uniform(0.2, 1.0)
            else:
                fmap = rng.normal(size=6) + 1j * rng.normal(size=6)
            _, rep = gr.from_group(G, fmap)
            holds += rep.biconditional_holds
            kinds[rep.exponential] += 1
            total += 1
    ok = (
        exp_rep.max_sincov_defect < 1e-12
        and non_rep.max_sincov_defect > 0.1
        and holds == total
        and kinds[True] > 0
        and kinds[False] > 0
    )
    report(
        "8 group bridge",
        ok,
        f"Z6 exp defect={exp_rep.max_sincov_defect:.1e}, non-exp defect={non_rep.max_sincov_defect:.3f}; "
        f"biconditional {holds}/{total} (exponential {kinds[True]}, not {kinds[False]})",
    )


# ---------------------------------------------------------------------- 9


def synthetic_function_kernel(seed, n=8, d=10, n_exact=5, eps=0.1):
    rng = np.random.default_rng(seed)
    exact = sorted(rng.permutation(d)[:n_exact].tolist())
    vals = np.empty((n, n, d), dtype=complex)
    for p in range(d):
        phi = rng.uniform(0.5, 2.0, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
        vals[:, :, p] = phi[:, None] / phi[None, :]
        if p not in exact:
            vals[:, :, p] *= 1 + eps * rng.uniform(-1, 1, (n, n))
    T = kn.AlgebraKernel(kn.GroundSet.range(n), alg.function_algebra(range(d)), vals)
    return T, exact


def c01_sup_ratios(grid=11, params=10):
    """sup_ratio of each coordinate kernel at ``g = f_{0.1}``, with the analytic surrogate."""
    T, F = gen.c01_example(grid, params)
    x = np.linspace(0.0, 1.0, grid)
    chars = alg.characters(T.algebra)
    f = g = T.ground.labels[0]
    gx = gen.c01_member(float(g), x)
    sup = np.array([kn.sup_ratio(T.compose(ch), F, f, g)[0] for ch in chars])
    with np.errstate(divide="ignore"):
        surrogate = 2 * np.abs(gx - 1) / ((1 + math.sqrt(5)) * x)
    return x, gx, sup, surrogate


def test_criterion_09_decomposition(report):
    exact_hits, worst_lam1, worst_iso = 0, 0.0, 0.0
    for seed in range(10):
        T, exact = synthetic_function_kernel(seed)
        rep = st.decompose(T, kn.ControlKernel.constant(T.ground, 1.0))
        exact_hits += rep.sincov_chars == exact
        worst_lam1 = max(worst_lam1, rep.lambda1_max_defect)
        worst_iso = max(worst_iso, rep.isometry_check)

    x, gx, sup, surrogate = c01_sup_ratios()
    far = x >= 0.2
    ratio = sup[far] / surrogate[far]
    factor_ok = bool(np.all((ratio >= 0.5) & (ratio <= 2.0)))
    # the surrogate needs g(x) != 1; for f_{0.1} that holds on x <= 0.9
    away = gx < 1
    s = sup[away]
    monotone_ok = bool(np.all(np.diff(s) < 0))
    ok = exact_hits == 10 and worst_lam1 < 1e-12 and worst_iso < 1e-12 and factor_ok and monotone_ok
    report(
        "9 decomposition and C[0,1] example",
        ok,
        f"M_s exact {exact_hits}/10, Lambda1 defect<={worst_lam1:.1e}, isometry<={worst_iso:.1e}; "
        f"sup/surrogate in [{ratio.min():.3f}, {ratio.max():.3f}] for x>=0.2; strictly increasing as x decreases on "
        f"{int(away.sum())} grid points where g(x)<1",
    )


@pytest.mark.xfail(strict=True, reason="g(x) - 1 changes sign on [0, 1] for every g in the family; see README")
def test_criterion_09_monotone_on_full_grid():
    _, _, sup, _ = c01_sup_ratios()
    assert np.all(np.diff(sup) < 0)


# ---------------------------------------------------------------------- 10


def test_criterion_10_gruss(report):
    f = gs.SampledFunction.from_callable(lambda x: x, 0.0, 1.0, 1001)
    ident = gs.gruss_check(f, f, rule="simpson")
    step = gs.SampledFunction.from_callable(lambda x: np.where(x < 0.5, -1.0, 1.0), 0.0, 1.0, 2001)
    sharp = gs.gruss_check(step, step)
    rng = np.random.default_rng(10)
    bad = 0
    for i in range(200):
        p = rng.normal(size=rng.integers(1, 5))
        q = rng.normal(size=rng.integers(1, 5))
        rule = ("trapezoid", "simpson")[i % 2]
        fp = gs.SampledFunction.from_callable(lambda x: np.polyval(p, x), 0.0, 1.0, 1001)
        fq = gs.SampledFunction.from_callable(lambda x: np.polyval(q, x), 0.0, 1.0, 1001)
        rep = gs.gruss_check(fp, fq, rule=rule)
        bad += rep.margin < -rep.quad_tol
    ok = abs(ident.gap - 1 / 12) < 1e-6 and ident.bound == 0.25 and 0 <= sharp.margin <= 5e-3 and bad == 0
    report(
        "10 Gruss suite",
        ok,
        f"x*x gap={ident.gap!r} bound={ident.bound}; step margin={sharp.margin:.3e}; {bad}/200 polynomial pairs below -quad_tol",
    )


# ---------------------------------------------------------------------- 11


def test_criterion_11_determinism(report, tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        for mode in (["--phi-random", "--complex"], ["--delta"]):
            p = tmp_path / f"{name}{mode[-1]}.json"
            assert main(["generate", *mode, "--seed", "42", "-o", str(p)]) == 0
            outs.append(p.read_bytes())
    capsys.readouterr()
    files_ok = outs[0] == outs[2] and outs[1] == outs[3]
    json.loads(outs[1])

    same = 0
    for seed in range(20):
        S, F = gen.delta_instance(12, seed=100 + seed, budget=0.3, control=("constant", "ratio")[seed % 2])
        serial = (kn.max_defect(S).to_dict(), kn.check_delta(S, F).to_dict())
        parallel = (
            kn.max_defect(S, n_jobs=4, chunk_rows=1).to_dict(),
            kn.check_delta(S, F, n_jobs=4, chunk_rows=3).to_dict(),
        )
        same += serial == parallel
    report("11 determinism", files_ok and same == 20, f"generate byte-identical={files_ok}; serial==parallel on {same}/20")
