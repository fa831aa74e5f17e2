"""Acceptance criteria 1-11, each reported as one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from frobscope.cli import main as cli_main
from frobscope.discrepancy import (
    ExperimentConfig,
    ThetaBox,
    joint_angles,
    joint_char_sums,
    kloosterman_angles,
    rate_fit,
    random_theta_boxes,
    run_effective_deligne,
    run_joint,
    theta_partition,
    weil_trace_check,
)
from frobscope.erdos_turan import build_majorants, lattice, loglog_slope, scn_sum
from frobscope.exp_sums import SumKind, angle_sweep
from frobscope.finite_field import all_gauss_sums, make_ext_field, primes_up_to
from frobscope.kernels import KernelMode, KernelSpec
from frobscope.root_system import (
    BoxSpec,
    box_measure,
    build_root_system,
    character_at,
    character_inner_product,
    density_normalization,
    dominant_weights_up_to,
    weyl_dimension,
    wrap_box_indicator,
)


def verdict(capsys, number, title, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}; {elapsed:.1f} s, limit {limit} s]"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_01_weil_bounds(capsys):
    start = time.perf_counter()
    # the field constructors accept odd primes only, so p = 2 is summed by hand: Kl(F_2, 1) = (-1)^(1 + 1)
    worst = abs(sum((-1) ** ((z + 1) % 2) for z in (1,))) / (2 * math.sqrt(2))
    for p in primes_up_to(499)[1:]:
        F = make_ext_field(p)
        kinds = [SumKind.KLOOSTERMAN] + ([SumKind.AIRY] if p > 3 else [])
        for kind in kinds:
            raw = angle_sweep(F, kind).raw_sum
            worst = max(worst, float(np.max(np.abs(raw))) / (2 * math.sqrt(p)))
    ok = worst <= 1 + 1e-9
    verdict(capsys, 1, "Weil bounds for Kl and Ai, p <= 499", ok, f"max |S|/(2 sqrt p) = {worst:.12f}", time.perf_counter() - start, 10)


def test_criterion_02_gauss_sum_magnitude(capsys):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for q in primes_up_to(997):
        if q == 2:
            continue  # 2 has no nontrivial multiplicative character
        g = all_gauss_sums(make_ext_field(q))[1:]
        worst = max(worst, float(np.max(np.abs(np.abs(g) / math.sqrt(q) - 1))))
        count += len(g)
    verdict(capsys, 2, "|g(chi, psi)| = sqrt q for all nontrivial chi", worst <= 1e-9,
            f"{count} characters, max rel err {worst:.2e}", time.perf_counter() - start, 30)


def test_criterion_03_weyl_machinery(capsys):
    start = time.perf_counter()
    generic = np.array([1.0, math.sqrt(2) - 1])
    cases = [("A1", 10, range(0, 11)), ("A2", 3, None), ("B2", 2, None), ("G2", 2, None)]
    dim_err = 0.0
    for name, bound, _ in cases:
        rs = build_root_system(name)
        t = 1e-7 * generic[: rs.rank]
        for lam in [(0,) * rs.rank] + dominant_weights_up_to(rs, bound):
            d = weyl_dimension(rs, lam)
            dim_err = max(dim_err, abs(character_at(rs, lam, t) - d) / d)
    norm_err = max(abs(density_normalization(build_root_system(n), 64) - 1) for n in ("A1", "A2", "B2", "G2"))
    a1 = build_root_system("A1")
    orth1 = max(abs(character_inner_product(a1, (j,), (k,), 64) - (j == k)) for j in range(11) for k in range(11))
    a2 = build_root_system("A2")
    w2 = [(0, 0)] + dominant_weights_up_to(a2, 2)
    orth2 = max(abs(character_inner_product(a2, a, b, 32) - (a == b)) for a in w2 for b in w2)
    ok = dim_err <= 1e-5 and norm_err <= 1e-6 and orth1 <= 1e-8 and orth2 <= 1e-3
    verdict(capsys, 3, "dimension, density normalization, orthonormality", ok,
            f"dim {dim_err:.1e}, norm {norm_err:.1e}, orth A1 {orth1:.1e}, orth A2 {orth2:.1e}", time.perf_counter() - start, 120)


def test_criterion_04_sato_tate_measure(capsys):
    start = time.perf_counter()
    rs = build_root_system("A1")
    rng = np.random.default_rng(2024)
    F = lambda th: th / math.pi - math.sin(2 * th) / (2 * math.pi)
    worst = 0.0
    for _ in range(50):
        a, b = sorted(rng.uniform(0, 0.5, 2))
        worst = max(worst, abs(box_measure(rs, BoxSpec(((a, b),))) - (F(2 * math.pi * b) - F(2 * math.pi * a))))
    verdict(capsys, 4, "A1 box measure equals the Sato-Tate closed form", worst <= 1e-8, f"max err {worst:.1e}", time.perf_counter() - start, 5)


def _majorant_stats(box, Ms, spec):
    n = box.rank
    excess, decay, violation = [], [], 0.0
    rng = np.random.default_rng(17)
    x = (np.arange(10_000) + 0.5)[:, None] / 10_000 if n == 1 else rng.random((10_000, 2))
    chi = wrap_box_indicator(box, x).astype(float)
    for M in Ms:
        pair = build_majorants(box, M, spec)
        violation = max(violation, float(np.max(pair.b_minus(x) - chi)), float(np.max(chi - pair.b_plus(x))))
        ks = lattice(M, n)
        Nk = np.prod(np.abs(ks) + 1, axis=1)
        vals = []
        dec = []
        for b in (pair.b_plus, pair.b_minus):
            vals.append(abs(b.coeff([0] * n).real - box.volume) * M)
            dec.append(float(np.max(np.abs(b.coeffs.ravel()) * Nk)))
        excess.append(max(vals))
        decay.append(max(dec))
    return violation, max(excess) / min(excess), max(decay) / min(decay)


def test_criterion_05_majorants(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    Ms = [8, 16, 32, 64]
    worst_violation, worst_excess, worst_decay = -np.inf, 0.0, 0.0
    boxes = []
    for _ in range(25):
        a = rng.uniform(0, 1)
        boxes.append(BoxSpec(((a, a + rng.uniform(0.02, 0.9)),)))
    for _ in range(5):
        boxes.append(BoxSpec(tuple((a, a + rng.uniform(0.05, 0.6)) for a in rng.uniform(0, 1, 2))))
    for box in boxes:
        spec = KernelSpec(KernelMode.PRODUCT_JACKSON, box.rank)
        v, e, d = _majorant_stats(box, Ms, spec)
        worst_violation, worst_excess, worst_decay = max(worst_violation, v), max(worst_excess, e), max(worst_decay, d)
    ok = worst_violation <= 1e-10 and worst_excess <= 2 and worst_decay <= 2
    verdict(capsys, 5, "B- <= chi <= B+ and stable O(1/M), O(1/N(k)) constants", ok,
            f"max violation {worst_violation:.2e}, excess spread {worst_excess:.2f}, decay spread {worst_decay:.2f}",
            time.perf_counter() - start, 300)


def test_criterion_06_certificate_soundness(capsys):
    start = time.perf_counter()
    configs = 0
    violations = 0
    for i, p in enumerate((101, 1009, 10007)):
        rep = run_effective_deligne(ExperimentConfig(p=p, boxes=random_theta_boxes(40, seed=100 + i), check=False))
        configs += len(rep.rows)
        violations += sum(r.deviation > r.certificate for r in rep.rows)
    for source, seed in (("synthetic", 7), ("clustered", 8)):
        for N in (200, 5000):
            rep = run_effective_deligne(ExperimentConfig(source=source, N=N, seed=seed, boxes=random_theta_boxes(20, seed=seed + N), check=False))
            configs += len(rep.rows)
            violations += sum(r.deviation > r.certificate for r in rep.rows)
    ok = configs >= 200 and violations == 0
    verdict(capsys, 6, "|empirical - mu| <= et_rhs end to end", ok, f"{configs} configurations, {violations} violations",
            time.perf_counter() - start, 600)


def test_criterion_07_effective_rate(capsys):
    start = time.perf_counter()
    boxes = tuple((iv,) for iv in theta_partition(20))
    points, ok = [], True
    worst_ratio = 0.0
    for p in (101, 1009, 10007, 100003):
        rep = run_effective_deligne(ExperimentConfig(p=p, boxes=boxes))
        devs = [r.deviation for r in rep.rows]
        worst_ratio = max(worst_ratio, max(devs) / (10 * p**-0.25))
        ok &= all(d <= 10 * p**-0.25 for d in devs)
        points.append((p, max(devs)))
    exponent, r2 = rate_fit(points)
    ok &= exponent <= -0.20
    verdict(capsys, 7, "Kloosterman deviation <= 10 p^(-1/4), fitted exponent <= -0.20", ok,
            f"max dev/(10 p^-1/4) = {worst_ratio:.3f}, exponent {exponent:.3f} (r2 {r2:.2f})", time.perf_counter() - start, 900)


def test_criterion_08_trace_bound(capsys):
    start = time.perf_counter()
    fields = [(101, 1), (1009, 1), (10007, 1), (7, 2), (11, 2)]
    violations, worst = 0, 0.0
    for p, m in fields:
        rows = weil_trace_check(make_ext_field(p, m), 30)
        violations += sum(r.violation for r in rows)
        worst = max(worst, max(r.ratio for r in rows))
    verdict(capsys, 8, "|sum U_k(cos theta)| <= (k+1) q^(m/2), k <= 30", violations == 0,
            f"{violations} violations, max ratio {worst:.3f}", time.perf_counter() - start, 300)


def test_criterion_09_scn_growth(capsys):
    start = time.perf_counter()
    Ms = [64, 128, 256, 512]
    a1, a2 = build_root_system("A1"), build_root_system("A2")
    s1 = loglog_slope(Ms, [scn_sum(a1, M, 1) for M in Ms])
    s2 = loglog_slope(Ms, [scn_sum(a1, M, 2) for M in Ms])
    s3 = loglog_slope(Ms, [scn_sum(a2, M, 3) for M in Ms])
    log_ratio = scn_sum(a1, 512, 0) / math.log(512)
    ok = abs(s1 - 1) <= 0.15 and abs(s2 - 2) <= 0.15 and abs(s3 - 3) <= 0.15 and abs(log_ratio / 2 - 1) <= 0.10
    verdict(capsys, 9, "scn slopes equal r within 0.15; A1 r=0 ratio to log M near 2", ok,
            f"A1 r=1 {s1:.3f}, A1 r=2 {s2:.3f}, A2 r=3 {s3:.3f}, A1 r=0 ratio {log_ratio:.3f}", time.perf_counter() - start, 60)


def test_criterion_10_joint(capsys):
    start = time.perf_counter()
    ok = True
    worst_ratio, worst_indep, violations = 0.0, 0.0, 0
    for p in (13, 103, 1009, 10009):
        rep = run_joint(ExperimentConfig(p=p, check=False))
        bound = 10 * p ** (-1 / 6)
        worst_ratio = max(worst_ratio, rep.max_deviation / bound)
        ok &= rep.max_deviation <= bound
        violations += sum(r.deviation > r.certificate for r in rep.rows)
        mat = joint_char_sums(joint_angles(make_ext_field(p)), 5)
        for k in range(6):
            for kk in range(6):
                if k or kk:
                    worst_indep = max(worst_indep, abs(mat[k, kk]) / ((k + 1) * (kk + 1) * math.sqrt(p)))
    ok &= violations == 0 and worst_indep <= 1
    verdict(capsys, 10, "joint Kl x Ai deviations, certificate and independence", ok,
            f"max dev/(10 p^-1/6) {worst_ratio:.3f}, {violations} violations, max indep ratio {worst_indep:.3f}",
            time.perf_counter() - start, 600)


def test_criterion_11_determinism(capsys, tmp_path):
    start = time.perf_counter()
    commands = [
        ["deligne", "--p", "10007", "--boxes", "20", "--seed", "7"],
        ["deligne", "--p", "101", "--source", "synthetic", "--N", "5000", "--boxes", "10", "--seed", "3"],
        ["deligne", "--p", "101", "--source", "clustered", "--N", "500", "--boxes", "10", "--seed", "3"],
        ["joint", "--p", "1009", "--seed", "1"],
        ["weil-check", "--p", "1009", "--k-max", "30"],
        ["scn", "--type", "A2", "--r", "3"],
    ]
    mismatches = 0
    with capsys.disabled():
        pass
    for i, cmd in enumerate(commands):
        outs = []
        for threads in ("1", "3"):
            out = tmp_path / f"run{i}_{threads}.json"
            assert cli_main(cmd + ["--threads", threads, "--out", str(out)]) == 0
            files = [out.read_bytes()]
            if out.with_suffix(".csv").exists():
                files.append(out.with_suffix(".csv").read_bytes())
            outs.append(files)
        mismatches += outs[0] != outs[1]
    capsys.readouterr()
    verdict(capsys, 11, "byte-identical outputs across runs and thread counts", mismatches == 0,
            f"{len(commands)} configurations, {mismatches} mismatches", time.perf_counter() - start, 600)
