"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) with the measured quantity and the wall time.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from magnon_qi.config import parse_config
from magnon_qi.converter import (
    cooperativity_drift_matrix,
    matrix_is_stable,
    max_commutator_defect,
    max_real_eigenvalue,
    output_coefficients,
    output_coefficients_resonant,
)
from magnon_qi.core_math import symplectic_eigenvalues_oracle
from magnon_qi.detection import (
    entanglement_survival_threshold,
    error_probability,
    evaluate_detection,
    ratio_at,
)
from magnon_qi.gaussian import (
    TwoModeCM,
    coherent_information,
    covariance_matrix,
    entanglement_metric,
    log_negativity,
    output_moments,
    partial_transpose_spectrum,
    symplectic_spectrum,
)
from magnon_qi.sweeps import (
    SUBCOMMANDS,
    eom_baths,
    background_occupancy,
    render_csv,
    render_meta,
    run_advantage_sweep,
    run_detection_sweep,
    run_resources_sweep,
)
from magnon_qi.system_params import TWO_PI, Cooperativities, SystemParams, cooperativities

SEED = 20240611


@contextmanager
def criterion(report, number, title, budget):
    """Time the block, then record PASS/FAIL including the runtime budget."""
    info = {}
    start = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - start
        ok = elapsed < budget
        detail = info.get("detail", "")
        line = (f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail} "
                f"({elapsed * 1e3:.1f} ms, budget {budget * 1e3:g} ms)")
        report.append(line)
        print(line)
        assert ok, f"runtime {elapsed:.4f} s exceeds {budget} s"
    except AssertionError as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number} [FAIL] {title}: {exc} ({elapsed * 1e3:.1f} ms)"
        if line.split(":")[0] not in " ".join(report):
            report.append(line)
        print(line)
        raise


def _best_of(fn, repeats=5):
    # small budgets are measured after warm-up, keeping the fastest run
    fn()
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def test_criterion_1_parameter_chain(acceptance_report):
    with criterion(acceptance_report, 1, "parameter chain", budget=1e-3) as info:
        coop, elapsed = _best_of(lambda: cooperativities(SystemParams()))
        assert abs(coop.lambda_a / 0.055 - 1) <= 0.05, coop.lambda_a
        # 1600 up to the last bit of the 2*pi products
        assert coop.lambda_b == pytest.approx(1600.0, rel=1e-14), coop.lambda_b
        assert elapsed < 1e-3
        info["detail"] = f"Lambda_a={coop.lambda_a:.6f}, Lambda_b={coop.lambda_b!r}"


def test_criterion_2_commutators(acceptance_report):
    with criterion(acceptance_report, 2, "commutator preservation", budget=1.0) as info:
        rng = np.random.default_rng(SEED)
        kappas = SystemParams().kappas
        worst, draws = 0.0, 0
        while draws < 1000:
            la, lb = rng.uniform(0, 2.5), rng.uniform(0, 2000)
            coop = Cooperativities(la, lb)
            if not matrix_is_stable(cooperativity_drift_matrix(coop, kappas)):
                continue
            omega = rng.uniform(-2, 2) * kappas[2] * (1 + lb - la)
            worst = max(worst, max_commutator_defect(output_coefficients(coop, kappas, omega)))
            draws += 1
        assert worst <= 1e-9, worst
        info["detail"] = f"max defect {worst:.2e} over {draws} stable draws"


def _thermal_tms(rng):
    r = rng.uniform(0, 2.5)
    a1, a2 = rng.uniform(0, 50, 2) + 0.5
    ch, sh = math.cosh(r), math.sinh(r)
    return TwoModeCM(ch * ch * a1 + sh * sh * a2, sh * sh * a1 + ch * ch * a2, ch * sh * (a1 + a2))


def test_criterion_3_symplectic_oracle(acceptance_report):
    with criterion(acceptance_report, 3, "symplectic oracle equivalence", budget=5.0) as info:
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for _ in range(1000):
            v = _thermal_tms(rng)
            nu = symplectic_spectrum(v)
            ref = symplectic_eigenvalues_oracle(v.as_matrix())
            xi = partial_transpose_spectrum(v).nu_minus
            xi_ref = symplectic_eigenvalues_oracle(v.partial_transpose()).nu_minus
            worst = max(worst, abs(nu.nu_plus - ref.nu_plus), abs(nu.nu_minus - ref.nu_minus), abs(xi - xi_ref))
        assert worst <= 1e-9, worst
        tmsv_err = 0.0
        for r in (0.1, 0.5, 1.0, 2.0):
            v = TwoModeCM(math.cosh(2 * r) / 2, math.cosh(2 * r) / 2, math.sinh(2 * r) / 2)
            tmsv_err = max(tmsv_err, abs(log_negativity(v) - 2 * r))
        assert tmsv_err <= 1e-9, tmsv_err
        info["detail"] = f"max |closed - oracle| {worst:.2e}, max |E_N - 2r| {tmsv_err:.2e}"


def test_criterion_4_exact_fixture(acceptance_report):
    def pipeline():
        m = output_moments(output_coefficients_resonant(Cooperativities(1.0, 1.0)), (0.0, 0.0, 0.0))
        v = covariance_matrix(m)
        return (m, entanglement_metric(m), symplectic_spectrum(v), log_negativity(v),
                coherent_information(v), entanglement_survival_threshold(m))

    with criterion(acceptance_report, 4, "exact-arithmetic fixture", budget=1e-3) as info:
        (m, eps, nu, e_n, coh, sill), elapsed = _best_of(pipeline)
        assert (m.n_a, m.n_b, m.cross) == (8.0, 4.0, -6.0)
        assert eps == pytest.approx(6 / math.sqrt(32), rel=1e-15)
        assert tuple(nu) == pytest.approx((4.5, 0.5), rel=1e-14)
        assert abs(e_n - 1.047) <= 1e-3
        assert abs(coh) <= 1e-9
        assert sill == pytest.approx(0.5, rel=1e-15)
        assert elapsed < 1e-3
        info["detail"] = f"E_N={e_n:.6f}, I={coh:.1e}, n_T_sill={sill}"


def test_criterion_5_entanglement_region(acceptance_report):
    with criterion(acceptance_report, 5, "entanglement region", budget=10.0) as info:
        cfg = parse_config("")
        rows = run_resources_sweep(cfg).rows
        stable = [r for r in rows if r["status"] == "ok"]
        assert len(stable) == len(rows), "default grid has flagged points"
        min_eps = min(r["epsilon"] for r in stable)
        min_en = min(r["log_negativity"] for r in stable)
        assert min_eps > 1 and min_en > 0, (min_eps, min_en)
        params = cfg.params
        eps_point = {
            occ: entanglement_metric(output_moments(
                output_coefficients_resonant(Cooperativities(0.054, 1600.0)), params.baths(occ)))
            for occ in cfg.occupancies
        }
        assert min(eps_point.values()) > 10, eps_point
        info["detail"] = (f"{len(stable)} stable points, min eps {min_eps:.3f}, min E_N {min_en:.3e}, "
                          f"eps(0.054,1600) {min(eps_point.values()):.2f}")


def test_criterion_6_detection_ordering(acceptance_report):
    with criterion(acceptance_report, 6, "detection ordering", budget=30.0) as info:
        cfg = parse_config("")
        table = run_detection_sweep(cfg)
        best_gap = 0.0
        excluded = 0
        for row in table.rows:
            for tx in ("magnon", "eom"):
                if row[f"p_ci_{tx}"] < 0.4:
                    assert row[f"p_qi_{tx}"] < row[f"p_ci_{tx}"], (tx, row["mode_count"])
            mismatch = abs(row["energy_eom"] / row["energy_magnon"] - 1.0)
            if mismatch > 0.01:
                excluded += 1
                continue
            assert row["p_qi_magnon"] < row["p_qi_eom"], row["mode_count"]
            best_gap = max(best_gap, row["p_qi_eom"] / row["p_qi_magnon"])
        assert best_gap >= 10.0, best_gap

        # the same ordering at exactly equal energy (fractional EOM mode count)
        n_t = background_occupancy(cfg)
        eom = evaluate_detection(Cooperativities(*cfg.eom_point), cfg.eta, n_t, eom_baths(cfg))
        for occ in cfg.occupancies:
            mag = evaluate_detection(Cooperativities(*cfg.operating_point), cfg.eta, n_t, cfg.params.baths(occ))
            for m in cfg.mode_counts:
                m_eom = m * mag.output.n_b / eom.output.n_b
                assert error_probability(mag.snr_qi_per_mode * m) < error_probability(eom.snr_qi_per_mode * m_eom)
        info["detail"] = (f"max P_QI(EOM)/P_QI(magnon) {best_gap:.3g}; "
                          f"{excluded} small-M rows with >1% energy-matching error checked at exact energy only")


def test_criterion_7_advantage_threshold(acceptance_report):
    with criterion(acceptance_report, 7, "advantage threshold", budget=30.0) as info:
        cfg = parse_config("")
        table = run_advantage_sweep(cfg)
        resolution = table.extra["grid_resolution"]
        crossings = table.extra["crossings"]
        verdicts = {}
        for occ in cfg.occupancies:
            rows = {c["lambda_b"]: c for c in crossings if c["occupancy"] == occ}
            n_occ = table.extra["occupancy_values"][occ]
            roots = {lb: c["crossing_wide"] for lb, c in rows.items()}
            unique = all(_count_crossings(lb, cfg, occ) == 1 for lb in rows)
            vertical = (roots[400.0] is not None and roots[1600.0] is not None
                        and abs(roots[1600.0] / roots[400.0] - 1) < 0.10)
            matches = all(r is not None and abs(r - n_occ) <= resolution for r in roots.values())
            verdicts[occ] = (unique, vertical, matches, roots[400.0], roots[1600.0], n_occ)
        ok = [occ for occ, v in verdicts.items() if all(v[:3])]
        summary = "; ".join(
            f"{occ}: crossing(400)={v[3]:.4g}, crossing(1600)={v[4]:.4g}, occupancy={v[5]:.4g}, "
            f"unique={v[0]}, vertical={v[1]}, matches={v[2]}"
            for occ, v in verdicts.items())
        info["detail"] = f"{summary}; printed reference 0.115 (not asserted)"
        print(info["detail"])
        assert ok, summary


def _count_crossings(lambda_b, cfg, occupancy):
    # sign changes of R - 1 on a fine log grid from far below to the grid top
    n_t = background_occupancy(cfg)
    grid = np.geomspace(1e-8, 0.3, 200)
    vals = np.array([ratio_at(la, lambda_b, cfg.eta, n_t, cfg.params.baths(occupancy)) for la in grid]) - 1
    return int(np.count_nonzero(np.diff(np.sign(vals))))


def test_criterion_8_stability_oracle(acceptance_report):
    with criterion(acceptance_report, 8, "stability oracle agreement", budget=5.0) as info:
        rng = np.random.default_rng(SEED)
        disagreements = marginal = forced = 0
        for i in range(500):
            kappas = tuple(TWO_PI * 1e6 * 10 ** rng.uniform(-1, 3, 3))
            if i % 2:
                lb = rng.uniform(0, 50)
                la = 1 + lb + rng.uniform(1e-3, 50)
                forced += 1
            else:
                la, lb = rng.uniform(0, 60, 2)
            m = cooperativity_drift_matrix(Cooperativities(la, lb), kappas)
            verdict = matrix_is_stable(m)
            max_re = max_real_eigenvalue(m)
            if abs(max_re) <= 1e-6 * min(kappas):
                marginal += 1
                continue
            disagreements += verdict != (max_re < 0)
            if la > 1 + lb:
                assert not verdict, (la, lb)
        assert disagreements == 0, disagreements
        info["detail"] = f"500 draws ({forced} with Lambda_a > 1 + Lambda_b), 0 disagreements, {marginal} marginal"


def test_criterion_9_determinism(acceptance_report, tmp_path):
    with criterion(acceptance_report, 9, "determinism", budget=60.0) as info:
        cfg = parse_config("")
        for name, run in SUBCOMMANDS.items():
            outputs = set()
            for workers in (1, 1, 3):
                table = run(cfg, workers=workers)
                outputs.add((render_csv(table).encode("utf-8"), render_meta(table, cfg).encode("utf-8")))
            assert len(outputs) == 1, name
        info["detail"] = f"{len(SUBCOMMANDS)} subcommands byte-identical across reruns and 1/3 workers"
