"""Acceptance gate: every guarantee at its stated tolerance, desk scale.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import json
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from l22embed import (
    DemandSpectral1DEmbedding,
    DemandSquaredLengthEmbedding,
    GoemansEmbedding,
    Spectral1DEmbedding,
    SquaredLengthEmbedding,
    StableRankEmbedding,
    brute_force_sparsest_cut,
    check_l22,
    difference_matrix,
    distortion_report,
    generalized_eigs,
    round_sparsest_cut,
    solve_sdp,
    svd_spectrum,
    verify_key_lemma,
    weighted_difference_matrix,
)
from l22embed.cli import main as cli_main
from l22embed.embeddings import embedded_pair_norms
from l22embed.generators import (
    block_model_instance,
    cycle_instance,
    dumbbell_instance,
    complete_instance,
)
from l22embed.pointset import PointSet, pair_arrays
from l22embed.spectral import stable_rank_bound, von_neumann_check

from conftest import corpus, random_demand

CORPUS_SIZE = 200


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {num}: {label}")
        raise
    print(f"PASS criterion {num}: {label}")


@pytest.fixture(scope="module")
def acceptance_corpus():
    sets = corpus(CORPUS_SIZE, seed=20240817, max_n=20, max_d=8)
    assert len(sets) == CORPUS_SIZE
    return sets


@pytest.fixture(scope="module")
def solved_instances():
    """30 solved instances with n <= 12, with per-solve wall times."""
    instances = []
    for n in (4, 5, 6, 7, 8, 9, 10, 11, 12):
        instances.append(cycle_instance(n))
    for n in (5, 7, 9, 11):
        instances.append(cycle_instance(n, demand="random", seed=n))
    for n in (4, 6, 8, 10, 12):
        instances.append(dumbbell_instance(n, bridge_weight=0.15))
    for n in (6, 8, 10, 12):
        instances.append(block_model_instance(n, blocks=2, inter_weight=0.02))
    for n in (9, 12):
        instances.append(block_model_instance(n, blocks=3, inter_weight=0.02))
    for n in (4, 6, 8):
        instances.append(complete_instance(n))
    for n in (5, 8, 10):
        instances.append(dumbbell_instance(n, bridge_weight=0.3, demand="random", seed=n))
    assert len(instances) == 30
    solved = []
    for inst in instances:
        start = time.monotonic()
        sol = solve_sdp(inst, tol=1e-6)
        solved.append((inst, sol, time.monotonic() - start))
    return solved


def pair_squared_distances(ps: PointSet) -> np.ndarray:
    rows, cols = pair_arrays(ps.n)
    return np.sum((ps.points[rows] - ps.points[cols]) ** 2, axis=1)


def fit_every_method(ps, demand, mvee_eps=0.05, mvee_iter=2000):
    yield SquaredLengthEmbedding(validate_l22=False).fit(ps)
    yield StableRankEmbedding(validate_l22=False).fit(ps)
    yield Spectral1DEmbedding(validate_l22=False).fit(ps)
    yield GoemansEmbedding(eps=mvee_eps, max_iter=mvee_iter, validate_l22=False).fit(ps)
    yield DemandSpectral1DEmbedding(validate_l22=False).fit(ps, demand=demand)
    yield DemandSquaredLengthEmbedding(validate_l22=False).fit(ps, demand=demand)


def test_criterion_01_contraction_suite(acceptance_corpus):
    with criterion(1, "contraction of every method on 200 generated sets, < 60 s"):
        start = time.monotonic()
        for idx, ps in enumerate(acceptance_corpus):
            demand = random_demand(ps.n, seed=idx, sparse=(idx % 2 == 0))
            sq = pair_squared_distances(ps)
            for est in fit_every_method(ps, demand):
                emb = embedded_pair_norms(est.matrix_, ps.points)
                assert np.all(emb <= sq * (1.0 + 1e-9) + 1e-300), (
                    idx,
                    type(est).__name__,
                )
        elapsed = time.monotonic() - start
        assert elapsed < 60.0, f"contraction suite took {elapsed:.1f} s"


def test_criterion_02_stable_rank_average_distortion(acceptance_corpus):
    with criterion(2, "uniform average distortion <= stable rank on all sets"):
        for idx, ps in enumerate(acceptance_corpus):
            spec = svd_spectrum(difference_matrix(ps))
            for cls in (StableRankEmbedding, Spectral1DEmbedding):
                est = cls(validate_l22=False).fit(ps)
                beta = distortion_report(ps, est).average_distortion
                assert beta <= spec.stable_rank * (1.0 + 1e-6), (idx, cls.__name__, beta)


def test_criterion_03_spectral_line_sum_identity(acceptance_corpus):
    with criterion(3, "line-sum identity sum|f_i - f_j| = sigma_1^2 on all sets"):
        for idx, ps in enumerate(acceptance_corpus):
            est = Spectral1DEmbedding(validate_l22=False).fit(ps)
            total = float(np.sum(embedded_pair_norms(est.matrix_, ps.points)))
            sigma1_sq = est.spectrum_.sigma[0] ** 2
            assert abs(total - sigma1_sq) <= 1e-8 * sigma1_sq, (idx, total, sigma1_sq)


def test_criterion_04_mvee_worst_case(acceptance_corpus, triangle):
    with criterion(4, "ellipsoid worst case <= sqrt((1+1e-6) d_eff); triangle = sqrt(2)"):
        for idx, ps in enumerate(acceptance_corpus):
            if ps.n > 12:
                continue
            est = GoemansEmbedding(eps=1e-6, validate_l22=False).fit(ps)
            assert est.converged_, idx
            rep = distortion_report(ps, est)
            bound = np.sqrt((1.0 + 1e-6) * est.d_eff_)
            assert rep.worst_case_distortion <= bound, (idx, rep.worst_case_distortion)
        est = GoemansEmbedding(eps=1e-6).fit(triangle)
        rep = distortion_report(triangle, est)
        assert abs(rep.worst_case_distortion - np.sqrt(2.0)) <= 1e-9


def test_criterion_05_sqrt_rank_average_distortion(acceptance_corpus, triangle):
    with criterion(5, "(demand-)weighted beta <= sqrt(d_eff); triangle = sqrt(2)"):
        for idx, ps in enumerate(acceptance_corpus):
            spec = svd_spectrum(difference_matrix(ps))
            est = SquaredLengthEmbedding(validate_l22=False).fit(ps)
            beta = distortion_report(ps, est).average_distortion
            assert beta <= np.sqrt(spec.rank) * (1.0 + 1e-6), (idx, beta, spec.rank)

            demand = random_demand(ps.n, seed=1000 + idx)
            west = DemandSquaredLengthEmbedding(validate_l22=False).fit(ps, demand=demand)
            wspec = svd_spectrum(weighted_difference_matrix(ps, demand))
            wbeta = distortion_report(ps, west, demand=demand).average_distortion
            assert wbeta <= np.sqrt(wspec.rank) * (1.0 + 1e-6), (idx, wbeta, wspec.rank)
        est = SquaredLengthEmbedding().fit(triangle)
        beta = distortion_report(triangle, est).average_distortion
        assert abs(beta - np.sqrt(2.0)) <= 1e-9


def test_criterion_06_key_lemma_suite(acceptance_corpus, collinear):
    with criterion(6, "inner-product lemma on all sets; collinear violation = 2"):
        for idx, ps in enumerate(acceptance_corpus):
            assert verify_key_lemma(ps).ok, idx
        report = verify_key_lemma(collinear)
        assert not report.ok
        assert abs(report.worst_violation - 2.0) <= 1e-12


def test_criterion_07_sdp_soundness(solved_instances):
    with criterion(7, "30 instances: phi_sdp <= phi* + 1e-5, valid points, < 120 s each"):
        for k, (inst, sol, elapsed) in enumerate(solved_instances):
            assert elapsed < 120.0, (k, elapsed)
            assert sol.converged, k
            best = brute_force_sparsest_cut(inst.cost, inst.demand)
            assert sol.phi_sdp <= best.sparsity + 1e-5, (k, sol.phi_sdp, best.sparsity)
            assert check_l22(sol.points, tol=10.0 * sol.tol).ok, k


def test_criterion_08_end_to_end_rounding(solved_instances):
    with criterion(8, "certified instances: phi(cut) <= (r/delta) phi_sdp, >= phi*"):
        certified = 0
        for k, (inst, sol, _) in enumerate(solved_instances):
            spec = generalized_eigs(inst.cost, inst.demand)
            delta = 0.5
            r = spec.r_certificate(sol.phi_sdp, delta)
            if r is None:
                continue
            assert spec.lambda_r(r) >= sol.phi_sdp / (1.0 - delta)
            outcome = round_sparsest_cut(inst, sol, delta=delta, r=r, spectrum=spec)
            assert outcome.guarantee == pytest.approx(r / delta)
            phi_cut = outcome.best_cut.sparsity
            assert phi_cut <= (r / delta) * sol.phi_sdp * (1.0 + 1e-4), (k, phi_cut)
            best = brute_force_sparsest_cut(inst.cost, inst.demand)
            assert phi_cut >= best.sparsity - 1e-10, (k, phi_cut, best.sparsity)
            certified += 1
        assert certified >= 10, f"only {certified} certified instances"


def test_criterion_09_tail_mass_and_stable_rank_bounds(solved_instances):
    with criterion(9, "tail-mass bound and r/delta stable-rank bound on every solve"):
        for k, (inst, sol, _) in enumerate(solved_instances):
            wspec = svd_spectrum(weighted_difference_matrix(sol.points, inst.demand))
            pencil = generalized_eigs(inst.cost, inst.demand)
            for r in range(1, pencil.lambdas.size):
                lam = pencil.lambda_r(r + 1)
                if lam <= 0:
                    continue
                rep = von_neumann_check(wspec, r, sol.phi_sdp, lam)
                assert rep.ok, (k, r, rep.lhs, rep.rhs)
            for r in range(1, min(wspec.sigma.size, 6) + 1):
                for delta in (0.25, 0.5, 0.75, 0.9):
                    rep = stable_rank_bound(wspec, r, delta, tol=1e-6)
                    if rep.precondition_ok:
                        assert rep.ok, (k, r, delta, rep.stable_rank)


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "fixed-seed CLI reruns are byte-identical in --deterministic mode"):
        outs = [str(tmp_path / "run1"), str(tmp_path / "run2")]
        for out in outs:
            assert cli_main(["gen", "--kind", "block_model", "--n", "8", "--blocks", "2",
                             "--inter-weight", "0.02", "--seed", "5", "--out", out,
                             "--deterministic"]) == 0
            cost = os.path.join(out, "cost.json")
            demand = os.path.join(out, "demand.json")
            assert cli_main(["sdp", "--cost", cost, "--demand", demand, "--out", out,
                             "--deterministic"]) == 0
            assert cli_main(["round", "--cost", cost, "--demand", demand,
                             "--gram", os.path.join(out, "gram.json"),
                             "--out", out, "--deterministic"]) == 0
            assert cli_main(["gen", "--kind", "l1_embeddable", "--n", "7", "--seed", "11",
                             "--out", out, "--deterministic"]) == 0
            pts = os.path.join(out, "points.json")
            assert cli_main(["spectrum", "--points", pts, "--out", out,
                             "--deterministic"]) == 0
            assert cli_main(["embed", "--method", "sqlen", "--points", pts, "--out", out,
                             "--deterministic"]) == 0
            assert cli_main(["oracle", "--cost", cost, "--demand", demand, "--out", out,
                             "--deterministic"]) == 0
        names = ["cost.json", "demand.json", "gram.json", "points.json", "outcome.json",
                 "spectrum.json", "embedding.json", "distortion.json", "oracle.json"]
        for name in names:
            with open(os.path.join(outs[0], name), "rb") as fh:
                a = fh.read()
            with open(os.path.join(outs[1], name), "rb") as fh:
                b = fh.read()
            assert a == b, name
        # artifacts parse back as JSON with provenance attached
        with open(os.path.join(outs[0], "outcome.json"), encoding="utf-8") as fh:
            payload = json.load(fh)
        assert payload["meta"]["tool_version"]
