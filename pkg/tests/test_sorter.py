import numpy as np
import pytest

from pactrellis.sorter import (
    LatencyReport,
    apply_network,
    build_full_bitonic,
    build_reduced_bitonic,
    latency_report,
    psi_ld,
    psi_lva,
)


class TestStageCountFormulas:
    def test_psi_ld_values(self):
        assert psi_ld(128) == 36
        assert psi_ld(1) == 1
        assert psi_ld(4) == 6
        assert psi_ld(32) == 21

    def test_psi_ld_rejects_non_power(self):
        with pytest.raises(ValueError):
            psi_ld(3)
        with pytest.raises(ValueError):
            psi_ld(0)

    def test_psi_lva_values(self):
        assert psi_lva(128, 4) == 7  # per-state list 8: 10 - 3
        assert psi_lva(4, 0) == 4  # per-state list 4: 6 - 2
        assert psi_lva(64, 4) == 4
        assert psi_lva(16, 4) == 1  # per-state list 1
        assert psi_lva(1, 0) == 1

    def test_psi_lva_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            psi_lva(8, 4)  # fewer survivors than states
        with pytest.raises(ValueError):
            psi_lva(12, 1)
        with pytest.raises(ValueError):
            psi_lva(8, -1)

    def test_reduction_is_log2_of_per_state_list(self):
        for ell_log in range(0, 6):
            ell = 1 << ell_log
            assert psi_ld(ell) - psi_lva(ell, 0) == ell_log


class TestNetworkStructure:
    def test_single_comparator_for_l1(self):
        spec = build_reduced_bitonic(1)
        assert spec.input_width == 2
        assert spec.stages == (((0, 1, True),),)
        assert spec.output_lanes == (0,)

    def test_stage_counts_match_formulas(self):
        for L in (1, 2, 4, 8, 16, 32):
            assert build_full_bitonic(L).stage_count == psi_ld(L)
            for m in range(0, 4):
                assert build_reduced_bitonic(L).stage_count == psi_lva(L << m, m)

    def test_lanes_are_disjoint_parallel_pairs(self):
        for L in (2, 8):
            for spec in (build_full_bitonic(L), build_reduced_bitonic(L)):
                for stage in spec.stages:
                    assert len(stage) == L
                    touched = [i for pair in stage for i in pair[:2]]
                    assert len(set(touched)) == 2 * L

    def test_rejects_bad_list_size(self):
        with pytest.raises(ValueError):
            build_reduced_bitonic(3)
        with pytest.raises(ValueError):
            build_full_bitonic(0)


class TestApplyNetwork:
    def test_single_comparator(self):
        spec = build_reduced_bitonic(1)
        assert np.array_equal(apply_network(spec, [5.0, 2.0]), [2.0, 5.0])
        assert np.array_equal(apply_network(spec, [2.0, 5.0]), [2.0, 5.0])

    def test_hand_example_l4(self):
        spec = build_reduced_bitonic(4)
        out = apply_network(spec, [8, 3, 5, 1, 9, 2, 7, 4])
        assert sorted(out[:4]) == [1, 2, 3, 4]

    def test_full_network_sorts(self, rng):
        for L in (2, 4, 8, 16):
            spec = build_full_bitonic(L)
            vals = rng.normal(0, 1, (1000, 2 * L))
            out = apply_network(spec, vals)
            assert np.array_equal(out, np.sort(vals, axis=1))

    def test_reduced_selects_smallest_multiset(self, rng):
        for L in (2, 4, 8, 16):
            spec = build_reduced_bitonic(L)
            vals = rng.normal(0, 1, (1000, 2 * L))
            out = apply_network(spec, vals)
            picked = np.sort(out[:, :L], axis=1)
            assert np.array_equal(picked, np.sort(vals, axis=1)[:, :L])

    def test_selects_under_ties(self, rng):
        spec = build_reduced_bitonic(4)
        vals = rng.integers(0, 4, (500, 8)).astype(float)
        out = apply_network(spec, vals)
        assert np.array_equal(np.sort(out[:, :4], axis=1), np.sort(vals, axis=1)[:, :4])

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            apply_network(build_reduced_bitonic(2), [1.0, 2.0])


class TestLatencyReport:
    def test_reference_operating_point(self):
        r = latency_report(K=128, L=128, m=4)
        assert r.ld_stages_total == 4608
        assert r.lva_stages_total == 896
        assert round(r.reduction_pct, 1) == 80.6
        assert r.per_state_list == 8

    def test_degenerate(self):
        r = latency_report(K=1, L=1, m=0)
        assert (r.ld_stages_total, r.lva_stages_total, r.reduction_pct) == (1, 1, 0.0)

    def test_mid_size(self):
        r = latency_report(K=64, L=32, m=2)
        assert r.ld_stages_total == 64 * 21
        assert r.lva_stages_total == 64 * 7
        assert round(r.reduction_pct, 1) == 66.7

    def test_is_dataclass_with_fields(self):
        r = latency_report(K=16, L=8, m=1)
        assert isinstance(r, LatencyReport)
        assert r.ld_stages == psi_ld(8)
        assert r.lva_stages == psi_lva(8, 1)
