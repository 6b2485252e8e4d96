import json
import os

import numpy as np
import pytest

from pexkit.counterexamples import (FEEDBACK_K_U, FEEDBACK_K_X, INPUT_B, NECESSITY,
                                    SUFFICIENCY, constants_digest, emit_figures,
                                    get_spec, run_counterexample)
from pexkit.lti import certify, state_output_system

# pinned against accidental edits of the embedded instance data
CONSTANTS_SHA256 = "993909173b7c0b3e37a4f8ac2f7d17d3436fa9eca44b83ca2ef090b4342be253"


@pytest.fixture(scope="module")
def sufficiency_report():
    return run_counterexample(SUFFICIENCY)


@pytest.fixture(scope="module")
def necessity_report():
    return run_counterexample(NECESSITY)


class TestEmbeddedConstants:
    def test_digest_pinned(self):
        assert constants_digest() == CONSTANTS_SHA256

    def test_feedback_gains_are_rank_one(self):
        assert np.linalg.matrix_rank(FEEDBACK_K_X) == 1
        assert np.linalg.matrix_rank(FEEDBACK_K_U) == 1

    def test_annihilation_holds_to_rounding(self):
        # the row combination (2, 1, -1) of the gains reproduces the
        # annihilated state/input rows with flipped sign (1-ulp arithmetic)
        weights = np.array([2.0, 1.0, -1.0])
        from pexkit.counterexamples import (ANNIHILATED_INPUT_ROW,
                                            ANNIHILATED_STATE_ROW)
        np.testing.assert_allclose(weights @ FEEDBACK_K_X, -ANNIHILATED_STATE_ROW,
                                   rtol=1e-15)
        np.testing.assert_allclose(weights @ FEEDBACK_K_U, -ANNIHILATED_INPUT_ROW,
                                   rtol=1e-15)

    def test_dither_orthogonal_to_annihilated_combination(self):
        from pexkit.counterexamples import DITHER_DIRECTION_1, DITHER_DIRECTION_2
        weights = np.array([2.0, 1.0, -1.0])
        assert abs(weights @ DITHER_DIRECTION_1) < 1e-12
        assert abs(weights @ DITHER_DIRECTION_2) < 1e-12

    def test_unknown_spec_name(self):
        with pytest.raises(ValueError, match="unknown counterexample"):
            get_spec("bogus")


class TestCertificates:
    @pytest.mark.parametrize("spec", [SUFFICIENCY, NECESSITY], ids=lambda s: s.name)
    def test_stable_reachable_index_three(self, spec):
        cert = certify(state_output_system(spec.A, spec.B, "dt"))
        assert cert.is_stable
        assert cert.is_reachable
        assert cert.controllability_index == 3


class TestSufficiencyRun:
    def test_input_stack_spans_everything(self, sufficiency_report):
        assert sufficiency_report.terminal_ranks["rn_u"] == 21

    def test_pair_is_rank_deficient(self, sufficiency_report):
        trace = sufficiency_report.traces["r1_xu"]
        assert trace.terminal < 10
        assert len(set(trace.ranks[-500:].tolist())) == 1

    def test_traces_monotone(self, sufficiency_report):
        for trace in sufficiency_report.traces.values():
            assert trace.is_monotone()

    def test_index_stack_pe_but_pair_not(self, sufficiency_report):
        reports = sufficiency_report.pe_reports
        assert reports["stack_nu_plus_1"].is_pe
        assert not reports["xu"].is_pe

    def test_deep_stack_premise_false(self, sufficiency_report):
        # tightness: the (n+1)-depth premise does not hold for this input
        assert not sufficiency_report.pe_reports["stack_n_plus_1"].is_pe

    def test_annihilated_direction_is_exact(self, sufficiency_report):
        weights = np.array([2.0, 1.0, -1.0])
        x = sufficiency_report.state_signal.data
        u = sufficiency_report.input_signal.data
        zx = np.zeros(7)
        zx[[2, 5, 6]] = 1.0
        residual = zx @ x + weights @ u
        assert np.abs(residual).max() <= 1e-10

    def test_runtime_budget(self, sufficiency_report):
        assert sufficiency_report.runtime_seconds < 10.0


class TestNecessityRun:
    def test_pair_spans_everything(self, necessity_report):
        assert necessity_report.terminal_ranks["r1_xu"] == 10

    def test_deep_stack_spans_exactly_ten(self, necessity_report):
        assert necessity_report.terminal_ranks["rnp1_u"] == 10

    def test_ppe_degree_matches_bound(self, necessity_report):
        assert necessity_report.ppe_report.ppe_degree == 10

    def test_index_stack_not_pe(self, necessity_report):
        assert necessity_report.terminal_ranks["rank_nu_plus_1"] <= 10
        assert not necessity_report.pe_reports["stack_nu_plus_1"].is_pe

    def test_pair_is_pe(self, necessity_report):
        assert necessity_report.pe_reports["xu"].is_pe

    def test_traces_monotone(self, necessity_report):
        for trace in necessity_report.traces.values():
            assert trace.is_monotone()

    def test_runtime_budget(self, necessity_report):
        assert necessity_report.runtime_seconds < 10.0


class TestEmitFigures:
    def test_file_manifest_sufficiency(self, sufficiency_report, tmp_path):
        written = emit_figures(sufficiency_report, tmp_path)
        names = sorted(os.path.basename(p) for p in written)
        assert names == ["r1_xu.csv", "rn_u.csv", "summary.json"]

    def test_file_manifest_necessity(self, necessity_report, tmp_path):
        written = emit_figures(necessity_report, tmp_path)
        names = sorted(os.path.basename(p) for p in written)
        assert names == ["r1_xu.csv", "rnp1_u.csv", "summary.json"]

    def test_row_count_and_header(self, sufficiency_report, tmp_path):
        emit_figures(sufficiency_report, tmp_path)
        lines = (tmp_path / "r1_xu.csv").read_text().splitlines()
        assert lines[0] == "T,rank"
        assert len(lines) == 1 + 1000

    def test_deterministic_bytes(self, necessity_report, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        emit_figures(necessity_report, dir_a)
        emit_figures(run_counterexample("necessity"), dir_b)
        for name in ("r1_xu.csv", "rnp1_u.csv", "summary.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_summary_contents(self, necessity_report, tmp_path):
        emit_figures(necessity_report, tmp_path)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["terminal_ranks"]["r1_xu"] == 10
        assert summary["certificates"]["controllability_index"] == 3
        assert summary["input_stack_ppe_degree"] == 10
