"""Builder and pattern-machinery tests."""

from itertools import combinations
from math import comb

import numpy as np
import pytest

from medwit.circuits import (
    Circuit,
    DephasingPattern,
    GateOp,
    SLICE,
    build_asymmetric,
    build_staged,
    build_symmetric,
    cnot,
    exhaustive_patterns,
    partial_swap,
    pattern_population,
    phase_flip,
    sample_patterns,
    swap,
)
from medwit.density import basis_density, partial_trace, run_network_density
from medwit.pauli import BasisState

ZERO4 = BasisState.from_string("0000")


class TestGateOp:
    def test_validation(self):
        with pytest.raises(ValueError):
            GateOp("CNOT", (1, 1))
        with pytest.raises(ValueError):
            GateOp("H", (0, 1))
        with pytest.raises(ValueError):
            partial_swap(0, 1, 0.0)
        with pytest.raises(ValueError):
            phase_flip(0, 1.5)
        assert phase_flip(2, "symbolic").p == "symbolic"

    def test_circuit_range_check(self):
        with pytest.raises(ValueError):
            Circuit(2, (cnot(0, 2),))


class TestBuildSymmetric:
    def test_shape_without_dephasing(self):
        circuit = build_symmetric()
        assert len(circuit.gates) == 7
        assert circuit.slice_count == 4

    def test_shape_with_dephasing(self):
        circuit = build_symmetric(0.3)
        assert len(circuit.gates) == 9
        kinds = [g.kind for g in circuit.gates]
        assert kinds.count("PHASE_FLIP") == 2
        # channels precede the closing CNOTs
        assert kinds.index("PHASE_FLIP") < kinds.index("CNOT", kinds.index("CPHASE"))

    def test_p_zero_matches_undephased_outputs(self):
        states_none = run_network_density(build_symmetric(), basis_density(ZERO4))
        states_zero = run_network_density(build_symmetric(0.0), basis_density(ZERO4))
        for a, b in zip(states_none, states_zero):
            assert np.array_equal(a.entries, b.entries)

    def test_intensity_validated(self):
        with pytest.raises(ValueError):
            build_symmetric(-0.1)


class TestBuildAsymmetric:
    def test_shape(self):
        circuit = build_asymmetric()
        kinds = [g.kind for g in circuit.gates]
        assert kinds == ["H", "CNOT", "SWAP", "SWAP"]
        assert circuit.slice_count == 4


class TestBuildStaged:
    @pytest.mark.parametrize("stages", [1, 2, 4, 8])
    def test_unpatterned_matches_asymmetric_final_state(self, stages):
        initial = basis_density(ZERO4)
        staged = run_network_density(build_staged(stages), initial)[-1]
        asym = run_network_density(build_asymmetric(), initial)[-1]
        diff = np.max(
            np.abs(
                partial_trace(staged, [0, 3]).entries - partial_trace(asym, [0, 3]).entries
            )
        )
        assert diff < 1e-10

    def test_all_dephased_single_stage_structure(self):
        pattern = DephasingPattern((True,), (True,))
        circuit = build_staged(1, pattern)
        kinds = [g.kind for g in circuit.gates]
        assert kinds == ["H", "CNOT", "PARTIAL_SWAP", "Z", "PARTIAL_SWAP", "Z"]
        assert circuit.gates[2].alpha == 1.0

    def test_balanced_pattern_yields_four_dephased_stages_per_link(self):
        pattern = sample_patterns(8, 1, balanced=True, seed=0)[0]
        circuit = build_staged(8, pattern)
        z_count = sum(1 for g in circuit.gates if g.kind == "Z")
        assert z_count == 8  # four per link
        assert sum(pattern.bc_choices) == 4 and sum(pattern.cd_choices) == 4

    def test_z_first_ordering(self):
        pattern = DephasingPattern((True,), (False,))
        kinds = [g.kind for g in build_staged(1, pattern, z_first=True).gates]
        assert kinds == ["H", "CNOT", "Z", "PARTIAL_SWAP", "PARTIAL_SWAP"]

    def test_interleaved_ordering(self):
        circuit = build_staged(2, interleaved=True)
        links = [g.qubits for g in circuit.gates if g.kind == "PARTIAL_SWAP"]
        assert links == [(1, 2), (2, 3), (1, 2), (2, 3)]

    def test_pattern_length_checked(self):
        with pytest.raises(ValueError, match="does not match"):
            build_staged(8, DephasingPattern((True,), (False,)))


class TestPatterns:
    def test_population_counts(self):
        assert pattern_population(8, balanced=True) == comb(8, 4) ** 2 == 4900
        assert pattern_population(3, balanced=False) == 64
        with pytest.raises(ValueError):
            pattern_population(3, balanced=True)

    def test_sampled_patterns_are_distinct_and_balanced(self):
        patterns = sample_patterns(8, 16, balanced=True, seed=5)
        assert len(set(patterns)) == 16
        for pattern in patterns:
            assert pattern.balanced

    def test_sampling_is_deterministic_in_seed(self):
        a = sample_patterns(8, 16, balanced=True, seed=3)
        b = sample_patterns(8, 16, balanced=True, seed=3)
        c = sample_patterns(8, 16, balanced=True, seed=4)
        assert a == b
        assert a != c

    def test_full_population_request_is_exhaustive(self):
        patterns = sample_patterns(8, 4900, balanced=True, seed=0)
        assert patterns == exhaustive_patterns(8)
        assert len(set(patterns)) == 4900

    def test_count_beyond_population_rejected(self):
        with pytest.raises(ValueError, match="exceeds"):
            sample_patterns(2, 5, balanced=True)

    def test_exhaustive_enumeration_matches_itertools(self):
        got = {p.bc_choices for p in exhaustive_patterns(4)}
        want = set()
        for positions in combinations(range(4), 2):
            want.add(tuple(k in positions for k in range(4)))
        assert got == want

    def test_unbalanced_sampling(self):
        patterns = sample_patterns(2, 16, balanced=False, seed=1)
        assert len(set(patterns)) == 16  # the full 4x4 population
        counts = {sum(p.bc_choices) + sum(p.cd_choices) for p in patterns}
        assert counts == {0, 1, 2, 3, 4}
