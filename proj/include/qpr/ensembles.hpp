#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpr/gf2.hpp"
#include "qpr/statevec.hpp"

namespace qpr {

struct Unitary {
    int num_qubits = 0;
    Mat mat;

    double unitarity_residual() const; // ||U'U - I||_inf
};

StateVector sample_haar_state(int n, RngStream& rng);
Unitary sample_haar_unitary(int n, RngStream& rng);

// Uniform over the n-qubit Clifford group (mod global phase), returned dense.
Unitary sample_clifford(int n, RngStream& rng);

// Uniform over n-qubit stabilizer states.
StateVector sample_stabilizer_state(int n, RngStream& rng);

// All stabilizer states for n <= 2 (6 states at n=1, 60 at n=2), used by the
// exact moment paths.
std::vector<StateVector> enumerate_stabilizer_states(int n);

// |psi_{S,f}> = 2^{-d/2} sum_{x in S} (-1)^{f(x)} |x>
StateVector phased_subspace_state(const gf2::Subspace& s,
                                  const std::function<int(const gf2::BitVector&)>& phase);

enum class PhaseMode {
    TrueRandom,   // fresh random bit per subspace element
    Kwise4,       // 4-wise independent family on subspace coordinates (m = d)
    Kwise4Ambient // 4-wise independent family on the ambient n bits
};

struct StateEnsembleSpec {
    enum class Kind { Haar, Stabilizer, PhasedSubspace, FixedList };

    Kind kind = Kind::Haar;
    int n = 1;
    int d = 0;                                // PhasedSubspace only
    PhaseMode phase_mode = PhaseMode::Kwise4; // PhasedSubspace only
    std::vector<StateVector> states;          // FixedList only

    static StateEnsembleSpec haar(int n);
    static StateEnsembleSpec stabilizer(int n);
    static StateEnsembleSpec phased_subspace(int n, int d, PhaseMode mode = PhaseMode::Kwise4);
    static StateEnsembleSpec fixed_list(std::vector<StateVector> states);

    StateVector sample(RngStream& rng) const;

    // exact enumeration backing: FixedList always, Stabilizer for n <= 2
    bool enumerable() const;
    std::vector<StateVector> enumerate() const;

    nlohmann::json to_json() const;
    static StateEnsembleSpec from_json(const nlohmann::json& j);
};

struct UnitaryEnsembleSpec {
    enum class Kind { Haar, Clifford, FixedList };

    Kind kind = Kind::Haar;
    int n = 1;
    std::vector<Unitary> unitaries; // FixedList only

    static UnitaryEnsembleSpec haar(int n);
    static UnitaryEnsembleSpec clifford(int n);
    static UnitaryEnsembleSpec fixed_list(std::vector<Unitary> us);

    Unitary sample(RngStream& rng) const;

    // Images of two fixed orthonormal vectors under a fresh sample, without
    // materializing the full matrix when avoidable. basis_v/basis_w are
    // computational basis indices.
    std::pair<Vec, Vec> sample_column_pair(uint64_t basis_v, uint64_t basis_w,
                                           RngStream& rng) const;

    nlohmann::json to_json() const;
    static UnitaryEnsembleSpec from_json(const nlohmann::json& j);
};

} // namespace qpr
