#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpr/statevec.hpp"

namespace qpr {

enum class Geometry { None, Line };

struct Gate {
    int layer = 0;
    std::vector<int> qubits; // 1 or 2 distinct wire indices
    Mat mat;                 // 2x2 or 4x4, unitary to 1e-10

    Gate(int layer, std::vector<int> qubits, Mat mat);
};

// Layered circuit on num_system_qubits system wires plus num_ancillae
// ancilla wires (appended after the system). Gate supports within a layer
// are disjoint; measurement happens only at the end, via measure_all.
struct LayeredCircuit {
    int num_system_qubits = 0;
    int num_ancillae = 0;
    std::vector<Vec> ancilla_init;        // one single-qubit state per ancilla
    std::vector<std::vector<Gate>> layers;
    Geometry geometry = Geometry::None;

    int num_wires() const { return num_system_qubits + num_ancillae; }
    int depth() const { return int(layers.size()); }

    nlohmann::json to_json() const;
    static LayeredCircuit from_json(const nlohmann::json& j);
};

struct ValidationReport {
    int depth = 0;
    int max_fan_in = 0;
    bool geometry_ok = true;
};

// Structural checks; throws on overlapping supports within a layer.
ValidationReport validate(const LayeredCircuit& c);

// Wires whose initial values can influence the given outputs (reverse sweep).
std::set<int> backward_lightcone(const LayeredCircuit& c, const std::set<int>& outputs);

// Output wires reachable from the given input wires (forward sweep).
std::set<int> forward_lightcone(const LayeredCircuit& c, const std::set<int>& inputs);

// System input tensored with the ancilla initial states, then all layers in
// order. Lightcones and semantics both use the combined wire indexing.
StateVector apply(const LayeredCircuit& c, const StateVector& system_input);

// Alternating even/odd adjacent pairings with Haar random 2-qubit gates.
LayeredCircuit random_brickwork(int n, int depth, Geometry geometry, RngStream& rng);

struct SchmidtRankAudit {
    std::vector<int> cut_ranks; // contiguous cuts k = 1..n-1
    int max_rank = 1;
    long rank_bound = 1; // 4^depth
    bool within_bound = true;
};

// Measured Schmidt rank of c|0^n> at every contiguous cut vs the 4^depth law.
SchmidtRankAudit schmidt_rank_audit(const LayeredCircuit& c);

} // namespace qpr
