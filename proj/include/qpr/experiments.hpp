#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpr/circuits.hpp"
#include "qpr/ensembles.hpp"
#include "qpr/moments.hpp"

namespace qpr {

struct DistinguisherResult {
    double accept_prob_ensemble = 0.0, stderr_ensemble = 0.0;
    double accept_prob_haar = 0.0, stderr_haar = 0.0;
    double advantage = 0.0, advantage_stderr = 0.0;
    double analytic_bound = 0.0; // 0 when not applicable
    bool bound_vacuous = false;
    long trials = 0;

    nlohmann::json to_json() const;
};

// Draw a state, measure d+1 fresh copies in the computational basis, accept
// iff the outcomes are F2-linearly dependent. Second arm repeats the game
// with Haar states; analytic Haar bound 2^{-(n-d-1)} + d(d+1)/2^n.
DistinguisherResult lindep_distinguisher(int n, int d, const StateEnsembleSpec& spec, long trials,
                                         RngStream& rng);

// Plug-in TV distance between the measured distributions on output_bits when
// the circuit is fed t copies of a spec_a sample vs a spec_b sample, with a
// 1000-resample bootstrap spread. Needs |output_bits| <= 12.
DistinguisherResult circuit_advantage(const LayeredCircuit& c, const std::set<int>& output_bits,
                                      const StateEnsembleSpec& spec_a,
                                      const StateEnsembleSpec& spec_b, int t, long trials,
                                      RngStream& rng);

struct MarginalReport {
    int k = 0;
    int subsets_inspected = 0;
    double max_tv = 0.0;
    double max_tv_stderr = 0.0; // bootstrap spread at the worst subset
    std::string reference;      // "uniform" or "uniform_x_corrupted"
    std::vector<int> corrupted_set;

    nlohmann::json to_json() const;
};

// Worst-case TV over sampled k-subsets of output wires, between the measured
// marginals under spec inputs and a reference that is uniform off the
// corrupted set (forward lightcone of the ancillae) and empirically sampled
// on it under maximally mixed inputs.
MarginalReport kwise_marginal_check(const LayeredCircuit& c, const StateEnsembleSpec& spec, int t,
                                    int k, int subsets, long trials, RngStream& rng);

struct PruArmStats {
    double tn_mean = 0.0, tn_stderr = 0.0;         // raw ||rho_A - I/2^k||_1, pooled
    double hs2_mean = 0.0, hs2_stderr = 0.0;       // ||rho_A - I/2^k||_2^2, pooled
    double purity_mean = 0.0, purity_stderr = 0.0; // Tr rho_A^2, pooled
    int worst_subset = 0;                          // argmax per-subset tn mean
    double worst_tn_mean = 0.0, worst_tn_stderr = 0.0;
};

struct PruGameReport {
    int n = 0, t = 0, k = 0;
    long trials = 0;
    int schmidt_rank_r = 0;  // flat-cut rank of pre|0^{tn}>
    long rank_bound = 1;     // 4^depth
    double markov_bound = 0; // (r+1) * 2^{k - n/2}, bound on E tn
    std::vector<std::vector<int>> subsets;
    PruArmStats design; // unitary_spec arm
    PruArmStats haar;
    bool pass = false; // second-moment equality: |hs2 gap| <= 3 combined stderr

    nlohmann::json to_json() const;
};

// Parallel-query game: fixed pre-circuit state on t blocks of n qubits, a
// fresh U applied to every block, local mixedness statistics on 20 fixed
// random k-subsets shared by both arms.
PruGameReport pru_parallel_game(int n, int t, const LayeredCircuit& pre,
                                const UnitaryEnsembleSpec& unitary_spec, int k, long trials,
                                RngStream& rng);

struct EntanglementReport {
    int n = 0, d = 0;
    double ceiling = 0.0; // d, the subspace-state entropy cap
    std::vector<int> cuts;
    std::vector<double> subspace_mean, subspace_stderr, subspace_max;
    std::vector<double> haar_mean, haar_stderr;

    nlohmann::json to_json() const;
};

// Per-contiguous-cut von Neumann entropies for kwise-phased subspace states
// vs Haar states.
EntanglementReport pseudoentanglement_report(int n, int d, long samples, RngStream& rng);

struct KwiseCheckReport {
    int m = 0, k = 0;
    long seeds = 0;
    int subsets = 0;
    long expected_count = 0;
    long max_count_dev = 0; // worst |count - expected| over all cells
    bool uniform = false;

    nlohmann::json to_json() const;
};

// Exhaustive seed enumeration: over all (2^m)^k seeds, the joint outputs on
// any k distinct inputs must hit every k-bit pattern exactly seeds/2^k times.
// When 2^m == k the single full input set is used; otherwise `subsets`
// random k-subsets of inputs are checked.
KwiseCheckReport kwise_exhaustive_check(int m, int k, int subsets, RngStream& rng);

} // namespace qpr
