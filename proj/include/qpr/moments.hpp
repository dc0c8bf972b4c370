#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qpr/ensembles.hpp"
#include "qpr/statevec.hpp"

namespace qpr {

// hard cap on dense t-th moment operators: t*n <= 12
inline constexpr int kMomentCapLog2 = 12;

struct MomentOperator {
    int n = 0, t = 1;
    long sample_count = 0; // 0 = exact
    Mat mat;               // 2^{tn} x 2^{tn}
};

// Exact Haar moment Pi_sym^{(t,2^n)} / C(2^n + t - 1, t), built by explicit
// symmetrization over the t! index permutations (t <= 3).
MomentOperator haar_moment(int n, int t);

MomentOperator empirical_moment(const StateEnsembleSpec& spec, int t, long samples, RngStream& rng);

// Raw Schatten-p norm of the difference, p in {1, 2}; no 1/2 factor.
double moment_distance(const MomentOperator& a, const MomentOperator& b, int p);

struct FramePotentialEstimate {
    int t = 2;
    double mean = 0.0;
    double stderr_ = 0.0;
    long pairs = 0;
};

// Monte Carlo estimate of F_t = E |<psi|psi'>|^{2t} over independent pairs.
FramePotentialEstimate frame_potential(const StateEnsembleSpec& spec, int t, long pairs,
                                       RngStream& rng);

// Exact Haar frame potential 1 / C(2^n + t - 1, t).
double haar_frame_potential(int n, int t);

struct BoundReport {
    std::string name;
    double target = 0.0;   // analytic expected value
    double measured = 0.0; // Monte Carlo mean
    double stderr_ = 0.0;
    double bound = 0.0; // analytic upper bound where applicable, else 0
    bool pass = false;

    nlohmann::json to_json() const;
};

// Checks E Tr(rho_A^2) against (2^k + 2^{n-k}) / (2^n + 1),
// pass at 5 standard errors.
BoundReport purity_expectation_check(int n, int k, const StateEnsembleSpec& spec, long samples,
                                     RngStream& rng);

// E ||Tr_B(U|v><w|U')||_2^2 against (2^{n+k} - 2^{n-k})/(2^{2n} - 1) and the
// 2^{k-n} bound, for fixed orthogonal basis states |0...0>, |0...1>.
BoundReport offdiag_check(int n, int k, const UnitaryEnsembleSpec& spec, long samples,
                          RngStream& rng);

// Explicit approximate-design bound 2t^2 2^{-d} + 2^{t-d} + 2^{t-n} + 2t^2 2^{-n}.
double subspace_design_bound(int n, int d, int t);

// Empirical probability that max over all size-k subsystems of
// ||rho_A - 2^{-k} I||_1 (raw trace norm) is <= delta, over sampled states
// (t copies of each sample).
BoundReport mixedness_probability(const StateEnsembleSpec& spec, int t, int k, double delta,
                                  long samples, RngStream& rng);

} // namespace qpr
