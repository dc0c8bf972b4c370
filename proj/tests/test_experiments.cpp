#include <doctest.h>

#include <algorithm>

#include "qpr/experiments.hpp"

using namespace qpr;

namespace {

LayeredCircuit empty_circuit(int wires) {
    LayeredCircuit c;
    c.num_system_qubits = wires;
    c.geometry = Geometry::Line;
    return c;
}

} // namespace

TEST_CASE("lindep distinguisher accepts phased subspace states with certainty") {
    RngStream rng(51);
    for (auto [n, d] : {std::pair{6, 2}, std::pair{8, 3}}) {
        DistinguisherResult r =
            lindep_distinguisher(n, d, StateEnsembleSpec::phased_subspace(n, d), 400, rng);
        // d+1 outcomes from a dimension-d subspace are always dependent
        CHECK(r.accept_prob_ensemble == doctest::Approx(1.0));
        CHECK(r.stderr_ensemble == doctest::Approx(0.0));
        CHECK(r.accept_prob_haar <= r.analytic_bound + 5.0 * r.stderr_haar);
        CHECK(r.advantage >= 0.75);
        CHECK_FALSE(r.bound_vacuous);
    }
}

TEST_CASE("lindep analytic bound and edge cases") {
    RngStream rng(52);
    DistinguisherResult r =
        lindep_distinguisher(10, 3, StateEnsembleSpec::phased_subspace(10, 3), 500, rng);
    CHECK(r.analytic_bound == doctest::Approx(std::pow(2.0, -6) + 12.0 / 1024.0));
    CHECK_THROWS_AS(lindep_distinguisher(4, 4, StateEnsembleSpec::haar(4), 100, rng),
                    std::domain_error);
    // at d = n-1 the bound exceeds 1 and is flagged vacuous
    DistinguisherResult v =
        lindep_distinguisher(3, 2, StateEnsembleSpec::phased_subspace(3, 2), 200, rng);
    CHECK(v.bound_vacuous);
}

TEST_CASE("lindep acceptance grows with the number of copies") {
    RngStream rng(53);
    // Haar arm: more copies means more chances for a dependency
    DistinguisherResult few = lindep_distinguisher(6, 2, StateEnsembleSpec::haar(6), 4000, rng);
    DistinguisherResult more = lindep_distinguisher(6, 4, StateEnsembleSpec::haar(6), 4000, rng);
    CHECK(more.accept_prob_haar >=
          few.accept_prob_haar - 3.0 * std::hypot(few.stderr_haar, more.stderr_haar));
}

TEST_CASE("circuit_advantage is near zero for identical ensembles") {
    RngStream rng(54);
    LayeredCircuit c = empty_circuit(8); // t=2 blocks of 4
    DistinguisherResult r = circuit_advantage(c, {0, 1, 2, 3}, StateEnsembleSpec::haar(4),
                                              StateEnsembleSpec::haar(4), 2, 4000, rng);
    // plug-in TV carries an O(sqrt(bins/trials)) upward bias
    CHECK(r.advantage <= 0.12);
}

TEST_CASE("circuit_advantage detects a blatantly non-uniform ensemble") {
    RngStream rng(55);
    LayeredCircuit c = empty_circuit(10);
    std::set<int> outputs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    StateEnsembleSpec pinned = StateEnsembleSpec::fixed_list({StateVector::basis_state(10, 0)});
    DistinguisherResult r =
        circuit_advantage(c, outputs, pinned, StateEnsembleSpec::haar(10), 1, 4000, rng);
    // a single outcome against 1024 near-uniform bins is blatant
    CHECK(r.advantage >= 0.9);
    CHECK(r.advantage_stderr > 0.0);
}

TEST_CASE("circuit_advantage validation") {
    RngStream rng(56);
    LayeredCircuit c = empty_circuit(8);
    CHECK_THROWS_AS(circuit_advantage(c, {}, StateEnsembleSpec::haar(4),
                                      StateEnsembleSpec::haar(4), 2, 100, rng),
                    std::domain_error);
    std::set<int> too_many;
    for (int i = 0; i < 13; ++i) too_many.insert(i);
    LayeredCircuit wide = empty_circuit(14);
    CHECK_THROWS_AS(circuit_advantage(wide, too_many, StateEnsembleSpec::haar(7),
                                      StateEnsembleSpec::haar(7), 2, 100, rng),
                    std::domain_error);
    // wires must equal t * n
    CHECK_THROWS_AS(circuit_advantage(c, {0}, StateEnsembleSpec::haar(4),
                                      StateEnsembleSpec::haar(4), 3, 100, rng),
                    std::invalid_argument);
}

TEST_CASE("stabilizer and Haar inputs agree through a shallow circuit on one output bit") {
    RngStream rng(57);
    LayeredCircuit c = random_brickwork(6, 2, Geometry::Line, rng);
    DistinguisherResult r = circuit_advantage(c, {2}, StateEnsembleSpec::stabilizer(6),
                                              StateEnsembleSpec::haar(6), 1, 6000, rng);
    CHECK(r.advantage <= std::max(0.05, 3.0 * r.advantage_stderr));
}

TEST_CASE("kwise_marginal_check with no ancillae reports uniform reference") {
    RngStream rng(58);
    LayeredCircuit c = random_brickwork(6, 1, Geometry::Line, rng);
    MarginalReport r = kwise_marginal_check(c, StateEnsembleSpec::haar(6), 1, 2, 10, 6000, rng);
    CHECK(r.reference == "uniform");
    CHECK(r.corrupted_set.empty());
    CHECK(r.subsets_inspected == 10);
    // Haar inputs keep every 2-wire marginal near uniform
    CHECK(r.max_tv <= 0.08);
}

TEST_CASE("kwise_marginal_check marks the ancilla lightcone as corrupted") {
    RngStream rng(59);
    LayeredCircuit c;
    c.num_system_qubits = 4;
    c.num_ancillae = 1;
    Vec zero(2);
    zero << 1, 0;
    c.ancilla_init = {zero};
    Mat cn = Mat::Identity(4, 4);
    cn(2, 2) = cn(3, 3) = 0;
    cn(2, 3) = cn(3, 2) = 1;
    c.layers.push_back({Gate(0, {3, 4}, cn)});
    MarginalReport r = kwise_marginal_check(c, StateEnsembleSpec::haar(4), 1, 2, 8, 6000, rng);
    CHECK(r.reference == "uniform_x_corrupted");
    CHECK(r.corrupted_set == std::vector<int>{3, 4});
    CHECK(r.max_tv <= 0.1);
}

TEST_CASE("pru_parallel_game validation and rank audit") {
    RngStream rng(60);
    LayeredCircuit pre = random_brickwork(6, 2, Geometry::Line, rng);
    PruGameReport r =
        pru_parallel_game(3, 2, pre, UnitaryEnsembleSpec::clifford(3), 2, 300, rng);
    CHECK(r.rank_bound == 16);
    CHECK(r.schmidt_rank_r <= 16);
    CHECK(r.schmidt_rank_r >= 1);
    CHECK(r.markov_bound ==
          doctest::Approx((r.schmidt_rank_r + 1) * std::pow(2.0, 2.0 - 1.5)));
    CHECK(int(r.subsets.size()) == 20);
    for (const auto& s : r.subsets) CHECK(int(s.size()) == 2);
    CHECK(r.design.purity_mean > 0.0);
    CHECK(r.haar.purity_mean > 0.0);

    LayeredCircuit wrong = random_brickwork(5, 1, Geometry::Line, rng);
    CHECK_THROWS_AS(pru_parallel_game(3, 2, wrong, UnitaryEnsembleSpec::haar(3), 2, 100, rng),
                    std::invalid_argument);
}

TEST_CASE("pru_parallel_game: Clifford matches Haar on second-moment statistics") {
    RngStream rng(61);
    LayeredCircuit pre = random_brickwork(8, 1, Geometry::Line, rng);
    PruGameReport r =
        pru_parallel_game(4, 2, pre, UnitaryEnsembleSpec::clifford(4), 2, 500, rng);
    CHECK(std::abs(r.design.hs2_mean - r.haar.hs2_mean) <=
          3.0 * std::hypot(r.design.hs2_stderr, r.haar.hs2_stderr));
    CHECK(r.pass);
    CHECK(std::abs(r.design.purity_mean - r.haar.purity_mean) <=
          3.0 * std::hypot(r.design.purity_stderr, r.haar.purity_stderr));
}

TEST_CASE("pseudoentanglement_report caps subspace entropy at d") {
    RngStream rng(62);
    EntanglementReport r = pseudoentanglement_report(8, 2, 60, rng);
    CHECK(r.ceiling == doctest::Approx(2.0));
    CHECK(int(r.cuts.size()) == 7);
    for (size_t i = 0; i < r.cuts.size(); ++i) {
        CHECK(r.subspace_max[i] <= 2.0 + 1e-9);
        CHECK(r.subspace_mean[i] <= r.subspace_max[i] + 1e-12);
    }
    // Haar states at the middle cut carry near-maximal entropy
    double haar_mid = r.haar_mean[3]; // cut k = 4
    CHECK(haar_mid >= 3.0);
    CHECK(haar_mid > r.subspace_mean[3]);
    CHECK_THROWS_AS(pseudoentanglement_report(4, 4, 10, rng), std::domain_error);
}

TEST_CASE("kwise_exhaustive_check confirms 4-wise uniformity") {
    RngStream rng(63);
    // 2^m = k = 4: the single full input set, all 2^8 seeds
    KwiseCheckReport full = kwise_exhaustive_check(2, 4, 0, rng);
    CHECK(full.seeds == 256);
    CHECK(full.expected_count == 16);
    CHECK(full.max_count_dev == 0);
    CHECK(full.uniform);

    KwiseCheckReport m3 = kwise_exhaustive_check(3, 4, 15, rng);
    CHECK(m3.seeds == 4096);
    CHECK(m3.expected_count == 256);
    CHECK(m3.max_count_dev == 0);
    CHECK(m3.uniform);

    CHECK_THROWS_AS(kwise_exhaustive_check(6, 4, 5, rng), std::domain_error);
}
