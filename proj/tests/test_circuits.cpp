#include <doctest.h>

#include <algorithm>

#include "qpr/circuits.hpp"

#include <nlohmann/json.hpp>

using namespace qpr;

namespace {

Mat hadamard() {
    Mat h(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

Mat pauli_x() {
    Mat x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

Mat cnot() {
    Mat c = Mat::Identity(4, 4);
    c(2, 2) = c(3, 3) = 0;
    c(2, 3) = c(3, 2) = 1;
    return c;
}

double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(a.amps().dot(b.amps()));
}

} // namespace

TEST_CASE("Gate constructor validation") {
    CHECK_NOTHROW(Gate(0, {1}, hadamard()));
    CHECK_NOTHROW(Gate(3, {0, 2}, cnot()));
    CHECK_THROWS_AS(Gate(-1, {0}, hadamard()), std::invalid_argument);
    CHECK_THROWS_AS(Gate(0, {}, hadamard()), std::invalid_argument);
    CHECK_THROWS_AS(Gate(0, {0, 1, 2}, cnot()), std::invalid_argument);
    CHECK_THROWS_AS(Gate(0, {1, 1}, cnot()), std::invalid_argument);
    // shape must match fan-in
    CHECK_THROWS_AS(Gate(0, {0, 1}, hadamard()), std::invalid_argument);
    Mat bad = hadamard();
    bad(0, 0) += 1e-3;
    CHECK_THROWS_AS(Gate(0, {0}, bad), std::invalid_argument);
}

TEST_CASE("validate reports structure and geometry") {
    LayeredCircuit empty;
    empty.num_system_qubits = 3;
    ValidationReport r0 = validate(empty);
    CHECK(r0.depth == 0);
    CHECK(r0.max_fan_in == 0);
    CHECK(r0.geometry_ok);

    LayeredCircuit line;
    line.num_system_qubits = 4;
    line.geometry = Geometry::Line;
    line.layers.push_back({Gate(0, {0, 1}, cnot()), Gate(0, {2, 3}, cnot())});
    ValidationReport r1 = validate(line);
    CHECK(r1.depth == 1);
    CHECK(r1.max_fan_in == 2);
    CHECK(r1.geometry_ok);

    // non-adjacent support on a line is flagged, not fatal
    LayeredCircuit skip = line;
    skip.layers = {{Gate(0, {0, 2}, cnot())}};
    CHECK_FALSE(validate(skip).geometry_ok);
    skip.geometry = Geometry::None;
    CHECK(validate(skip).geometry_ok);

    LayeredCircuit overlap = line;
    overlap.layers = {{Gate(0, {0, 1}, cnot()), Gate(0, {1, 2}, cnot())}};
    CHECK_THROWS_AS(validate(overlap), std::invalid_argument);
}

TEST_CASE("lightcones on hand-built circuits") {
    LayeredCircuit empty;
    empty.num_system_qubits = 5;
    CHECK(backward_lightcone(empty, {2, 4}) == std::set<int>{2, 4});
    CHECK(forward_lightcone(empty, {0}) == std::set<int>{0});

    LayeredCircuit c;
    c.num_system_qubits = 4;
    c.layers.push_back({Gate(0, {0, 1}, cnot()), Gate(0, {2, 3}, cnot())});
    c.layers.push_back({Gate(1, {1, 2}, cnot())});
    CHECK(backward_lightcone(c, {0}) == std::set<int>{0, 1});
    CHECK(backward_lightcone(c, {1}) == std::set<int>{0, 1, 2, 3});
    CHECK(forward_lightcone(c, {3}) == std::set<int>{1, 2, 3});
    CHECK(forward_lightcone(c, {0}) == std::set<int>{0, 1, 2});
}

TEST_CASE("lightcone size is bounded by the depth and duality holds") {
    RngStream rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 4 + int(rng.below(5));
        int depth = 1 + int(rng.below(3));
        LayeredCircuit c = random_brickwork(n, depth, Geometry::Line, rng);
        for (int q = 0; q < n; ++q) {
            std::set<int> back = backward_lightcone(c, {q});
            // brickwork cones grow by at most one wire per side per layer
            CHECK(int(back.size()) <= 2 * depth + 1);
            // duality: q is forward-reachable from exactly the wires in its
            // backward cone
            for (int w = 0; w < n; ++w) {
                bool reaches = forward_lightcone(c, {w}).count(q) > 0;
                CHECK(reaches == (back.count(w) > 0));
            }
        }
    }
}

TEST_CASE("apply on hand-built circuits") {
    LayeredCircuit empty;
    empty.num_system_qubits = 2;
    StateVector in = StateVector::basis_state(2, 2);
    CHECK(fidelity(apply(empty, in), in) == doctest::Approx(1.0));

    LayeredCircuit flip;
    flip.num_system_qubits = 2;
    flip.layers.push_back({Gate(0, {1}, pauli_x())});
    CHECK(fidelity(apply(flip, StateVector::basis_state(2, 0)), StateVector::basis_state(2, 1)) ==
          doctest::Approx(1.0));

    // H on qubit 0 then CNOT(0 -> 1) prepares a Bell pair
    LayeredCircuit bell;
    bell.num_system_qubits = 2;
    bell.layers.push_back({Gate(0, {0}, hadamard())});
    bell.layers.push_back({Gate(1, {0, 1}, cnot())});
    StateVector out = apply(bell, StateVector::basis_state(2, 0));
    CHECK(std::abs(out.amps()[0] - Cplx(1.0 / std::sqrt(2.0), 0)) <= 1e-12);
    CHECK(std::abs(out.amps()[3] - Cplx(1.0 / std::sqrt(2.0), 0)) <= 1e-12);
    CHECK(std::abs(out.amps()[1]) <= 1e-12);
    CHECK(std::abs(out.amps()[2]) <= 1e-12);
}

TEST_CASE("apply tensors in ancilla initial states") {
    LayeredCircuit c;
    c.num_system_qubits = 1;
    c.num_ancillae = 1;
    Vec one(2);
    one << 0, 1;
    c.ancilla_init = {one};
    c.layers.push_back({Gate(0, {0, 1}, cnot())});
    // system |1> with ancilla |1>: CNOT flips the ancilla back to |0>
    StateVector out = apply(c, StateVector::basis_state(1, 1));
    CHECK(fidelity(out, StateVector::basis_state(2, 2)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(apply(c, StateVector::basis_state(2, 0)), std::invalid_argument);
}

TEST_CASE("apply preserves norm and composes layer by layer") {
    RngStream rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        LayeredCircuit c = random_brickwork(6, 2, Geometry::Line, rng);
        StateVector psi = StateVector::basis_state(6, rng.below(64));
        StateVector out = apply(c, psi);
        CHECK(out.amps().norm() == doctest::Approx(1.0));
        // applying the two layers as separate circuits gives the same state
        LayeredCircuit first = c, second = c;
        first.layers = {c.layers[0]};
        second.layers = {c.layers[1]};
        StateVector staged = apply(second, apply(first, psi));
        CHECK(fidelity(staged, out) == doctest::Approx(1.0));
    }
}

TEST_CASE("random_brickwork layer structure") {
    RngStream rng(33);
    LayeredCircuit c1 = random_brickwork(4, 1, Geometry::Line, rng);
    CHECK(c1.depth() == 1);
    CHECK(c1.num_system_qubits == 4);
    CHECK(c1.geometry == Geometry::Line);
    REQUIRE(c1.layers[0].size() == 2);
    CHECK(c1.layers[0][0].qubits == std::vector<int>{0, 1});
    CHECK(c1.layers[0][1].qubits == std::vector<int>{2, 3});

    LayeredCircuit c2 = random_brickwork(5, 2, Geometry::Line, rng);
    REQUIRE(c2.layers[0].size() == 2); // (0,1), (2,3); wire 4 idle
    REQUIRE(c2.layers[1].size() == 2); // (1,2), (3,4)
    CHECK(c2.layers[1][0].qubits == std::vector<int>{1, 2});
    CHECK(c2.layers[1][1].qubits == std::vector<int>{3, 4});
    CHECK_NOTHROW(validate(c2));
    CHECK(validate(c2).geometry_ok);

    // gates are fresh Haar draws, not repeats
    CHECK((c1.layers[0][0].mat - c1.layers[0][1].mat).norm() > 1e-6);
}

TEST_CASE("schmidt_rank_audit obeys the 4^depth law") {
    RngStream rng(34);
    LayeredCircuit empty;
    empty.num_system_qubits = 4;
    empty.geometry = Geometry::Line;
    SchmidtRankAudit a0 = schmidt_rank_audit(empty);
    CHECK(a0.max_rank == 1);
    CHECK(a0.rank_bound == 1);
    CHECK(a0.within_bound);
    for (int r : a0.cut_ranks) CHECK(r == 1);

    for (int depth : {1, 2}) {
        LayeredCircuit c = random_brickwork(8, depth, Geometry::Line, rng);
        SchmidtRankAudit a = schmidt_rank_audit(c);
        CHECK(a.rank_bound == (depth == 1 ? 4 : 16));
        CHECK(a.within_bound);
        CHECK(int(a.cut_ranks.size()) == 7);
        for (int r : a.cut_ranks) CHECK(r <= a.rank_bound);
    }

    LayeredCircuit unconstrained;
    unconstrained.num_system_qubits = 3;
    CHECK_THROWS_AS(schmidt_rank_audit(unconstrained), std::domain_error);
    LayeredCircuit with_anc;
    with_anc.num_system_qubits = 3;
    with_anc.geometry = Geometry::Line;
    with_anc.num_ancillae = 1;
    Vec zero(2);
    zero << 1, 0;
    with_anc.ancilla_init = {zero};
    CHECK_THROWS_AS(schmidt_rank_audit(with_anc), std::domain_error);
}

TEST_CASE("JSON round trip preserves circuits") {
    RngStream rng(35);
    LayeredCircuit c = random_brickwork(5, 2, Geometry::Line, rng);
    c.num_ancillae = 1;
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    c.ancilla_init = {plus};
    LayeredCircuit back = LayeredCircuit::from_json(c.to_json());
    CHECK(back.num_system_qubits == c.num_system_qubits);
    CHECK(back.num_ancillae == 1);
    CHECK(back.geometry == Geometry::Line);
    CHECK((back.ancilla_init[0] - plus).norm() <= 1e-12);
    REQUIRE(back.depth() == c.depth());
    for (int l = 0; l < c.depth(); ++l) {
        REQUIRE(back.layers[l].size() == c.layers[l].size());
        for (size_t g = 0; g < c.layers[l].size(); ++g) {
            CHECK(back.layers[l][g].qubits == c.layers[l][g].qubits);
            CHECK((back.layers[l][g].mat - c.layers[l][g].mat).norm() <= 1e-12);
        }
    }
    // missing ancilla_init defaults to |0> states
    nlohmann::json j = c.to_json();
    j.erase("ancilla_init");
    LayeredCircuit defaulted = LayeredCircuit::from_json(j);
    CHECK(std::abs(defaulted.ancilla_init[0][0] - Cplx(1, 0)) <= 1e-12);
}
