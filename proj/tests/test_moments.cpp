#include <doctest.h>

#include <algorithm>

#include "qpr/moments.hpp"

using namespace qpr;

TEST_CASE("haar_moment small cases") {
    MomentOperator m11 = haar_moment(1, 1);
    CHECK((m11.mat - Mat::Identity(2, 2) * 0.5).norm() <= 1e-12);
    CHECK(m11.mat.trace().real() == doctest::Approx(1.0));

    MomentOperator m12 = haar_moment(1, 2);
    CHECK(m12.mat.trace().real() == doctest::Approx(1.0));
    Eigen::SelfAdjointEigenSolver<Mat> es(m12.mat);
    // symmetric subspace of two qubits: eigenvalues {0, 1/3, 1/3, 1/3}
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(es.eigenvalues()[i] == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(haar_moment(7, 2), std::length_error);
}

TEST_CASE("haar_moment is idempotent up to its normalization") {
    for (auto [n, t] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{1, 3}, std::pair{3, 2}}) {
        MomentOperator m = haar_moment(n, t);
        double c = 1.0;
        double dd = std::pow(2.0, n);
        for (int i = 0; i < t; ++i) c *= (dd + i) / (i + 1.0);
        CHECK((m.mat * m.mat * c - m.mat).norm() <= 1e-9);
    }
}

TEST_CASE("empirical_moment exact paths") {
    RngStream rng(201);
    StateEnsembleSpec fixed = StateEnsembleSpec::fixed_list({StateVector::basis_state(1, 0)});
    MomentOperator m = empirical_moment(fixed, 2, 0, rng);
    CHECK(m.sample_count == 0);
    Mat expect = Mat::Zero(4, 4);
    expect(0, 0) = 1.0;
    CHECK((m.mat - expect).norm() <= 1e-12);

    MomentOperator stab1 = empirical_moment(StateEnsembleSpec::stabilizer(1), 2, 0, rng);
    CHECK((stab1.mat - haar_moment(1, 2).mat).norm() <= 1e-10);
    MomentOperator stab2 = empirical_moment(StateEnsembleSpec::stabilizer(2), 2, 0, rng);
    CHECK((stab2.mat - haar_moment(2, 2).mat).norm() <= 1e-10);
}

TEST_CASE("empirical first moment of Haar converges to maximally mixed") {
    RngStream rng(202);
    MomentOperator m = empirical_moment(StateEnsembleSpec::haar(2), 1, 100000, rng);
    CHECK((m.mat - Mat::Identity(4, 4) * 0.25).norm() <= 1e-2);
}

TEST_CASE("empirical_moment error decays like samples^{-1/2}") {
    RngStream rng(203);
    MomentOperator target = haar_moment(2, 2);
    auto dist = [&](long samples) {
        MomentOperator m = empirical_moment(StateEnsembleSpec::haar(2), 2, samples, rng);
        return (m.mat - target.mat).norm();
    };
    double ratio = dist(1000) / dist(4000);
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.5);
}

TEST_CASE("moment_distance") {
    MomentOperator a = haar_moment(1, 2), b = haar_moment(1, 2);
    CHECK(moment_distance(a, b, 1) == doctest::Approx(0.0));
    Mat z = Mat::Zero(2, 2);
    z(0, 0) = 1.0;
    MomentOperator zero{1, 1, 0, z};
    MomentOperator mixed{1, 1, 0, Mat::Identity(2, 2) * 0.5};
    CHECK(moment_distance(zero, mixed, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(moment_distance(zero, haar_moment(1, 2), 1), std::domain_error);
    CHECK_THROWS_AS(moment_distance(zero, mixed, 3), std::domain_error);
}

TEST_CASE("frame potential pinned values") {
    RngStream rng(204);
    CHECK(haar_frame_potential(2, 2) == doctest::Approx(0.1));
    CHECK(haar_frame_potential(1, 2) == doctest::Approx(1.0 / 3.0));

    StateEnsembleSpec single = StateEnsembleSpec::fixed_list({StateVector::basis_state(2, 3)});
    FramePotentialEstimate fixed = frame_potential(single, 2, 1000, rng);
    CHECK(fixed.mean == doctest::Approx(1.0));
    CHECK(fixed.stderr_ == doctest::Approx(0.0));

    for (auto [n, t] : {std::pair{2, 2}, std::pair{1, 2}}) {
        FramePotentialEstimate fp = frame_potential(StateEnsembleSpec::haar(n), t, 40000, rng);
        CHECK(std::abs(fp.mean - haar_frame_potential(n, t)) <= 5.0 * fp.stderr_);
    }
    CHECK_THROWS_AS(frame_potential(StateEnsembleSpec::haar(2), 2, 10, rng), std::domain_error);
}

TEST_CASE("frame potential is Haar-minimized across ensembles") {
    RngStream rng(205);
    for (const StateEnsembleSpec& spec :
         {StateEnsembleSpec::stabilizer(3), StateEnsembleSpec::phased_subspace(6, 3),
          StateEnsembleSpec::haar(6)}) {
        FramePotentialEstimate fp = frame_potential(spec, 2, 20000, rng);
        CHECK(fp.mean >= haar_frame_potential(spec.n, 2) - 3.0 * fp.stderr_);
    }
}

TEST_CASE("squared Frobenius moment distance equals the frame potential excess") {
    RngStream rng(206);
    StateEnsembleSpec spec = StateEnsembleSpec::phased_subspace(4, 2);
    MomentOperator emp = empirical_moment(spec, 2, 20000, rng);
    double dist2 = std::pow(moment_distance(emp, haar_moment(4, 2), 2), 2);
    FramePotentialEstimate fp = frame_potential(spec, 2, 200000, rng);
    double excess = fp.mean - haar_frame_potential(4, 2);
    // both carry Monte Carlo error; the dense moment at 2e4 samples dominates
    CHECK(dist2 == doctest::Approx(excess).epsilon(0.25));
}

TEST_CASE("purity expectation for Haar and exact 2-designs") {
    RngStream rng(207);
    BoundReport h8 = purity_expectation_check(8, 2, StateEnsembleSpec::haar(8), 4000, rng);
    CHECK(h8.target == doctest::Approx(68.0 / 257.0));
    CHECK(h8.pass);
    BoundReport h2 = purity_expectation_check(2, 1, StateEnsembleSpec::haar(2), 4000, rng);
    CHECK(h2.target == doctest::Approx(0.8));
    CHECK(h2.pass);
    BoundReport st = purity_expectation_check(4, 2, StateEnsembleSpec::stabilizer(4), 4000, rng);
    CHECK(st.target == doctest::Approx(8.0 / 17.0));
    CHECK(st.pass);
}

TEST_CASE("offdiag check for Haar and Clifford") {
    RngStream rng(208);
    BoundReport h = offdiag_check(4, 2, UnitaryEnsembleSpec::haar(4), 20000, rng);
    CHECK(h.target == doctest::Approx(60.0 / 255.0));
    CHECK(h.bound == doctest::Approx(0.25));
    CHECK(h.pass);
    BoundReport c = offdiag_check(4, 2, UnitaryEnsembleSpec::clifford(4), 20000, rng);
    CHECK(c.pass);
    CHECK(std::abs(c.measured - h.measured) <= 3.0 * std::hypot(c.stderr_, h.stderr_));
    BoundReport small = offdiag_check(2, 1, UnitaryEnsembleSpec::haar(2), 20000, rng);
    CHECK(small.target == doctest::Approx(0.4));
    CHECK(small.pass);
}

TEST_CASE("subspace design bound values") {
    CHECK(subspace_design_bound(10, 5, 2) ==
          doctest::Approx(12.0 * (std::pow(2.0, -5) + std::pow(2.0, -10))));
    CHECK(subspace_design_bound(10, 5, 2) == doctest::Approx(0.38672).epsilon(1e-4));
    CHECK(subspace_design_bound(12, 6, 2) == doctest::Approx(12.0 * (1.0 / 64 + 1.0 / 4096)));
    // decreasing in d and n
    CHECK(subspace_design_bound(12, 8, 2) < subspace_design_bound(12, 6, 2));
    CHECK(subspace_design_bound(14, 8, 2) < subspace_design_bound(12, 8, 2));
    CHECK_THROWS_AS(subspace_design_bound(10, 2, 2), std::domain_error);
    CHECK_THROWS_AS(subspace_design_bound(5, 5, 2), std::domain_error);
}

TEST_CASE("mixedness probability edge and Monte Carlo cases") {
    RngStream rng(209);
    // whole pure system is never close to maximally mixed
    BoundReport whole = mixedness_probability(StateEnsembleSpec::haar(3), 1, 3, 0.5, 50, rng);
    CHECK(whole.measured == doctest::Approx(0.0));

    BoundReport h = mixedness_probability(StateEnsembleSpec::haar(10), 1, 1, 0.2, 1000, rng);
    CHECK(h.measured >= 0.99);
    // stabilizer single-qubit marginals are either maximally mixed or pure;
    // a pure marginal appears on some qubit with probability only ~3%
    BoundReport s = mixedness_probability(StateEnsembleSpec::stabilizer(10), 1, 1, 0.2, 1000, rng);
    CHECK(s.measured >= 0.9);
}
