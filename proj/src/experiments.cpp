#include "qpr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qpr {

using nlohmann::json;

namespace {

struct RunningMoments {
    double sum = 0.0, sumsq = 0.0;
    long count = 0;
    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    double mean() const { return sum / double(count); }
    double stderr_() const {
        double m = mean();
        double var = std::max(0.0, sumsq / double(count) - m * m);
        return std::sqrt(var / double(count));
    }
};

double bernoulli_stderr(double p, long trials) {
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / double(trials));
}

std::vector<int> sample_subset(int universe, int k, RngStream& rng) {
    std::vector<int> pool(universe);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + int(rng.below(uint64_t(universe - i)))]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

std::vector<double> normalize_counts(const std::vector<long>& counts, long total) {
    std::vector<double> p(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) p[i] = double(counts[i]) / double(total);
    return p;
}

// multinomial resample of an empirical histogram, total draws preserved
std::vector<long> resample_counts(const std::vector<long>& counts, long total, RngStream& rng) {
    std::vector<double> cdf(counts.size());
    double acc = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        acc += double(counts[i]) / double(total);
        cdf[i] = acc;
    }
    std::vector<long> out(counts.size(), 0);
    for (long s = 0; s < total; ++s) {
        double u = rng.uniform();
        size_t idx = size_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= out.size()) idx = out.size() - 1;
        ++out[idx];
    }
    return out;
}

uint64_t extract_bits(const gf2::BitVector& bits, const std::vector<int>& wires) {
    uint64_t pattern = 0;
    for (int w : wires) pattern = (pattern << 1) | uint64_t(bits.bit(w));
    return pattern;
}

StateVector t_copies(const StateVector& psi, int t) {
    StateVector out = psi;
    for (int c = 1; c < t; ++c) out = tensor(out, psi);
    return out;
}

bool is_trivial(const LayeredCircuit& c) {
    return c.num_ancillae == 0 &&
           std::all_of(c.layers.begin(), c.layers.end(),
                       [](const std::vector<Gate>& l) { return l.empty(); });
}

// Measure the circuit output on t copies of psi. A trivial circuit factorizes
// over copies, so each copy is measured on its own and the dense t-fold
// tensor is never formed.
gf2::BitVector measure_copies(const LayeredCircuit& c, const StateVector& psi, int t,
                              RngStream& rng) {
    if (is_trivial(c)) {
        int n = psi.num_qubits();
        gf2::BitVector out(t * n, 0);
        for (int copy = 0; copy < t; ++copy) {
            gf2::BitVector bits = measure_all(psi, rng);
            for (int q = 0; q < n; ++q) out.set_bit(copy * n + q, bits.bit(q));
        }
        return out;
    }
    return measure_all(apply(c, t_copies(psi, t)), rng);
}

} // namespace

DistinguisherResult lindep_distinguisher(int n, int d, const StateEnsembleSpec& spec, long trials,
                                         RngStream& rng) {
    if (d >= n) throw std::domain_error("lindep_distinguisher: need d < n");
    if (trials < 1) throw std::domain_error("lindep_distinguisher: trials < 1");
    auto run_arm = [&](const StateEnsembleSpec& s, RngStream arm_rng) {
        long accepts = 0;
        for (long i = 0; i < trials; ++i) {
            StateVector psi = s.sample(arm_rng);
            std::vector<gf2::BitVector> outcomes;
            for (int c = 0; c < d + 1; ++c) outcomes.push_back(measure_all(psi, arm_rng));
            if (gf2::is_dependent(outcomes)) ++accepts;
        }
        return double(accepts) / double(trials);
    };
    DistinguisherResult r;
    r.trials = trials;
    r.accept_prob_ensemble = run_arm(spec, rng.derive("lindep.ensemble"));
    r.accept_prob_haar = run_arm(StateEnsembleSpec::haar(n), rng.derive("lindep.haar"));
    r.stderr_ensemble = bernoulli_stderr(r.accept_prob_ensemble, trials);
    r.stderr_haar = bernoulli_stderr(r.accept_prob_haar, trials);
    r.advantage = std::abs(r.accept_prob_ensemble - r.accept_prob_haar);
    r.advantage_stderr = std::hypot(r.stderr_ensemble, r.stderr_haar);
    r.analytic_bound =
        std::pow(2.0, -(n - d - 1)) + double(d) * double(d + 1) / std::pow(2.0, n);
    r.bound_vacuous = r.analytic_bound >= 1.0;
    return r;
}

DistinguisherResult circuit_advantage(const LayeredCircuit& c, const std::set<int>& output_bits,
                                      const StateEnsembleSpec& spec_a,
                                      const StateEnsembleSpec& spec_b, int t, long trials,
                                      RngStream& rng) {
    if (output_bits.empty() || int(output_bits.size()) > 12)
        throw std::domain_error("circuit_advantage: need 1 <= |output_bits| <= 12");
    if (c.num_system_qubits != t * spec_a.n || spec_a.n != spec_b.n)
        throw std::invalid_argument("circuit_advantage: wire count mismatch");
    std::vector<int> wires(output_bits.begin(), output_bits.end());
    size_t bins = size_t(1) << wires.size();

    auto run_arm = [&](const StateEnsembleSpec& s, RngStream arm_rng) {
        std::vector<long> counts(bins, 0);
        for (long i = 0; i < trials; ++i) {
            StateVector psi = s.sample(arm_rng);
            ++counts[extract_bits(measure_copies(c, psi, t, arm_rng), wires)];
        }
        return counts;
    };
    std::vector<long> ca = run_arm(spec_a, rng.derive("adv.a"));
    std::vector<long> cb = run_arm(spec_b, rng.derive("adv.b"));

    DistinguisherResult r;
    r.trials = trials;
    r.advantage = tv_distance(normalize_counts(ca, trials), normalize_counts(cb, trials));
    RngStream boot = rng.derive("adv.bootstrap");
    RunningMoments bm;
    for (int b = 0; b < 1000; ++b) {
        auto ra = resample_counts(ca, trials, boot);
        auto rb = resample_counts(cb, trials, boot);
        bm.add(tv_distance(normalize_counts(ra, trials), normalize_counts(rb, trials)));
    }
    double m = bm.mean();
    r.advantage_stderr = std::sqrt(std::max(0.0, bm.sumsq / double(bm.count) - m * m));
    return r;
}

MarginalReport kwise_marginal_check(const LayeredCircuit& c, const StateEnsembleSpec& spec, int t,
                                    int k, int subsets, long trials, RngStream& rng) {
    if (k < 1 || k > 12) throw std::domain_error("kwise_marginal_check: need 1 <= k <= 12");
    if (c.num_system_qubits != t * spec.n)
        throw std::invalid_argument("kwise_marginal_check: wire count mismatch");
    int wires = c.num_wires();
    if (k > wires) throw std::domain_error("kwise_marginal_check: k > wire count");

    std::set<int> anc;
    for (int q = c.num_system_qubits; q < wires; ++q) anc.insert(q);
    std::set<int> corrupted = anc.empty() ? std::set<int>{} : forward_lightcone(c, anc);

    RngStream pick = rng.derive("marg.subsets");
    std::vector<std::vector<int>> subs;
    for (int s = 0; s < subsets; ++s) subs.push_back(sample_subset(wires, k, pick));

    size_t bins = size_t(1) << k;
    // spec arm: per-subset pattern counts
    std::vector<std::vector<long>> spec_counts(subs.size(), std::vector<long>(bins, 0));
    RngStream arm = rng.derive("marg.spec");
    for (long i = 0; i < trials; ++i) {
        StateVector psi = spec.sample(arm);
        gf2::BitVector bits = measure_copies(c, psi, t, arm);
        for (size_t s = 0; s < subs.size(); ++s)
            ++spec_counts[s][extract_bits(bits, subs[s])];
    }
    // reference arm: maximally mixed system inputs, only corrupted bits kept
    std::vector<std::vector<int>> corr_in_sub(subs.size());
    for (size_t s = 0; s < subs.size(); ++s)
        for (int w : subs[s])
            if (corrupted.count(w)) corr_in_sub[s].push_back(w);
    std::vector<std::vector<long>> ref_counts(subs.size());
    for (size_t s = 0; s < subs.size(); ++s)
        ref_counts[s].assign(size_t(1) << corr_in_sub[s].size(), 0);
    RngStream mixed = rng.derive("marg.mixed");
    bool need_ref = std::any_of(corr_in_sub.begin(), corr_in_sub.end(),
                                [](const std::vector<int>& v) { return !v.empty(); });
    if (need_ref) {
        for (long i = 0; i < trials; ++i) {
            uint64_t x = mixed.bits() & ((uint64_t(1) << c.num_system_qubits) - 1);
            StateVector psi = apply(c, StateVector::basis_state(c.num_system_qubits, x));
            gf2::BitVector bits = measure_all(psi, mixed);
            for (size_t s = 0; s < subs.size(); ++s)
                if (!corr_in_sub[s].empty())
                    ++ref_counts[s][extract_bits(bits, corr_in_sub[s])];
        }
    }
    auto reference_dist = [&](size_t s) {
        int nc = int(corr_in_sub[s].size());
        double free_weight = std::pow(0.5, k - nc);
        // map each k-bit pattern to its corrupted sub-pattern
        std::vector<double> ref(bins);
        std::vector<int> corr_pos;
        for (int i = 0; i < k; ++i)
            if (corrupted.count(subs[s][i])) corr_pos.push_back(i);
        for (size_t pat = 0; pat < bins; ++pat) {
            uint64_t cp = 0;
            for (int pos : corr_pos) cp = (cp << 1) | ((pat >> (k - 1 - pos)) & 1u);
            double rp = nc == 0 ? 1.0 : double(ref_counts[s][cp]) / double(trials);
            ref[pat] = rp * free_weight;
        }
        return ref;
    };

    MarginalReport rep;
    rep.k = k;
    rep.subsets_inspected = int(subs.size());
    rep.reference = need_ref ? "uniform_x_corrupted" : "uniform";
    rep.corrupted_set.assign(corrupted.begin(), corrupted.end());
    size_t worst = 0;
    for (size_t s = 0; s < subs.size(); ++s) {
        double tv = tv_distance(normalize_counts(spec_counts[s], trials), reference_dist(s));
        if (tv >= rep.max_tv) {
            rep.max_tv = tv;
            worst = s;
        }
    }
    // bootstrap spread at the worst subset; the reference is resampled too
    RngStream boot = rng.derive("marg.bootstrap");
    RunningMoments bm;
    for (int b = 0; b < 1000; ++b) {
        auto rc = resample_counts(spec_counts[worst], trials, boot);
        std::vector<double> ref;
        if (corr_in_sub[worst].empty()) {
            ref.assign(bins, 1.0 / double(bins));
        } else {
            auto saved = ref_counts[worst];
            ref_counts[worst] = resample_counts(saved, trials, boot);
            ref = reference_dist(worst);
            ref_counts[worst] = std::move(saved);
        }
        bm.add(tv_distance(normalize_counts(rc, trials), ref));
    }
    double m = bm.mean();
    rep.max_tv_stderr = std::sqrt(std::max(0.0, bm.sumsq / double(bm.count) - m * m));
    return rep;
}

PruGameReport pru_parallel_game(int n, int t, const LayeredCircuit& pre,
                                const UnitaryEnsembleSpec& unitary_spec, int k, long trials,
                                RngStream& rng) {
    if (pre.num_system_qubits != t * n || pre.num_ancillae != 0)
        throw std::invalid_argument("pru_parallel_game: pre must act on t*n wires, no ancillae");
    if (unitary_spec.n != n) throw std::invalid_argument("pru_parallel_game: block size mismatch");
    if (k > t * n) throw std::domain_error("pru_parallel_game: k > t*n");
    ValidationReport v = validate(pre);
    if (pre.geometry != Geometry::Line || !v.geometry_ok)
        throw std::domain_error("pru_parallel_game: pre must be line-geometric");

    StateVector base = apply(pre, StateVector::basis_state(t * n, 0));

    PruGameReport rep;
    rep.n = n;
    rep.t = t;
    rep.k = k;
    rep.trials = trials;
    rep.schmidt_rank_r = recursive_schmidt(base, n, t).max_rank;
    rep.rank_bound = 1;
    for (int i = 0; i < pre.depth(); ++i) rep.rank_bound *= 4;
    rep.markov_bound = double(rep.schmidt_rank_r + 1) * std::pow(2.0, k - 0.5 * n);

    RngStream pick = rng.derive("pru.subsets");
    const int num_subsets = 20;
    for (int s = 0; s < num_subsets; ++s) rep.subsets.push_back(sample_subset(t * n, k, pick));

    DensityMatrix mixed = DensityMatrix::maximally_mixed(k);
    Mat eye = Mat::Identity(Eigen::Index(1) << k, Eigen::Index(1) << k) / std::pow(2.0, k);

    auto run_arm = [&](const UnitaryEnsembleSpec& spec, RngStream arm_rng) {
        RunningMoments tn, hs2, pur;
        std::vector<RunningMoments> per_subset(rep.subsets.size());
        for (long i = 0; i < trials; ++i) {
            Unitary u = spec.sample(arm_rng);
            StateVector psi = base;
            for (int b = 0; b < t; ++b) apply_block_unitary(psi, b * n, u.mat);
            double tn_acc = 0, hs_acc = 0, pu_acc = 0;
            for (size_t s = 0; s < rep.subsets.size(); ++s) {
                DensityMatrix rho = partial_trace(psi, SubsystemMask(rep.subsets[s]));
                double tnorm = 2.0 * trace_distance(rho, mixed);
                per_subset[s].add(tnorm);
                tn_acc += tnorm;
                hs_acc += (rho.mat() - eye).squaredNorm();
                pu_acc += purity(rho);
            }
            double ns = double(rep.subsets.size());
            tn.add(tn_acc / ns);
            hs2.add(hs_acc / ns);
            pur.add(pu_acc / ns);
        }
        PruArmStats a;
        a.tn_mean = tn.mean();
        a.tn_stderr = tn.stderr_();
        a.hs2_mean = hs2.mean();
        a.hs2_stderr = hs2.stderr_();
        a.purity_mean = pur.mean();
        a.purity_stderr = pur.stderr_();
        for (size_t s = 0; s < per_subset.size(); ++s) {
            if (per_subset[s].mean() >= a.worst_tn_mean) {
                a.worst_tn_mean = per_subset[s].mean();
                a.worst_tn_stderr = per_subset[s].stderr_();
                a.worst_subset = int(s);
            }
        }
        return a;
    };
    rep.design = run_arm(unitary_spec, rng.derive("pru.design"));
    rep.haar = run_arm(UnitaryEnsembleSpec::haar(n), rng.derive("pru.haar"));
    double gap = std::abs(rep.design.hs2_mean - rep.haar.hs2_mean);
    rep.pass = gap <= 3.0 * std::hypot(rep.design.hs2_stderr, rep.haar.hs2_stderr);
    return rep;
}

EntanglementReport pseudoentanglement_report(int n, int d, long samples, RngStream& rng) {
    if (d >= n) throw std::domain_error("pseudoentanglement_report: need d < n");
    EntanglementReport rep;
    rep.n = n;
    rep.d = d;
    rep.ceiling = double(d);
    std::vector<SubsystemMask> masks;
    for (int c = 1; c < n; ++c) {
        std::vector<int> keep(c);
        std::iota(keep.begin(), keep.end(), 0);
        masks.emplace_back(keep);
        rep.cuts.push_back(c);
    }
    auto run_arm = [&](const StateEnsembleSpec& spec, RngStream arm_rng, bool track_max,
                       std::vector<double>& mean, std::vector<double>& se,
                       std::vector<double>* mx) {
        std::vector<RunningMoments> rm(masks.size());
        if (mx) mx->assign(masks.size(), 0.0);
        for (long i = 0; i < samples; ++i) {
            StateVector psi = spec.sample(arm_rng);
            for (size_t c = 0; c < masks.size(); ++c) {
                double s = vn_entropy(partial_trace(psi, masks[c]));
                rm[c].add(s);
                if (track_max) (*mx)[c] = std::max((*mx)[c], s);
            }
        }
        mean.resize(masks.size());
        se.resize(masks.size());
        for (size_t c = 0; c < masks.size(); ++c) {
            mean[c] = rm[c].mean();
            se[c] = rm[c].stderr_();
        }
    };
    run_arm(StateEnsembleSpec::phased_subspace(n, d, PhaseMode::Kwise4), rng.derive("ent.sub"),
            true, rep.subspace_mean, rep.subspace_stderr, &rep.subspace_max);
    run_arm(StateEnsembleSpec::haar(n), rng.derive("ent.haar"), false, rep.haar_mean,
            rep.haar_stderr, nullptr);
    return rep;
}

KwiseCheckReport kwise_exhaustive_check(int m, int k, int subsets, RngStream& rng) {
    if (m < 1 || m > 5) throw std::domain_error("kwise_exhaustive_check: need 1 <= m <= 5");
    long q = 1L << m;
    if (q < k) throw std::domain_error("kwise_exhaustive_check: fewer than k inputs");
    KwiseCheckReport rep;
    rep.m = m;
    rep.k = k;
    rep.seeds = 1;
    for (int i = 0; i < k; ++i) rep.seeds *= q;
    rep.expected_count = rep.seeds >> k;

    std::vector<std::vector<gf2::BitVector>> input_sets;
    if (q == k) {
        std::vector<gf2::BitVector> all;
        for (long x = 0; x < q; ++x) all.emplace_back(m, uint64_t(x));
        input_sets.push_back(std::move(all));
    } else {
        RngStream pick = rng.derive("kwise.subsets");
        for (int s = 0; s < subsets; ++s) {
            std::vector<gf2::BitVector> in;
            for (int idx : sample_subset(int(q), k, pick)) in.emplace_back(m, uint64_t(idx));
            input_sets.push_back(std::move(in));
        }
    }
    rep.subsets = int(input_sets.size());

    std::vector<std::vector<long>> counts(input_sets.size(),
                                          std::vector<long>(size_t(1) << k, 0));
    gf2::KWiseFamily fam;
    fam.m = m;
    fam.k = k;
    fam.seed.assign(k, gf2::FieldElement{m, 0});
    std::vector<long> digits(k, 0);
    for (long s = 0; s < rep.seeds; ++s) {
        for (int i = 0; i < k; ++i) fam.seed[i].coeffs = uint64_t(digits[i]);
        for (size_t is = 0; is < input_sets.size(); ++is) {
            uint64_t pat = 0;
            for (const auto& x : input_sets[is]) pat = (pat << 1) | uint64_t(kwise_eval(fam, x));
            ++counts[is][pat];
        }
        for (int i = k - 1; i >= 0; --i) {
            if (++digits[i] < q) break;
            digits[i] = 0;
        }
    }
    rep.max_count_dev = 0;
    for (const auto& c : counts)
        for (long v : c) rep.max_count_dev = std::max(rep.max_count_dev, std::abs(v - rep.expected_count));
    rep.uniform = rep.max_count_dev == 0;
    return rep;
}

json DistinguisherResult::to_json() const {
    return json{{"accept_prob_ensemble", accept_prob_ensemble},
                {"stderr_ensemble", stderr_ensemble},
                {"accept_prob_haar", accept_prob_haar},
                {"stderr_haar", stderr_haar},
                {"advantage", advantage},
                {"advantage_stderr", advantage_stderr},
                {"analytic_bound", analytic_bound},
                {"bound_vacuous", bound_vacuous},
                {"trials", trials}};
}

json MarginalReport::to_json() const {
    return json{{"k", k},
                {"subsets_inspected", subsets_inspected},
                {"max_tv", max_tv},
                {"max_tv_stderr", max_tv_stderr},
                {"reference", reference},
                {"corrupted_set", corrupted_set}};
}

json PruGameReport::to_json() const {
    auto arm = [](const PruArmStats& a) {
        return json{{"tn_mean", a.tn_mean},         {"tn_stderr", a.tn_stderr},
                    {"hs2_mean", a.hs2_mean},       {"hs2_stderr", a.hs2_stderr},
                    {"purity_mean", a.purity_mean}, {"purity_stderr", a.purity_stderr},
                    {"worst_subset", a.worst_subset}, {"worst_tn_mean", a.worst_tn_mean},
                    {"worst_tn_stderr", a.worst_tn_stderr}};
    };
    return json{{"n", n},
                {"t", t},
                {"k", k},
                {"trials", trials},
                {"schmidt_rank_r", schmidt_rank_r},
                {"rank_bound", rank_bound},
                {"markov_bound", markov_bound},
                {"subsets", subsets},
                {"design", arm(design)},
                {"haar", arm(haar)},
                {"pass", pass}};
}

json EntanglementReport::to_json() const {
    return json{{"n", n},
                {"d", d},
                {"ceiling", ceiling},
                {"cuts", cuts},
                {"subspace_mean", subspace_mean},
                {"subspace_stderr", subspace_stderr},
                {"subspace_max", subspace_max},
                {"haar_mean", haar_mean},
                {"haar_stderr", haar_stderr}};
}

json KwiseCheckReport::to_json() const {
    return json{{"m", m},           {"k", k},
                {"seeds", seeds},   {"subsets", subsets},
                {"expected_count", expected_count}, {"max_count_dev", max_count_dev},
                {"uniform", uniform}};
}

} // namespace qpr
