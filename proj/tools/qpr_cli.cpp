// qpr: seeded checks and distinguishing games for random-state ensembles.
// Exit codes: 0 pass, 1 failed check, 2 usage error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpr/circuits.hpp"
#include "qpr/ensembles.hpp"
#include "qpr/experiments.hpp"
#include "qpr/moments.hpp"

using nlohmann::json;
using namespace qpr;

namespace {

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

StateEnsembleSpec parse_state_ensemble(const std::string& name, int n, int d) {
    if (name == "haar") return StateEnsembleSpec::haar(n);
    if (name == "stabilizer") return StateEnsembleSpec::stabilizer(n);
    if (name == "subspace-kwise")
        return StateEnsembleSpec::phased_subspace(n, d, PhaseMode::Kwise4);
    if (name == "subspace-kwise-ambient")
        return StateEnsembleSpec::phased_subspace(n, d, PhaseMode::Kwise4Ambient);
    if (name == "subspace-true")
        return StateEnsembleSpec::phased_subspace(n, d, PhaseMode::TrueRandom);
    throw CLI::ValidationError("--ensemble", "unknown ensemble '" + name + "'");
}

UnitaryEnsembleSpec parse_unitary_ensemble(const std::string& name, int n) {
    if (name == "haar") return UnitaryEnsembleSpec::haar(n);
    if (name == "clifford") return UnitaryEnsembleSpec::clifford(n);
    throw CLI::ValidationError("--unitary", "unknown unitary ensemble '" + name + "'");
}

LayeredCircuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--circuit", "cannot open '" + path + "'");
    json j;
    in >> j;
    return LayeredCircuit::from_json(j);
}

std::set<int> parse_wire_list(const std::string& csv) {
    std::set<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.insert(std::stoi(tok));
    }
    return out;
}

struct Emitter {
    std::string subcommand;
    uint64_t seed = 0;
    std::string out_path, csv_path;
    json params = json::object();
    std::vector<std::array<std::string, 4>> csv_rows; // trial, arm, statistic, value

    void stat(const std::string& arm, const std::string& name, double value) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        csv_rows.push_back({"-1", arm, name, buf});
    }

    int emit(const json& report, bool pass) {
        json doc{{"subcommand", subcommand}, {"seed", seed},     {"params", params},
                 {"timestamp", iso_timestamp()}, {"report", report}, {"pass", pass}};
        std::string text = doc.dump(2) + "\n";
        std::cout << text;
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            f << text;
        }
        if (!csv_path.empty()) {
            std::ofstream f(csv_path);
            f << "trial_index,arm,statistic,value\n";
            for (const auto& r : csv_rows) f << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';
        }
        return pass ? 0 : 1;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpr: randomness and entanglement checks for state/unitary ensembles"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = 0;
    std::string out_path, csv_path;
    int threads = 0;
    app.add_option("--seed", seed, "master seed; every subcommand derives its own stream");
    app.add_option("--out", out_path, "write the JSON report here as well as stdout");
    app.add_option("--csv", csv_path, "write summary statistics as CSV");
    app.add_option("--threads", threads, "worker cap (does not affect results)");

    // shared numeric knobs; each subcommand binds the ones it needs
    int n = 4, k = 1, d = 2, t = 2, depth = 1, m = 2, subsets = 50, p = 2;
    long samples = 20000, trials = 5000, pairs = 100000;
    double tol = 0.0;
    std::string ensemble = "haar", ensemble_b = "haar", unitary = "haar";
    std::string circuit_path, outputs_csv, inputs_csv;

    auto* c_purity = app.add_subcommand(
        "purity-check", "mean subsystem purity of sampled states vs (2^k+2^{n-k})/(2^n+1)");
    c_purity->add_option("--n", n)->required();
    c_purity->add_option("--k", k)->required();
    c_purity->add_option("--ensemble", ensemble);
    c_purity->add_option("--d", d);
    c_purity->add_option("--samples", samples);

    auto* c_offdiag = app.add_subcommand(
        "offdiag-check",
        "||Tr_B U|v><w|U'||_2^2 for orthogonal basis states vs (2^{n+k}-2^{n-k})/(2^{2n}-1) and "
        "2^{k-n}");
    c_offdiag->add_option("--n", n)->required();
    c_offdiag->add_option("--k", k)->required();
    c_offdiag->add_option("--unitary", unitary);
    c_offdiag->add_option("--samples", samples);

    auto* c_moment = app.add_subcommand(
        "moment-distance", "Schatten distance of the ensemble's t-th moment from the Haar moment");
    c_moment->add_option("--n", n)->required();
    c_moment->add_option("--t", t);
    c_moment->add_option("--ensemble", ensemble);
    c_moment->add_option("--d", d);
    c_moment->add_option("--samples", samples);
    c_moment->add_option("--p", p, "Schatten index, 1 or 2");
    c_moment->add_option("--tol", tol, "fail if distance exceeds this (0 = report only)");

    auto* c_frame = app.add_subcommand(
        "frame-potential", "E|<psi|psi'>|^{2t} vs the Haar floor 1/C(2^n+t-1, t)");
    c_frame->add_option("--n", n)->required();
    c_frame->add_option("--t", t);
    c_frame->add_option("--ensemble", ensemble);
    c_frame->add_option("--d", d);
    c_frame->add_option("--pairs", pairs);

    auto* c_design = app.add_subcommand(
        "subspace-design",
        "Frobenius moment distance of phased subspace states vs the explicit 2t^2 2^{-d} bound");
    c_design->add_option("--n", n)->required();
    c_design->add_option("--d", d)->required();
    c_design->add_option("--t", t);
    c_design->add_option("--pairs", pairs);

    auto* c_lindep = app.add_subcommand(
        "lindep", "linear-dependence test on d+1 measured copies, ensemble arm vs Haar arm");
    c_lindep->add_option("--n", n)->required();
    c_lindep->add_option("--d", d)->required();
    c_lindep->add_option("--ensemble", ensemble, "ensemble arm; usually subspace-kwise");
    c_lindep->add_option("--trials", trials);

    auto* c_adv = app.add_subcommand(
        "advantage", "plug-in TV distance between circuit output distributions for two ensembles");
    c_adv->add_option("--circuit", circuit_path, "circuit JSON; omitted = empty circuit");
    c_adv->add_option("--n", n, "per-copy qubits (used when --circuit is omitted)");
    c_adv->add_option("--outputs", outputs_csv, "comma-separated output wires")->required();
    c_adv->add_option("--ensemble-a", ensemble);
    c_adv->add_option("--ensemble-b", ensemble_b);
    c_adv->add_option("--d", d);
    c_adv->add_option("--t", t);
    c_adv->add_option("--trials", trials);
    c_adv->add_option("--tol", tol, "fail if TV exceeds this (0 = report only)");

    auto* c_marg = app.add_subcommand(
        "kwise-marginals",
        "worst k-bit output marginal vs uniform x corrupted-set reference");
    c_marg->add_option("--circuit", circuit_path, "circuit JSON; omitted = empty circuit");
    c_marg->add_option("--n", n, "per-copy qubits (used when --circuit is omitted)");
    c_marg->add_option("--ensemble", ensemble);
    c_marg->add_option("--d", d);
    c_marg->add_option("--t", t);
    c_marg->add_option("--k", k);
    c_marg->add_option("--subsets", subsets);
    c_marg->add_option("--trials", trials);
    c_marg->add_option("--tol", tol, "fail if max TV exceeds this (0 = report only)");

    auto* c_pru = app.add_subcommand(
        "pru-parallel",
        "parallel-query game: per-block U on a brickwork pre-state, local mixedness stats");
    c_pru->add_option("--n", n)->required();
    c_pru->add_option("--t", t);
    c_pru->add_option("--depth", depth, "depth of the random line pre-circuit");
    c_pru->add_option("--unitary", unitary);
    c_pru->add_option("--k", k);
    c_pru->add_option("--trials", trials);

    auto* c_ent = app.add_subcommand(
        "pseudoentanglement",
        "per-cut entropies: kwise-phased subspace states (<= d) vs Haar states");
    c_ent->add_option("--n", n)->required();
    c_ent->add_option("--d", d)->required();
    c_ent->add_option("--samples", samples);

    auto* c_cone = app.add_subcommand("lightcone", "backward/forward lightcones of a circuit");
    c_cone->add_option("--circuit", circuit_path)->required();
    c_cone->add_option("--outputs", outputs_csv, "comma-separated wires for the backward cone");
    c_cone->add_option("--inputs", inputs_csv, "comma-separated wires for the forward cone");

    auto* c_audit = app.add_subcommand(
        "schmidt-audit", "contiguous-cut Schmidt ranks of a random brickwork state vs 4^depth");
    c_audit->add_option("--n", n)->required();
    c_audit->add_option("--depth", depth)->required();

    auto* c_kwise = app.add_subcommand(
        "kwise-verify", "exhaustive 4-wise independence of the GF(2^m) polynomial family");
    c_kwise->add_option("--m", m)->required();
    auto* kwise_k_opt = c_kwise->add_option("--k", k, "wiseness (default 4)");
    c_kwise->add_option("--subsets", subsets);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Emitter em;
    em.subcommand = sub->get_name();
    em.seed = seed;
    em.out_path = out_path;
    em.csv_path = csv_path;
    RngStream rng = RngStream(seed).derive(em.subcommand.c_str());

    try {
        if (sub == c_purity) {
            em.params = {{"n", n}, {"k", k}, {"ensemble", ensemble}, {"samples", samples}};
            auto spec = parse_state_ensemble(ensemble, n, d);
            auto r = purity_expectation_check(n, k, spec, samples, rng);
            em.stat("ensemble", "purity_mean", r.measured);
            em.stat("ensemble", "purity_stderr", r.stderr_);
            return em.emit(r.to_json(), r.pass);
        }
        if (sub == c_offdiag) {
            em.params = {{"n", n}, {"k", k}, {"unitary", unitary}, {"samples", samples}};
            auto spec = parse_unitary_ensemble(unitary, n);
            auto r = offdiag_check(n, k, spec, samples, rng);
            em.stat(unitary, "offdiag_mean", r.measured);
            em.stat(unitary, "offdiag_stderr", r.stderr_);
            return em.emit(r.to_json(), r.pass);
        }
        if (sub == c_moment) {
            em.params = {{"n", n}, {"t", t}, {"ensemble", ensemble}, {"samples", samples}, {"p", p}};
            auto spec = parse_state_ensemble(ensemble, n, d);
            auto emp = empirical_moment(spec, t, samples, rng);
            double dist = moment_distance(emp, haar_moment(n, t), p);
            em.stat("ensemble", "moment_distance", dist);
            json rep{{"distance", dist}, {"p", p}, {"exact", emp.sample_count == 0}};
            bool pass = tol <= 0.0 || dist <= tol;
            return em.emit(rep, pass);
        }
        if (sub == c_frame) {
            em.params = {{"n", n}, {"t", t}, {"ensemble", ensemble}, {"pairs", pairs}};
            auto spec = parse_state_ensemble(ensemble, n, d);
            auto fp = frame_potential(spec, t, pairs, rng);
            double floor = haar_frame_potential(n, t);
            em.stat("ensemble", "frame_potential", fp.mean);
            json rep{{"t", t},
                     {"mean", fp.mean},
                     {"stderr", fp.stderr_},
                     {"pairs", fp.pairs},
                     {"haar_value", floor}};
            // the Haar value is a floor; flag estimates significantly below it
            bool pass = fp.mean + 5.0 * fp.stderr_ >= floor;
            return em.emit(rep, pass);
        }
        if (sub == c_design) {
            em.params = {{"n", n}, {"d", d}, {"t", t}, {"pairs", pairs}};
            auto spec = StateEnsembleSpec::phased_subspace(n, d, PhaseMode::Kwise4);
            auto fp = frame_potential(spec, t, pairs, rng);
            double floor = haar_frame_potential(n, t);
            double excess = std::max(0.0, fp.mean - floor);
            double dist = std::sqrt(excess);
            double dist_se = dist > 0 ? fp.stderr_ / (2.0 * dist) : std::sqrt(fp.stderr_);
            double bound = subspace_design_bound(n, d, t);
            em.stat("ensemble", "moment_distance", dist);
            em.stat("ensemble", "moment_distance_stderr", dist_se);
            json rep{{"frame_potential", fp.mean}, {"frame_potential_stderr", fp.stderr_},
                     {"haar_value", floor},        {"distance", dist},
                     {"distance_stderr", dist_se}, {"bound", bound}};
            return em.emit(rep, dist <= bound);
        }
        if (sub == c_lindep) {
            em.params = {{"n", n}, {"d", d}, {"ensemble", ensemble}, {"trials", trials}};
            auto spec = parse_state_ensemble(ensemble, n, d);
            auto r = lindep_distinguisher(n, d, spec, trials, rng);
            em.stat("ensemble", "accept_prob", r.accept_prob_ensemble);
            em.stat("haar", "accept_prob", r.accept_prob_haar);
            bool pass = r.bound_vacuous ||
                        r.accept_prob_haar <= r.analytic_bound + 5.0 * r.stderr_haar;
            return em.emit(r.to_json(), pass);
        }
        if (sub == c_adv) {
            auto outputs = parse_wire_list(outputs_csv);
            auto spec_a = parse_state_ensemble(ensemble, n, d);
            auto spec_b = parse_state_ensemble(ensemble_b, n, d);
            LayeredCircuit c;
            if (!circuit_path.empty()) {
                c = load_circuit(circuit_path);
            } else {
                c.num_system_qubits = t * n;
            }
            em.params = {{"t", t},
                         {"trials", trials},
                         {"ensemble_a", ensemble},
                         {"ensemble_b", ensemble_b},
                         {"outputs", std::vector<int>(outputs.begin(), outputs.end())}};
            auto r = circuit_advantage(c, outputs, spec_a, spec_b, t, trials, rng);
            em.stat("both", "tv_distance", r.advantage);
            em.stat("both", "tv_bootstrap_spread", r.advantage_stderr);
            bool pass = tol <= 0.0 || r.advantage <= tol;
            return em.emit(r.to_json(), pass);
        }
        if (sub == c_marg) {
            auto spec = parse_state_ensemble(ensemble, n, d);
            LayeredCircuit c;
            if (!circuit_path.empty()) {
                c = load_circuit(circuit_path);
            } else {
                c.num_system_qubits = t * n;
            }
            em.params = {{"t", t},       {"k", k},           {"subsets", subsets},
                         {"trials", trials}, {"ensemble", ensemble}};
            auto r = kwise_marginal_check(c, spec, t, k, subsets, trials, rng);
            em.stat("ensemble", "max_tv", r.max_tv);
            bool pass = tol <= 0.0 || r.max_tv <= tol;
            return em.emit(r.to_json(), pass);
        }
        if (sub == c_pru) {
            em.params = {{"n", n},     {"t", t},           {"depth", depth},
                         {"unitary", unitary}, {"k", k}, {"trials", trials}};
            RngStream pre_rng = rng.derive("pre-circuit");
            LayeredCircuit pre;
            if (depth > 0) {
                pre = random_brickwork(t * n, depth, Geometry::Line, pre_rng);
            } else {
                pre.num_system_qubits = t * n;
                pre.geometry = Geometry::Line;
            }
            auto spec = parse_unitary_ensemble(unitary, n);
            auto r = pru_parallel_game(n, t, pre, spec, k, trials, rng);
            em.stat(unitary, "hs2_mean", r.design.hs2_mean);
            em.stat("haar", "hs2_mean", r.haar.hs2_mean);
            return em.emit(r.to_json(), r.pass);
        }
        if (sub == c_ent) {
            em.params = {{"n", n}, {"d", d}, {"samples", samples}};
            auto r = pseudoentanglement_report(n, d, samples, rng);
            bool pass = true;
            for (double mx : r.subspace_max) pass = pass && mx <= r.ceiling + 1e-9;
            for (size_t c = 0; c < r.cuts.size(); ++c) {
                em.stat("subspace", "entropy_cut" + std::to_string(r.cuts[c]), r.subspace_mean[c]);
                em.stat("haar", "entropy_cut" + std::to_string(r.cuts[c]), r.haar_mean[c]);
            }
            return em.emit(r.to_json(), pass);
        }
        if (sub == c_cone) {
            LayeredCircuit c = load_circuit(circuit_path);
            em.params = {{"outputs", outputs_csv}, {"inputs", inputs_csv}};
            json rep;
            if (!outputs_csv.empty()) {
                auto cone = backward_lightcone(c, parse_wire_list(outputs_csv));
                rep["backward"] = std::vector<int>(cone.begin(), cone.end());
            }
            if (!inputs_csv.empty()) {
                auto cone = forward_lightcone(c, parse_wire_list(inputs_csv));
                rep["forward"] = std::vector<int>(cone.begin(), cone.end());
            }
            return em.emit(rep, true);
        }
        if (sub == c_audit) {
            em.params = {{"n", n}, {"depth", depth}};
            auto c = random_brickwork(n, depth, Geometry::Line, rng);
            auto r = schmidt_rank_audit(c);
            json rep{{"cut_ranks", r.cut_ranks},
                     {"max_rank", r.max_rank},
                     {"rank_bound", r.rank_bound},
                     {"within_bound", r.within_bound}};
            em.stat("circuit", "max_rank", r.max_rank);
            return em.emit(rep, r.within_bound);
        }
        if (sub == c_kwise) {
            if (kwise_k_opt->count() == 0) k = 4;
            em.params = {{"m", m}, {"k", k}, {"subsets", subsets}};
            auto r = kwise_exhaustive_check(m, k, subsets, rng);
            em.stat("family", "max_count_dev", double(r.max_count_dev));
            return em.emit(r.to_json(), r.uniform);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::domain_error& e) {
        std::cerr << "qpr: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qpr: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qpr: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
