#include "qpr/circuits.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qpr/ensembles.hpp"

namespace qpr {

using nlohmann::json;

Gate::Gate(int layer_, std::vector<int> qubits_, Mat mat_)
    : layer(layer_), qubits(std::move(qubits_)), mat(std::move(mat_)) {
    if (layer < 0) throw std::invalid_argument("Gate: negative layer");
    if (qubits.size() != 1 && qubits.size() != 2)
        throw std::invalid_argument("Gate: fan-in must be 1 or 2");
    if (qubits.size() == 2 && qubits[0] == qubits[1])
        throw std::invalid_argument("Gate: repeated qubit");
    Eigen::Index d = Eigen::Index(1) << qubits.size();
    if (mat.rows() != d || mat.cols() != d)
        throw std::invalid_argument("Gate: matrix shape does not match fan-in");
    double res = (mat.adjoint() * mat - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (res > 1e-10) throw std::invalid_argument("Gate: matrix not unitary");
}

ValidationReport validate(const LayeredCircuit& c) {
    ValidationReport r;
    r.depth = c.depth();
    int wires = c.num_wires();
    for (const auto& layer : c.layers) {
        std::vector<bool> used(wires, false);
        for (const auto& g : layer) {
            r.max_fan_in = std::max(r.max_fan_in, int(g.qubits.size()));
            for (int q : g.qubits) {
                if (q < 0 || q >= wires) throw std::invalid_argument("validate: wire out of range");
                if (used[q]) throw std::invalid_argument("validate: overlapping supports in a layer");
                used[q] = true;
            }
            if (c.geometry == Geometry::Line && g.qubits.size() == 2 &&
                std::abs(g.qubits[0] - g.qubits[1]) != 1)
                r.geometry_ok = false;
        }
    }
    return r;
}

std::set<int> backward_lightcone(const LayeredCircuit& c, const std::set<int>& outputs) {
    for (int q : outputs)
        if (q < 0 || q >= c.num_wires()) throw std::invalid_argument("backward_lightcone: out of range");
    std::set<int> cone = outputs;
    for (auto it = c.layers.rbegin(); it != c.layers.rend(); ++it) {
        for (const auto& g : *it) {
            bool hit = std::any_of(g.qubits.begin(), g.qubits.end(),
                                   [&](int q) { return cone.count(q); });
            if (hit) cone.insert(g.qubits.begin(), g.qubits.end());
        }
    }
    return cone;
}

std::set<int> forward_lightcone(const LayeredCircuit& c, const std::set<int>& inputs) {
    for (int q : inputs)
        if (q < 0 || q >= c.num_wires()) throw std::invalid_argument("forward_lightcone: out of range");
    std::set<int> cone = inputs;
    for (const auto& layer : c.layers) {
        for (const auto& g : layer) {
            bool hit = std::any_of(g.qubits.begin(), g.qubits.end(),
                                   [&](int q) { return cone.count(q); });
            if (hit) cone.insert(g.qubits.begin(), g.qubits.end());
        }
    }
    return cone;
}

StateVector apply(const LayeredCircuit& c, const StateVector& system_input) {
    if (system_input.num_qubits() != c.num_system_qubits)
        throw std::invalid_argument("apply: system input size mismatch");
    if (int(c.ancilla_init.size()) != c.num_ancillae)
        throw std::invalid_argument("apply: ancilla_init size mismatch");
    StateVector psi = system_input;
    for (const auto& a : c.ancilla_init) {
        if (a.size() != 2) throw std::invalid_argument("apply: ancilla init must be single-qubit");
        psi = tensor(psi, StateVector(1, a));
    }
    for (const auto& layer : c.layers)
        for (const auto& g : layer) apply_gate(psi, g.qubits, g.mat);
    return psi;
}

LayeredCircuit random_brickwork(int n, int depth, Geometry geometry, RngStream& rng) {
    if (geometry != Geometry::Line)
        throw std::invalid_argument("random_brickwork: line geometry only");
    LayeredCircuit c;
    c.num_system_qubits = n;
    c.geometry = Geometry::Line;
    for (int l = 0; l < depth; ++l) {
        std::vector<Gate> layer;
        int start = (l % 2 == 0) ? 0 : 1; // even layers pair (0,1)(2,3)...
        for (int q = start; q + 1 < n; q += 2)
            layer.emplace_back(l, std::vector<int>{q, q + 1}, sample_haar_unitary(2, rng).mat);
        c.layers.push_back(std::move(layer));
    }
    return c;
}

SchmidtRankAudit schmidt_rank_audit(const LayeredCircuit& c) {
    if (c.geometry != Geometry::Line) throw std::domain_error("schmidt_rank_audit: line geometry only");
    if (c.num_ancillae != 0) throw std::domain_error("schmidt_rank_audit: no ancillae allowed");
    int n = c.num_system_qubits;
    StateVector psi = apply(c, StateVector::basis_state(n, 0));
    SchmidtRankAudit audit;
    audit.rank_bound = 1;
    for (int i = 0; i < c.depth(); ++i) audit.rank_bound *= 4;
    for (int k = 1; k < n; ++k) {
        std::vector<int> left(k);
        for (int q = 0; q < k; ++q) left[q] = q;
        int r = schmidt_rank(psi, SubsystemMask(left));
        audit.cut_ranks.push_back(r);
        audit.max_rank = std::max(audit.max_rank, r);
    }
    audit.within_bound = audit.max_rank <= audit.rank_bound;
    return audit;
}

json LayeredCircuit::to_json() const {
    json j;
    j["n"] = num_system_qubits;
    j["ancillae"] = num_ancillae;
    j["geometry"] = geometry == Geometry::Line ? "line" : "none";
    json anc = json::array();
    for (const auto& a : ancilla_init)
        anc.push_back({{a[0].real(), a[0].imag()}, {a[1].real(), a[1].imag()}});
    j["ancilla_init"] = anc;
    json layers_j = json::array();
    for (const auto& layer : layers) {
        json lj = json::array();
        for (const auto& g : layer) {
            json mj = json::array();
            for (Eigen::Index r = 0; r < g.mat.rows(); ++r)
                for (Eigen::Index cc = 0; cc < g.mat.cols(); ++cc)
                    mj.push_back({g.mat(r, cc).real(), g.mat(r, cc).imag()});
            lj.push_back(json{{"q", g.qubits}, {"mat", mj}});
        }
        layers_j.push_back(lj);
    }
    j["layers"] = layers_j;
    return j;
}

LayeredCircuit LayeredCircuit::from_json(const json& j) {
    LayeredCircuit c;
    c.num_system_qubits = j.at("n");
    c.num_ancillae = j.value("ancillae", 0);
    c.geometry = (j.value("geometry", "none") == std::string("line")) ? Geometry::Line : Geometry::None;
    if (j.contains("ancilla_init")) {
        for (const auto& a : j["ancilla_init"]) {
            Vec v(2);
            v[0] = Cplx(a[0][0], a[0][1]);
            v[1] = Cplx(a[1][0], a[1][1]);
            c.ancilla_init.push_back(v);
        }
    } else {
        for (int i = 0; i < c.num_ancillae; ++i) {
            Vec v(2);
            v << 1.0, 0.0;
            c.ancilla_init.push_back(v);
        }
    }
    int l = 0;
    for (const auto& layer_j : j.at("layers")) {
        std::vector<Gate> layer;
        for (const auto& gj : layer_j) {
            std::vector<int> qs = gj.at("q").get<std::vector<int>>();
            Eigen::Index d = Eigen::Index(1) << qs.size();
            Mat m(d, d);
            const auto& mj = gj.at("mat");
            for (Eigen::Index r = 0; r < d; ++r)
                for (Eigen::Index cc = 0; cc < d; ++cc) {
                    const auto& e = mj[size_t(r * d + cc)];
                    m(r, cc) = Cplx(e[0], e[1]);
                }
            layer.emplace_back(l, std::move(qs), std::move(m));
        }
        c.layers.push_back(std::move(layer));
        ++l;
    }
    return c;
}

} // namespace qpr
