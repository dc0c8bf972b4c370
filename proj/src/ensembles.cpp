#include "qpr/ensembles.hpp"

#include <Eigen/QR>
#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace qpr {

using nlohmann::json;

double Unitary::unitarity_residual() const {
    Mat r = mat.adjoint() * mat - Mat::Identity(mat.rows(), mat.cols());
    return r.cwiseAbs().maxCoeff();
}

StateVector sample_haar_state(int n, RngStream& rng) {
    Eigen::Index d = Eigen::Index(1) << n;
    Vec a(d);
    for (Eigen::Index i = 0; i < d; ++i) a[i] = rng.cgauss();
    a /= a.norm();
    return StateVector(n, std::move(a));
}

Unitary sample_haar_unitary(int n, RngStream& rng) {
    Eigen::Index d = Eigen::Index(1) << n;
    Mat g(d, d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.cgauss();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // phase correction so the distribution is exactly Haar
    for (Eigen::Index i = 0; i < d; ++i) {
        Cplx rii = r(i, i);
        q.col(i) *= rii / std::abs(rii);
    }
    return Unitary{n, std::move(q)};
}

// ---------------------------------------------------------------------------
// Clifford group sampling.
//
// A Clifford element (mod global phase) is a symplectic map on Pauli labels
// plus a sign per generator image. We sample a uniformly random symplectic
// basis pair-by-pair, each pair drawn uniformly from the symplectic
// complement of the pairs chosen so far, then attach uniform signs.
// ---------------------------------------------------------------------------

namespace {

// Pauli operator i^phase * prod_p X^{x_p} Z^{z_p}, with masks in amplitude
// bit space. Hermitian iff phase == popcount(x&z) mod 2.
struct PauliRep {
    uint32_t x = 0, z = 0;
    int phase = 0; // exponent of i, mod 4
};

PauliRep make_hermitian_pauli(uint32_t x, uint32_t z, int sign) {
    return {x, z, (__builtin_popcount(x & z) + 2 * sign) % 4};
}

Vec apply_pauli(const Vec& in, const PauliRep& p) {
    static const Cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Vec out(in.size());
    Cplx ph = ipow[p.phase];
    for (uint64_t b = 0; b < uint64_t(in.size()); ++b) {
        double sgn = (__builtin_popcountll(p.z & b) & 1) ? -1.0 : 1.0;
        out[b ^ p.x] = ph * sgn * in[b];
    }
    return out;
}

// symplectic vectors over F2^{2n}: bits [0,n) = x part, bits [n,2n) = z part
int sympl(uint32_t u, uint32_t v, int n) {
    uint32_t ux = u & ((1u << n) - 1), uz = u >> n;
    uint32_t vx = v & ((1u << n) - 1), vz = v >> n;
    return __builtin_popcount((ux & vz) ^ (uz & vx)) & 1;
}

struct CliffordTableau {
    int n = 0;
    std::vector<PauliRep> px, pz; // images of X_p and Z_p per amplitude bit p
};

CliffordTableau sample_clifford_tableau(int n, RngStream& rng) {
    std::vector<uint32_t> basis;
    for (int i = 0; i < 2 * n; ++i) basis.push_back(1u << i);

    std::vector<uint32_t> vs, ws;
    for (int j = 0; j < n; ++j) {
        int dim = int(basis.size());
        // v uniform nonzero in the current complement
        uint32_t v = 0;
        do {
            v = 0;
            uint64_t coeffs = rng.bits();
            for (int i = 0; i < dim; ++i)
                if ((coeffs >> i) & 1) v ^= basis[i];
            if ((coeffs & ((1ull << dim) - 1)) != 0) break;
        } while (true);

        // hyperplane basis for <v,.> = 0, plus a coset representative
        std::vector<uint32_t> b1, hyper;
        for (uint32_t b : basis)
            (sympl(v, b, n) ? b1 : hyper).push_back(b);
        uint32_t rep = b1[0];
        for (size_t i = 1; i < b1.size(); ++i) hyper.push_back(b1[i] ^ rep);

        // w uniform over {w : <v,w> = 1}
        uint32_t w = rep;
        uint64_t coeffs = rng.bits();
        for (size_t i = 0; i < hyper.size(); ++i)
            if ((coeffs >> i) & 1) w ^= hyper[i];

        // next complement: kernel of <w,.> within the hyperplane
        std::vector<uint32_t> h1, next;
        for (uint32_t h : hyper)
            (sympl(w, h, n) ? h1 : next).push_back(h);
        uint32_t hrep = h1[0]; // nonempty since v lies in the hyperplane span
        for (size_t i = 1; i < h1.size(); ++i) next.push_back(h1[i] ^ hrep);

        vs.push_back(v);
        ws.push_back(w);
        basis = std::move(next);
    }

    CliffordTableau t;
    t.n = n;
    uint32_t xmask = (1u << n) - 1;
    for (int j = 0; j < n; ++j) {
        t.px.push_back(make_hermitian_pauli(vs[j] & xmask, vs[j] >> n, rng.bit()));
        t.pz.push_back(make_hermitian_pauli(ws[j] & xmask, ws[j] >> n, rng.bit()));
    }
    return t;
}

// Unique state (up to phase) stabilized by n independent commuting Hermitian
// Pauli generators, via the projector product applied to a random seed.
Vec stabilizer_state_from(const std::vector<PauliRep>& gens, int n, RngStream& rng) {
    Eigen::Index d = Eigen::Index(1) << n;
    for (;;) {
        Vec g(d);
        for (Eigen::Index i = 0; i < d; ++i) g[i] = rng.cgauss();
        for (const auto& p : gens) g = 0.5 * (g + apply_pauli(g, p));
        double nm = g.norm();
        if (nm > 1e-8) return g / nm;
    }
}

Vec clifford_column(const CliffordTableau& t, const Vec& phi, uint64_t basis_index) {
    Vec col = phi;
    for (int p = 0; p < t.n; ++p)
        if ((basis_index >> (t.n - 1 - p)) & 1) col = apply_pauli(col, t.px[t.n - 1 - p]);
    return col;
}

Mat clifford_dense(const CliffordTableau& t, RngStream& rng) {
    Eigen::Index d = Eigen::Index(1) << t.n;
    Vec phi = stabilizer_state_from(t.pz, t.n, rng);
    Mat u(d, d);
    for (Eigen::Index x = 0; x < d; ++x) {
        Vec col = phi;
        for (int p = 0; p < t.n; ++p)
            if ((x >> p) & 1) col = apply_pauli(col, t.px[p]);
        u.col(x) = col;
    }
    return u;
}

} // namespace

Unitary sample_clifford(int n, RngStream& rng) {
    auto t = sample_clifford_tableau(n, rng);
    return Unitary{n, clifford_dense(t, rng)};
}

StateVector sample_stabilizer_state(int n, RngStream& rng) {
    auto t = sample_clifford_tableau(n, rng);
    return StateVector(n, stabilizer_state_from(t.pz, n, rng));
}

std::vector<StateVector> enumerate_stabilizer_states(int n) {
    if (n < 1 || n > 2) throw std::domain_error("enumerate_stabilizer_states: n must be 1 or 2");
    uint32_t count = 1u << (2 * n);

    // all maximal isotropic subgroups of the Pauli label group, deduped by span
    std::set<std::set<uint32_t>> groups;
    std::vector<std::vector<uint32_t>> gen_sets;
    std::vector<uint32_t> gens;
    std::function<void(uint32_t)> rec = [&](uint32_t start) {
        if (int(gens.size()) == n) {
            std::set<uint32_t> span;
            for (uint32_t m = 0; m < (1u << n); ++m) {
                uint32_t e = 0;
                for (int i = 0; i < n; ++i)
                    if ((m >> i) & 1) e ^= gens[i];
                span.insert(e);
            }
            if (groups.insert(span).second) gen_sets.push_back(gens);
            return;
        }
        for (uint32_t g = start; g < count; ++g) {
            bool ok = true;
            for (uint32_t prev : gens)
                if (sympl(prev, g, n)) ok = false;
            // independence: g not in span of previous gens
            for (uint32_t m = 0; ok && m < (1u << gens.size()); ++m) {
                uint32_t e = 0;
                for (size_t i = 0; i < gens.size(); ++i)
                    if ((m >> i) & 1) e ^= gens[i];
                if (e == g) ok = false;
            }
            if (!ok) continue;
            gens.push_back(g);
            rec(g + 1);
            gens.pop_back();
        }
    };
    rec(1);

    uint32_t xmask = (1u << n) - 1;
    RngStream seed_rng(0x57ab1e5eedull);
    std::vector<StateVector> out;
    for (const auto& gs : gen_sets) {
        for (uint32_t signs = 0; signs < (1u << n); ++signs) {
            std::vector<PauliRep> paulis;
            for (int i = 0; i < n; ++i)
                paulis.push_back(make_hermitian_pauli(gs[i] & xmask, gs[i] >> n, (signs >> i) & 1));
            out.emplace_back(n, stabilizer_state_from(paulis, n, seed_rng));
        }
    }
    return out;
}

StateVector phased_subspace_state(const gf2::Subspace& s,
                                  const std::function<int(const gf2::BitVector&)>& phase) {
    int n = s.ambient_dim();
    if (n > kDenseCapLog2) throw std::length_error("phased_subspace_state: ambient over dense cap");
    Vec a = Vec::Zero(Eigen::Index(1) << n);
    double amp = std::pow(2.0, -0.5 * s.dim());
    for (const auto& x : s.enumerate())
        a[Eigen::Index(x.word())] = phase(x) ? -amp : amp;
    return StateVector(n, std::move(a));
}

namespace {

StateEnsembleSpec make_state_spec(StateEnsembleSpec::Kind kind, int n) {
    StateEnsembleSpec s;
    s.kind = kind;
    s.n = n;
    return s;
}

} // namespace

StateEnsembleSpec StateEnsembleSpec::haar(int n) { return make_state_spec(Kind::Haar, n); }
StateEnsembleSpec StateEnsembleSpec::stabilizer(int n) {
    return make_state_spec(Kind::Stabilizer, n);
}
StateEnsembleSpec StateEnsembleSpec::phased_subspace(int n, int d, PhaseMode mode) {
    if (d > n) throw std::domain_error("phased_subspace: d > n");
    StateEnsembleSpec s = make_state_spec(Kind::PhasedSubspace, n);
    s.d = d;
    s.phase_mode = mode;
    return s;
}
StateEnsembleSpec StateEnsembleSpec::fixed_list(std::vector<StateVector> states) {
    StateEnsembleSpec s =
        make_state_spec(Kind::FixedList, states.empty() ? 0 : states[0].num_qubits());
    s.states = std::move(states);
    return s;
}

StateVector StateEnsembleSpec::sample(RngStream& rng) const {
    switch (kind) {
    case Kind::Haar:
        return sample_haar_state(n, rng);
    case Kind::Stabilizer:
        return sample_stabilizer_state(n, rng);
    case Kind::PhasedSubspace: {
        gf2::Subspace s = gf2::sample_subspace(n, d, rng);
        if (phase_mode == PhaseMode::TrueRandom) {
            std::unordered_map<uint64_t, int> bits;
            for (const auto& x : s.enumerate()) bits[x.word()] = rng.bit();
            return phased_subspace_state(s, [&](const gf2::BitVector& x) { return bits.at(x.word()); });
        }
        if (phase_mode == PhaseMode::Kwise4Ambient) {
            auto fam = gf2::KWiseFamily::sample(n, 4, rng);
            return phased_subspace_state(s, [&](const gf2::BitVector& x) { return kwise_eval(fam, x); });
        }
        // Kwise4: f evaluated on the coordinates of x in the subspace basis
        int m = std::max(d, 1);
        auto fam = gf2::KWiseFamily::sample(m, 4, rng);
        return phased_subspace_state(s, [&](const gf2::BitVector& x) {
            gf2::BitVector c = s.coordinates(x);
            return kwise_eval(fam, gf2::BitVector(m, c.word()));
        });
    }
    case Kind::FixedList:
        return states[rng.below(states.size())];
    }
    throw std::logic_error("unreachable");
}

bool StateEnsembleSpec::enumerable() const {
    return kind == Kind::FixedList || (kind == Kind::Stabilizer && n <= 2);
}

std::vector<StateVector> StateEnsembleSpec::enumerate() const {
    if (kind == Kind::FixedList) return states;
    if (kind == Kind::Stabilizer && n <= 2) return enumerate_stabilizer_states(n);
    throw std::domain_error("StateEnsembleSpec::enumerate: ensemble not enumerable");
}

namespace {

json state_to_json(const StateVector& s) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i)
        arr.push_back({s.amps()[i].real(), s.amps()[i].imag()});
    return arr;
}

StateVector state_from_json(const json& j) {
    Vec a(j.size());
    for (size_t i = 0; i < j.size(); ++i) a[Eigen::Index(i)] = Cplx(j[i][0], j[i][1]);
    int n = 0;
    while ((Eigen::Index(1) << n) < a.size()) ++n;
    return StateVector(n, std::move(a));
}

std::string phase_mode_name(PhaseMode m) {
    switch (m) {
    case PhaseMode::TrueRandom:
        return "true_random";
    case PhaseMode::Kwise4:
        return "kwise";
    case PhaseMode::Kwise4Ambient:
        return "kwise_ambient";
    }
    return "";
}

PhaseMode phase_mode_parse(const std::string& s) {
    if (s == "true_random") return PhaseMode::TrueRandom;
    if (s == "kwise") return PhaseMode::Kwise4;
    if (s == "kwise_ambient") return PhaseMode::Kwise4Ambient;
    throw std::invalid_argument("unknown phase_mode: " + s);
}

} // namespace

json StateEnsembleSpec::to_json() const {
    json j;
    j["n"] = n;
    switch (kind) {
    case Kind::Haar:
        j["variant"] = "haar";
        break;
    case Kind::Stabilizer:
        j["variant"] = "stabilizer";
        break;
    case Kind::PhasedSubspace:
        j["variant"] = "subspace";
        j["d"] = d;
        j["phase_mode"] = phase_mode_name(phase_mode);
        break;
    case Kind::FixedList: {
        j["variant"] = "fixed";
        json arr = json::array();
        for (const auto& s : states) arr.push_back(state_to_json(s));
        j["states"] = arr;
        break;
    }
    }
    return j;
}

StateEnsembleSpec StateEnsembleSpec::from_json(const json& j) {
    std::string v = j.at("variant");
    if (v == "haar") return haar(j.at("n"));
    if (v == "stabilizer") return stabilizer(j.at("n"));
    if (v == "subspace") {
        PhaseMode mode = PhaseMode::Kwise4;
        if (j.contains("phase_mode")) mode = phase_mode_parse(j["phase_mode"]);
        return phased_subspace(j.at("n"), j.at("d"), mode);
    }
    if (v == "fixed") {
        std::vector<StateVector> states;
        for (const auto& s : j.at("states")) states.push_back(state_from_json(s));
        return fixed_list(std::move(states));
    }
    throw std::invalid_argument("unknown state ensemble variant: " + v);
}

namespace {

UnitaryEnsembleSpec make_unitary_spec(UnitaryEnsembleSpec::Kind kind, int n) {
    UnitaryEnsembleSpec s;
    s.kind = kind;
    s.n = n;
    return s;
}

} // namespace

UnitaryEnsembleSpec UnitaryEnsembleSpec::haar(int n) { return make_unitary_spec(Kind::Haar, n); }
UnitaryEnsembleSpec UnitaryEnsembleSpec::clifford(int n) {
    return make_unitary_spec(Kind::Clifford, n);
}
UnitaryEnsembleSpec UnitaryEnsembleSpec::fixed_list(std::vector<Unitary> us) {
    UnitaryEnsembleSpec s = make_unitary_spec(Kind::FixedList, us.empty() ? 0 : us[0].num_qubits);
    s.unitaries = std::move(us);
    return s;
}

Unitary UnitaryEnsembleSpec::sample(RngStream& rng) const {
    switch (kind) {
    case Kind::Haar:
        return sample_haar_unitary(n, rng);
    case Kind::Clifford:
        return sample_clifford(n, rng);
    case Kind::FixedList:
        return unitaries[rng.below(unitaries.size())];
    }
    throw std::logic_error("unreachable");
}

std::pair<Vec, Vec> UnitaryEnsembleSpec::sample_column_pair(uint64_t basis_v, uint64_t basis_w,
                                                            RngStream& rng) const {
    Eigen::Index d = Eigen::Index(1) << n;
    switch (kind) {
    case Kind::Haar: {
        // images of a fixed orthonormal pair form a Haar random 2-frame
        Vec a(d), b(d);
        for (Eigen::Index i = 0; i < d; ++i) a[i] = rng.cgauss();
        for (Eigen::Index i = 0; i < d; ++i) b[i] = rng.cgauss();
        a /= a.norm();
        b -= a * a.dot(b);
        b /= b.norm();
        return {a, b};
    }
    case Kind::Clifford: {
        auto t = sample_clifford_tableau(n, rng);
        Vec phi = stabilizer_state_from(t.pz, n, rng);
        return {clifford_column(t, phi, basis_v), clifford_column(t, phi, basis_w)};
    }
    case Kind::FixedList: {
        const Unitary& u = unitaries[rng.below(unitaries.size())];
        return {u.mat.col(Eigen::Index(basis_v)), u.mat.col(Eigen::Index(basis_w))};
    }
    }
    throw std::logic_error("unreachable");
}

json UnitaryEnsembleSpec::to_json() const {
    json j;
    j["n"] = n;
    switch (kind) {
    case Kind::Haar:
        j["variant"] = "haar";
        break;
    case Kind::Clifford:
        j["variant"] = "clifford";
        break;
    case Kind::FixedList:
        throw std::invalid_argument("fixed unitary lists are not serializable");
    }
    return j;
}

UnitaryEnsembleSpec UnitaryEnsembleSpec::from_json(const json& j) {
    std::string v = j.at("variant");
    if (v == "haar") return haar(j.at("n"));
    if (v == "clifford") return clifford(j.at("n"));
    throw std::invalid_argument("unknown unitary ensemble variant: " + v);
}

} // namespace qpr
