#include "qpr/statevec.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace qpr {

namespace {

void check_cap(long total_qubits) {
    if (total_qubits > kDenseCapLog2)
        throw std::length_error("dense cap exceeded (2^26 amplitudes)");
}

// Expansion tables for a keep-set: row index bits -> full index bits.
struct MaskIndexer {
    int n, k;
    std::vector<uint64_t> keep_expand; // 2^k entries
    std::vector<uint64_t> rest_expand; // 2^(n-k) entries

    MaskIndexer(int num_qubits, const SubsystemMask& mask) : n(num_qubits), k(mask.size()) {
        mask.validate(n);
        std::vector<int> keep_pos, rest_pos; // bit positions, MSB first
        std::vector<bool> kept(n, false);
        for (int q : mask.keep) kept[q] = true;
        for (int q = 0; q < n; ++q) (kept[q] ? keep_pos : rest_pos).push_back(n - 1 - q);
        keep_expand.assign(size_t(1) << k, 0);
        rest_expand.assign(size_t(1) << (n - k), 0);
        for (uint64_t r = 0; r < keep_expand.size(); ++r) {
            uint64_t f = 0;
            for (int i = 0; i < k; ++i)
                if ((r >> (k - 1 - i)) & 1) f |= 1ull << keep_pos[i];
            keep_expand[r] = f;
        }
        int nk = n - k;
        for (uint64_t c = 0; c < rest_expand.size(); ++c) {
            uint64_t f = 0;
            for (int i = 0; i < nk; ++i)
                if ((c >> (nk - 1 - i)) & 1) f |= 1ull << rest_pos[i];
            rest_expand[c] = f;
        }
    }
};

// Amplitudes reshaped as a 2^k x 2^(n-k) matrix along the mask.
Mat reshape_along(const StateVector& psi, const SubsystemMask& mask) {
    MaskIndexer ix(psi.num_qubits(), mask);
    Mat a(ix.keep_expand.size(), ix.rest_expand.size());
    for (size_t r = 0; r < ix.keep_expand.size(); ++r)
        for (size_t c = 0; c < ix.rest_expand.size(); ++c)
            a(r, c) = psi.amps()[ix.keep_expand[r] | ix.rest_expand[c]];
    return a;
}

Eigen::VectorXd hermitian_eigs(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace

StateVector::StateVector(int num_qubits, Vec amps) : n_(num_qubits), amps_(std::move(amps)) {
    check_cap(num_qubits);
    if (amps_.size() != (Eigen::Index(1) << n_))
        throw std::invalid_argument("StateVector: amplitude count != 2^num_qubits");
}

StateVector StateVector::basis_state(int num_qubits, uint64_t index) {
    check_cap(num_qubits);
    Vec a = Vec::Zero(Eigen::Index(1) << num_qubits);
    a[Eigen::Index(index)] = 1.0;
    return StateVector(num_qubits, std::move(a));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    check_cap(long(a.num_qubits()) + b.num_qubits());
    Vec out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amps()[i] * b.amps();
    return StateVector(a.num_qubits() + b.num_qubits(), std::move(out));
}

DensityMatrix::DensityMatrix(int num_qubits, Mat mat) : n_(num_qubits), mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() != (Eigen::Index(1) << n_))
        throw std::invalid_argument("DensityMatrix: bad shape");
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
    return DensityMatrix(psi.num_qubits(), psi.amps() * psi.amps().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    Eigen::Index d = Eigen::Index(1) << num_qubits;
    return DensityMatrix(num_qubits, Mat::Identity(d, d) / double(d));
}

void SubsystemMask::normalize_check() {
    std::sort(keep.begin(), keep.end());
    for (size_t i = 1; i < keep.size(); ++i)
        if (keep[i] == keep[i - 1]) throw std::invalid_argument("SubsystemMask: duplicate index");
}

void SubsystemMask::validate(int num_qubits) const {
    for (int q : keep)
        if (q < 0 || q >= num_qubits) throw std::invalid_argument("SubsystemMask: index out of range");
}

SubsystemMask SubsystemMask::complement(int num_qubits) const {
    validate(num_qubits);
    std::vector<bool> kept(num_qubits, false);
    for (int q : keep) kept[q] = true;
    std::vector<int> out;
    for (int q = 0; q < num_qubits; ++q)
        if (!kept[q]) out.push_back(q);
    return SubsystemMask(out);
}

DensityMatrix partial_trace(const StateVector& psi, const SubsystemMask& mask) {
    if (mask.keep.empty()) return DensityMatrix(0, Mat::Ones(1, 1));
    Mat a = reshape_along(psi, mask);
    return DensityMatrix(mask.size(), a * a.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemMask& mask) {
    if (mask.keep.empty()) return DensityMatrix(0, Mat::Ones(1, 1));
    MaskIndexer ix(rho.num_qubits(), mask);
    Eigen::Index dk = Eigen::Index(ix.keep_expand.size());
    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index r = 0; r < dk; ++r)
        for (Eigen::Index s = 0; s < dk; ++s) {
            Cplx acc = 0.0;
            for (uint64_t c : ix.rest_expand)
                acc += rho.mat()(ix.keep_expand[r] | c, ix.keep_expand[s] | c);
            out(r, s) = acc;
        }
    return DensityMatrix(mask.size(), std::move(out));
}

double purity(const DensityMatrix& rho) {
    return (rho.mat() * rho.mat()).trace().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.num_qubits() != b.num_qubits())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    return 0.5 * hermitian_eigs(a.mat() - b.mat()).cwiseAbs().sum();
}

double schatten_norm(const Mat& m, Schatten p) {
    Eigen::BDCSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    switch (p) {
    case Schatten::One:
        return s.sum();
    case Schatten::Two:
        return s.norm();
    case Schatten::Inf:
        return s.size() ? s.maxCoeff() : 0.0;
    }
    return 0.0;
}

double vn_entropy(const DensityMatrix& rho) {
    auto eigs = hermitian_eigs(rho.mat());
    double h = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        double l = eigs[i];
        if (l > 1e-15) h -= l * std::log2(l);
    }
    return h;
}

SchmidtDecomposition schmidt(const StateVector& psi, const SubsystemMask& cut) {
    if (cut.keep.empty() || cut.size() >= psi.num_qubits())
        throw std::domain_error("schmidt: cut must be a nonempty proper subset");
    Mat a = reshape_along(psi, cut);
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s[r] > kRankEps) ++r;
    SchmidtDecomposition out;
    out.coeffs = s.head(r);
    for (int i = 0; i < r; ++i) {
        out.left_basis.push_back(svd.matrixU().col(i));
        out.right_basis.push_back(svd.matrixV().col(i).conjugate());
    }
    return out;
}

int schmidt_rank(const StateVector& psi, const SubsystemMask& cut) {
    Mat a = reshape_along(psi, cut);
    Eigen::BDCSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s[r] > kRankEps) ++r;
    return r;
}

namespace {

std::vector<RecursiveSchmidtNode> rsd_decompose(const Vec& amps, int block_size, int blocks,
                                                double cum) {
    if (blocks == 1) {
        RecursiveSchmidtNode leaf;
        leaf.alpha = cum;
        Vec a = amps;
        a /= a.norm();
        leaf.block = StateVector(block_size, std::move(a));
        return {std::move(leaf)};
    }
    Eigen::Index rows = Eigen::Index(1) << block_size;
    Eigen::Index cols = Eigen::Index(1) << (block_size * (blocks - 1));
    // first block is the most significant index bits, so amps is row-major
    Eigen::Map<const Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        amps.data(), rows, cols);
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    std::vector<RecursiveSchmidtNode> nodes;
    for (Eigen::Index i = 0; i < s.size() && s[i] > kRankEps; ++i) {
        RecursiveSchmidtNode node;
        node.alpha = cum * s[i];
        node.block = StateVector(block_size, svd.matrixU().col(i));
        Vec w = svd.matrixV().col(i).conjugate();
        node.children = rsd_decompose(w, block_size, blocks - 1, node.alpha);
        nodes.push_back(std::move(node));
    }
    return nodes;
}

void rsd_accumulate(const RecursiveSchmidtNode& node, const Vec& prefix, Vec& total) {
    Vec cur(prefix.size() * node.block.dim());
    for (Eigen::Index i = 0; i < prefix.size(); ++i)
        cur.segment(i * node.block.dim(), node.block.dim()) = prefix[i] * node.block.amps();
    if (node.children.empty()) {
        total += node.alpha * cur;
        return;
    }
    for (const auto& child : node.children) rsd_accumulate(child, cur, total);
}

} // namespace

RecursiveSchmidtTree recursive_schmidt(const StateVector& psi, int block_size, int blocks) {
    if (block_size < 1 || blocks < 1 || psi.num_qubits() != block_size * blocks)
        throw std::domain_error("recursive_schmidt: num_qubits != block_size * blocks");
    RecursiveSchmidtTree tree;
    tree.blocks = blocks;
    tree.block_size = block_size;
    tree.roots = rsd_decompose(psi.amps(), block_size, blocks, 1.0);
    tree.max_rank = 1;
    for (int tau = 1; tau < blocks; ++tau) {
        std::vector<int> left;
        for (int q = 0; q < tau * block_size; ++q) left.push_back(q);
        tree.max_rank = std::max(tree.max_rank, schmidt_rank(psi, SubsystemMask(left)));
    }
    return tree;
}

StateVector RecursiveSchmidtTree::reconstruct() const {
    Vec total = Vec::Zero(Eigen::Index(1) << (blocks * block_size));
    Vec scalar = Vec::Ones(1);
    for (const auto& root : roots) rsd_accumulate(root, scalar, total);
    return StateVector(blocks * block_size, std::move(total));
}

gf2::BitVector measure_all(const StateVector& psi, RngStream& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    Eigen::Index last = psi.dim() - 1;
    for (Eigen::Index i = 0; i < psi.dim(); ++i) {
        acc += std::norm(psi.amps()[i]);
        if (u < acc) return gf2::BitVector(psi.num_qubits(), uint64_t(i));
    }
    return gf2::BitVector(psi.num_qubits(), uint64_t(last));
}

void apply_gate(StateVector& psi, const std::vector<int>& qubits, const Mat& gate) {
    int n = psi.num_qubits();
    Vec& a = psi.amps();
    if (qubits.size() == 1) {
        if (gate.rows() != 2) throw std::invalid_argument("apply_gate: expected 2x2 matrix");
        uint64_t m = 1ull << (n - 1 - qubits[0]);
        for (uint64_t i = 0; i < uint64_t(a.size()); ++i) {
            if (i & m) continue;
            Cplx a0 = a[i], a1 = a[i | m];
            a[i] = gate(0, 0) * a0 + gate(0, 1) * a1;
            a[i | m] = gate(1, 0) * a0 + gate(1, 1) * a1;
        }
    } else if (qubits.size() == 2) {
        if (gate.rows() != 4) throw std::invalid_argument("apply_gate: expected 4x4 matrix");
        if (qubits[0] == qubits[1]) throw std::invalid_argument("apply_gate: repeated qubit");
        uint64_t m0 = 1ull << (n - 1 - qubits[0]); // first listed qubit = high bit of gate index
        uint64_t m1 = 1ull << (n - 1 - qubits[1]);
        for (uint64_t i = 0; i < uint64_t(a.size()); ++i) {
            if (i & (m0 | m1)) continue;
            uint64_t idx[4] = {i, i | m1, i | m0, i | m0 | m1};
            Cplx v[4];
            for (int r = 0; r < 4; ++r) v[r] = a[idx[r]];
            for (int r = 0; r < 4; ++r) {
                Cplx acc = 0.0;
                for (int c = 0; c < 4; ++c) acc += gate(r, c) * v[c];
                a[idx[r]] = acc;
            }
        }
    } else {
        throw std::invalid_argument("apply_gate: gates act on 1 or 2 qubits");
    }
}

void apply_block_unitary(StateVector& psi, int first_qubit, const Mat& u) {
    int n = psi.num_qubits();
    int nb = 0;
    while ((Eigen::Index(1) << nb) < u.rows()) ++nb;
    if ((Eigen::Index(1) << nb) != u.rows() || u.rows() != u.cols())
        throw std::invalid_argument("apply_block_unitary: matrix must be square power of 2");
    if (first_qubit < 0 || first_qubit + nb > n)
        throw std::invalid_argument("apply_block_unitary: block out of range");
    int shift = n - first_qubit - nb;
    uint64_t dsub = 1ull << nb;
    uint64_t low_count = 1ull << shift;
    uint64_t high_count = 1ull << first_qubit;
    Vec& a = psi.amps();
    Vec buf(dsub);
    for (uint64_t hi = 0; hi < high_count; ++hi) {
        for (uint64_t lo = 0; lo < low_count; ++lo) {
            uint64_t base = (hi << (shift + nb)) | lo;
            for (uint64_t s = 0; s < dsub; ++s) buf[s] = a[base | (s << shift)];
            Vec res = u * buf;
            for (uint64_t s = 0; s < dsub; ++s) a[base | (s << shift)] = res[s];
        }
    }
}

} // namespace qpr
