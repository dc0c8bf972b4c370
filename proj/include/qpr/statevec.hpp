#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qpr/gf2.hpp"
#include "qpr/rng.hpp"

namespace qpr {

using Cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// hard cap on dense representations: 2^26 amplitudes
inline constexpr int kDenseCapLog2 = 26;

// threshold separating true Schmidt rank from floating point noise
inline constexpr double kRankEps = 1e-9;

// Dense state on num_qubits qubits. Qubit 0 is the most significant bit of
// the amplitude index; blocks of qubits are contiguous index ranges.
class StateVector {
public:
    StateVector() : n_(0), amps_(Vec::Ones(1)) {} // 0-qubit scalar 1
    StateVector(int num_qubits, Vec amps);

    static StateVector basis_state(int num_qubits, uint64_t index);

    int num_qubits() const { return n_; }
    Eigen::Index dim() const { return amps_.size(); }
    const Vec& amps() const { return amps_; }
    Vec& amps() { return amps_; }

    double norm() const { return amps_.norm(); }
    void normalize() { amps_ /= amps_.norm(); }

private:
    int n_;
    Vec amps_;
};

StateVector tensor(const StateVector& a, const StateVector& b);

class DensityMatrix {
public:
    DensityMatrix(int num_qubits, Mat mat);
    static DensityMatrix from_state(const StateVector& psi);
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const { return n_; }
    const Mat& mat() const { return mat_; }

private:
    int n_;
    Mat mat_;
};

// Sorted set of qubit indices to keep under a partial trace.
struct SubsystemMask {
    std::vector<int> keep;

    SubsystemMask() = default;
    SubsystemMask(std::initializer_list<int> qs) : keep(qs) { normalize_check(); }
    explicit SubsystemMask(std::vector<int> qs) : keep(std::move(qs)) { normalize_check(); }

    int size() const { return int(keep.size()); }
    SubsystemMask complement(int num_qubits) const;
    void validate(int num_qubits) const;

private:
    void normalize_check();
};

DensityMatrix partial_trace(const StateVector& psi, const SubsystemMask& mask);
DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemMask& mask);

double purity(const DensityMatrix& rho);

// 1/2 * ||a - b||_1 (the statistical distinguishability convention)
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

enum class Schatten { One = 1, Two = 2, Inf = 0 };

// Raw Schatten norm over singular values; no 1/2 factor.
double schatten_norm(const Mat& m, Schatten p);

// von Neumann entropy in bits
double vn_entropy(const DensityMatrix& rho);

struct SchmidtDecomposition {
    Eigen::VectorXd coeffs;      // nonincreasing, > kRankEps
    std::vector<Vec> left_basis; // on the cut qubits
    std::vector<Vec> right_basis;
    int rank() const { return int(coeffs.size()); }
};

// Decomposition across mask (left side) vs complement. Throws on trivial cuts.
SchmidtDecomposition schmidt(const StateVector& psi, const SubsystemMask& cut);

// Schmidt rank across the given cut (singular values > kRankEps)
int schmidt_rank(const StateVector& psi, const SubsystemMask& cut);

struct RecursiveSchmidtNode {
    double alpha = 0.0;   // cumulative |alpha_{i1..itau}| down to this node
    StateVector block;    // |v_{tau,i1,...,itau}>
    std::vector<RecursiveSchmidtNode> children;
};

struct RecursiveSchmidtTree {
    int blocks = 0;     // t
    int block_size = 0; // n
    int max_rank = 0;   // r = max Schmidt rank over the flat cuts tau*n
    std::vector<RecursiveSchmidtNode> roots;

    StateVector reconstruct() const;
};

RecursiveSchmidtTree recursive_schmidt(const StateVector& psi, int block_size, int blocks);

gf2::BitVector measure_all(const StateVector& psi, RngStream& rng);

// In-place application of a 2x2 or 4x4 unitary on the listed qubits.
void apply_gate(StateVector& psi, const std::vector<int>& qubits, const Mat& gate);

// Applies an n_u-qubit unitary matrix on the contiguous block starting at
// first_qubit.
void apply_block_unitary(StateVector& psi, int first_qubit, const Mat& u);

} // namespace qpr
