#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpr/rng.hpp"

namespace qpr::gf2 {

// Fixed-length vector over F2, n <= 64. Coordinate 0 is the most significant
// bit of word(), so word() is directly usable as a computational basis index
// with qubit 0 first (the library-wide ordering convention).
class BitVector {
public:
    BitVector() = default;
    BitVector(int n, uint64_t word);

    int size() const { return n_; }
    uint64_t word() const { return word_; }
    bool is_zero() const { return word_ == 0; }

    int bit(int i) const { return int((word_ >> (n_ - 1 - i)) & 1u); }
    void set_bit(int i, int v);

    BitVector operator^(const BitVector& o) const;
    bool operator==(const BitVector& o) const = default;
    bool operator<(const BitVector& o) const { return word_ < o.word_; }

    std::string to_hex() const;
    static BitVector from_hex(int n, const std::string& hex);

private:
    int n_ = 0;
    uint64_t word_ = 0;
};

// F2 rank via Gaussian elimination. Throws std::invalid_argument on
// mismatched row lengths.
int rank(const std::vector<BitVector>& rows);

// true iff rank < number of vectors
bool is_dependent(const std::vector<BitVector>& vectors);

// Linear subspace of F2^n, stored as a reduced row echelon basis so that two
// equal subspaces compare equal.
class Subspace {
public:
    Subspace(int ambient_dim, const std::vector<BitVector>& spanning_rows);

    int ambient_dim() const { return n_; }
    int dim() const { return int(basis_.size()); }
    const std::vector<BitVector>& basis() const { return basis_; }
    const std::vector<int>& pivots() const { return pivots_; }

    // all 2^dim elements; dim capped at 20
    std::vector<BitVector> enumerate() const;

    bool contains(const BitVector& x) const;

    // Coordinates of x in the canonical basis (a dim-bit vector). For the
    // RREF basis these are just the bits of x at the pivot positions.
    BitVector coordinates(const BitVector& x) const;

    bool operator==(const Subspace& o) const = default;

private:
    int n_ = 0;
    std::vector<BitVector> basis_;
    std::vector<int> pivots_;
};

// Uniform over d-dimensional subspaces of F2^n (rejection on full-rank
// random d x n matrices).
Subspace sample_subspace(int n, int d, RngStream& rng);

// Element of GF(2^m) in polynomial representation modulo the fixed
// library-wide irreducible polynomial for degree m.
struct FieldElement {
    int m = 1;
    uint64_t coeffs = 0; // bit i = coefficient of x^i

    bool operator==(const FieldElement&) const = default;
};

// Lexicographically-first irreducible polynomial of degree m over F2,
// returned with the leading bit set (bit m). Cached per m; m <= 24.
uint64_t irreducible_modulus(int m);

FieldElement field_add(FieldElement a, FieldElement b);
FieldElement field_mul(FieldElement a, FieldElement b);

// 2t-wise independent boolean function family: degree-(k-1) polynomials over
// GF(2^m), seeded by their k coefficients, projected to the least
// significant coefficient bit.
struct KWiseFamily {
    int m = 1;
    int k = 2;
    std::vector<FieldElement> seed; // k coefficients, constant term first

    static KWiseFamily sample(int m, int k, RngStream& rng);
};

// Evaluates P_seed at x (an m-bit input) and returns the balanced projection
// (least significant coefficient bit).
int kwise_eval(const KWiseFamily& fam, const BitVector& x);

} // namespace qpr::gf2
