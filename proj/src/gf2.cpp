#include "qpr/gf2.hpp"

#include <algorithm>
#include <array>
#include <mutex>

namespace qpr::gf2 {

BitVector::BitVector(int n, uint64_t word) : n_(n), word_(word) {
    if (n < 0 || n > 64) throw std::invalid_argument("BitVector: length out of range");
    if (n < 64) word_ &= (1ull << n) - 1;
}

void BitVector::set_bit(int i, int v) {
    uint64_t m = 1ull << (n_ - 1 - i);
    if (v)
        word_ |= m;
    else
        word_ &= ~m;
}

BitVector BitVector::operator^(const BitVector& o) const {
    if (n_ != o.n_) throw std::invalid_argument("BitVector: length mismatch");
    return BitVector(n_, word_ ^ o.word_);
}

std::string BitVector::to_hex() const {
    int digits = (n_ + 3) / 4;
    if (digits == 0) digits = 1;
    static const char* hexd = "0123456789abcdef";
    std::string out(digits, '0');
    for (int i = 0; i < digits; ++i)
        out[digits - 1 - i] = hexd[(word_ >> (4 * i)) & 0xf];
    return out;
}

BitVector BitVector::from_hex(int n, const std::string& hex) {
    uint64_t w = 0;
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9')
            v = c - '0';
        else if (c >= 'a' && c <= 'f')
            v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            v = c - 'A' + 10;
        else
            throw std::invalid_argument("BitVector: bad hex digit");
        w = (w << 4) | uint64_t(v);
    }
    return BitVector(n, w);
}

namespace {

// Reduces rows in place to row echelon form; returns pivot columns
// (as bit masks, descending). Rows are raw words.
int eliminate(std::vector<uint64_t>& rows, int n, std::vector<int>* pivot_cols) {
    int r = 0;
    for (int col = n - 1; col >= 0 && r < int(rows.size()); --col) {
        uint64_t m = 1ull << col;
        int pivot = -1;
        for (int i = r; i < int(rows.size()); ++i) {
            if (rows[i] & m) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(rows[r], rows[pivot]);
        for (int i = 0; i < int(rows.size()); ++i)
            if (i != r && (rows[i] & m)) rows[i] ^= rows[r];
        if (pivot_cols) pivot_cols->push_back(n - 1 - col); // coordinate index
        ++r;
    }
    return r;
}

std::vector<uint64_t> raw_rows(const std::vector<BitVector>& rows, int* n_out) {
    if (rows.empty()) {
        *n_out = 0;
        return {};
    }
    int n = rows[0].size();
    std::vector<uint64_t> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != n) throw std::invalid_argument("gf2: mismatched row lengths");
        out.push_back(r.word());
    }
    *n_out = n;
    return out;
}

} // namespace

int rank(const std::vector<BitVector>& rows) {
    int n = 0;
    auto raw = raw_rows(rows, &n);
    return eliminate(raw, n, nullptr);
}

bool is_dependent(const std::vector<BitVector>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("is_dependent: empty input");
    return rank(vectors) < int(vectors.size());
}

Subspace::Subspace(int ambient_dim, const std::vector<BitVector>& spanning_rows) : n_(ambient_dim) {
    if (ambient_dim < 0 || ambient_dim > 64)
        throw std::invalid_argument("Subspace: ambient dimension out of range");
    int n = ambient_dim;
    std::vector<uint64_t> raw;
    for (const auto& r : spanning_rows) {
        if (r.size() != n) throw std::invalid_argument("Subspace: row length mismatch");
        raw.push_back(r.word());
    }
    int d = eliminate(raw, n, &pivots_);
    for (int i = 0; i < d; ++i) basis_.emplace_back(n, raw[i]);
}

std::vector<BitVector> Subspace::enumerate() const {
    if (dim() > 20) throw std::length_error("Subspace::enumerate: dim over cap (20)");
    std::vector<BitVector> out;
    out.reserve(size_t(1) << dim());
    out.emplace_back(n_, 0);
    for (const auto& b : basis_) {
        size_t cur = out.size();
        for (size_t i = 0; i < cur; ++i) out.push_back(out[i] ^ b);
    }
    return out;
}

bool Subspace::contains(const BitVector& x) const {
    if (x.size() != n_) throw std::invalid_argument("Subspace::contains: length mismatch");
    uint64_t w = x.word();
    for (size_t i = 0; i < basis_.size(); ++i)
        if (x.bit(pivots_[i])) w ^= basis_[i].word();
    return w == 0;
}

BitVector Subspace::coordinates(const BitVector& x) const {
    if (!contains(x)) throw std::invalid_argument("Subspace::coordinates: x not in subspace");
    BitVector c(dim(), 0);
    for (int j = 0; j < dim(); ++j) c.set_bit(j, x.bit(pivots_[j]));
    return c;
}

Subspace sample_subspace(int n, int d, RngStream& rng) {
    if (d < 0 || d > n) throw std::domain_error("sample_subspace: need 0 <= d <= n");
    std::vector<BitVector> rows;
    for (;;) {
        rows.clear();
        for (int i = 0; i < d; ++i) {
            uint64_t w = rng.bits();
            if (n < 64) w &= (1ull << n) - 1;
            rows.emplace_back(n, w);
        }
        if (rank(rows) == d) break;
    }
    return Subspace(n, rows);
}

namespace {

// polynomial multiplication over F2 (carry-less), degree < 32 each
uint64_t clmul(uint64_t a, uint64_t b) {
    uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

uint64_t polymod(uint64_t a, uint64_t mod) {
    int dm = 63 - __builtin_clzll(mod);
    while (a >= (1ull << dm)) {
        int da = 63 - __builtin_clzll(a);
        if (da < dm) break;
        a ^= mod << (da - dm);
    }
    return a;
}

bool poly_irreducible(uint64_t p, int m) {
    // trial division by all polynomials of degree 1..m/2
    for (int dd = 1; 2 * dd <= m; ++dd) {
        for (uint64_t q = (1ull << dd); q < (2ull << dd); ++q) {
            if (polymod(p, q) == 0) return false;
        }
    }
    return true;
}

} // namespace

uint64_t irreducible_modulus(int m) {
    if (m < 1 || m > 24) throw std::domain_error("irreducible_modulus: m out of range [1,24]");
    static std::array<uint64_t, 25> cache{};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (cache[m] == 0) {
        for (uint64_t p = (1ull << m); ; ++p) {
            if (poly_irreducible(p, m)) {
                cache[m] = p;
                break;
            }
        }
    }
    return cache[m];
}

FieldElement field_add(FieldElement a, FieldElement b) {
    if (a.m != b.m) throw std::domain_error("field_add: degree mismatch");
    return {a.m, a.coeffs ^ b.coeffs};
}

FieldElement field_mul(FieldElement a, FieldElement b) {
    if (a.m != b.m) throw std::domain_error("field_mul: degree mismatch");
    uint64_t prod = clmul(a.coeffs, b.coeffs);
    return {a.m, polymod(prod, irreducible_modulus(a.m))};
}

KWiseFamily KWiseFamily::sample(int m, int k, RngStream& rng) {
    if (k < 2) throw std::domain_error("KWiseFamily: k must be >= 2");
    KWiseFamily fam;
    fam.m = m;
    fam.k = k;
    uint64_t mask = (m < 64) ? (1ull << m) - 1 : ~0ull;
    for (int i = 0; i < k; ++i) fam.seed.push_back({m, rng.bits() & mask});
    return fam;
}

int kwise_eval(const KWiseFamily& fam, const BitVector& x) {
    if (x.size() != fam.m) throw std::domain_error("kwise_eval: input length != m");
    FieldElement xe{fam.m, x.word()};
    FieldElement acc{fam.m, 0};
    for (int i = fam.k - 1; i >= 0; --i)
        acc = field_add(field_mul(acc, xe), fam.seed[i]);
    return int(acc.coeffs & 1);
}

} // namespace qpr::gf2
