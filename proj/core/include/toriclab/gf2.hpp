#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace toriclab {

// Bit-packed GF(2) row vector.
class Gf2Row {
public:
    Gf2Row() = default;
    explicit Gf2Row(int nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

    int size() const { return nbits_; }
    bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(int i, bool v) {
        std::uint64_t m = 1ULL << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }
    void flip(int i) { w_[i >> 6] ^= 1ULL << (i & 63); }
    void operator^=(const Gf2Row& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    }
    bool any() const {
        for (auto w : w_) if (w) return true;
        return false;
    }
    int dot(const Gf2Row& o) const { // parity of AND
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
        return std::popcount(acc) & 1;
    }
    int lowest_set() const {
        for (std::size_t k = 0; k < w_.size(); ++k)
            if (w_[k]) return static_cast<int>(k * 64 + std::countr_zero(w_[k]));
        return -1;
    }

private:
    int nbits_ = 0;
    std::vector<std::uint64_t> w_;
};

// Row-reduce in place; returns the rank. Rows above rank form a row-echelon
// basis, rows at/after it are zero.
inline int gf2_eliminate(std::vector<Gf2Row>& rows) {
    int rank = 0;
    const int n = rows.empty() ? 0 : rows[0].size();
    for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r].get(col)) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && rows[r].get(col)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

inline int gf2_rank(std::vector<Gf2Row> rows) { return gf2_eliminate(rows); }

} // namespace toriclab
