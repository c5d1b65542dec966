#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace layercode {

/// Packed bit-vector over GF(2).
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static BitVec from_support(std::size_t n, std::span<const std::size_t> support);
    static BitVec from_string(const std::string& bits);

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        const auto mask = std::uint64_t{1} << (i & 63);
        if (v) words_[i >> 6] |= mask;
        else words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVec& operator^=(const BitVec& o);
    BitVec& operator&=(const BitVec& o);
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    bool operator==(const BitVec& o) const = default;

    std::size_t weight() const;
    bool any() const;
    bool none() const { return !any(); }
    /// Parity of the overlap with `o`.
    bool dot(const BitVec& o) const;
    std::vector<std::size_t> support() const;
    std::string to_string() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Row-major dense GF(2) matrix.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

    static BitMatrix from_rows(std::size_t cols, std::vector<BitVec> rows);
    static BitMatrix from_strings(const std::vector<std::string>& rows);
    static BitMatrix from_sparse(std::size_t cols, const std::vector<std::vector<std::size_t>>& rows);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }
    const BitVec& row(std::size_t r) const { return rows_[r]; }
    BitVec& row(std::size_t r) { return rows_[r]; }
    void append_row(BitVec r);

    /// Matrix-vector product M·v.
    BitVec mul(const BitVec& v) const;
    /// M·Nᵀ.
    BitMatrix mul_transpose(const BitMatrix& other) const;
    BitMatrix transpose() const;
    bool is_zero() const;

    std::vector<std::vector<std::size_t>> sparse_rows() const;
    bool operator==(const BitMatrix& o) const = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

std::size_t rank_gf2(const BitMatrix& m);

/// A·Bᵀ = 0, computed from sparse rows; cheap for low-density matrices.
bool rows_orthogonal(const BitMatrix& a, const BitMatrix& b);

/// Reduced row echelon form with the pivot column of each kept row.
struct RowEchelon {
    BitMatrix rows;
    std::vector<std::size_t> pivots;
};
RowEchelon row_echelon(const BitMatrix& m);

/// Basis of {v : M·v = 0}.
std::vector<BitVec> kernel_basis(const BitMatrix& m);

/// True when v lies in the row space of the matrix whose echelon form is given.
bool in_row_space(const RowEchelon& ech, BitVec v);

/// Solves M·x = s; returns false when s is outside the column space.
bool solve(const BitMatrix& m, const BitVec& s, BitVec& x);

}  // namespace layercode
