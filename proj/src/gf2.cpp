#include "layercode/gf2.hpp"

#include <algorithm>
#include <bit>

namespace layercode {

BitVec BitVec::from_support(std::size_t n, std::span<const std::size_t> support) {
    BitVec v(n);
    for (auto i : support) {
        if (i >= n) throw std::out_of_range("support index out of range");
        v.flip(i);
    }
    return v;
}

BitVec BitVec::from_string(const std::string& bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') v.set(i);
        else if (bits[i] != '0') throw std::invalid_argument("bit string must contain only 0/1");
    }
    return v;
}

BitVec& BitVec::operator^=(const BitVec& o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
}

BitVec& BitVec::operator&=(const BitVec& o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

std::size_t BitVec::weight() const {
    std::size_t w = 0;
    for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
    return w;
}

bool BitVec::any() const {
    return std::any_of(words_.begin(), words_.end(), [](auto x) { return x != 0; });
}

bool BitVec::dot(const BitVec& o) const {
    if (o.n_ != n_) throw std::invalid_argument("BitVec length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & o.words_[i];
    return std::popcount(acc) & 1;
}

std::vector<std::size_t> BitVec::support() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto x = words_[w];
        while (x) {
            out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
            x &= x - 1;
        }
    }
    return out;
}

std::string BitVec::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix BitMatrix::from_rows(std::size_t cols, std::vector<BitVec> rows) {
    BitMatrix m;
    m.cols_ = cols;
    for (auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("row length mismatch");
    }
    m.rows_ = std::move(rows);
    return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string>& rows) {
    if (rows.empty()) return {};
    std::vector<BitVec> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(BitVec::from_string(r));
    return from_rows(rows.front().size(), std::move(v));
}

BitMatrix BitMatrix::from_sparse(std::size_t cols, const std::vector<std::vector<std::size_t>>& rows) {
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) m.rows_[r] = BitVec::from_support(cols, rows[r]);
    return m;
}

void BitMatrix::append_row(BitVec r) {
    if (rows_.empty() && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("row length mismatch");
    rows_.push_back(std::move(r));
}

BitVec BitMatrix::mul(const BitVec& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
    BitVec out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
        if (rows_[r].dot(v)) out.set(r);
    return out;
}

BitMatrix BitMatrix::mul_transpose(const BitMatrix& other) const {
    if (other.cols_ != cols_) throw std::invalid_argument("matrix dimension mismatch");
    BitMatrix out(rows(), other.rows());
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t j = 0; j < other.rows(); ++j)
            if (rows_[i].dot(other.rows_[j])) out.set(i, j);
    return out;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
        for (auto c : rows_[r].support()) t.set(c, r);
    return t;
}

bool BitMatrix::is_zero() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const BitVec& r) { return r.none(); });
}

std::vector<std::vector<std::size_t>> BitMatrix::sparse_rows() const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.support());
    return out;
}

RowEchelon row_echelon(const BitMatrix& m) {
    std::vector<BitVec> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));

    std::vector<std::size_t> pivots;
    std::size_t next = 0;
    for (std::size_t c = 0; c < m.cols() && next < rows.size(); ++c) {
        std::size_t p = next;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[next]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != next && rows[r].get(c)) rows[r] ^= rows[next];
        pivots.push_back(c);
        ++next;
    }
    rows.resize(next);
    return {BitMatrix::from_rows(m.cols(), std::move(rows)), std::move(pivots)};
}

bool rows_orthogonal(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("column counts differ");
    std::vector<std::vector<std::size_t>> by_col(b.cols());
    const auto bs = b.sparse_rows();
    for (std::size_t r = 0; r < bs.size(); ++r)
        for (auto c : bs[r]) by_col[c].push_back(r);
    std::vector<std::uint8_t> par(b.rows(), 0);
    std::vector<std::size_t> touched;
    for (const auto& row : a.sparse_rows()) {
        touched.clear();
        for (auto c : row)
            for (auto r : by_col[c]) {
                par[r] ^= 1;
                touched.push_back(r);
            }
        bool ok = true;
        for (auto r : touched) {
            if (par[r]) ok = false;
            par[r] = 0;
        }
        if (!ok) return false;
    }
    return true;
}

std::size_t rank_gf2(const BitMatrix& m) {
    // Forward elimination only; cheaper than the full reduced form.
    std::vector<BitVec> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r)
            if (rows[r].get(c)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

std::vector<BitVec> kernel_basis(const BitMatrix& m) {
    const auto ech = row_echelon(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : ech.pivots) is_pivot[p] = true;
    std::vector<BitVec> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVec v(m.cols());
        v.set(f);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r)
            if (ech.rows.get(r, f)) v.set(ech.pivots[r]);
        basis.push_back(std::move(v));
    }
    return basis;
}

bool in_row_space(const RowEchelon& ech, BitVec v) {
    for (std::size_t r = 0; r < ech.pivots.size(); ++r)
        if (v.get(ech.pivots[r])) v ^= ech.rows.row(r);
    return v.none();
}

bool solve(const BitMatrix& m, const BitVec& s, BitVec& x) {
    if (s.size() != m.rows()) throw std::invalid_argument("syndrome length mismatch");
    // Eliminate on the augmented matrix [M | s].
    const std::size_t n = m.cols();
    std::vector<BitVec> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BitVec a(n + 1);
        for (auto c : m.row(r).support()) a.set(c);
        if (s.get(r)) a.set(n);
        rows.push_back(std::move(a));
    }
    std::vector<std::size_t> pivots;
    std::size_t next = 0;
    for (std::size_t c = 0; c < n && next < rows.size(); ++c) {
        std::size_t p = next;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[next]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != next && rows[r].get(c)) rows[r] ^= rows[next];
        pivots.push_back(c);
        ++next;
    }
    for (std::size_t r = next; r < rows.size(); ++r)
        if (rows[r].get(n)) return false;
    x = BitVec(n);
    for (std::size_t r = 0; r < pivots.size(); ++r)
        if (rows[r].get(n)) x.set(pivots[r]);
    return true;
}

}  // namespace layercode
