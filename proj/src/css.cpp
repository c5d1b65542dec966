#include "layercode/css.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "layercode/errors.hpp"

namespace layercode {

namespace {

std::size_t max_row_weight(const BitMatrix& m) {
    std::size_t w = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) w = std::max(w, m.row(r).weight());
    return w;
}

std::vector<BitVec> columns(const BitMatrix& m) {
    std::vector<BitVec> cols(m.cols(), BitVec(m.rows()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (auto c : m.row(r).support()) cols[c].set(r);
    return cols;
}

// Kernel vectors that are independent modulo the stabilizer row space.
std::vector<BitVec> nontrivial_kernel(const BitMatrix& stab, const std::vector<BitVec>& ker, std::size_t n) {
    BitMatrix span = stab.rows() ? stab : BitMatrix(0, n);
    std::vector<BitVec> out;
    auto ech = row_echelon(span);
    for (const auto& v : ker) {
        if (in_row_space(ech, v)) continue;
        out.push_back(v);
        span.append_row(v);
        ech = row_echelon(span);
    }
    return out;
}

}  // namespace

std::size_t binomial_saturating(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(acc);
}

std::size_t for_each_combination(std::size_t n, std::size_t w,
                                 const std::function<bool(const std::vector<std::size_t>&)>& fn) {
    if (w > n) return 0;
    std::vector<std::size_t> idx(w);
    for (std::size_t i = 0; i < w; ++i) idx[i] = i;
    std::size_t visited = 0;
    while (true) {
        ++visited;
        if (!fn(idx)) return visited;
        // Advance to the next combination in lexicographic order.
        std::size_t i = w;
        while (i > 0 && idx[i - 1] == n - w + (i - 1)) --i;
        if (i == 0) return visited;
        ++idx[i - 1];
        for (std::size_t j = i; j < w; ++j) idx[j] = idx[j - 1] + 1;
    }
}

void symplectic_basis(const BitMatrix& stab_x, const BitMatrix& stab_z,
                      const std::vector<BitVec>& ker_hz, const std::vector<BitVec>& ker_hx,
                      std::vector<BitVec>& out_x, std::vector<BitVec>& out_z) {
    const std::size_t n = stab_x.cols() ? stab_x.cols() : stab_z.cols();
    auto xs = nontrivial_kernel(stab_x, ker_hz, n);
    auto zs = nontrivial_kernel(stab_z, ker_hx, n);
    out_x.clear();
    out_z.clear();
    while (!xs.empty()) {
        auto x = xs.front();
        xs.erase(xs.begin());
        auto it = std::find_if(zs.begin(), zs.end(), [&](const BitVec& z) { return x.dot(z); });
        if (it == zs.end()) throw InternalInconsistency("logical basis has an unpaired X operator");
        auto z = *it;
        zs.erase(it);
        for (auto& xr : xs)
            if (xr.dot(z)) xr ^= x;
        for (auto& zr : zs)
            if (zr.dot(x)) zr ^= z;
        out_x.push_back(std::move(x));
        out_z.push_back(std::move(z));
    }
    if (!zs.empty()) throw InternalInconsistency("logical basis has an unpaired Z operator");
}

CssCode validate_css(const BitMatrix& hx, const BitMatrix& hz) {
    const std::size_t n = hx.rows() ? hx.cols() : hz.cols();
    if (hx.rows() && hz.rows() && hx.cols() != hz.cols())
        throw DimensionMismatch("hx and hz have different column counts");
    if ((hx.rows() && hx.cols() != n) || (hz.rows() && hz.cols() != n))
        throw DimensionMismatch("check matrix width mismatch");
    CssCode code;
    code.n = n;
    code.hx = hx.rows() ? hx : BitMatrix(0, n);
    code.hz = hz.rows() ? hz : BitMatrix(0, n);
    if (!code.hx.mul_transpose(code.hz).is_zero())
        throw CommutationViolation("hx * hz^T != 0: some X and Z checks overlap on an odd number of qubits");
    const auto rx = rank_gf2(code.hx);
    const auto rz = rank_gf2(code.hz);
    code.k = n - rx - rz;
    symplectic_basis(code.hx, code.hz, kernel_basis(code.hz), kernel_basis(code.hx), code.logicals_x,
                     code.logicals_z);
    if (code.logicals_x.size() != code.k) throw InternalInconsistency("logical count differs from n - rank");
    code.w = std::max(max_row_weight(code.hx), max_row_weight(code.hz));
    std::vector<std::size_t> degree(n, 0);
    for (const auto* m : {&code.hx, &code.hz})
        for (std::size_t r = 0; r < m->rows(); ++r)
            for (auto c : m->row(r).support()) ++degree[c];
    code.w_prime = n ? *std::max_element(degree.begin(), degree.end()) : 0;
    return code;
}

MinWeightResult min_weight_logical(const CssCode& code, PauliType t, std::size_t w_max, std::size_t budget) {
    MinWeightResult res;
    if (code.k == 0) return res;
    const auto cols = columns(code.detecting(t));
    const auto& duals = code.logicals(dual(t));
    const std::size_t rows = code.detecting(t).rows();
    std::size_t spent = 0;
    for (std::size_t w = 1; w <= std::min(w_max, code.n); ++w) {
        const auto count = binomial_saturating(code.n, w);
        if (count > budget - spent) {
            if (w == 1) throw BudgetExceeded("candidate budget too small for weight-1 search");
            res.status = SearchStatus::LowerBoundOnly;
            res.weight = w;
            return res;
        }
        spent += count;
        bool found = false;
        for_each_combination(code.n, w, [&](const std::vector<std::size_t>& idx) {
            BitVec s(rows);
            for (auto i : idx) s ^= cols[i];
            if (s.any()) return true;
            auto e = BitVec::from_support(code.n, idx);
            for (const auto& d : duals) {
                if (e.dot(d)) {
                    res.witness = std::move(e);
                    found = true;
                    return false;
                }
            }
            return true;
        });
        if (found) {
            res.status = SearchStatus::Found;
            res.weight = w;
            return res;
        }
    }
    res.status = SearchStatus::LowerBoundOnly;
    res.weight = std::min(w_max, code.n) + 1;
    return res;
}

InputSyndrome input_syndrome(const CssCode& code, const BitVec& e, PauliType t) {
    if (e.size() != code.n) throw DimensionMismatch("error length differs from n");
    InputSyndrome s{BitVec(code.hx.rows()), BitVec(code.hz.rows())};
    if (t == PauliType::X) s.z_checks_lit = code.hz.mul(e);
    else s.x_checks_lit = code.hx.mul(e);
    return s;
}

BitVec exact_coset_decoder(const CssCode& code, const BitVec& syndrome, PauliType t, std::size_t budget) {
    const auto& h = code.detecting(t);
    if (syndrome.size() != h.rows()) throw DimensionMismatch("syndrome length differs from check count");
    if (syndrome.none()) return BitVec(code.n);
    BitVec particular;
    if (!solve(h, syndrome, particular))
        throw InvalidSyndrome("syndrome violates a meta-check of the input code");
    const auto cols = columns(h);
    std::size_t spent = 0;
    for (std::size_t w = 1; w <= code.n; ++w) {
        const auto count = binomial_saturating(code.n, w);
        if (count > budget - spent) break;
        spent += count;
        BitVec hit;
        for_each_combination(code.n, w, [&](const std::vector<std::size_t>& idx) {
            BitVec s(h.rows());
            for (auto i : idx) s ^= cols[i];
            if (s == syndrome) {
                hit = BitVec::from_support(code.n, idx);
                return false;
            }
            return true;
        });
        if (hit.size()) return hit;
    }
    throw BudgetExceeded("exact coset decoder exhausted its candidate budget");
}

BitVec exact_coset_decoder(const CssCode& code, const InputSyndrome& s, PauliType t) {
    return exact_coset_decoder(code, t == PauliType::X ? s.z_checks_lit : s.x_checks_lit, t);
}

InputDecoder default_input_decoder() {
    return [](const CssCode& code, const BitVec& s, PauliType t) { return exact_coset_decoder(code, s, t); };
}

std::size_t energy_penalty(const BitMatrix& hx, const BitMatrix& hz, const PauliError& e) {
    std::size_t lit = 0;
    if (hz.rows()) lit += hz.mul(e.x).weight();
    if (hx.rows()) lit += hx.mul(e.z).weight();
    return lit;
}

std::size_t energy_penalty(const CssCode& code, const PauliError& e) {
    return energy_penalty(code.hx, code.hz, e);
}

CssCode parse_css(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("empty code file");
    std::istringstream header(lines.front());
    std::string kn, kx, kz;
    long long n = -1, rx = -1, rz = -1;
    if (!(header >> kn >> n >> kx >> rx >> kz >> rz) || kn != "n" || kx != "xchecks" || kz != "zchecks" ||
        n < 0 || rx < 0 || rz < 0)
        throw ParseError("header must read: n <n> xchecks <rx> zchecks <rz>");
    if (lines.size() != static_cast<std::size_t>(1 + rx + rz))
        throw ParseError("expected " + std::to_string(rx + rz) + " check rows, found " +
                         std::to_string(lines.size() - 1));
    auto read_rows = [&](std::size_t first, std::size_t count) {
        BitMatrix m(0, static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < count; ++i) {
            std::string bits;
            for (char c : lines[first + i])
                if (!std::isspace(static_cast<unsigned char>(c))) bits.push_back(c);
            if (bits.size() != static_cast<std::size_t>(n))
                throw ParseError("check row " + std::to_string(first + i) + " has length " +
                                 std::to_string(bits.size()));
            try {
                m.append_row(BitVec::from_string(bits));
            } catch (const std::invalid_argument&) {
                throw ParseError("check rows may contain only 0 and 1");
            }
        }
        return m;
    };
    auto hx = read_rows(1, static_cast<std::size_t>(rx));
    auto hz = read_rows(1 + static_cast<std::size_t>(rx), static_cast<std::size_t>(rz));
    return validate_css(hx, hz);
}

CssCode load_css(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open code file: " + path);
    return parse_css(f);
}

std::string format_css(const CssCode& code) {
    std::ostringstream o;
    o << "n " << code.n << " xchecks " << code.hx.rows() << " zchecks " << code.hz.rows() << '\n';
    for (std::size_t r = 0; r < code.hx.rows(); ++r) o << code.hx.row(r).to_string() << '\n';
    for (std::size_t r = 0; r < code.hz.rows(); ++r) o << code.hz.row(r).to_string() << '\n';
    return o.str();
}

}  // namespace layercode
