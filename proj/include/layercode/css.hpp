#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "layercode/gf2.hpp"

namespace layercode {

enum class PauliType { X, Z };

inline PauliType dual(PauliType t) { return t == PauliType::X ? PauliType::Z : PauliType::X; }
inline char to_char(PauliType t) { return t == PauliType::X ? 'X' : 'Z'; }

/// Pauli frame: X and Z supports over the same qubit set.
struct PauliError {
    BitVec x;
    BitVec z;

    PauliError() = default;
    explicit PauliError(std::size_t n) : x(n), z(n) {}

    std::size_t size() const { return x.size(); }
    BitVec& part(PauliType t) { return t == PauliType::X ? x : z; }
    const BitVec& part(PauliType t) const { return t == PauliType::X ? x : z; }
    PauliError& operator^=(const PauliError& o) {
        x ^= o.x;
        z ^= o.z;
        return *this;
    }
    bool operator==(const PauliError&) const = default;
};

struct CssCode {
    std::size_t n = 0;
    BitMatrix hx;
    BitMatrix hz;
    std::size_t k = 0;
    /// Symplectic-paired basis: logicals_x[i]·logicals_z[j] = δ_ij.
    std::vector<BitVec> logicals_x;
    std::vector<BitVec> logicals_z;
    std::size_t w = 0;        ///< max check weight over both types
    std::size_t w_prime = 0;  ///< max qubit degree over both types

    /// Check matrix that detects errors of type `t` (hz for X errors).
    const BitMatrix& detecting(PauliType t) const { return t == PauliType::X ? hz : hx; }
    /// Check matrix whose rows are stabilizers of type `t`.
    const BitMatrix& stabilizers(PauliType t) const { return t == PauliType::X ? hx : hz; }
    const std::vector<BitVec>& logicals(PauliType t) const {
        return t == PauliType::X ? logicals_x : logicals_z;
    }
};

struct InputSyndrome {
    BitVec x_checks_lit;
    BitVec z_checks_lit;
};

/// Validates commutation, computes k and a symplectic logical basis.
CssCode validate_css(const BitMatrix& hx, const BitMatrix& hz);

/// Symplectic Gram-Schmidt over GF(2). Returns paired logicals for a stabilizer
/// group given by (stab_x, stab_z) with the given kernels of the opposite checks.
void symplectic_basis(const BitMatrix& stab_x, const BitMatrix& stab_z,
                      const std::vector<BitVec>& ker_hz, const std::vector<BitVec>& ker_hx,
                      std::vector<BitVec>& out_x, std::vector<BitVec>& out_z);

enum class SearchStatus { Found, LowerBoundOnly, NoLogicals };

struct MinWeightResult {
    SearchStatus status = SearchStatus::NoLogicals;
    /// Exact weight when Found; otherwise a strict lower bound (all weights up to it excluded).
    std::size_t weight = 0;
    BitVec witness;
};

/// Exhaustive minimum-weight nontrivial logical of type `t`, up to weight `w_max`.
/// Throws BudgetExceeded when the candidate count exceeds `budget` before any weight class completes.
MinWeightResult min_weight_logical(const CssCode& code, PauliType t, std::size_t w_max,
                                   std::size_t budget = std::size_t{1} << 24);

InputSyndrome input_syndrome(const CssCode& code, const BitVec& e, PauliType t);

/// Minimum-weight error of type `t` reproducing the syndrome; among ties the
/// lexicographically smallest support. Throws InvalidSyndrome for unreachable syndromes.
BitVec exact_coset_decoder(const CssCode& code, const BitVec& syndrome, PauliType t,
                           std::size_t budget = std::size_t{1} << 24);
BitVec exact_coset_decoder(const CssCode& code, const InputSyndrome& s, PauliType t);

/// Decoder for the input code used at the parity stage of the layer decoder.
using InputDecoder = std::function<BitVec(const CssCode&, const BitVec& syndrome, PauliType)>;
InputDecoder default_input_decoder();

/// Number of lit checks of both types.
std::size_t energy_penalty(const BitMatrix& hx, const BitMatrix& hz, const PauliError& e);
std::size_t energy_penalty(const CssCode& code, const PauliError& e);

/// Text format: `n <n> xchecks <rx> zchecks <rz>` then rx + rz rows of 0/1.
CssCode parse_css(std::istream& in);
CssCode load_css(const std::string& path);
std::string format_css(const CssCode& code);

/// Visits every w-subset of {0..n-1} in lexicographic order; stops when `fn` returns false.
/// Returns the number of subsets visited.
std::size_t for_each_combination(std::size_t n, std::size_t w,
                                 const std::function<bool(const std::vector<std::size_t>&)>& fn);

/// Binomial coefficient saturating at SIZE_MAX.
std::size_t binomial_saturating(std::size_t n, std::size_t k);

}  // namespace layercode
