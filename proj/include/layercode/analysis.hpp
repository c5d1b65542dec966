#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "layercode/css.hpp"
#include "layercode/decoder.hpp"
#include "layercode/lattice.hpp"
#include "layercode/thermal.hpp"

namespace layercode {

// ---- energy barrier -------------------------------------------------------

enum class BarrierMode { Exhaustive, Beam };

struct BarrierOptions {
    BarrierMode mode = BarrierMode::Exhaustive;
    /// Logical class to reach, as a bitmask over the paired basis; empty means any nontrivial class.
    std::optional<std::uint64_t> target_class;
    std::size_t state_budget = std::size_t{1} << 22;
    std::size_t beam_width = 64;
    /// Beam mode orders the qubits of this representative; defaults to the basis logical of the target.
    std::optional<BitVec> representative;
};

struct BarrierSearchResult {
    PauliType type = PauliType::X;
    std::uint64_t target_class = 0;
    std::vector<std::size_t> path;  ///< qubits flipped in order
    std::size_t barrier = 0;        ///< max penalty over prefixes of `path`
    bool exhaustive = false;        ///< false: `barrier` is only an upper bound
    std::size_t states_visited = 0;
};

/// Minimum over single-qubit flip sequences of type `t` reaching a nontrivial logical of the
/// maximum intermediate penalty. `detecting` lights on errors of type t; `dual_logicals` pair with them.
BarrierSearchResult energy_barrier_search(const BitMatrix& detecting, const std::vector<BitVec>& type_logicals,
                                          const std::vector<BitVec>& dual_logicals, PauliType t,
                                          const BarrierOptions& opt = {});
BarrierSearchResult energy_barrier_search(const CssCode& code, PauliType t, const BarrierOptions& opt = {});
BarrierSearchResult energy_barrier_search(const LayerLattice& lat, PauliType t, const BarrierOptions& opt = {});

/// Error obtained by applying the first `prefix` flips of a path.
BitVec replay_path(std::size_t n, const std::vector<std::size_t>& path, std::size_t prefix);

// ---- decoder barrier and distance ------------------------------------------

struct BarrierTestOptions {
    std::size_t penalty_budget = 0;
    std::size_t samples = 1000;
    std::size_t walk_length = 64;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    DecoderOptions decoder;
};

struct BarrierTestResult {
    std::size_t samples = 0;
    std::size_t successes = 0;
    double success_fraction() const { return samples ? double(successes) / double(samples) : 1.0; }
    /// Flip sequences whose endpoint was not recovered, as "X 12" / "Z 40" tokens.
    std::vector<std::vector<std::string>> failing_walks;
};

/// Random single-flip walks (X and Z) whose energy penalty never exceeds the budget; each endpoint is decoded.
/// Throws SamplerStuck when a walk cannot be extended within the budget.
BarrierTestResult decoder_barrier_test(const LayerLattice& lat, const BarrierTestOptions& opt);

struct WeightClassResult {
    std::size_t weight = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    bool exhaustive = false;
    bool budget_exceeded = false;
};

struct DistanceOptions {
    std::size_t max_weight = 2;
    /// Exhaustive enumeration is used while C(n, w) per type stays within this many decodes.
    std::size_t enumeration_budget = 500000;
    std::size_t samples = 2000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::vector<PauliType> types{PauliType::X, PauliType::Z};
    DecoderOptions decoder;
};

struct DistanceReport {
    std::vector<WeightClassResult> curve;
    /// Largest w such that every weight up to w was exhaustively enumerated with full success.
    std::size_t guaranteed_weight = 0;
};

DistanceReport distance_fraction_test(const LayerLattice& lat, const DistanceOptions& opt);

/// True when a single pure-type error is recovered up to stabilizers.
bool corrects(const LayerLattice& lat, const BitVec& support, PauliType t, const DecoderOptions& opt);

// ---- bounds ----------------------------------------------------------------

struct BoundParams {
    double a = 0.5;
    double beta = 1;
    double m = 1;  ///< decoder energy barrier
    double k = 1;
    double N = 1;  ///< check count
    double L = 1;
    double r = 0;  ///< k = rL
    double c = 1;  ///< m = cL
    double v = 1;  ///< N <= v L^3
};

void validate(const BoundParams& p);

struct EpsilonBound {
    double closed_form_log = 0;     ///< log[tN 2^k e^{-a beta m} (1 + e^{-(1-a) beta})^N]
    double scaling_log = 0;  ///< log[t e^{-(a c beta - r log 2) L + 3 log L}]
    bool up_to_constant = true;
};

/// Log-domain bound values; t = 0 gives -inf (bound 0).
EpsilonBound epsilon_bound(const BoundParams& p, double t);

/// log[tN 2^k sum_{n >= m} C(N, n) e^{-beta n}], exact for integer N and m.
double binomial_tail_log(const BoundParams& p, double t);

struct TmemBound {
    double general_log = 0;         ///< a beta m - k log 2 - 3 log L
    double scaling_log = 0;         ///< (a c beta - r log 2) L - 3 log L
    double lstar_conservative = 0;  ///< e^{(1-a) beta / 3}
    double lstar_refined = 0;       ///< sqrt(a c beta / v) e^{(1-a) beta / 2}
    double tmem_star_conservative_log = 0;  ///< a c beta e^{(1-a) beta / 3}
    double tmem_star_refined_log = 0;       ///< sqrt((a c)^3 / v) beta^{3/2} e^{(1-a) beta / 2}
    bool large_beta_simplified = true;
};

TmemBound tmem_bound(const BoundParams& p);

struct BarrierConstantReport {
    std::size_t w = 0, w_prime = 0;
    double fraction = 0;  ///< 4 / (w w')
    std::string barrier_form;
};

BarrierConstantReport barrier_constant_report(const CssCode& code);

/// CSV header and one row per parameter point for the bound sweep.
void write_bounds_csv(std::ostream& out, const std::vector<std::pair<BoundParams, double>>& rows);

}  // namespace layercode
