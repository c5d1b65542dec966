#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "layercode/css.hpp"
#include "layercode/decoder.hpp"
#include "layercode/lattice.hpp"

namespace layercode {

/// splitmix64 finalizer; used to derive independent stream seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Platform-independent random source: mt19937_64 with explicit conversions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}
    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Exponential with the given rate.
    double exponential(double rate);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

enum class RateKind { Metropolis, Glauber };

struct RateModel {
    double beta = 1.0;
    RateKind kind = RateKind::Metropolis;
};

/// Jump rate for an energy change of omega lit checks. h(w) = e^{-beta w} h(-w), never above 1.
double rate(const RateModel& model, double omega);
double log_rate(const RateModel& model, double omega);

struct Move {
    std::size_t qubit = 0;
    PauliType type = PauliType::X;
};

/// Continuous-time Markov chain on Pauli frames of a commuting check Hamiltonian
/// under single-qubit X and Z flips, sampled with a rejection-free kinetic Monte Carlo.
class ThermalChain {
public:
    ThermalChain(const BitMatrix& hx, const BitMatrix& hz, RateModel model);

    const PauliError& state() const { return state_; }
    std::size_t energy() const { return energy_; }
    double total_rate() const;
    /// Energy change of applying a move in the current state.
    int omega(const Move& m) const;
    std::size_t num_moves() const { return 2 * n_; }

    /// Samples a waiting time and the next move, applies it, and returns both.
    std::pair<double, Move> step(Rng& rng);
    double wait(Rng& rng) const { return rng.exponential(total_rate()); }
    Move choose(Rng& rng) const;
    void apply(const Move& m);
    /// Energy recomputed from scratch.
    std::size_t recompute_energy() const;

private:
    int omega_of(std::size_t move) const;
    void place(std::size_t move);
    void unplace(std::size_t move);

    std::size_t n_ = 0;
    RateModel model_;
    std::vector<std::vector<std::size_t>> x_support_, z_support_;  // check -> qubits
    std::vector<std::vector<std::size_t>> qubit_x_, qubit_z_;      // qubit -> checks
    PauliError state_;
    std::vector<std::uint8_t> lit_x_, lit_z_;  // X-checks lit by Z frame, Z-checks lit by X frame
    std::size_t energy_ = 0;
    int max_degree_ = 0;
    // Moves bucketed by energy change; class index = omega + max_degree.
    std::vector<std::vector<std::size_t>> buckets_;
    std::vector<double> class_rate_;
    std::vector<std::size_t> pos_;
    std::vector<int> cls_;
};

struct Checkpoint {
    double time = 0;
    std::uint64_t failed_mask = 0;  ///< bit i: logical qubit i failed after decoding
    bool aborted = false;           ///< the decoder raised an error; counted as failure
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<double> event_times;
    std::vector<Move> events;
    std::vector<Checkpoint> checkpoints;
    std::size_t event_count = 0;
};

/// Geometric checkpoint schedule from t_first to t_max (inclusive), `count` points.
std::vector<double> geometric_schedule(double t_first, double t_max, std::size_t count);

struct TrajectoryOptions {
    bool record_events = false;
    std::size_t max_recorded_events = 100000;
    /// Replace the decoder by the identity (checkpoint success = frame itself is trivial).
    bool identity_decoder = false;
    DecoderOptions decoder;
};

/// Runs from the zero frame; at each checkpoint clones and decodes the frame.
Trajectory run_trajectory(const LayerLattice& lat, const RateModel& model, const std::vector<double>& checkpoints,
                          std::uint64_t seed, const TrajectoryOptions& opt = {});

struct MemoryExperiment {
    std::vector<double> betas;
    double t_max = 100;
    std::vector<double> checkpoints;
    std::size_t trajectories = 30;
    std::size_t min_trajectories = 30;
    std::uint64_t master_seed = 1;
    std::size_t threads = 1;
    std::size_t bootstrap_samples = 1000;
    double confidence = 0.90;
    RateKind rate_kind = RateKind::Metropolis;
    TrajectoryOptions trajectory;
};

struct MemoryCell;
using CellCallback = std::function<void(const MemoryCell&)>;

struct MemoryCell {
    double beta = 0;
    int L = 0;
    std::vector<double> times;
    std::vector<double> failure_fraction;  ///< empirical ε̂(t) at each checkpoint
    std::optional<double> t_mem;           ///< empty when censored
    bool censored = false;
    double ci_low = 0, ci_high = 0;        ///< bootstrap interval; high = +inf when resamples censor
    std::vector<Trajectory> runs;
};

/// T̂_mem = first checkpoint where the any-logical failure fraction exceeds 1/2, with a bootstrap interval.
/// `on_cell` runs after each beta completes, in grid order.
std::vector<MemoryCell> estimate_memory_time(const LayerLattice& lat, const MemoryExperiment& exp,
                                             const CellCallback& on_cell = {});

/// First-crossing time of a failure-indicator matrix [trajectory][checkpoint]; nullopt when censored.
std::optional<double> first_crossing(const std::vector<double>& times, const std::vector<std::vector<bool>>& failed,
                                     const std::vector<std::size_t>& rows);

}  // namespace layercode
