#include "layercode/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "layercode/errors.hpp"
#include "layercode/parallel.hpp"

namespace layercode {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix_seed(master);
    for (auto v : {a, b, c}) h = mix_seed(h ^ mix_seed(v + 0x632be59bd9b4e019ULL));
    return h;
}

double Rng::exponential(double rate) {
    if (!(rate > 0)) throw SamplerStuck("exponential waiting time with non-positive rate");
    return -std::log1p(-uniform()) / rate;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw DimensionMismatch("empty range");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const auto x = engine_();
        if (x >= threshold) return x % n;
    }
}

double rate(const RateModel& model, double omega) { return std::exp(log_rate(model, omega)); }

double log_rate(const RateModel& model, double omega) {
    const double bw = model.beta * omega;
    if (model.kind == RateKind::Metropolis) return bw > 0 ? -bw : 0.0;
    // Glauber: 1 / (1 + e^{bw}), evaluated without overflow.
    return bw > 0 ? -bw - std::log1p(std::exp(-bw)) : -std::log1p(std::exp(bw));
}

ThermalChain::ThermalChain(const BitMatrix& hx, const BitMatrix& hz, RateModel model)
    : n_(hx.cols()), model_(model), state_(hx.cols()) {
    if (hz.cols() != n_) throw DimensionMismatch("check matrices act on different qubit counts");
    x_support_ = hx.sparse_rows();
    z_support_ = hz.sparse_rows();
    qubit_x_.assign(n_, {});
    qubit_z_.assign(n_, {});
    for (std::size_t c = 0; c < x_support_.size(); ++c)
        for (auto q : x_support_[c]) qubit_x_[q].push_back(c);
    for (std::size_t c = 0; c < z_support_.size(); ++c)
        for (auto q : z_support_[c]) qubit_z_[q].push_back(c);
    lit_x_.assign(x_support_.size(), 0);
    lit_z_.assign(z_support_.size(), 0);
    for (std::size_t q = 0; q < n_; ++q)
        max_degree_ = std::max({max_degree_, static_cast<int>(qubit_x_[q].size()), static_cast<int>(qubit_z_[q].size())});
    const int classes = 2 * max_degree_ + 1;
    buckets_.assign(classes, {});
    class_rate_.resize(classes);
    for (int i = 0; i < classes; ++i) class_rate_[i] = rate(model_, i - max_degree_);
    pos_.assign(2 * n_, 0);
    cls_.assign(2 * n_, 0);
    for (std::size_t m = 0; m < 2 * n_; ++m) {
        cls_[m] = omega_of(m) + max_degree_;
        place(m);
    }
}

int ThermalChain::omega_of(std::size_t m) const {
    const auto q = m / 2;
    const bool z = m & 1;
    const auto& checks = z ? qubit_x_[q] : qubit_z_[q];
    const auto& lit = z ? lit_x_ : lit_z_;
    int w = 0;
    for (auto c : checks) w += lit[c] ? -1 : 1;
    return w;
}

int ThermalChain::omega(const Move& m) const {
    if (m.qubit >= n_) throw DimensionMismatch("move on a missing qubit");
    return omega_of(2 * m.qubit + (m.type == PauliType::Z));
}

void ThermalChain::place(std::size_t m) {
    auto& b = buckets_[cls_[m]];
    pos_[m] = b.size();
    b.push_back(m);
}

void ThermalChain::unplace(std::size_t m) {
    auto& b = buckets_[cls_[m]];
    const auto last = b.back();
    b[pos_[m]] = last;
    pos_[last] = pos_[m];
    b.pop_back();
}

double ThermalChain::total_rate() const {
    double r = 0;
    for (std::size_t i = 0; i < buckets_.size(); ++i) r += static_cast<double>(buckets_[i].size()) * class_rate_[i];
    return r;
}

Move ThermalChain::choose(Rng& rng) const {
    double u = rng.uniform() * total_rate();
    std::size_t pick = buckets_.size();
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (buckets_[i].empty()) continue;
        pick = i;
        const double mass = static_cast<double>(buckets_[i].size()) * class_rate_[i];
        if (u < mass) break;
        u -= mass;
    }
    if (pick == buckets_.size()) throw SamplerStuck("no move has positive rate");
    const auto m = buckets_[pick][rng.below(buckets_[pick].size())];
    return {m / 2, (m & 1) ? PauliType::Z : PauliType::X};
}

void ThermalChain::apply(const Move& mv) {
    if (mv.qubit >= n_) throw DimensionMismatch("move on a missing qubit");
    const bool z = mv.type == PauliType::Z;
    state_.part(mv.type).flip(mv.qubit);
    const auto& checks = z ? qubit_x_[mv.qubit] : qubit_z_[mv.qubit];
    auto& lit = z ? lit_x_ : lit_z_;
    const auto& support = z ? x_support_ : z_support_;
    for (auto c : checks) {
        lit[c] ^= 1;
        if (lit[c]) ++energy_;
        else --energy_;
    }
    for (auto c : checks)
        for (auto q : support[c]) {
            const auto m = 2 * q + (z ? 1 : 0);
            const int nc = omega_of(m) + max_degree_;
            if (nc == cls_[m]) continue;
            unplace(m);
            cls_[m] = nc;
            place(m);
        }
}

std::pair<double, Move> ThermalChain::step(Rng& rng) {
    const double dt = wait(rng);
    const auto m = choose(rng);
    apply(m);
    return {dt, m};
}

std::size_t ThermalChain::recompute_energy() const {
    std::size_t e = 0;
    for (const auto& s : x_support_) {
        bool par = false;
        for (auto q : s) par ^= state_.z.get(q);
        e += par;
    }
    for (const auto& s : z_support_) {
        bool par = false;
        for (auto q : s) par ^= state_.x.get(q);
        e += par;
    }
    return e;
}

std::vector<double> geometric_schedule(double t_first, double t_max, std::size_t count) {
    if (!(t_first > 0) || !(t_max >= t_first) || count == 0) throw ParseError("bad checkpoint schedule");
    if (count == 1) return {t_max};
    std::vector<double> out(count);
    const double r = std::log(t_max / t_first) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = t_first * std::exp(r * static_cast<double>(i));
    out.back() = t_max;
    return out;
}

namespace {

Checkpoint evaluate(const LayerLattice& lat, const ThermalChain& chain, double t, const TrajectoryOptions& opt) {
    if (chain.energy() != chain.recompute_energy())
        throw InternalInconsistency("incremental energy differs from the recomputed energy");
    Checkpoint cp;
    cp.time = t;
    const auto& frame = chain.state();
    if (opt.identity_decoder) {
        cp.failed_mask = logical_failure_mask(lat, frame);
        return cp;
    }
    try {
        PauliError er = frame;
        er ^= decode(lat, extract_syndrome(lat, frame), opt.decoder);
        cp.failed_mask = logical_failure_mask(lat, er);
    } catch (const Error&) {
        cp.aborted = true;
        cp.failed_mask = lat.k() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lat.k()) - 1;
    }
    return cp;
}

}  // namespace

Trajectory run_trajectory(const LayerLattice& lat, const RateModel& model, const std::vector<double>& checkpoints,
                          std::uint64_t seed, const TrajectoryOptions& opt) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw ParseError("checkpoints must be increasing");
    Trajectory tr;
    tr.seed = seed;
    Rng rng(seed);
    ThermalChain chain(lat.hx, lat.hz, model);
    double t = 0;
    std::size_t next = 0;
    while (next < checkpoints.size()) {
        const double dt = chain.wait(rng);
        // The frame is constant until the next event, so checkpoints before it see the current state.
        while (next < checkpoints.size() && checkpoints[next] < t + dt) {
            tr.checkpoints.push_back(evaluate(lat, chain, checkpoints[next], opt));
            ++next;
        }
        if (next == checkpoints.size()) break;
        t += dt;
        const auto mv = chain.choose(rng);
        chain.apply(mv);
        ++tr.event_count;
        if (opt.record_events && tr.events.size() < opt.max_recorded_events) {
            tr.events.push_back(mv);
            tr.event_times.push_back(t);
        }
    }
    return tr;
}

std::optional<double> first_crossing(const std::vector<double>& times, const std::vector<std::vector<bool>>& failed,
                                     const std::vector<std::size_t>& rows) {
    if (rows.empty()) return std::nullopt;
    for (std::size_t c = 0; c < times.size(); ++c) {
        std::size_t f = 0;
        for (auto r : rows) f += failed[r][c];
        if (2 * f > rows.size()) return times[c];
    }
    return std::nullopt;
}

std::vector<MemoryCell> estimate_memory_time(const LayerLattice& lat, const MemoryExperiment& exp,
                                             const CellCallback& on_cell) {
    if (exp.trajectories < exp.min_trajectories)
        throw ParseError("trajectories per cell below the minimum of " + std::to_string(exp.min_trajectories));
    if (exp.checkpoints.empty()) throw ParseError("no checkpoints");
    if (!(exp.confidence > 0 && exp.confidence < 1)) throw ParseError("confidence must lie in (0, 1)");
    std::vector<MemoryCell> cells;
    for (std::size_t bi = 0; bi < exp.betas.size(); ++bi) {
        MemoryCell cell;
        cell.beta = exp.betas[bi];
        cell.L = lat.linear_size;
        cell.times = exp.checkpoints;
        const RateModel model{cell.beta, exp.rate_kind};
        cell.runs.resize(exp.trajectories);
        parallel_for(exp.trajectories, exp.threads, [&](std::size_t j) {
            cell.runs[j] = run_trajectory(lat, model, exp.checkpoints, derive_seed(exp.master_seed, bi, j), exp.trajectory);
        });
        std::vector<std::vector<bool>> failed(exp.trajectories, std::vector<bool>(cell.times.size()));
        cell.failure_fraction.assign(cell.times.size(), 0.0);
        for (std::size_t j = 0; j < exp.trajectories; ++j)
            for (std::size_t c = 0; c < cell.times.size(); ++c) {
                const auto& cp = cell.runs[j].checkpoints[c];
                failed[j][c] = cp.aborted || cp.failed_mask != 0;
                cell.failure_fraction[c] += failed[j][c];
            }
        for (auto& f : cell.failure_fraction) f /= static_cast<double>(exp.trajectories);

        std::vector<std::size_t> all(exp.trajectories);
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
        cell.t_mem = first_crossing(cell.times, failed, all);
        cell.censored = !cell.t_mem;

        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> boot;
        Rng rng(derive_seed(exp.master_seed, bi, ~std::uint64_t{0}));
        std::vector<std::size_t> rows(exp.trajectories);
        for (std::size_t b = 0; b < exp.bootstrap_samples; ++b) {
            for (auto& r : rows) r = rng.below(exp.trajectories);
            boot.push_back(first_crossing(cell.times, failed, rows).value_or(inf));
        }
        std::sort(boot.begin(), boot.end());
        if (!boot.empty()) {
            const double lo = (1 - exp.confidence) / 2, hi = 1 - lo;
            const auto at = [&](double p) {
                auto i = static_cast<std::size_t>(std::floor(p * static_cast<double>(boot.size() - 1)));
                return boot[std::min(i, boot.size() - 1)];
            };
            cell.ci_low = at(lo);
            cell.ci_high = at(hi);
        }
        if (on_cell) on_cell(cell);
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace layercode
