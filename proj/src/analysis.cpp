#include "layercode/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "layercode/errors.hpp"
#include "layercode/parallel.hpp"

namespace layercode {

namespace {

struct FlipTables {
    std::vector<std::vector<std::size_t>> cols;  // qubit -> lit checks
    std::vector<std::uint64_t> pairing;          // qubit -> logical-class bits
};

FlipTables flip_tables(const BitMatrix& detecting, const std::vector<BitVec>& dual_logicals) {
    if (dual_logicals.size() > 64) throw DimensionMismatch("barrier search supports at most 64 logical qubits");
    FlipTables f;
    f.cols = detecting.transpose().sparse_rows();
    f.pairing.assign(detecting.cols(), 0);
    for (std::size_t i = 0; i < dual_logicals.size(); ++i)
        for (auto q : dual_logicals[i].support()) f.pairing[q] |= std::uint64_t{1} << i;
    return f;
}

// Sorted symmetric difference.
std::vector<std::uint32_t> toggle(const std::vector<std::uint32_t>& s, const std::vector<std::size_t>& col) {
    std::vector<std::uint32_t> out;
    out.reserve(s.size() + col.size());
    std::size_t i = 0, j = 0;
    while (i < s.size() || j < col.size()) {
        if (j == col.size() || (i < s.size() && s[i] < col[j])) out.push_back(s[i++]);
        else if (i == s.size() || col[j] < s[i]) out.push_back(static_cast<std::uint32_t>(col[j++]));
        else ++i, ++j;
    }
    return out;
}

std::string state_key(const std::vector<std::uint32_t>& s, std::uint64_t cls) {
    std::string k(sizeof cls + 4 * s.size(), '\0');
    std::memcpy(k.data(), &cls, sizeof cls);
    if (!s.empty()) std::memcpy(k.data() + sizeof cls, s.data(), 4 * s.size());
    return k;
}

bool target_hit(std::uint64_t cls, const BarrierOptions& opt) {
    return opt.target_class ? cls == *opt.target_class : cls != 0;
}

BarrierSearchResult exhaustive_search(const FlipTables& f, PauliType t, const BarrierOptions& opt) {
    struct Node {
        std::vector<std::uint32_t> syn;
        std::uint64_t cls;
        std::size_t cost;
        std::size_t parent;
        std::size_t qubit;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> buckets(1);
    std::vector<bool> done;
    nodes.push_back({{}, 0, 0, SIZE_MAX, 0});
    index.emplace(state_key({}, 0), 0);
    buckets[0].push_back(0);
    done.push_back(false);
    const std::size_t n = f.cols.size();

    for (std::size_t b = 0; b < buckets.size(); ++b) {
        for (std::size_t bi = 0; bi < buckets[b].size(); ++bi) {
            const auto id = buckets[b][bi];
            if (done[id] || nodes[id].cost != b) continue;
            done[id] = true;
            if (nodes[id].syn.empty() && target_hit(nodes[id].cls, opt)) {
                BarrierSearchResult res;
                res.type = t;
                res.target_class = nodes[id].cls;
                res.barrier = b;
                res.exhaustive = true;
                res.states_visited = nodes.size();
                for (auto v = id; nodes[v].parent != SIZE_MAX; v = nodes[v].parent) res.path.push_back(nodes[v].qubit);
                std::reverse(res.path.begin(), res.path.end());
                return res;
            }
            for (std::size_t q = 0; q < n; ++q) {
                auto syn = toggle(nodes[id].syn, f.cols[q]);
                const auto cls = nodes[id].cls ^ f.pairing[q];
                const auto cost = std::max(b, syn.size());
                auto key = state_key(syn, cls);
                auto it = index.find(key);
                if (it != index.end()) {
                    auto& other = nodes[it->second];
                    if (done[it->second] || other.cost <= cost) continue;
                    other.cost = cost;
                    other.parent = id;
                    other.qubit = q;
                    buckets[cost].push_back(it->second);
                    continue;
                }
                if (nodes.size() >= opt.state_budget)
                    throw BudgetExceeded("barrier search exceeded " + std::to_string(opt.state_budget) +
                                         " states at penalty " + std::to_string(b));
                index.emplace(std::move(key), nodes.size());
                if (buckets.size() <= cost) buckets.resize(cost + 1);
                buckets[cost].push_back(nodes.size());
                nodes.push_back({std::move(syn), cls, cost, id, q});
                done.push_back(false);
            }
        }
    }
    throw BudgetExceeded("no nontrivial logical class is reachable");
}

BarrierSearchResult beam_search(const FlipTables& f, PauliType t, const BitVec& rep, const BarrierOptions& opt) {
    const auto support = rep.support();
    std::uint64_t cls = 0;
    std::vector<std::uint32_t> end;
    for (auto q : support) {
        cls ^= f.pairing[q];
        end = toggle(end, f.cols[q]);
    }
    if (!end.empty()) throw NonCodeOperator("beam representative has a nonzero syndrome");
    if (!target_hit(cls, opt)) throw NonCodeOperator("beam representative is not in the target class");

    struct Beam {
        std::vector<bool> used;
        std::vector<std::uint32_t> syn;
        std::size_t cost = 0;
        std::vector<std::size_t> path;
    };
    std::vector<Beam> beam(1);
    beam[0].used.assign(support.size(), false);
    std::size_t visited = 0;
    for (std::size_t depth = 0; depth < support.size(); ++depth) {
        std::vector<Beam> next;
        std::unordered_map<std::vector<bool>, std::size_t> seen;
        for (const auto& s : beam)
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (s.used[i]) continue;
                Beam c;
                c.used = s.used;
                c.used[i] = true;
                c.syn = toggle(s.syn, f.cols[support[i]]);
                c.cost = std::max(s.cost, c.syn.size());
                ++visited;
                auto it = seen.find(c.used);
                if (it != seen.end()) {
                    if (next[it->second].cost <= c.cost) continue;
                    c.path = s.path;
                    c.path.push_back(support[i]);
                    next[it->second] = std::move(c);
                    continue;
                }
                c.path = s.path;
                c.path.push_back(support[i]);
                seen.emplace(c.used, next.size());
                next.push_back(std::move(c));
            }
        std::stable_sort(next.begin(), next.end(), [](const Beam& x, const Beam& y) {
            return x.cost != y.cost ? x.cost < y.cost : x.syn.size() < y.syn.size();
        });
        if (next.size() > opt.beam_width) next.resize(opt.beam_width);
        beam = std::move(next);
    }
    BarrierSearchResult res;
    res.type = t;
    res.target_class = cls;
    res.barrier = beam.front().cost;
    res.path = beam.front().path;
    res.exhaustive = false;
    res.states_visited = visited;
    return res;
}

}  // namespace

BarrierSearchResult energy_barrier_search(const BitMatrix& detecting, const std::vector<BitVec>& type_logicals,
                                          const std::vector<BitVec>& dual_logicals, PauliType t,
                                          const BarrierOptions& opt) {
    const auto f = flip_tables(detecting, dual_logicals);
    if (dual_logicals.empty()) throw NonCodeOperator("no logical qubits: the barrier is undefined");
    if (opt.mode == BarrierMode::Exhaustive) return exhaustive_search(f, t, opt);
    BitVec rep;
    if (opt.representative) {
        rep = *opt.representative;
    } else {
        const std::uint64_t cls = opt.target_class.value_or(1);
        rep = BitVec(detecting.cols());
        for (std::size_t i = 0; i < type_logicals.size(); ++i)
            if (cls >> i & 1) rep ^= type_logicals[i];
    }
    return beam_search(f, t, rep, opt);
}

BarrierSearchResult energy_barrier_search(const CssCode& code, PauliType t, const BarrierOptions& opt) {
    return energy_barrier_search(code.detecting(t), code.logicals(t), code.logicals(dual(t)), t, opt);
}

BarrierSearchResult energy_barrier_search(const LayerLattice& lat, PauliType t, const BarrierOptions& opt) {
    return energy_barrier_search(lat.detecting(t), lat.logicals(t), lat.logicals(dual(t)), t, opt);
}

BitVec replay_path(std::size_t n, const std::vector<std::size_t>& path, std::size_t prefix) {
    BitVec e(n);
    for (std::size_t i = 0; i < std::min(prefix, path.size()); ++i) e.flip(path[i]);
    return e;
}

bool corrects(const LayerLattice& lat, const BitVec& support, PauliType t, const DecoderOptions& opt) {
    PauliError e(lat.num_qubits());
    e.part(t) = support;
    try {
        e.part(t) ^= decode_type(lat, extract_syndrome(lat, e), t, opt).correction;
    } catch (const Error&) {
        return false;
    }
    return extract_syndrome(lat, e).empty() && logical_failure_mask(lat, e) == 0;
}

BarrierTestResult decoder_barrier_test(const LayerLattice& lat, const BarrierTestOptions& opt) {
    struct Outcome {
        bool ok = true;
        std::vector<std::string> walk;
    };
    std::vector<Outcome> out(opt.samples);
    parallel_for(opt.samples, opt.threads, [&](std::size_t s) {
        Rng rng(derive_seed(opt.seed, s));
        ThermalChain chain(lat.hx, lat.hz, {});
        std::vector<Move> allowed;
        std::vector<std::string> walk;
        for (std::size_t step = 0; step < opt.walk_length; ++step) {
            allowed.clear();
            for (std::size_t q = 0; q < lat.num_qubits(); ++q)
                for (auto t : {PauliType::X, PauliType::Z}) {
                    const long e = static_cast<long>(chain.energy()) + chain.omega({q, t});
                    if (e <= static_cast<long>(opt.penalty_budget)) allowed.push_back({q, t});
                }
            if (allowed.empty())
                throw SamplerStuck("no single flip keeps the penalty within " + std::to_string(opt.penalty_budget));
            const auto mv = allowed[rng.below(allowed.size())];
            chain.apply(mv);
            walk.push_back(std::string(1, to_char(mv.type)) + " " + std::to_string(mv.qubit));
        }
        PauliError er = chain.state();
        bool ok = true;
        try {
            er ^= decode(lat, extract_syndrome(lat, er), opt.decoder);
            ok = extract_syndrome(lat, er).empty() && logical_failure_mask(lat, er) == 0;
        } catch (const Error&) {
            ok = false;
        }
        out[s].ok = ok;
        if (!ok) out[s].walk = std::move(walk);
    });
    BarrierTestResult res;
    res.samples = opt.samples;
    for (auto& o : out) {
        if (o.ok) ++res.successes;
        else res.failing_walks.push_back(std::move(o.walk));
    }
    return res;
}

DistanceReport distance_fraction_test(const LayerLattice& lat, const DistanceOptions& opt) {
    DistanceReport rep;
    const std::size_t n = lat.num_qubits();
    bool guaranteed = true;
    for (std::size_t w = 0; w <= opt.max_weight; ++w) {
        WeightClassResult wc;
        wc.weight = w;
        const auto count = binomial_saturating(n, w);
        wc.exhaustive = count <= opt.enumeration_budget;
        wc.budget_exceeded = !wc.exhaustive;
        for (std::size_t ti = 0; ti < opt.types.size(); ++ti) {
            const auto t = opt.types[ti];
            std::vector<std::vector<std::size_t>> supports;
            if (wc.exhaustive) {
                supports.reserve(count);
                for_each_combination(n, w, [&](const std::vector<std::size_t>& c) {
                    supports.push_back(c);
                    return true;
                });
            } else {
                Rng rng(derive_seed(opt.seed, w, ti));
                for (std::size_t s = 0; s < opt.samples; ++s) {
                    std::vector<std::size_t> c;
                    while (c.size() < w) {
                        const auto q = rng.below(n);
                        if (std::find(c.begin(), c.end(), q) == c.end()) c.push_back(q);
                    }
                    supports.push_back(std::move(c));
                }
            }
            std::vector<char> ok(supports.size(), 0);
            parallel_for(supports.size(), opt.threads, [&](std::size_t i) {
                BitVec e(n);
                for (auto q : supports[i]) e.set(q);
                ok[i] = corrects(lat, e, t, opt.decoder);
            });
            wc.trials += supports.size();
            for (auto v : ok) wc.successes += v;
        }
        if (!(wc.exhaustive && wc.successes == wc.trials)) guaranteed = false;
        if (guaranteed) rep.guaranteed_weight = w;
        rep.curve.push_back(wc);
    }
    return rep;
}

void validate(const BoundParams& p) {
    if (!(p.a > 0 && p.a < 1)) throw ParseError("a must lie in (0, 1)");
    if (!(p.beta >= 0)) throw ParseError("beta must be non-negative");
    for (double x : {p.m, p.k, p.N, p.L, p.c, p.v})
        if (!(x > 0)) throw ParseError("bound parameters m, k, N, L, c, v must be positive");
    if (!(p.r >= 0)) throw ParseError("r must be non-negative");
}

EpsilonBound epsilon_bound(const BoundParams& p, double t) {
    validate(p);
    if (t < 0) throw ParseError("t must be non-negative");
    EpsilonBound b;
    const double lt = t == 0 ? -std::numeric_limits<double>::infinity() : std::log(t);
    b.closed_form_log = lt + std::log(p.N) + p.k * std::log(2.0) - p.a * p.beta * p.m +
                 p.N * std::log1p(std::exp(-(1 - p.a) * p.beta));
    b.scaling_log = lt - (p.a * p.c * p.beta - p.r * std::log(2.0)) * p.L + 3 * std::log(p.L);
    return b;
}

double binomial_tail_log(const BoundParams& p, double t) {
    validate(p);
    const auto N = static_cast<long>(std::llround(p.N));
    const auto m = static_cast<long>(std::ceil(p.m));
    if (std::abs(p.N - double(N)) > 1e-12) throw ParseError("the exact tail needs an integer N");
    if (t == 0 || m > N) return -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (long n = m; n <= N; ++n)
        terms.push_back(std::lgamma(double(N) + 1) - std::lgamma(double(n) + 1) - std::lgamma(double(N - n) + 1) -
                        p.beta * double(n));
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0;
    for (double x : terms) acc += std::exp(x - top);
    return std::log(t) + std::log(p.N) + p.k * std::log(2.0) + top + std::log(acc);
}

TmemBound tmem_bound(const BoundParams& p) {
    validate(p);
    TmemBound b;
    const double ac = p.a * p.c, g = (1 - p.a) * p.beta;
    b.general_log = p.a * p.beta * p.m - p.k * std::log(2.0) - 3 * std::log(p.L);
    b.scaling_log = (ac * p.beta - p.r * std::log(2.0)) * p.L - 3 * std::log(p.L);
    b.lstar_conservative = std::exp(g / 3);
    b.lstar_refined = std::sqrt(ac * p.beta / p.v) * std::exp(g / 2);
    b.tmem_star_conservative_log = ac * p.beta * std::exp(g / 3);
    b.tmem_star_refined_log = std::sqrt(ac * ac * ac / p.v) * std::pow(p.beta, 1.5) * std::exp(g / 2);
    b.large_beta_simplified = true;
    return b;
}

BarrierConstantReport barrier_constant_report(const CssCode& code) {
    BarrierConstantReport r;
    r.w = code.w;
    r.w_prime = code.w_prime;
    if (r.w == 0 || r.w_prime == 0) throw NonCodeOperator("code has no checks");
    r.fraction = 4.0 / double(r.w * r.w_prime);
    std::ostringstream o;
    o << "m >= (4 mu / (" << r.w << "*" << r.w_prime << ")) L = " << r.fraction << " mu L";
    r.barrier_form = o.str();
    return r;
}

void write_bounds_csv(std::ostream& out, const std::vector<std::pair<BoundParams, double>>& rows) {
    out << "a,beta,L,m,k,N,t,eps_bound_log,eps_bound,tmem_log,Lstar_conservative,Lstar_refined\n";
    out << std::setprecision(12);
    for (const auto& [p, t] : rows) {
        const auto e = epsilon_bound(p, t);
        const auto tb = tmem_bound(p);
        out << p.a << ',' << p.beta << ',' << p.L << ',' << p.m << ',' << p.k << ',' << p.N << ',' << t << ','
            << e.closed_form_log << ',' << std::exp(e.closed_form_log) << ',' << tb.general_log << ',' << tb.lstar_conservative
            << ',' << tb.lstar_refined << '\n';
    }
}

}  // namespace layercode
