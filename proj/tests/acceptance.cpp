// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "data_path.hpp"
#include "layercode/analysis.hpp"
#include "layercode/decoder.hpp"
#include "layercode/errors.hpp"
#include "layercode/lattice.hpp"
#include "layercode/matching.hpp"
#include "layercode/thermal.hpp"
#include "oracles.hpp"
#include "probes.hpp"

using namespace layercode;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const LayerLattice& c422_plain() {
    static const auto lat = build_layer_code(load_css(data_file("c422.txt")), 3, false);
    return lat;
}

void criterion1(Outcome& o) {
    const auto code = load_css(data_file("c422.txt"));
    const auto t0 = std::chrono::steady_clock::now();
    const auto lat = build_layer_code(code, 3, false);
    const auto rep = validate_lattice(lat, code.k);
    const double secs = seconds_since(t0);
    const auto g = lat.layers_of(LayerKind::Grey).size(), b = lat.layers_of(LayerKind::Blue).size(),
               r = lat.layers_of(LayerKind::Red).size();
    o.detail << "[[4,2,2]] grey=" << g << " blue=" << b << " red=" << r << " k=" << rep.k << " commutes="
             << rep.commutes << " build+validate " << secs << " s;";
    o.require(g == 4 && b == 1 && r == 1, "layer counts");
    o.require(rep.ok() && rep.k == 2, "validation");
    o.require(secs < 5.0, "runtime");
    std::size_t others = 0;
    bool redundant = false;
    for (const char* f : {"single.txt", "rep3.txt", "steane.txt", "c512.txt", "c642.txt", "toric2.txt",
                          "c422_redundant.txt"}) {
        const auto c = load_css(data_file(f));
        const auto ok = c.n <= 10 && validate_lattice(build_layer_code(c, 3, false), c.k).ok();
        o.require(ok, f);
        others += ok;
        if (ok && std::string(f) == "c422_redundant.txt") redundant = true;
    }
    o.detail << " " << others << " further inputs validate";
    o.require(others >= 5 && redundant, "at least 5 further inputs including redundant checks");
}

void criterion2(Outcome& o) {
    const auto& lat = c422_plain();
    const auto rep = probe::branching_probes(lat);
    std::map<DefectColor, std::size_t> colors;
    for (const auto& d : lat.defects) ++colors[d.color];
    const bool green = colors.count(DefectColor::Green) > 0;
    o.detail << "defects blue=" << colors[DefectColor::Blue] << " red=" << colors[DefectColor::Red]
             << " green=" << colors[DefectColor::Green] << ", " << rep.probes << " branching probes, "
             << rep.generators.size() << " generator types";
    o.require(rep.generators == probe::expected_generators(green), "generator set");
    o.require(rep.stray == 0 && rep.multi == 0, "branched sites off the defect lines");
    for (std::size_t d = 0; d < lat.defects.size(); ++d) {
        o.require(rep.m_probes_per_defect.count(d) && rep.e_probes_per_defect.count(d), "unprobed defect");
        if (lat.defects[d].color != DefectColor::Green && rep.m_probes_per_defect.count(d))
            o.require(rep.m_probes_per_defect.at(d) ==
                          static_cast<std::size_t>(lat.defects[d].face_hi - lat.defects[d].face_lo),
                      "one m probe per line cell");
    }
}

void criterion3(Outcome& o) {
    const auto ext = build_layer_code(load_css(data_file("c422.txt")), 3, true);
    DistanceOptions opt;
    opt.max_weight = 2;
    opt.enumeration_budget = 1000000;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = distance_fraction_test(ext, opt);
    o.detail << "extended n=" << ext.num_qubits();
    for (const auto& w : rep.curve) {
        o.detail << " w" << w.weight << ": " << w.successes << "/" << w.trials << (w.exhaustive ? " exhaustive" : "");
        o.require(w.exhaustive && w.successes == w.trials, "weight " + std::to_string(w.weight));
    }
    o.detail << " (" << seconds_since(t0) << " s);";

    const auto& lat = c422_plain();
    const auto e = load_error_file(lat, data_file("fixture_x_error.txt"));
    DecoderOptions dopt;
    dopt.transcript = true;
    const auto res = decode_x(lat, extract_syndrome(lat, e), dopt);
    const std::vector<std::string> expected{"stage 1 blue[0]",  "stage 2 grey[0]", "stage 2 grey[1]",
                                            "stage 3 parity red[0]=1", "stage 3 input_correction X 0",
                                            "stage 3 flip grey[0]", "stage 4 red[0]", "residual 0"};
    bool match = res.transcript.size() == expected.size();
    for (std::size_t i = 0; match && i < expected.size(); ++i) match = res.transcript[i].rfind(expected[i], 0) == 0;
    PauliError er = e;
    er.x ^= res.correction;
    o.detail << " fixture transcript " << (match ? "matches" : "differs") << " (X0 returned, grey[0] flipped)";
    o.require(match, "fixture transcript");
    o.require(extract_syndrome(lat, er).empty() && logical_failure_mask(lat, er) == 0, "fixture recovery");
}

void criterion4(Outcome& o) {
    const auto& lat = c422_plain();
    std::mt19937_64 rng(4);
    std::size_t instances = 0, minus_checked = 0, mismatches = 0;
    while (instances < 500) {
        const std::size_t layer = rng() % lat.layers.size();
        const auto t = rng() & 1 ? PauliType::X : PauliType::Z;
        const auto og = oracle::layer_graph(lat, layer, t);
        const auto& owned = t == PauliType::X ? lat.topology[layer].faces : lat.topology[layer].vertices;
        std::size_t k = rng() % 9;
        if (og.classes == 0) k &= ~std::size_t{1};
        std::vector<std::size_t> pool(owned.begin(), owned.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(std::min(k, pool.size()));
        std::sort(pool.begin(), pool.end());
        std::vector<int> osites;
        for (auto c : pool)
            osites.push_back(static_cast<int>(std::find(og.checks.begin(), og.checks.end(), c) - og.checks.begin()));
        const auto g = build_matching_graph(lat, layer, t, pool);
        const auto res = mwpm(g);
        if (res.weight != oracle::exhaustive_matching(og, osites, -1)) ++mismatches;
        if (og.classes == 2) {
            const auto minus = mwpm_minus(g, res);
            const int ref = oracle::class0_parity(og, lift_correction(lat, layer, res.correction));
            if (minus.weight != oracle::exhaustive_matching(og, osites, 1 - ref)) ++mismatches;
            ++minus_checked;
        }
        ++instances;
    }
    o.detail << instances << " instances (<= 8 sites), " << minus_checked << " with the opposite-sector solve, "
             << mismatches << " weight mismatches";
    o.require(mismatches == 0, "exact weights");
}

void criterion5(Outcome& o) {
    const auto code = load_css(data_file("c422.txt"));
    const auto bx = energy_barrier_search(code, PauliType::X), bz = energy_barrier_search(code, PauliType::Z);
    o.detail << "5a input barrier X=" << bx.barrier << " Z=" << bz.barrier << " (expected 2);";
    o.require(bx.exhaustive && bx.barrier == 2 && bz.barrier == 2, "5a input-code barrier equals 2");

    const auto& lat = c422_plain();
    const auto lx = energy_barrier_search(lat, PauliType::X), lz = energy_barrier_search(lat, PauliType::Z);
    const std::size_t barrier = std::min(lx.barrier, lz.barrier);
    o.detail << " layer code barrier X=" << lx.barrier << " Z=" << lz.barrier << ";";
    o.require(lx.exhaustive && lz.exhaustive, "exhaustive layer code barrier");

    BarrierTestOptions bt;
    bt.penalty_budget = barrier - 1;
    bt.samples = 1000;
    bt.walk_length = 24;
    bt.seed = 5;
    bool stuck = false;
    BarrierTestResult below;
    try {
        below = decoder_barrier_test(lat, bt);
    } catch (const SamplerStuck&) {
        // No single flip fits the budget: only the empty walk is admissible.
        stuck = true;
        bt.walk_length = 0;
        below = decoder_barrier_test(lat, bt);
    }
    o.detail << " 5b budget " << bt.penalty_budget << ": " << below.successes << "/" << below.samples
             << (stuck ? " (no flip fits the budget, walks are empty)" : "") << ";";
    o.require(below.samples == 1000 && below.success_fraction() == 1.0, "5b success below the barrier");

    bool witness = true;
    for (const auto* r : {&lx, &lz})
        if (r->barrier == barrier)
            witness = witness && !corrects(lat, replay_path(lat.num_qubits(), r->path, r->path.size()), r->type, {});
    bt.penalty_budget = barrier;
    bt.walk_length = 24;
    const auto at = decoder_barrier_test(lat, bt);
    o.detail << " 5c budget " << barrier << ": barrier path endpoint " << (witness ? "fails" : "is corrected")
             << ", sampled " << at.samples - at.successes << " failing walks";
    o.require(witness, "5c witness");
}

std::size_t frame_key(const PauliError& e) {
    std::size_t key = 0;
    for (std::size_t q = 0; q < e.size(); ++q)
        key |= (std::size_t{e.x.get(q)} << q) | (std::size_t{e.z.get(q)} << (q + e.size()));
    return key;
}

void criterion6(Outcome& o) {
    double worst = 0;
    for (auto kind : {RateKind::Metropolis, RateKind::Glauber})
        for (double beta = 0.25; beta <= 8; beta *= 2)
            for (int w = -12; w <= 12; ++w) {
                const RateModel m{beta, kind};
                worst = std::max(worst, std::abs(log_rate(m, w) - log_rate(m, -w) + beta * w));
            }
    o.detail << "detailed balance max error " << worst << ";";
    o.require(worst <= 1e-12, "detailed balance");

    const auto code = load_css(data_file("c512.txt"));
    const double beta = 1.0;
    ThermalChain chain(code.hx, code.hz, {beta, RateKind::Metropolis});
    Rng rng(6);
    std::vector<double> occ(std::size_t{1} << (2 * code.n), 0.0);
    double total = 0;
    for (int i = 0; i < 1000000; ++i) {
        const double dt = chain.wait(rng);
        occ[frame_key(chain.state())] += dt;
        total += dt;
        chain.apply(chain.choose(rng));
    }
    double z = 0, tv = 0;
    std::vector<double> pi(occ.size());
    for (std::size_t key = 0; key < pi.size(); ++key) {
        PauliError e(code.n);
        for (std::size_t q = 0; q < code.n; ++q) {
            if (key >> q & 1) e.x.set(q);
            if (key >> (q + code.n) & 1) e.z.set(q);
        }
        pi[key] = std::exp(-beta * static_cast<double>(energy_penalty(code, e)));
        z += pi[key];
    }
    for (std::size_t key = 0; key < pi.size(); ++key) tv += std::abs(pi[key] / z - occ[key] / total);
    tv /= 2;
    o.detail << " Gibbs TV " << tv << " (" << 2 * code.n << "-bit frames, 1e6 events);";
    o.require(tv < 0.02, "Gibbs stationarity");

    MemoryExperiment exp;
    exp.betas = {1.0, 1.5, 2.0};
    exp.t_max = 20;
    exp.checkpoints = geometric_schedule(0.05, 20, 80);
    exp.trajectories = 200;
    exp.min_trajectories = 200;
    exp.master_seed = 2026;
    exp.threads = 8;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cells = estimate_memory_time(c422_plain(), exp);
    for (const auto& c : cells)
        o.detail << " T(" << c.beta << ")=" << (c.t_mem ? std::to_string(*c.t_mem) : "censored") << " [" << c.ci_low
                 << ", " << c.ci_high << "]";
    o.detail << " (" << seconds_since(t0) << " s)";
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        o.require(cells[i].t_mem && cells[i + 1].t_mem && *cells[i].t_mem < *cells[i + 1].t_mem, "T_mem increasing");
        o.require(cells[i].ci_high < cells[i + 1].ci_low, "CIs separated");
    }
}

void criterion7(Outcome& o) {
    std::size_t points = 0, violations = 0;
    double worst_margin = INFINITY;
    for (int N : {10, 20, 30})
        for (int m = 2; m <= N / 2; ++m)
            for (double beta : {0.5, 1.0, 2.0})
                for (double a : {0.3, 0.5, 0.7}) {
                    BoundParams p;
                    p.a = a;
                    p.beta = beta;
                    p.m = m;
                    p.k = 2;
                    p.N = N;
                    const double closed = epsilon_bound(p, 1.0).closed_form_log, exact = binomial_tail_log(p, 1.0);
                    worst_margin = std::min(worst_margin, closed - exact);
                    if (closed < exact - 1e-9) ++violations;
                    ++points;
                }
    o.detail << points << " grid points, " << violations << " violations, min log margin " << worst_margin << ";";
    o.require(violations == 0, "closed form dominates");

    BoundParams p;
    p.a = 0.4;
    p.beta = 6;
    p.c = 0.3;
    p.v = 2;
    p.m = 5;
    p.k = 3;
    p.L = 4;
    const auto b = tmem_bound(p);
    const double ratio = b.lstar_refined / b.lstar_conservative;
    const double algebra = std::sqrt(p.a * p.c * p.beta / p.v) * std::exp((1 - p.a) * p.beta / 6);
    o.detail << " L ratio " << ratio << " vs " << algebra;
    o.require(std::abs(ratio / algebra - 1) < 1e-12, "L ratio");
}

std::string records_text(const std::vector<MemoryCell>& cells) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& c : cells)
        for (const auto& r : c.runs)
            for (const auto& cp : r.checkpoints)
                out << c.beta << ',' << c.L << ',' << r.seed << ',' << cp.time << ',' << cp.failed_mask << ','
                    << cp.aborted << '\n';
    return out.str();
}

void criterion8(Outcome& o) {
    std::size_t compared = 0, differ = 0;
    for (const char* fixture : {"fixture_x_error.txt", "fixture_z_error.txt"}) {
        const auto& lat = c422_plain();
        const auto e = load_error_file(lat, data_file(fixture));
        const auto s = extract_syndrome(lat, e);
        DecoderOptions one, eight;
        one.transcript = eight.transcript = true;
        eight.threads = 8;
        for (auto t : {PauliType::X, PauliType::Z}) {
            const auto a = decode_type(lat, s, t, one), b = decode_type(lat, s, t, eight);
            ++compared;
            if (!(a.correction == b.correction && a.transcript == b.transcript)) ++differ;
        }
    }
    MemoryExperiment exp;
    exp.betas = {0.75, 1.5};
    exp.checkpoints = geometric_schedule(0.1, 10, 12);
    exp.t_max = 10;
    exp.trajectories = 40;
    exp.bootstrap_samples = 100;
    exp.master_seed = 88;
    exp.threads = 1;
    const auto a = records_text(estimate_memory_time(c422_plain(), exp));
    exp.threads = 8;
    const auto b = records_text(estimate_memory_time(c422_plain(), exp));
    o.detail << compared << " fixture decodes, " << differ << " differ between 1 and 8 threads; thermal records "
             << a.size() << " bytes " << (a == b ? "identical" : "differ");
    o.require(differ == 0, "decode determinism");
    o.require(a == b && !a.empty(), "thermal determinism");
}

void criterion9(Outcome& o) {
    std::size_t prev_weight = 0;
    bool first = true;
    for (const char* f : {"toric2.txt", "toric2x3.txt", "toric3.txt"}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto lat = build_layer_code(load_css(data_file(f)), 2, true);
        const double build_s = seconds_since(t0);
        std::mt19937_64 rng(9);
        double wall = 0, stages = 0, critical = 0, input = 0;
        const int samples = 20;
        for (int i = 0; i < samples; ++i) {
            PauliError e(lat.num_qubits());
            for (int j = 0; j < 4; ++j) e.x.flip(rng() % lat.num_qubits());
            const auto s = extract_syndrome(lat, e);
            const auto d0 = std::chrono::steady_clock::now();
            const auto r = decode_x(lat, s);
            wall += seconds_since(d0);
            for (const auto& st : r.stages) stages += st.wall_seconds;
            critical += r.critical_path_seconds();
            input += r.input_decoder_seconds;
        }
        DistanceOptions dopt;
        dopt.max_weight = 1;
        const auto rep = distance_fraction_test(lat, dopt);
        o.detail << " " << f << ": n=" << lat.num_qubits() << " L=" << lat.linear_size << " build " << build_s
                 << " s, decode " << 1e3 * wall / samples << " ms = stages " << 1e3 * stages / samples
                 << " ms (critical path " << 1e3 * critical / samples << " ms, input decoder "
                 << 1e3 * input / samples << " ms), guaranteed weight " << rep.guaranteed_weight << ";";
        o.require(stages <= wall * 1.001 && stages >= 0.5 * wall, std::string(f) + " time decomposition");
        o.require(critical <= stages * 1.001, std::string(f) + " critical path within stage time");
        o.require(first || rep.guaranteed_weight >= prev_weight, "guaranteed weight non-decreasing");
        prev_weight = rep.guaranteed_weight;
        first = false;
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
    int failed = 0;
    for (const auto& [id, fn] : criteria) {
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail.str() << std::endl;
    }
    std::cout << (9 - failed) << "/9 criteria pass" << std::endl;
    return failed ? 1 : 0;
}
