#include <cmath>
#include <deque>
#include <sstream>

#include "data_path.hpp"
#include "doctest.h"
#include "layercode/analysis.hpp"
#include "layercode/errors.hpp"

using namespace layercode;

namespace {

// Bottleneck barrier over raw error configurations (all 2^n of them), using energy_penalty directly.
std::size_t brute_barrier(const CssCode& code, PauliType t) {
    const std::size_t n = code.n;
    const auto& stab = code.stabilizers(t);
    auto penalty = [&](std::size_t key) {
        PauliError e(n);
        for (std::size_t q = 0; q < n; ++q)
            if (key >> q & 1) e.part(t).set(q);
        return energy_penalty(code, e);
    };
    auto nontrivial_logical = [&](std::size_t key) {
        if (key == 0 || penalty(key) != 0) return false;
        BitVec v(n);
        for (std::size_t q = 0; q < n; ++q)
            if (key >> q & 1) v.set(q);
        BitMatrix with = stab;
        with.append_row(v);
        return rank_gf2(with) > rank_gf2(stab);
    };
    for (std::size_t bound = 0;; ++bound) {
        std::vector<bool> seen(std::size_t{1} << n, false);
        std::deque<std::size_t> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            const auto s = queue.front();
            queue.pop_front();
            if (nontrivial_logical(s)) return bound;
            for (std::size_t q = 0; q < n; ++q) {
                const auto nb = s ^ (std::size_t{1} << q);
                if (!seen[nb] && penalty(nb) <= bound) {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
}

// Pascal-triangle binomial tail, no lgamma.
long double naive_tail(int N, int m, double beta, double k, double t) {
    std::vector<std::vector<long double>> c(N + 1, std::vector<long double>(N + 1, 0));
    for (int i = 0; i <= N; ++i) {
        c[i][0] = 1;
        for (int j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    long double s = 0;
    for (int n = m; n <= N; ++n) s += c[N][n] * std::exp(-static_cast<long double>(beta) * n);
    return static_cast<long double>(t) * N * std::pow(2.0L, static_cast<long double>(k)) * s;
}

std::size_t replay_max_penalty(const LayerLattice& lat, const BarrierSearchResult& r) {
    std::size_t best = 0;
    for (std::size_t i = 0; i <= r.path.size(); ++i) {
        PauliError e(lat.num_qubits());
        e.part(r.type) = replay_path(lat.num_qubits(), r.path, i);
        best = std::max(best, energy_penalty(lat.hx, lat.hz, e));
    }
    return best;
}

}  // namespace

TEST_CASE("input-code barrier matches brute force over all configurations") {
    for (const char* name : {"c422.txt", "c512.txt", "steane.txt", "c642.txt", "toric2.txt", "single.txt"}) {
        const auto code = load_css(data_file(name));
        for (auto t : {PauliType::X, PauliType::Z}) {
            const auto r = energy_barrier_search(code, t);
            CHECK(r.exhaustive);
            CHECK_MESSAGE(r.barrier == brute_barrier(code, t), name);
        }
    }
    CHECK(energy_barrier_search(load_css(data_file("single.txt")), PauliType::X).barrier == 0);
    CHECK(energy_barrier_search(load_css(data_file("c422.txt")), PauliType::X).barrier == 1);
}

TEST_CASE("layer code barrier paths replay") {
    const auto lat = build_layer_code(load_css(data_file("c422.txt")), 2, false);
    for (auto t : {PauliType::X, PauliType::Z}) {
        const auto r = energy_barrier_search(lat, t);
        REQUIRE(r.exhaustive);
        CHECK(replay_max_penalty(lat, r) == r.barrier);
        PauliError end(lat.num_qubits());
        end.part(t) = replay_path(lat.num_qubits(), r.path, r.path.size());
        CHECK(extract_syndrome(lat, end).empty());
        CHECK(logical_failure_mask(lat, end) != 0);

        BarrierOptions beam;
        beam.mode = BarrierMode::Beam;
        const auto b = energy_barrier_search(lat, t, beam);
        CHECK(!b.exhaustive);
        CHECK(b.barrier >= r.barrier);
        CHECK(replay_max_penalty(lat, b) == b.barrier);

        // A stabilizer-equivalent representative of the same class gives the same exact barrier.
        BarrierOptions cls;
        cls.target_class = r.target_class;
        CHECK(energy_barrier_search(lat, t, cls).barrier == r.barrier);
        BitVec shifted = end.part(t);
        shifted ^= (t == PauliType::X ? lat.hx : lat.hz).row(0);
        beam.representative = shifted;
        CHECK(energy_barrier_search(lat, t, beam).barrier >= r.barrier);
    }
    BarrierOptions tiny;
    tiny.state_budget = 10;
    CHECK_THROWS_AS(energy_barrier_search(lat, PauliType::X, tiny), BudgetExceeded);
}

TEST_CASE("decoder barrier test") {
    const auto lat = build_layer_code(load_css(data_file("c422.txt")), 2, false);
    BarrierTestOptions o;
    o.samples = 20;
    o.walk_length = 0;
    CHECK(decoder_barrier_test(lat, o).success_fraction() == 1.0);
    o.walk_length = 5;
    CHECK_THROWS_AS(decoder_barrier_test(lat, o), SamplerStuck);

    // The barrier path endpoint is a failure witness at budget = barrier.
    const auto r = energy_barrier_search(lat, PauliType::X);
    CHECK_FALSE(corrects(lat, replay_path(lat.num_qubits(), r.path, r.path.size()), PauliType::X, {}));

    o.penalty_budget = r.barrier;
    o.samples = 200;
    o.walk_length = 30;
    const auto res = decoder_barrier_test(lat, o);
    MESSAGE("budget " << o.penalty_budget << " success " << res.success_fraction());
    CHECK(res.samples == 200);
    CHECK(res.failing_walks.size() == res.samples - res.successes);
    o.threads = 3;
    CHECK(decoder_barrier_test(lat, o).successes == res.successes);
}

TEST_CASE("distance fraction test on an extended lattice") {
    const auto lat = build_layer_code(load_css(data_file("c422.txt")), 2, true);
    DistanceOptions o;
    o.max_weight = 1;
    const auto rep = distance_fraction_test(lat, o);
    REQUIRE(rep.curve.size() == 2);
    CHECK(rep.curve[0].trials == 2);
    CHECK(rep.curve[1].trials == 2 * lat.num_qubits());
    CHECK(rep.curve[1].successes == rep.curve[1].trials);
    CHECK(rep.guaranteed_weight == 1);

    o.max_weight = 2;
    o.enumeration_budget = 100;
    o.samples = 50;
    const auto sampled = distance_fraction_test(lat, o);
    CHECK(!sampled.curve[2].exhaustive);
    CHECK(sampled.curve[2].budget_exceeded);
    CHECK(sampled.curve[2].trials == 100);
    CHECK(sampled.guaranteed_weight == 0);
}

TEST_CASE("epsilon bound") {
    BoundParams p;
    p.a = 0.5;
    p.beta = 1;
    p.m = 3;
    p.k = 2;
    p.N = 10;
    CHECK(std::isinf(epsilon_bound(p, 0).closed_form_log));
    CHECK(epsilon_bound(p, 0).closed_form_log < 0);
    p.beta = 1e4;
    CHECK(std::exp(epsilon_bound(p, 1).closed_form_log) == 0.0);
    for (int N : {10, 20, 30})
        for (int m = 2; m <= N / 2; ++m)
            for (double beta : {0.5, 1.0, 2.0})
                for (double a : {0.3, 0.5, 0.7}) {
                    BoundParams q;
                    q.a = a;
                    q.beta = beta;
                    q.m = m;
                    q.k = 2;
                    q.N = N;
                    const double exact = binomial_tail_log(q, 1.0);
                    CHECK(std::abs(exact - static_cast<double>(std::log(naive_tail(N, m, beta, 2, 1.0)))) < 1e-9);
                    CHECK(epsilon_bound(q, 1.0).closed_form_log >= exact - 1e-9);
                }
}

TEST_CASE("memory time bounds") {
    BoundParams p;
    p.a = 0.4;
    p.beta = 6;
    p.c = 0.3;
    p.v = 2;
    p.m = 5;
    p.k = 3;
    p.L = 4;
    const auto b = tmem_bound(p);
    const double ratio = std::sqrt(p.a * p.c * p.beta / p.v) * std::exp((1 - p.a) * p.beta / 6);
    CHECK(b.lstar_refined / b.lstar_conservative == doctest::Approx(ratio).epsilon(1e-12));
    CHECK(b.general_log == doctest::Approx(p.a * p.beta * p.m - p.k * std::log(2.0) - 3 * std::log(p.L)));
    p.a = 1 - 1e-9;
    CHECK(tmem_bound(p).lstar_conservative == doctest::Approx(1.0));
    p.a = 0.4;
    double prev = -1e300;
    for (double beta = 0.5; beta < 20; beta += 0.5) {
        p.beta = beta;
        const double g = tmem_bound(p).general_log;
        CHECK(g > prev);
        prev = g;
    }
    p.a = 1.5;
    CHECK_THROWS_AS(tmem_bound(p), ParseError);
}

TEST_CASE("barrier constant report") {
    const auto r = barrier_constant_report(load_css(data_file("c422.txt")));
    CHECK(r.w == 4);
    CHECK(r.w_prime == 2);
    CHECK(r.fraction == 0.5);
    for (const char* name : {"steane.txt", "c512.txt", "toric3.txt", "rep3.txt"})
        CHECK(barrier_constant_report(load_css(data_file(name))).fraction <= 1.0);
}

TEST_CASE("bounds csv") {
    BoundParams p;
    std::ostringstream out;
    write_bounds_csv(out, {{p, 0.0}, {p, 2.0}});
    const auto s = out.str();
    CHECK(s.rfind("a,beta,L,m,k,N,t,eps_bound_log,eps_bound,tmem_log,Lstar_conservative,Lstar_refined\n", 0) == 0);
    std::istringstream in(s);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.find(",-inf,0,") != std::string::npos);
}
