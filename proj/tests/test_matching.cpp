#include <functional>
#include <random>
#include <sstream>

#include "data_path.hpp"
#include "doctest.h"
#include "layercode/blossom.hpp"
#include "layercode/errors.hpp"
#include "layercode/matching.hpp"
#include "oracles.hpp"

using namespace layercode;

namespace {

// Best (cardinality, weight) over all matchings by recursion on the lowest free vertex;
// `by_weight` ignores cardinality.
std::pair<int, long long> brute_matching(int n, const std::vector<WeightedEdge>& edges, bool by_weight = false) {
    std::vector<std::vector<long long>> w(n, std::vector<long long>(n, -1));
    for (const auto& e : edges) w[e.u][e.v] = w[e.v][e.u] = std::max(w[e.u][e.v], e.weight);
    std::vector<bool> used(n, false);
    std::pair<int, long long> best{0, 0};
    std::function<void(int, long long)> rec = [&](int card, long long acc) {
        int i = 0;
        while (i < n && used[i]) ++i;
        if (i == n) {
            if (by_weight) best.second = std::max(best.second, acc);
            else best = std::max(best, std::pair<int, long long>{card, acc});
            return;
        }
        used[i] = true;
        rec(card, acc);
        for (int j = i + 1; j < n; ++j)
            if (!used[j] && w[i][j] >= 0) {
                used[j] = true;
                rec(card + 1, acc + w[i][j]);
                used[j] = false;
            }
        used[i] = false;
    };
    rec(0, 0);
    return best;
}

const LayerLattice& c422_lattice() {
    static const auto lat = build_layer_code(load_css(data_file("c422.txt")), 3, false);
    return lat;
}

BitVec layer_syndrome(const LayerLattice& lat, std::size_t layer, PauliType t, const BitVec& local) {
    const auto global = lift_correction(lat, layer, local);
    const auto& h = lat.detecting(t);
    const auto& sites = lat.detector_sites(t);
    BitVec out(h.rows());
    for (std::size_t r = 0; r < h.rows(); ++r)
        if (sites[r].layer == layer && h.row(r).dot(global)) out.set(r);
    return out;
}

}  // namespace

TEST_CASE("blossom matches brute force on random graphs") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 9);
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 3) edges.push_back({i, j, static_cast<long long>(rng() % 20)});
        for (bool maxcard : {false, true}) {
            const auto mate = max_weight_matching(n, edges, maxcard);
            int card = 0;
            long long weight = 0;
            for (int v = 0; v < n; ++v) {
                if (mate[v] < 0) continue;
                REQUIRE(mate[mate[v]] == v);
                if (mate[v] > v) {
                    ++card;
                    long long w = -1;
                    for (const auto& e : edges)
                        if ((e.u == v && e.v == mate[v]) || (e.v == v && e.u == mate[v])) w = std::max(w, e.weight);
                    REQUIRE(w >= 0);
                    weight += w;
                }
            }
            const auto best = brute_matching(n, edges);
            if (maxcard) {
                CHECK(card == best.first);
                // Among maximum-cardinality matchings, weight is maximal.
                std::vector<WeightedEdge> shifted = edges;
                for (auto& e : shifted) e.weight += 1000;
                const auto b2 = brute_matching(n, shifted);
                CHECK(weight + 1000LL * card == b2.second);
            } else {
                CHECK(weight == brute_matching(n, edges, true).second);
            }
        }
    }
}

TEST_CASE("matching graph geometry") {
    const auto& lat = c422_lattice();
    const auto grey = lat.layers_of(LayerKind::Grey).at(1);
    const auto& topo = lat.topology[grey];
    // Two interior faces three columns apart on the same row.
    const long f1 = topo.face_at(1, 2), f2 = topo.face_at(4, 2);
    REQUIRE(f1 >= 0);
    REQUIRE(f2 >= 0);
    auto g = build_matching_graph(lat, grey, PauliType::X, {static_cast<std::size_t>(f1), static_cast<std::size_t>(f2)});
    CHECK(g.distance(0, 1) == 3);
    CHECK(g.path(0, 1).size() == 3);
    const auto oracle_g = oracle::layer_graph(lat, grey, PauliType::X);
    CHECK(g.boundary_classes() == 2);
    CHECK(oracle_g.classes == 2);

    auto empty = build_matching_graph(lat, grey, PauliType::X, {});
    CHECK(empty.num_sites() == 0);
    CHECK(mwpm(empty).weight == 0);
    // The opposite sector of the identity is a boundary-to-boundary string spanning the layer width.
    const auto minus = mwpm_minus(empty, mwpm(empty));
    CHECK(minus.weight == lat.layers[grey].width() + 1);
    CHECK(minus.weight == oracle::class_distance(oracle_g));

    // Red layers condense e only: a vertex next to the boundary is one step away.
    const auto red = lat.layers_of(LayerKind::Red).at(0);
    const auto& rt = lat.topology[red];
    const long v = rt.vertex_at(lat.layers[red].u0 + 1, 2);
    REQUIRE(v >= 0);
    auto rg = build_matching_graph(lat, red, PauliType::Z, {static_cast<std::size_t>(v)});
    CHECK(rg.boundary_classes() == 1);
    CHECK(rg.boundary_distance(0, 0) == 1);

    CHECK_THROWS_AS(build_matching_graph(lat, red, PauliType::X, {static_cast<std::size_t>(f1)}), SiteOffLayer);

    std::ostringstream dump;
    g.dump(dump);
    CHECK(dump.str().find("s0 s1 3") != std::string::npos);
}

TEST_CASE("single site near a smooth boundary: both sectors") {
    const auto& lat = c422_lattice();
    const auto grey = lat.layers_of(LayerKind::Grey).at(0);
    const auto& l = lat.layers[grey];
    const auto& topo = lat.topology[grey];
    const int a = 1;
    const long f = topo.face_at(l.u0 + a, 2);
    auto g = build_matching_graph(lat, grey, PauliType::X, {static_cast<std::size_t>(f)});
    const auto ref = mwpm(g);
    CHECK(ref.weight == a + 1);
    const auto minus = mwpm_minus(g, ref);
    CHECK(minus.weight == l.width() - a);
    CHECK(minus.sector() != ref.sector());
}

TEST_CASE("matching results agree with exhaustive oracles") {
    const auto& lat = c422_lattice();
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t layer = rng() % lat.layers.size();
        const auto t = rng() & 1 ? PauliType::X : PauliType::Z;
        const auto& owned = t == PauliType::X ? lat.topology[layer].faces : lat.topology[layer].vertices;
        const auto og = oracle::layer_graph(lat, layer, t);
        std::size_t k = rng() % 7;
        if (og.classes == 0) k &= ~std::size_t{1};
        std::vector<std::size_t> pool(owned.begin(), owned.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(std::min(k, pool.size()));
        std::sort(pool.begin(), pool.end());
        auto g = build_matching_graph(lat, layer, t, pool);
        std::vector<int> osites;
        for (auto c : pool)
            osites.push_back(static_cast<int>(std::find(og.checks.begin(), og.checks.end(), c) - og.checks.begin()));
        const auto res = mwpm(g);
        CHECK(res.weight == oracle::exhaustive_matching(og, osites, -1));
        CHECK(res.correction.weight() == static_cast<std::size_t>(res.weight));
        BitVec expect(lat.detecting(t).rows());
        for (auto c : pool) expect.set(c);
        CHECK(layer_syndrome(lat, layer, t, res.correction) == expect);
        if (og.classes == 2) {
            const auto minus = mwpm_minus(g, res);
            const int ref_par = oracle::class0_parity(og, lift_correction(lat, layer, res.correction));
            CHECK(minus.weight == oracle::exhaustive_matching(og, osites, 1 - ref_par));
            CHECK(layer_syndrome(lat, layer, t, minus.correction) == expect);
            CHECK(oracle::class0_parity(og, lift_correction(lat, layer, minus.correction)) != ref_par);
        } else {
            CHECK_THROWS_AS(mwpm_minus(g, res), NoOppositeSector);
        }
        ++checked;
    }
    CHECK(checked == 150);
}

TEST_CASE("odd parity without condensing boundary is infeasible") {
    const auto& lat = c422_lattice();
    const auto red = lat.layers_of(LayerKind::Red).at(0);
    auto g = build_matching_graph(lat, red, PauliType::X, {lat.topology[red].faces[5]});
    CHECK(g.boundary_classes() == 0);
    CHECK_THROWS_AS(mwpm(g), InfeasibleParity);
}

TEST_CASE("matching is deterministic") {
    const auto& lat = c422_lattice();
    const auto grey = lat.layers_of(LayerKind::Grey).at(2);
    const auto& faces = lat.topology[grey].faces;
    std::vector<std::size_t> sites{faces[0], faces[3], faces[7], faces[11]};
    const auto a = mwpm(build_matching_graph(lat, grey, PauliType::X, sites));
    const auto b = mwpm(build_matching_graph(lat, grey, PauliType::X, sites));
    CHECK(a.correction == b.correction);
}
