#include "layercode/matching.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "layercode/blossom.hpp"
#include "layercode/errors.hpp"

namespace layercode {

MatchingGraph::MatchingGraph(const LayerLattice& lat, std::size_t layer, PauliType error_type,
                             std::vector<int> sites)
    : layer_(layer), type_(error_type), sites_(std::move(sites)) {
    if (layer >= lat.topology.size()) throw SiteOffLayer("layer index out of range");
    const auto& topo = lat.topology[layer];
    const bool faces = error_type == PauliType::X;
    num_nodes_ = faces ? topo.faces.size() : topo.vertices.size();
    classes_ = faces ? topo.face_boundary_classes : topo.vertex_boundary_classes;
    if (classes_ > 2) throw std::invalid_argument("matching supports at most two boundary classes");
    qubit_sites_ = faces ? topo.qubit_faces : topo.qubit_vertices;
    qubit_class_ = faces ? topo.face_boundary : topo.vertex_boundary;
    site_qubits_.assign(num_nodes_, {});
    for (std::size_t q = 0; q < qubit_sites_.size(); ++q)
        for (int s : qubit_sites_[q])
            if (s >= 0) site_qubits_[static_cast<std::size_t>(s)].push_back(q);

    std::vector<bool> seen(num_nodes_, false);
    for (int s : sites_) {
        if (s < 0 || static_cast<std::size_t>(s) >= num_nodes_) throw SiteOffLayer("site outside the layer");
        if (seen[static_cast<std::size_t>(s)]) throw std::invalid_argument("duplicate syndrome site");
        seen[static_cast<std::size_t>(s)] = true;
    }

    const std::size_t k = sites_.size();
    dist_.resize(k);
    parent_.resize(k);
    bdist_.assign(k, {kUnreachable, kUnreachable});
    bqubit_.assign(k, {-1, -1});
    bnode_.assign(k, {-1, -1});
    for (std::size_t i = 0; i < k; ++i) {
        parent_[i] = bfs({sites_[i]}, dist_[i]);
        for (std::size_t q = 0; q < qubit_sites_.size(); ++q) {
            const int c = qubit_class_[q];
            if (c < 0) continue;
            const int node = qubit_sites_[q][0];
            if (dist_[i][static_cast<std::size_t>(node)] == kUnreachable) continue;
            const long d = dist_[i][static_cast<std::size_t>(node)] + 1;
            if (d < bdist_[i][c]) {
                bdist_[i][c] = d;
                bqubit_[i][c] = static_cast<int>(q);
                bnode_[i][c] = node;
            }
        }
    }

    if (classes_ == 2) {
        // Multi-source search from every node touching class 0.
        std::vector<int> sources;
        std::vector<int> start_qubit(num_nodes_, -1);
        for (std::size_t q = 0; q < qubit_sites_.size(); ++q) {
            if (qubit_class_[q] != 0) continue;
            const int node = qubit_sites_[q][0];
            if (start_qubit[static_cast<std::size_t>(node)] < 0) {
                start_qubit[static_cast<std::size_t>(node)] = static_cast<int>(q);
                sources.push_back(node);
            }
        }
        std::sort(sources.begin(), sources.end());
        std::vector<long> d;
        const auto parent = bfs(sources, d);
        int best_q = -1;
        for (std::size_t q = 0; q < qubit_sites_.size(); ++q) {
            if (qubit_class_[q] != 1) continue;
            const int node = qubit_sites_[q][0];
            if (d[static_cast<std::size_t>(node)] == kUnreachable) continue;
            const long total = d[static_cast<std::size_t>(node)] + 2;
            if (total < class_dist_) {
                class_dist_ = total;
                best_q = static_cast<int>(q);
            }
        }
        if (best_q >= 0) {
            const int end_node = qubit_sites_[static_cast<std::size_t>(best_q)][0];
            class_path_ = trace(parent, end_node);
            // The walk ends at a source node; close the string with its class-0 qubit.
            int node = end_node;
            for (auto q : class_path_) {
                const auto& ends = qubit_sites_[q];
                node = ends[0] == node ? ends[1] : ends[0];
            }
            class_path_.push_back(static_cast<std::size_t>(start_qubit[static_cast<std::size_t>(node)]));
            class_path_.push_back(static_cast<std::size_t>(best_q));
        }
    }
}

std::vector<int> MatchingGraph::bfs(const std::vector<int>& sources, std::vector<long>& dist) const {
    dist.assign(num_nodes_, kUnreachable);
    std::vector<int> parent(num_nodes_, -1);
    std::vector<int> queue;
    queue.reserve(num_nodes_);
    for (int s : sources) {
        dist[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (auto q : site_qubits_[static_cast<std::size_t>(u)]) {
            const auto& ends = qubit_sites_[q];
            if (ends[1] < 0) continue;
            const int w = ends[0] == u ? ends[1] : ends[0];
            if (dist[static_cast<std::size_t>(w)] != kUnreachable) continue;
            dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
            parent[static_cast<std::size_t>(w)] = static_cast<int>(q);
            queue.push_back(w);
        }
    }
    return parent;
}

std::vector<std::size_t> MatchingGraph::trace(const std::vector<int>& parent_qubit, int node) const {
    std::vector<std::size_t> out;
    while (parent_qubit[static_cast<std::size_t>(node)] >= 0) {
        const auto q = static_cast<std::size_t>(parent_qubit[static_cast<std::size_t>(node)]);
        out.push_back(q);
        const auto& ends = qubit_sites_[q];
        node = ends[0] == node ? ends[1] : ends[0];
    }
    return out;
}

std::vector<std::size_t> MatchingGraph::path(std::size_t i, std::size_t j) const {
    if (dist_[i][sites_index(j)] == kUnreachable) throw InternalInconsistency("no path between sites");
    return trace(parent_[i], sites_[j]);
}

std::vector<std::size_t> MatchingGraph::boundary_path(std::size_t i, int cls) const {
    if (bqubit_[i][cls] < 0) throw InternalInconsistency("site cannot reach the requested boundary");
    auto out = trace(parent_[i], bnode_[i][cls]);
    out.push_back(static_cast<std::size_t>(bqubit_[i][cls]));
    return out;
}

std::vector<std::size_t> MatchingGraph::class_path() const {
    if (class_dist_ == kUnreachable) throw InternalInconsistency("layer has no boundary-to-boundary string");
    return class_path_;
}

void MatchingGraph::dump(std::ostream& out) const {
    out << "# layer " << layer_ << " type " << to_char(type_) << " sites " << sites_.size() << " classes "
        << classes_ << '\n';
    auto write_path = [&](const std::vector<std::size_t>& p) {
        for (auto q : p) out << ' ' << q;
        out << '\n';
    };
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        for (std::size_t j = i + 1; j < sites_.size(); ++j) {
            if (distance(i, j) == kUnreachable) continue;
            out << "s" << i << " s" << j << ' ' << distance(i, j) << " :";
            write_path(path(i, j));
        }
        for (int c = 0; c < classes_; ++c) {
            if (bdist_[i][c] == kUnreachable) continue;
            out << "s" << i << " b" << c << ' ' << bdist_[i][c] << " :";
            write_path(boundary_path(i, c));
        }
    }
    if (class_dist_ != kUnreachable) {
        out << "b0 b1 " << class_dist_ << " :";
        write_path(class_path_);
    }
}

MatchingGraph build_matching_graph(const LayerLattice& lat, std::size_t layer, PauliType error_type,
                                   const std::vector<std::size_t>& lit_checks) {
    if (layer >= lat.topology.size()) throw SiteOffLayer("layer index out of range");
    const auto& topo = lat.topology[layer];
    const auto& owned = error_type == PauliType::X ? topo.faces : topo.vertices;
    const auto& sites = lat.detector_sites(error_type);
    std::vector<int> local;
    for (auto c : lit_checks) {
        if (c >= sites.size() || sites[c].layer != layer)
            throw SiteOffLayer("check " + std::to_string(c) + " does not lie on layer " + std::to_string(layer));
        local.push_back(static_cast<int>(c - owned.front()));
    }
    return MatchingGraph(lat, layer, error_type, std::move(local));
}

namespace {

// Terminal node of the reduced problem: a site position or a boundary class.
struct Terminal {
    int site = -1;
    int cls = -1;
};

enum class Route { Direct, Via0, Via1, Via01, Via10 };

struct Leg {
    long weight = kUnreachable;
    Route route = Route::Direct;
};

long add(long a, long b) { return a >= kUnreachable || b >= kUnreachable ? kUnreachable : a + b; }

void take(Leg& best, long w, Route r) {
    if (w < best.weight) best = {w, r};
}

// Shortest site-to-site connection in the layer graph with boundary classes as ordinary nodes.
Leg site_leg(const MatchingGraph& g, std::size_t i, std::size_t j) {
    Leg best;
    take(best, g.distance(i, j), Route::Direct);
    const int c = g.boundary_classes();
    if (c >= 1) take(best, add(g.boundary_distance(i, 0), g.boundary_distance(j, 0)), Route::Via0);
    if (c >= 2) {
        take(best, add(g.boundary_distance(i, 1), g.boundary_distance(j, 1)), Route::Via1);
        take(best, add(add(g.boundary_distance(i, 0), g.class_distance()), g.boundary_distance(j, 1)), Route::Via01);
        take(best, add(add(g.boundary_distance(i, 1), g.class_distance()), g.boundary_distance(j, 0)), Route::Via10);
    }
    return best;
}

Leg boundary_leg(const MatchingGraph& g, std::size_t i, int cls) {
    Leg best;
    take(best, g.boundary_distance(i, cls), Route::Direct);
    if (g.boundary_classes() == 2)
        take(best, add(g.boundary_distance(i, 1 - cls), g.class_distance()), cls == 0 ? Route::Via10 : Route::Via01);
    return best;
}

void toggle(BitVec& v, const std::vector<std::size_t>& path) {
    for (auto q : path) v.flip(q);
}

MatchingResult solve_terminals(const MatchingGraph& g, const std::vector<Terminal>& terms) {
    const int t = static_cast<int>(terms.size());
    std::vector<std::vector<Leg>> legs(t, std::vector<Leg>(t));
    long maxw = 0;
    for (int a = 0; a < t; ++a)
        for (int b = a + 1; b < t; ++b) {
            Leg l;
            const auto &x = terms[a], &y = terms[b];
            if (x.site >= 0 && y.site >= 0) l = site_leg(g, x.site, y.site);
            else if (x.site >= 0) l = boundary_leg(g, x.site, y.cls);
            else if (y.site >= 0) l = boundary_leg(g, y.site, x.cls);
            else l = {g.class_distance(), Route::Direct};
            legs[a][b] = l;
            if (l.weight < kUnreachable) maxw = std::max(maxw, l.weight);
        }
    std::vector<WeightedEdge> edges;
    for (int a = 0; a < t; ++a)
        for (int b = a + 1; b < t; ++b)
            if (legs[a][b].weight < kUnreachable) edges.push_back({a, b, maxw + 1 - legs[a][b].weight});
    const auto mate = max_weight_matching(t, edges, true);
    if (std::any_of(mate.begin(), mate.end(), [](int m) { return m < 0; }))
        throw InfeasibleParity("syndrome sites cannot be perfectly matched on layer " + std::to_string(g.layer()));

    MatchingResult res;
    res.correction = BitVec(g.layer_qubits());
    for (int a = 0; a < t; ++a) {
        const int b = mate[a];
        if (b < a) continue;
        const auto& leg = legs[a][b];
        const auto &x = terms[a], &y = terms[b];
        res.pairs.push_back({x.site >= 0 ? x.site : -1 - x.cls, y.site >= 0 ? y.site : -1 - y.cls, leg.weight});
        res.weight += leg.weight;
        if (x.site >= 0 && y.site >= 0) {
            const auto i = static_cast<std::size_t>(x.site), j = static_cast<std::size_t>(y.site);
            switch (leg.route) {
                case Route::Direct: toggle(res.correction, g.path(i, j)); break;
                case Route::Via0:
                    toggle(res.correction, g.boundary_path(i, 0));
                    toggle(res.correction, g.boundary_path(j, 0));
                    break;
                case Route::Via1:
                    toggle(res.correction, g.boundary_path(i, 1));
                    toggle(res.correction, g.boundary_path(j, 1));
                    break;
                case Route::Via01:
                    toggle(res.correction, g.boundary_path(i, 0));
                    toggle(res.correction, g.class_path());
                    toggle(res.correction, g.boundary_path(j, 1));
                    break;
                case Route::Via10:
                    toggle(res.correction, g.boundary_path(i, 1));
                    toggle(res.correction, g.class_path());
                    toggle(res.correction, g.boundary_path(j, 0));
                    break;
            }
        } else if (x.site >= 0 || y.site >= 0) {
            const auto& s = x.site >= 0 ? x : y;
            const int cls = x.site >= 0 ? y.cls : x.cls;
            const auto i = static_cast<std::size_t>(s.site);
            if (leg.route == Route::Direct) {
                toggle(res.correction, g.boundary_path(i, cls));
            } else {
                toggle(res.correction, g.boundary_path(i, 1 - cls));
                toggle(res.correction, g.class_path());
            }
        } else {
            toggle(res.correction, g.class_path());
        }
    }
    for (auto q : res.correction.support()) {
        const int c = g.qubit_class(q);
        if (c >= 0) res.boundary_parity[c] ^= 1;
    }
    return res;
}

std::vector<Terminal> site_terminals(const MatchingGraph& g) {
    std::vector<Terminal> terms;
    for (std::size_t i = 0; i < g.num_sites(); ++i) terms.push_back({static_cast<int>(i), -1});
    return terms;
}

}  // namespace

MatchingResult mwpm_sector(const MatchingGraph& g, int sector) {
    if (g.boundary_classes() != 2) throw NoOppositeSector("layer does not have two boundary classes");
    auto terms = site_terminals(g);
    const int k = static_cast<int>(g.num_sites());
    if (sector & 1) terms.push_back({-1, 0});
    if ((k + sector) & 1) terms.push_back({-1, 1});
    return solve_terminals(g, terms);
}

MatchingResult mwpm(const MatchingGraph& g) {
    const int k = static_cast<int>(g.num_sites());
    switch (g.boundary_classes()) {
        case 0:
            if (k & 1) throw InfeasibleParity("odd syndrome count on a layer without condensing boundary");
            return solve_terminals(g, site_terminals(g));
        case 1: {
            auto terms = site_terminals(g);
            if (k & 1) terms.push_back({-1, 0});
            return solve_terminals(g, terms);
        }
        default: {
            auto s0 = mwpm_sector(g, 0);
            auto s1 = mwpm_sector(g, 1);
            return s1.weight < s0.weight ? s1 : s0;
        }
    }
}

MatchingResult mwpm_minus(const MatchingGraph& g, const MatchingResult& reference) {
    if (g.boundary_classes() != 2) throw NoOppositeSector("layer does not have a pair of condensing boundaries");
    return mwpm_sector(g, 1 - reference.sector());
}

BitVec lift_correction(const LayerLattice& lat, std::size_t layer, const BitVec& local) {
    const auto& qubits = lat.topology.at(layer).qubits;
    if (local.size() != qubits.size()) throw DimensionMismatch("local correction length differs from layer size");
    BitVec out(lat.num_qubits());
    for (auto q : local.support()) out.set(qubits[q]);
    return out;
}

}  // namespace layercode
