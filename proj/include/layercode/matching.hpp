#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "layercode/lattice.hpp"

namespace layercode {

inline constexpr long kUnreachable = std::numeric_limits<long>::max() / 4;

/// Syndrome graph of one layer and one error type. Sites are local face indices for
/// X errors and local vertex indices for Z errors. Virtual node c stands for boundary class c.
class MatchingGraph {
public:
    MatchingGraph(const LayerLattice& lat, std::size_t layer, PauliType error_type, std::vector<int> sites);

    std::size_t layer() const { return layer_; }
    PauliType error_type() const { return type_; }
    const std::vector<int>& sites() const { return sites_; }
    std::size_t num_sites() const { return sites_.size(); }
    int boundary_classes() const { return classes_; }
    std::size_t layer_qubits() const { return qubit_sites_.size(); }

    /// Shortest in-layer distance between sites i and j (positions in `sites()`), never through a boundary.
    long distance(std::size_t i, std::size_t j) const { return dist_[i][sites_index(j)]; }
    long boundary_distance(std::size_t i, int cls) const { return bdist_[i][cls]; }
    /// Shortest string between boundary classes 0 and 1 (kUnreachable unless two classes exist).
    long class_distance() const { return class_dist_; }

    /// Local qubit paths realizing the distances above.
    std::vector<std::size_t> path(std::size_t i, std::size_t j) const;
    std::vector<std::size_t> boundary_path(std::size_t i, int cls) const;
    std::vector<std::size_t> class_path() const;

    /// Boundary class of a local qubit that touches a single site, else -1.
    int qubit_class(std::size_t local_qubit) const { return qubit_class_[local_qubit]; }

    void dump(std::ostream& out) const;

private:
    std::size_t sites_index(std::size_t j) const { return static_cast<std::size_t>(sites_[j]); }
    std::vector<std::size_t> trace(const std::vector<int>& parent_qubit, int node) const;
    std::vector<int> bfs(const std::vector<int>& sources, std::vector<long>& dist) const;

    std::size_t layer_;
    PauliType type_;
    std::vector<int> sites_;
    int classes_ = 0;
    std::size_t num_nodes_ = 0;
    // Layer graph: local qubit -> its one or two sites, and per-site incident qubits.
    std::vector<std::array<int, 2>> qubit_sites_;
    std::vector<int> qubit_class_;
    std::vector<std::vector<std::size_t>> site_qubits_;
    std::vector<std::vector<long>> dist_;      // per site: distance to every layer node
    std::vector<std::vector<int>> parent_;     // per site: BFS parent qubit of every layer node
    std::vector<std::array<long, 2>> bdist_;   // per site: distance to classes 0, 1
    std::vector<std::array<int, 2>> bqubit_;   // boundary qubit terminating that path
    std::vector<std::array<int, 2>> bnode_;    // node adjacent to that boundary qubit
    long class_dist_ = kUnreachable;
    std::vector<std::size_t> class_path_;
};

/// Graph for lit checks given as global check ids (Z-checks for X errors, X-checks for Z errors).
/// Throws SiteOffLayer when a check belongs to another layer.
MatchingGraph build_matching_graph(const LayerLattice& lat, std::size_t layer, PauliType error_type,
                                   const std::vector<std::size_t>& lit_checks);

struct MatchedPair {
    int a = 0;  ///< site position, or -1 - c for boundary class c
    int b = 0;
    long weight = 0;
};

struct MatchingResult {
    std::vector<MatchedPair> pairs;
    BitVec correction;  ///< over the layer's local qubits
    std::array<int, 2> boundary_parity{};
    long weight = 0;
    /// Parity of boundary class 0 usage; the layer's logical sector relative to the identity.
    int sector() const { return boundary_parity[0]; }
};

/// Minimum-weight perfect matching; virtual boundary nodes absorb any number of sites.
/// Throws InfeasibleParity when an odd site count meets a layer with no condensing boundary.
MatchingResult mwpm(const MatchingGraph& g);

/// Minimum-weight correction in the logical sector opposite to `reference`.
/// Throws NoOppositeSector unless the layer has exactly two boundary classes.
MatchingResult mwpm_minus(const MatchingGraph& g, const MatchingResult& reference);

/// Minimum-weight correction whose class-0 boundary parity equals `sector`.
MatchingResult mwpm_sector(const MatchingGraph& g, int sector);

/// Lifts a layer-local correction to lattice qubits.
BitVec lift_correction(const LayerLattice& lat, std::size_t layer, const BitVec& local);

}  // namespace layercode
