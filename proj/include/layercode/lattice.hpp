#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "layercode/css.hpp"
#include "layercode/gf2.hpp"

namespace layercode {

enum class LayerKind { Grey, Blue, Red };
enum class Plane { XZ, XY, YZ };
enum class Boundary { Rough, Smooth };
/// Patch sides in local (u, v) coordinates.
enum Side : int { Bottom = 0, Right = 1, Top = 2, Left = 3 };

const char* to_string(LayerKind k);

/// One surface-code sheet. Local coordinates: grey (u,v)=(x,z), blue (x,y), red (y,z);
/// the sheet sits at `offset` along its normal axis.
struct LayerSpec {
    LayerKind kind = LayerKind::Grey;
    Plane plane = Plane::XZ;
    std::size_t index = 0;  ///< input qubit, X-check or Z-check index
    int offset = 0;
    int u0 = 0, u1 = 0, v0 = 0, v1 = 0;
    std::array<Boundary, 4> sides{};

    int width() const { return u1 - u0; }
    int height() const { return v1 - v0; }
    bool operator==(const LayerSpec&) const = default;
};

enum class Axis { X, Y, Z };
enum class DefectColor { Blue, Red, Green };

/// Line defect realized as a degree-one chain map from `target` into `source`:
/// source line edges join target faces on one side of the line, and the target's
/// perpendicular edges on that side join the source's line vertices.
struct DefectLine {
    DefectColor color = DefectColor::Blue;
    Axis axis = Axis::X;
    std::array<int, 2> position{};    ///< the two fixed global coordinates (in x,y,z order, skipping `axis`)
    std::size_t source = 0;           ///< layer id; m-type syndromes branch out of it
    std::size_t target = 0;           ///< layer id; m-type syndromes branch into it
    int face_lo = 0, face_hi = 0;     ///< line cells [face_lo, face_hi) carrying the map on faces
    int vertex_lo = 0, vertex_hi = 0; ///< line vertices [vertex_lo, vertex_hi] carrying the map on edges
    bool operator==(const DefectLine&) const = default;
};

enum class SiteType { E, M };

struct CheckSite {
    std::size_t layer = 0;
    int u = 0, v = 0;
    SiteType type = SiteType::M;
};

/// Intrinsic (single-sheet) structure used by the per-layer matcher.
struct LayerTopology {
    std::vector<std::size_t> qubits;        ///< global qubit ids, local order
    std::vector<std::size_t> faces;         ///< global Z-check ids (m sites)
    std::vector<std::size_t> vertices;      ///< global X-check ids (e sites)
    /// For each local qubit: incident local faces / vertices (-1 when absent).
    std::vector<std::array<int, 2>> qubit_faces;
    std::vector<std::array<int, 2>> qubit_vertices;
    /// Boundary class when a qubit meets one site only (-1 otherwise), per sector.
    std::vector<int> face_boundary;
    std::vector<int> vertex_boundary;
    int face_boundary_classes = 0;
    int vertex_boundary_classes = 0;

    /// Grids over the sheet's (u, v) box holding global ids, -1 when the cell is absent.
    int u0 = 0, v0 = 0, nu = 0, nv = 0;  ///< vertex grid is (nu+1) x (nv+1)
    std::vector<long> h_edge, v_edge, vertex_id, face_id;

    long h_at(int u, int v) const { return grid(h_edge, u, v, nu, nv + 1); }
    long v_at(int u, int v) const { return grid(v_edge, u, v, nu + 1, nv); }
    long vertex_at(int u, int v) const { return grid(vertex_id, u, v, nu + 1, nv + 1); }
    long face_at(int u, int v) const { return grid(face_id, u, v, nu, nv); }

private:
    long grid(const std::vector<long>& g, int u, int v, int w, int h) const {
        const int a = u - u0, b = v - v0;
        if (a < 0 || b < 0 || a >= w || b >= h) return -1;
        return g[static_cast<std::size_t>(b) * static_cast<std::size_t>(w) + static_cast<std::size_t>(a)];
    }
};

struct QubitInfo {
    std::size_t layer = 0;
    std::array<int, 3> coord2{};  ///< doubled global coordinates of the edge midpoint
};

struct LayerLattice {
    CssCode input;
    std::size_t surface_scale = 3;
    bool extended = false;
    std::vector<LayerSpec> layers;
    std::vector<DefectLine> defects;
    std::vector<QubitInfo> qubits;
    BitMatrix hx;  ///< rows: vertices (X-checks)
    BitMatrix hz;  ///< rows: faces (Z-checks)
    std::vector<CheckSite> x_check_sites;
    std::vector<CheckSite> z_check_sites;
    std::vector<LayerTopology> topology;
    /// Global qubit id -> local index inside its layer.
    std::vector<std::size_t> local_index;
    std::vector<BitVec> logicals_x;
    std::vector<BitVec> logicals_z;
    /// Column adjacency: qubit -> checks containing it.
    std::vector<std::vector<std::size_t>> qubit_x_checks;
    std::vector<std::vector<std::size_t>> qubit_z_checks;
    int linear_size = 0;

    std::size_t num_qubits() const { return qubits.size(); }
    std::size_t k() const { return logicals_x.size(); }
    std::vector<std::size_t> layers_of(LayerKind kind) const;
    /// Checks that detect errors of type t (Z-checks for X errors).
    const BitMatrix& detecting(PauliType t) const { return t == PauliType::X ? hz : hx; }
    const std::vector<std::vector<std::size_t>>& qubit_detectors(PauliType t) const {
        return t == PauliType::X ? qubit_z_checks : qubit_x_checks;
    }
    const std::vector<CheckSite>& detector_sites(PauliType t) const {
        return t == PauliType::X ? z_check_sites : x_check_sites;
    }
    const std::vector<BitVec>& logicals(PauliType t) const { return t == PauliType::X ? logicals_x : logicals_z; }
};

/// Lit checks: `m` over Z-checks (faces), `e` over X-checks (vertices).
struct LatticeSyndrome {
    BitVec m;
    BitVec e;

    const BitVec& of(PauliType error_type) const { return error_type == PauliType::X ? m : e; }
    BitVec& of(PauliType error_type) { return error_type == PauliType::X ? m : e; }
    bool empty() const { return m.none() && e.none(); }
    bool operator==(const LatticeSyndrome&) const = default;
};

/// Lit checks grouped by layer, each as (u, v) sites.
struct LayerSites {
    std::size_t layer = 0;
    SiteType type = SiteType::M;
    std::vector<std::array<int, 2>> sites;
};
std::vector<LayerSites> syndrome_by_layer(const LayerLattice& lat, const LatticeSyndrome& s);

LayerLattice build_layer_code(const CssCode& code, std::size_t surface_scale = 3, bool extended = false);

/// Builds check matrices for explicit layers and defects without certifying them.
LayerLattice assemble_lattice(const CssCode& code, std::size_t surface_scale, bool extended,
                              std::vector<LayerSpec> layers, std::vector<DefectLine> defects);

/// Green defect segments between consecutive shared qubits of X-check a and Z-check b.
std::vector<std::array<int, 2>> green_segments(const CssCode& code, std::size_t a, std::size_t b,
                                               std::size_t surface_scale);

/// Places sheets for the input code (no defects).
std::vector<LayerSpec> place_layers(const CssCode& code, std::size_t surface_scale, bool extended);

/// Defect lines for the placed layers, including green segments between shared qubits.
std::vector<DefectLine> assign_defects(const CssCode& code, const std::vector<LayerSpec>& layers);

struct ValidationReport {
    bool commutes = false;
    std::size_t k = 0;
    std::size_t expected_k = 0;
    std::size_t max_check_weight = 0;
    int max_check_diameter = 0;  ///< lattice units, Chebyshev metric
    bool logicals_paired = false;
    bool checked_rank = false;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

inline constexpr std::size_t kMaxCheckWeight = 8;
inline constexpr int kMaxCheckDiameter = 2;

/// Commutation, k, locality and logical pairing. Rank-based k is skipped above
/// `rank_qubit_limit` qubits and reported as unchecked.
ValidationReport validate_lattice(const LayerLattice& lat, std::size_t expected_k,
                                  std::size_t rank_qubit_limit = 20000);

LatticeSyndrome extract_syndrome(const LayerLattice& lat, const PauliError& e);

enum class LogicalClass { I, X, Z, Y };
char to_char(LogicalClass c);

/// Per logical qubit class of a syndromeless operator. Throws NonCodeOperator otherwise.
std::vector<LogicalClass> logical_action(const LayerLattice& lat, const PauliError& p);
/// Bitmask of logical qubits acted on nontrivially.
std::uint64_t logical_failure_mask(const LayerLattice& lat, const PauliError& p);

/// Dressed lattice logicals built from an input-code logical of type t.
BitVec dress_logical(const LayerLattice& lat, const BitVec& input_logical, PauliType t);

/// Global qubit id of an edge given by layer, orientation ('h' along u, 'v' along v) and
/// its lower-left local vertex. Throws SiteOffLayer when absent.
std::size_t qubit_at(const LayerLattice& lat, LayerKind kind, std::size_t index, char orientation, int u, int v);

/// Error file: one flip per line, either `<X|Z> <grey|blue|red> <index> <h|v> <u> <v>` or `<X|Z> q <id>`.
/// `#` starts a comment. Flips on the same qubit cancel.
PauliError parse_error_text(const LayerLattice& lat, std::istream& in);
PauliError load_error_file(const LayerLattice& lat, const std::string& path);

std::string serialize_lattice(const LayerLattice& lat);
LayerLattice deserialize_lattice(const std::string& text);
void save_lattice(const LayerLattice& lat, const std::string& path);
LayerLattice load_lattice(const std::string& path);

}  // namespace layercode
