#include "layercode/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "layercode/errors.hpp"

namespace layercode {

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Grey: return "grey";
        case LayerKind::Blue: return "blue";
        case LayerKind::Red: return "red";
    }
    return "?";
}

char to_char(LogicalClass c) {
    switch (c) {
        case LogicalClass::I: return 'I';
        case LogicalClass::X: return 'X';
        case LogicalClass::Z: return 'Z';
        case LogicalClass::Y: return 'Y';
    }
    return '?';
}

std::vector<std::size_t> LayerLattice::layers_of(LayerKind kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].kind == kind) out.push_back(i);
    return out;
}

namespace {

int pos(std::size_t index, std::size_t scale) { return static_cast<int>(scale * (index + 1)); }

std::array<int, 3> to_global(const LayerSpec& l, int u, int v) {
    switch (l.plane) {
        case Plane::XZ: return {u, l.offset, v};
        case Plane::XY: return {u, v, l.offset};
        case Plane::YZ: return {l.offset, u, v};
    }
    return {};
}

bool vertex_exists(const LayerSpec& l, int u, int v) {
    if (u < l.u0 || u > l.u1 || v < l.v0 || v > l.v1) return false;
    if (u == l.u0 && l.sides[Left] == Boundary::Rough) return false;
    if (u == l.u1 && l.sides[Right] == Boundary::Rough) return false;
    if (v == l.v0 && l.sides[Bottom] == Boundary::Rough) return false;
    if (v == l.v1 && l.sides[Top] == Boundary::Rough) return false;
    return true;
}

// Groups condensing sides into boundary classes; adjacent condensing sides share a class.
std::array<int, 4> boundary_classes(const LayerSpec& l, Boundary condensing, int& count) {
    std::array<int, 4> cls{-1, -1, -1, -1};
    count = 0;
    std::array<bool, 4> cond{};
    for (int s = 0; s < 4; ++s) cond[s] = l.sides[s] == condensing;
    if (std::all_of(cond.begin(), cond.end(), [](bool c) { return c; })) {
        cls = {0, 0, 0, 0};
        count = 1;
        return cls;
    }
    // Start after a non-condensing side so runs do not wrap.
    int start = 0;
    while (cond[start]) ++start;
    for (int k = 1; k <= 4; ++k) {
        const int s = (start + k) % 4;
        if (!cond[s]) continue;
        const int prev = (s + 3) % 4;
        cls[s] = cond[prev] && cls[prev] >= 0 ? cls[prev] : count++;
    }
    return cls;
}

struct DefectGeometry {
    bool s_along_u;
    int s_fixed;
    bool t_along_u;
    int t_fixed;
};

DefectGeometry geometry(const DefectLine& d) {
    switch (d.color) {
        case DefectColor::Red: return {false, d.position[0], false, d.position[1]};
        case DefectColor::Blue: return {true, d.position[0], true, d.position[1]};
        case DefectColor::Green: return {false, d.position[0], true, d.position[1]};
    }
    return {};
}

}  // namespace

std::vector<LayerSpec> place_layers(const CssCode& code, std::size_t s, bool extended) {
    if (s < 2) throw std::invalid_argument("surface_scale must be at least 2");
    const int xmax = pos(code.hz.rows(), s);
    const int zmax = pos(code.hx.rows(), s);
    const int ymax = pos(code.n, s);
    std::vector<LayerSpec> layers;
    for (std::size_t i = 0; i < code.n; ++i) {
        LayerSpec l;
        l.kind = LayerKind::Grey;
        l.plane = Plane::XZ;
        l.index = i;
        l.offset = pos(i, s);
        l.u1 = xmax;
        l.v1 = zmax;
        l.sides = {Boundary::Rough, Boundary::Smooth, Boundary::Rough, Boundary::Smooth};
        layers.push_back(l);
    }
    auto y_range = [&](const BitVec& check) -> std::array<int, 2> {
        if (extended) return {0, ymax};
        const auto sup = check.support();
        if (sup.empty()) return {0, static_cast<int>(s)};
        return {pos(sup.front(), s) - 1, pos(sup.back(), s) + 1};
    };
    for (std::size_t a = 0; a < code.hx.rows(); ++a) {
        LayerSpec l;
        l.kind = LayerKind::Blue;
        l.plane = Plane::XY;
        l.index = a;
        l.offset = pos(a, s);
        l.u1 = xmax;
        const auto yr = y_range(code.hx.row(a));
        l.v0 = yr[0];
        l.v1 = yr[1];
        l.sides = {Boundary::Smooth, Boundary::Smooth, Boundary::Smooth, Boundary::Smooth};
        layers.push_back(l);
    }
    for (std::size_t b = 0; b < code.hz.rows(); ++b) {
        LayerSpec l;
        l.kind = LayerKind::Red;
        l.plane = Plane::YZ;
        l.index = b;
        l.offset = pos(b, s);
        const auto yr = y_range(code.hz.row(b));
        l.u0 = yr[0];
        l.u1 = yr[1];
        l.v1 = zmax;
        l.sides = {Boundary::Rough, Boundary::Rough, Boundary::Rough, Boundary::Rough};
        layers.push_back(l);
    }
    return layers;
}

std::vector<std::array<int, 2>> green_segments(const CssCode& code, std::size_t a, std::size_t b,
                                               std::size_t s) {
    std::vector<int> shared;
    for (std::size_t i = 0; i < code.n; ++i)
        if (code.hx.get(a, i) && code.hz.get(b, i)) shared.push_back(pos(i, s));
    std::vector<std::array<int, 2>> segs;
    for (std::size_t j = 0; j + 1 < shared.size(); j += 2) segs.push_back({shared[j], shared[j + 1]});
    return segs;
}

std::vector<DefectLine> assign_defects(const CssCode& code, const std::vector<LayerSpec>& layers) {
    const std::size_t n = code.n, rx = code.hx.rows(), rz = code.hz.rows();
    if (layers.size() != n + rx + rz) throw DefectAssignmentFailure("layer table does not match the input code");
    if (n == 0) return {};
    // Grey sheet 0 sits one scale unit from the origin.
    const auto s = static_cast<std::size_t>(layers[0].offset);
    const int xmax = layers[0].u1;
    const int zmax = layers[0].v1;
    std::vector<DefectLine> out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < rx; ++a) {
            if (!code.hx.get(a, i)) continue;
            DefectLine d;
            d.color = DefectColor::Blue;
            d.axis = Axis::X;
            d.position = {layers[i].offset, layers[n + a].offset};
            d.source = n + a;
            d.target = i;
            d.face_lo = 0;
            d.face_hi = xmax;
            d.vertex_lo = 0;
            d.vertex_hi = xmax;
            out.push_back(d);
        }
        for (std::size_t b = 0; b < rz; ++b) {
            if (!code.hz.get(b, i)) continue;
            DefectLine d;
            d.color = DefectColor::Red;
            d.axis = Axis::Z;
            d.position = {layers[n + rx + b].offset, layers[i].offset};
            d.source = i;
            d.target = n + rx + b;
            d.face_lo = 0;
            d.face_hi = zmax;
            d.vertex_lo = 0;
            d.vertex_hi = zmax;
            out.push_back(d);
        }
    }
    for (std::size_t a = 0; a < rx; ++a) {
        for (std::size_t b = 0; b < rz; ++b) {
            for (const auto& seg : green_segments(code, a, b, s)) {
                DefectLine d;
                d.color = DefectColor::Green;
                d.axis = Axis::Y;
                d.position = {layers[n + rx + b].offset, layers[n + a].offset};
                d.source = n + a;
                d.target = n + rx + b;
                d.face_lo = seg[0];
                d.face_hi = seg[1];
                d.vertex_lo = seg[0];
                d.vertex_hi = seg[1] - 1;
                out.push_back(d);
            }
        }
    }
    return out;
}

LayerLattice assemble_lattice(const CssCode& code, std::size_t surface_scale, bool extended,
                              std::vector<LayerSpec> layers, std::vector<DefectLine> defects) {
    LayerLattice lat;
    lat.input = code;
    lat.surface_scale = surface_scale;
    lat.extended = extended;
    lat.layers = std::move(layers);
    lat.defects = std::move(defects);

    std::vector<std::vector<std::size_t>> xrows, zrows;
    int extent = 0;
    for (std::size_t li = 0; li < lat.layers.size(); ++li) {
        const auto& l = lat.layers[li];
        LayerTopology t;
        t.u0 = l.u0;
        t.v0 = l.v0;
        t.nu = l.width();
        t.nv = l.height();
        if (t.nu < 1 || t.nv < 1) throw std::invalid_argument("degenerate layer extent");
        t.h_edge.assign(static_cast<std::size_t>(t.nu) * (t.nv + 1), -1);
        t.v_edge.assign(static_cast<std::size_t>(t.nu + 1) * t.nv, -1);
        t.vertex_id.assign(static_cast<std::size_t>(t.nu + 1) * (t.nv + 1), -1);
        t.face_id.assign(static_cast<std::size_t>(t.nu) * t.nv, -1);
        for (const auto& c : to_global(l, l.u1, l.v1)) extent = std::max(extent, c);

        auto add_qubit = [&](int u2, int v2) {
            QubitInfo q;
            q.layer = li;
            // Doubled coordinates: (u2, v2) are already doubled local coordinates.
            std::array<int, 3> c{};
            switch (l.plane) {
                case Plane::XZ: c = {u2, 2 * l.offset, v2}; break;
                case Plane::XY: c = {u2, v2, 2 * l.offset}; break;
                case Plane::YZ: c = {2 * l.offset, u2, v2}; break;
            }
            q.coord2 = c;
            lat.qubits.push_back(q);
            t.qubits.push_back(lat.qubits.size() - 1);
            return static_cast<long>(lat.qubits.size() - 1);
        };
        for (int v = l.v0; v <= l.v1; ++v)
            for (int u = l.u0; u < l.u1; ++u)
                if (vertex_exists(l, u, v) || vertex_exists(l, u + 1, v))
                    t.h_edge[static_cast<std::size_t>(v - l.v0) * t.nu + (u - l.u0)] = add_qubit(2 * u + 1, 2 * v);
        for (int v = l.v0; v < l.v1; ++v)
            for (int u = l.u0; u <= l.u1; ++u)
                if (vertex_exists(l, u, v) || vertex_exists(l, u, v + 1))
                    t.v_edge[static_cast<std::size_t>(v - l.v0) * (t.nu + 1) + (u - l.u0)] =
                        add_qubit(2 * u, 2 * v + 1);

        for (int v = l.v0; v <= l.v1; ++v)
            for (int u = l.u0; u <= l.u1; ++u) {
                if (!vertex_exists(l, u, v)) continue;
                std::vector<std::size_t> row;
                for (long q : {t.h_at(u - 1, v), t.h_at(u, v), t.v_at(u, v - 1), t.v_at(u, v)})
                    if (q >= 0) row.push_back(static_cast<std::size_t>(q));
                t.vertex_id[static_cast<std::size_t>(v - l.v0) * (t.nu + 1) + (u - l.u0)] =
                    static_cast<long>(xrows.size());
                t.vertices.push_back(xrows.size());
                lat.x_check_sites.push_back({li, u, v, SiteType::E});
                xrows.push_back(std::move(row));
            }
        for (int v = l.v0; v < l.v1; ++v)
            for (int u = l.u0; u < l.u1; ++u) {
                std::vector<std::size_t> row;
                for (long q : {t.h_at(u, v), t.h_at(u, v + 1), t.v_at(u, v), t.v_at(u + 1, v)})
                    if (q >= 0) row.push_back(static_cast<std::size_t>(q));
                t.face_id[static_cast<std::size_t>(v - l.v0) * t.nu + (u - l.u0)] = static_cast<long>(zrows.size());
                t.faces.push_back(zrows.size());
                lat.z_check_sites.push_back({li, u, v, SiteType::M});
                zrows.push_back(std::move(row));
            }

        // Intrinsic incidence for the matcher.
        int fcount = 0, vcount = 0;
        const auto fcls = boundary_classes(l, Boundary::Smooth, fcount);
        const auto vcls = boundary_classes(l, Boundary::Rough, vcount);
        t.face_boundary_classes = fcount;
        t.vertex_boundary_classes = vcount;
        auto local_face = [&](int u, int v) -> int {
            const long g = t.face_at(u, v);
            return g < 0 ? -1 : static_cast<int>(static_cast<std::size_t>(g) - t.faces.front());
        };
        auto local_vertex = [&](int u, int v) -> int {
            const long g = t.vertex_at(u, v);
            return g < 0 ? -1 : static_cast<int>(static_cast<std::size_t>(g) - t.vertices.front());
        };
        t.qubit_faces.resize(t.qubits.size());
        t.qubit_vertices.resize(t.qubits.size());
        t.face_boundary.assign(t.qubits.size(), -1);
        t.vertex_boundary.assign(t.qubits.size(), -1);
        const std::size_t first_qubit = t.qubits.empty() ? 0 : t.qubits.front();
        auto fill = [&](long q, std::array<int, 2> faces, int face_side, std::array<int, 2> verts, int vert_side) {
            if (q < 0) return;
            const auto k = static_cast<std::size_t>(q) - first_qubit;
            std::sort(faces.begin(), faces.end(), std::greater<>());
            std::sort(verts.begin(), verts.end(), std::greater<>());
            t.qubit_faces[k] = faces;
            t.qubit_vertices[k] = verts;
            if (faces[1] < 0 && faces[0] >= 0) t.face_boundary[k] = fcls[face_side];
            if (verts[1] < 0 && verts[0] >= 0) t.vertex_boundary[k] = vcls[vert_side];
        };
        for (int v = l.v0; v <= l.v1; ++v)
            for (int u = l.u0; u < l.u1; ++u) {
                const int fb = local_face(u, v - 1), ft = local_face(u, v);
                const int va = local_vertex(u, v), vb = local_vertex(u + 1, v);
                fill(t.h_at(u, v), {fb, ft}, fb < 0 ? Bottom : Top, {va, vb}, va < 0 ? Left : Right);
            }
        for (int v = l.v0; v < l.v1; ++v)
            for (int u = l.u0; u <= l.u1; ++u) {
                const int fl = local_face(u - 1, v), fr = local_face(u, v);
                const int va = local_vertex(u, v), vb = local_vertex(u, v + 1);
                fill(t.v_at(u, v), {fl, fr}, fl < 0 ? Left : Right, {va, vb}, va < 0 ? Bottom : Top);
            }
        lat.topology.push_back(std::move(t));
    }

    // Defect chain maps.
    auto toggle = [](std::vector<std::size_t>& row, std::size_t q) {
        auto it = std::find(row.begin(), row.end(), q);
        if (it == row.end()) row.push_back(q);
        else row.erase(it);
    };
    for (const auto& d : lat.defects) {
        const auto g = geometry(d);
        const auto& S = lat.topology.at(d.source);
        const auto& T = lat.topology.at(d.target);
        for (int t = d.face_lo; t < d.face_hi; ++t) {
            const long face = g.t_along_u ? T.face_at(t, g.t_fixed - 1) : T.face_at(g.t_fixed - 1, t);
            const long edge = g.s_along_u ? S.h_at(t, g.s_fixed) : S.v_at(g.s_fixed, t);
            if ((face < 0) != (edge < 0))
                throw DefectAssignmentFailure("defect line leaves one of its participating layers");
            if (face >= 0) toggle(zrows[static_cast<std::size_t>(face)], static_cast<std::size_t>(edge));
        }
        for (int t = d.vertex_lo; t <= d.vertex_hi; ++t) {
            const long edge = g.t_along_u ? T.v_at(t, g.t_fixed - 1) : T.h_at(g.t_fixed - 1, t);
            const long vert = g.s_along_u ? S.vertex_at(t, g.s_fixed) : S.vertex_at(g.s_fixed, t);
            if ((edge < 0) != (vert < 0))
                throw DefectAssignmentFailure("defect line endpoint does not match its layers' boundaries");
            if (edge >= 0) toggle(xrows[static_cast<std::size_t>(vert)], static_cast<std::size_t>(edge));
        }
    }
    for (auto& r : xrows) std::sort(r.begin(), r.end());
    for (auto& r : zrows) std::sort(r.begin(), r.end());

    const std::size_t nq = lat.qubits.size();
    lat.hx = BitMatrix::from_sparse(nq, xrows);
    lat.hz = BitMatrix::from_sparse(nq, zrows);
    lat.qubit_x_checks.assign(nq, {});
    lat.qubit_z_checks.assign(nq, {});
    for (std::size_t r = 0; r < xrows.size(); ++r)
        for (auto q : xrows[r]) lat.qubit_x_checks[q].push_back(r);
    for (std::size_t r = 0; r < zrows.size(); ++r)
        for (auto q : zrows[r]) lat.qubit_z_checks[q].push_back(r);
    lat.local_index.assign(nq, 0);
    for (const auto& t : lat.topology)
        for (std::size_t k = 0; k < t.qubits.size(); ++k) lat.local_index[t.qubits[k]] = k;
    lat.linear_size = extent;

    for (const auto& lx : code.logicals_x) lat.logicals_x.push_back(dress_logical(lat, lx, PauliType::X));
    for (const auto& lz : code.logicals_z) lat.logicals_z.push_back(dress_logical(lat, lz, PauliType::Z));
    return lat;
}

LayerLattice build_layer_code(const CssCode& code, std::size_t surface_scale, bool extended) {
    auto layers = place_layers(code, surface_scale, extended);
    auto defects = assign_defects(code, layers);
    auto lat = assemble_lattice(code, surface_scale, extended, std::move(layers), std::move(defects));
    if (!rows_orthogonal(lat.hx, lat.hz))
        throw CommutationViolation("constructed layer code checks do not commute");
    return lat;
}

BitVec dress_logical(const LayerLattice& lat, const BitVec& input_logical, PauliType t) {
    const auto& code = lat.input;
    const std::size_t n = code.n, rx = code.hx.rows();
    BitVec out(lat.num_qubits());
    auto flip = [&](long q) {
        if (q < 0) throw InternalInconsistency("dressed logical runs off its layer");
        out.flip(static_cast<std::size_t>(q));
    };
    const auto members = input_logical.support();
    if (t == PauliType::X) {
        // Grey strings across the bottom row of cells; red strings pair the branched m sites.
        for (auto i : members) {
            const auto& g = lat.topology[i];
            const auto& l = lat.layers[i];
            for (int u = l.u0; u <= l.u1; ++u) flip(g.v_at(u, l.v0));
        }
        for (std::size_t b = 0; b < code.hz.rows(); ++b) {
            std::vector<int> ys;
            for (auto i : members)
                if (code.hz.get(b, i)) ys.push_back(lat.layers[i].offset);
            if (ys.size() % 2) throw InternalInconsistency("input X logical anticommutes with a Z-check");
            const auto& r = lat.topology[n + rx + b];
            const int v0 = lat.layers[n + rx + b].v0;
            for (std::size_t j = 0; j < ys.size(); j += 2)
                for (int u = ys[j]; u < ys[j + 1]; ++u) flip(r.v_at(u, v0));
        }
    } else {
        // Grey strings up the left column; blue strings pair the branched e sites.
        for (auto i : members) {
            const auto& g = lat.topology[i];
            const auto& l = lat.layers[i];
            for (int v = l.v0; v < l.v1; ++v) flip(g.v_at(l.u0, v));
        }
        for (std::size_t a = 0; a < rx; ++a) {
            std::vector<int> ys;
            for (auto i : members)
                if (code.hx.get(a, i)) ys.push_back(lat.layers[i].offset);
            if (ys.size() % 2) throw InternalInconsistency("input Z logical anticommutes with an X-check");
            const auto& bl = lat.topology[n + a];
            const int u0 = lat.layers[n + a].u0;
            for (std::size_t j = 0; j < ys.size(); j += 2)
                for (int v = ys[j]; v < ys[j + 1]; ++v) flip(bl.v_at(u0, v));
        }
    }
    return out;
}

std::string ValidationReport::summary() const {
    std::ostringstream o;
    o << "commutes=" << (commutes ? "yes" : "no") << " k=" << k << " expected_k=" << expected_k
      << (checked_rank ? "" : " (rank unchecked)") << " max_check_weight=" << max_check_weight
      << " max_check_diameter=" << max_check_diameter << " logicals_paired=" << (logicals_paired ? "yes" : "no");
    for (const auto& v : violations) o << "\n  violation: " << v;
    return o.str();
}

ValidationReport validate_lattice(const LayerLattice& lat, std::size_t expected_k, std::size_t rank_qubit_limit) {
    ValidationReport rep;
    rep.expected_k = expected_k;
    rep.commutes = rows_orthogonal(lat.hx, lat.hz);
    if (!rep.commutes) rep.violations.push_back("HX * HZ^T != 0");

    const std::size_t nq = lat.num_qubits();
    if (nq <= rank_qubit_limit) {
        rep.checked_rank = true;
        const auto rx = rank_gf2(lat.hx), rz = rank_gf2(lat.hz);
        rep.k = nq - rx - rz;
        if (rep.k != expected_k)
            rep.violations.push_back("k = " + std::to_string(rep.k) + " differs from expected " +
                                     std::to_string(expected_k));
    } else {
        rep.k = lat.k();
    }

    for (const auto* m : {&lat.hx, &lat.hz}) {
        for (std::size_t r = 0; r < m->rows(); ++r) {
            const auto sup = m->row(r).support();
            rep.max_check_weight = std::max(rep.max_check_weight, sup.size());
            if (sup.empty()) continue;
            std::array<int, 3> lo = lat.qubits[sup[0]].coord2, hi = lo;
            for (auto q : sup)
                for (int a = 0; a < 3; ++a) {
                    lo[a] = std::min(lo[a], lat.qubits[q].coord2[a]);
                    hi[a] = std::max(hi[a], lat.qubits[q].coord2[a]);
                }
            for (int a = 0; a < 3; ++a) rep.max_check_diameter = std::max(rep.max_check_diameter, (hi[a] - lo[a] + 1) / 2);
        }
    }
    if (rep.max_check_weight > kMaxCheckWeight)
        rep.violations.push_back("check weight " + std::to_string(rep.max_check_weight) + " exceeds locality bound");
    if (rep.max_check_diameter > kMaxCheckDiameter)
        rep.violations.push_back("check diameter " + std::to_string(rep.max_check_diameter) +
                                 " exceeds locality bound");

    rep.logicals_paired = lat.logicals_x.size() == expected_k && lat.logicals_z.size() == expected_k;
    for (std::size_t i = 0; i < lat.logicals_x.size() && rep.logicals_paired; ++i) {
        if (lat.hz.mul(lat.logicals_x[i]).any() || lat.hx.mul(lat.logicals_z[i]).any()) rep.logicals_paired = false;
        for (std::size_t j = 0; j < lat.logicals_z.size(); ++j)
            if (lat.logicals_x[i].dot(lat.logicals_z[j]) != (i == j)) rep.logicals_paired = false;
    }
    if (!rep.logicals_paired) rep.violations.push_back("dressed logical operators are not a paired basis");
    return rep;
}

LatticeSyndrome extract_syndrome(const LayerLattice& lat, const PauliError& e) {
    if (e.size() != lat.num_qubits()) throw DimensionMismatch("error length differs from lattice qubit count");
    LatticeSyndrome s{BitVec(lat.hz.rows()), BitVec(lat.hx.rows())};
    for (auto q : e.x.support())
        for (auto c : lat.qubit_z_checks[q]) s.m.flip(c);
    for (auto q : e.z.support())
        for (auto c : lat.qubit_x_checks[q]) s.e.flip(c);
    return s;
}

std::vector<LayerSites> syndrome_by_layer(const LayerLattice& lat, const LatticeSyndrome& s) {
    std::vector<LayerSites> out;
    auto collect = [&](const BitVec& lit, const std::vector<CheckSite>& sites, SiteType type) {
        std::vector<LayerSites> per(lat.layers.size());
        for (auto c : lit.support()) per[sites[c].layer].sites.push_back({sites[c].u, sites[c].v});
        for (std::size_t l = 0; l < per.size(); ++l) {
            if (per[l].sites.empty()) continue;
            per[l].layer = l;
            per[l].type = type;
            out.push_back(std::move(per[l]));
        }
    };
    collect(s.m, lat.z_check_sites, SiteType::M);
    collect(s.e, lat.x_check_sites, SiteType::E);
    return out;
}

std::vector<LogicalClass> logical_action(const LayerLattice& lat, const PauliError& p) {
    if (!extract_syndrome(lat, p).empty()) throw NonCodeOperator("operator has a nonempty syndrome");
    std::vector<LogicalClass> out(lat.k());
    for (std::size_t i = 0; i < lat.k(); ++i) {
        const bool xpart = p.x.dot(lat.logicals_z[i]);
        const bool zpart = p.z.dot(lat.logicals_x[i]);
        out[i] = xpart ? (zpart ? LogicalClass::Y : LogicalClass::X) : (zpart ? LogicalClass::Z : LogicalClass::I);
    }
    return out;
}

std::uint64_t logical_failure_mask(const LayerLattice& lat, const PauliError& p) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < lat.k() && i < 64; ++i)
        if (p.x.dot(lat.logicals_z[i]) || p.z.dot(lat.logicals_x[i])) mask |= std::uint64_t{1} << i;
    return mask;
}

std::size_t qubit_at(const LayerLattice& lat, LayerKind kind, std::size_t index, char orientation, int u, int v) {
    for (std::size_t l = 0; l < lat.layers.size(); ++l) {
        if (lat.layers[l].kind != kind || lat.layers[l].index != index) continue;
        const auto& t = lat.topology[l];
        const long q = orientation == 'h' ? t.h_at(u, v) : orientation == 'v' ? t.v_at(u, v) : -1;
        if (q < 0) throw SiteOffLayer("no qubit at the requested edge");
        return static_cast<std::size_t>(q);
    }
    throw SiteOffLayer("no such layer");
}

PauliError parse_error_text(const LayerLattice& lat, std::istream& in) {
    PauliError e(lat.num_qubits());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string pauli, where;
        if (!(ls >> pauli)) continue;
        if ((pauli != "X" && pauli != "Z" && pauli != "Y") || !(ls >> where))
            throw ParseError("error file line " + std::to_string(lineno) + ": expected <X|Y|Z> <location>");
        std::size_t q = 0;
        if (where == "q") {
            if (!(ls >> q) || q >= lat.num_qubits())
                throw ParseError("error file line " + std::to_string(lineno) + ": bad qubit id");
        } else {
            LayerKind kind;
            if (where == "grey") kind = LayerKind::Grey;
            else if (where == "blue") kind = LayerKind::Blue;
            else if (where == "red") kind = LayerKind::Red;
            else throw ParseError("error file line " + std::to_string(lineno) + ": unknown layer kind " + where);
            std::size_t index = 0;
            std::string orient;
            int u = 0, v = 0;
            if (!(ls >> index >> orient >> u >> v) || (orient != "h" && orient != "v"))
                throw ParseError("error file line " + std::to_string(lineno) + ": expected <index> <h|v> <u> <v>");
            try {
                q = qubit_at(lat, kind, index, orient[0], u, v);
            } catch (const SiteOffLayer& ex) {
                throw ParseError("error file line " + std::to_string(lineno) + ": " + ex.what());
            }
        }
        if (pauli != "Z") e.x.flip(q);
        if (pauli != "X") e.z.flip(q);
    }
    return e;
}

PauliError load_error_file(const LayerLattice& lat, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open error file: " + path);
    return parse_error_text(lat, f);
}

namespace {

constexpr const char* kLatticeMagic = "layercode-lattice v1";

void write_sparse(std::ostream& o, const char* tag, const BitMatrix& m) {
    o << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (const auto& row : m.sparse_rows()) {
        o << row.size();
        for (auto c : row) o << ' ' << c;
        o << '\n';
    }
}

void write_vectors(std::ostream& o, const char* tag, const std::vector<BitVec>& vs) {
    o << tag << ' ' << vs.size() << '\n';
    for (const auto& v : vs) {
        const auto sup = v.support();
        o << sup.size();
        for (auto c : sup) o << ' ' << c;
        o << '\n';
    }
}

}  // namespace

std::string serialize_lattice(const LayerLattice& lat) {
    std::ostringstream o;
    o << kLatticeMagic << '\n';
    o << "scale " << lat.surface_scale << " extended " << (lat.extended ? 1 : 0) << '\n';
    o << "input\n" << format_css(lat.input);
    o << "layers " << lat.layers.size() << '\n';
    for (const auto& l : lat.layers)
        o << to_string(l.kind) << ' ' << l.index << ' ' << l.offset << ' ' << l.u0 << ' ' << l.u1 << ' ' << l.v0
          << ' ' << l.v1 << ' ' << (l.sides[0] == Boundary::Rough ? 'R' : 'S')
          << (l.sides[1] == Boundary::Rough ? 'R' : 'S') << (l.sides[2] == Boundary::Rough ? 'R' : 'S')
          << (l.sides[3] == Boundary::Rough ? 'R' : 'S') << '\n';
    o << "defects " << lat.defects.size() << '\n';
    for (const auto& d : lat.defects)
        o << static_cast<int>(d.color) << ' ' << d.position[0] << ' ' << d.position[1] << ' ' << d.source << ' '
          << d.target << ' ' << d.face_lo << ' ' << d.face_hi << ' ' << d.vertex_lo << ' ' << d.vertex_hi << '\n';
    o << "qubits " << lat.qubits.size() << '\n';
    for (const auto& q : lat.qubits)
        o << q.layer << ' ' << q.coord2[0] << ' ' << q.coord2[1] << ' ' << q.coord2[2] << '\n';
    write_sparse(o, "hx", lat.hx);
    write_sparse(o, "hz", lat.hz);
    write_vectors(o, "logicals_x", lat.logicals_x);
    write_vectors(o, "logicals_z", lat.logicals_z);
    o << "end\n";
    return o.str();
}

LayerLattice deserialize_lattice(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kLatticeMagic) throw ParseError("not a layercode-lattice v1 file");
    std::string ks, ke;
    std::size_t scale = 0;
    int ext = 0;
    if (!(in >> ks >> scale >> ke >> ext) || ks != "scale" || ke != "extended")
        throw ParseError("lattice file: bad parameter line");
    std::getline(in, line);
    if (!std::getline(in, line) || line != "input") throw ParseError("lattice file: missing input section");
    std::string header;
    if (!std::getline(in, header)) throw ParseError("lattice file: missing input header");
    std::istringstream hs(header);
    std::string kn, kx, kz;
    std::size_t n = 0, rx = 0, rz = 0;
    if (!(hs >> kn >> n >> kx >> rx >> kz >> rz)) throw ParseError("lattice file: bad input header");
    std::string code_text = header + "\n";
    for (std::size_t i = 0; i < rx + rz; ++i) {
        if (!std::getline(in, line)) throw ParseError("lattice file: truncated input code");
        code_text += line + "\n";
    }
    std::istringstream cs(code_text);
    const auto code = parse_css(cs);
    auto lat = build_layer_code(code, scale, ext != 0);
    const std::string rebuilt = serialize_lattice(lat);
    if (rebuilt != text) throw ParseError("lattice file does not match the lattice rebuilt from its input code");
    return lat;
}

void save_lattice(const LayerLattice& lat, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write lattice file: " + path);
    f << serialize_lattice(lat);
}

LayerLattice load_lattice(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open lattice file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return deserialize_lattice(buf.str());
}

}  // namespace layercode
