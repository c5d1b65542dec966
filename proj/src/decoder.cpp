#include "layercode/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <sstream>

#include "layercode/errors.hpp"
#include "layercode/matching.hpp"
#include "layercode/parallel.hpp"

namespace layercode {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string layer_name(const LayerLattice& lat, std::size_t layer) {
    return std::string(to_string(lat.layers[layer].kind)) + "[" + std::to_string(lat.layers[layer].index) + "]";
}

// Lit checks of type t grouped by layer, as local site indices.
std::vector<std::vector<std::size_t>> lit_by_layer(const LayerLattice& lat, const BitVec& xi, PauliType t) {
    std::vector<std::vector<std::size_t>> out(lat.layers.size());
    const auto& sites = lat.detector_sites(t);
    for (auto c : xi.support()) out[sites[c].layer].push_back(c);
    return out;
}

class Run {
public:
    Run(const LayerLattice& lat, const LatticeSyndrome& s, PauliType t, const DecoderOptions& opt)
        : lat_(lat), t_(t), opt_(opt), xi_(s.of(t)) {
        if (xi_.size() != lat.detecting(t).rows()) throw DimensionMismatch("syndrome length differs from check count");
        res_.error_type = t;
        res_.correction = BitVec(lat.num_qubits());
        first_ = t == PauliType::X ? LayerKind::Blue : LayerKind::Red;
        last_ = t == PauliType::X ? LayerKind::Red : LayerKind::Blue;
    }

    DecodeResult run() {
        const auto greys = lat_.layers_of(LayerKind::Grey);
        match_stage(1, lat_.layers_of(first_), false);
        expect_clear(1, first_);
        match_stage(2, greys, true);
        expect_clear(2, LayerKind::Grey);
        parity_stage();
        match_stage(4, lat_.layers_of(last_), false);
        if (xi_.any()) throw InternalInconsistency("syndrome remains after the final stage");
        note("residual 0");
        return std::move(res_);
    }

private:
    void note(const std::string& line) {
        if (opt_.transcript) res_.transcript.push_back(line);
    }

    void apply(const BitVec& global) {
        res_.correction ^= global;
        const auto& adj = lat_.qubit_detectors(t_);
        for (auto q : global.support())
            for (auto c : adj[q]) xi_.flip(c);
    }

    void verify_bookkeeping() {
        if (!opt_.known_error) return;
        PauliError er = *opt_.known_error;
        er.part(t_) ^= res_.correction;
        if (extract_syndrome(lat_, er).of(t_) != xi_)
            throw InternalInconsistency("tracked syndrome differs from the syndrome of E*R");
    }

    void match_stage(int stage, const std::vector<std::size_t>& layers, bool cache) {
        const auto t0 = Clock::now();
        const auto lit = lit_by_layer(lat_, xi_, t_);
        std::vector<std::optional<MatchingGraph>> graphs(layers.size());
        std::vector<MatchingResult> results(layers.size());
        std::vector<double> times(layers.size(), 0.0);
        parallel_for(layers.size(), opt_.threads, [&](std::size_t i) {
            const auto l = layers[i];
            // Empty grey layers are built lazily at stage 3 if the input correction names them.
            if (lit[l].empty()) return;
            const auto t1 = Clock::now();
            graphs[i].emplace(build_matching_graph(lat_, l, t_, lit[l]));
            try {
                results[i] = mwpm(*graphs[i]);
            } catch (const InfeasibleParity& e) {
                throw InternalInconsistency(std::string("stage ") + std::to_string(stage) + " " + e.what());
            }
            times[i] = seconds_since(t1);
        });
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (!graphs[i]) continue;
            const auto l = layers[i];
            if (!lit[l].empty()) {
                std::ostringstream o;
                o << "stage " << stage << ' ' << layer_name(lat_, l) << " sites=" << lit[l].size()
                  << " weight=" << results[i].weight;
                if (graphs[i]->boundary_classes() == 2) o << " sector=" << results[i].sector();
                note(o.str());
            }
            apply(lift_correction(lat_, l, results[i].correction));
            res_.stages[stage - 1].max_layer_seconds = std::max(res_.stages[stage - 1].max_layer_seconds, times[i]);
        }
        if (cache) {
            grey_graphs_ = std::move(graphs);
            grey_results_ = std::move(results);
            grey_layers_ = layers;
        }
        res_.stages[stage - 1].wall_seconds = seconds_since(t0);
        verify_bookkeeping();
    }

    void expect_clear(int stage, LayerKind kind) {
        const auto& sites = lat_.detector_sites(t_);
        for (auto c : xi_.support())
            if (lat_.layers[sites[c].layer].kind == kind)
                throw InternalInconsistency("stage " + std::to_string(stage) + " left syndromes on a " +
                                            to_string(kind) + " layer");
    }

    void parity_stage() {
        const auto t0 = Clock::now();
        const auto lasts = lat_.layers_of(last_);
        const auto& code = lat_.input;
        const auto& sites = lat_.detector_sites(t_);
        res_.sigma = BitVec(lasts.size());
        for (auto c : xi_.support()) {
            const auto l = sites[c].layer;
            if (lat_.layers[l].kind == last_) res_.sigma.flip(lat_.layers[l].index);
        }
        for (std::size_t j = 0; j < lasts.size(); ++j)
            note("stage 3 parity " + layer_name(lat_, lasts[j]) + "=" + (res_.sigma.get(j) ? "1" : "0"));

        const auto meta = metacheck_validate(lat_, res_.sigma, t_);
        if (!meta.ok) {
            std::string rows;
            for (auto v : meta.violated) rows += " " + std::to_string(v);
            throw InvalidSyndrome("stage-3 parities violate input-code meta-checks:" + rows);
        }
        const auto t1 = Clock::now();
        res_.input_correction = opt_.input_decoder(code, res_.sigma, t_);
        res_.input_decoder_seconds = seconds_since(t1);
        if (res_.input_correction.size() != code.n ||
            code.detecting(t_).mul(res_.input_correction) != res_.sigma)
            throw InternalInconsistency("input decoder returned a correction with the wrong syndrome");
        {
            std::ostringstream o;
            o << "stage 3 input_correction " << to_char(t_);
            const auto sup = res_.input_correction.support();
            if (sup.empty()) o << " none";
            for (auto q : sup) o << ' ' << q;
            note(o.str());
        }

        const auto& lit_now = lit_by_layer(lat_, xi_, t_);
        for (auto q : res_.input_correction.support()) {
            const auto pos = static_cast<std::size_t>(
                std::find(grey_layers_.begin(), grey_layers_.end(), q) - grey_layers_.begin());
            if (pos == grey_layers_.size()) throw InternalInconsistency("input correction names a missing grey layer");
            const auto layer = grey_layers_[pos];
            if (!grey_graphs_[pos]) {
                grey_graphs_[pos].emplace(build_matching_graph(lat_, layer, t_, {}));
                grey_results_[pos] = mwpm(*grey_graphs_[pos]);
            }
            const auto& g = *grey_graphs_[pos];
            const auto& c = grey_results_[pos];
            const auto cm = mwpm_minus(g, c);
            // Literal product C * C^- on the cached stage-2 syndrome.
            auto product = c.correction;
            product ^= cm.correction;
            if (!lit_now[layer].empty())
                res_.deviations.push_back(layer_name(lat_, layer) + ": syndromes present at stage 3");
            if (cm.sector() == c.sector())
                res_.deviations.push_back(layer_name(lat_, layer) + ": product is not a sector flip");
            std::ostringstream o;
            o << "stage 3 flip " << layer_name(lat_, layer) << " weight=" << cm.weight << " sector=" << cm.sector();
            note(o.str());
            apply(lift_correction(lat_, layer, product));
        }
        res_.stages[2].max_layer_seconds = res_.input_decoder_seconds;
        res_.stages[2].wall_seconds = seconds_since(t0);
        verify_bookkeeping();

        BitVec after(lasts.size());
        for (auto c : xi_.support()) {
            const auto l = sites[c].layer;
            if (lat_.layers[l].kind == last_) after.flip(lat_.layers[l].index);
        }
        if (after.any()) throw InternalInconsistency("odd parity remains on a " + std::string(to_string(last_)) + " layer after stage 3");
        expect_clear(3, first_);
        expect_clear(3, LayerKind::Grey);
    }

    const LayerLattice& lat_;
    PauliType t_;
    const DecoderOptions& opt_;
    BitVec xi_;
    DecodeResult res_;
    LayerKind first_, last_;
    std::vector<std::optional<MatchingGraph>> grey_graphs_;
    std::vector<MatchingResult> grey_results_;
    std::vector<std::size_t> grey_layers_;
};

}  // namespace

double DecodeResult::critical_path_seconds() const {
    double t = input_decoder_seconds;
    for (int s : {0, 1, 3}) t += stages[s].max_layer_seconds;
    return t;
}

MetacheckReport metacheck_validate(const LayerLattice& lat, const BitVec& sigma, PauliType t) {
    const auto& h = lat.input.detecting(t);
    if (sigma.size() != h.rows()) throw DimensionMismatch("parity vector length differs from input check count");
    MetacheckReport rep;
    rep.basis = kernel_basis(h.transpose());
    for (std::size_t i = 0; i < rep.basis.size(); ++i)
        if (rep.basis[i].dot(sigma)) rep.violated.push_back(i);
    rep.ok = rep.violated.empty();
    return rep;
}

DecodeResult decode_type(const LayerLattice& lat, const LatticeSyndrome& s, PauliType t, const DecoderOptions& opt) {
    return Run(lat, s, t, opt).run();
}

DecodeResult decode_x(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt) {
    return decode_type(lat, s, PauliType::X, opt);
}

DecodeResult decode_z(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt) {
    return decode_type(lat, s, PauliType::Z, opt);
}

PauliError decode(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt) {
    PauliError r(lat.num_qubits());
    r.x = decode_x(lat, s, opt).correction;
    r.z = decode_z(lat, s, opt).correction;
    return r;
}

bool recovery_map_check(const LayerLattice& lat, const PauliError& e, const DecoderOptions& opt) {
    const auto s = extract_syndrome(lat, e);
    PauliError er = e;
    try {
        er ^= decode(lat, s, opt);
    } catch (const Error&) {
        return false;
    }
    if (!extract_syndrome(lat, er).empty()) return false;
    return logical_failure_mask(lat, er) == 0;
}

}  // namespace layercode
