#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "layercode/css.hpp"
#include "layercode/lattice.hpp"

namespace layercode {

struct DecoderOptions {
    InputDecoder input_decoder = default_input_decoder();
    std::size_t threads = 1;
    bool transcript = false;
    /// When set, the accumulated syndrome is recomputed from E·R at every stage boundary and compared.
    const PauliError* known_error = nullptr;
};

struct StageTiming {
    double wall_seconds = 0;
    double max_layer_seconds = 0;  ///< slowest single-layer solve within the stage
};

struct DecodeResult {
    PauliType error_type = PauliType::X;
    BitVec correction;        ///< over lattice qubits, same type as the error
    BitVec sigma;             ///< stage-3 parities of the last layer color (input-code syndrome)
    BitVec input_correction;  ///< input-code correction returned at stage 3
    std::vector<std::string> transcript;
    std::vector<std::string> deviations;  ///< stage-3 products that were not a pure sector flip
    StageTiming stages[4];
    double input_decoder_seconds = 0;

    /// Slowest layer per stage summed, plus the input decoder: the parallel critical path.
    double critical_path_seconds() const;
};

struct MetacheckReport {
    bool ok = true;
    /// Indices into the meta-check basis (left-kernel vectors of the check matrix) that fail.
    std::vector<std::size_t> violated;
    std::vector<BitVec> basis;
};

/// Checks that stage-3 parities form a valid input-code syndrome for errors of type t.
MetacheckReport metacheck_validate(const LayerLattice& lat, const BitVec& sigma, PauliType t);

/// Four-stage decoder for X errors (m syndromes): blue, grey, parity + input decoder, red.
DecodeResult decode_x(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt = {});
/// Mirror for Z errors: red, grey, parity + input decoder, blue.
DecodeResult decode_z(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt = {});
DecodeResult decode_type(const LayerLattice& lat, const LatticeSyndrome& s, PauliType t, const DecoderOptions& opt = {});

/// Decodes both sectors and returns the combined Pauli correction.
PauliError decode(const LayerLattice& lat, const LatticeSyndrome& s, const DecoderOptions& opt = {});

/// Success iff S(E·R) is empty and E·R acts trivially on every logical qubit. Decoder aborts count as failure.
bool recovery_map_check(const LayerLattice& lat, const PauliError& e, const DecoderOptions& opt = {});

}  // namespace layercode
