#include <random>
#include <string>
#include <utility>

#include "data_path.hpp"
#include "doctest.h"
#include "layercode/decoder.hpp"
#include "layercode/errors.hpp"

using namespace layercode;

namespace {

const LayerLattice& c422_plain() {
    static const auto lat = build_layer_code(load_css(data_file("c422.txt")), 3, false);
    return lat;
}

const LayerLattice& c422_extended() {
    static const auto lat = build_layer_code(load_css(data_file("c422.txt")), 3, true);
    return lat;
}

}  // namespace

TEST_CASE("empty syndrome decodes to identity") {
    const auto& lat = c422_plain();
    const PauliError none(lat.num_qubits());
    const auto s = extract_syndrome(lat, none);
    CHECK(decode_x(lat, s).correction.none());
    CHECK(decode_z(lat, s).correction.none());
    CHECK(recovery_map_check(lat, none));
}

TEST_CASE("fixture transcript follows the four stages") {
    const auto& lat = c422_plain();
    const auto e = load_error_file(lat, data_file("fixture_x_error.txt"));
    DecoderOptions opt;
    opt.transcript = true;
    opt.known_error = &e;
    const auto res = decode_x(lat, extract_syndrome(lat, e), opt);
    const std::vector<std::string> expected{
        "stage 1 blue[0] sites=1",      "stage 2 grey[0] sites=2",       "stage 2 grey[1] sites=1",
        "stage 3 parity red[0]=1",      "stage 3 input_correction X 0", "stage 3 flip grey[0]",
        "stage 4 red[0] sites=2",       "residual 0"};
    REQUIRE(res.transcript.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK_MESSAGE(res.transcript[i].rfind(expected[i], 0) == 0, res.transcript[i]);
    CHECK(res.deviations.empty());
    CHECK(res.input_correction.support() == std::vector<std::size_t>{0});
    PauliError er = e;
    er.x ^= res.correction;
    CHECK(extract_syndrome(lat, er).empty());
    CHECK(logical_failure_mask(lat, er) == 0);
}

TEST_CASE("dual Z fixture mirrors the transcript with colors swapped") {
    const auto& lat = c422_plain();
    const auto ex = load_error_file(lat, data_file("fixture_x_error.txt"));
    const auto ez = load_error_file(lat, data_file("fixture_z_error.txt"));
    DecoderOptions opt;
    opt.transcript = true;
    const auto rx = decode_x(lat, extract_syndrome(lat, ex), opt);
    const auto rz = decode_z(lat, extract_syndrome(lat, ez), opt);
    // Keep stage, layer and site count; weights and sectors depend on geometry.
    auto shape = [](std::string line, bool swap) {
        if (auto w = line.find(" weight="); w != std::string::npos) line.resize(w);
        if (auto w = line.find(" sector="); w != std::string::npos) line.resize(w);
        if (swap) {
            for (auto [from, to] : {std::pair<std::string, std::string>{"blue", "@"}, {"red", "blue"}, {"@", "red"}})
                for (auto p = line.find(from); p != std::string::npos; p = line.find(from, p + to.size()))
                    line.replace(p, from.size(), to);
            if (auto p = line.find("input_correction Z"); p != std::string::npos) line[p + 17] = 'X';
        }
        return line;
    };
    REQUIRE(rx.transcript.size() == rz.transcript.size());
    for (std::size_t i = 0; i < rx.transcript.size(); ++i) CHECK(shape(rx.transcript[i], false) == shape(rz.transcript[i], true));
    PauliError er = ez;
    er.z ^= rz.correction;
    CHECK(extract_syndrome(lat, er).empty());
    CHECK(logical_failure_mask(lat, er) == 0);
}

TEST_CASE("meta-checks on a code with a duplicated check") {
    const auto lat = build_layer_code(load_css(data_file("c422_redundant.txt")), 2, false);
    const auto& hx = lat.input.hx;
    CHECK(metacheck_validate(lat, BitVec(hx.rows()), PauliType::Z).ok);
    for (std::size_t q = 0; q < lat.input.n; ++q) {
        BitVec e(lat.input.n);
        e.set(q);
        auto sigma = hx.mul(e);
        CHECK(metacheck_validate(lat, sigma, PauliType::Z).ok);
        sigma.flip(0);
        const auto rep = metacheck_validate(lat, sigma, PauliType::Z);
        CHECK_FALSE(rep.ok);
        CHECK(rep.violated.size() == 1);
    }
    // A lattice syndrome whose stage-3 parities break the meta-check aborts the decode.
    LatticeSyndrome s{BitVec(lat.hz.rows()), BitVec(lat.hx.rows())};
    s.e.set(5);
    CHECK_THROWS_AS(decode_z(lat, s), InvalidSyndrome);
}

TEST_CASE("recovery check on stabilizers and logicals") {
    const auto& lat = c422_plain();
    PauliError stab(lat.num_qubits());
    stab.x = lat.hx.row(3) ^ lat.hx.row(17);
    stab.z = lat.hz.row(8);
    CHECK(recovery_map_check(lat, stab));
    for (std::size_t i = 0; i < lat.k(); ++i) {
        PauliError lx(lat.num_qubits());
        lx.x = lat.logicals_x[i];
        CHECK_FALSE(recovery_map_check(lat, lx));
        PauliError lz(lat.num_qubits());
        lz.z = lat.logicals_z[i];
        CHECK_FALSE(recovery_map_check(lat, lz));
    }
}

TEST_CASE("iid X noise at p = 0.01") {
    const auto& lat = c422_plain();
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution flip(0.01);
    std::size_t ok = 0, low = 0, low_ok = 0;
    const std::size_t samples = 10000;
    for (std::size_t i = 0; i < samples; ++i) {
        PauliError e(lat.num_qubits());
        for (std::size_t q = 0; q < lat.num_qubits(); ++q)
            if (flip(rng)) e.x.set(q);
        const bool good = recovery_map_check(lat, e);
        ok += good;
        if (e.x.weight() <= 1) {
            ++low;
            low_ok += good;
        }
    }
    MESSAGE("success " << ok << "/" << samples << ", weight <= 1: " << low_ok << "/" << low);
    CHECK(low_ok == low);
    CHECK(low > 0);
}

TEST_CASE("decoding is identical on 1 and 8 threads") {
    for (const auto* lat : {&c422_plain(), &c422_extended()}) {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 20; ++trial) {
            PauliError e(lat->num_qubits());
            for (int i = 0; i < 6; ++i) {
                e.x.flip(rng() % lat->num_qubits());
                e.z.flip(rng() % lat->num_qubits());
            }
            const auto s = extract_syndrome(*lat, e);
            DecoderOptions one, eight;
            one.transcript = eight.transcript = true;
            eight.threads = 8;
            for (auto t : {PauliType::X, PauliType::Z}) {
                const auto a = decode_type(*lat, s, t, one);
                const auto b = decode_type(*lat, s, t, eight);
                CHECK(a.correction == b.correction);
                CHECK(a.transcript == b.transcript);
            }
        }
    }
}

TEST_CASE("all weight-1 errors are corrected") {
    for (const auto* lat : {&c422_plain(), &c422_extended()}) {
        for (std::size_t q = 0; q < lat->num_qubits(); ++q) {
            for (auto t : {PauliType::X, PauliType::Z}) {
                PauliError e(lat->num_qubits());
                e.part(t).set(q);
                DecoderOptions opt;
                opt.known_error = &e;
                REQUIRE(recovery_map_check(*lat, e, opt));
            }
        }
    }
}
