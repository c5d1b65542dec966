#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "layercode/analysis.hpp"
#include "layercode/decoder.hpp"
#include "layercode/errors.hpp"
#include "layercode/lattice.hpp"
#include "layercode/thermal.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace layercode;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDecode = 3, kBudget = 4 };

class ConfigError : public ParseError {
public:
    using ParseError::ParseError;
};

struct Common {
    std::string config_path;
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::string output_dir;
};

std::string hex64(std::uint64_t v) {
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << v;
    return o.str();
}

// FNV-1a over the canonical dump (object keys are sorted).
std::string config_hash(const json& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : cfg.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string resolve_path(const std::string& p, const std::string& config_path) {
    if (p.empty() || fs::path(p).is_absolute() || fs::exists(p) || config_path.empty()) return p;
    const auto alt = fs::path(config_path).parent_path() / p;
    return fs::exists(alt) ? alt.string() : p;
}

std::uint64_t resolve_seed(Common& c, const json& cfg) {
    if (c.seed) return *c.seed;
    if (cfg.contains("seed")) return get_or<std::uint64_t>(cfg, "seed", 0);
    std::random_device rd;
    const std::uint64_t s = (std::uint64_t{rd()} << 32) ^ rd();
    std::cerr << "seed " << s << " (drawn)\n";
    return s;
}

std::string output_dir(const Common& c, const json& cfg) {
    if (const char* env = std::getenv("LAYERCODE_OUTPUT_DIR"); env && *env) return env;
    if (!c.output_dir.empty()) return c.output_dir;
    return get_or<std::string>(cfg, "output_dir", ".");
}

fs::path ensure_dir(const std::string& d) {
    fs::create_directories(d);
    return fs::path(d);
}

// Line-atomic appends: each record is formatted fully, then written and flushed as one call.
class LineWriter {
public:
    explicit LineWriter(const fs::path& p) : f_(std::fopen(p.string().c_str(), "w")) {
        if (!f_) throw ConfigError("cannot write " + p.string());
    }
    ~LineWriter() {
        if (f_) std::fclose(f_);
    }
    LineWriter(const LineWriter&) = delete;
    LineWriter& operator=(const LineWriter&) = delete;
    void line(const std::string& s) {
        const std::string l = s + "\n";
        std::fwrite(l.data(), 1, l.size(), f_);
        std::fflush(f_);
    }

private:
    std::FILE* f_;
};

LayerLattice lattice_from(const json& cfg, const std::string& cfg_path) {
    const auto lattice_file = resolve_path(get_or<std::string>(cfg, "lattice", ""), cfg_path);
    if (!lattice_file.empty()) return load_lattice(lattice_file);
    const auto input = resolve_path(get_or<std::string>(cfg, "input", ""), cfg_path);
    if (input.empty()) throw ConfigError("config needs 'input' (code file) or 'lattice'");
    return build_layer_code(load_css(input), get_or<std::size_t>(cfg, "surface_scale", 3),
                            get_or<bool>(cfg, "extended", false));
}

std::string stem_for(const json& cfg) {
    auto s = fs::path(get_or<std::string>(cfg, "input", "code")).stem().string();
    s += "_s" + std::to_string(get_or<std::size_t>(cfg, "surface_scale", 3));
    if (get_or<bool>(cfg, "extended", false)) s += "_ext";
    return s;
}

std::string layer_counts(const LayerLattice& lat) {
    std::ostringstream o;
    o << "grey=" << lat.layers_of(LayerKind::Grey).size() << " blue=" << lat.layers_of(LayerKind::Blue).size()
      << " red=" << lat.layers_of(LayerKind::Red).size() << " k=" << lat.k();
    return o.str();
}

// ---- verbs -----------------------------------------------------------------

int cmd_build(Common& c, json cfg, const std::string& input, std::optional<std::size_t> scale, bool extended,
              const std::string& out_file) {
    if (!input.empty()) cfg["input"] = input;
    if (scale) cfg["surface_scale"] = *scale;
    if (extended) cfg["extended"] = true;
    if (!cfg.contains("surface_scale")) cfg["surface_scale"] = 3;
    if (!cfg.contains("extended")) cfg["extended"] = false;
    const auto code = load_css(resolve_path(get_or<std::string>(cfg, "input", ""), c.config_path));
    const auto lat = build_layer_code(code, cfg["surface_scale"].get<std::size_t>(), cfg["extended"].get<bool>());
    const auto rep = validate_lattice(lat, code.k);
    const auto hash = config_hash(cfg);

    std::ostringstream report;
    report << layer_counts(lat) << "\n";
    report << "qubits=" << lat.num_qubits() << " xchecks=" << lat.hx.rows() << " zchecks=" << lat.hz.rows()
           << " N=" << lat.hx.rows() + lat.hz.rows() << " L=" << lat.linear_size << "\n";
    report << rep.summary() << "\n";
    report << "config_hash=" << hash << "\n";
    std::cout << report.str();

    const fs::path dir = ensure_dir(output_dir(c, cfg));
    const fs::path lat_path = out_file.empty() ? dir / (stem_for(cfg) + ".lattice") : fs::path(out_file);
    save_lattice(lat, lat_path.string());
    std::ofstream(lat_path.string() + ".report.txt") << report.str();
    std::cout << "wrote " << lat_path.string() << "\n";
    if (!rep.ok()) {
        for (const auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
        return kFailure;
    }
    return kOk;
}

LatticeSyndrome load_syndrome(const LayerLattice& lat, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open syndrome file " + path);
    LatticeSyndrome s{BitVec(lat.hz.rows()), BitVec(lat.hx.rows())};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string kind;
        std::size_t id;
        if (!(ls >> kind)) continue;
        if (!(ls >> id) || (kind != "m" && kind != "e"))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'm <face>' or 'e <vertex>'");
        auto& v = kind == "m" ? s.m : s.e;
        if (id >= v.size()) throw ParseError(path + ":" + std::to_string(lineno) + ": check id out of range");
        v.flip(id);
    }
    return s;
}

int cmd_decode(Common& c, json cfg, const std::string& lattice_file, const std::string& error_file,
               const std::string& syndrome_file, bool quiet) {
    if (!lattice_file.empty()) cfg["lattice"] = lattice_file;
    auto dcfg = cfg.value("decode", json::object());
    if (!error_file.empty()) dcfg["error_file"] = error_file;
    if (!syndrome_file.empty()) dcfg["syndrome_file"] = syndrome_file;
    cfg["decode"] = dcfg;
    const auto lat = lattice_from(cfg, c.config_path);
    const auto efile = resolve_path(get_or<std::string>(dcfg, "error_file", ""), c.config_path);
    const auto sfile = resolve_path(get_or<std::string>(dcfg, "syndrome_file", ""), c.config_path);
    if (efile.empty() == sfile.empty()) throw ConfigError("decode needs exactly one of an error file or a syndrome file");

    std::optional<PauliError> err;
    LatticeSyndrome syn;
    if (!efile.empty()) {
        err = load_error_file(lat, efile);
        syn = extract_syndrome(lat, *err);
    } else {
        syn = load_syndrome(lat, sfile);
    }
    DecoderOptions opt;
    opt.threads = c.threads;
    opt.transcript = true;
    if (err) opt.known_error = &*err;

    const auto hash = config_hash(cfg);
    std::cout << "# config_hash=" << hash << "\n";
    PauliError r(lat.num_qubits());
    for (auto t : {PauliType::X, PauliType::Z}) {
        if (syn.of(t).none()) {
            std::cout << "correction " << to_char(t) << " none\n";
            continue;
        }
        DecodeResult res;
        try {
            res = decode_type(lat, syn, t, opt);
        } catch (const InvalidSyndrome& e) {
            std::cerr << "decode " << to_char(t) << " aborted: " << e.what() << "\n";
            return kDecode;
        } catch (const Error& e) {
            std::cerr << "decode " << to_char(t) << " aborted: " << e.what() << "\n";
            return kDecode;
        }
        r.part(t) = res.correction;
        if (!quiet)
            for (const auto& l : res.transcript) std::cout << "[" << to_char(t) << "] " << l << "\n";
        std::cout << "correction " << to_char(t);
        for (auto q : res.correction.support()) std::cout << ' ' << q;
        std::cout << "\n";
    }
    // Residual: syndrome of the correction must reproduce the input syndrome.
    const auto rs = extract_syndrome(lat, r);
    const bool residual_empty = rs.m == syn.m && rs.e == syn.e;
    std::cout << "residual " << (residual_empty ? 0 : 1) << "\n";
    if (!residual_empty) return kDecode;
    if (err) {
        PauliError er = *err;
        er ^= r;
        const auto mask = logical_failure_mask(lat, er);
        std::cout << "logical_failure_mask " << mask << "\n";
    }
    return kOk;
}

int cmd_thermal(Common& c, json cfg, bool dry_run) {
    auto tc = cfg.value("thermal", json::object());
    const auto seed = resolve_seed(c, cfg);
    cfg["seed"] = seed;
    MemoryExperiment exp;
    exp.betas = get_or<std::vector<double>>(tc, "betas", {1.0});
    exp.t_max = get_or<double>(tc, "t_max", 20.0);
    const auto t_first = get_or<double>(tc, "t_first", exp.t_max / 100);
    const auto count = get_or<std::size_t>(tc, "checkpoints", 20);
    exp.checkpoints = tc.contains("checkpoint_times") ? tc["checkpoint_times"].get<std::vector<double>>()
                                                      : geometric_schedule(t_first, exp.t_max, count);
    for (double t : exp.checkpoints)
        if (t > exp.t_max || t <= 0) throw ConfigError("checkpoints must lie in (0, t_max]");
    exp.trajectories = get_or<std::size_t>(tc, "trajectories", 30);
    exp.min_trajectories = get_or<std::size_t>(tc, "min_trajectories", 30);
    if (exp.min_trajectories < 2) throw ConfigError("min_trajectories must be at least 2");
    exp.bootstrap_samples = get_or<std::size_t>(tc, "bootstrap", 1000);
    exp.confidence = get_or<double>(tc, "confidence", 0.90);
    const auto rate = get_or<std::string>(tc, "rate", "metropolis");
    if (rate == "metropolis") exp.rate_kind = RateKind::Metropolis;
    else if (rate == "glauber") exp.rate_kind = RateKind::Glauber;
    else throw ConfigError("rate must be metropolis or glauber");
    exp.trajectory.identity_decoder = get_or<bool>(tc, "identity_decoder", false);
    exp.master_seed = seed;
    exp.threads = c.threads;
    if (exp.trajectories < exp.min_trajectories)
        throw ConfigError("trajectories (" + std::to_string(exp.trajectories) + ") below min_trajectories (" +
                          std::to_string(exp.min_trajectories) + ")");
    const auto hash = config_hash(cfg);
    const auto dir = output_dir(c, cfg);

    if (dry_run) {
        std::cout << "plan config_hash=" << hash << " seed=" << seed << "\n";
        std::cout << "  lattice: " << get_or<std::string>(cfg, "lattice", get_or<std::string>(cfg, "input", "?"))
                  << " scale=" << get_or<std::size_t>(cfg, "surface_scale", 3)
                  << " extended=" << get_or<bool>(cfg, "extended", false) << "\n";
        std::cout << "  betas:";
        for (double b : exp.betas) std::cout << ' ' << b;
        std::cout << "\n  trajectories=" << exp.trajectories << " checkpoints=" << exp.checkpoints.size()
                  << " t_max=" << exp.t_max << " rate=" << rate << "\n";
        std::cout << "  records=" << exp.betas.size() * exp.trajectories * exp.checkpoints.size() << " -> " << dir
                  << "\n";
        return kOk;
    }
    const auto lat = lattice_from(cfg, c.config_path);
    const fs::path out = ensure_dir(dir);
    LineWriter records(out / "thermal_records.jsonl");
    LineWriter summary(out / "thermal_summary.csv");
    summary.line("# config_hash=" + hash + " seed=" + std::to_string(seed));
    summary.line("beta,L,t_mem,ci_low,ci_high,censored,trajectories");
    std::cout << "# config_hash=" << hash << " seed=" << seed << "\n";
    std::cout << std::setw(8) << "beta" << std::setw(6) << "L" << std::setw(14) << "T_mem" << std::setw(14)
              << "ci_low" << std::setw(14) << "ci_high" << "\n";
    estimate_memory_time(lat, exp, [&](const MemoryCell& cell) {
        for (const auto& run : cell.runs)
            for (const auto& cp : run.checkpoints) {
                json r = {{"beta", cell.beta},
                          {"L", cell.L},
                          {"seed", run.seed},
                          {"checkpoint_time", cp.time},
                          {"failed_logicals_bitmask", cp.failed_mask},
                          {"decode_aborted", cp.aborted},
                          {"config_hash", hash},
                          {"master_seed", seed}};
                records.line(r.dump());
            }
        std::ostringstream row;
        row << std::setprecision(10) << cell.beta << ',' << cell.L << ',';
        if (cell.t_mem) row << *cell.t_mem;
        else row << "censored>" << exp.t_max;
        row << ',' << cell.ci_low << ',' << cell.ci_high << ',' << (cell.censored ? 1 : 0) << ',' << cell.runs.size();
        summary.line(row.str());
        std::cout << std::setw(8) << cell.beta << std::setw(6) << cell.L << std::setw(14)
                  << (cell.t_mem ? std::to_string(*cell.t_mem) : "censored") << std::setw(14) << cell.ci_low
                  << std::setw(14) << cell.ci_high << "\n";
    });
    return kOk;
}

int cmd_sample(Common& c, json cfg) {
    auto sc = cfg.value("sample", json::object());
    const auto seed = resolve_seed(c, cfg);
    cfg["seed"] = seed;
    const auto lat = lattice_from(cfg, c.config_path);
    const auto mode = get_or<std::string>(sc, "mode", "walk");
    const auto hash = config_hash(cfg);
    std::cout << "# config_hash=" << hash << " seed=" << seed << "\n";
    if (mode == "walk") {
        BarrierTestOptions o;
        o.penalty_budget = get_or<std::size_t>(sc, "penalty_budget", 0);
        o.samples = get_or<std::size_t>(sc, "samples", 1000);
        o.walk_length = get_or<std::size_t>(sc, "walk_length", 64);
        o.seed = seed;
        o.threads = c.threads;
        const auto r = decoder_barrier_test(lat, o);
        std::cout << "penalty_budget=" << o.penalty_budget << " samples=" << r.samples << " successes=" << r.successes
                  << " fraction=" << r.success_fraction() << "\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(r.failing_walks.size(), 5); ++i) {
            std::cout << "failing walk:";
            for (const auto& s : r.failing_walks[i]) std::cout << " " << s;
            std::cout << "\n";
        }
        return kOk;
    }
    if (mode == "weight") {
        DistanceOptions o;
        o.max_weight = get_or<std::size_t>(sc, "max_weight", 2);
        o.enumeration_budget = c.budget.value_or(get_or<std::size_t>(sc, "enumeration_budget", 500000));
        o.samples = get_or<std::size_t>(sc, "samples", 2000);
        o.seed = seed;
        o.threads = c.threads;
        const auto r = distance_fraction_test(lat, o);
        std::cout << "weight,trials,successes,exhaustive\n";
        for (const auto& w : r.curve)
            std::cout << w.weight << ',' << w.trials << ',' << w.successes << ',' << (w.exhaustive ? 1 : 0) << "\n";
        std::cout << "guaranteed_weight=" << r.guaranteed_weight << "\n";
        return kOk;
    }
    throw ConfigError("sample mode must be walk or weight");
}

int cmd_barrier(Common& c, json cfg) {
    auto bc = cfg.value("barrier", json::object());
    BarrierOptions o;
    const auto mode = get_or<std::string>(bc, "mode", "exhaustive");
    if (mode == "beam") o.mode = BarrierMode::Beam;
    else if (mode != "exhaustive") throw ConfigError("barrier mode must be exhaustive or beam");
    o.beam_width = get_or<std::size_t>(bc, "beam_width", 64);
    o.state_budget = c.budget.value_or(get_or<std::size_t>(bc, "state_budget", std::size_t{1} << 22));
    if (bc.contains("target_class")) o.target_class = bc["target_class"].get<std::uint64_t>();
    const auto type_s = get_or<std::string>(bc, "type", "X");
    if (type_s != "X" && type_s != "Z") throw ConfigError("barrier type must be X or Z");
    const auto t = type_s == "X" ? PauliType::X : PauliType::Z;
    const auto on = get_or<std::string>(bc, "on", "lattice");
    const auto hash = config_hash(cfg);

    BarrierSearchResult r;
    std::size_t n = 0;
    if (on == "input") {
        const auto code = load_css(resolve_path(get_or<std::string>(cfg, "input", ""), c.config_path));
        r = energy_barrier_search(code, t, o);
        n = code.n;
    } else if (on == "lattice") {
        const auto lat = lattice_from(cfg, c.config_path);
        r = energy_barrier_search(lat, t, o);
        n = lat.num_qubits();
    } else {
        throw ConfigError("barrier 'on' must be input or lattice");
    }
    json rec = {{"type", std::string(1, to_char(t))},
                {"on", on},
                {"qubits", n},
                {"target_class", r.target_class},
                {"barrier", r.barrier},
                {"exhaustive", r.exhaustive},
                {"states_visited", r.states_visited},
                {"path", r.path},
                {"config_hash", hash}};
    std::cout << rec.dump() << "\n";
    return kOk;
}

BoundParams bound_params(const json& j, const BoundParams& base) {
    BoundParams p = base;
    p.a = get_or<double>(j, "a", p.a);
    p.beta = get_or<double>(j, "beta", p.beta);
    p.m = get_or<double>(j, "m", p.m);
    p.k = get_or<double>(j, "k", p.k);
    p.N = get_or<double>(j, "N", p.N);
    p.L = get_or<double>(j, "L", p.L);
    p.r = get_or<double>(j, "r", p.r);
    p.c = get_or<double>(j, "c", p.c);
    p.v = get_or<double>(j, "v", p.v);
    validate(p);
    return p;
}

int cmd_bounds(Common& c, json cfg, const std::string& out_file) {
    auto bc = cfg.value("bounds", cfg);
    const auto base = bound_params(bc, BoundParams{});
    const double t0 = get_or<double>(bc, "t", 1.0);
    std::vector<std::pair<BoundParams, double>> rows;
    std::string swept;
    if (bc.contains("sweep")) {
        const auto& sw = bc["sweep"];
        if (!sw.is_object() || sw.size() != 1) throw ConfigError("sweep must name exactly one parameter");
        swept = sw.begin().key();
        for (const auto& v : sw.begin().value()) {
            json point = bc;
            point.erase("sweep");
            point[swept] = v;
            rows.emplace_back(bound_params(point, base), get_or<double>(point, "t", t0));
        }
    } else {
        rows.emplace_back(base, t0);
    }
    const auto hash = config_hash(cfg);
    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    write_bounds_csv(csv, rows);
    if (rows.size() > 1) {
        // Footer: direction of each column along the sweep.
        auto trend = [&](auto f) {
            bool inc = true, dec = true;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const double a = f(rows[i - 1]), b = f(rows[i]);
                inc = inc && b >= a;
                dec = dec && b <= a;
            }
            return inc ? (dec ? "constant" : "increasing") : (dec ? "decreasing" : "non-monotone");
        };
        csv << "# sweep " << swept << ": eps_bound_log "
            << trend([](const auto& r) { return epsilon_bound(r.first, r.second).closed_form_log; }) << ", tmem_log "
            << trend([](const auto& r) { return tmem_bound(r.first).general_log; }) << ", Lstar_conservative "
            << trend([](const auto& r) { return tmem_bound(r.first).lstar_conservative; }) << ", Lstar_refined "
            << trend([](const auto& r) { return tmem_bound(r.first).lstar_refined; }) << "\n";
    }
    if (out_file.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream(out_file) << csv.str();
        std::cout << "wrote " << out_file << "\n";
    }
    return kOk;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

// Concatenates CSVs with identical headers into one table with a source column.
int cmd_report(const std::vector<std::string>& files, const std::string& out_file) {
    std::map<std::string, std::vector<std::string>> tables;
    std::vector<std::string> order;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open " + f);
        std::string line, header;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (header.empty()) {
                header = line;
                if (!tables.count(header)) order.push_back(header);
                tables[header];
                continue;
            }
            tables[header].push_back(f + "," + line);
        }
    }
    std::ostringstream o;
    for (const auto& h : order) {
        o << "source," << h << "\n";
        for (const auto& r : tables[h]) o << r << "\n";
        o << "\n";
    }
    if (out_file.empty()) std::cout << o.str();
    else std::ofstream(out_file) << o.str();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layer Code lab: build, decode, simulate and analyze layer codes"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", common.seed, "master seed");
    app.add_option("--budget", common.budget, "search or enumeration budget");
    app.add_option("--output-dir", common.output_dir, "output directory (LAYERCODE_OUTPUT_DIR overrides)");

    auto* build = app.add_subcommand("build", "construct and validate a layer code");
    std::string build_input, build_out;
    std::optional<std::size_t> build_scale;
    bool build_ext = false;
    build->add_option("input", build_input, "input code file");
    build->add_option("--scale", build_scale, "surface scale");
    build->add_flag("--extended", build_ext, "extended variant");
    build->add_option("-o,--out", build_out, "lattice output path");
    build->add_option("--config", common.config_path, "JSON config");

    auto* decode_cmd = app.add_subcommand("decode", "decode an error or syndrome file");
    std::string dec_lattice, dec_error, dec_syndrome;
    bool dec_quiet = false;
    decode_cmd->add_option("lattice", dec_lattice, "lattice file");
    decode_cmd->add_option("error", dec_error, "error file");
    decode_cmd->add_option("--syndrome", dec_syndrome, "syndrome file (m <face> / e <vertex> lines)");
    decode_cmd->add_flag("-q,--quiet", dec_quiet, "omit the stage transcript");
    decode_cmd->add_option("--config", common.config_path, "JSON config");

    auto* thermal = app.add_subcommand("thermal", "memory-time experiment");
    bool dry_run = false;
    thermal->add_option("--config", common.config_path, "JSON config")->required();
    thermal->add_flag("--dry-run", dry_run, "print the resolved plan only");

    auto* sample = app.add_subcommand("sample", "decoder barrier walks or weight sweeps");
    sample->add_option("--config", common.config_path, "JSON config")->required();

    auto* barrier = app.add_subcommand("barrier", "energy barrier search");
    barrier->add_option("--config", common.config_path, "JSON config")->required();

    auto* bounds = app.add_subcommand("bounds", "closed-form bound sweep as CSV");
    std::string bounds_out;
    bounds->add_option("params", common.config_path, "JSON parameter file")->required();
    bounds->add_option("-o,--out", bounds_out, "CSV output path");

    auto* report = app.add_subcommand("report", "merge CSV outputs into summary tables");
    std::vector<std::string> report_files;
    std::string report_out;
    report->add_option("files", report_files, "CSV files")->required();
    report->add_option("-o,--out", report_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        json cfg = load_config(common.config_path);
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        if (*build) return cmd_build(common, cfg, build_input, build_scale, build_ext, build_out);
        if (*decode_cmd) return cmd_decode(common, cfg, dec_lattice, dec_error, dec_syndrome, dec_quiet);
        if (*thermal) return cmd_thermal(common, cfg, dry_run);
        if (*sample) return cmd_sample(common, cfg);
        if (*barrier) return cmd_barrier(common, cfg);
        if (*bounds) return cmd_bounds(common, cfg, bounds_out);
        if (*report) return cmd_report(report_files, report_out);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InvalidSyndrome& e) {
        std::cerr << "invalid syndrome: " << e.what() << "\n";
        return kDecode;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
