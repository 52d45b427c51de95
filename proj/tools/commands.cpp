#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qkmeans/clustering.hpp"
#include "qkmeans/complexity.hpp"
#include "qkmeans/error.hpp"
#include "qkmeans/rng.hpp"

namespace qkm::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path default_output(const std::string& name) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return fs::path(dir) / name;
    return fs::path(name);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    Manifest(std::string cmd, std::vector<std::string> argv, std::uint64_t s)
        : command(std::move(cmd)), args(std::move(argv)), seed(s) {}

    std::string command;
    std::vector<std::string> args;
    std::uint64_t seed = 0;
    nlohmann::ordered_json configs = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;

    void write(const fs::path& path) const {
        nlohmann::ordered_json j;
        j["tool"] = "qkm";
        j["version"] = kVersion;
        j["command"] = command;
        j["args"] = args;
        j["seed"] = seed;
        j["configs"] = configs;
        j["outputs"] = outputs;
        j["timestamp"] = utc_timestamp();
        std::ofstream out(path);
        if (!out) throw std::runtime_error(fmt::format("cannot write manifest '{}'", path.string()));
        out << j.dump(2) << '\n';
    }
};

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot open '{}' for writing", path.string()));
    return out;
}

fs::path prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError(fmt::format("cannot create directory '{}'", dir.string()));
    return dir;
}

struct Range {
    long start = 0;
    long stop = 0;
    long step = 1;
};

Range parse_range(const std::string& text, const char* flag) {
    Range r;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    in >> r.start >> sep1 >> r.stop;
    if (!in || sep1 != ':') throw UsageError(fmt::format("{} expects start:stop[:step], got '{}'", flag, text));
    if (in >> sep2) {
        if (sep2 != ':' || !(in >> r.step)) throw UsageError(fmt::format("{}: malformed step in '{}'", flag, text));
    }
    if (r.step <= 0) throw UsageError(fmt::format("{}: step must be positive", flag));
    if (r.start < 1 || r.stop < r.start) throw UsageError(fmt::format("{}: empty range '{}'", flag, text));
    return r;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    std::string model_path;
    std::string coupling_path;
    std::size_t shots = 1024;
    std::uint64_t seed = 7;
    std::string out;
};

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    ReadoutModel model;
    CouplingMap coupling;
    try {
        model = o.model_path.empty() ? default_readout_model() : load_readout_model(o.model_path);
        coupling = o.coupling_path.empty() ? default_coupling_map() : load_coupling_map(o.coupling_path);
    } catch (const DataError& e) {
        throw UsageError(fmt::format("bad config: {}", e.what()));
    }
    if (o.shots == 0) throw UsageError("--shots must be >= 1");

    const auto table = synthesize(model, coupling, o.shots, o.seed);
    const fs::path path = o.out.empty() ? default_output("iq_table.csv") : fs::path(o.out);
    {
        auto file = open_output(path);
        write_table(table, file);
    }

    Manifest m{"synth", args, o.seed};
    m.configs["model"] = o.model_path.empty() ? "<default>" : o.model_path;
    m.configs["coupling"] = o.coupling_path.empty() ? "<default>" : o.coupling_path;
    m.outputs = {path.string()};
    m.write(path.string() + ".manifest.json");
    out << fmt::format("wrote {} rows for {} couplings to {}\n", table.size(), coupling.edges.size(), path.string());
    return kExitOk;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkOptions {
    std::string data;
    std::string algo = "kmeans";
    std::string mode = "exact";
    std::string metric = "fidelity";
    std::string half_width = "std";
    std::size_t splits = 10;
    std::uint64_t seed = 7;
    std::size_t circuits_per_job = 900;
    std::uint64_t shots_per_circuit = 1024;
    std::string out;
};

int cmd_benchmark(const BenchmarkOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    const auto table = load_table(o.data);
    if (table.empty()) throw DataError("data file holds no shots");

    FitConfig config;
    config.n_clusters = 2;
    config.distance_mode = o.algo == "kmeans"   ? DistanceMode::ClassicalEuclidean
                           : o.mode == "exact" ? DistanceMode::QuantumExact
                                               : DistanceMode::QuantumSampled;
    config.batch.max_circuits_per_job = o.circuits_per_job;
    config.batch.shots_per_circuit = o.shots_per_circuit;
    config.batch.seed = o.seed;
    const Metric metric = o.metric == "fidelity" ? Metric::AssignmentFidelity : Metric::FowlkesMallows;
    const HalfWidth hw = o.half_width == "std" ? HalfWidth::FoldStdDev : HalfWidth::NormalCI95;

    std::vector<ScoreRow> rows;
    std::uint64_t stream = 0;
    for (const auto& pair : table.pairs()) {
        for (const std::size_t q : {pair.first, pair.second}) {
            const auto sets = assemble_datasets(table, q, pair);
            for (const auto* name : {"single", "both"}) {
                const DataSet& data = std::string(name) == "single" ? sets.single : sets.both;
                const auto report = cross_validate(data, config, o.splits, metric, derive_seed(o.seed, stream++), hw);
                rows.push_back({pair, q, name, report.mean, report.half_width});
            }
        }
    }

    const fs::path path = o.out.empty() ? default_output("scores.txt") : fs::path(o.out);
    {
        auto file = open_output(path);
        write_score_table(fmt::format("algo={} mode={} metric={} splits={} seed={} half_width={}", o.algo,
                                      o.algo == "kmeans" ? "classical" : o.mode, o.metric, o.splits, o.seed,
                                      o.half_width),
                          rows, file);
    }
    Manifest m{"benchmark", args, o.seed};
    m.configs["data"] = o.data;
    m.outputs = {path.string()};
    m.write(path.string() + ".manifest.json");
    write_score_table("", rows, out);
    return kExitOk;
}

// ---------------------------------------------------------------- crosstalk

struct CrosstalkOptions {
    std::string data;
    std::string coefficients;
    std::vector<std::string> scores;
    double threshold = 0.1;
    double fidelity_gap = 0.02;
    std::string out;
};

int cmd_crosstalk(const CrosstalkOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    if (o.data.empty() == o.coefficients.empty()) throw UsageError("give exactly one of --data or --coefficients");

    std::vector<CorrelationReport> reports;
    if (!o.data.empty()) {
        const auto table = load_table(o.data);
        for (const auto& pair : table.pairs()) reports.push_back(analyze_pair(table, pair));
    } else {
        std::ifstream in(o.coefficients);
        if (!in) throw DataError(fmt::format("cannot open '{}'", o.coefficients));
        reports = read_coefficient_block(in);
    }

    std::map<QubitPair, std::vector<FidelityComparison>> fidelities;
    for (const auto& path : o.scores) {
        std::ifstream in(path);
        if (!in) throw DataError(fmt::format("cannot open '{}'", path));
        for (auto& [pair, list] : fidelity_comparisons(read_score_table(in))) {
            auto& dst = fidelities[pair];
            dst.insert(dst.end(), list.begin(), list.end());
        }
    }
    std::vector<CrosstalkFlag> flags;
    try {
        flags = flag_crosstalk(reports, fidelities, {o.threshold, o.fidelity_gap});
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }

    const fs::path dir = prepare_dir(o.out.empty() ? default_output("crosstalk") : fs::path(o.out));
    Manifest m{"crosstalk", args, 0};
    m.configs["data"] = o.data;
    m.configs["coefficients"] = o.coefficients;
    m.configs["scores"] = o.scores;

    if (!o.data.empty()) {
        for (const auto& r : reports) {
            const auto path = dir / fmt::format("heatmap_{}.csv", r.pair.label());
            auto file = open_output(path);
            write_heatmap(r, file);
            m.outputs.push_back(path.string());
        }
    }
    {
        const auto path = dir / "coefficients.csv";
        auto file = open_output(path);
        write_coefficient_block(reports, file);
        m.outputs.push_back(path.string());
    }
    {
        const auto path = dir / "flags.csv";
        auto file = open_output(path);
        file << "pair,evidence\n";
        for (const auto& f : flags) {
            std::string evidence;
            for (const auto& e : f.evidence) evidence += (evidence.empty() ? "" : "; ") + e;
            file << f.pair.label() << ",\"" << evidence << "\"\n";
        }
        m.outputs.push_back(path.string());
    }
    m.write(dir / "manifest.json");

    write_coefficient_block(reports, out);
    if (flags.empty()) out << "no crosstalk flagged\n";
    for (const auto& f : flags) {
        out << "flagged " << f.pair.label() << ":";
        for (const auto& e : f.evidence) out << "\n  " << e;
        out << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- complexity

struct ComplexityOptions {
    std::string n_range = "10:10000:10";
    std::string f_range = "1:64:1";
    double n_fixed = 1000;
    double f_fixed = 2;
    double k = 2;
    double iterations = 10;
    double c = 900;
    std::string out;
};

int cmd_complexity(const ComplexityOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    const auto n_range = parse_range(o.n_range, "--n-range");
    const auto f_range = parse_range(o.f_range, "--f-range");
    ComplexityParams base{o.n_fixed, o.k, o.f_fixed, o.iterations, o.c};
    try {
        base.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const fs::path dir = prepare_dir(o.out.empty() ? default_output("complexity") : fs::path(o.out));
    Manifest m{"complexity", args, 0};

    struct Panel {
        const char* axis;
        const Range& range;
        bool classical;
        bool quantum;
    };
    const Panel panels[] = {
        {"samples", n_range, true, true},    {"features", f_range, true, true},
        {"samples", n_range, true, false},   {"features", f_range, true, false},
        {"samples", n_range, false, true},   {"features", f_range, false, true},
    };
    for (const auto& p : panels) {
        const char* kind = p.classical && p.quantum ? "both" : p.classical ? "classical" : "quantum";
        const auto path = dir / fmt::format("{}_{}.csv", kind, p.axis);
        auto file = open_output(path);
        const bool samples = std::string(p.axis) == "samples";
        file << (samples ? "n_samples" : "n_features");
        if (p.classical) file << ",classical_cost";
        if (p.quantum) file << ",quantum_cost";
        file << '\n';
        for (long x = p.range.start; x <= p.range.stop; x += p.range.step) {
            ComplexityParams params = base;
            (samples ? params.n_samples : params.n_features) = static_cast<double>(x);
            file << x;
            if (p.classical) file << ',' << fmt::format("{}", classical_cost(params));
            if (p.quantum) file << ',' << fmt::format("{}", quantum_cost(params));
            file << '\n';
        }
        m.outputs.push_back(path.string());
    }
    m.write(dir / "manifest.json");
    out << fmt::format("wrote {} curve files to {}\n", m.outputs.size(), dir.string());
    return kExitOk;
}

} // namespace

void write_score_table(const std::string& title, const std::vector<ScoreRow>& rows, std::ostream& out) {
    if (!title.empty()) out << "# " << title << '\n';
    out << "qubit, case, score\n";
    std::optional<QubitPair> current;
    for (const auto& r : rows) {
        if (!current || *current != r.pair) {
            out << "# pair " << r.pair.label() << '\n';
            current = r.pair;
        }
        ScoreReport report;
        report.mean = r.mean;
        report.half_width = r.half_width;
        out << format_score_row(r.qubit, r.dataset_case, report) << '\n';
    }
}

std::vector<ScoreRow> read_score_table(std::istream& in) {
    std::vector<ScoreRow> rows;
    std::optional<QubitPair> current;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "qubit, case, score") continue;
        if (line.rfind("# pair ", 0) == 0) {
            current = QubitPair::parse(line.substr(7));
            continue;
        }
        if (line.front() == '#') continue;
        if (!current) throw DataError(fmt::format("score line {} appears before any '# pair' marker", line_no));

        ScoreRow row;
        row.pair = *current;
        char case_buf[16] = {};
        unsigned long qubit = 0;
        // "<qubit>, <case>, <mean> ±<half_width>"
        const auto pm = line.find("±");
        if (pm == std::string::npos ||
            std::sscanf(line.c_str(), "%lu, %15[a-z], %lf", &qubit, case_buf, &row.mean) != 3 ||
            std::sscanf(line.c_str() + pm + std::string("±").size(), "%lf", &row.half_width) != 1) {
            throw DataError(fmt::format("malformed score line {}: '{}'", line_no, line));
        }
        row.qubit = qubit;
        row.dataset_case = case_buf;
        if (row.dataset_case != "single" && row.dataset_case != "both") {
            throw DataError(fmt::format("score line {}: unknown case '{}'", line_no, row.dataset_case));
        }
        rows.push_back(row);
    }
    return rows;
}

std::map<QubitPair, std::vector<FidelityComparison>> fidelity_comparisons(const std::vector<ScoreRow>& rows) {
    std::map<QubitPair, std::map<std::size_t, std::pair<std::optional<double>, std::optional<double>>>> grouped;
    for (const auto& r : rows) {
        auto& slot = grouped[r.pair][r.qubit];
        (r.dataset_case == "single" ? slot.first : slot.second) = r.mean;
    }
    std::map<QubitPair, std::vector<FidelityComparison>> out;
    for (const auto& [pair, qubits] : grouped) {
        for (const auto& [q, values] : qubits) {
            if (!values.first || !values.second) {
                throw DataError(fmt::format("pair {} qubit {} lacks a single or both score", pair.label(), q));
            }
            out[pair].push_back({q, *values.first, *values.second});
        }
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qk-means readout discrimination and crosstalk toolkit", "qkm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize IQ readout shots for every coupling");
    synth_cmd->add_option("--model", synth.model_path, "Readout model config (default: built-in)");
    synth_cmd->add_option("--coupling", synth.coupling_path, "Coupling map config (default: 5-qubit chain)");
    synth_cmd->add_option("--shots", synth.shots, "Shots per schedule")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output data file");

    BenchmarkOptions bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "Cross-validated discrimination scores per qubit");
    bench_cmd->add_option("--data", bench.data, "IQ data file")->required();
    bench_cmd->add_option("--algo", bench.algo)->check(CLI::IsMember({"kmeans", "qkmeans"}))->capture_default_str();
    bench_cmd->add_option("--mode", bench.mode)->check(CLI::IsMember({"exact", "sampled"}))->capture_default_str();
    bench_cmd->add_option("--metric", bench.metric)->check(CLI::IsMember({"fidelity", "fm"}))->capture_default_str();
    bench_cmd->add_option("--half-width", bench.half_width, "std: fold stddev, ci95: 1.96*std/sqrt(splits)")
        ->check(CLI::IsMember({"std", "ci95"}))
        ->capture_default_str();
    bench_cmd->add_option("--splits", bench.splits)->check(CLI::Range(2, 1000))->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
    bench_cmd->add_option("--circuits-per-job", bench.circuits_per_job)->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--shots-per-circuit", bench.shots_per_circuit)->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Output score table");

    CrosstalkOptions xt;
    auto* xt_cmd = app.add_subcommand("crosstalk", "Pearson crosstalk analysis and flagging");
    xt_cmd->add_option("--data", xt.data, "IQ data file");
    xt_cmd->add_option("--coefficients", xt.coefficients, "Precomputed coefficient block instead of --data");
    xt_cmd->add_option("--scores", xt.scores, "Benchmark score tables");
    xt_cmd->add_option("--threshold", xt.threshold)->capture_default_str();
    xt_cmd->add_option("--fidelity-gap", xt.fidelity_gap)->capture_default_str();
    xt_cmd->add_option("--out", xt.out, "Output directory");

    ComplexityOptions cx;
    auto* cx_cmd = app.add_subcommand("complexity", "Classical vs quantum cost curves");
    cx_cmd->add_option("--n-range", cx.n_range, "start:stop[:step] over samples")->capture_default_str();
    cx_cmd->add_option("--f-range", cx.f_range, "start:stop[:step] over features")->capture_default_str();
    cx_cmd->add_option("--n", cx.n_fixed, "Samples for the feature sweep")->capture_default_str();
    cx_cmd->add_option("--f", cx.f_fixed, "Features for the sample sweep")->capture_default_str();
    cx_cmd->add_option("--k", cx.k)->capture_default_str();
    cx_cmd->add_option("--i", cx.iterations)->capture_default_str();
    cx_cmd->add_option("--c", cx.c)->capture_default_str();
    cx_cmd->add_option("--out", cx.out, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth, args, out);
        if (*bench_cmd) return cmd_benchmark(bench, args, out);
        if (*xt_cmd) return cmd_crosstalk(xt, args, out);
        if (*cx_cmd) return cmd_complexity(cx, args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace qkm::cli
