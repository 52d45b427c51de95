#include "qkmeans/iqdata.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "qkmeans/error.hpp"
#include "qkmeans/rng.hpp"

namespace qkm {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(delim, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
    return value;
}

template <typename T>
T require_number(std::string_view s, std::string_view what) {
    const auto v = parse_number<T>(s);
    if (!v) throw DataError(fmt::format("invalid {} '{}'", what, s));
    return *v;
}

} // namespace

std::string QubitPair::label() const { return fmt::format("{}-{}", first, second); }

QubitPair QubitPair::parse(std::string_view text) {
    const auto parts = split(text, '-');
    if (parts.size() != 2) throw DataError(fmt::format("invalid qubit pair '{}'", text));
    QubitPair p{require_number<std::size_t>(parts[0], "qubit"), require_number<std::size_t>(parts[1], "qubit")};
    if (p.first == p.second) throw DataError(fmt::format("qubit pair '{}' couples a qubit to itself", text));
    return p;
}

std::string Schedule::text() const { return fmt::format("{}{}", (bits >> 1) & 1, bits & 1); }

Schedule Schedule::parse(std::string_view text) {
    if (text.size() != 2 || (text[0] != '0' && text[0] != '1') || (text[1] != '0' && text[1] != '1')) {
        throw DataError(fmt::format("invalid schedule '{}'", text));
    }
    return Schedule{static_cast<std::uint8_t>(((text[0] - '0') << 1) | (text[1] - '0'))};
}

Schedule Schedule::with(const QubitPair& pair, std::size_t q, int own, int neighbor) noexcept {
    const int first = q == pair.first ? own : neighbor;
    const int second = q == pair.first ? neighbor : own;
    return Schedule{static_cast<std::uint8_t>((second << 1) | first)};
}

void IQShotTable::add(const ShotRow& row) {
    if (!row.pair.contains(row.qubit)) {
        throw DataError(fmt::format("qubit {} is not part of pair {}", row.qubit, row.pair.label()));
    }
    if (row.pair.first == row.pair.second) throw DataError("pair couples a qubit to itself");
    if (!std::isfinite(row.i) || !std::isfinite(row.q)) {
        throw DataError(fmt::format("non-finite IQ value for qubit {} schedule {} shot {}", row.qubit,
                                    row.schedule.text(), row.shot));
    }
    auto& shots = index_[Key{row.pair, row.qubit, row.schedule}];
    if (!shots.emplace(row.shot, rows_.size()).second) {
        throw DataError(fmt::format("duplicate shot {} for pair {} qubit {} schedule {}", row.shot,
                                    row.pair.label(), row.qubit, row.schedule.text()));
    }
    rows_.push_back(row);
}

std::vector<QubitPair> IQShotTable::pairs() const {
    std::set<QubitPair> found;
    for (const auto& [key, _] : index_) found.insert(key.pair);
    return {found.begin(), found.end()};
}

std::vector<IQPoint> IQShotTable::shots(const QubitPair& pair, std::size_t qubit, Schedule schedule) const {
    std::vector<IQPoint> out;
    const auto it = index_.find(Key{pair, qubit, schedule});
    if (it == index_.end()) return out;
    out.reserve(it->second.size());
    for (const auto& [shot, row] : it->second) out.push_back({rows_[row].i, rows_[row].q});
    return out;
}

bool operator==(const IQShotTable& a, const IQShotTable& b) {
    if (a.rows_.size() != b.rows_.size()) return false;
    for (std::size_t r = 0; r < a.rows_.size(); ++r) {
        const auto& x = a.rows_[r];
        const auto& y = b.rows_[r];
        if (x.pair != y.pair || x.qubit != y.qubit || x.schedule != y.schedule || x.shot != y.shot || x.i != y.i ||
            x.q != y.q) {
            return false;
        }
    }
    return true;
}

double ReadoutModel::coupling(std::size_t affected, std::size_t source) const {
    const auto it = crosstalk.find({affected, source});
    return it == crosstalk.end() ? 0.0 : it->second;
}

void ReadoutModel::validate() const {
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        const auto& r = qubits[q];
        if (!(r.stddev_i > 0.0) || !(r.stddev_q > 0.0)) {
            throw DataError(fmt::format("qubit {} has a non-positive readout stddev", q));
        }
        for (double v : {r.ground.i, r.ground.q, r.excited.i, r.excited.q, r.stddev_i, r.stddev_q}) {
            if (!std::isfinite(v)) throw DataError(fmt::format("qubit {} has a non-finite readout parameter", q));
        }
    }
    for (const auto& [pair, kappa] : crosstalk) {
        if (!(kappa >= 0.0 && kappa <= 1.0)) {
            throw DataError(fmt::format("crosstalk {}<-{} = {} outside [0, 1]", pair.first, pair.second, kappa));
        }
    }
}

void CouplingMap::validate() const {
    for (const auto& e : edges) {
        if (e.first == e.second) throw DataError(fmt::format("edge {} couples a qubit to itself", e.label()));
        if (e.first >= num_qubits || e.second >= num_qubits) {
            throw DataError(fmt::format("edge {} references a qubit outside the device", e.label()));
        }
    }
    if (!qubits.empty() && qubits.size() != num_qubits) throw DataError("qubit metadata count mismatch");
}

ReadoutModel default_readout_model() {
    // Separations of roughly 3.5 to 4.7 stddevs put the Bayes-optimal
    // single-qubit fidelity between 0.958 (qubit 1) and 0.990 (qubit 3).
    ReadoutModel m;
    m.device = "synthetic-5q-linear";
    m.qubits = {
        {{-1.50, 0.40}, {2.03, 1.69}, 1.0, 1.0},
        {{-0.90, 1.20}, {1.95, -0.80}, 1.0, 1.0},
        {{-1.00, -1.70}, {1.01, 1.78}, 1.0, 1.0},
        {{-2.30, 0.40}, {2.29, -0.41}, 1.0, 1.0},
        {{-1.60, -1.60}, {1.55, 1.55}, 1.0, 1.0},
    };
    m.crosstalk = {{{1, 2}, 0.3}, {{2, 1}, 0.3}};
    return m;
}

CouplingMap default_coupling_map() {
    CouplingMap c;
    c.device = "synthetic-5q-linear";
    c.num_qubits = 5;
    c.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    c.qubits = {{5.00, 0.030}, {4.85, 0.084}, {4.95, 0.022}, {4.76, 0.010}, {5.02, 0.013}};
    return c;
}

IQShotTable synthesize(const ReadoutModel& model, const CouplingMap& coupling, std::size_t shots_per_schedule,
                       std::uint64_t seed) {
    model.validate();
    coupling.validate();
    if (shots_per_schedule == 0) throw std::invalid_argument("shots_per_schedule must be >= 1");
    for (const auto& e : coupling.edges) {
        if (e.first >= model.qubits.size() || e.second >= model.qubits.size()) {
            throw DataError(fmt::format("readout model does not cover pair {}", e.label()));
        }
    }

    IQShotTable table(coupling.device.empty() ? model.device : coupling.device);
    const std::size_t n = shots_per_schedule;
    for (std::size_t e = 0; e < coupling.edges.size(); ++e) {
        const QubitPair pair = coupling.edges[e];
        Rng rng(derive_seed(seed, e));
        std::normal_distribution<double> normal(0.0, 1.0);

        for (const std::size_t q : {pair.first, pair.second}) {
            const auto& r = model.qubits[q];
            const double kappa = model.coupling(q, pair.partner(q));
            const double keep = std::sqrt(1.0 - kappa * kappa);
            const IQPoint shift{0.25 * kappa * (r.excited.i - r.ground.i), 0.25 * kappa * (r.excited.q - r.ground.q)};

            for (const int own : {0, 1}) {
                const IQPoint center = own ? r.excited : r.ground;
                std::vector<IQPoint> ground_noise(n), excited_noise(n);
                for (auto& z : ground_noise) z = {normal(rng), normal(rng)};
                for (auto& z : excited_noise) z = {normal(rng), normal(rng)};

                const Schedule gs = Schedule::with(pair, q, own, 0);
                const Schedule es = Schedule::with(pair, q, own, 1);
                for (std::size_t k = 0; k < n; ++k) {
                    const auto& g = ground_noise[k];
                    table.add({pair, q, gs, k, center.i + r.stddev_i * g.i, center.q + r.stddev_q * g.q});
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const auto& g = ground_noise[k];
                    const auto& z = excited_noise[k];
                    const double shared = (g.i + g.q) / std::sqrt(2.0);
                    const double ui = keep * z.i + kappa * shared;
                    const double uq = keep * z.q + kappa * shared;
                    table.add({pair, q, es, k, center.i + shift.i + r.stddev_i * ui,
                               center.q + shift.q + r.stddev_q * uq});
                }
            }
        }
    }
    return table;
}

QubitDatasets assemble_datasets(const IQShotTable& table, std::size_t qubit, const QubitPair& pair) {
    if (!pair.contains(qubit)) throw std::invalid_argument("qubit is not part of the pair");

    auto collect = [&](std::initializer_list<int> neighbor_states) {
        std::vector<double> values;
        std::vector<int> labels;
        for (const int neighbor : neighbor_states) {
            for (const int own : {0, 1}) {
                const auto schedule = Schedule::with(pair, qubit, own, neighbor);
                const auto shots = table.shots(pair, qubit, schedule);
                if (shots.empty()) {
                    throw DataError(fmt::format("pair {} qubit {} is missing schedule {}", pair.label(), qubit,
                                                schedule.text()));
                }
                for (const auto& s : shots) {
                    values.push_back(s.i);
                    values.push_back(s.q);
                    labels.push_back(own);
                }
            }
        }
        return DataSet(2, std::move(values), std::move(labels));
    };

    QubitDatasets out;
    const DataSet single = collect({0});
    const DataSet both = collect({0, 1});
    out.single_transform = fit_standardize_shift(single);
    out.both_transform = fit_standardize_shift(both);
    out.single = out.single_transform.apply(single);
    out.both = out.both_transform.apply(both);
    return out;
}

void write_table(const IQShotTable& table, std::ostream& out) {
    out << "pair,qubit,schedule,shot,i,q\n";
    for (const auto& r : table.rows()) {
        out << fmt::format("{},{},{},{},{},{}\n", r.pair.label(), r.qubit, r.schedule.text(), r.shot, r.i, r.q);
    }
}

IQShotTable read_table(std::istream& in) {
    IQShotTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    bool has_pair = true;
    std::vector<ShotRow> pending; // rows of a pair-less file, until the pair is known

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto fields = split(text, ',');
        if (!have_header) {
            have_header = true;
            if (fields == std::vector<std::string_view>{"pair", "qubit", "schedule", "shot", "i", "q"}) continue;
            if (fields == std::vector<std::string_view>{"qubit", "schedule", "shot", "i", "q"}) {
                has_pair = false;
                continue;
            }
            throw DataError(fmt::format("line {}: unrecognized header '{}'", line_no, text));
        }
        const std::size_t expected = has_pair ? 6 : 5;
        if (fields.size() != expected) {
            throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no, expected, fields.size()));
        }
        try {
            std::size_t f = 0;
            ShotRow row;
            if (has_pair) row.pair = QubitPair::parse(fields[f++]);
            row.qubit = require_number<std::size_t>(fields[f++], "qubit");
            row.schedule = Schedule::parse(fields[f++]);
            row.shot = require_number<std::size_t>(fields[f++], "shot");
            row.i = require_number<double>(fields[f++], "I value");
            row.q = require_number<double>(fields[f++], "Q value");
            if (!std::isfinite(row.i) || !std::isfinite(row.q)) throw DataError("non-finite IQ value");
            if (has_pair) {
                table.add(row);
            } else {
                pending.push_back(row);
            }
        } catch (const DataError& e) {
            throw DataError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }

    if (!has_pair && !pending.empty()) {
        std::set<std::size_t> qubits;
        for (const auto& r : pending) qubits.insert(r.qubit);
        if (qubits.size() != 2) throw DataError("a table without a pair column must hold exactly two qubits");
        const QubitPair pair{*qubits.begin(), *qubits.rbegin()};
        for (auto& r : pending) {
            r.pair = pair;
            table.add(r);
        }
    }
    return table;
}

void save_table(const IQShotTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    write_table(table, out);
    if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

IQShotTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    return read_table(in);
}

namespace {

struct KeyValue {
    std::size_t line;
    std::string key;
    std::string value;
};

std::vector<KeyValue> read_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto text = trim(std::string_view(line).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw DataError(fmt::format("line {}: expected 'key = value'", line_no));
        out.push_back({line_no, std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))});
    }
    return out;
}

std::vector<double> number_list(const KeyValue& kv, std::size_t count) {
    const auto parts = split(kv.value, ',');
    if (parts.size() != count) {
        throw DataError(fmt::format("line {}: '{}' expects {} comma-separated numbers", kv.line, kv.key, count));
    }
    std::vector<double> out;
    for (auto p : parts) {
        const auto v = parse_number<double>(p);
        if (!v || !std::isfinite(*v)) throw DataError(fmt::format("line {}: invalid number '{}'", kv.line, p));
        out.push_back(*v);
    }
    return out;
}

std::size_t index_value(const KeyValue& kv, std::string_view text) {
    const auto v = parse_number<std::size_t>(text);
    if (!v) throw DataError(fmt::format("line {}: invalid index '{}' in '{}'", kv.line, text, kv.key));
    return *v;
}

} // namespace

ReadoutModel parse_readout_model(std::istream& in) {
    ReadoutModel m;
    std::map<std::size_t, QubitReadout> qubits;
    std::map<std::size_t, int> seen;
    for (const auto& kv : read_key_values(in)) {
        const auto parts = split(kv.key, '.');
        if (kv.key == "device") {
            m.device = kv.value;
        } else if (parts.size() == 3 && parts[0] == "qubit") {
            auto& r = qubits[index_value(kv, parts[1])];
            const auto v = number_list(kv, 2);
            if (parts[2] == "ground") {
                r.ground = {v[0], v[1]};
            } else if (parts[2] == "excited") {
                r.excited = {v[0], v[1]};
            } else if (parts[2] == "stddev") {
                r.stddev_i = v[0];
                r.stddev_q = v[1];
            } else {
                throw DataError(fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
            }
            seen[index_value(kv, parts[1])] |= parts[2] == "ground" ? 1 : parts[2] == "excited" ? 2 : 4;
        } else if (parts.size() == 3 && parts[0] == "crosstalk") {
            const auto v = number_list(kv, 1);
            m.crosstalk[{index_value(kv, parts[1]), index_value(kv, parts[2])}] = v[0];
        } else {
            throw DataError(fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
        }
    }
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        if (!qubits.contains(q) || seen[q] != 7) {
            throw DataError(fmt::format("qubit {} needs ground, excited and stddev entries", q));
        }
        m.qubits.push_back(qubits[q]);
    }
    m.validate();
    return m;
}

CouplingMap parse_coupling_map(std::istream& in) {
    CouplingMap c;
    std::map<std::size_t, QubitInfo> info;
    bool have_count = false;
    for (const auto& kv : read_key_values(in)) {
        const auto parts = split(kv.key, '.');
        if (kv.key == "device") {
            c.device = kv.value;
        } else if (kv.key == "qubits") {
            c.num_qubits = index_value(kv, kv.value);
            have_count = true;
        } else if (kv.key == "edge") {
            const auto v = split(kv.value, ',');
            if (v.size() != 2) throw DataError(fmt::format("line {}: edge expects 'a, b'", kv.line));
            c.edges.push_back({index_value(kv, v[0]), index_value(kv, v[1])});
        } else if (parts.size() == 3 && parts[0] == "qubit") {
            auto& q = info[index_value(kv, parts[1])];
            const double v = number_list(kv, 1)[0];
            if (parts[2] == "frequency_ghz") {
                q.frequency_ghz = v;
            } else if (parts[2] == "readout_error") {
                q.readout_error = v;
            } else {
                throw DataError(fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
            }
        } else {
            throw DataError(fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
        }
    }
    if (!have_count) throw DataError("coupling map needs a 'qubits' entry");
    if (!info.empty()) {
        c.qubits.resize(c.num_qubits);
        for (const auto& [q, v] : info) {
            if (q >= c.num_qubits) throw DataError(fmt::format("metadata for qubit {} outside the device", q));
            c.qubits[q] = v;
        }
    }
    c.validate();
    return c;
}

void write_readout_model(const ReadoutModel& model, std::ostream& out) {
    out << "device = " << model.device << "\n";
    for (std::size_t q = 0; q < model.qubits.size(); ++q) {
        const auto& r = model.qubits[q];
        out << fmt::format("qubit.{}.ground = {}, {}\n", q, r.ground.i, r.ground.q);
        out << fmt::format("qubit.{}.excited = {}, {}\n", q, r.excited.i, r.excited.q);
        out << fmt::format("qubit.{}.stddev = {}, {}\n", q, r.stddev_i, r.stddev_q);
    }
    for (const auto& [pair, kappa] : model.crosstalk) {
        out << fmt::format("crosstalk.{}.{} = {}\n", pair.first, pair.second, kappa);
    }
}

void write_coupling_map(const CouplingMap& coupling, std::ostream& out) {
    out << "device = " << coupling.device << "\n";
    out << "qubits = " << coupling.num_qubits << "\n";
    for (const auto& e : coupling.edges) out << fmt::format("edge = {}, {}\n", e.first, e.second);
    for (std::size_t q = 0; q < coupling.qubits.size(); ++q) {
        out << fmt::format("qubit.{}.frequency_ghz = {}\n", q, coupling.qubits[q].frequency_ghz);
        out << fmt::format("qubit.{}.readout_error = {}\n", q, coupling.qubits[q].readout_error);
    }
}

ReadoutModel load_readout_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    return parse_readout_model(in);
}

CouplingMap load_coupling_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    return parse_coupling_map(in);
}

} // namespace qkm
