#include "qkmeans/crosstalk.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "qkmeans/error.hpp"

namespace qkm {

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: arrays differ in length");
    if (a.size() < 2) throw std::invalid_argument("pearson: need at least two samples");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        mean_a += a[k];
        mean_b += b[k];
    }
    mean_a /= n;
    mean_b /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double da = a[k] - mean_a;
        const double db = b[k] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string NamedCoefficient::name() const {
    const char* q = second_qubit ? "i+1" : "i";
    const char* x = x_is_q ? "Q" : "I";
    const char* y = x_is_q ? "I" : "Q";
    return fmt::format("r{}(ES_{}_{};GS_{}_{})", own_state, q, x, q, y);
}

const std::array<NamedCoefficient, kNamedCount>& named_coefficients() {
    static const std::array<NamedCoefficient, kNamedCount> order = {{
        {false, 0, false},
        {false, 0, true},
        {false, 1, false},
        {false, 1, true},
        {true, 0, false},
        {true, 0, true},
        {true, 1, false},
        {true, 1, true},
    }};
    return order;
}

std::optional<double> CorrelationReport::max_named_abs() const {
    std::optional<double> best;
    for (const auto& v : named) {
        if (v && (!best || std::abs(*v) > *best)) best = std::abs(*v);
    }
    return best;
}

namespace {

struct FeatureArrays {
    std::vector<double> i;
    std::vector<double> q;
};

FeatureArrays features(const IQShotTable& table, const QubitPair& pair, std::size_t qubit, int own,
                       int neighbor, std::size_t expected) {
    const auto schedule = Schedule::with(pair, qubit, own, neighbor);
    const auto shots = table.shots(pair, qubit, schedule);
    if (shots.empty()) {
        throw DataError(fmt::format("pair {} qubit {} is missing schedule {}", pair.label(), qubit, schedule.text()));
    }
    if (shots.size() != expected) {
        throw DataError(fmt::format("pair {} has unequal shot counts across schedules", pair.label()));
    }
    FeatureArrays out;
    for (const auto& s : shots) {
        out.i.push_back(s.i);
        out.q.push_back(s.q);
    }
    return out;
}

} // namespace

CorrelationReport analyze_pair(const IQShotTable& table, const QubitPair& pair) {
    const auto reference = table.shots(pair, pair.first, Schedule::with(pair, pair.first, 0, 0));
    if (reference.empty()) throw DataError(fmt::format("no shots recorded for pair {}", pair.label()));
    const std::size_t n = reference.size();

    CorrelationReport report;
    report.pair = pair;

    // [neighbor][qubit index in pair][own state]
    FeatureArrays parts[2][2][2];
    const std::size_t qubits[2] = {pair.first, pair.second};
    for (int neighbor : {1, 0}) {
        for (int qi = 0; qi < 2; ++qi) {
            for (int own : {0, 1}) parts[neighbor][qi][own] = features(table, pair, qubits[qi], own, neighbor, n);
        }
    }

    std::array<std::vector<double>, kArrayCount> arrays;
    std::size_t slot = 0;
    for (int own : {0, 1}) {
        for (int qi = 0; qi < 2; ++qi) {
            for (bool imag : {false, true}) {
                auto& dst = arrays[slot];
                for (int neighbor : {0, 1}) {
                    const auto& src = imag ? parts[neighbor][qi][own].q : parts[neighbor][qi][own].i;
                    dst.insert(dst.end(), src.begin(), src.end());
                }
                report.labels[slot] = fmt::format("{}_{}_{}", own, qubits[qi], imag ? "imag" : "real");
                ++slot;
            }
        }
    }

    for (std::size_t r = 0; r < kArrayCount; ++r) {
        for (std::size_t c = r; c < kArrayCount; ++c) {
            const auto v = r == c ? (pearson(arrays[r], arrays[r]) ? std::optional<double>(1.0) : std::nullopt)
                                  : pearson(arrays[r], arrays[c]);
            report.matrix[r * kArrayCount + c] = v;
            report.matrix[c * kArrayCount + r] = v;
        }
    }

    const auto& order = named_coefficients();
    for (std::size_t k = 0; k < kNamedCount; ++k) {
        const auto& spec = order[k];
        const int qi = spec.second_qubit ? 1 : 0;
        const auto& es = parts[1][qi][spec.own_state];
        const auto& gs = parts[0][qi][spec.own_state];
        report.named[k] = spec.x_is_q ? pearson(es.q, gs.i) : pearson(es.i, gs.q);
    }
    return report;
}

std::vector<CrosstalkFlag> flag_crosstalk(std::span<const CorrelationReport> reports,
                                          const std::map<QubitPair, std::vector<FidelityComparison>>& fidelities,
                                          const FlagOptions& options) {
    if (!fidelities.empty()) {
        if (fidelities.size() != reports.size()) throw std::invalid_argument("score tables and reports cover different pairs");
        for (const auto& r : reports) {
            if (!fidelities.contains(r.pair)) {
                throw std::invalid_argument(fmt::format("no score table entry for pair {}", r.pair.label()));
            }
        }
    }

    std::vector<CrosstalkFlag> flags;
    for (const auto& report : reports) {
        CrosstalkFlag flag{report.pair, {}};
        const auto& order = named_coefficients();
        for (std::size_t k = 0; k < kNamedCount; ++k) {
            const auto& v = report.named[k];
            if (v && std::abs(*v) >= options.threshold) {
                flag.evidence.push_back(
                    fmt::format("|{}| = {:.4f} >= {}", order[k].name(), std::abs(*v), options.threshold));
            }
        }
        if (const auto it = fidelities.find(report.pair); it != fidelities.end()) {
            for (const auto& f : it->second) {
                const double gap = std::abs(f.single - f.both);
                if (gap >= options.fidelity_gap) {
                    flag.evidence.push_back(fmt::format("qubit {} single/both gap {:.4f} >= {}", f.qubit, gap,
                                                        options.fidelity_gap));
                }
            }
        }
        if (!flag.evidence.empty()) flags.push_back(std::move(flag));
    }
    return flags;
}

void write_heatmap(const CorrelationReport& report, std::ostream& out) {
    out << "array";
    for (const auto& l : report.labels) out << ',' << l;
    out << '\n';
    for (std::size_t r = 0; r < kArrayCount; ++r) {
        out << report.labels[r];
        for (std::size_t c = 0; c < kArrayCount; ++c) {
            out << ',';
            if (const auto v = report.at(r, c)) out << fmt::format("{:.6f}", *v);
        }
        out << '\n';
    }
}

void write_coefficient_block(std::span<const CorrelationReport> reports, std::ostream& out) {
    out << "coefficient";
    for (const auto& r : reports) out << ',' << r.pair.label();
    out << '\n';
    const auto& order = named_coefficients();
    for (std::size_t k = 0; k < kNamedCount; ++k) {
        out << order[k].name();
        for (const auto& r : reports) {
            out << ',';
            if (const auto& v = r.named[k]) out << fmt::format("{:.6f}", *v);
        }
        out << '\n';
    }
}

std::vector<CorrelationReport> read_coefficient_block(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            std::string cell = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            out.push_back(a == std::string::npos ? std::string{} : cell.substr(a, b - a + 1));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return out;
    };

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        rows.push_back(split(line));
    }
    if (rows.empty() || rows.front().empty() || rows.front()[0] != "coefficient") {
        throw DataError("coefficient block must start with a 'coefficient,<pair>...' header");
    }

    std::vector<CorrelationReport> reports;
    for (std::size_t c = 1; c < rows.front().size(); ++c) {
        CorrelationReport r;
        r.pair = QubitPair::parse(rows.front()[c]);
        reports.push_back(r);
    }

    const auto& order = named_coefficients();
    std::vector<bool> seen(kNamedCount, false);
    for (std::size_t line_no = 1; line_no < rows.size(); ++line_no) {
        const auto& row = rows[line_no];
        const auto it = std::find_if(order.begin(), order.end(), [&](const auto& n) { return n.name() == row[0]; });
        if (it == order.end()) throw DataError(fmt::format("unknown coefficient '{}'", row[0]));
        const auto k = static_cast<std::size_t>(it - order.begin());
        if (row.size() != reports.size() + 1) {
            throw DataError(fmt::format("coefficient '{}' has {} values for {} pairs", row[0], row.size() - 1,
                                        reports.size()));
        }
        seen[k] = true;
        for (std::size_t c = 0; c < reports.size(); ++c) {
            const auto& cell = row[c + 1];
            if (cell.empty()) continue;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v) || std::abs(v) > 1.0) {
                throw DataError(fmt::format("invalid coefficient value '{}'", cell));
            }
            reports[c].named[k] = v;
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw DataError("coefficient block is missing rows");
    }
    return reports;
}

} // namespace qkm
