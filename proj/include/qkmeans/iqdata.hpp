#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkmeans/dataset.hpp"

namespace qkm {

/// Ordered coupling; `first` is the least significant bit of a schedule.
struct QubitPair {
    std::size_t first = 0;
    std::size_t second = 0;

    [[nodiscard]] bool contains(std::size_t q) const noexcept { return q == first || q == second; }
    [[nodiscard]] std::size_t partner(std::size_t q) const noexcept { return q == first ? second : first; }
    /// "1-2"
    [[nodiscard]] std::string label() const;
    /// Parses "1-2"; throws DataError.
    static QubitPair parse(std::string_view text);

    friend auto operator<=>(const QubitPair&, const QubitPair&) = default;
};

/// Two-qubit preparation, stored as bits: bit 0 is the pair's first qubit.
/// Text form is "<second><first>", e.g. "10" prepares the second qubit in |1>.
struct Schedule {
    std::uint8_t bits = 0;

    [[nodiscard]] int bit_of(const QubitPair& pair, std::size_t q) const noexcept {
        return q == pair.first ? (bits & 1) : ((bits >> 1) & 1);
    }
    [[nodiscard]] std::string text() const;
    static Schedule parse(std::string_view text);
    /// Schedule with `q` in state `own` and its partner in state `neighbor`.
    static Schedule with(const QubitPair& pair, std::size_t q, int own, int neighbor) noexcept;

    friend auto operator<=>(const Schedule&, const Schedule&) = default;
};

inline constexpr Schedule kAllSchedules[] = {{0b00}, {0b01}, {0b10}, {0b11}};

struct IQPoint {
    double i = 0.0;
    double q = 0.0;
};

struct ShotRow {
    QubitPair pair;
    std::size_t qubit = 0;
    Schedule schedule;
    std::size_t shot = 0;
    double i = 0.0;
    double q = 0.0;
};

/// Readout shots keyed by (pair, qubit, schedule, shot).
class IQShotTable {
public:
    explicit IQShotTable(std::string device = {}) : device_(std::move(device)) {}

    /// Throws DataError on a duplicate key, a qubit outside its pair or a
    /// non-finite value.
    void add(const ShotRow& row);

    [[nodiscard]] const std::string& device() const noexcept { return device_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
    [[nodiscard]] const std::vector<ShotRow>& rows() const noexcept { return rows_; }

    /// Pairs present, sorted.
    [[nodiscard]] std::vector<QubitPair> pairs() const;

    /// Shots of `qubit` under `schedule`, ordered by shot index. Empty when absent.
    [[nodiscard]] std::vector<IQPoint> shots(const QubitPair& pair, std::size_t qubit, Schedule schedule) const;

    friend bool operator==(const IQShotTable& a, const IQShotTable& b);

private:
    struct Key {
        QubitPair pair;
        std::size_t qubit;
        Schedule schedule;
        friend auto operator<=>(const Key&, const Key&) = default;
    };

    std::string device_;
    std::vector<ShotRow> rows_;
    std::map<Key, std::map<std::size_t, std::size_t>> index_; // key -> shot -> row
};

struct QubitReadout {
    IQPoint ground;
    IQPoint excited;
    double stddev_i = 1.0;
    double stddev_q = 1.0;
};

/**
 * Synthetic readout response.
 *
 * `crosstalk[{a, b}]` is the coupling kappa in [0, 1] with which qubit `a`
 * reacts to qubit `b` being excited: its centers shift by
 * 0.25 * kappa * (excited - ground) and a fraction kappa of its noise is
 * shared with the index-aligned shot of the matching ground-neighbor schedule.
 */
struct ReadoutModel {
    std::string device;
    std::vector<QubitReadout> qubits;
    std::map<std::pair<std::size_t, std::size_t>, double> crosstalk;

    [[nodiscard]] double coupling(std::size_t affected, std::size_t source) const;
    /// Throws DataError if a stddev is not positive or a kappa is outside [0, 1].
    void validate() const;
};

struct QubitInfo {
    double frequency_ghz = 0.0;
    double readout_error = 0.0;
};

struct CouplingMap {
    std::string device;
    std::size_t num_qubits = 0;
    std::vector<QubitPair> edges;
    std::vector<QubitInfo> qubits;

    void validate() const;
};

/// Five-qubit readout model calibrated to single-qubit fidelities of roughly
/// 0.95 to 0.99, with kappa = 0.3 between qubits 1 and 2.
[[nodiscard]] ReadoutModel default_readout_model();
/// Linear chain 0-1-2-3-4.
[[nodiscard]] CouplingMap default_coupling_map();

/// Four schedules per coupling, `shots_per_schedule` shots per qubit each.
[[nodiscard]] IQShotTable synthesize(const ReadoutModel& model, const CouplingMap& coupling,
                                     std::size_t shots_per_schedule, std::uint64_t seed);

struct QubitDatasets {
    /// Neighbor in ground; own state |0> and |1>.
    DataSet single;
    /// All four schedules.
    DataSet both;
    FeatureTransform single_transform;
    FeatureTransform both_transform;
};

/// (I, Q) rows of `qubit` labelled by its own prepared bit, standardized and
/// shifted into the positive quadrant. Throws DataError on missing schedules.
[[nodiscard]] QubitDatasets assemble_datasets(const IQShotTable& table, std::size_t qubit, const QubitPair& pair);

/// Delimited text: `pair,qubit,schedule,shot,i,q`. Tables written without the
/// pair column (`qubit,schedule,shot,i,q`) are read as a single coupling.
void write_table(const IQShotTable& table, std::ostream& out);
[[nodiscard]] IQShotTable read_table(std::istream& in);
void save_table(const IQShotTable& table, const std::filesystem::path& path);
[[nodiscard]] IQShotTable load_table(const std::filesystem::path& path);

/// Key/value config text (see config/ for examples).
[[nodiscard]] ReadoutModel parse_readout_model(std::istream& in);
[[nodiscard]] CouplingMap parse_coupling_map(std::istream& in);
void write_readout_model(const ReadoutModel& model, std::ostream& out);
void write_coupling_map(const CouplingMap& coupling, std::ostream& out);
[[nodiscard]] ReadoutModel load_readout_model(const std::filesystem::path& path);
[[nodiscard]] CouplingMap load_coupling_map(const std::filesystem::path& path);

} // namespace qkm
