#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkmeans/iqdata.hpp"

namespace qkm {

/// Sample Pearson correlation. std::nullopt when either array has zero
/// variance. Throws std::invalid_argument for unequal lengths or fewer than 2
/// samples.
[[nodiscard]] std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// r_j(ES_{q,X}, GS_{q,Y}): qubit q prepared in `own_state` (j), X measured
/// with the partner excited (ES) against Y with the partner in ground (GS).
struct NamedCoefficient {
    bool second_qubit = false; // q = i + 1 instead of i
    int own_state = 0;
    bool x_is_q = false; // (X, Y) = (Q, I) instead of (I, Q)

    /// e.g. "r0(ES_i_I;GS_i_Q)"
    [[nodiscard]] std::string name() const;
};

inline constexpr std::size_t kNamedCount = 8;
inline constexpr std::size_t kArrayCount = 8;

/// Row order used by reports and the coefficient block.
[[nodiscard]] const std::array<NamedCoefficient, kNamedCount>& named_coefficients();

struct CorrelationReport {
    QubitPair pair;
    /// `{state}_{qubit}_{real|imag}`, state being the qubit's own prepared bit
    std::array<std::string, kArrayCount> labels;
    /// Row-major 8 x 8; missing where an array has zero variance.
    std::array<std::optional<double>, kArrayCount * kArrayCount> matrix;
    std::array<std::optional<double>, kNamedCount> named;

    [[nodiscard]] std::optional<double> at(std::size_t r, std::size_t c) const { return matrix[r * kArrayCount + c]; }
    /// Largest |r| among the named coefficients that are present.
    [[nodiscard]] std::optional<double> max_named_abs() const;
};

/**
 * Correlation analysis of one coupling. Arrays are own state x qubit x (I, Q);
 * each concatenates the partner-ground shots and then the partner-excited
 * shots, so arrays align by shot index. Throws DataError for missing schedules or unequal shot counts.
 */
[[nodiscard]] CorrelationReport analyze_pair(const IQShotTable& table, const QubitPair& pair);

/// Mean single/both scores of one qubit within a coupling.
struct FidelityComparison {
    std::size_t qubit = 0;
    double single = 0.0;
    double both = 0.0;
};

struct CrosstalkFlag {
    QubitPair pair;
    std::vector<std::string> evidence;
};

struct FlagOptions {
    double threshold = 0.1;
    double fidelity_gap = 0.02;
};

/**
 * Flags a pair when its largest named |r| reaches `threshold`, or when a
 * qubit's single/both mean fidelity gap reaches `fidelity_gap`. `fidelities`
 * may be empty; when given, it must cover exactly the pairs in `reports`.
 */
[[nodiscard]] std::vector<CrosstalkFlag> flag_crosstalk(
    std::span<const CorrelationReport> reports,
    const std::map<QubitPair, std::vector<FidelityComparison>>& fidelities, const FlagOptions& options = {});

/// 8 x 8 grid with a header row and column of array labels. Missing values are empty cells.
void write_heatmap(const CorrelationReport& report, std::ostream& out);

/// Named-coefficient block: one row per coefficient, one column per pair.
void write_coefficient_block(std::span<const CorrelationReport> reports, std::ostream& out);

/// Reads a coefficient block back into reports that carry only named values.
[[nodiscard]] std::vector<CorrelationReport> read_coefficient_block(std::istream& in);

} // namespace qkm
