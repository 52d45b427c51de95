#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qkmeans/crosstalk.hpp"
#include "qkmeans/iqdata.hpp"
#include "qkmeans/metrics.hpp"

namespace qkm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QKM_OUTPUT_DIR";

/// Runs `qkm <args...>`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One row of a benchmark score table.
struct ScoreRow {
    QubitPair pair;
    std::size_t qubit = 0;
    std::string dataset_case; // "single" or "both"
    double mean = 0.0;
    double half_width = 0.0;
};

void write_score_table(const std::string& title, const std::vector<ScoreRow>& rows, std::ostream& out);
[[nodiscard]] std::vector<ScoreRow> read_score_table(std::istream& in);

/// single/both comparison per pair, as consumed by flag_crosstalk.
[[nodiscard]] std::map<QubitPair, std::vector<FidelityComparison>> fidelity_comparisons(
    const std::vector<ScoreRow>& rows);

} // namespace qkm::cli
