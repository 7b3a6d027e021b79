#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "polreg/config.hpp"
#include "polreg/harness.hpp"

namespace polreg {

inline constexpr const char* kArtifactName = "polreg";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Header T,rep,seed,policy_regret,standard_regret,switches,pseudo_regret.
/// Failed cells are skipped; pseudo_regret is empty when absent.
void write_records_csv(std::ostream& out, const std::vector<CellRecord>& records);
std::vector<CellRecord> read_records_csv(std::istream& in);

/// {pairing, grid, alpha, alpha_ci, per_T: [{T, mean, se}], ...}.
nlohmann::json summary_json(const SweepResult& result);
/// {artifact, version, seed, config}.
nlohmann::json manifest_json(const RunConfig& config);

/// Writes `content` to dir/name, creating dir; errors carry the path.
std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content);

}  // namespace polreg
