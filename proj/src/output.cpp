#include "polreg/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polreg/errors.hpp"
#include "polreg/format.hpp"

namespace polreg {

using nlohmann::json;

namespace {

constexpr const char* kHeader =
    "T,rep,seed,policy_regret,standard_regret,switches,pseudo_regret";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename I>
I parse_int(const std::string& s, std::size_t line) {
  I v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

double parse_num(const std::string& s, std::size_t line) {
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<CellRecord>& records) {
  out << kHeader << '\n';
  for (const auto& r : records) {
    if (r.status != CellStatus::Ok) continue;
    out << r.T << ',' << r.rep << ',' << r.seed << ',' << format_double(r.policy_regret)
        << ',' << format_double(r.standard_regret) << ',' << r.switches << ',';
    if (r.pseudo_regret) out << format_double(*r.pseudo_regret);
    out << '\n';
  }
}

std::vector<CellRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ConfigError(std::string("csv: expected header '") + kHeader + "'");
  std::vector<CellRecord> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 7) throw ConfigError("csv line " + std::to_string(n) + ": expected 7 fields");
    CellRecord r;
    r.T = parse_int<Round>(f[0], n);
    r.rep = parse_int<int>(f[1], n);
    r.seed = parse_int<std::uint64_t>(f[2], n);
    r.policy_regret = parse_num(f[3], n);
    r.standard_regret = parse_num(f[4], n);
    r.switches = parse_int<std::int64_t>(f[5], n);
    if (!f[6].empty()) r.pseudo_regret = parse_num(f[6], n);
    out.push_back(r);
  }
  return out;
}

json summary_json(const SweepResult& res) {
  json j;
  j["pairing"] = {{"adversary", to_json(res.spec.adversary)},
                  {"player", to_json(res.spec.player)},
                  {"feedback", std::string(to_string(
                                   res.spec.feedback.value_or(default_feedback(res.spec.player))))}};
  j["grid"] = res.spec.grid;
  j["repetitions"] = res.spec.repetitions;
  j["metric"] = to_string(res.spec.metric);
  if (res.fit) {
    j["alpha"] = res.fit->alpha;
    j["alpha_ci"] = {res.fit->alpha_lo, res.fit->alpha_hi};
    j["beta"] = res.fit->beta;
    j["fit_points"] = res.fit->points;
  } else {
    j["alpha"] = nullptr;
    j["alpha_ci"] = nullptr;
  }
  j["per_T"] = json::array();
  for (const auto& a : res.per_T) {
    j["per_T"].push_back({{"T", a.T},
                          {"mean", finite_or_null(a.mean)},
                          {"se", finite_or_null(a.se)},
                          {"n", a.n},
                          {"mean_switches", a.mean_switches}});
  }
  j["failures"] = json::array();
  for (const auto& r : res.records) {
    if (r.status == CellStatus::Ok) continue;
    j["failures"].push_back({{"T", r.T},
                             {"rep", r.rep},
                             {"kind", r.status == CellStatus::ContractViolation
                                          ? "contract_violation"
                                          : "config_error"},
                             {"error", r.error}});
  }
  std::vector<std::string> warnings = res.warnings;
  if (res.fit) warnings.insert(warnings.end(), res.fit->warnings.begin(), res.fit->warnings.end());
  j["warnings"] = warnings;
  return j;
}

json manifest_json(const RunConfig& config) {
  return {{"artifact", kArtifactName},
          {"version", kArtifactVersion},
          {"seed", config.seed},
          {"config", to_json(config)}};
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path d = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw std::runtime_error(d.string() + ": " + ec.message());
  const fs::path p = d / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error(p.string() + ": write failed");
  return p.string();
}

}  // namespace polreg
