#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include <Eigen/Dense>
#include "json.hpp"

namespace polreg {

/// Index of an action in [0, K).
using Action = int;
/// 1-based round index.
using Round = std::int64_t;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Feedback { FullInformation, Bandit };

constexpr std::string_view to_string(Feedback f) {
  return f == Feedback::FullInformation ? "full" : "bandit";
}

/// Receives structured diagnostic events (one JSON object per event).
using TraceSink = std::function<void(const nlohmann::json&)>;

}  // namespace polreg
