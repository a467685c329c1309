#pragma once

#include <functional>

namespace multibang {

struct LineSearchConfig {
  double factor = 0.5;
  int max_halvings = 30;
};

struct LineSearchResult {
  double step = 0.0;
  double residual = 0.0;
  int halvings = 0;
  bool success = false;
};

/// Largest step factor^k, k <= max_halvings, with residual_at(step) strictly
/// below `current`.
LineSearchResult line_search(const std::function<double(double)> &residual_at, double current,
                             const LineSearchConfig &config = {});

} // namespace multibang
