#include "multibang/line_search.hpp"

#include <cmath>

namespace multibang {

LineSearchResult line_search(const std::function<double(double)> &residual_at, double current,
                             const LineSearchConfig &config) {
  LineSearchResult res;
  double step = 1.0;
  for (int k = 0; k <= config.max_halvings; ++k) {
    const double r = residual_at(step);
    if (std::isfinite(r) && r < current) {
      res.step = step;
      res.residual = r;
      res.halvings = k;
      res.success = true;
      return res;
    }
    step *= config.factor;
  }
  res.halvings = config.max_halvings;
  res.residual = current;
  return res;
}

} // namespace multibang
