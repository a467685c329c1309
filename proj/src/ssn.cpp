#include "multibang/ssn.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace multibang {

void ContinuationSchedule::validate() const {
  if (!(gamma_min > 0.0 && gamma0 > gamma_min))
    throw std::invalid_argument("schedule requires gamma0 > gamma_min > 0");
  if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("factor must be in (0,1)");
}

std::vector<double> ContinuationSchedule::levels() const {
  validate();
  std::vector<double> out;
  double g = gamma0;
  for (int k = 0; g >= gamma_min; ++k) {
    out.push_back(g);
    g = gamma0 * std::pow(factor, k + 1);
  }
  return out;
}

void NewtonConfig::validate() const {
  if (!(tol_abs > 0.0 && tol_rel > 0.0 && krylov_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (max_iter < 1 || krylov_max < 1) throw std::invalid_argument("iteration caps must be >= 1");
  if (!(line_search.factor > 0.0 && line_search.factor < 1.0) || line_search.max_halvings < 0)
    throw std::invalid_argument("invalid line search settings");
}

const LevelRecord *SolveReport::last_converged() const {
  for (auto it = levels.rbegin(); it != levels.rend(); ++it)
    if (it->converged) return &*it;
  return nullptr;
}

std::string SolveReport::table() const {
  std::string out = "      gamma   SSN  avgKrylov  linesearch  notMB    residual  ok\n";
  char buf[160];
  for (const auto &r : levels) {
    std::snprintf(buf, sizeof buf, "%11.4e  %4d  %9.2f  %10d  %5d  %10.3e  %s\n", r.gamma,
                  r.newton_iters, r.avg_krylov_iters, r.line_search_count, r.nonmultibang_count,
                  r.final_residual, r.converged ? "yes" : "no");
    out += buf;
  }
  return out;
}

} // namespace multibang
