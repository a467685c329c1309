#pragma once

// Flat `key = value` experiment configuration. Lines starting with `#` are
// comments; lists are comma separated; reals accept multiples of pi such as
// `-pi/3` or `2*pi/3`.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace multibang {

class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string &what);
  int line() const { return line_; }

private:
  int line_;
};

struct ExperimentConfig {
  std::string model;   ///< bloch | elasticity
  std::string penalty; ///< radial | concentric
  double alpha = 0.0;
  std::uint64_t seed = 0;

  double omega0 = 1.0;
  std::vector<double> phases;

  // bloch
  std::vector<double> omegas;
  double final_time = 5.0;
  int n_intervals = 1000;
  double gyro = 267.51;
  double field = 1e-2;
  std::string bloch_target = "saturate"; ///< saturate | single
  int target_index = 1;                  ///< isochromat excited by `single`

  // elasticity
  int nx = 129;
  int ny = 129;
  double youngs = 20.0;
  double poisson = 0.3;
  std::string elastic_target = "rotation"; ///< rotation | deadload
  double rotation_angle = 1.5707963267948966;
  double deadload_magnitude = 1.0;
  double deadload_noise = 0.05;
  bool lumped_control_mass = false;

  // continuation and Newton
  double gamma0 = 1e2;
  double gamma_factor = 0.5;
  double gamma_min = 1e-10;
  double tol_abs = 1e-7;
  double tol_rel = 1e-7;
  int max_iter = 0; ///< 0 selects the model default
  double krylov_tol = 1e-10;
  int krylov_max = 1000;
  double ls_factor = 0.5;
  int ls_max_halvings = 30;

  std::string output_dir = "out";

  bool operator==(const ExperimentConfig &) const = default;
  /// Model default applied.
  int newton_max_iter() const;
};

ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);
/// Canonical text that parse_config maps back to an equal config.
std::string echo_config(const ExperimentConfig &config);

/// Parses a real with an optional pi factor, e.g. `0.5`, `-pi/3`, `2*pi/3`.
double parse_real(const std::string &token);

} // namespace multibang
