#include "multibang/config.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace multibang;
using std::numbers::pi;

namespace {

const char *kBloch = R"(# comment
model = bloch
penalty = radial
alpha = 0.1
seed = 1
phases = -pi, -pi/3, pi/3
omegas = 2.6751
)";

int error_line(const std::string &text) {
  try {
    parse_config(text);
  } catch (const ConfigError &e) {
    return e.line();
  }
  return -1;
}

} // namespace

TEST_CASE("parse reals") {
  CHECK(parse_real("0.5") == 0.5);
  CHECK(parse_real("pi") == pi);
  CHECK(parse_real("-pi/3") == -pi / 3);
  CHECK(parse_real("2*pi/3") == 2 * pi / 3);
  CHECK(parse_real("1e-3") == 1e-3);
  CHECK_THROWS(parse_real("abc"));
  CHECK_THROWS(parse_real("1.0x"));
}

TEST_CASE("parse a bloch config") {
  const ExperimentConfig c = parse_config(kBloch);
  CHECK(c.model == "bloch");
  CHECK(c.alpha == 0.1);
  CHECK(c.seed == 1);
  REQUIRE(c.phases.size() == 3);
  CHECK(c.phases[1] == -pi / 3);
  CHECK(c.omegas == std::vector<double>{2.6751});
  CHECK(c.newton_max_iter() == 500);
}

TEST_CASE("diagnostics carry the line") {
  CHECK(error_line(std::string(kBloch) + "colour = blue\n") == 8);
  CHECK(error_line(std::string(kBloch) + "alpha = 0.2\n") == 8);
  CHECK(error_line(std::string(kBloch) + "no equals sign\n") == 8);
  CHECK(error_line("model = bloch\npenalty = radial\nalpha = oops\n") == 3);
  // missing required key
  CHECK_THROWS_AS(parse_config("model = bloch\npenalty = radial\nalpha = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model = heat\npenalty = radial\nalpha = 0.1\nseed = 1\n"),
                  ConfigError);
}

TEST_CASE("echo round trip") {
  const ExperimentConfig c = parse_config(kBloch);
  CHECK(parse_config(echo_config(c)) == c);

  ExperimentConfig e = parse_config("model = elasticity\npenalty = concentric\nalpha = 1e-3\n"
                                    "seed = 9\nnx = 17\nny = 33\nelastic_target = deadload\n");
  CHECK(e.newton_max_iter() == 50);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(1e-9, 10.0);
  for (int k = 0; k < 100; ++k) {
    e.alpha = d(rng);
    e.gamma_min = d(rng) * 1e-10;
    e.rotation_angle = d(rng);
    e.deadload_noise = d(rng) / 10.0;
    e.lumped_control_mass = k % 2 == 0;
    CHECK(parse_config(echo_config(e)) == e);
  }
}
