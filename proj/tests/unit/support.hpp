#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "yieldgap/crop_model.hpp"

namespace test {

inline std::filesystem::path data_dir() { return YIELDGAP_TEST_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return YIELDGAP_TEST_FIXTURE_DIR; }

/// The three-factor reference farm used throughout the tests.
inline yieldgap::FarmSpec reference_farm() {
  yieldgap::FarmSpec f;
  f.farm_id = "reference";
  f.potential_yield = 8.4;
  f.stress_factors = {
      {"nitrogen", 0.5, 0.5, 0.06, 1.5, "kg N/ha"},
      {"weeds", 0.4, 0.4, 0.5, 10.0, "treatments/ha"},
      {"insects", 0.3, 0.3, 0.7, 10.0, "treatments/ha"},
  };
  return f;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Farms whose optimum at a wheat price near 300 is interior with every
/// factor needing input.
inline yieldgap::FarmSpec random_farm(std::mt19937_64& rng, int n_factors = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  yieldgap::FarmSpec f;
  f.farm_id = "random";
  f.potential_yield = in(6.0, 10.0);
  for (int i = 0; i < n_factors; ++i) {
    yieldgap::StressFactorParams p;
    p.name = "factor" + std::to_string(i);
    p.s = in(0.25, 0.6);
    p.s_bar = p.s * in(0.9, 1.0);
    p.lambda = in(0.05, 1.0);
    p.input_price = in(0.2, std::min(12.0, 60.0 * p.lambda));
    f.stress_factors.push_back(p);
  }
  return f;
}

}  // namespace test
