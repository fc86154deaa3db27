// Measurement campaign for the estimator thresholds and the extraction
// regression baselines. Writes JSON to stdout (or to argv[1]).
//
// Seeds 1000000.. are used here; tests draw from 0..999 so the two sets never
// overlap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <vector>

#include "balext/balext.hpp"

namespace {

using namespace balext;

constexpr std::uint64_t kFirstSeed = 1'000'000;
constexpr std::uint64_t kPairs = 2000;
constexpr unsigned kLength = 1024;
constexpr double kQuantile = 0.99;

double quantile_ceil(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  return std::ceil(v[idx]);
}

}  // namespace

int main(int argc, char** argv) {
  const LzBitEstimator est;
  std::vector<double> indep, asym, self_ratio;
  for (std::uint64_t i = 0; i < kPairs; ++i) {
    const auto [x, y] = gen_planted_pair({kLength, Rational(1), Rational(0), kFirstSeed + i});
    const double d_xy = dep_estimate(x, y, est);
    indep.push_back(std::fabs(d_xy));
    asym.push_back(std::fabs(d_xy - dep_estimate(y, x, est)));
    self_ratio.push_back(dep_estimate(x, x, est) / est.estimate(x));
  }

  nlohmann::ordered_json j;
  j["estimator"] = est.name();
  j["pairs"] = kPairs;
  j["first_seed"] = kFirstSeed;
  j["length"] = kLength;
  j["quantile"] = kQuantile;
  j["theta_indep"] = quantile_ceil(indep, kQuantile);
  j["theta_sym"] = quantile_ceil(asym, kQuantile);
  j["min_self_ratio"] = std::stod(format_decimal(*std::min_element(self_ratio.begin(), self_ratio.end())));

  nlohmann::ordered_json baselines = nlohmann::ordered_json::array();
  for (const char* alpha : {"0", "1/8", "1/4"}) {
    const PlantedPairSpec spec{12, Rational(1, 2), Rational::parse(alpha), 0};
    const auto r = run_extraction_experiment(spec, 100000, {});
    baselines.push_back({{"n", 12},
                         {"sigma", "1/2"},
                         {"alpha", alpha},
                         {"trials", 100000},
                         {"seed", 0},
                         {"m_exp", r.params.m_exp},
                         {"table_digest", r.table_digest},
                         {"collision_entropy", std::stod(format_decimal(r.collision_entropy))},
                         {"min_entropy", std::stod(format_decimal(r.min_entropy))}});
  }
  j["experiment_baselines"] = baselines;
  j["tolerance_bits"] = 0.2;

  const std::string text = j.dump(2) + "\n";
  if (argc > 1) {
    std::ofstream(argv[1]) << text;
  } else {
    std::cout << text;
  }
  return 0;
}
