#pragma once

// JSON documents for verification reports and experiment summaries.

#include <string>

#include "balext/sources.hpp"
#include "balext/table_io.hpp"
#include "balext/verify.hpp"
#include "json.hpp"

namespace balext {

inline nlohmann::ordered_json params_json(const TableParams& p) {
  return {{"n_exp", p.n_exp}, {"m_exp", p.m_exp}, {"s_exp", p.s_exp}, {"d_exp", p.d_exp}};
}

inline nlohmann::ordered_json rational_json(const Rational& r) { return {{"num", r.num()}, {"den", r.den()}}; }

/// {mode, passed, rectangles_checked, worst_ratio, witness, params, table_digest, ...}
inline nlohmann::ordered_json report_json(const VerificationReport& r, const std::string& digest) {
  nlohmann::ordered_json j;
  j["mode"] = r.mode == VerifyMode::exhaustive ? "exhaustive" : "sampled";
  if (r.mode == VerifyMode::sampled) j["samples"] = r.samples;
  j["check"] = r.check == CheckKind::balance ? "balance" : "prefix_balance";
  j["passed"] = r.passed;
  j["rectangles_checked"] = r.rectangles_checked;
  j["worst_ratio"] = rational_json(r.worst_ratio);
  if (r.witness) {
    nlohmann::ordered_json w{{"rows", r.witness->rect.rows}, {"cols", r.witness->rect.cols}, {"colors", r.witness->colors}};
    if (r.witness->prefix) w["prefix"] = *r.witness->prefix;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  j["params"] = params_json(r.params);
  j["table_digest"] = digest;
  return j;
}

inline nlohmann::ordered_json experiment_summary_json(const ExperimentReport& r) {
  const auto& p = r.params;
  nlohmann::ordered_json j;
  j["params"] = {{"n", p.n},
                 {"sigma", p.sigma.str()},
                 {"alpha", p.alpha.str()},
                 {"m_exp", p.m_exp},
                 {"s_exp", p.s_exp},
                 {"d_exp", p.d_exp},
                 {"nominal_d_exp", p.nominal_d_exp},
                 {"d_clamped", p.d_clamped}};
  j["seed"] = r.spec.seed;
  j["trials"] = r.trials;
  j["backend"] = r.backend;
  j["table_digest"] = r.table_digest;
  j["min_entropy"] = std::stod(format_decimal(r.min_entropy));
  j["collision_entropy"] = std::stod(format_decimal(r.collision_entropy));
  j["nominal_bound"] = std::stod(format_decimal(r.nominal_bound));
  j["insufficient_sampling"] = r.insufficient_sampling;
  j["dep_planted"] = r.spec.shared_bits();
  j["dep_hat"] = {{"mean", std::stod(format_decimal(r.dep_hat_mean))},
                  {"min", r.dep_hat_min},
                  {"max", r.dep_hat_max}};
  j["estimator"] = r.estimator;
  return j;
}

}  // namespace balext
