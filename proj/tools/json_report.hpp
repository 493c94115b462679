#ifndef OTTO_TOOLS_JSON_REPORT_HPP
#define OTTO_TOOLS_JSON_REPORT_HPP

// JSON mirrors of sweep tables and verification reports.

#include "otto/experiments.hpp"

#include "json.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace otto::tools {

using Json = nlohmann::ordered_json;

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

inline Json to_json(const SweepRow& r) {
  Json j;
  j["tau"] = number(r.tau);
  j["quasistatic"] = std::isinf(r.tau);
  j["gamma"] = number(r.gamma);
  j["w1"] = number(r.w1);
  j["w2"] = number(r.w2);
  j["w_total"] = number(r.w_total);
  j["q_m"] = number(r.q_m);
  j["q_l"] = number(r.q_l);
  j["efficiency"] = number(r.efficiency);
  j["xi"] = number(r.xi);
  j["delta"] = number(r.delta);
  j["chi"] = number(r.chi);
  j["lambda"] = number(r.lambda);
  j["t_c"] = number(r.t_c);
  j["power"] = number(r.power);
  j["is_engine"] = r.is_engine;
  j["status"] = r.status;
  j["abs_w_total"] = number(std::abs(r.w_total));
  j["abs_power"] = r.power ? number(std::abs(*r.power)) : Json(nullptr);
  return j;
}

inline Json to_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr;
}

inline Json to_json(const VerifyReport& report) {
  Json j;
  j["passed"] = report.passed();
  j["config_valid"] = report.config_valid;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json item;
    item["suite"] = c.suite;
    item["name"] = c.name;
    item["value"] = number(c.value);
    item["threshold"] = c.threshold;
    item["passed"] = c.passed;
    checks.push_back(std::move(item));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace otto::tools

#endif  // OTTO_TOOLS_JSON_REPORT_HPP
