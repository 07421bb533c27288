// JSON and CSV encodings for ensembles, Delta reports and braid results.
#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "avn/braid.hpp"
#include "avn/delta.hpp"
#include "avn/lhs.hpp"

namespace avn {

/// Fixed 12-significant-digit rendering used by every CSV writer.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

/// {entries: [{weight, bloch: [x,y,z]}], response: [[...], ...]}
inline nlohmann::json to_json(const HiddenStateEnsemble& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries())
    entries.push_back({{"weight", e.weight}, {"bloch", {e.state.bloch().x(), e.state.bloch().y(), e.state.bloch().z()}}});
  return {{"entries", entries}, {"response", m.response()}};
}

inline HiddenStateEnsemble ensemble_from_json(const nlohmann::json& j) {
  std::vector<HiddenEntry> entries;
  for (const auto& e : j.at("entries")) {
    const auto& b = e.at("bloch");
    if (b.size() != 3) throw std::invalid_argument("ensemble JSON: bloch must have 3 components");
    entries.push_back({e.at("weight").get<double>(), QubitState(Vec3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>()))});
  }
  return {std::move(entries), j.at("response").get<std::vector<std::vector<double>>>()};
}

inline nlohmann::json to_json(const DeltaReport& r, bool with_timing = false) {
  nlohmann::json j{{"theta", r.theta},
                   {"family", r.family},
                   {"delta", r.delta},
                   {"smoothed", r.smoothed},
                   {"optimal_model", to_json(r.optimal_model)},
                   {"n_exponent", r.n_exponent},
                   {"restarts", r.restarts},
                   {"per_test_gaps", r.per_test_gaps},
                   {"oracle_delta", r.oracle_delta ? nlohmann::json(*r.oracle_delta) : nlohmann::json(nullptr)},
                   {"converged", r.converged}};
  if (with_timing) j["wall_time"] = r.wall_time;
  return j;
}

inline void write_sweep_csv(std::ostream& out, std::span<const DeltaReport> reports) {
  out << "theta,delta,oracle_delta,n,restarts,converged\n";
  for (const auto& r : reports)
    out << fmt12(r.theta) << ',' << fmt12(r.delta) << ',' << (r.oracle_delta ? fmt12(*r.oracle_delta) : "") << ','
        << r.n_exponent << ',' << r.restarts << ',' << (r.converged ? 1 : 0) << '\n';
}

namespace braid {

/// {word: ["s1","s2inv",...], distance, distance_strict, length}
inline nlohmann::json to_json(const SearchResult& r) {
  nlohmann::json word = nlohmann::json::array();
  for (const auto& g : r.word.letters()) word.push_back(g.text());
  return {{"word", word},
          {"distance", r.distance},
          {"distance_projective", r.distance_projective},
          {"distance_strict", r.distance_strict},
          {"length", r.word.length()}};
}

}  // namespace braid
}  // namespace avn
