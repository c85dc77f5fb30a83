#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracrit/decompose.hpp"
#include "fracrit/solver.hpp"

namespace fracrit::app {

nlohmann::ordered_json point_to_json(const Point& x, int N);
nlohmann::ordered_json to_json(const Smallness& s);
nlohmann::ordered_json to_json(const RegionTag& r);
nlohmann::ordered_json to_json(const VerifyReport& v);
nlohmann::ordered_json to_json(const DecompositionResult& r, int N);
// Scalars and summaries only; fields go to snapshots.
nlohmann::ordered_json to_json(const SolveReport& r, int N);

// phase,iteration,energy,grad_norm,max_node with 17 significant digits.
std::string trace_csv(const std::vector<TraceRow>& rows);

// Deterministic text for a double (17 significant digits).
std::string format_double(double x);

} // namespace fracrit::app
