#pragma once

#include "lagr/calibration.hpp"
#include "lagr/problem.hpp"
#include "lagr/qubo.hpp"
#include "lagr/reformulate.hpp"
#include "lagr/solvers.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

namespace lagr::io {

using nlohmann::json;

/// A problem file holds either a general instance or a set-packing instance.
using ProblemFile = std::variant<ProblemSpec, SetPackingInstance>;

/// Parses the problem schema documented in docs/formats.md. Unknown fields,
/// wrong types and inconsistent dimensions raise ParseError.
ProblemFile parse_problem(const json& j);
ProblemFile read_problem_file(const std::string& path);

json to_json(const ProblemSpec& p);
json to_json(const SetPackingInstance& sp);

json polynomial_to_json(const Polynomiald& p);
Polynomiald polynomial_from_json(const json& j, int nvars);

json to_json(const QuboModel& q);
QuboModel qubo_from_json(const json& j);
/// Reads a QUBO from `.qubo` text or JSON, chosen by extension.
QuboModel read_qubo_file(const std::string& path);

json to_json(const PenaltyCertificate& c);
json to_json(const SetPackingBounds& b);
json to_json(const SolveReport& r);
json to_json(const ReformulationReport& r);
json to_json(const EscalationResult& r);

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace lagr::io
