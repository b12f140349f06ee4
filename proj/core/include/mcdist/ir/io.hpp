#pragma once

#include <string>

#include "mcdist/ir/model.hpp"

namespace mcdist::ir {

inline constexpr const char* kModelSchema = "mcdist.model/1";
inline constexpr const char* kSolutionSchema = "mcdist.solution/1";

/// JSON document following docs/schemas.md. Infinite bounds are null.
std::string export_model(const MathModel& model);
/// Throws ModelError on schema violations or an unknown schema version.
MathModel import_model(const std::string& text);

std::string export_solution(const Assignment& a);
Assignment import_solution(const std::string& text);

}  // namespace mcdist::ir
