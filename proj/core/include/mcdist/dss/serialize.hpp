#pragma once

#include <string>

#include "mcdist/dss/data_model.hpp"

namespace mcdist::dss {

/// Canonical DSS text; build_data_model(tokenize(to_dss(m))) == m.
std::string to_dss(const DssDataModel& model);

/// Canonical JSON (schema "mcdist.dss/1", see docs/schemas.md).
std::string to_json(const DssDataModel& model);

}  // namespace mcdist::dss
