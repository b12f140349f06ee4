#pragma once

#include <string>

#include "mcdist/network/types.hpp"

namespace mcdist::network {

/// Schema "mcdist.network/1": complex values as [re, im], matrices row-major.
std::string to_json(const Network& net);

}  // namespace mcdist::network
