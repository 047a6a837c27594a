#pragma once

#include <string>

#include <json.hpp>

#include "nmloc/operator.hpp"

namespace nmloc {

// Binary layout: "NMLS", uint32 version, int32 d, N, M, then row-major
// entries as interleaved (re, im) doubles in host byte order.
void write_snapshot(const std::string& path, const LatticeOperator& x);
LatticeOperator read_snapshot(const std::string& path);

nlohmann::json snapshot_to_json(const LatticeOperator& x);
LatticeOperator snapshot_from_json(const nlohmann::json& j);

}  // namespace nmloc
