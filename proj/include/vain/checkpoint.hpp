#pragma once

#include <string>

#include "vain/model.hpp"

#include "json.hpp"

namespace vain {

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

// Binary layout (little endian):
//   bytes 0..7   magic "VAINCKP1"
//   bytes 8..11  uint32 header length H
//   bytes 12..   H bytes of JSON: {"format":1,"spec":{...},"param_count":N}
//   then         N float64 parameter values in Model::params() order
void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

}  // namespace vain
