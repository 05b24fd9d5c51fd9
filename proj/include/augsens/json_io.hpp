#pragma once

#include <json.hpp>

#include "augsens/augment.hpp"
#include "augsens/model.hpp"

// ADL hooks so nlohmann::json converts the shared domain types directly.
namespace augsens {

void to_json(nlohmann::json& j, const HyperParams& hp);
void from_json(const nlohmann::json& j, HyperParams& hp);

void to_json(nlohmann::json& j, const AugVector& v);
void from_json(const nlohmann::json& j, AugVector& v);

void to_json(nlohmann::json& j, const AugmentationParams& p);
void from_json(const nlohmann::json& j, AugmentationParams& p);

}  // namespace augsens
