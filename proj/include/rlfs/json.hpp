#pragma once

// nlohmann/json bindings for the library's configuration types. Readers are
// strict: unknown keys and out-of-domain values raise ConfigError.

#include <json.hpp>

#include "rlfs/agent.hpp"
#include "rlfs/classifiers.hpp"
#include "rlfs/dataset.hpp"
#include "rlfs/net.hpp"

namespace rlfs {

using Json = nlohmann::json;

void to_json(Json& j, const NetworkConfig& c);
void from_json(const Json& j, NetworkConfig& c);

void to_json(Json& j, const OptimizerState& o);
void from_json(const Json& j, OptimizerState& o);

void to_json(Json& j, const AgentConfig& a);
void from_json(const Json& j, AgentConfig& a);

void to_json(Json& j, const SyntheticSpec& s);
void from_json(const Json& j, SyntheticSpec& s);

Json classifier_to_json(const ClassifierKind& kind);
ClassifierKind classifier_from_json(const Json& j);

// Throws ConfigError naming the first key of j not in allowed.
void require_known_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view context);

}  // namespace rlfs
