#include <cmath>
#include <fstream>

#include "rlfs/error.hpp"
#include "rlfs/json.hpp"
#include "rlfs/net.hpp"

namespace rlfs {
namespace {

constexpr std::string_view kFormat = "rlfs-checkpoint/1";

Json ParamsToJson(const NetworkParams& p) {
  Json tensors = Json::object();
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    const auto tensor = static_cast<Tensor>(t);
    const auto shape = p.shape(tensor);
    const auto values = p.tensor(tensor);
    tensors[std::string(tensor_name(tensor))] = Json{
        {"shape", {shape.rows, shape.cols}},
        {"values", std::vector<double>(values.begin(), values.end())},
    };
  }
  return tensors;
}

NetworkParams ParamsFromJson(const NetworkConfig& config, const Json& j, std::string_view which) {
  NetworkParams p(config);
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    const auto tensor = static_cast<Tensor>(t);
    const std::string name(tensor_name(tensor));
    if (!j.contains(name)) {
      throw SchemaError("checkpoint network '" + std::string(which) + "' lacks tensor " + name);
    }
    const auto values = j.at(name).at("values").get<std::vector<double>>();
    auto dest = p.tensor(tensor);
    if (values.size() != dest.size()) {
      throw SchemaError("checkpoint tensor " + name + " has " + std::to_string(values.size()) +
                        " values, expected " + std::to_string(dest.size()));
    }
    std::copy(values.begin(), values.end(), dest.begin());
  }
  if (!p.all_finite()) throw SchemaError("checkpoint holds non-finite parameters");
  return p;
}

}  // namespace

// Decimal output uses 17 significant digits, so doubles round-trip exactly.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  if (!checkpoint.online.all_finite() || !checkpoint.target.all_finite()) {
    throw ArgumentError("refusing to checkpoint non-finite parameters");
  }
  Json j{
      {"format", kFormat},
      {"config", checkpoint.online.config()},
      {"optimizer", checkpoint.optimizer},
      {"networks", {{"online", ParamsToJson(checkpoint.online)}, {"target", ParamsToJson(checkpoint.target)}}},
  };
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (j.value("format", std::string()) != kFormat) {
    throw SchemaError(path.string() + ": not an rlfs checkpoint");
  }
  try {
    const auto config = j.at("config").get<NetworkConfig>();
    return Checkpoint{
        ParamsFromJson(config, j.at("networks").at("online"), "online"),
        ParamsFromJson(config, j.at("networks").at("target"), "target"),
        j.at("optimizer").get<OptimizerState>(),
    };
  } catch (const Json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace rlfs
