#include "rlfs/json.hpp"

#include <string>

#include "rlfs/baselines.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {
namespace {

template <typename T>
void Read(const Json& j, std::string_view key, T& out, std::string_view context) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(context) + "." + std::string(key) + ": " + e.what());
  }
}

std::string ReadString(const Json& j, std::string_view key, std::string fallback,
                       std::string_view context) {
  Read(j, key, fallback, context);
  return fallback;
}

template <typename Fn>
auto Convert(std::string_view context, Fn fn) {
  try {
    return fn();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string(context) + ": " + e.what());
  }
}

}  // namespace

void require_known_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + std::string(context));
  }
}

void to_json(Json& j, const NetworkConfig& c) {
  j = Json{{"n_features", c.n_features},
           {"embed_dim", c.embed_dim},
           {"hidden_dim", c.hidden_dim},
           {"cell", std::string(cell_name(c.cell))},
           {"head", std::string(head_name(c.head))}};
}

void from_json(const Json& j, NetworkConfig& c) {
  constexpr std::string_view ctx = "network";
  require_known_keys(j, {"n_features", "embed_dim", "hidden_dim", "cell", "head"}, ctx);
  Read(j, "n_features", c.n_features, ctx);
  Read(j, "embed_dim", c.embed_dim, ctx);
  Read(j, "hidden_dim", c.hidden_dim, ctx);
  const auto cell = ReadString(j, "cell", std::string(cell_name(c.cell)), ctx);
  const auto head = ReadString(j, "head", std::string(head_name(c.head)), ctx);
  c.cell = Convert(ctx, [&] { return cell_from_name(cell); });
  c.head = Convert(ctx, [&] { return head_from_name(head); });
}

void to_json(Json& j, const OptimizerState& o) {
  j = Json{{"step", o.step},
           {"base_rate", o.base_rate},
           {"total_steps", o.total_steps},
           {"clip_norm", o.clip_norm}};
}

void from_json(const Json& j, OptimizerState& o) {
  constexpr std::string_view ctx = "optimizer";
  require_known_keys(j, {"step", "base_rate", "total_steps", "clip_norm"}, ctx);
  Read(j, "step", o.step, ctx);
  Read(j, "base_rate", o.base_rate, ctx);
  Read(j, "total_steps", o.total_steps, ctx);
  Read(j, "clip_norm", o.clip_norm, ctx);
}

void to_json(Json& j, const AgentConfig& a) {
  j = Json{{"features", a.features},
           {"episodes", a.episodes},
           {"p", a.p},
           {"warmup_steps", a.warmup_steps},
           {"capacity", a.capacity},
           {"batch_size", a.batch_size},
           {"gamma", a.gamma},
           {"learn_frequency", a.learn_frequency},
           {"sync_frequency", a.sync_frequency},
           {"updates_per_learn", a.updates_per_learn},
           {"learning_rate", a.learning_rate},
           {"clip_norm", a.clip_norm},
           {"ddqn_convention", std::string(convention_name(a.convention))}};
}

void from_json(const Json& j, AgentConfig& a) {
  constexpr std::string_view ctx = "agent";
  require_known_keys(j,
                     {"features", "episodes", "p", "warmup_steps", "capacity", "batch_size", "gamma",
                      "learn_frequency", "sync_frequency", "updates_per_learn", "learning_rate",
                      "clip_norm", "ddqn_convention"},
                     ctx);
  Read(j, "features", a.features, ctx);
  Read(j, "episodes", a.episodes, ctx);
  Read(j, "p", a.p, ctx);
  Read(j, "warmup_steps", a.warmup_steps, ctx);
  Read(j, "capacity", a.capacity, ctx);
  Read(j, "batch_size", a.batch_size, ctx);
  Read(j, "gamma", a.gamma, ctx);
  Read(j, "learn_frequency", a.learn_frequency, ctx);
  Read(j, "sync_frequency", a.sync_frequency, ctx);
  Read(j, "updates_per_learn", a.updates_per_learn, ctx);
  Read(j, "learning_rate", a.learning_rate, ctx);
  Read(j, "clip_norm", a.clip_norm, ctx);
  const auto conv = ReadString(j, "ddqn_convention", std::string(convention_name(a.convention)), ctx);
  a.convention = Convert(ctx, [&] { return convention_from_name(conv); });
}

void to_json(Json& j, const SyntheticSpec& s) {
  j = Json{{"n_samples", s.n_samples},
           {"n_features", s.n_features},
           {"informative", s.informative},
           {"q", s.fidelity},
           {"seed", s.seed}};
}

void from_json(const Json& j, SyntheticSpec& s) {
  constexpr std::string_view ctx = "dataset.synthetic";
  require_known_keys(j, {"n_samples", "n_features", "informative", "n_informative", "q", "seed"}, ctx);
  Read(j, "n_samples", s.n_samples, ctx);
  Read(j, "n_features", s.n_features, ctx);
  Read(j, "q", s.fidelity, ctx);
  Read(j, "seed", s.seed, ctx);
  Read(j, "informative", s.informative, ctx);
  if (j.contains("n_informative")) {
    if (j.contains("informative")) {
      throw ConfigError("dataset.synthetic: give either informative or n_informative, not both");
    }
    std::size_t count = 0;
    Read(j, "n_informative", count, ctx);
    s.informative = Convert(ctx, [&] {
      return random_subset(s.n_features, count, derive_seed(s.seed, "informative"));
    });
  }
}

Json classifier_to_json(const ClassifierKind& kind) {
  Json j{{"kind", classifier_name(kind)}};
  if (const auto* rf = std::get_if<RandomForestParams>(&kind)) {
    j["trees"] = rf->trees;
    j["max_features"] = rf->max_features;
  } else if (const auto* knn = std::get_if<KnnParams>(&kind)) {
    j["k"] = knn->k;
  } else if (const auto* svm = std::get_if<LinearSvmParams>(&kind)) {
    j["lambda"] = svm->lambda;
    j["epochs"] = svm->epochs;
  }
  return j;
}

ClassifierKind classifier_from_json(const Json& j) {
  constexpr std::string_view ctx = "classifier";
  if (j.is_string()) {
    return Convert(ctx, [&] { return classifier_from_name(j.get<std::string>()); });
  }
  require_known_keys(j, {"kind", "trees", "max_features", "k", "lambda", "epochs"}, ctx);
  const auto name = ReadString(j, "kind", "decision_tree", ctx);
  auto kind = Convert(ctx, [&] { return classifier_from_name(name); });
  if (auto* rf = std::get_if<RandomForestParams>(&kind)) {
    Read(j, "trees", rf->trees, ctx);
    Read(j, "max_features", rf->max_features, ctx);
  } else if (auto* knn = std::get_if<KnnParams>(&kind)) {
    Read(j, "k", knn->k, ctx);
  } else if (auto* svm = std::get_if<LinearSvmParams>(&kind)) {
    Read(j, "lambda", svm->lambda, ctx);
    Read(j, "epochs", svm->epochs, ctx);
  }
  Convert(ctx, [&] {
    validate(kind);
    return 0;
  });
  return kind;
}

}  // namespace rlfs
