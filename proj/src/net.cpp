#include "rlfs/net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"
#include "rlfs/simd.hpp"

namespace rlfs {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Per-timestep values kept for backpropagation.
struct StepCache {
  std::uint32_t token = 0;
  std::vector<double> h_prev;
  std::vector<double> c_prev;
  std::vector<double> gates;     // post-activation, gates*hidden
  std::vector<double> recur_n;   // GRU: Wh_n h_prev, consumed by the reset gate
  std::vector<double> tanh_c;    // LSTM
  std::vector<double> c;         // LSTM
  std::vector<double> h;
};

struct Trace {
  std::vector<StepCache> steps;
  std::vector<double> logits;
  std::vector<double> output;
};

void CheckState(const NetworkConfig& cfg, const EpisodeState& state) {
  const auto items = state.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] < 1 || items[i] > cfg.n_features) {
      throw ArgumentError("state index " + std::to_string(items[i]) + " outside 1.." +
                          std::to_string(cfg.n_features));
    }
    if (i > 0 && items[i] <= items[i - 1]) {
      throw ArgumentError("state must be sorted without duplicates");
    }
  }
}

Trace RunForward(const NetworkParams& p, const EpisodeState& state) {
  const auto& cfg = p.config();
  CheckState(cfg, state);
  const std::size_t e = cfg.embed_dim;
  const std::size_t h = cfg.hidden_dim;
  const std::size_t gh = cfg.gates() * h;
  const auto emb = p.tensor(Tensor::Embedding);
  const auto wx = p.tensor(Tensor::InputWeights);
  const auto wh = p.tensor(Tensor::RecurrentWeights);
  const auto bias = p.tensor(Tensor::Bias);

  Trace trace;
  std::vector<std::uint32_t> tokens{0};
  tokens.insert(tokens.end(), state.items().begin(), state.items().end());
  trace.steps.reserve(tokens.size());

  std::vector<double> hidden(h, 0.0);
  std::vector<double> cell(h, 0.0);
  std::vector<double> ax(gh);
  std::vector<double> ah(gh);
  for (std::uint32_t token : tokens) {
    StepCache sc;
    sc.token = token;
    sc.h_prev = hidden;
    const std::span<const double> x = emb.subspan(token * e, e);
    simd::gemv(wx, gh, e, x, ax);
    simd::gemv(wh, gh, h, hidden, ah);
    sc.gates.resize(gh);
    switch (cfg.cell) {
      case CellKind::RNN:
        for (std::size_t j = 0; j < h; ++j) {
          sc.gates[j] = std::tanh(ax[j] + ah[j] + bias[j]);
          hidden[j] = sc.gates[j];
        }
        break;
      case CellKind::GRU: {
        sc.recur_n.assign(ah.begin() + 2 * h, ah.end());
        for (std::size_t j = 0; j < h; ++j) {
          const double z = Sigmoid(ax[j] + ah[j] + bias[j]);
          const double r = Sigmoid(ax[h + j] + ah[h + j] + bias[h + j]);
          const double n = std::tanh(ax[2 * h + j] + bias[2 * h + j] + r * ah[2 * h + j]);
          sc.gates[j] = z;
          sc.gates[h + j] = r;
          sc.gates[2 * h + j] = n;
          hidden[j] = (1.0 - z) * n + z * sc.h_prev[j];
        }
        break;
      }
      case CellKind::LSTM: {
        sc.c_prev = cell;
        sc.c.resize(h);
        sc.tanh_c.resize(h);
        for (std::size_t j = 0; j < h; ++j) {
          const double i = Sigmoid(ax[j] + ah[j] + bias[j]);
          const double f = Sigmoid(ax[h + j] + ah[h + j] + bias[h + j]);
          const double g = std::tanh(ax[2 * h + j] + ah[2 * h + j] + bias[2 * h + j]);
          const double o = Sigmoid(ax[3 * h + j] + ah[3 * h + j] + bias[3 * h + j]);
          sc.gates[j] = i;
          sc.gates[h + j] = f;
          sc.gates[2 * h + j] = g;
          sc.gates[3 * h + j] = o;
          cell[j] = f * sc.c_prev[j] + i * g;
          sc.c[j] = cell[j];
          sc.tanh_c[j] = std::tanh(cell[j]);
          hidden[j] = o * sc.tanh_c[j];
        }
        break;
      }
    }
    sc.h = hidden;
    trace.steps.push_back(std::move(sc));
  }

  const std::size_t out = cfg.output_dim();
  trace.logits.resize(out);
  simd::gemv(p.tensor(Tensor::OutputWeights), out, h, hidden, trace.logits);
  const auto ob = p.tensor(Tensor::OutputBias);
  for (std::size_t k = 0; k < out; ++k) trace.logits[k] += ob[k];

  if (cfg.head == HeadKind::Linear) {
    trace.output = trace.logits;
  } else {
    const double peak = *std::max_element(trace.logits.begin(), trace.logits.end());
    trace.output.resize(out);
    double total = 0.0;
    for (std::size_t k = 0; k < out; ++k) {
      trace.output[k] = std::exp(trace.logits[k] - peak);
      total += trace.output[k];
    }
    for (double& v : trace.output) v /= total;
  }
  return trace;
}

}  // namespace

std::string_view cell_name(CellKind cell) {
  switch (cell) {
    case CellKind::RNN:
      return "rnn";
    case CellKind::GRU:
      return "gru";
    case CellKind::LSTM:
      return "lstm";
  }
  return "lstm";
}

CellKind cell_from_name(std::string_view name) {
  if (name == "rnn") return CellKind::RNN;
  if (name == "gru") return CellKind::GRU;
  if (name == "lstm") return CellKind::LSTM;
  throw ArgumentError("unknown cell '" + std::string(name) + "' (expected rnn, gru or lstm)");
}

std::string_view head_name(HeadKind head) {
  return head == HeadKind::Linear ? "linear" : "softmax";
}

HeadKind head_from_name(std::string_view name) {
  if (name == "linear") return HeadKind::Linear;
  if (name == "softmax") return HeadKind::Softmax;
  throw ArgumentError("unknown head '" + std::string(name) + "' (expected linear or softmax)");
}

std::size_t NetworkConfig::gates() const {
  switch (cell) {
    case CellKind::RNN:
      return 1;
    case CellKind::GRU:
      return 3;
    case CellKind::LSTM:
      return 4;
  }
  return 1;
}

void NetworkConfig::validate() const {
  if (n_features < 1 || embed_dim < 1 || hidden_dim < 1) {
    throw ArgumentError("network dimensions must all be >= 1");
  }
}

std::string_view tensor_name(Tensor t) {
  switch (t) {
    case Tensor::Embedding:
      return "embedding";
    case Tensor::InputWeights:
      return "input_weights";
    case Tensor::RecurrentWeights:
      return "recurrent_weights";
    case Tensor::Bias:
      return "bias";
    case Tensor::OutputWeights:
      return "output_weights";
    case Tensor::OutputBias:
      return "output_bias";
  }
  return "";
}

NetworkParams::NetworkParams(const NetworkConfig& config) : config_(config) {
  config_.validate();
  offsets_[0] = 0;
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    offsets_[t + 1] = offsets_[t] + shape(static_cast<Tensor>(t)).size();
  }
  values_.assign(offsets_[kTensorCount], 0.0);
}

TensorShape NetworkParams::shape(Tensor t) const {
  const std::size_t gh = config_.gates() * config_.hidden_dim;
  switch (t) {
    case Tensor::Embedding:
      return {config_.vocab_size(), config_.embed_dim};
    case Tensor::InputWeights:
      return {gh, config_.embed_dim};
    case Tensor::RecurrentWeights:
      return {gh, config_.hidden_dim};
    case Tensor::Bias:
      return {gh, 1};
    case Tensor::OutputWeights:
      return {config_.output_dim(), config_.hidden_dim};
    case Tensor::OutputBias:
      return {config_.output_dim(), 1};
  }
  return {0, 0};
}

std::span<double> NetworkParams::tensor(Tensor t) {
  const auto i = static_cast<std::size_t>(t);
  return std::span<double>(values_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const double> NetworkParams::tensor(Tensor t) const {
  const auto i = static_cast<std::size_t>(t);
  return std::span<const double>(values_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

void NetworkParams::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool NetworkParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

NetworkParams init(const NetworkConfig& config, std::uint64_t seed) {
  NetworkParams params(config);
  Rng rng(seed);
  auto fill = [&](Tensor t, double fan_in) {
    const double r = 1.0 / std::sqrt(fan_in);
    for (double& v : params.tensor(t)) v = rng.uniform(-r, r);
  };
  fill(Tensor::Embedding, 1.0);
  fill(Tensor::InputWeights, static_cast<double>(config.embed_dim));
  fill(Tensor::RecurrentWeights, static_cast<double>(config.hidden_dim));
  fill(Tensor::OutputWeights, static_cast<double>(config.hidden_dim));
  if (config.cell == CellKind::LSTM) {
    auto bias = params.tensor(Tensor::Bias);
    std::fill(bias.begin() + config.hidden_dim, bias.begin() + 2 * config.hidden_dim, 1.0);
  }
  return params;
}

std::vector<double> forward(const NetworkParams& params, const EpisodeState& state) {
  return RunForward(params, state).output;
}

double accumulate_backward(const NetworkParams& params, const EpisodeState& state,
                           std::uint32_t action, double target, NetworkParams& grads) {
  const auto& cfg = params.config();
  if (!std::isfinite(target)) throw ArgumentError("backward target must be finite");
  if (action < 1 || action > cfg.n_features) {
    throw ArgumentError("action " + std::to_string(action) + " outside 1.." +
                        std::to_string(cfg.n_features));
  }
  if (!(grads.config() == cfg)) throw ArgumentError("gradient buffer has a different config");

  const Trace trace = RunForward(params, state);
  const std::size_t a = action - 1;
  const double residual = trace.output[a] - target;
  const double loss = 0.5 * residual * residual;
  if (residual == 0.0) return loss;

  const std::size_t e = cfg.embed_dim;
  const std::size_t h = cfg.hidden_dim;
  const std::size_t gh = cfg.gates() * h;
  const std::size_t out = cfg.output_dim();

  // d loss / d logits
  std::vector<double> dlogits(out, 0.0);
  if (cfg.head == HeadKind::Linear) {
    dlogits[a] = residual;
  } else {
    const double pa = trace.output[a];
    for (std::size_t k = 0; k < out; ++k) {
      dlogits[k] = residual * pa * ((k == a ? 1.0 : 0.0) - trace.output[k]);
    }
  }

  const auto& last = trace.steps.back();
  simd::outer_acc(dlogits, last.h, grads.tensor(Tensor::OutputWeights));
  simd::axpy(1.0, dlogits, grads.tensor(Tensor::OutputBias));
  std::vector<double> dh(h, 0.0);
  simd::gemv_transposed_acc(params.tensor(Tensor::OutputWeights), out, h, dlogits, dh);

  const auto emb = params.tensor(Tensor::Embedding);
  const auto wx = params.tensor(Tensor::InputWeights);
  const auto wh = params.tensor(Tensor::RecurrentWeights);
  auto g_emb = grads.tensor(Tensor::Embedding);
  auto g_wx = grads.tensor(Tensor::InputWeights);
  auto g_wh = grads.tensor(Tensor::RecurrentWeights);
  auto g_bias = grads.tensor(Tensor::Bias);

  std::vector<double> dc(h, 0.0);
  std::vector<double> dax(gh);
  std::vector<double> dah(gh);
  std::vector<double> dh_prev(h);
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    const StepCache& sc = *it;
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    switch (cfg.cell) {
      case CellKind::RNN:
        for (std::size_t j = 0; j < h; ++j) {
          const double y = sc.gates[j];
          dax[j] = dh[j] * (1.0 - y * y);
        }
        std::copy(dax.begin(), dax.end(), dah.begin());
        break;
      case CellKind::GRU:
        for (std::size_t j = 0; j < h; ++j) {
          const double z = sc.gates[j];
          const double r = sc.gates[h + j];
          const double n = sc.gates[2 * h + j];
          const double dn = dh[j] * (1.0 - z);
          const double dz = dh[j] * (sc.h_prev[j] - n);
          dh_prev[j] = dh[j] * z;
          const double dan = dn * (1.0 - n * n);
          const double dr = dan * sc.recur_n[j];
          const double daz = dz * z * (1.0 - z);
          const double dar = dr * r * (1.0 - r);
          dax[j] = daz;
          dax[h + j] = dar;
          dax[2 * h + j] = dan;
          dah[j] = daz;
          dah[h + j] = dar;
          dah[2 * h + j] = dan * r;
        }
        break;
      case CellKind::LSTM:
        for (std::size_t j = 0; j < h; ++j) {
          const double i = sc.gates[j];
          const double f = sc.gates[h + j];
          const double g = sc.gates[2 * h + j];
          const double o = sc.gates[3 * h + j];
          const double tc = sc.tanh_c[j];
          const double d_o = dh[j] * tc;
          const double dcell = dc[j] + dh[j] * o * (1.0 - tc * tc);
          dax[j] = dcell * g * i * (1.0 - i);
          dax[h + j] = dcell * sc.c_prev[j] * f * (1.0 - f);
          dax[2 * h + j] = dcell * i * (1.0 - g * g);
          dax[3 * h + j] = d_o * o * (1.0 - o);
          dc[j] = dcell * f;
        }
        std::copy(dax.begin(), dax.end(), dah.begin());
        break;
    }

    const std::span<const double> x = emb.subspan(sc.token * e, e);
    simd::outer_acc(dax, x, g_wx);
    simd::outer_acc(dah, sc.h_prev, g_wh);
    // Bias enters every gate pre-activation alongside the input term.
    simd::axpy(1.0, dax, g_bias);
    simd::gemv_transposed_acc(wx, gh, e, dax, g_emb.subspan(sc.token * e, e));
    simd::gemv_transposed_acc(wh, gh, h, dah, dh_prev);
    std::swap(dh, dh_prev);
  }
  return loss;
}

NetworkParams backward(const NetworkParams& params, const EpisodeState& state, std::uint32_t action,
                       double target) {
  NetworkParams grads(params.config());
  accumulate_backward(params, state, action, target, grads);
  return grads;
}

double OptimizerState::rate() const {
  if (total_steps == 0) return base_rate;
  const double remaining = 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
  return base_rate * std::max(0.0, remaining);
}

double global_norm(const NetworkParams& grads) {
  const auto v = grads.values();
  return std::sqrt(simd::dot(v, v));
}

void step(NetworkParams& params, const NetworkParams& grads, OptimizerState& opt) {
  if (!(params.config() == grads.config())) {
    throw ArgumentError("gradient shapes do not match parameters");
  }
  double scale = opt.rate();
  if (opt.clip_norm > 0.0) {
    const double norm = global_norm(grads);
    if (norm > opt.clip_norm) scale *= opt.clip_norm / norm;
  }
  if (scale != 0.0) simd::axpy(-scale, grads.values(), params.values());
  ++opt.step;
}

void sync(const NetworkParams& source, NetworkParams& dest) {
  if (!(source.config() == dest.config())) {
    throw ArgumentError("cannot sync networks with different configs");
  }
  dest = source;
}

}  // namespace rlfs
