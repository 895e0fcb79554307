#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "rlfs/state.hpp"

namespace rlfs {

enum class CellKind { RNN, GRU, LSTM };
enum class HeadKind { Linear, Softmax };

std::string_view cell_name(CellKind cell);
CellKind cell_from_name(std::string_view name);
std::string_view head_name(HeadKind head);
HeadKind head_from_name(std::string_view name);

// Decision network: token embedding -> recurrent cell -> dense head.
// Token 0 is a begin-of-sequence marker prepended to every state; features
// occupy tokens 1..N and output i scores feature i+1.
struct NetworkConfig {
  std::size_t n_features = 1;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  CellKind cell = CellKind::LSTM;
  HeadKind head = HeadKind::Linear;

  std::size_t vocab_size() const { return n_features + 1; }
  std::size_t output_dim() const { return n_features; }
  // Stacked gate blocks: RNN 1, GRU 3 (update, reset, candidate),
  // LSTM 4 (input, forget, cell, output).
  std::size_t gates() const;
  void validate() const;

  bool operator==(const NetworkConfig&) const = default;
};

enum class Tensor : std::size_t {
  Embedding,         // vocab x embed
  InputWeights,      // gates*hidden x embed
  RecurrentWeights,  // gates*hidden x hidden
  Bias,              // gates*hidden
  OutputWeights,     // output x hidden
  OutputBias,        // output
};
inline constexpr std::size_t kTensorCount = 6;
std::string_view tensor_name(Tensor t);

struct TensorShape {
  std::size_t rows;
  std::size_t cols;
  std::size_t size() const { return rows * cols; }
};

// All parameters of one network in a single flat buffer. Gradients use the
// same type.
class NetworkParams {
 public:
  NetworkParams() = default;
  explicit NetworkParams(const NetworkConfig& config);  // zero-filled

  const NetworkConfig& config() const { return config_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  TensorShape shape(Tensor t) const;
  std::span<double> tensor(Tensor t);
  std::span<const double> tensor(Tensor t) const;

  void set_zero();
  bool all_finite() const;

  bool operator==(const NetworkParams&) const = default;

 private:
  NetworkConfig config_;
  std::array<std::size_t, kTensorCount + 1> offsets_{};
  std::vector<double> values_;
};

// Uniform(-r, r) with r = 1/sqrt(fan_in) per weight tensor (fan_in of the
// embedding is 1: each row is read by a one-hot input); zero biases except
// the LSTM forget gate, which starts at 1.
NetworkParams init(const NetworkConfig& config, std::uint64_t seed);

// N action scores for the state.
std::vector<double> forward(const NetworkParams& params, const EpisodeState& state);

// Gradients of 0.5 * (Q(state)[action-1] - target)^2 by backpropagation
// through time. Returns the loss. accumulate_backward adds into grads.
double accumulate_backward(const NetworkParams& params, const EpisodeState& state,
                           std::uint32_t action, double target, NetworkParams& grads);
NetworkParams backward(const NetworkParams& params, const EpisodeState& state, std::uint32_t action,
                       double target);

struct OptimizerState {
  std::size_t step = 0;
  double base_rate = 3e-4;
  std::size_t total_steps = 0;  // 0 disables the linear decay
  double clip_norm = 5.0;       // <= 0 disables clipping

  double rate() const;
  bool operator==(const OptimizerState&) const = default;
};

double global_norm(const NetworkParams& grads);

// Clips grads to clip_norm (global L2 norm), applies params -= rate * grads
// and advances the step counter.
void step(NetworkParams& params, const NetworkParams& grads, OptimizerState& opt);

void sync(const NetworkParams& source, NetworkParams& dest);

struct Checkpoint {
  NetworkParams online;
  NetworkParams target;
  OptimizerState optimizer;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rlfs
