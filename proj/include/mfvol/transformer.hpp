#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mfvol::transformer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Encoder-only regressor: affine embedding, `layers` pre-norm blocks of
/// multi-head self-attention and a feed-forward sublayer, a final layer norm,
/// mean pooling over the window (no positional encoding), and a two-layer MLP.
struct ModelConfig {
  std::size_t features = 5;  // F
  std::size_t width = 12;    // d_o
  std::size_t heads = 3;     // h
  std::size_t layers = 2;    // L
  std::size_t ff_width = 24;
  double dropout = 0.0;  // applied to the pooled vector while training

  std::size_t head_width() const { return width / heads; }
  void validate() const;
};

struct LayerWeights {
  Vector ln1_gain, ln1_bias;
  std::vector<Matrix> wq, wk, wv;  // per head, width x head_width
  Matrix wo;                       // heads * head_width x width
  Vector ln2_gain, ln2_bias;
  Matrix ff1;  // width x ff_width
  Vector ff1_bias;
  Matrix ff2;  // ff_width x width
  Vector ff2_bias;
};

struct ModelWeights {
  ModelConfig config;
  Matrix embed;  // features x width
  Vector embed_bias;
  std::vector<LayerWeights> layers;
  Vector final_gain, final_bias;
  Matrix head1;  // width x width
  Vector head1_bias;
  Matrix head2;  // width x 1
  Vector head2_bias;  // size 1

  /// Calls f(name, tensor) for every parameter tensor in a fixed order.
  template <class F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <class F>
  void visit(F&& f) const { visit_impl(*this, f); }

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool all_finite() const;

 private:
  template <class Self, class F>
  static void visit_impl(Self& w, F& f) {
    f(std::string_view("embed"), w.embed);
    f(std::string_view("embed_bias"), w.embed_bias);
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
      auto& L = w.layers[l];
      const std::string p = "layer" + std::to_string(l) + ".";
      f(std::string_view(p + "ln1_gain"), L.ln1_gain);
      f(std::string_view(p + "ln1_bias"), L.ln1_bias);
      for (std::size_t h = 0; h < L.wq.size(); ++h) {
        const std::string s = std::to_string(h);
        f(std::string_view(p + "wq" + s), L.wq[h]);
        f(std::string_view(p + "wk" + s), L.wk[h]);
        f(std::string_view(p + "wv" + s), L.wv[h]);
      }
      f(std::string_view(p + "wo"), L.wo);
      f(std::string_view(p + "ln2_gain"), L.ln2_gain);
      f(std::string_view(p + "ln2_bias"), L.ln2_bias);
      f(std::string_view(p + "ff1"), L.ff1);
      f(std::string_view(p + "ff1_bias"), L.ff1_bias);
      f(std::string_view(p + "ff2"), L.ff2);
      f(std::string_view(p + "ff2_bias"), L.ff2_bias);
    }
    f(std::string_view("final_gain"), w.final_gain);
    f(std::string_view("final_bias"), w.final_bias);
    f(std::string_view("head1"), w.head1);
    f(std::string_view("head1_bias"), w.head1_bias);
    f(std::string_view("head2"), w.head2);
    f(std::string_view("head2_bias"), w.head2_bias);
  }
};

/// Glorot-uniform matrices, unit layer-norm gains, zero biases.
ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed);
ModelWeights zeros_like(const ModelWeights& w);

/// softmax(Q K^T / sqrt(d_k)) V. When `probs` is given it receives the
/// row-stochastic attention matrix.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, Matrix* probs = nullptr);

/// Self-attention of `x` (T x width) through every head of `layer`,
/// concatenated and projected by W^O.
Matrix multi_head(const Matrix& x, const LayerWeights& layer);

double encoder_forward(const ModelWeights& w, const Matrix& x);

double loss_mse(std::span<const double> pred, std::span<const double> target);

struct Sample {
  Matrix x;  // T x F
  double y = 0.0;
};

struct GradientResult {
  double loss = 0.0;
  ModelWeights grad;
};

/// Exact reverse-mode gradient of the batch-mean squared error.
GradientResult gradient(const ModelWeights& w, std::span<const Sample> batch);

/// Windows of T consecutive feature rows with the next day's target.
struct WindowedDataset {
  std::vector<Sample> samples;
  std::vector<std::string> target_dates;
  std::vector<double> targets;  // in original units
  std::optional<std::pair<double, double>> target_scaling;  // (mean, std) applied to y

  std::size_t size() const { return samples.size(); }
};

/// `features` is n x F (row = day). Sample e uses rows e-T+1..e and targets
/// `target[e + 1]`; targets are z-scored with `target_scaling` when given.
WindowedDataset make_windows(const Matrix& features, std::span<const double> target,
                             std::span<const std::string> dates, std::size_t window,
                             std::optional<std::pair<double, double>> target_scaling = {});

enum class Optimizer { GradientDescent, Adam };

struct TrainConfig {
  std::size_t window = 5;  // T
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 7;
  std::size_t patience = 25;  // epochs without improvement before stopping; 0 disables
  double min_improvement = 1e-6;  // relative
  bool shuffle = false;
  Optimizer optimizer = Optimizer::GradientDescent;
  /// Chronological tail of the samples held out to monitor early stopping;
  /// 0 monitors the training loss instead.
  double validation_fraction = 0.0;
  /// Rescales each batch gradient to at most this Euclidean norm; 0 disables.
  double clip_norm = 0.0;

  void validate() const;
};

struct TrainResult {
  ModelWeights weights;
  std::vector<double> loss_history;  // mean pre-update batch loss per epoch
  std::vector<double> validation_history;  // post-epoch held-out loss, when validating
  std::size_t epochs_run = 0;
  bool stopped_early = false;
};

TrainResult train(const WindowedDataset& data, const ModelConfig& model, const TrainConfig& config);

/// Model outputs per sample, mapped back through the dataset's target scaling.
std::vector<double> predict(const ModelWeights& w, const WindowedDataset& data);

nlohmann::ordered_json to_json(const ModelWeights& w);
ModelWeights weights_from_json(const nlohmann::json& j);

}  // namespace mfvol::transformer
