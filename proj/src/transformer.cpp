#include "mfvol/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mfvol/error.hpp"

namespace mfvol::transformer {

namespace {

constexpr double kLayerNormEps = 1e-5;

using RowVector = Eigen::RowVectorXd;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

struct LayerNormCache {
  Matrix xhat;
  Vector inv_std;
};

Matrix layer_norm(const Matrix& x, const Vector& gain, const Vector& bias, LayerNormCache* cache) {
  const auto rows = x.rows();
  const auto d = static_cast<double>(x.cols());
  Matrix xhat(rows, x.cols());
  Vector inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).sum() / d;
    const RowVector c = x.row(r).array() - mean;
    const double var = c.squaredNorm() / d;
    inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = c * inv_std(r);
  }
  Matrix y = (xhat.array().rowwise() * gain.transpose().array()).matrix();
  y.rowwise() += bias.transpose();
  if (cache) *cache = {std::move(xhat), std::move(inv_std)};
  return y;
}

/// Returns d/dx; accumulates gain/bias gradients.
Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache, const Vector& gain,
                           Vector& dgain, Vector& dbias) {
  const auto d = static_cast<double>(dy.cols());
  dgain += (dy.array() * cache.xhat.array()).colwise().sum().transpose().matrix();
  dbias += dy.colwise().sum().transpose();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const RowVector dxhat = dy.row(r).array() * gain.transpose().array();
    const double mean_dxhat = dxhat.sum() / d;
    const double mean_dot = dxhat.dot(cache.xhat.row(r)) / d;
    dx.row(r) = cache.inv_std(r) *
                (dxhat.array() - mean_dxhat - cache.xhat.row(r).array() * mean_dot).matrix();
  }
  return dx;
}

Matrix softmax_rows(const Matrix& s) {
  Matrix p(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    p.row(r) = (s.row(r).array() - mx).exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  return m;
}

struct HeadCache {
  Matrix q, k, v, p;
};

struct LayerCache {
  Matrix input;
  LayerNormCache ln1;
  Matrix a;  // normalized input to attention
  std::vector<HeadCache> heads;
  Matrix concat;
  Matrix mid;  // input + attention output
  LayerNormCache ln2;
  Matrix b;
  Matrix u;  // pre-activation of ff1
  Matrix g;  // activation
};

struct ForwardCache {
  Matrix x;
  std::vector<LayerCache> layers;
  LayerNormCache final_ln;
  RowVector pooled;
  RowVector u;  // head pre-activation
  RowVector v;
  double y = 0.0;
};

double forward(const ModelWeights& w, const Matrix& x, ForwardCache* cache,
               const RowVector* dropout_mask = nullptr) {
  const auto& cfg = w.config;
  if (static_cast<std::size_t>(x.cols()) != cfg.features || x.rows() < 1)
    throw Error(Errc::BadShape, "sample must be T x " + std::to_string(cfg.features));
  if (!x.allFinite()) throw Error(Errc::NonFiniteInput, "sample has non-finite entries");
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.head_width()));
  const auto hw = static_cast<Eigen::Index>(cfg.head_width());

  Matrix e = x * w.embed;
  e.rowwise() += w.embed_bias.transpose();
  if (cache) {
    cache->x = x;
    cache->layers.resize(w.layers.size());
  }
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const auto& L = w.layers[l];
    LayerCache local;
    LayerCache& lc = cache ? cache->layers[l] : local;
    lc.input = e;
    lc.a = layer_norm(e, L.ln1_gain, L.ln1_bias, &lc.ln1);
    lc.heads.resize(L.wq.size());
    lc.concat.resize(e.rows(), hw * static_cast<Eigen::Index>(L.wq.size()));
    for (std::size_t h = 0; h < L.wq.size(); ++h) {
      auto& hc = lc.heads[h];
      hc.q = lc.a * L.wq[h];
      hc.k = lc.a * L.wk[h];
      hc.v = lc.a * L.wv[h];
      hc.p = softmax_rows((hc.q * hc.k.transpose()) * scale);
      lc.concat.middleCols(static_cast<Eigen::Index>(h) * hw, hw) = hc.p * hc.v;
    }
    lc.mid = e + lc.concat * L.wo;
    lc.b = layer_norm(lc.mid, L.ln2_gain, L.ln2_bias, &lc.ln2);
    lc.u = lc.b * L.ff1;
    lc.u.rowwise() += L.ff1_bias.transpose();
    lc.g = lc.u.unaryExpr(&gelu);
    Matrix ff = lc.g * L.ff2;
    ff.rowwise() += L.ff2_bias.transpose();
    e = lc.mid + ff;
  }
  LayerNormCache fl;
  const Matrix z = layer_norm(e, w.final_gain, w.final_bias, &fl);
  RowVector pooled = z.colwise().sum() / static_cast<double>(z.rows());
  if (dropout_mask) pooled = pooled.cwiseProduct(*dropout_mask);
  RowVector u = pooled * w.head1;
  u += w.head1_bias.transpose();
  const RowVector v = u.unaryExpr(&gelu);
  const double y = v.dot(w.head2.col(0)) + w.head2_bias(0);
  if (cache) {
    cache->final_ln = std::move(fl);
    cache->pooled = pooled;
    cache->u = u;
    cache->v = v;
    cache->y = y;
  }
  return y;
}

void backward(const ModelWeights& w, const ForwardCache& c, double dy, ModelWeights& grad,
              const RowVector* dropout_mask = nullptr) {
  const auto& cfg = w.config;
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.head_width()));
  const auto hw = static_cast<Eigen::Index>(cfg.head_width());

  grad.head2_bias(0) += dy;
  grad.head2.col(0) += c.v.transpose() * dy;
  const RowVector dv = w.head2.col(0).transpose() * dy;
  const RowVector du = dv.cwiseProduct(c.u.unaryExpr(&gelu_grad));
  grad.head1 += c.pooled.transpose() * du;
  grad.head1_bias += du.transpose();
  RowVector dpooled = du * w.head1.transpose();
  if (dropout_mask) dpooled = dpooled.cwiseProduct(*dropout_mask);

  const auto T = c.x.rows();
  Matrix dz = dpooled.replicate(T, 1) / static_cast<double>(T);
  Matrix de = layer_norm_backward(dz, c.final_ln, w.final_gain, grad.final_gain, grad.final_bias);

  for (std::size_t li = w.layers.size(); li-- > 0;) {
    const auto& L = w.layers[li];
    const auto& lc = c.layers[li];
    auto& G = grad.layers[li];

    // feed-forward sublayer
    G.ff2 += lc.g.transpose() * de;
    G.ff2_bias += de.colwise().sum().transpose();
    const Matrix dg = de * L.ff2.transpose();
    const Matrix du_ff = dg.cwiseProduct(lc.u.unaryExpr(&gelu_grad));
    G.ff1 += lc.b.transpose() * du_ff;
    G.ff1_bias += du_ff.colwise().sum().transpose();
    const Matrix db = du_ff * L.ff1.transpose();
    Matrix dmid = de + layer_norm_backward(db, lc.ln2, L.ln2_gain, G.ln2_gain, G.ln2_bias);

    // attention sublayer
    G.wo += lc.concat.transpose() * dmid;
    const Matrix dconcat = dmid * L.wo.transpose();
    Matrix da = Matrix::Zero(lc.a.rows(), lc.a.cols());
    for (std::size_t h = 0; h < L.wq.size(); ++h) {
      const auto& hc = lc.heads[h];
      const Matrix dh = dconcat.middleCols(static_cast<Eigen::Index>(h) * hw, hw);
      const Matrix dp = dh * hc.v.transpose();
      const Matrix dvv = hc.p.transpose() * dh;
      const Vector rowdot = (dp.array() * hc.p.array()).rowwise().sum();
      const Matrix ds = (hc.p.array() * (dp.colwise() - rowdot).array()).matrix() * scale;
      const Matrix dq = ds * hc.k;
      const Matrix dk = ds.transpose() * hc.q;
      G.wq[h] += lc.a.transpose() * dq;
      G.wk[h] += lc.a.transpose() * dk;
      G.wv[h] += lc.a.transpose() * dvv;
      da += dq * L.wq[h].transpose() + dk * L.wk[h].transpose() + dvv * L.wv[h].transpose();
    }
    de = dmid + layer_norm_backward(da, lc.ln1, L.ln1_gain, G.ln1_gain, G.ln1_bias);
  }
  grad.embed += c.x.transpose() * de;
  grad.embed_bias += de.colwise().sum().transpose();
}

}  // namespace

// --- configuration ----------------------------------------------------------

void ModelConfig::validate() const {
  if (features < 1 || width < 1 || heads < 1 || layers < 1 || ff_width < 1)
    fail(Errc::BadParameter, "model widths, heads and layers must be >= 1");
  if (width % heads != 0) fail(Errc::BadParameter, "width must be divisible by heads");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(Errc::BadParameter, "dropout must be in [0, 1)");
}

void TrainConfig::validate() const {
  if (window < 1) fail(Errc::BadParameter, "window must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    fail(Errc::BadParameter, "learning rate must be a finite nonnegative number");
  if (batch_size < 1) fail(Errc::BadParameter, "batch size must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    fail(Errc::BadParameter, "validation fraction must be in [0, 1)");
  if (!(clip_norm >= 0.0) || !std::isfinite(clip_norm)) fail(Errc::BadParameter, "clip norm must be >= 0");
}

// --- weights ----------------------------------------------------------------

ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const auto F = static_cast<Eigen::Index>(config.features);
  const auto d = static_cast<Eigen::Index>(config.width);
  const auto hw = static_cast<Eigen::Index>(config.head_width());
  const auto ff = static_cast<Eigen::Index>(config.ff_width);

  ModelWeights w;
  w.config = config;
  w.embed = glorot(F, d, rng);
  w.embed_bias = Vector::Zero(d);
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerWeights L;
    L.ln1_gain = Vector::Ones(d);
    L.ln1_bias = Vector::Zero(d);
    for (std::size_t h = 0; h < config.heads; ++h) {
      L.wq.push_back(glorot(d, hw, rng));
      L.wk.push_back(glorot(d, hw, rng));
      L.wv.push_back(glorot(d, hw, rng));
    }
    L.wo = glorot(hw * static_cast<Eigen::Index>(config.heads), d, rng);
    L.ln2_gain = Vector::Ones(d);
    L.ln2_bias = Vector::Zero(d);
    L.ff1 = glorot(d, ff, rng);
    L.ff1_bias = Vector::Zero(ff);
    L.ff2 = glorot(ff, d, rng);
    L.ff2_bias = Vector::Zero(d);
    w.layers.push_back(std::move(L));
  }
  w.final_gain = Vector::Ones(d);
  w.final_bias = Vector::Zero(d);
  w.head1 = glorot(d, d, rng);
  w.head1_bias = Vector::Zero(d);
  w.head2 = glorot(d, 1, rng);
  w.head2_bias = Vector::Zero(1);
  return w;
}

ModelWeights zeros_like(const ModelWeights& w) {
  ModelWeights z = w;
  z.visit([](std::string_view, auto& t) { t.setZero(); });
  return z;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  visit([&](std::string_view, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

std::vector<double> ModelWeights::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  visit([&](std::string_view, const auto& t) {
    // column-major storage order; assign() reads it back the same way
    flat.insert(flat.end(), t.data(), t.data() + t.size());
  });
  return flat;
}

void ModelWeights::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) fail(Errc::BadShape, "flat parameter size");
  std::size_t i = 0;
  visit([&](std::string_view, auto& t) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i), t.size(), t.data());
    i += static_cast<std::size_t>(t.size());
  });
}

bool ModelWeights::all_finite() const {
  bool ok = true;
  visit([&](std::string_view, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

// --- operations -------------------------------------------------------------

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, Matrix* probs) {
  if (q.cols() != k.cols() || k.rows() != v.rows() || q.rows() < 1 || k.rows() < 1 || q.cols() < 1)
    fail(Errc::BadShape, "attention: Q is n x d_k, K is m x d_k, V is m x d_v");
  if (!q.allFinite() || !k.allFinite() || !v.allFinite())
    fail(Errc::NonFiniteInput, "attention inputs must be finite");
  Matrix p = softmax_rows((q * k.transpose()) / std::sqrt(static_cast<double>(q.cols())));
  Matrix out = p * v;
  if (probs) *probs = std::move(p);
  return out;
}

Matrix multi_head(const Matrix& x, const LayerWeights& layer) {
  if (layer.wq.empty() || x.cols() != layer.wq.front().rows())
    fail(Errc::BadShape, "multi_head: input width does not match W^Q");
  const auto hw = layer.wq.front().cols();
  Matrix concat(x.rows(), hw * static_cast<Eigen::Index>(layer.wq.size()));
  for (std::size_t h = 0; h < layer.wq.size(); ++h)
    concat.middleCols(static_cast<Eigen::Index>(h) * hw, hw) =
        attention(x * layer.wq[h], x * layer.wk[h], x * layer.wv[h]);
  if (layer.wo.rows() != concat.cols()) fail(Errc::BadShape, "multi_head: W^O rows");
  return concat * layer.wo;
}

double encoder_forward(const ModelWeights& w, const Matrix& x) { return forward(w, x, nullptr); }

double loss_mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) fail(Errc::LengthMismatch, "pred vs target");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

GradientResult gradient(const ModelWeights& w, std::span<const Sample> batch) {
  if (batch.empty()) fail(Errc::EmptyDataset, "gradient of an empty batch");
  if (!w.all_finite()) fail(Errc::NonFiniteInput, "weights must be finite");
  GradientResult out{0.0, zeros_like(w)};
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  ForwardCache cache;
  for (const auto& s : batch) {
    const double y = forward(w, s.x, &cache);
    const double err = y - s.y;
    out.loss += err * err * inv_n;
    backward(w, cache, 2.0 * err * inv_n, out.grad);
  }
  if (!out.grad.all_finite() || !std::isfinite(out.loss))
    fail(Errc::NonFiniteGradient, "gradient is not finite");
  return out;
}

WindowedDataset make_windows(const Matrix& features, std::span<const double> target,
                             std::span<const std::string> dates, std::size_t window,
                             std::optional<std::pair<double, double>> target_scaling) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (target.size() != n || dates.size() != n) fail(Errc::LengthMismatch, "features/target/dates");
  if (window < 1) fail(Errc::BadParameter, "window must be >= 1");
  if (target_scaling && !(target_scaling->second > 0.0))
    fail(Errc::BadParameter, "target scale must be positive");
  WindowedDataset ds;
  ds.target_scaling = target_scaling;
  for (std::size_t e = window - 1; e + 1 < n; ++e) {
    Sample s;
    s.x = features.middleRows(static_cast<Eigen::Index>(e + 1 - window), static_cast<Eigen::Index>(window));
    const double y = target[e + 1];
    s.y = target_scaling ? (y - target_scaling->first) / target_scaling->second : y;
    ds.samples.push_back(std::move(s));
    ds.targets.push_back(y);
    ds.target_dates.push_back(dates[e + 1]);
  }
  return ds;
}

TrainResult train(const WindowedDataset& data, const ModelConfig& model, const TrainConfig& config) {
  model.validate();
  config.validate();
  if (data.samples.empty()) fail(Errc::EmptyDataset, "no training samples");

  TrainResult result{init_weights(model, config.seed), {}, {}, 0, false};
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  const std::size_t n_total = data.samples.size();
  std::size_t n_val = 0;
  if (config.validation_fraction > 0.0 && n_total >= 2)
    n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(n_total))), 1,
        n_total - 1);
  const std::size_t n_fit = n_total - n_val;
  auto validation_loss = [&](const ModelWeights& w) {
    double s = 0.0;
    for (std::size_t i = n_fit; i < n_total; ++i) {
      const double e = forward(w, data.samples[i].x, nullptr) - data.samples[i].y;
      s += e * e;
    }
    return s / static_cast<double>(n_val);
  };

  std::vector<std::size_t> order(n_fit);
  std::iota(order.begin(), order.end(), 0);

  const std::size_t n_params = result.weights.parameter_count();
  std::vector<double> adam_m(n_params, 0.0), adam_v(n_params, 0.0);
  std::size_t step = 0;

  ModelWeights best = result.weights;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<Sample> batch;
  std::bernoulli_distribution keep(1.0 - model.dropout);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv_n = 1.0 / static_cast<double>(end - start);
      ModelWeights grad = zeros_like(result.weights);
      double batch_loss = 0.0;
      ForwardCache cache;
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = data.samples[order[i]];
        RowVector mask;
        const RowVector* mask_ptr = nullptr;
        if (model.dropout > 0.0) {
          mask.resize(static_cast<Eigen::Index>(model.width));
          for (Eigen::Index k = 0; k < mask.size(); ++k)
            mask(k) = keep(rng) ? 1.0 / (1.0 - model.dropout) : 0.0;
          mask_ptr = &mask;
        }
        const double err = forward(result.weights, s.x, &cache, mask_ptr) - s.y;
        batch_loss += err * err * inv_n;
        backward(result.weights, cache, 2.0 * err * inv_n, grad, mask_ptr);
      }
      if (!std::isfinite(batch_loss) || !grad.all_finite())
        fail(Errc::DivergedLoss, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
      epoch_loss += batch_loss * static_cast<double>(end - start);

      if (config.learning_rate > 0.0) {
        auto w = result.weights.flatten();
        auto g = grad.flatten();
        if (config.clip_norm > 0.0) {
          double norm = 0.0;
          for (double v : g) norm += v * v;
          norm = std::sqrt(norm);
          if (norm > config.clip_norm)
            for (double& v : g) v *= config.clip_norm / norm;
        }
        if (config.optimizer == Optimizer::GradientDescent) {
          for (std::size_t k = 0; k < w.size(); ++k) w[k] -= config.learning_rate * g[k];
        } else {
          constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
          ++step;
          const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
          const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
          for (std::size_t k = 0; k < w.size(); ++k) {
            adam_m[k] = b1 * adam_m[k] + (1.0 - b1) * g[k];
            adam_v[k] = b2 * adam_v[k] + (1.0 - b2) * g[k] * g[k];
            w[k] -= config.learning_rate * (adam_m[k] / c1) / (std::sqrt(adam_v[k] / c2) + eps);
          }
        }
        result.weights.assign(w);
      }
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) fail(Errc::DivergedLoss, "training loss became non-finite");
    result.loss_history.push_back(epoch_loss);
    result.epochs_run = epoch + 1;

    double monitored = epoch_loss;
    if (n_val > 0) {
      monitored = validation_loss(result.weights);
      result.validation_history.push_back(monitored);
    }
    if (monitored < best_loss * (1.0 - config.min_improvement)) {
      best_loss = monitored;
      best = result.weights;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  // The recorded training loss of an epoch is measured before its updates, so
  // without a held-out tail the weights after the last epoch are kept unless
  // training stalled.
  if (result.stopped_early || n_val > 0) result.weights = best;
  return result;
}

std::vector<double> predict(const ModelWeights& w, const WindowedDataset& data) {
  if (!w.all_finite()) fail(Errc::NonFiniteInput, "weights must be finite");
  std::vector<double> out;
  out.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    double y = forward(w, s.x, nullptr);
    if (data.target_scaling) y = y * data.target_scaling->second + data.target_scaling->first;
    out.push_back(y);
  }
  return out;
}

// --- serialization ----------------------------------------------------------

nlohmann::ordered_json to_json(const ModelWeights& w) {
  nlohmann::ordered_json j;
  j["config"] = {{"features", w.config.features}, {"width", w.config.width},
                 {"heads", w.config.heads},       {"layers", w.config.layers},
                 {"ff_width", w.config.ff_width}, {"dropout", w.config.dropout}};
  auto tensors = nlohmann::ordered_json::object();
  w.visit([&](std::string_view name, const auto& t) {
    std::vector<double> rowmajor;
    rowmajor.reserve(static_cast<std::size_t>(t.size()));
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) rowmajor.push_back(t(r, c));
    tensors[std::string(name)] = {{"shape", {t.rows(), t.cols()}}, {"data", rowmajor}};
  });
  j["tensors"] = tensors;
  return j;
}

ModelWeights weights_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  const auto& c = j.at("config");
  cfg.features = c.at("features").get<std::size_t>();
  cfg.width = c.at("width").get<std::size_t>();
  cfg.heads = c.at("heads").get<std::size_t>();
  cfg.layers = c.at("layers").get<std::size_t>();
  cfg.ff_width = c.at("ff_width").get<std::size_t>();
  cfg.dropout = c.value("dropout", 0.0);
  ModelWeights w = init_weights(cfg, 0);
  const auto& tensors = j.at("tensors");
  w.visit([&](std::string_view name, auto& t) {
    const auto& e = tensors.at(std::string(name));
    const auto shape = e.at("shape").get<std::vector<Eigen::Index>>();
    const auto data = e.at("data").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != t.rows() || shape[1] != t.cols() ||
        data.size() != static_cast<std::size_t>(t.size()))
      fail(Errc::BadShape, "tensor " + std::string(name) + " has the wrong shape");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index col = 0; col < t.cols(); ++col) t(r, col) = data[k++];
  });
  return w;
}

}  // namespace mfvol::transformer
