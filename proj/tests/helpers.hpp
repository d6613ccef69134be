#pragma once

#include <sys/wait.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfvol/error.hpp"
#include "mfvol/transformer.hpp"
#include "oracles.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Fresh, empty scratch directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mfvol_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Code of the library error `fn` throws, or nothing when it returns.
template <class F>
std::optional<mfvol::Errc> error_code(F&& fn) {
  try {
    fn();
  } catch (const mfvol::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

struct RunResult {
  int code = -1;
  std::string err;
};

/// Runs the command-line tool with `args`, capturing stderr.
inline RunResult run_cli(const std::string& args, const fs::path& err_file) {
  const std::string cmd = std::string(MFVOL_BINARY) + " " + args + " > /dev/null 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_file);
  return r;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline oracle::Mat to_rows(const Eigen::MatrixXd& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), oracle::Vec(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline oracle::Vec to_vec(const Eigen::VectorXd& v) { return oracle::Vec(v.data(), v.data() + v.size()); }

inline oracle::TinyModel to_tiny(const mfvol::transformer::ModelWeights& w) {
  oracle::TinyModel t;
  t.embed = to_rows(w.embed);
  t.embed_bias = to_vec(w.embed_bias);
  for (const auto& L : w.layers) {
    oracle::TinyLayer tl;
    tl.ln1_gain = to_vec(L.ln1_gain);
    tl.ln1_bias = to_vec(L.ln1_bias);
    for (std::size_t h = 0; h < L.wq.size(); ++h) {
      tl.wq.push_back(to_rows(L.wq[h]));
      tl.wk.push_back(to_rows(L.wk[h]));
      tl.wv.push_back(to_rows(L.wv[h]));
    }
    tl.wo = to_rows(L.wo);
    tl.ln2_gain = to_vec(L.ln2_gain);
    tl.ln2_bias = to_vec(L.ln2_bias);
    tl.ff1 = to_rows(L.ff1);
    tl.ff1_bias = to_vec(L.ff1_bias);
    tl.ff2 = to_rows(L.ff2);
    tl.ff2_bias = to_vec(L.ff2_bias);
    t.layers.push_back(tl);
  }
  t.final_gain = to_vec(w.final_gain);
  t.final_bias = to_vec(w.final_bias);
  t.head1 = to_rows(w.head1);
  t.head1_bias = to_vec(w.head1_bias);
  t.head2 = to_rows(w.head2);
  t.head2_bias = w.head2_bias(0);
  return t;
}

/// Randomizes every parameter (gains and biases included) so that no
/// gradient path is trivially zero.
inline void perturb_all(mfvol::transformer::ModelWeights& w, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  w.visit([&](std::string_view, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += n(rng);
  });
}

struct GradCheck {
  double max_rel = 0.0;
  double max_abs = 0.0;
};

/// Central finite differences of the batch-mean squared error.
inline GradCheck check_gradient(const mfvol::transformer::ModelWeights& w,
                                const std::vector<mfvol::transformer::Sample>& batch, double step) {
  namespace tf = mfvol::transformer;
  const auto analytic = tf::gradient(w, batch).grad.flatten();
  const auto base = w.flatten();
  auto loss_at = [&](const std::vector<double>& flat) {
    auto m = w;
    m.assign(flat);
    double s = 0.0;
    for (const auto& b : batch) {
      const double e = tf::encoder_forward(m, b.x) - b.y;
      s += e * e;
    }
    return s / static_cast<double>(batch.size());
  };
  GradCheck out;
  auto flat = base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    flat[i] = base[i] + step;
    const double up = loss_at(flat);
    flat[i] = base[i] - step;
    const double down = loss_at(flat);
    flat[i] = base[i];
    const double fd = (up - down) / (2.0 * step);
    const double diff = std::abs(fd - analytic[i]);
    const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
    out.max_rel = std::max(out.max_rel, diff / denom);
    out.max_abs = std::max(out.max_abs, diff);
  }
  return out;
}

/// 32 windows of 5 x 5 inputs with a smooth, z-scored target.
inline mfvol::transformer::WindowedDataset toy_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  mfvol::transformer::WindowedDataset ds;
  for (int i = 0; i < 32; ++i) {
    mfvol::transformer::Sample s;
    s.x = random_matrix(5, 5, rng);
    s.y = std::tanh(2.0 * s.x.col(0).mean()) + 0.5 * s.x.col(1).mean();
    ds.samples.push_back(s);
  }
  double mean = 0.0, var = 0.0;
  for (const auto& s : ds.samples) mean += s.y / 32.0;
  for (const auto& s : ds.samples) var += (s.y - mean) * (s.y - mean) / 32.0;
  for (auto& s : ds.samples) {
    s.y = (s.y - mean) / std::sqrt(var);
    ds.targets.push_back(s.y);
  }
  return ds;
}


}  // namespace testing
