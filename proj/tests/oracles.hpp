#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library under test; each routine is written from the textbook
// definition with plain loops (or GSL where a numerical kernel is needed).

#include <gsl/gsl_eigen.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major

inline constexpr double kLn2Pi = 1.8378770664093454836;

// --- plain GARCH(1,1) ---------------------------------------------------------

// h_0 = h0, h_d = c + a (r_{d-1} - mu)^2 + b h_{d-1}
inline Vec garch11(const Vec& r, double mu, double c, double a, double b, double h0) {
  Vec h(r.size());
  for (std::size_t d = 0; d < r.size(); ++d) {
    if (d == 0) {
      h[d] = h0;
      continue;
    }
    const double e = r[d - 1] - mu;
    h[d] = c + a * e * e + b * h[d - 1];
  }
  return h;
}

inline double gaussian_loglik(const Vec& r, const Vec& h, double mu) {
  double ll = 0.0;
  for (std::size_t d = 0; d < r.size(); ++d) {
    const double term = std::log(h[d]) + (r[d] - mu) * (r[d] - mu) / h[d];
    ll -= 0.5 * (kLn2Pi + term);
  }
  return ll;
}

struct Garch11Fit {
  double mu, c, a, b, loglik;
};

inline Garch11Fit decode_garch11(const gsl_vector* z) {
  const double pers = 1.0 / (1.0 + std::exp(-gsl_vector_get(z, 2)));
  const double share = 1.0 / (1.0 + std::exp(-gsl_vector_get(z, 3)));
  Garch11Fit p{};
  p.mu = gsl_vector_get(z, 0);
  p.a = pers * share;
  p.b = pers * (1.0 - share);
  p.c = std::exp(gsl_vector_get(z, 1)) * (1.0 - pers);  // level * (1 - a - b)
  return p;
}

inline double garch11_cost(const gsl_vector* z, void* data) {
  const auto& r = *static_cast<const Vec*>(data);
  const auto p = decode_garch11(z);
  const auto h = garch11(r, p.mu, p.c, p.a, p.b, p.c / (1.0 - p.a - p.b));
  const double ll = gaussian_loglik(r, h, p.mu);
  return std::isfinite(ll) ? -ll : 1e300;
}

// Maximum likelihood for the plain GARCH(1,1) with h_0 at the unconditional
// variance c / (1 - a - b), by GSL's simplex on an unconstrained mapping.
inline Garch11Fit fit_garch11(const Vec& r, double mu0, double var0) {
  gsl_multimin_function fn;
  fn.n = 4;
  fn.f = &garch11_cost;
  fn.params = const_cast<Vec*>(&r);

  gsl_vector* x = gsl_vector_alloc(4);
  gsl_vector_set(x, 0, mu0);
  gsl_vector_set(x, 1, std::log(var0));
  gsl_vector_set(x, 2, std::log(0.95 / 0.05));
  gsl_vector_set(x, 3, std::log(0.05 / 0.90));
  gsl_vector* step = gsl_vector_alloc(4);
  gsl_vector_set_all(step, 0.25);

  double best_f = INFINITY;
  // Restart from the incumbent until the optimum stops moving.
  for (int round = 0; round < 8; ++round) {
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < 20000; ++it) {
      if (gsl_multimin_fminimizer_iterate(s)) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
    }
    const double f = gsl_multimin_fminimizer_minimum(s);
    if (f < best_f) gsl_vector_memcpy(x, gsl_multimin_fminimizer_x(s));
    gsl_multimin_fminimizer_free(s);
    const bool settled = best_f - f < 1e-10;
    best_f = std::min(best_f, f);
    gsl_vector_set_all(step, 0.02);
    if (settled) break;
  }
  auto best = decode_garch11(x);
  best.loglik = -best_f;
  gsl_vector_free(x);
  gsl_vector_free(step);
  return best;
}

// --- GARCH-MIDAS --------------------------------------------------------------

inline Vec beta_kernel(std::size_t K, double w1, double w2) {
  if (K == 1) return {1.0};
  Vec w(K);
  double total = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double x = double(k) / double(K);
    const double left = w1 == 1.0 ? 1.0 : std::exp((w1 - 1.0) * std::log(x));
    double right = 1.0;
    if (w2 != 1.0) right = x >= 1.0 ? 0.0 : std::exp((w2 - 1.0) * std::log1p(-x));
    w[k - 1] = left * right;
    total += w[k - 1];
  }
  for (double& v : w) v /= total;
  return w;
}

struct MidasTerms {
  double mu, alpha, beta, m;
  Vec theta, w2;
  double w1 = 1.0;
};

// Per-day (tau, g, h) and log-likelihood for the exogenous log-link model.
// Days of months before `first_month` are skipped; g starts at 1.
struct MidasPath {
  Vec tau, g, h;
  double loglik = 0.0;
};

inline MidasPath midas_path(const MidasTerms& p, std::size_t K, const Vec& r,
                            const std::vector<std::size_t>& month, const Mat& cov) {
  const std::size_t first_month = std::max(month.front(), K);
  MidasPath out;
  double g_prev = 0.0, r_prev = 0.0;
  bool started = false;
  for (std::size_t d = 0; d < r.size(); ++d) {
    const std::size_t t = month[d];
    if (t < first_month) continue;
    double x = p.m;
    for (std::size_t j = 0; j < cov.size(); ++j) {
      const Vec phi = beta_kernel(K, p.w1, p.w2[j]);
      double acc = 0.0;
      for (std::size_t k = 1; k <= K; ++k) acc += phi[k - 1] * cov[j][t - k];
      x += p.theta[j] * acc;
    }
    const double tau = std::exp(x);
    double g = 1.0;
    if (started) {
      const double e = r_prev - p.mu;
      g = (1.0 - p.alpha - p.beta) + p.alpha * e * e / tau + p.beta * g_prev;
    }
    started = true;
    const double h = tau * g;
    out.tau.push_back(tau);
    out.g.push_back(g);
    out.h.push_back(h);
    const double e = r[d] - p.mu;
    out.loglik += -0.5 * kLn2Pi - 0.5 * std::log(h) - 0.5 * e * e / h;
    g_prev = g;
    r_prev = r[d];
  }
  return out;
}

// --- PCA ----------------------------------------------------------------------

struct EigenPairs {
  Vec values;  // descending
  Mat vectors;  // vectors[c] is the c-th eigenvector
};

inline EigenPairs symmetric_eigen(const Mat& a) {
  const std::size_t p = a.size();
  gsl_matrix* m = gsl_matrix_alloc(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) gsl_matrix_set(m, i, j, a[i][j]);
  gsl_vector* eval = gsl_vector_alloc(p);
  gsl_matrix* evec = gsl_matrix_alloc(p, p);
  gsl_eigen_symmv_workspace* w = gsl_eigen_symmv_alloc(p);
  gsl_eigen_symmv(m, eval, evec, w);
  gsl_eigen_symmv_sort(eval, evec, GSL_EIGEN_SORT_VAL_DESC);
  EigenPairs out;
  for (std::size_t c = 0; c < p; ++c) {
    out.values.push_back(gsl_vector_get(eval, c));
    Vec v(p);
    for (std::size_t i = 0; i < p; ++i) v[i] = gsl_matrix_get(evec, i, c);
    out.vectors.push_back(v);
  }
  gsl_eigen_symmv_free(w);
  gsl_matrix_free(evec);
  gsl_vector_free(eval);
  gsl_matrix_free(m);
  return out;
}

inline Mat sample_covariance(const Mat& x) {
  const std::size_t n = x.size(), p = x[0].size();
  Vec mean(p, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < p; ++j) mean[j] += row[j] / double(n);
  Mat c(p, Vec(p, 0.0));
  for (const auto& row : x)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) c[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
  for (auto& row : c)
    for (double& v : row) v /= double(n - 1);
  return c;
}

// --- attention ----------------------------------------------------------------

inline Mat attention(const Mat& q, const Mat& k, const Mat& v) {
  const std::size_t n = q.size(), m = k.size(), dk = q[0].size(), dv = v[0].size();
  Mat out(n, Vec(dv, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    Vec s(m);
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < dk; ++c) dot += q[i][c] * k[j][c];
      s[j] = dot / std::sqrt(double(dk));
    }
    double denom = 0.0;
    for (double x : s) denom += std::exp(x);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t c = 0; c < dv; ++c) out[i][c] += std::exp(s[j]) / denom * v[j][c];
  }
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.size(), Vec(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat add_bias(Mat a, const Vec& b) {
  for (auto& row : a)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
  return a;
}

inline Mat layer_norm(const Mat& x, const Vec& gain, const Vec& bias) {
  Mat y = x;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double d = double(x[r].size());
    double mean = 0.0, var = 0.0;
    for (double v : x[r]) mean += v / d;
    for (double v : x[r]) var += (v - mean) * (v - mean) / d;
    for (std::size_t j = 0; j < x[r].size(); ++j)
      y[r][j] = (x[r][j] - mean) / std::sqrt(var + 1e-5) * gain[j] + bias[j];
  }
  return y;
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

struct TinyLayer {
  Vec ln1_gain, ln1_bias;
  std::vector<Mat> wq, wk, wv;
  Mat wo;
  Vec ln2_gain, ln2_bias;
  Mat ff1;
  Vec ff1_bias;
  Mat ff2;
  Vec ff2_bias;
};

struct TinyModel {
  Mat embed;
  Vec embed_bias;
  std::vector<TinyLayer> layers;
  Vec final_gain, final_bias;
  Mat head1;
  Vec head1_bias;
  Mat head2;
  double head2_bias = 0.0;
};

inline Mat multi_head(const Mat& a, const TinyLayer& L) {
  Mat concat(a.size());
  for (std::size_t h = 0; h < L.wq.size(); ++h) {
    const Mat out = attention(matmul(a, L.wq[h]), matmul(a, L.wk[h]), matmul(a, L.wv[h]));
    for (std::size_t r = 0; r < a.size(); ++r) concat[r].insert(concat[r].end(), out[r].begin(), out[r].end());
  }
  return matmul(concat, L.wo);
}

// Step-by-step forward pass of the pre-norm encoder regressor.
inline double encoder(const TinyModel& w, const Mat& x) {
  Mat e = add_bias(matmul(x, w.embed), w.embed_bias);
  for (const auto& L : w.layers) {
    const Mat att = multi_head(layer_norm(e, L.ln1_gain, L.ln1_bias), L);
    for (std::size_t r = 0; r < e.size(); ++r)
      for (std::size_t j = 0; j < e[r].size(); ++j) e[r][j] += att[r][j];
    Mat u = add_bias(matmul(layer_norm(e, L.ln2_gain, L.ln2_bias), L.ff1), L.ff1_bias);
    for (auto& row : u)
      for (double& v : row) v = gelu(v);
    const Mat ff = add_bias(matmul(u, L.ff2), L.ff2_bias);
    for (std::size_t r = 0; r < e.size(); ++r)
      for (std::size_t j = 0; j < e[r].size(); ++j) e[r][j] += ff[r][j];
  }
  const Mat z = layer_norm(e, w.final_gain, w.final_bias);
  Vec pooled(z[0].size(), 0.0);
  for (const auto& row : z)
    for (std::size_t j = 0; j < row.size(); ++j) pooled[j] += row[j] / double(z.size());
  Mat u = add_bias(matmul(Mat{pooled}, w.head1), w.head1_bias);
  double y = w.head2_bias;
  for (std::size_t j = 0; j < u[0].size(); ++j) y += gelu(u[0][j]) * w.head2[j][0];
  return y;
}

// --- losses -------------------------------------------------------------------

struct Losses {
  double mse = 0, hmse = 0, mae = 0, mape = 0, qlike = 0, r2log = 0;
};

inline Losses losses(const Vec& h, const Vec& rv) {
  Losses l;
  const double n = double(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    l.mse += (rv[i] - h[i]) * (rv[i] - h[i]) / n;
    l.hmse += (1.0 - h[i] / rv[i]) * (1.0 - h[i] / rv[i]) / n;
    l.mae += std::fabs(rv[i] - h[i]) / n;
    l.mape += std::fabs(1.0 - h[i] / rv[i]) / n;
    l.qlike += (std::log(h[i]) + rv[i] / h[i]) / n;
  }
  // With one regressor and an intercept, R^2 is the squared correlation.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / n;
    my += std::log(rv[i]) / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx, dy = std::log(rv[i]) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  l.r2log = sxx == 0.0 ? 0.0 : sxy * sxy / (sxx * syy);
  return l;
}

}  // namespace oracle
