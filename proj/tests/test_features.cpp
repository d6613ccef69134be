#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mfvol/features.hpp"

using namespace mfvol;
using namespace mfvol::features;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

marketdata::AlignedPanel random_panel(std::size_t months, std::size_t days, std::mt19937_64& rng,
                                      std::vector<marketdata::MonthlyRecord>& monthly) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<marketdata::DailyRecord> daily;
  std::vector<marketdata::AttentionRecord> att;
  std::string month = "2015-01";
  for (std::size_t t = 0; t < months; ++t) {
    marketdata::MonthlyRecord m;
    m.month = month;
    for (double& v : m.values) v = n(rng);
    monthly.push_back(m);
    for (std::size_t d = 1; d <= days; ++d) {
      marketdata::DailyRecord r;
      r.date = month + (d < 10 ? "-0" : "-") + std::to_string(d);
      for (double& v : r.values) v = n(rng);
      daily.push_back(r);
      marketdata::AttentionRecord a;
      a.date = r.date;
      const double common = n(rng);
      for (double& v : a.values) v = common + 0.3 * n(rng);
      att.push_back(a);
    }
    month = marketdata::next_month(month);
  }
  return marketdata::align_mixed_frequency(daily, att, monthly);
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("collinear data has one component") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 1, 2, 2, 3, 3;
    const auto m = fit_pca(x, 1);
    CHECK(m.loadings(0, 0) == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(m.loadings(1, 0) == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(m.contributions(0) == doctest::Approx(1.0));
    Eigen::MatrixXd mid(1, 2);
    mid << 2, 2;
    CHECK(std::abs(transform(m, mid)(0, 0)) < 1e-12);
  }

  TEST_CASE("uncorrelated columns split the variance 3:1") {
    // Columns with sample variances 3 and 1 and zero sample covariance.
    Eigen::MatrixXd x(4, 2);
    const double a = 1.5, b = std::sqrt(3.0) / 2.0;
    x << a, b, -a, b, a, -b, -a, -b;
    const auto cov = oracle::sample_covariance(testing::to_rows(x));
    const auto eig = oracle::symmetric_eigen(cov);
    REQUIRE(cov[0][0] == doctest::Approx(3.0));
    REQUIRE(cov[1][1] == doctest::Approx(1.0));
    const auto m = fit_pca(x, 2);
    CHECK(m.contributions(0) == doctest::Approx(eig.values[0] / (eig.values[0] + eig.values[1])));
    CHECK(m.contributions(0) == doctest::Approx(0.75));
    CHECK(m.contributions(1) == doctest::Approx(0.25));
  }

  TEST_CASE("eigenvalues and loadings match an independent eigensolver") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd x = testing::random_matrix(40, 6, rng) * testing::random_matrix(6, 6, rng);
      const auto m = fit_pca(x, 6);
      const auto eig = oracle::symmetric_eigen(oracle::sample_covariance(testing::to_rows(x)));
      for (int c = 0; c < 6; ++c) {
        CHECK(m.eigenvalues(c) == doctest::Approx(eig.values[c]).epsilon(1e-9));
        double dot = 0.0;
        for (int i = 0; i < 6; ++i) dot += m.loadings(i, c) * eig.vectors[c][i];
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("transform and inverse") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd x = testing::random_matrix(30, 5, rng);
    const auto full = fit_pca(x, 5);
    CHECK(max_abs(inverse_transform(full, transform(full, x)) - x) < 1e-8);
    const Eigen::MatrixXd mean_row = full.means.transpose();
    CHECK(max_abs(transform(full, mean_row)) < 1e-12);
    CHECK(max_abs(inverse_transform(full, Eigen::MatrixXd::Zero(3, 5)).rowwise() - full.means.transpose()) == 0.0);

    double prev = INFINITY;
    for (std::size_t k = 1; k <= 5; ++k) {
      const auto m = fit_pca(x, k);
      const double err = (inverse_transform(m, transform(m, x)) - x).squaredNorm();
      CHECK(err <= prev + 1e-9);
      prev = err;
    }
  }

  TEST_CASE("scores are centered and uncorrelated") {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd x = testing::random_matrix(50, 7, rng) * testing::random_matrix(7, 7, rng);
    const auto m = fit_pca(x, 7);
    const Eigen::MatrixXd s = transform(m, x);
    CHECK(s.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd cov = s.transpose() * s / 49.0;
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        if (i != j) CHECK(std::abs(cov(i, j)) < 1e-8 * std::max(cov(i, i), cov(j, j)));
  }

  TEST_CASE("fit errors") {
    Eigen::MatrixXd one(1, 2);
    one << 1, 2;
    CHECK(testing::error_code([&] { fit_pca(one, 1); }) == Errc::BadShape);
    Eigen::MatrixXd x(3, 2);
    x << 1, 1, 2, 2, 3, 3;
    CHECK(testing::error_code([&] { fit_pca(x, 3); }) == Errc::BadShape);
    CHECK(testing::error_code([&] { fit_pca(x, 2); }) == Errc::RankDeficient);
    const auto m = fit_pca(x, 1);
    CHECK(testing::error_code([&] { transform(m, Eigen::MatrixXd::Zero(2, 3)); }) == Errc::BadShape);
    CHECK(testing::error_code([&] { inverse_transform(m, Eigen::MatrixXd::Zero(2, 2)); }) == Errc::BadShape);
  }

  TEST_CASE("factor panel adds 2 monthly, 3 technical and 1 attention column") {
    std::mt19937_64 rng(12);
    std::vector<marketdata::MonthlyRecord> monthly;
    const auto panel = random_panel(6, 10, rng, monthly);
    const auto groups = default_groups();
    const auto fp = extract_factor_panel(panel, marketdata::monthly_frame(monthly), groups, 45);
    for (const char* c : {"PCM1", "PCM2", "TECH1", "TECH2", "TECH3", "BD1"}) CHECK(fp.panel.has_column(c));
    CHECK_FALSE(fp.panel.has_column("PCM3"));
    CHECK_FALSE(fp.panel.has_column("TECH4"));
    CHECK_FALSE(fp.panel.has_column("BD2"));
    CHECK(fp.monthly.columns.size() == 2);
    REQUIRE(fp.models.size() == 3);
    CHECK(fp.models[0].retained() == 2);
    CHECK(fp.models[1].retained() == 3);
    CHECK(fp.models[2].retained() == 1);
    // Monthly scores are repeated on every day of the month.
    for (std::size_t r = 0; r < fp.panel.rows(); ++r)
      CHECK(fp.panel.column("PCM1")[r] == fp.monthly.column("PCM1")[fp.panel.month_index[r]]);

    auto broken = panel;
    broken.columns.erase(broken.columns.begin());
    CHECK(testing::error_code([&] {
            extract_factor_panel(broken, marketdata::monthly_frame(monthly), groups, 45);
          }) == Errc::MissingColumn);
  }

  TEST_CASE("loadings ignore rows after the training split") {
    std::mt19937_64 rng(13);
    std::vector<marketdata::MonthlyRecord> monthly;
    const auto panel = random_panel(6, 10, rng, monthly);
    const auto groups = default_groups();
    const auto a = extract_factor_panel(panel, marketdata::monthly_frame(monthly), groups, 40);
    auto changed = panel;
    for (auto& col : changed.columns)
      for (std::size_t r = 40; r < changed.rows(); ++r) col.values[r] += 5.0;
    auto monthly2 = monthly;
    for (std::size_t t = 4; t < monthly2.size(); ++t) monthly2[t].values[0] += 5.0;
    const auto b = extract_factor_panel(changed, marketdata::monthly_frame(monthly2), groups, 40);
    for (std::size_t g = 0; g < a.models.size(); ++g) {
      CHECK(a.models[g].loadings == b.models[g].loadings);
      CHECK(a.models[g].means == b.models[g].means);
    }
  }

  TEST_CASE("model JSON round trip") {
    std::mt19937_64 rng(2);
    auto m = fit_pca(testing::random_matrix(20, 4, rng), 2);
    m.group = "tech";
    m.columns = {"a", "b", "c", "d"};
    const auto dir = testing::scratch("pca_json");
    save_model(m, dir / "m.json");
    const auto back = load_model(dir / "m.json");
    CHECK(back.group == "tech");
    CHECK(back.columns == m.columns);
    CHECK(back.loadings == m.loadings);
    CHECK(back.means == m.means);
    CHECK(back.contributions == m.contributions);
  }
}
