#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "mfvol/evaluation.hpp"

using namespace mfvol;
using namespace mfvol::evaluation;

namespace {

using V = std::vector<double>;

V positive_series(std::size_t n, std::mt19937_64& rng) {
  std::lognormal_distribution<double> ln(0.0, 0.7);
  V v(n);
  for (double& x : v) x = ln(rng);
  return v;
}

double mean_log_plus_one(const V& rv) {
  double s = 0.0;
  for (double x : rv) s += std::log(x);
  return s / double(rv.size()) + 1.0;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("perfect forecasts") {
    const V rv{0.5, 1.5, 2.0, 0.8};
    CHECK(mse(rv, rv) == 0.0);
    CHECK(hmse(rv, rv) == 0.0);
    CHECK(mae(rv, rv) == 0.0);
    CHECK(mape(rv, rv) == 0.0);
    CHECK(qlike(rv, rv) == doctest::Approx(mean_log_plus_one(rv)));
    CHECK(r2log(rv, rv) == doctest::Approx(1.0));
    CHECK(qlike(V{1}, V{1}) == 1.0);
  }

  TEST_CASE("single-point arithmetic and asymmetry") {
    CHECK(mse(V{1}, V{2}) == 1.0);
    CHECK(hmse(V{1}, V{2}) == 0.25);
    CHECK(mae(V{1}, V{2}) == 1.0);
    CHECK(mape(V{1}, V{2}) == 0.5);
    // Swapping forecast and truth.
    CHECK(mse(V{2}, V{1}) == mse(V{1}, V{2}));
    CHECK(mae(V{2}, V{1}) == mae(V{1}, V{2}));
    CHECK(hmse(V{2}, V{1}) != hmse(V{1}, V{2}));
    CHECK(mape(V{2}, V{1}) != mape(V{1}, V{2}));
    CHECK(qlike(V{2}, V{1}) != qlike(V{1}, V{2}));
    CHECK(r2log_loss(V{2, 1}, V{1, 1}) == r2log_loss(V{1, 1}, V{2, 1}));
  }

  TEST_CASE("measures match per-term summation") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const V h = positive_series(40, rng), rv = positive_series(40, rng);
      const auto ref = oracle::losses(h, rv);
      CHECK(std::abs(mse(h, rv) - ref.mse) <= 1e-12 * ref.mse);
      CHECK(std::abs(hmse(h, rv) - ref.hmse) <= 1e-12 * ref.hmse);
      CHECK(std::abs(mae(h, rv) - ref.mae) <= 1e-12 * ref.mae);
      CHECK(std::abs(mape(h, rv) - ref.mape) <= 1e-12 * ref.mape);
      CHECK(std::abs(qlike(h, rv) - ref.qlike) <= 1e-12 * std::abs(ref.qlike));
      CHECK(std::abs(r2log(h, rv) - ref.r2log) <= 1e-12);
    }
  }

  TEST_CASE("qlike is minimized at the truth") {
    std::mt19937_64 rng(2);
    const V rv = positive_series(20, rng);
    const double best = qlike(rv, rv);
    for (std::size_t i = 0; i < rv.size(); ++i)
      for (double f : {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}) {
        V h = rv;
        h[i] *= f;
        CHECK(qlike(h, rv) > best);
      }
  }

  TEST_CASE("r2log invariances and independence") {
    std::mt19937_64 rng(3);
    const V rv = positive_series(60, rng);
    V h = positive_series(60, rng);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::sqrt(h[i] * rv[i]);
    const double base = r2log(h, rv);
    V h2 = h, rv2 = rv;
    for (double& x : h2) x *= 3.7;
    for (double& x : rv2) x *= 0.2;
    CHECK(r2log(h2, rv) == doctest::Approx(base).epsilon(1e-12));
    CHECK(r2log(h, rv2) == doctest::Approx(base).epsilon(1e-12));
    V scaled = rv;
    for (double& x : scaled) x *= 2.5;
    CHECK(r2log(scaled, rv) == doctest::Approx(1.0));
    CHECK(base <= 1.0);

    const V a = positive_series(500, rng), b = positive_series(500, rng);
    CHECK(std::abs(r2log(a, b)) < 0.1);
  }

  TEST_CASE("measure errors") {
    CHECK(testing::error_code([] { mse(V{1, 2}, V{1}); }) == Errc::LengthMismatch);
    CHECK(testing::error_code([] { mse(V{}, V{}); }) == Errc::LengthMismatch);
    CHECK(testing::error_code([] { hmse(V{1}, V{0}); }) == Errc::NonPositiveTruth);
    CHECK(testing::error_code([] { mape(V{1}, V{-1}); }) == Errc::NonPositiveTruth);
    CHECK(testing::error_code([] { qlike(V{0}, V{1}); }) == Errc::NonPositiveInput);
    CHECK(testing::error_code([] { r2log(V{1}, V{1}); }) == Errc::TooShort);
    CHECK(testing::error_code([] { r2log(V{1, 2}, V{3, 3}); }) == Errc::DegenerateTruth);
  }

  TEST_CASE("ablation groups") {
    CHECK(group_columns(Group::G1).size() == 3);
    CHECK(group_columns(Group::G2).size() == 4);
    CHECK(group_columns(Group::G3).size() == 4);
    CHECK(group_columns(Group::G4).size() == 5);
    auto has = [](Group g, const std::string& c) {
      const auto cols = group_columns(g);
      return std::find(cols.begin(), cols.end(), c) != cols.end();
    };
    for (const auto& c : group_columns(Group::G1)) {
      CHECK(has(Group::G2, c));
      CHECK(has(Group::G3, c));
    }
    for (Group g : {Group::G2, Group::G3})
      for (const auto& c : group_columns(g)) CHECK(has(Group::G4, c));
    for (const auto& c : group_columns(Group::G4)) CHECK((has(Group::G2, c) || has(Group::G3, c)));
    CHECK(has(Group::G2, "BD1"));
    CHECK(has(Group::G3, "h"));
    CHECK_FALSE(has(Group::G1, "h"));

    marketdata::Frame f;
    f.labels = {"a", "b"};
    for (const char* c : {"TECH1", "TECH2", "TECH3", "BD1", "h", "other"}) f.add_column(c, {1.0, 2.0});
    const auto sub = ablation_features(Group::G3, f);
    CHECK(sub.column_names() == group_columns(Group::G3));
    f.columns.erase(f.columns.begin() + 4);
    CHECK(testing::error_code([&] { ablation_features(Group::G4, f); }) == Errc::MissingColumn);
    CHECK(parse_group("G2") == Group::G2);
    CHECK(group_name(Group::G4) == "G4");
  }

  TEST_CASE("persistence baseline") {
    const auto b = persistence_baseline(V{1, 2, 3});
    CHECK(b.pred == V{1, 2});
    CHECK(b.truth == V{2, 3});
    const auto c = persistence_baseline(V{4, 4, 4, 4});
    CHECK(mse(c.pred, c.truth) == 0.0);
    std::mt19937_64 rng(5);
    const V rv = positive_series(100, rng);
    const auto d = persistence_baseline(rv);
    double ref = 0.0;
    for (std::size_t i = 1; i < rv.size(); ++i) ref += (rv[i] - rv[i - 1]) * (rv[i] - rv[i - 1]) / 99.0;
    CHECK(mse(d.pred, d.truth) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(testing::error_code([] { persistence_baseline(V{1}); }) == Errc::TooShort);
  }

  TEST_CASE("report rows") {
    std::mt19937_64 rng(6);
    const V rv = positive_series(30, rng), h = positive_series(30, rng);
    const auto perfect = evaluate("m", "G4", rv, rv);
    CHECK(perfect.mse == 0.0);
    CHECK(perfect.hmse == 0.0);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.mape == 0.0);
    CHECK(perfect.qlike == doctest::Approx(mean_log_plus_one(rv)));
    CHECK(perfect.r2log == doctest::Approx(1.0));

    const auto a = evaluate("a", "G1", h, rv), b = evaluate("b", "G1", h, rv);
    CHECK(a.mse == b.mse);
    CHECK(a.r2log == b.r2log);

    V h2 = h, rv2 = rv;
    h2.insert(h2.end(), h.begin(), h.end());
    rv2.insert(rv2.end(), rv.begin(), rv.end());
    const auto dup = evaluate("a", "G1", h2, rv2);
    CHECK(dup.mse == doctest::Approx(a.mse).epsilon(1e-12));
    CHECK(dup.qlike == doctest::Approx(a.qlike).epsilon(1e-12));
    CHECK(dup.r2log == doctest::Approx(a.r2log).epsilon(1e-12));

    V with_zero = rv;
    with_zero[3] = 0.0;
    const auto ex = evaluate("a", "G1", h, with_zero);
    CHECK(ex.excluded == 1);
    CHECK(ex.n == 29);
  }

  TEST_CASE("report file layout") {
    ReportRow row{"transformer", "G4", 100, 0, 0.8624, 0.4460, 0.5871, 0.4787, 1.3620, 0.1710};
    const auto dir = testing::scratch("eval_report");
    save_report(std::vector{row}, dir / "report.csv");
    std::istringstream in(testing::read_file(dir / "report.csv"));
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "model,group,n,mse,hmse,mae,mape,qlike,r2log");
    CHECK(line.rfind("transformer,G4,100,0.8624,0.446", 0) == 0);
    CHECK(formula_notes().find("QLIKE") != std::string::npos);
  }
}
