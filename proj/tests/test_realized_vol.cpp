#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mfvol/error.hpp"
#include "mfvol/realized_vol.hpp"

using namespace mfvol;
using namespace mfvol::realized_vol;

TEST_SUITE("realized_vol") {
  TEST_CASE("daily return is a percent log return") {
    CHECK(daily_return(100, 100) == 0.0);
    CHECK(daily_return(101, 100) == doctest::Approx(0.995033).epsilon(1e-6));
    CHECK(daily_return(100, 101) == doctest::Approx(-0.995033).epsilon(1e-6));
    CHECK(daily_return(100, 101) == -daily_return(101, 100));
    CHECK(testing::error_code([] { daily_return(0.0, 100); }) == Errc::NonPositivePrice);
  }

  TEST_CASE("realized variance examples") {
    CHECK(realized_variance(std::vector<double>(48, 3000.0)) == 0.0);

    std::vector<double> p{100.0};
    for (int i = 0; i < 48; ++i) p.push_back(p.back() * std::exp(0.001));
    CHECK(realized_variance(p) == doctest::Approx(0.48).epsilon(1e-12));

    const double r = 100.0 * std::log(1.01);
    CHECK(realized_variance(std::vector<double>{100, 101, 100}) == doctest::Approx(2 * r * r).epsilon(1e-12));
    CHECK(realized_variance(std::vector<double>{100, 101, 100}) == doctest::Approx(1.98018).epsilon(1e-5));

    CHECK(testing::error_code([] { realized_variance(std::vector<double>{100}); }) == Errc::InsufficientBars);
  }

  TEST_CASE("realized variance ignores a global price rescale") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.002);
    std::vector<double> p{2500.0};
    for (int i = 0; i < 47; ++i) p.push_back(p.back() * std::exp(n(rng)));
    auto q = p;
    for (double& x : q) x *= 7.3;
    CHECK(realized_variance(q) == doctest::Approx(realized_variance(p)).epsilon(1e-10));
  }

  TEST_CASE("scale parameter") {
    CHECK(scale_parameter(std::vector<double>{1, 1}, std::vector<double>{2, 2}) == 0.5);
    CHECK(scale_parameter(std::vector<double>{1, 2}, std::vector<double>{1, 4}) == 1.0);
    CHECK(testing::error_code([] { scale_parameter(std::vector<double>{1, 1}, std::vector<double>{0, 0}); }) ==
          Errc::ZeroRvSum);
    CHECK(testing::error_code([] { scale_parameter(std::vector<double>{1}, std::vector<double>{1, 2}); }) ==
          Errc::LengthMismatch);
  }

  TEST_CASE("adjusted RV") {
    CHECK(adjust_rv(std::vector<double>{2, 2}, 0.5) == std::vector<double>{1, 1});
    CHECK(adjust_rv(std::vector<double>{2, 3}, 1.0) == std::vector<double>{2, 3});
    const double lambda = scale_parameter(std::vector<double>{1, 1}, std::vector<double>{1, 3});
    CHECK(lambda == 0.5);
    CHECK(adjust_rv(std::vector<double>{1, 3}, lambda) == std::vector<double>{0.5, 1.5});
    CHECK(testing::error_code([] { adjust_rv(std::vector<double>{1}, 0.0); }) == Errc::NonPositiveLambda);
  }

  TEST_CASE("adjusted RV mean equals mean squared return") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> r(60), rv(60);
      for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = n(rng);
        rv[i] = u(rng);
      }
      const auto adj = adjust_rv(rv, scale_parameter(r, rv));
      double ma = 0, mr = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        ma += adj[i] / 60.0;
        mr += r[i] * r[i] / 60.0;
      }
      CHECK(std::abs(ma - mr) <= 1e-12 * mr);
    }
  }

  TEST_CASE("monthly RV") {
    CHECK(monthly_rv(std::vector<double>{1, -1}, std::vector<std::size_t>{0, 0}) == std::vector<double>{2});
    CHECK(monthly_rv(std::vector<double>{0, 0}, std::vector<std::size_t>{4, 4}) == std::vector<double>{0});
    CHECK(monthly_rv(std::vector<double>{1, 2}, std::vector<std::size_t>{3, 4}) == std::vector<double>{1, 4});
    CHECK(testing::error_code([] { monthly_rv(std::vector<double>{1, 2}, std::vector<std::size_t>{0, 2}); }) ==
          Errc::EmptyMonth);
  }

  TEST_CASE("compute builds the daily table and flags partial days") {
    marketdata::IntradaySeries s;
    for (int b = 0; b < 48; ++b) s.bars.push_back({"2021-01-04", 5 * b, 100.0});
    for (int b = 0; b < 48; ++b) s.bars.push_back({"2021-01-05", 5 * b, b % 2 ? 101.0 : 100.0});
    for (int b = 0; b < 10; ++b) s.bars.push_back({"2021-01-06", 5 * b, 102.0});
    const auto rv = compute(s);
    REQUIRE(rv.dates.size() == 2);
    CHECK(rv.dates[0] == "2021-01-05");
    CHECK(rv.ret[0] == doctest::Approx(daily_return(101.0, 100.0)));
    CHECK(rv.rv[0] == doctest::Approx(47 * std::pow(100 * std::log(1.01), 2)));
    CHECK(rv.rv[1] == 0.0);
    CHECK(rv.incomplete_days() == 1);
    for (std::size_t i = 0; i < rv.rv.size(); ++i) CHECK(rv.rv_adj[i] == rv.lambda * rv.rv[i]);

    const auto dir = testing::scratch("rv_save");
    save(rv, dir / "rv.csv", dir / "rv.json");
    const auto back = load(dir / "rv.csv", dir / "rv.json");
    CHECK(back.dates == rv.dates);
    CHECK(back.lambda == rv.lambda);
    CHECK(back.rv_adj == rv.rv_adj);
  }
}
