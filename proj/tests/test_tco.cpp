#include <gtest/gtest.h>

#include <cmath>

#include "mcdm/io.hpp"
#include "mcdm/tco.hpp"
#include "support.hpp"

using namespace mcdm;

namespace {

VehicleSpec bare(double price) {
  VehicleSpec s;
  s.label = "bare";
  s.segment = "x";
  s.purchase_price = price;
  return s;
}

// Present value of one unit paid at the end of years 1..T.
double annuity(double r, int T) { return r == 0.0 ? T : (1.0 - std::pow(1.0 + r, -T)) / r; }

double closed_form_tco(const VehicleSpec& s) {
  const double annual = s.annual_distance * s.energy_consumption * s.energy_price + s.annual_maintenance +
                        s.annual_insurance_and_taxes;
  return s.purchase_price - s.incentives + annual * annuity(s.discount_rate, s.holding_period) -
         s.resale_fraction * s.purchase_price * std::pow(1.0 + s.discount_rate, -s.holding_period);
}

VehicleSpec ev() {
  VehicleSpec s{"ev", "8-11 Lakhs", Powertrain::EV, 1000000, 100000, 12000, 0.13, 8, 6000, 25000, 8, 0.08, 0.3};
  return s;
}

VehicleSpec ice() {
  VehicleSpec s{"ice", "8-11 Lakhs", Powertrain::ICEV, 800000, 0, 12000, 0.06, 100, 14000, 28000, 8, 0.08, 0.4};
  return s;
}

}  // namespace

TEST(Tco, PurchaseOnly) { EXPECT_EQ(tco(bare(750000)), 750000); }

TEST(Tco, UndiscountedTwoYears) {
  auto s = bare(500000);
  s.incentives = 20000;
  s.annual_distance = 10000;
  s.energy_consumption = 0.1;
  s.energy_price = 5;
  s.annual_maintenance = 3000;
  s.holding_period = 2;
  const double c = 10000 * 0.1 * 5 + 3000;
  EXPECT_DOUBLE_EQ(tco(s), 500000 - 20000 + 2 * c);
}

TEST(Tco, MatchesAnnuityClosedForm) {
  for (const auto& s : {ev(), ice()}) EXPECT_NEAR(tco(s), closed_form_tco(s), 1e-6);
}

TEST(Tco, CrossoverDistanceClosedForm) {
  // TCO is affine in annual distance: base + d * per_km. Solve for equality.
  auto e = ev(), i = ice();
  e.annual_distance = i.annual_distance = 0;
  const double per_km_e = e.energy_consumption * e.energy_price * annuity(e.discount_rate, e.holding_period);
  const double per_km_i = i.energy_consumption * i.energy_price * annuity(i.discount_rate, i.holding_period);
  const double d_star = (closed_form_tco(e) - closed_form_tco(i)) / (per_km_i - per_km_e);
  ASSERT_GT(d_star, 0.0);

  e.annual_distance = i.annual_distance = d_star;
  EXPECT_NEAR(tco(e), tco(i), 1e-5);
  e.annual_distance = i.annual_distance = d_star * 0.9;
  EXPECT_GT(tco(e), tco(i));
  e.annual_distance = i.annual_distance = d_star * 1.1;
  EXPECT_LT(tco(e), tco(i));
}

TEST(Tco, Monotonicity) {
  const auto base = ev();
  const double t0 = tco(base);
  auto s = base;
  s.purchase_price += 1000;
  EXPECT_GT(tco(s), t0);
  s = base;
  s.energy_price += 0.5;
  EXPECT_GT(tco(s), t0);
  s = base;
  s.annual_distance += 100;
  EXPECT_GT(tco(s), t0);
}

TEST(Tco, IncentiveLinearity) {
  auto s = ev();
  s.incentives = 0;
  const double t0 = tco(s);
  for (double x : {1.0, 12345.0, 150000.0}) {
    s.incentives = x;
    EXPECT_DOUBLE_EQ(tco(s), t0 - x);
  }
}

TEST(Tco, DiscountLimitIsUndiscountedSum) {
  auto s = ev();
  s.discount_rate = 0;
  const double annual = s.annual_distance * s.energy_consumption * s.energy_price + s.annual_maintenance +
                        s.annual_insurance_and_taxes;
  EXPECT_NEAR(tco(s), s.purchase_price - s.incentives + s.holding_period * annual - s.resale_fraction * s.purchase_price,
              1e-6);
}

TEST(Tco, InvalidSpec) {
  for (auto mutate : std::vector<void (*)(VehicleSpec&)>{
           [](VehicleSpec& s) { s.purchase_price = -1; }, [](VehicleSpec& s) { s.holding_period = 0; },
           [](VehicleSpec& s) { s.discount_rate = 1.0; }, [](VehicleSpec& s) { s.resale_fraction = 1.5; },
           [](VehicleSpec& s) { s.energy_price = std::nan(""); }}) {
    auto s = ev();
    mutate(s);
    EXPECT_FALSE(spec_problems(s).empty());
    try {
      tco(s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
    }
  }
}

TEST(SegmentAverage, SingletonAndPair) {
  const std::vector<VehicleSpec> one{ev()};
  EXPECT_EQ(segment_average_tco(one, "8-11 Lakhs", Powertrain::EV), tco(ev()));
  auto b = ev();
  b.purchase_price += 50000;
  const std::vector<VehicleSpec> two{ev(), b, ice()};
  EXPECT_DOUBLE_EQ(segment_average_tco(two, "8-11 Lakhs", Powertrain::EV), (tco(ev()) + tco(b)) / 2);
  try {
    segment_average_tco(two, "8-11 Lakhs", Powertrain::HEV);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMatchingVehicles);
  }
}

// The fixture's three compact EVs, recomputed from their literal parameters.
TEST(SegmentAverage, FixtureFleetHandSummation) {
  const auto fleet = io::load_fleet(testing_support::fixtures() / "fleet.json");
  const double a = annuity(0.08, 8), v = std::pow(1.08, -8);
  const double t1 = 850000 - 150000 + (12000 * 0.12 * 8 + 6000 + 22000) * a - 0.30 * 850000 * v;
  const double t2 = 990000 - 150000 + (12000 * 0.13 * 8 + 6500 + 25000) * a - 0.30 * 990000 * v;
  const double t3 = 1080000 - 150000 + (12000 * 0.14 * 8 + 7000 + 27000) * a - 0.28 * 1080000 * v;
  EXPECT_NEAR(segment_average_tco(fleet, "8-11 Lakhs", Powertrain::EV), (t1 + t2 + t3) / 3, 1e-6);
}

TEST(AlternativeLabel, Parses) {
  auto k = parse_alternative_label("EV (8-11 Lakhs)");
  ASSERT_TRUE(k);
  EXPECT_EQ(k->powertrain, Powertrain::EV);
  EXPECT_EQ(k->segment, "8-11 Lakhs");
  EXPECT_EQ(parse_alternative_label("HEV (19-25 Lakhs)")->powertrain, Powertrain::HEV);
  EXPECT_FALSE(parse_alternative_label("Tram (8-11 Lakhs)"));
  EXPECT_FALSE(parse_alternative_label("EV 8-11"));
  EXPECT_FALSE(parse_alternative_label("EV ()"));
}
