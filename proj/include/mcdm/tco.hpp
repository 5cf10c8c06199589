#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcdm/error.hpp"

namespace mcdm {

enum class Powertrain { EV, ICEV, HEV };

std::string_view to_string(Powertrain p);
std::optional<Powertrain> parse_powertrain(std::string_view text);

/// One vehicle model's ownership assumptions. Energy consumption is kWh/km
/// for EVs and L/km otherwise; energy_price is per kWh or per L to match.
/// All money is in one unspecified currency unit.
struct VehicleSpec {
  std::string label;
  std::string segment;
  Powertrain powertrain = Powertrain::EV;
  double purchase_price = 0.0;
  double incentives = 0.0;
  double annual_distance = 0.0;
  double energy_consumption = 0.0;
  double energy_price = 0.0;
  double annual_maintenance = 0.0;
  double annual_insurance_and_taxes = 0.0;
  int holding_period = 1;
  double discount_rate = 0.0;
  double resale_fraction = 0.0;

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

std::vector<std::string> spec_problems(const VehicleSpec& spec);

/// Discounted total cost of ownership:
///   (price - incentives)
///   + sum_{t=1..T} (distance * consumption * energy_price + maintenance + insurance) / (1+r)^t
///   - resale_fraction * price / (1+r)^T
double tco(const VehicleSpec& spec);

/// Mean TCO over specs matching (segment, powertrain).
double segment_average_tco(std::span<const VehicleSpec> specs, std::string_view segment, Powertrain powertrain);

struct SegmentKey {
  Powertrain powertrain;
  std::string segment;
};

/// Parses alternative labels of the form "EV (8-11 Lakhs)".
std::optional<SegmentKey> parse_alternative_label(std::string_view label);

}  // namespace mcdm
