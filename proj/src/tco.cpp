#include "mcdm/tco.hpp"

#include <cmath>

namespace mcdm {

std::string_view to_string(Powertrain p) {
  switch (p) {
    case Powertrain::EV: return "EV";
    case Powertrain::ICEV: return "ICEV";
    case Powertrain::HEV: return "HEV";
  }
  return "EV";
}

std::optional<Powertrain> parse_powertrain(std::string_view text) {
  if (text == "EV") return Powertrain::EV;
  if (text == "ICEV") return Powertrain::ICEV;
  if (text == "HEV") return Powertrain::HEV;
  return std::nullopt;
}

std::vector<std::string> spec_problems(const VehicleSpec& s) {
  std::vector<std::string> out;
  auto non_negative = [&](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) out.push_back(std::string(field) + " must be finite and >= 0");
  };
  non_negative(s.purchase_price, "purchase_price");
  non_negative(s.incentives, "incentives");
  non_negative(s.annual_distance, "annual_distance");
  non_negative(s.energy_consumption, "energy_consumption");
  non_negative(s.energy_price, "energy_price");
  non_negative(s.annual_maintenance, "annual_maintenance");
  non_negative(s.annual_insurance_and_taxes, "annual_insurance_and_taxes");
  if (s.holding_period < 1) out.push_back("holding_period must be >= 1");
  if (!(s.discount_rate >= 0.0 && s.discount_rate < 1.0)) out.push_back("discount_rate must be in [0, 1)");
  if (!(s.resale_fraction >= 0.0 && s.resale_fraction <= 1.0)) out.push_back("resale_fraction must be in [0, 1]");
  return out;
}

double tco(const VehicleSpec& s) {
  if (auto problems = spec_problems(s); !problems.empty())
    throw Error(ErrorCode::InvalidSpec, "invalid vehicle spec '" + s.label + "'", std::move(problems));
  const double annual = s.annual_distance * s.energy_consumption * s.energy_price + s.annual_maintenance +
                        s.annual_insurance_and_taxes;
  double total = s.purchase_price - s.incentives;
  double factor = 1.0;
  for (int t = 1; t <= s.holding_period; ++t) {
    factor /= 1.0 + s.discount_rate;
    total += annual * factor;
  }
  return total - s.resale_fraction * s.purchase_price * factor;
}

double segment_average_tco(std::span<const VehicleSpec> specs, std::string_view segment, Powertrain powertrain) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : specs) {
    if (s.segment != segment || s.powertrain != powertrain) continue;
    sum += tco(s);
    ++count;
  }
  if (count == 0)
    throw Error(ErrorCode::NoMatchingVehicles, "no " + std::string(to_string(powertrain)) + " vehicles in segment '" +
                                                   std::string(segment) + "'");
  return sum / static_cast<double>(count);
}

std::optional<SegmentKey> parse_alternative_label(std::string_view label) {
  const auto open = label.find(" (");
  if (open == std::string_view::npos || label.empty() || label.back() != ')') return std::nullopt;
  auto pt = parse_powertrain(label.substr(0, open));
  if (!pt) return std::nullopt;
  auto segment = label.substr(open + 2, label.size() - open - 3);
  if (segment.empty()) return std::nullopt;
  return SegmentKey{*pt, std::string(segment)};
}

}  // namespace mcdm
