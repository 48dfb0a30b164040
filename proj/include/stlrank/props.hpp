#pragma once

#include "stlrank/formula.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stlrank::props {

/// Channel holding the daily average position.
inline constexpr std::string_view kPositionChannel = "x";
/// Channel holding its unit-step discrete derivative.
inline constexpr std::string_view kDerivativeChannel = "d1(x)";
/// Position value marking a day without data.
inline constexpr double kMissing = -1.0;
/// Default `x == r` tolerance of `reach`: daily averages within half a position count.
inline constexpr double kReachTolerance = 0.5;

enum class Property {
  FlatStart,
  ColdStart,
  WarmStart,
  SteadyState,
  Reach,
  Ditch,
  Spike,
  NoInitMiss,
  NoLongMiss,
};

inline constexpr std::array<Property, 9> kAllProperties = {
    Property::FlatStart, Property::ColdStart, Property::WarmStart, Property::SteadyState, Property::Reach,
    Property::Ditch,     Property::Spike,     Property::NoInitMiss, Property::NoLongMiss,
};

std::string_view name(Property p) noexcept;
std::optional<Property> property_from_name(std::string_view name) noexcept;

/**
 * Parameters shared by the library. Only the fields a property uses need to
 * be set; `w` is a window length in days, `epsilon` a noise tolerance, `d` a
 * jump amplitude in positions, `s` an entry threshold and `r` a target
 * position.
 */
struct PropertyParams {
  std::optional<double> w;
  std::optional<double> epsilon;
  std::optional<double> d;
  std::optional<double> s;
  std::optional<double> r;
  double reach_tolerance = kReachTolerance;

  friend bool operator==(const PropertyParams&, const PropertyParams&) = default;
};

/// Sets a parameter by field name (w, eps/epsilon, d, s, r, tol). Throws ParameterError.
void set_param(PropertyParams& params, std::string_view field, double value);

struct PropertySpec {
  std::string name;
  std::optional<Property> property;  ///< empty for ad-hoc formulas
  PropertyParams params;
  Formula formula;
};

/// Materialises the canonical formula. Throws ParameterError naming the
/// first missing or invalid field.
PropertySpec build(Property p, const PropertyParams& params);

/// Wraps an arbitrary formula so it can sit in a library next to the named properties.
PropertySpec custom(std::string name, Formula f);

/// Defaults used by the CLI and the examples.
PropertyParams default_params(Property p);

/// All nine properties with default parameters, in declaration order.
std::vector<PropertySpec> default_library();

/// Canonical text form, parseable by parse_formula.
std::string describe(const PropertySpec& spec);

}  // namespace stlrank::props
