#include "stlrank/props.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/parser.hpp"

#include <cmath>

namespace stlrank::props {

namespace {

constexpr std::array<std::string_view, 9> kNames = {
    "flat_start", "cold_start", "warm_start", "steady_state", "reach",
    "ditch",      "spike",      "no_init_miss", "no_long_miss",
};

double require(const std::optional<double>& v, const char* field) {
  if (!v) throw ParameterError(field, "required parameter is missing");
  if (!std::isfinite(*v)) throw ParameterError(field, "must be finite");
  return *v;
}

// Upper bound of the window [0, w]; must be > 0.
double window(const PropertyParams& p, bool integral) {
  const double w = require(p.w, "w");
  if (!(w > 0.0)) throw ParameterError("w", "window length must be > 0");
  if (integral && w != std::floor(w)) throw ParameterError("w", "window length must be a whole number of days");
  return w;
}

double tolerance(const PropertyParams& p) {
  const double eps = require(p.epsilon, "epsilon");
  if (eps < 0.0) throw ParameterError("epsilon", "must be >= 0");
  return eps;
}

double amplitude(const PropertyParams& p) {
  const double d = require(p.d, "d");
  if (!(d > 0.0)) throw ParameterError("d", "must be > 0");
  return d;
}

Expr position() { return var(std::string(kPositionChannel)); }
Expr slope() { return var(std::string(kDerivativeChannel)); }
Formula miss() { return equals(position(), constant(kMissing)); }

Formula formula_for(Property prop, const PropertyParams& p) {
  switch (prop) {
    case Property::FlatStart: {
      const double w = window(p, true);
      return globally({0, w}, abs(slope()) < tolerance(p));
    }
    case Property::ColdStart: {
      const Interval i{0, window(p, true)};
      return globally(i, slope() <= 0.0) & eventually(i, slope() < 0.0);
    }
    case Property::WarmStart: {
      const Interval i{0, window(p, true)};
      return globally(i, slope() >= 0.0) & eventually(i, slope() > 0.0);
    }
    case Property::SteadyState: {
      const double w = window(p, false);
      return eventually({0, w}, globally(abs(slope()) < tolerance(p)));
    }
    case Property::Reach: {
      const double s = require(p.s, "s");
      const double r = require(p.r, "r");
      if (!(p.reach_tolerance >= 0.0) || !std::isfinite(p.reach_tolerance))
        throw ParameterError("tol", "must be finite and >= 0");
      return globally(implies(position() < s, eventually(equals(position(), constant(r), p.reach_tolerance))));
    }
    case Property::Ditch: {
      const double d = amplitude(p);
      const double w = window(p, false);
      return eventually((slope() > d) & eventually({0, w}, slope() < d));
    }
    case Property::Spike: {
      // Mirror image of ditch: ditch evaluated on the negated derivative.
      const double d = amplitude(p);
      const double w = window(p, false);
      return eventually((slope() < -d) & eventually({0, w}, slope() > -d));
    }
    case Property::NoInitMiss: return !globally({0, window(p, true)}, miss());
    case Property::NoLongMiss: return globally(implies(miss(), eventually({0, window(p, true)}, !miss())));
  }
  throw std::logic_error("unknown property");
}

}  // namespace

std::string_view name(Property p) noexcept { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Property> property_from_name(std::string_view n) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == n) return static_cast<Property>(i);
  return std::nullopt;
}

void set_param(PropertyParams& params, std::string_view field, double value) {
  if (field == "w") params.w = value;
  else if (field == "eps" || field == "epsilon") params.epsilon = value;
  else if (field == "d") params.d = value;
  else if (field == "s") params.s = value;
  else if (field == "r") params.r = value;
  else if (field == "tol") params.reach_tolerance = value;
  else throw ParameterError(std::string(field), "unknown parameter");
}

PropertySpec build(Property p, const PropertyParams& params) {
  return PropertySpec{std::string(name(p)), p, params, formula_for(p, params)};
}

PropertySpec custom(std::string spec_name, Formula f) {
  return PropertySpec{std::move(spec_name), std::nullopt, {}, std::move(f)};
}

PropertyParams default_params(Property p) {
  PropertyParams out;
  switch (p) {
    case Property::FlatStart:
    case Property::SteadyState:
      out.w = 3;
      out.epsilon = 1;
      break;
    case Property::ColdStart:
    case Property::WarmStart:
    case Property::NoInitMiss:
    case Property::NoLongMiss:
      out.w = 3;
      break;
    case Property::Reach:
      out.s = 10;
      out.r = 1;
      break;
    case Property::Ditch:
    case Property::Spike:
      out.d = 10;
      out.w = 2;
      break;
  }
  return out;
}

std::vector<PropertySpec> default_library() {
  std::vector<PropertySpec> lib;
  lib.reserve(kAllProperties.size());
  for (Property p : kAllProperties) lib.push_back(build(p, default_params(p)));
  return lib;
}

std::string describe(const PropertySpec& spec) { return print_formula(spec.formula); }

}  // namespace stlrank::props
