#include "odefilter/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "odefilter/error.hpp"
#include "odefilter/format.hpp"

namespace odefilter {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_number(std::string_view text, std::string_view what) {
  if (text == "inf" || text == "+inf" || text == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError,
                "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
}

}  // namespace

NoiseModel NoiseModel::constant(double R) {
  if (!(R >= 0.0) || !std::isfinite(R)) {
    throw Error(ErrorCode::InvalidArgument, "constant noise must be finite and non-negative");
  }
  return NoiseModel(Constant{R});
}

NoiseModel NoiseModel::power_law(double K_R, double p) {
  if (!(K_R >= 0.0) || !std::isfinite(K_R)) {
    throw Error(ErrorCode::InvalidArgument, "K_R must be finite and non-negative");
  }
  if (!(p >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise order p must lie in [0, inf]");
  }
  return NoiseModel(PowerLaw{K_R, p});
}

NoiseModel NoiseModel::parse(std::string_view text) {
  if (text == "zero") {
    return zero();
  }
  if (text.starts_with("const:")) {
    return constant(parse_number(text.substr(6), "R"));
  }
  if (text.starts_with("power:")) {
    const std::string_view rest = text.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "power noise needs the form power:<p>:<K_R>");
    }
    return power_law(parse_number(rest.substr(colon + 1), "K_R"),
                     parse_number(rest.substr(0, colon), "p"));
  }
  throw Error(ErrorCode::ConfigError, "unknown noise model '" + std::string(text) + "'");
}

double NoiseModel::evaluate(double h) const {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise evaluated at non-positive h");
  }
  return std::visit(Overloaded{
                        [](const Zero&) { return 0.0; },
                        [](const Constant& c) { return c.R; },
                        [h](const PowerLaw& pl) {
                          if (std::isinf(pl.p) || pl.K_R == 0.0) {
                            return 0.0;
                          }
                          return pl.K_R * std::pow(h, pl.p);
                        },
                    },
                    model_);
}

bool NoiseModel::is_permissible(int q) const {
  return std::visit(Overloaded{
                        [](const Zero&) { return true; },
                        [](const Constant& c) { return c.R == 0.0; },
                        [q](const PowerLaw& pl) { return pl.K_R == 0.0 || pl.p >= q; },
                    },
                    model_);
}

double NoiseModel::order() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return std::numeric_limits<double>::infinity(); },
                        [](const Constant& c) {
                          return c.R == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
                        },
                        [](const PowerLaw& pl) { return pl.p; },
                    },
                    model_);
}

double NoiseModel::constant_factor() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return 0.0; },
                        [](const Constant& c) { return c.R; },
                        [](const PowerLaw& pl) { return pl.K_R; },
                    },
                    model_);
}

std::string NoiseModel::to_string() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return std::string("zero"); },
                        [](const Constant& c) { return "const:" + format_shortest(c.R); },
                        [](const PowerLaw& pl) {
                          return "power:" + format_shortest(pl.p) + ":" + format_shortest(pl.K_R);
                        },
                    },
                    model_);
}

}  // namespace odefilter
