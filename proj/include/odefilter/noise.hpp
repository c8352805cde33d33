#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace odefilter {

/// Measurement-variance rule R(h) for the derivative data.
class NoiseModel {
 public:
  struct Zero {};
  struct Constant {
    double R = 0.0;
  };
  /// R = K_R * h^p; p may be +infinity, in which case R = 0.
  struct PowerLaw {
    double K_R = 0.0;
    double p = 1.0;
  };

  NoiseModel() = default;

  [[nodiscard]] static NoiseModel zero() { return NoiseModel(Zero{}); }
  [[nodiscard]] static NoiseModel constant(double R);
  [[nodiscard]] static NoiseModel power_law(double K_R, double p);

  /// Accepts `zero`, `const:<R>`, `power:<p>:<K_R>` (p may be `inf`).
  [[nodiscard]] static NoiseModel parse(std::string_view text);

  [[nodiscard]] double evaluate(double h) const;

  /// Whether R = K h^p with p >= q holds (zero noise always qualifies).
  /// Labels runs; never used to reject them.
  [[nodiscard]] bool is_permissible(int q) const;

  /// Order p of the model: +inf for zero noise, 0 for a nonzero constant.
  [[nodiscard]] double order() const;
  /// Constant in front of h^p (R itself for Constant, 0 for Zero).
  [[nodiscard]] double constant_factor() const;

  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] const auto& variant() const { return model_; }

  friend bool operator==(const NoiseModel& a, const NoiseModel& b) { return a.to_string() == b.to_string(); }

 private:
  using Variant = std::variant<Zero, Constant, PowerLaw>;
  explicit NoiseModel(Variant v) : model_(v) {}
  Variant model_{Zero{}};
};

}  // namespace odefilter
