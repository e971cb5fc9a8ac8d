#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clockwork/random_stream.hpp"

namespace clockwork {

struct Exponential {
  double rate;
};

struct Erlang {
  int shape;
  double rate;
};

struct HyperExponential {
  std::vector<double> probabilities;
  std::vector<double> rates;
};

/// Uniform on [a, b], 0 <= a < b.
struct Uniform {
  double a;
  double b;
};

/// exp(location + scale * N(0, 1)).
struct LogNormal {
  double location;
  double scale;
};

struct Deterministic {
  double value;
};

/// Distribution of an interarrival or service clock.
///
/// Immutable after construction; the constructor validates parameters and
/// throws std::invalid_argument on a malformed family.
class ClockSpec {
 public:
  using Family = std::variant<Exponential, Erlang, HyperExponential, Uniform,
                              LogNormal, Deterministic>;

  explicit ClockSpec(Family family);

  static ClockSpec exponential(double rate) { return ClockSpec(Exponential{rate}); }
  static ClockSpec erlang(int shape, double rate) { return ClockSpec(Erlang{shape, rate}); }
  static ClockSpec uniform(double a, double b) { return ClockSpec(Uniform{a, b}); }
  static ClockSpec lognormal(double location, double scale) {
    return ClockSpec(LogNormal{location, scale});
  }
  static ClockSpec deterministic(double value) { return ClockSpec(Deterministic{value}); }
  static ClockSpec hyperexponential(std::vector<double> probabilities,
                                    std::vector<double> rates) {
    return ClockSpec(HyperExponential{std::move(probabilities), std::move(rates)});
  }
  /// Two-phase hyperexponential with balanced means (p1/r1 = p2/r2); scv >= 1.
  static ClockSpec balanced_hyperexponential(double mean, double scv);

  const Family& family() const { return family_; }
  std::string_view family_name() const;
  std::string describe() const;

  double sample(RandomStream& stream) const;

  /// Exact E X^m for m in {1, 2, 3}.
  double moment(int m) const;
  double mean() const { return moment(1); }
  double scv() const;

  /// E|1 - X/EX|^3.
  double abs_centered_cubed() const;

  bool is_deterministic() const { return std::holds_alternative<Deterministic>(family_); }

  /// The law of factor * X.
  ClockSpec scaled(double factor) const;

 private:
  Family family_;
};

}  // namespace clockwork
