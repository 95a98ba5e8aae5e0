#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ridgelab/common.hpp"

#include <json.hpp>

namespace ridgelab {

enum class LinkKind { identity, cubic, abs_power, signed_power, piecewise };
enum class LinkParity { monotone, even };

// A link function f: [-1,1] -> [-1,1] with f(0)=0, f(1)=1, plus regularity
// metadata (Lipschitz constant, local-linearity slopes on [0.1,1]) when known
// in closed form for the analytic kinds.
class LinkFunction {
 public:
  static LinkFunction identity();
  static LinkFunction cubic();
  static LinkFunction abs_power(double p);         // |x|^p, even
  static LinkFunction signed_power(int p);         // sign(x)|x|^p, monotone
  // Table of (x, f(x)) breakpoints covering [-1,1]; linear interpolation.
  // For parity=even the table may cover [0,1] only and is mirrored.
  static LinkFunction piecewise(std::vector<std::pair<double, double>> points,
                                LinkParity parity);
  static LinkFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double operator()(double x) const;   // eval, clamps |x| <= 1 within 1e-9
  double envelope(double x) const;     // g(x) = max(|f(x)|, |f(-x)|), x in [0,1]

  LinkKind kind() const { return kind_; }
  LinkParity parity() const { return parity_; }
  std::optional<double> lipschitz() const { return lipschitz_; }
  std::optional<double> cf_lower() const { return cf_lower_; }
  std::optional<double> cf_upper() const { return cf_upper_; }
  std::string name() const;

 private:
  LinkFunction() = default;
  double eval_raw(double x) const;

  LinkKind kind_ = LinkKind::identity;
  LinkParity parity_ = LinkParity::monotone;
  double power_ = 1.0;
  std::vector<std::pair<double, double>> table_;
  std::optional<double> lipschitz_, cf_lower_, cf_upper_;
};

// min over a grid of [z_lo, z_hi] of |f(z+h) - f(z)|.
double finite_difference_min(const LinkFunction& f, double z_lo, double z_hi,
                             double h);

// Epsilon for the initial-action test at dimension d.
double iaht_epsilon(const LinkFunction& f, int d);

struct GahtEpsilon {
  double epsilon;
  double y_star;
};
// Epsilon and maximizing y for the good-action test given the anchor scale
// x_pre; ties in y broken toward the largest y.
GahtEpsilon gaht_epsilon(const LinkFunction& f, int d, double x_pre);

struct EpsilonSchedule {
  std::vector<double> values;  // values[i-1] is epoch i's epsilon
  int epochs() const { return static_cast<int>(values.size()); }
  double at(int epoch_1based) const { return values.at(epoch_1based - 1); }
};
EpsilonSchedule burnin_schedule(const LinkFunction& f, int d);

// Monotone inverse helpers on [0,1] (valid for any link nondecreasing on
// [0,1], which all supported kinds are). Return nullopt when no x in [0,1]
// qualifies.
//   link_inverse_min(v): smallest x in [0,1] with f(x) >= v
//   link_inverse_max(v): largest  x in [0,1] with f(x) <= v
std::optional<double> link_inverse_min(const LinkFunction& f, double v);
std::optional<double> link_inverse_max(const LinkFunction& f, double v);

}  // namespace ridgelab
