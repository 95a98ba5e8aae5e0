#include "ridgelab/linkfn.hpp"

#include <algorithm>
#include <cmath>

namespace ridgelab {

namespace {
constexpr double kEvalTol = 1e-9;

void check_table(const std::vector<std::pair<double, double>>& t) {
  if (t.size() < 2) throw ConfigError("piecewise link needs >= 2 breakpoints");
  for (size_t i = 1; i < t.size(); ++i) {
    if (!(t[i].first > t[i - 1].first))
      throw ConfigError("piecewise breakpoints must be strictly increasing");
  }
  for (const auto& [x, y] : t) {
    if (std::abs(y) > 1.0 + 1e-12)
      throw ConfigError("piecewise values must lie in [-1,1]");
  }
}
}  // namespace

LinkFunction LinkFunction::identity() {
  LinkFunction f;
  f.kind_ = LinkKind::identity;
  f.parity_ = LinkParity::monotone;
  f.power_ = 1.0;
  f.lipschitz_ = 1.0;
  f.cf_lower_ = 1.0;
  f.cf_upper_ = 1.0;
  return f;
}

LinkFunction LinkFunction::cubic() {
  LinkFunction f;
  f.kind_ = LinkKind::cubic;
  f.parity_ = LinkParity::monotone;
  f.power_ = 3.0;
  f.lipschitz_ = 3.0;
  f.cf_lower_ = 3.0 * 0.01;  // min of 3x^2 on [0.1,1]
  f.cf_upper_ = 3.0;
  return f;
}

LinkFunction LinkFunction::abs_power(double p) {
  if (!(p > 0)) throw ConfigError("abs_power requires p > 0");
  LinkFunction f;
  f.kind_ = LinkKind::abs_power;
  f.parity_ = LinkParity::even;
  f.power_ = p;
  if (p >= 1.0) {
    f.lipschitz_ = p;
    f.cf_upper_ = p;
  }
  f.cf_lower_ = p * std::pow(0.1, p - 1.0);
  return f;
}

LinkFunction LinkFunction::signed_power(int p) {
  if (p < 1) throw ConfigError("signed_power requires integer p >= 1");
  LinkFunction f;
  f.kind_ = LinkKind::signed_power;
  f.parity_ = LinkParity::monotone;
  f.power_ = static_cast<double>(p);
  f.lipschitz_ = static_cast<double>(p);
  f.cf_lower_ = p * std::pow(0.1, p - 1.0);
  f.cf_upper_ = static_cast<double>(p);
  return f;
}

LinkFunction LinkFunction::piecewise(
    std::vector<std::pair<double, double>> points, LinkParity parity) {
  std::sort(points.begin(), points.end());
  if (parity == LinkParity::even) {
    // Mirror the nonnegative part; drop any supplied negative half.
    std::vector<std::pair<double, double>> pos;
    for (const auto& p : points)
      if (p.first >= 0.0) pos.push_back(p);
    if (pos.empty() || pos.front().first > 0.0)
      pos.insert(pos.begin(), {0.0, 0.0});
    std::vector<std::pair<double, double>> full;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
      if (it->first > 0.0) full.push_back({-it->first, it->second});
    full.insert(full.end(), pos.begin(), pos.end());
    points = std::move(full);
  }
  check_table(points);
  if (points.front().first > -1.0 + 1e-12 || points.back().first < 1.0 - 1e-12)
    throw ConfigError("piecewise table must cover [-1,1]");
  LinkFunction f;
  f.kind_ = LinkKind::piecewise;
  f.parity_ = parity;
  f.table_ = std::move(points);
  if (std::abs(f(0.0)) > 1e-9 || std::abs(f(1.0) - 1.0) > 1e-9)
    throw ConfigError("link must satisfy f(0)=0, f(1)=1");
  return f;
}

double LinkFunction::eval_raw(double x) const {
  switch (kind_) {
    case LinkKind::identity:
      return x;
    case LinkKind::cubic:
      return x * x * x;
    case LinkKind::abs_power:
      return std::pow(std::abs(x), power_);
    case LinkKind::signed_power: {
      double v = std::pow(std::abs(x), power_);
      return x < 0 ? -v : v;
    }
    case LinkKind::piecewise: {
      auto it = std::lower_bound(
          table_.begin(), table_.end(), x,
          [](const std::pair<double, double>& p, double v) { return p.first < v; });
      if (it == table_.begin()) return table_.front().second;
      if (it == table_.end()) return table_.back().second;
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      if (x1 == x0) return y1;
      double t = (x - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return 0.0;
}

double LinkFunction::operator()(double x) const {
  if (std::abs(x) > 1.0 + kEvalTol)
    throw DomainError("link eval outside [-1,1]: x=" + std::to_string(x));
  x = std::clamp(x, -1.0, 1.0);
  return eval_raw(x);
}

double LinkFunction::envelope(double x) const {
  if (x < -kEvalTol || x > 1.0 + kEvalTol)
    throw DomainError("envelope argument outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  return std::max(std::abs((*this)(x)), std::abs((*this)(-x)));
}

std::string LinkFunction::name() const {
  switch (kind_) {
    case LinkKind::identity:
      return "identity";
    case LinkKind::cubic:
      return "cubic";
    case LinkKind::abs_power:
      return "abs_power(" + std::to_string(power_) + ")";
    case LinkKind::signed_power:
      return "signed_power(" + std::to_string(static_cast<int>(power_)) + ")";
    case LinkKind::piecewise:
      return "piecewise";
  }
  return "?";
}

LinkFunction LinkFunction::from_json(const nlohmann::json& j) {
  if (!j.contains("kind")) throw ConfigError("link: missing \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return identity();
  if (kind == "cubic") return cubic();
  if (kind == "abs_power") return abs_power(j.at("p").get<double>());
  if (kind == "signed_power") return signed_power(j.at("p").get<int>());
  if (kind == "piecewise") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : j.at("points"))
      pts.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    LinkParity par = LinkParity::monotone;
    if (j.value("parity", "monotone") == std::string("even"))
      par = LinkParity::even;
    return piecewise(std::move(pts), par);
  }
  throw ConfigError("link: unknown kind \"" + kind + "\"");
}

nlohmann::json LinkFunction::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case LinkKind::identity:
      j["kind"] = "identity";
      break;
    case LinkKind::cubic:
      j["kind"] = "cubic";
      break;
    case LinkKind::abs_power:
      j["kind"] = "abs_power";
      j["p"] = power_;
      break;
    case LinkKind::signed_power:
      j["kind"] = "signed_power";
      j["p"] = static_cast<int>(power_);
      break;
    case LinkKind::piecewise:
      j["kind"] = "piecewise";
      j["parity"] = parity_ == LinkParity::even ? "even" : "monotone";
      j["points"] = nlohmann::json::array();
      for (const auto& [x, y] : table_) j["points"].push_back({x, y});
      break;
  }
  return j;
}

namespace {
// Scan n evenly spaced points of [lo,hi] (inclusive), then rescan one grid
// cell around the incumbent. `better(a,b)` returns true when a improves on b;
// on ties prefer_hi keeps the larger abscissa.
template <typename Fn>
std::pair<double, double> grid_opt(double lo, double hi, Fn value, bool minimize,
                                   bool prefer_hi, int n = 512) {
  auto improves = [&](double v, double best) {
    return minimize ? v < best : v > best;
  };
  double best_x = lo, best_v = value(lo);
  double step = (hi - lo) / std::max(1, n - 1);
  for (int pass = 0; pass < 2; ++pass) {
    double a = pass == 0 ? lo : std::max(lo, best_x - step);
    double b = pass == 0 ? hi : std::min(hi, best_x + step);
    double s = (b - a) / std::max(1, n - 1);
    for (int i = 0; i < n; ++i) {
      double x = (i == n - 1) ? b : a + s * i;
      double v = value(x);
      if (improves(v, best_v) || (v == best_v && prefer_hi && x > best_x)) {
        best_v = v;
        best_x = x;
      }
    }
  }
  return {best_x, best_v};
}
}  // namespace

double finite_difference_min(const LinkFunction& f, double z_lo, double z_hi,
                             double h) {
  if (!(h > 0) || z_lo < -1e-12 || z_hi < z_lo)
    throw PreconditionError("finite_difference_min: bad interval");
  if (z_hi + h > 1.0 + 1e-9)
    throw DomainError("finite_difference_min: z_hi + h exceeds 1");
  auto value = [&](double z) { return std::abs(f(z + h) - f(z)); };
  return grid_opt(z_lo, z_hi, value, /*minimize=*/true, /*prefer_hi=*/false)
      .second;
}

double iaht_epsilon(const LinkFunction& f, int d) {
  if (d < 16) throw PreconditionError("iaht_epsilon: d < 16");
  double s = std::sqrt(static_cast<double>(d));
  double eps = 0.5 * finite_difference_min(f, 2.0 / s, 2.8 / s, 0.2 / s);
  if (!(eps > 0))
    throw DegenerateLinkError("iaht_epsilon: link flat on the test interval");
  return eps;
}

GahtEpsilon gaht_epsilon(const LinkFunction& f, int d, double x_pre) {
  double s = std::sqrt(static_cast<double>(d));
  if (!(x_pre >= 20.0 / s - 1e-12))
    throw PreconditionError("gaht_epsilon: x_pre < 20/sqrt(d)");
  double s2 = std::sqrt(2.0 * d);
  double h = 0.2 / s2;
  double y_lo = 20.0 / s2;
  double y_hi = x_pre / std::sqrt(2.0);
  auto value = [&](double y) {
    double zl = 5.0 * y / 6.0;
    double zh = std::min(5.0 * y / 3.0, 1.0 - h);  // clamp to the link domain
    if (zh < zl) zh = zl;
    return finite_difference_min(f, zl, zh, h);
  };
  auto [y_star, best] =
      grid_opt(y_lo, y_hi, value, /*minimize=*/false, /*prefer_hi=*/true);
  double eps = 0.5 * best;
  if (!(eps > 0))
    throw DegenerateLinkError("gaht_epsilon: link flat on the test range");
  return {eps, y_star};
}

EpsilonSchedule burnin_schedule(const LinkFunction& f, int d) {
  if (d < 16) throw PreconditionError("burnin_schedule: d < 16");
  int m = (d + 15) / 16;
  EpsilonSchedule sched;
  sched.values.reserve(m);
  double eps_init = iaht_epsilon(f, d);
  for (int i = 1; i <= m; ++i) {
    if (i <= 100) {
      sched.values.push_back(eps_init);
    } else {
      double x_pre = 2.0 * std::sqrt(static_cast<double>(i - 1) / d);
      sched.values.push_back(gaht_epsilon(f, d, x_pre).epsilon);
    }
  }
  return sched;
}

std::optional<double> link_inverse_min(const LinkFunction& f, double v) {
  if (f(0.0) >= v) return 0.0;
  if (f(1.0) < v) return std::nullopt;
  double lo = 0.0, hi = 1.0;  // f(lo) < v <= f(hi)
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) >= v ? hi : lo) = mid;
  }
  return hi;
}

std::optional<double> link_inverse_max(const LinkFunction& f, double v) {
  if (f(1.0) <= v) return 1.0;
  if (f(0.0) > v) return std::nullopt;
  double lo = 0.0, hi = 1.0;  // f(lo) <= v < f(hi)
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) <= v ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace ridgelab
