#include "yieldgap/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/tools/minima.hpp>

namespace yieldgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point2> distinct_sorted(std::span<const Point2> points) {
  std::vector<Point2> v(points.begin(), points.end());
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DegenerateInputError("non-finite point coordinates");
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Point2> monotone_chain(const std::vector<Point2>& p) {
  const std::size_t n = p.size();
  std::vector<Point2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& q) {
  return cross(a, b, q) == 0.0 && q.x >= std::min(a.x, b.x) && q.x <= std::max(a.x, b.x) &&
         q.y >= std::min(a.y, b.y) && q.y <= std::max(a.y, b.y);
}

// Pareto-undominated points for (min x, max y); input sorted by (x, y).
std::vector<Point2> pareto_nw(const std::vector<Point2>& sorted) {
  std::vector<Point2> out;
  double best = -kInf;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1].x == sorted[i].x) ++j;
    const Point2& top = sorted[j];  // highest y at this x
    if (top.y > best) {
      out.push_back(top);
      best = top.y;
    }
    i = j + 1;
  }
  return out;
}

// Frontier of a deduplicated, sorted set. Sets of fewer than three points
// are their own hull.
std::vector<Point2> frontier_of(const std::vector<Point2>& sorted) {
  std::vector<Point2> pareto = pareto_nw(sorted);
  if (sorted.size() < 3) return pareto;
  const std::vector<Point2> hull = monotone_chain(sorted);
  std::vector<Point2> out;
  for (const auto& q : pareto) {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      if (on_segment(hull[i], hull[(i + 1) % hull.size()], q)) {
        out.push_back(q);
        break;
      }
    }
  }
  return out;
}

struct Box {
  double a_lo, a_hi, b_lo, b_hi;
};

struct Projection {
  double a = 0.0;
  double b = 0.0;
  double rss = kInf;
};

double rss_of(std::span<const Point2> pts, double a, double b, double lambda) {
  double sum = 0.0;
  for (const auto& p : pts) {
    const double r = p.y - (a + b * -std::expm1(-lambda * p.x));
    sum += r * r;
  }
  return sum;
}

// Best (a, b) for fixed lambda under box constraints: the model is linear in
// (a, b), so the constrained optimum is either the free optimum or lies on an edge.
Projection project(std::span<const Point2> pts, double lambda, const Box& box) {
  double n = 0, sg = 0, sgg = 0, sy = 0, sgy = 0;
  for (const auto& p : pts) {
    const double g = -std::expm1(-lambda * p.x);
    n += 1;
    sg += g;
    sgg += g * g;
    sy += p.y;
    sgy += g * p.y;
  }
  Projection best;
  auto consider = [&](double a, double b) {
    const double r = rss_of(pts, a, b, lambda);
    if (r < best.rss) best = {a, b, r};
  };
  const double det = n * sgg - sg * sg;
  if (det > 1e-14 * n * sgg) {
    const double b = (n * sgy - sg * sy) / det;
    const double a = (sy - b * sg) / n;
    if (a >= box.a_lo && a <= box.a_hi && b >= box.b_lo && b <= box.b_hi) {
      consider(a, b);
      return best;
    }
  }
  for (double a : {box.a_lo, box.a_hi}) {
    if (!std::isfinite(a)) continue;
    const double b = sgg > 0 ? std::clamp((sgy - a * sg) / sgg, box.b_lo, box.b_hi) : box.b_lo;
    consider(a, b);
  }
  for (double b : {box.b_lo, box.b_hi}) {
    if (!std::isfinite(b)) continue;
    consider(std::clamp((sy - b * sg) / n, box.a_lo, box.a_hi), b);
  }
  return best;
}

}  // namespace

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  const std::vector<Point2> p = distinct_sorted(points);
  if (p.size() < 3) throw DegenerateInputError("convex hull needs at least 3 distinct points");
  return monotone_chain(p);
}

std::vector<Point2> nw_frontier(std::span<const Point2> points) {
  const std::vector<Point2> p = distinct_sorted(points);
  if (p.size() < 3) throw DegenerateInputError("frontier needs at least 3 distinct points");
  return frontier_of(p);
}

PeeledFrontier peel_frontier(std::span<const Point2> points, std::size_t min_count) {
  if (min_count < 1) throw DomainError("min_count must be at least 1");
  if (points.size() < min_count) {
    throw InsufficientDataError("need at least " + std::to_string(min_count) + " observations, got " +
                                std::to_string(points.size()));
  }
  std::vector<Point2> working = distinct_sorted(points);
  if (working.size() < 3) throw DegenerateInputError("observations contain fewer than 3 distinct points");

  PeeledFrontier out;
  std::vector<std::pair<Point2, int>> acc;
  while (acc.size() < min_count && !working.empty()) {
    ++out.peel_rounds;
    const std::vector<Point2> f = frontier_of(working);
    for (const auto& q : f) acc.emplace_back(q, out.peel_rounds);
    std::erase_if(working, [&](const Point2& q) { return std::binary_search(f.begin(), f.end(), q); });
  }
  std::sort(acc.begin(), acc.end());
  for (const auto& [q, r] : acc) {
    out.points.push_back(q);
    out.round.push_back(r);
  }
  return out;
}

double fit_rss(const FrontierFit& fit, std::span<const Point2> points) {
  const double a = fit.potential_yield * (1.0 - fit.params.s);
  const double b = fit.potential_yield * fit.params.s_bar;
  return rss_of(points, a, b, fit.params.lambda);
}

FrontierFit fit_conditional_yield(std::span<const Point2> frontier, std::optional<double> potential_yield,
                                  const std::string& factor_name, const FitSettings& settings) {
  const std::size_t needed = potential_yield ? 3 : 4;
  if (frontier.size() < needed) {
    throw InsufficientDataError("curve fit needs at least " + std::to_string(needed) + " frontier points, got " +
                                std::to_string(frontier.size()));
  }
  std::set<double> xs;
  double x_max = 0.0;
  double y_max = -kInf;
  for (const auto& p : frontier) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y <= 0.0) {
      throw DomainError("frontier points need finite x >= 0 and y > 0");
    }
    xs.insert(p.x);
    x_max = std::max(x_max, p.x);
    y_max = std::max(y_max, p.y);
  }
  if (xs.size() < 3) throw InsufficientDataError("curve fit needs at least 3 distinct input levels");
  if (potential_yield && !(*potential_yield > 0.0)) throw DomainError("potential yield must be positive");
  if (settings.lambda_grid < 2 || !(settings.lambda_span_low > 0.0) ||
      !(settings.lambda_span_high > settings.lambda_span_low)) {
    throw DomainError("invalid lambda grid settings");
  }

  constexpr double eps = 1e-9;
  Box box;
  if (potential_yield) {
    const double yb = *potential_yield;
    box = {eps * yb, (1.0 - eps) * yb, eps * yb, yb};
  } else {
    box = {eps * y_max, kInf, eps * y_max, kInf};
  }

  const double u_lo = std::log(settings.lambda_span_low / x_max);
  const double u_hi = std::log(settings.lambda_span_high / x_max);
  const int n = settings.lambda_grid;
  std::vector<double> grid(n);
  int best_j = 0;
  double best_rss = kInf;
  for (int j = 0; j < n; ++j) {
    grid[j] = u_lo + (u_hi - u_lo) * j / (n - 1);
    const double r = project(frontier, std::exp(grid[j]), box).rss;
    if (r < best_rss) {  // strict: ties keep the smaller lambda
      best_rss = r;
      best_j = j;
    }
  }

  double u_best = grid[best_j];
  const double lo = grid[std::max(best_j - 1, 0)];
  const double hi = grid[std::min(best_j + 1, n - 1)];
  auto objective = [&](double u) { return project(frontier, std::exp(u), box).rss; };
  std::uintmax_t max_iter = 200;
  const auto [u_ref, r_ref] = boost::math::tools::brent_find_minima(
      objective, lo, hi, std::numeric_limits<double>::digits / 2 + 4, max_iter);
  if (r_ref < best_rss) u_best = u_ref;

  const double lambda = std::exp(u_best);
  const Projection pr = project(frontier, lambda, box);

  FrontierFit fit;
  fit.frontier_points.assign(frontier.begin(), frontier.end());
  fit.rss = pr.rss;
  fit.potential_yield_fitted = !potential_yield;
  fit.potential_yield = potential_yield ? *potential_yield : std::max(y_max, pr.a + pr.b);
  fit.params.name = factor_name;
  fit.params.lambda = lambda;
  fit.params.s = 1.0 - pr.a / fit.potential_yield;
  fit.params.s_bar = pr.b / fit.potential_yield;
  fit.params.input_price = 0.0;

  if (!std::isfinite(fit.rss)) throw FitFailure("curve fit produced a non-finite residual", fit);
  try {
    fit.params.validate();
  } catch (const DomainError& e) {
    throw FitFailure(std::string("fitted parameters are invalid: ") + e.what(), fit);
  }
  return fit;
}

const char* to_string(CalibrationStatus s) {
  switch (s) {
    case CalibrationStatus::Ok: return "ok";
    case CalibrationStatus::InsufficientData: return "insufficient-data";
    case CalibrationStatus::DegenerateInput: return "degenerate-input";
    case CalibrationStatus::FitFailed: return "fit-failure";
    case CalibrationStatus::Error: return "error";
  }
  return "error";
}

namespace {

FactorCalibration calibrate_one(const std::string& name, const ObservationSet& obs, const CalibrationSettings& cs,
                                std::optional<double> potential_yield) {
  FactorCalibration out;
  try {
    const PeeledFrontier pf = peel_frontier(obs.points, cs.min_count);
    FrontierFit fit = fit_conditional_yield(pf.points, potential_yield, name, cs.fit);
    fit.peel_rounds = pf.peel_rounds;
    out.fit = std::move(fit);
  } catch (const InsufficientDataError& e) {
    out.status = CalibrationStatus::InsufficientData;
    out.message = e.what();
  } catch (const DegenerateInputError& e) {
    out.status = CalibrationStatus::DegenerateInput;
    out.message = e.what();
  } catch (const FitFailure& e) {
    out.status = CalibrationStatus::FitFailed;
    out.message = e.what();
    out.fit = e.best();
  } catch (const Error& e) {
    out.status = CalibrationStatus::Error;
    out.message = e.what();
  }
  return out;
}

}  // namespace

std::map<std::string, FactorCalibration> calibrate_stratum(const std::map<std::string, ObservationSet>& factors,
                                                           const CalibrationSettings& settings) {
  std::map<std::string, FactorCalibration> out;
  for (const auto& [name, obs] : factors) out[name] = calibrate_one(name, obs, settings, settings.potential_yield);
  if (settings.potential_yield) return out;

  double shared = 0.0;
  for (const auto& [name, c] : out) {
    if (c.status == CalibrationStatus::Ok) shared = std::max(shared, c.fit->potential_yield);
  }
  if (!(shared > 0.0)) return out;
  for (auto& [name, c] : out) {
    if (c.status != CalibrationStatus::Ok) continue;
    c = calibrate_one(name, factors.at(name), settings, shared);
    if (c.fit) c.fit->potential_yield_fitted = true;
  }
  return out;
}

std::vector<Point2> sample_curve(const FrontierFit& fit, double x_max, std::size_t count) {
  if (count < 2 || !(x_max > 0.0)) throw DomainError("curve sampling needs count >= 2 and x_max > 0");
  std::vector<Point2> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = x_max * static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back({x, conditional_yield(fit.params, fit.potential_yield, x)});
  }
  return out;
}

}  // namespace yieldgap
