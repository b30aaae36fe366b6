#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yieldgap/crop_model.hpp"
#include "yieldgap/error.hpp"

namespace yieldgap {

/// A point in the input-yield plane: x is input per ha, y is yield in t/ha.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

struct ObservationSet {
  std::string stratum;
  std::vector<Point2> points;
};

/// Frontier points accumulated over one or more peeling rounds.
struct PeeledFrontier {
  std::vector<Point2> points;  // sorted by x, then y
  std::vector<int> round;      // peeling round (1-based) of each point
  int peel_rounds = 0;
};

struct FrontierFit {
  StressFactorParams params;  // input price left at 0
  double potential_yield = 0.0;
  bool potential_yield_fitted = false;
  std::vector<Point2> frontier_points;
  double rss = 0.0;
  int peel_rounds = 0;
};

/// Raised when the fit produced no usable optimum; carries the best candidate.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, FrontierFit best) : Error(what), best_(std::move(best)) {}
  const FrontierFit& best() const noexcept { return best_; }

 private:
  FrontierFit best_;
};

struct FitSettings {
  int lambda_grid = 61;                // log-spaced seeds over lambda
  double lambda_span_low = 1e-2;       // lambda * max(x) at the first seed
  double lambda_span_high = 1e2;       // lambda * max(x) at the last seed
};

/// Counter-clockwise hull vertices (monotone chain), starting from the
/// lowest-x, lowest-y point. Collinear inputs yield the two extreme points.
std::vector<Point2> convex_hull(std::span<const Point2> points);

/// Hull points whose (min x, max y) position no other point dominates,
/// including points lying on a hull edge. Sorted by increasing x.
std::vector<Point2> nw_frontier(std::span<const Point2> points);

/// Repeatedly extracts the north-west frontier until at least `min_count`
/// points are collected or the data run out.
PeeledFrontier peel_frontier(std::span<const Point2> points, std::size_t min_count = 4);

/// Least-squares fit of the conditional yield curve to frontier points.
/// Without `potential_yield` the curve fixes only ybar(1-s), ybar*s_bar and
/// lambda; the smallest compatible ybar is reported (see README).
FrontierFit fit_conditional_yield(std::span<const Point2> frontier, std::optional<double> potential_yield = {},
                                  const std::string& factor_name = "", const FitSettings& settings = {});

/// Sum of squared vertical residuals of the curve described by `fit`.
double fit_rss(const FrontierFit& fit, std::span<const Point2> points);

struct CalibrationSettings {
  std::size_t min_count = 4;
  std::optional<double> potential_yield;
  FitSettings fit;
};

enum class CalibrationStatus { Ok, InsufficientData, DegenerateInput, FitFailed, Error };

struct FactorCalibration {
  CalibrationStatus status = CalibrationStatus::Ok;
  std::optional<FrontierFit> fit;
  std::string message;
};

const char* to_string(CalibrationStatus s);

/// hull -> frontier -> peel -> fit for each factor of one stratum. Failures
/// are reported per factor. When no potential yield is supplied, the largest
/// per-factor estimate is shared by every factor and all are refitted.
std::map<std::string, FactorCalibration> calibrate_stratum(const std::map<std::string, ObservationSet>& factors,
                                                           const CalibrationSettings& settings = {});

/// Evenly spaced (x, fitted y) samples over [0, x_max] for plotting.
std::vector<Point2> sample_curve(const FrontierFit& fit, double x_max, std::size_t count = 101);

}  // namespace yieldgap
