#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coresched {

enum class CurveFamily { exponential, power, linear_need, piecewise };

std::string_view to_string(CurveFamily family) noexcept;
CurveFamily curve_family_from_string(std::string_view name);

/// A region of cumulative data over which the base curve advances at
/// `rate_multiplier` times its normal speed. A multiplier of 0 is a plateau.
struct PlateauSegment {
    double start = 0.0;
    double end = 0.0;
    double rate_multiplier = 1.0;

    bool operator==(const PlateauSegment&) const = default;
};

/// True error as a non-increasing function of cumulative processed data.
///
/// Families (e0 = initial_error, f = floor, n = effective data):
///   exponential  f + (e0 - f) * exp(-rate * n)
///   power        f + (e0 - f) * (1 + n)^(-exponent)
///   linear_need  f + (e0 - f) * max(0, 1 - n / need)
///   piecewise    linear interpolation through (0, e0) and `points`,
///                constant after the last point
///
/// Plateau segments warp the data axis before the family is evaluated, so
/// inside a segment the local slope is the multiplier times the base slope.
/// Observation noise is additive Gaussian and only touches observed error.
struct LearningCurve {
    CurveFamily family = CurveFamily::linear_need;
    double initial_error = 1.0;
    double floor = 0.0;
    double rate = 0.0;
    double exponent = 0.0;
    double need = 0.0;
    std::vector<std::pair<double, double>> points;
    std::vector<PlateauSegment> segments;
    double noise_sigma = 0.0;

    bool operator==(const LearningCurve&) const = default;
};

/// Throws ValidationError naming the first offending field.
void validate_curve(const LearningCurve& curve);

/// Cumulative data after the plateau warp.
double effective_data(const LearningCurve& curve, double n);

/// Noiseless error after `n` data units, in [0, 1].
double curve_true_error(const LearningCurve& curve, double n);

/// True error plus one Gaussian draw from `rng` (no draw when sigma is 0),
/// clamped to [0, 1].
double curve_observed_error(const LearningCurve& curve, double n, std::mt19937_64& rng);

} // namespace coresched
