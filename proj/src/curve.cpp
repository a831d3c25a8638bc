#include <coresched/curve.hpp>

#include <coresched/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace coresched {

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) {
        throw ValidationError(field, message);
    }
}

bool finite(double v) { return std::isfinite(v); }

double base_error(const LearningCurve& c, double n) {
    const double span = c.initial_error - c.floor;
    switch (c.family) {
    case CurveFamily::exponential:
        return c.floor + span * std::exp(-c.rate * n);
    case CurveFamily::power:
        return c.floor + span * std::pow(1.0 + n, -c.exponent);
    case CurveFamily::linear_need:
        return c.floor + span * std::max(0.0, 1.0 - n / c.need);
    case CurveFamily::piecewise: {
        double prev_n = 0.0;
        double prev_e = c.initial_error;
        for (const auto& [pn, pe] : c.points) {
            if (n <= pn) {
                const double frac = (n - prev_n) / (pn - prev_n);
                return prev_e + (pe - prev_e) * frac;
            }
            prev_n = pn;
            prev_e = pe;
        }
        return prev_e;
    }
    }
    return c.initial_error;
}

} // namespace

std::string_view to_string(CurveFamily family) noexcept {
    switch (family) {
    case CurveFamily::exponential: return "exponential";
    case CurveFamily::power: return "power";
    case CurveFamily::linear_need: return "linear-need";
    case CurveFamily::piecewise: return "piecewise";
    }
    return "unknown";
}

CurveFamily curve_family_from_string(std::string_view name) {
    for (auto f : {CurveFamily::exponential, CurveFamily::power, CurveFamily::linear_need, CurveFamily::piecewise}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ValidationError("family", "unknown curve family '" + std::string(name) + "'");
}

void validate_curve(const LearningCurve& c) {
    require(finite(c.initial_error) && c.initial_error > 0.0 && c.initial_error <= 1.0, "initial_error",
            "must lie in (0, 1]");
    require(finite(c.floor) && c.floor >= 0.0 && c.floor < c.initial_error, "floor",
            "must lie in [0, initial_error)");
    switch (c.family) {
    case CurveFamily::exponential:
        require(finite(c.rate) && c.rate > 0.0, "rate", "must be positive");
        break;
    case CurveFamily::power:
        require(finite(c.exponent) && c.exponent > 0.0, "exponent", "must be positive");
        break;
    case CurveFamily::linear_need:
        require(finite(c.need) && c.need > 0.0, "need", "must be positive");
        break;
    case CurveFamily::piecewise: {
        double prev_n = 0.0;
        double prev_e = c.initial_error;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const auto& [n, e] = c.points[i];
            const std::string field = "points[" + std::to_string(i) + "]";
            require(finite(n) && n > prev_n, field, "data coordinates must be strictly increasing and positive");
            require(finite(e) && e >= 0.0 && e <= prev_e, field, "errors must be non-increasing and nonnegative");
            prev_n = n;
            prev_e = e;
        }
        break;
    }
    }
    double prev_end = 0.0;
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        const auto& s = c.segments[i];
        const std::string field = "segments[" + std::to_string(i) + "]";
        require(finite(s.start) && s.start >= prev_end, field + ".start",
                "segments must be ordered, non-overlapping and start at >= 0");
        require(finite(s.end) && s.end > s.start, field + ".end", "must exceed start");
        require(finite(s.rate_multiplier) && s.rate_multiplier >= 0.0, field + ".rate_multiplier",
                "must be nonnegative");
        prev_end = s.end;
    }
    require(finite(c.noise_sigma) && c.noise_sigma >= 0.0, "noise.sigma", "must be nonnegative");
}

double effective_data(const LearningCurve& c, double n) {
    double pos = 0.0;
    double eff = 0.0;
    for (const auto& s : c.segments) {
        if (n <= s.start) {
            return eff + (n - pos);
        }
        eff += s.start - pos;
        eff += s.rate_multiplier * (std::min(n, s.end) - s.start);
        pos = s.end;
        if (n <= s.end) {
            return eff;
        }
    }
    return eff + (n - pos);
}

double curve_true_error(const LearningCurve& curve, double n) {
    validate_curve(curve);
    if (!(n >= 0.0)) {
        throw UsageError("cumulative data must be nonnegative");
    }
    if (n == 0.0) {
        return curve.initial_error;
    }
    return std::clamp(base_error(curve, effective_data(curve, n)), 0.0, 1.0);
}

double curve_observed_error(const LearningCurve& curve, double n, std::mt19937_64& rng) {
    const double truth = curve_true_error(curve, n);
    if (curve.noise_sigma == 0.0) {
        return truth;
    }
    std::normal_distribution<double> noise(0.0, curve.noise_sigma);
    return std::clamp(truth + noise(rng), 0.0, 1.0);
}

} // namespace coresched
