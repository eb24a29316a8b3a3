#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include "error.hpp"

namespace qgossip {

using Units = std::int64_t;
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational &r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Uniform quantizer with L = 2^r levels u_min, u_min + delta, ..., u_max - delta.
class QuantizerSpec {
  public:
    QuantizerSpec(double u_min, double u_max, int r) : u_min_(u_min), u_max_(u_max), r_(r) {
        if (!(u_max > u_min))
            throw ParameterError("QuantizerSpec: u_max must exceed u_min");
        if (r < 1 || r > 40)
            throw ParameterError("QuantizerSpec: bits per sample must be in [1, 40], got " + std::to_string(r));
    }

    double u_min() const { return u_min_; }
    double u_max() const { return u_max_; }
    int bits() const { return r_; }
    Units levels() const { return Units{1} << r_; }
    double delta() const { return (u_max_ - u_min_) / static_cast<double>(levels()); }

    /// Real value of integer unit k.
    double value(Units k) const { return u_min_ + static_cast<double>(k) * delta(); }

    bool operator==(const QuantizerSpec &) const = default;

  private:
    double u_min_;
    double u_max_;
    int r_;
};

/// Index k in [0, L-1] of the level omega_{k+1} with u in [omega, omega + delta).
/// u == u_max maps to the top level.
inline Units quantize_units(double u, const QuantizerSpec &spec) {
    if (!(u >= spec.u_min() && u <= spec.u_max()))
        throw RangeError("quantize: value " + std::to_string(u) + " outside [" + std::to_string(spec.u_min()) +
                         ", " + std::to_string(spec.u_max()) + "]");
    const Units top = spec.levels() - 1;
    auto k = static_cast<Units>(std::floor((u - spec.u_min()) / spec.delta()));
    // floor() on the quotient can land one off in floating point; settle against the level values.
    while (k > 0 && spec.value(k) > u)
        --k;
    while (k < top && spec.value(k + 1) <= u)
        ++k;
    return std::clamp<Units>(k, 0, top);
}

inline double quantize(double u, const QuantizerSpec &spec) { return spec.value(quantize_units(u, spec)); }

/// Network state in integer units of delta: x_i = u_min + units[i] * delta.
class QState {
  public:
    QState(QuantizerSpec spec, std::vector<Units> units) : spec_(spec), units_(std::move(units)) {
        if (units_.empty())
            throw ParameterError("QState: empty state vector");
        for (Units k : units_)
            if (k < 0 || k > spec_.levels())
                throw RangeError("QState: unit " + std::to_string(k) + " outside [0, " +
                                 std::to_string(spec_.levels()) + "]");
    }

    /// From real values; each must be an exact multiple of delta above u_min.
    static QState from_values(const QuantizerSpec &spec, const std::vector<double> &values) {
        std::vector<Units> u;
        u.reserve(values.size());
        for (double v : values) {
            double k = (v - spec.u_min()) / spec.delta();
            double kr = std::round(k);
            if (std::abs(k - kr) > 1e-9)
                throw ParameterError("QState: value " + std::to_string(v) + " is not a multiple of delta");
            u.push_back(static_cast<Units>(kr));
        }
        return QState(spec, std::move(u));
    }

    const QuantizerSpec &spec() const { return spec_; }
    const std::vector<Units> &units() const { return units_; }
    std::vector<Units> &units() { return units_; }
    int size() const { return static_cast<int>(units_.size()); }
    Units operator[](int i) const { return units_[static_cast<std::size_t>(i)]; }
    Units sum() const { return std::accumulate(units_.begin(), units_.end(), Units{0}); }

    bool operator==(const QState &) const = default;

  private:
    QuantizerSpec spec_;
    std::vector<Units> units_;
};

/// Exact mean in units of delta (offset u_min excluded).
inline Rational mean_units(const QState &x) { return Rational(x.sum(), x.size()); }

inline double mean_value(const QState &x) { return x.spec().u_min() + to_double(mean_units(x)) * x.spec().delta(); }

/// N * V_mean(x) in units of delta^2. Always an integer.
inline std::int64_t scaled_lyapunov(std::span<const Units> units) {
    std::int64_t s = 0, sq = 0;
    for (Units k : units) {
        s += k;
        sq += k * k;
    }
    return static_cast<std::int64_t>(units.size()) * sq - s * s;
}

/// V_alpha(x) = sum (x_i - alpha)^2 in units of delta^2, alpha given in units.
inline Rational lyapunov(const QState &x, const Rational &alpha) {
    Rational v = 0;
    for (Units k : x.units()) {
        Rational d = Rational(k) - alpha;
        v += d * d;
    }
    return v;
}

inline Rational lyapunov_about_mean(const QState &x) {
    return Rational(scaled_lyapunov(x.units()), x.size());
}

/// J(x) = (max - min) / delta.
inline Units spread_j(const QState &x) {
    auto [lo, hi] = std::minmax_element(x.units().begin(), x.units().end());
    return *hi - *lo;
}

/// Distinct unit values with multiplicities, ascending.
inline std::vector<std::pair<Units, int>> distribution(const QState &x) {
    std::map<Units, int> counts;
    for (Units k : x.units())
        ++counts[k];
    return {counts.begin(), counts.end()};
}

inline void to_json(nlohmann::json &j, const QuantizerSpec &s) {
    j = nlohmann::json{{"u_min", s.u_min()}, {"u_max", s.u_max()}, {"r", s.bits()}};
}

inline QuantizerSpec quantizer_from_json(const nlohmann::json &j) {
    return QuantizerSpec(j.at("u_min").get<double>(), j.at("u_max").get<double>(), j.at("r").get<int>());
}

inline nlohmann::json state_to_json(const QState &x) {
    return nlohmann::json{{"spec", x.spec()}, {"units", x.units()}};
}

inline QState state_from_json(const nlohmann::json &j) {
    return QState(quantizer_from_json(j.at("spec")), j.at("units").get<std::vector<Units>>());
}

} // namespace qgossip
