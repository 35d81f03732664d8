#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mixnorm {

/// Thrown when a parameter lies outside the mathematical domain of an
/// operation (nonpositive exponent, empty vector, mismatched dimensions...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// An exponent p in (0, infinity].
///
/// Infinity is a distinguished state, not a floating sentinel. The helpers
/// implement the conventions used for p = infinity throughout the library:
///
///   c / inf = 0,   inf / c = inf  (c in (0, inf)),   inf^(1/inf) = 1.
class Exponent {
  public:
    /// Finite exponent; throws DomainError unless value > 0 and finite.
    explicit Exponent(double value) : value_(value), infinite_(false) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw DomainError("exponent must be a finite value > 0 or infinity");
        }
    }

    static Exponent infinity() { return Exponent(); }

    /// Parses a positive decimal literal or the token "inf"
    /// (case-insensitive). Returns nullopt on anything else.
    static std::optional<Exponent> parse(std::string_view text);

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// The finite value; throws DomainError for infinity.
    double value() const {
        if (infinite_) throw DomainError("exponent is infinite");
        return value_;
    }

    /// Value as a double with +inf for the infinite state (for printing and
    /// monotone comparisons only).
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    /// c / p with c / inf = 0.
    double divide_into(double c) const { return infinite_ ? 0.0 : c / value_; }

    /// 1 / p with 1 / inf = 0.
    double reciprocal() const { return divide_into(1.0); }

    /// p / c for c > 0 with inf / c = inf.
    Exponent scaled_down(double c) const {
        if (!(c > 0.0)) throw DomainError("divisor must be positive");
        return infinite_ ? *this : Exponent(value_ / c);
    }

    /// p^(1/p) with inf^(1/inf) = 1.
    double self_root() const { return infinite_ ? 1.0 : std::pow(value_, 1.0 / value_); }

    /// log(p^(1/p)) = log(p)/p, zero for infinity.
    double log_self_root() const { return infinite_ ? 0.0 : std::log(value_) / value_; }

    std::string to_string() const;

    friend bool operator==(const Exponent& a, const Exponent& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend std::partial_ordering operator<=>(const Exponent& a, const Exponent& b) {
        return a.as_double() <=> b.as_double();
    }

  private:
    Exponent() : value_(0.0), infinite_(true) {}

    double value_;
    bool infinite_;
};

inline Exponent operator""_exp(long double v) { return Exponent(static_cast<double>(v)); }
inline Exponent operator""_exp(unsigned long long v) { return Exponent(static_cast<double>(v)); }

}  // namespace mixnorm
