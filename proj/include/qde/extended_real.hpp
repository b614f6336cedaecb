// Reals extended by +infinity (divergences off-support)

#pragma once

#include <iosfwd>
#include <limits>

namespace qde {

class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

    static constexpr ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        r.value_ = std::numeric_limits<double>::infinity();
        return r;
    }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr bool is_finite() const { return !infinite_; }

    // Throws Error(infinite) when +inf.
    double finite_value() const;

    // +inf maps to IEEE infinity.
    constexpr double to_double() const { return value_; }

    friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return ExtendedReal(a.value_ + b.value_);
    }
    friend ExtendedReal operator*(double s, ExtendedReal a);
    // inf - finite = inf; anything - inf is indeterminate and throws.
    friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b);

    ExtendedReal& operator+=(ExtendedReal o) { return *this = *this + o; }

    friend bool operator<(ExtendedReal a, ExtendedReal b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(ExtendedReal a, ExtendedReal b) { return !(b < a); }
    friend bool operator>(ExtendedReal a, ExtendedReal b) { return b < a; }
    friend bool operator>=(ExtendedReal a, ExtendedReal b) { return !(a < b); }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, ExtendedReal v);

}  // namespace qde
