#include "qde/errors.hpp"

#include <ostream>

#include "qde/extended_real.hpp"

namespace qde {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::not_positive: return "not_positive";
        case ErrorKind::not_normalized: return "not_normalized";
        case ErrorKind::resource: return "resource";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::infinite: return "infinite";
        case ErrorKind::property_violation: return "property_violation";
    }
    return "unknown";
}

double ExtendedReal::finite_value() const {
    if (infinite_) throw Error(ErrorKind::infinite, "quantity is +infinity");
    return value_;
}

ExtendedReal operator*(double s, ExtendedReal a) {
    if (a.infinite_) {
        if (s > 0.0) return ExtendedReal::infinity();
        if (s == 0.0) return ExtendedReal(0.0);
        throw Error(ErrorKind::infinite, "negative multiple of +infinity");
    }
    return ExtendedReal(s * a.value_);
}

ExtendedReal operator-(ExtendedReal a, ExtendedReal b) {
    if (b.infinite_) throw Error(ErrorKind::infinite, "subtracting +infinity is indeterminate");
    if (a.infinite_) return ExtendedReal::infinity();
    return ExtendedReal(a.value_ - b.value_);
}

std::ostream& operator<<(std::ostream& os, ExtendedReal v) {
    if (v.is_infinite()) return os << "+inf";
    return os << v.to_double();
}

}  // namespace qde
