#include "msihar/special.hpp"

#include <cmath>
#include <stdexcept>

namespace msihar {
namespace {

constexpr double kTol = 1e-12;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 500;

// Lentz's algorithm for the continued fraction in the incomplete beta
// expansion. Converges quickly for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTol) return h;
    }
    return h;  // converged as far as doubles allow
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("incomplete beta needs a, b > 0");
    }
    if (!(x >= 0.0) || !(x <= 1.0)) {
        throw std::invalid_argument("incomplete beta needs x in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_prefactor = std::lgamma(a + b) - std::lgamma(a) -
                                 std::lgamma(b) + a * std::log(x) +
                                 b * std::log1p(-x);
    const double prefactor = std::exp(log_prefactor);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return prefactor * beta_cf(a, b, x) / a;
    }
    return 1.0 - prefactor * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double nu) {
    if (!(nu > 0.0)) {
        throw std::invalid_argument("degrees of freedom must be positive");
    }
    if (std::isinf(t)) return 0.0;
    const double x = nu / (nu + t * t);
    return regularized_incomplete_beta(0.5 * nu, 0.5, x);
}

}  // namespace msihar
