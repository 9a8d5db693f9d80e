#include "isosing/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace isosing {

namespace {

void require_same_points(const Series& a, const Series& b) {
    if (a.points() != b.points()) {
        throw std::invalid_argument("Series: grid size mismatch");
    }
}

Series shaped(const Series& a, const Series& b) {
    require_same_points(a, b);
    return Series(std::min(a.order(), b.order()), a.points());
}

// out_k += factor * sum_{j=lo}^{hi} w(j) a_j b_{k-j}, the workhorse of every
// recurrence below.
template <class Weight>
void accumulate(std::span<double> out, const Series& a, const Series& b, std::size_t k,
                std::size_t lo, std::size_t hi, Weight weight) {
    const std::size_t n = out.size();
    for (std::size_t j = lo; j <= hi; ++j) {
        const double w = weight(j);
        auto aj = a[j];
        auto bk = b[k - j];
        for (std::size_t i = 0; i < n; ++i) out[i] += w * aj[i] * bk[i];
    }
}

}  // namespace

Series::Series(std::size_t order, std::size_t points)
    : order_(order), points_(points), data_((order + 1) * points, 0.0) {}

Series Series::constant(std::size_t order, std::size_t points, double value) {
    Series s(order, points);
    std::fill_n(s.data_.begin(), points, value);
    return s;
}

Series& Series::operator+=(const Series& other) {
    require_same_points(*this, other);
    const std::size_t n = std::min(order_, other.order_);
    for (std::size_t i = 0; i < (n + 1) * points_; ++i) data_[i] += other.data_[i];
    return *this;
}

Series& Series::operator-=(const Series& other) {
    require_same_points(*this, other);
    const std::size_t n = std::min(order_, other.order_);
    for (std::size_t i = 0; i < (n + 1) * points_; ++i) data_[i] -= other.data_[i];
    return *this;
}

Series& Series::operator*=(double factor) {
    for (double& d : data_) d *= factor;
    return *this;
}

Series& Series::operator+=(double value) {
    for (std::size_t i = 0; i < points_; ++i) data_[i] += value;
    return *this;
}

Series& Series::operator-=(double value) {
    for (std::size_t i = 0; i < points_; ++i) data_[i] -= value;
    return *this;
}

Series operator-(const Series& a) {
    Series r = a;
    r *= -1.0;
    return r;
}

Series operator+(const Series& a, const Series& b) {
    Series r = shaped(a, b);
    for (std::size_t k = 0; k <= r.order(); ++k) {
        auto ak = a[k], bk = b[k];
        auto rk = r[k];
        for (std::size_t i = 0; i < r.points(); ++i) rk[i] = ak[i] + bk[i];
    }
    return r;
}

Series operator-(const Series& a, const Series& b) {
    Series r = shaped(a, b);
    for (std::size_t k = 0; k <= r.order(); ++k) {
        auto ak = a[k], bk = b[k];
        auto rk = r[k];
        for (std::size_t i = 0; i < r.points(); ++i) rk[i] = ak[i] - bk[i];
    }
    return r;
}

Series operator*(const Series& a, const Series& b) {
    Series r = shaped(a, b);
    for (std::size_t k = 0; k <= r.order(); ++k) {
        accumulate(r[k], a, b, k, 0, k, [](std::size_t) { return 1.0; });
    }
    return r;
}

Series operator/(const Series& a, const Series& b) {
    Series r = shaped(a, b);
    const std::size_t n = r.points();
    auto b0 = b[0];
    for (std::size_t k = 0; k <= r.order(); ++k) {
        auto rk = r[k];
        auto ak = a[k];
        for (std::size_t i = 0; i < n; ++i) rk[i] = ak[i];
        if (k > 0) accumulate(rk, b, r, k, 1, k, [](std::size_t) { return -1.0; });
        for (std::size_t i = 0; i < n; ++i) rk[i] /= b0[i];
    }
    return r;
}

Series operator+(const Series& a, double b) {
    Series r = a;
    r += b;
    return r;
}
Series operator+(double a, const Series& b) { return b + a; }
Series operator-(const Series& a, double b) {
    Series r = a;
    r -= b;
    return r;
}
Series operator-(double a, const Series& b) {
    Series r = -b;
    r += a;
    return r;
}
Series operator*(const Series& a, double b) {
    Series r = a;
    r *= b;
    return r;
}
Series operator*(double a, const Series& b) { return b * a; }
Series operator/(const Series& a, double b) { return a * (1.0 / b); }
Series operator/(double a, const Series& b) { return constant_like(b, a) / b; }

Series sqrt(const Series& a) {
    Series r(a.order(), a.points());
    const std::size_t n = a.points();
    auto r0 = r[0];
    auto a0 = a[0];
    for (std::size_t i = 0; i < n; ++i) r0[i] = std::sqrt(a0[i]);
    for (std::size_t k = 1; k <= a.order(); ++k) {
        auto rk = r[k];
        auto ak = a[k];
        for (std::size_t i = 0; i < n; ++i) rk[i] = ak[i];
        if (k > 1) accumulate(rk, r, r, k, 1, k - 1, [](std::size_t) { return -1.0; });
        for (std::size_t i = 0; i < n; ++i) rk[i] /= 2.0 * r0[i];
    }
    return r;
}

Series exp(const Series& a) {
    Series r(a.order(), a.points());
    const std::size_t n = a.points();
    auto r0 = r[0];
    auto a0 = a[0];
    for (std::size_t i = 0; i < n; ++i) r0[i] = std::exp(a0[i]);
    for (std::size_t k = 1; k <= a.order(); ++k) {
        const double inv_k = 1.0 / static_cast<double>(k);
        accumulate(r[k], a, r, k, 1, k,
                   [inv_k](std::size_t j) { return static_cast<double>(j) * inv_k; });
    }
    return r;
}

Series log(const Series& a) {
    Series r(a.order(), a.points());
    const std::size_t n = a.points();
    auto r0 = r[0];
    auto a0 = a[0];
    for (std::size_t i = 0; i < n; ++i) r0[i] = std::log(a0[i]);
    for (std::size_t k = 1; k <= a.order(); ++k) {
        auto rk = r[k];
        auto ak = a[k];
        for (std::size_t i = 0; i < n; ++i) rk[i] = ak[i];
        const double inv_k = 1.0 / static_cast<double>(k);
        if (k > 1) {
            accumulate(rk, r, a, k, 1, k - 1,
                       [inv_k](std::size_t j) { return -static_cast<double>(j) * inv_k; });
        }
        for (std::size_t i = 0; i < n; ++i) rk[i] /= a0[i];
    }
    return r;
}

namespace {

// Coupled recurrences for (sin, cos) when sign = -1 and (sinh, cosh) when
// sign = +1:  s' = a' c,  c' = sign * a' s.
std::pair<Series, Series> trig_pair(const Series& a, double sign) {
    Series s(a.order(), a.points());
    Series c(a.order(), a.points());
    const std::size_t n = a.points();
    auto a0 = a[0];
    auto s0 = s[0];
    auto c0 = c[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (sign < 0) {
            s0[i] = std::sin(a0[i]);
            c0[i] = std::cos(a0[i]);
        } else {
            s0[i] = std::sinh(a0[i]);
            c0[i] = std::cosh(a0[i]);
        }
    }
    for (std::size_t k = 1; k <= a.order(); ++k) {
        const double inv_k = 1.0 / static_cast<double>(k);
        accumulate(s[k], a, c, k, 1, k,
                   [inv_k](std::size_t j) { return static_cast<double>(j) * inv_k; });
        accumulate(c[k], a, s, k, 1, k,
                   [inv_k, sign](std::size_t j) { return sign * static_cast<double>(j) * inv_k; });
    }
    return {std::move(s), std::move(c)};
}

}  // namespace

Series sin(const Series& a) { return trig_pair(a, -1.0).first; }
Series cos(const Series& a) { return trig_pair(a, -1.0).second; }
Series sinh(const Series& a) { return trig_pair(a, 1.0).first; }
Series cosh(const Series& a) { return trig_pair(a, 1.0).second; }

Series pow(const Series& a, double exponent) {
    Series r(a.order(), a.points());
    const std::size_t n = a.points();
    auto r0 = r[0];
    auto a0 = a[0];
    for (std::size_t i = 0; i < n; ++i) r0[i] = std::pow(a0[i], exponent);
    // a r' = exponent a' r  =>  r_k = 1/(k a_0) sum_{j=1}^k ((exponent+1) j - k) a_j r_{k-j}
    for (std::size_t k = 1; k <= a.order(); ++k) {
        auto rk = r[k];
        const double kd = static_cast<double>(k);
        accumulate(rk, a, r, k, 1, k, [exponent, kd](std::size_t j) {
            return ((exponent + 1.0) * static_cast<double>(j) - kd) / kd;
        });
        for (std::size_t i = 0; i < n; ++i) rk[i] /= a0[i];
    }
    return r;
}

double min_leading(const Series& a) {
    double m = std::numeric_limits<double>::infinity();
    for (double d : a[0]) m = std::min(m, d);
    return m;
}

bool any_zero_leading(const Series& a) {
    for (double d : a[0]) {
        if (d == 0.0) return true;
    }
    return false;
}

}  // namespace isosing
