#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isosing/quad.hpp"

namespace isosing {

// Truncated power series in v whose coefficients are grid functions of u:
//
//   s(u_j, v) = sum_{k=0}^{order} s_k(u_j) v^k,   j = 0..points-1.
//
// All arithmetic is pointwise in u and truncated in v. Coefficient k of any
// result depends only on coefficients 0..k of the operands.
class Series {
public:
    Series() = default;
    Series(std::size_t order, std::size_t points);

    static Series constant(std::size_t order, std::size_t points, double value);

    std::size_t order() const noexcept { return order_; }
    std::size_t points() const noexcept { return points_; }

    std::span<double> operator[](std::size_t k) noexcept {
        return {data_.data() + k * points_, points_};
    }
    std::span<const double> operator[](std::size_t k) const noexcept {
        return {data_.data() + k * points_, points_};
    }

    Series& operator+=(const Series& other);
    Series& operator-=(const Series& other);
    Series& operator*=(double factor);
    Series& operator+=(double value);
    Series& operator-=(double value);

private:
    std::size_t order_ = 0;
    std::size_t points_ = 0;
    std::vector<double> data_;
};

Series operator-(const Series& a);
Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series operator/(const Series& a, const Series& b);

Series operator+(const Series& a, double b);
Series operator+(double a, const Series& b);
Series operator-(const Series& a, double b);
Series operator-(double a, const Series& b);
Series operator*(const Series& a, double b);
Series operator*(double a, const Series& b);
Series operator/(const Series& a, double b);
Series operator/(double a, const Series& b);

Series sqrt(const Series& a);
Series exp(const Series& a);
Series log(const Series& a);
Series sin(const Series& a);
Series cos(const Series& a);
Series sinh(const Series& a);
Series cosh(const Series& a);
Series pow(const Series& a, double exponent);

// Helpers that let the same templated formula run on double and Series.
inline double constant_like(double, double value) { return value; }
inline Series constant_like(const Series& shape, double value) {
    return Series::constant(shape.order(), shape.points(), value);
}

// Smallest value of coefficient 0 over the grid; used for positivity checks.
double min_leading(const Series& a);
inline double min_leading(double a) { return a; }
bool any_zero_leading(const Series& a);
inline bool any_zero_leading(double a) { return a == 0.0; }

}  // namespace isosing
