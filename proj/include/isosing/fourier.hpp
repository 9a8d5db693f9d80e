#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace isosing {

// Half spectrum of a real 2pi-periodic function,
//
//   f(u) = c_0 + 2 Re sum_{m=1}^{M} c_m e^{i m u},
//
// stored as c_0..c_M (c_0 real up to roundoff).
using Spectrum = std::vector<std::complex<double>>;

inline std::size_t spectrum_order(const Spectrum& s) { return s.empty() ? 0 : s.size() - 1; }

double evaluate(const Spectrum& s, double u);
double evaluate_derivative(const Spectrum& s, double u, int derivative);
Spectrum differentiate(const Spectrum& s, int derivative = 1);
// Spectrum of u -> f(u + delta).
Spectrum shift(const Spectrum& s, double delta);
double l2_norm(const Spectrum& s);

// Exponential low-pass filter exp(-alpha (m/M)^(2 order)) applied in place.
void apply_exponential_filter(Spectrum& s, double alpha = 36.0, int order = 8);

// Real FFT on a uniform grid u_j = 2 pi j / P, backed by FFTW.
// Plans are created once per instance; transforms are safe to call from
// several threads on the same instance.
class FourierGrid {
public:
    explicit FourierGrid(std::size_t points);
    ~FourierGrid();
    FourierGrid(const FourierGrid&) = delete;
    FourierGrid& operator=(const FourierGrid&) = delete;

    std::size_t points() const noexcept { return points_; }
    double node(std::size_t j) const;

    // Spectrum truncated to order `order` (must satisfy order < points/2).
    Spectrum analyze(std::span<const double> values, std::size_t order) const;
    // Values at the grid nodes; modes above points/2 - 1 are dropped.
    std::vector<double> synthesize(const Spectrum& s) const;

private:
    std::size_t points_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace isosing
