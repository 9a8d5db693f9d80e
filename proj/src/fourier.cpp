#include "isosing/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace isosing {

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double evaluate(const Spectrum& s, double u) { return evaluate_derivative(s, u, 0); }

double evaluate_derivative(const Spectrum& s, double u, int derivative) {
    if (s.empty()) return 0.0;
    double acc = derivative == 0 ? s[0].real() : 0.0;
    for (std::size_t m = 1; m < s.size(); ++m) {
        const double md = static_cast<double>(m);
        std::complex<double> factor = std::polar(1.0, md * u);
        for (int d = 0; d < derivative; ++d) factor *= std::complex<double>(0.0, md);
        acc += 2.0 * (s[m] * factor).real();
    }
    return acc;
}

Spectrum differentiate(const Spectrum& s, int derivative) {
    Spectrum out(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) {
        std::complex<double> factor(1.0, 0.0);
        for (int d = 0; d < derivative; ++d) factor *= std::complex<double>(0.0, static_cast<double>(m));
        out[m] = s[m] * factor;
    }
    return out;
}

Spectrum shift(const Spectrum& s, double delta) {
    Spectrum out(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) {
        out[m] = s[m] * std::polar(1.0, static_cast<double>(m) * delta);
    }
    return out;
}

double l2_norm(const Spectrum& s) {
    if (s.empty()) return 0.0;
    double acc = std::norm(s[0]);
    for (std::size_t m = 1; m < s.size(); ++m) acc += 2.0 * std::norm(s[m]);
    return std::sqrt(acc);
}

void apply_exponential_filter(Spectrum& s, double alpha, int order) {
    const std::size_t top = spectrum_order(s);
    if (top == 0) return;
    for (std::size_t m = 1; m <= top; ++m) {
        const double ratio = static_cast<double>(m) / static_cast<double>(top);
        s[m] *= std::exp(-alpha * std::pow(ratio, 2 * order));
    }
}

FourierGrid::FourierGrid(std::size_t points) : points_(points) {
    if (points < 4 || points % 2 != 0) {
        throw std::invalid_argument("FourierGrid: point count must be even and >= 4");
    }
    std::lock_guard lock(planner_mutex());
    double* real = fftw_alloc_real(points);
    fftw_complex* cplx = fftw_alloc_complex(points / 2 + 1);
    const int n = static_cast<int>(points);
    forward_ = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    fftw_free(real);
    fftw_free(cplx);
}

FourierGrid::~FourierGrid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

double FourierGrid::node(std::size_t j) const {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points_);
}

Spectrum FourierGrid::analyze(std::span<const double> values, std::size_t order) const {
    if (values.size() != points_) throw std::invalid_argument("FourierGrid::analyze: size mismatch");
    if (2 * order >= points_) throw std::invalid_argument("FourierGrid::analyze: order too high for grid");
    double* real = fftw_alloc_real(points_);
    fftw_complex* cplx = fftw_alloc_complex(points_ / 2 + 1);
    std::copy(values.begin(), values.end(), real);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), real, cplx);
    Spectrum out(order + 1);
    const double scale = 1.0 / static_cast<double>(points_);
    for (std::size_t m = 0; m <= order; ++m) out[m] = {cplx[m][0] * scale, cplx[m][1] * scale};
    out[0].imag(0.0);
    fftw_free(real);
    fftw_free(cplx);
    return out;
}

std::vector<double> FourierGrid::synthesize(const Spectrum& s) const {
    const std::size_t half = points_ / 2;
    double* real = fftw_alloc_real(points_);
    fftw_complex* cplx = fftw_alloc_complex(half + 1);
    for (std::size_t m = 0; m <= half; ++m) {
        // Modes at or beyond Nyquist are not representable without aliasing.
        const bool keep = m < s.size() && m < half;
        cplx[m][0] = keep ? s[m].real() : 0.0;
        cplx[m][1] = keep ? s[m].imag() : 0.0;
    }
    cplx[0][1] = 0.0;
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), cplx, real);
    std::vector<double> out(real, real + points_);
    fftw_free(real);
    fftw_free(cplx);
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace isosing
