#include "riccati_hjb/sobolev.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "riccati_hjb/errors.hpp"

namespace riccati {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class RealTransform {
public:
    explicit RealTransform(std::size_t n)
        : n_(n),
          in_(fftw_alloc_real(n)),
          out_(fftw_alloc_complex(n / 2 + 1)) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    ~RealTransform() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealTransform(const RealTransform&) = delete;
    RealTransform& operator=(const RealTransform&) = delete;

    const fftw_complex* run(std::span<const double> samples) {
        for (std::size_t i = 0; i < n_; ++i) in_[i] = samples[i];
        fftw_execute(plan_);
        return out_;
    }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

}  // namespace

double sobolev_norm(std::span<const double> samples, double dx, double s) {
    const std::size_t n = samples.size();
    if (n < 2) throw InputError("sobolev_norm: need at least two samples");
    if (!(dx > 0.0)) throw InputError("sobolev_norm: spacing must be positive");

    RealTransform transform(n);
    const fftw_complex* coeffs = transform.run(samples);
    const double period = static_cast<double>(n) * dx;
    double sum = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        // bins 1..ceil(n/2)-1 stand for a +-k pair; k = 0 and the Nyquist bin are single
        const bool paired = k != 0 && !(n % 2 == 0 && k == n / 2);
        const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / period;
        const double power = coeffs[k][0] * coeffs[k][0] + coeffs[k][1] * coeffs[k][1];
        sum += (paired ? 2.0 : 1.0) * std::pow(1.0 + xi * xi, s) * power;
    }
    return std::sqrt(sum * dx / static_cast<double>(n));
}

double sobolev_norm(std::span<const double> x, std::span<const double> samples, double s) {
    if (x.size() != samples.size()) throw InputError("sobolev_norm: abscissae and samples differ in length");
    if (x.size() < 2) throw InputError("sobolev_norm: need at least two samples");
    const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::abs((x[i] - x[i - 1]) - dx) > 1e-9 * std::abs(dx)) {
            throw InputError("sobolev_norm: grid is not uniform near index " + std::to_string(i));
        }
    }
    return sobolev_norm(samples, dx, s);
}

double trapezoid_l2_norm(std::span<const double> samples, double dx) {
    if (samples.empty()) return 0.0;
    double sum = 0.0;
    for (double v : samples) sum += v * v;
    sum -= 0.5 * (samples.front() * samples.front() + samples.back() * samples.back());
    return std::sqrt(dx * sum);
}

}  // namespace riccati
