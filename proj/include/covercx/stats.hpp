#pragma once

#include <cstddef>
#include <span>

namespace covercx::stats {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;              // sample standard deviation (n - 1)
    double standard_error = 0.0;  // sd / sqrt(n); 0 when n < 2
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
};

/// Quantile of sorted data by linear interpolation between order
/// statistics: position (n - 1) q, zero-based.
double quantile_sorted(std::span<const double> sorted, double q);

/// Full summary of a sample. Empty input yields a zero Summary with n = 0.
Summary describe(std::span<const double> values);

// Mergeable count/mean/M2 accumulator (Chan et al. pairwise update), for
// parallel partial reductions of the mean and variance.
class Moments {
public:
    void add(double x);
    void merge(const Moments& other);

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double sample_variance() const noexcept;
    double standard_error() const noexcept;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace covercx::stats
