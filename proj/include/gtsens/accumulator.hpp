#pragma once

#include <cmath>
#include <cstdint>

namespace gtsens {

/// Single-pass (count, mean, M2) accumulator with exact merge (Chan et al.).
/// Merging per-batch accumulators gives the same moments as a serial pass
/// up to roundoff, which is what lets replicate batches run in parallel.
class MeanVarAccumulator {
public:
    void add(double value) {
        ++count_;
        double delta = value - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (value - mean_);
    }

    void merge(const MeanVarAccumulator& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        std::uint64_t n = count_ + other.count_;
        double delta = other.mean_ - mean_;
        mean_ += delta * (static_cast<double>(other.count_) / static_cast<double>(n));
        m2_ += other.m2_ + delta * delta *
                               (static_cast<double>(count_) * static_cast<double>(other.count_) /
                                static_cast<double>(n));
        count_ = n;
    }

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }

    /// Sample variance (n-1 denominator).
    double variance() const {
        if (count_ < 2) return 0.0;
        return m2_ / static_cast<double>(count_ - 1);
    }

    double stderr_of_mean() const {
        if (count_ == 0) return 0.0;
        return std::sqrt(variance() / static_cast<double>(count_));
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Kahan compensated running sum. Used for the per-channel consumed
/// internal-time accumulators, which must not drift over long paths.
class KahanSum {
public:
    void add(double value) {
        double y = value - compensation_;
        double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }

    /// Overwrite with an exact value (used when a stream fires and the
    /// consumed time lands exactly on the arrival point).
    void set(double value) {
        sum_ = value;
        compensation_ = 0.0;
    }

    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace gtsens
