#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "spdeflow/rng.hpp"

namespace spdeflow {

/// Brownian increments on a uniform grid, addressed by (path, step, component) through a
/// counter-based generator. Every view of the same (seed, base dt) shares one underlying
/// noise realization per path:
///   - shifted(s) re-indexes increments from step s onward (the shift theta_s of the path),
///   - coarsened(f) sums f consecutive fine increments (same path on a coarser grid).
class BrownianDriver {
public:
    BrownianDriver(int r, std::uint64_t seed, double dt, long n_steps)
        : r_(r), seed_(seed), dt_fine_(dt), n_fine_(n_steps) {
        if (r < 1) throw std::invalid_argument("BrownianDriver: r must be >= 1");
        if (!(dt > 0.0)) throw std::invalid_argument("BrownianDriver: dt must be positive");
        if (n_steps < 0) throw std::invalid_argument("BrownianDriver: negative step count");
    }

    int r() const { return r_; }
    std::uint64_t seed() const { return seed_; }
    double dt() const { return dt_fine_ * factor_; }
    long n_steps() const { return (n_fine_ - offset_) / factor_; }
    double horizon() const { return dt() * n_steps(); }
    double time(long step) const { return dt() * step; }

    /// Increment of component alpha over [t_step, t_{step+1}]; N(0, dt) marginally.
    double increment(std::uint64_t path, long step, int alpha) const {
        const double s = std::sqrt(dt_fine_);
        double acc = 0.0;
        const long base = offset_ + step * factor_;
        for (int j = 0; j < factor_; ++j)
            acc += s * counter_gauss(seed_, path,
                                     static_cast<std::uint64_t>((base + j) * r_ + alpha));
        return acc;
    }

    void increments(std::uint64_t path, long step, double* out) const {
        for (int alpha = 0; alpha < r_; ++alpha) out[alpha] = increment(path, step, alpha);
    }

    /// Driver of the shifted path theta_{t_s}: increments re-indexed from step s.
    BrownianDriver shifted(long steps) const {
        BrownianDriver d = *this;
        d.offset_ += steps * factor_;
        if (d.offset_ > n_fine_) throw std::invalid_argument("BrownianDriver::shifted: beyond grid");
        return d;
    }

    /// Same noise on a grid coarsened by an integer factor.
    BrownianDriver coarsened(int f) const {
        if (f < 1) throw std::invalid_argument("BrownianDriver::coarsened: factor must be >= 1");
        BrownianDriver d = *this;
        d.factor_ *= f;
        return d;
    }

    /// Number of steps covering [0, T]; requires T to sit on the grid up to rounding.
    long steps_for(double T) const {
        const long n = std::lround(T / dt());
        if (std::abs(n * dt() - T) > 1e-9 * (1.0 + std::abs(T)))
            throw std::invalid_argument("BrownianDriver: time not on the grid");
        return n;
    }

private:
    int r_;
    std::uint64_t seed_;
    double dt_fine_;
    long n_fine_;
    long offset_ = 0;
    int factor_ = 1;
};

}  // namespace spdeflow
