#pragma once

#include <cmath>

#include <Eigen/Core>

namespace spdeflow {

/// C-infinity window: 1 on [lo, hi] per axis, smooth ramp to 0 over a margin eps, support
/// in the eps-neighbourhood. The standard compact-support mollifier device.
struct SmoothWindow {
    Eigen::VectorXd lo, hi;
    double eps = 0.5;

    static double ramp(double s) {
        // 0 -> 1 as s goes 0 -> 1, flat at both ends
        if (s <= 0.0) return 0.0;
        if (s >= 1.0) return 1.0;
        const double a = std::exp(-1.0 / s);
        const double b = std::exp(-1.0 / (1.0 - s));
        return a / (a + b);
    }

    double operator()(const Eigen::VectorXd& x) const {
        double v = 1.0;
        for (int i = 0; i < x.size(); ++i) {
            const double below = (x[i] - (lo[i] - eps)) / eps;  // rises across [lo-eps, lo]
            const double above = ((hi[i] + eps) - x[i]) / eps;  // falls across [hi, hi+eps]
            v *= ramp(below) * ramp(above);
            if (v == 0.0) return 0.0;
        }
        return v;
    }
};

}  // namespace spdeflow
