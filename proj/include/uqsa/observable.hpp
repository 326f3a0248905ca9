#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "uqsa/math.hpp"

namespace uqsa {

/// Real-valued function of a (scalar) state with declared boundedness
/// metadata. Bounds are essential-range declarations used by saturation
/// logic and sup-norm bounds; unbounded observables leave them empty.
struct Observable {
    std::string name;
    std::function<double(double)> f;
    std::optional<double> lower;
    std::optional<double> upper;

    double operator()(double x) const { return f(x); }

    bool bounded() const { return lower.has_value() && upper.has_value(); }

    double sup_norm() const {
        if (!bounded()) return kInf;
        return std::max(std::abs(*lower), std::abs(*upper));
    }

    static Observable identity() {
        return {"mean", [](double x) { return x; }, std::nullopt, std::nullopt};
    }

    static Observable second_central(double center) {
        return {"second_central", [center](double x) { return (x - center) * (x - center); },
                0.0, std::nullopt};
    }

    static Observable indicator_gt(double threshold) {
        return {"indicator_gt:" + std::to_string(threshold),
                [threshold](double x) { return x > threshold ? 1.0 : 0.0; }, 0.0, 1.0};
    }
};

/// Resolves a registered observable name: `mean`, `second_central`
/// (centered at the model's stationary mean) or `indicator_gt:<threshold>`.
inline Observable make_observable(const std::string& name, double model_mean = 0.0) {
    if (name == "mean") return Observable::identity();
    if (name == "second_central") return Observable::second_central(model_mean);
    const std::string prefix = "indicator_gt:";
    if (name.rfind(prefix, 0) == 0) {
        std::size_t used = 0;
        const std::string arg = name.substr(prefix.size());
        double thr = 0.0;
        try {
            thr = std::stod(arg, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("unknown observable: " + name);
        }
        if (used != arg.size()) throw std::invalid_argument("unknown observable: " + name);
        return Observable::indicator_gt(thr);
    }
    throw std::invalid_argument("unknown observable: " + name);
}

} // namespace uqsa
