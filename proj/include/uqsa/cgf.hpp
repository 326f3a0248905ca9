#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uqsa/divergence.hpp"
#include "uqsa/math.hpp"

namespace uqsa {

/// Centered cumulant generating function of an observable f under a fixed
/// measure P: value(c) = log E_P[exp(c (f - E_P f))].
///
/// Two representations are supported. Sample-backed handles hold (weighted)
/// observable samples and evaluate by max-shifted log-mean-exp, so they never
/// overflow and their derivatives are exact tilted-measure moments.
/// Analytic handles wrap a closed-form evaluator with a declared finiteness
/// domain (c_minus, c_plus); evaluating outside the domain yields +inf
/// (overflow sentinel, not an error).
///
/// Bounded observables make Phi(c) = -value(c) + c deriv(c) bounded; handles
/// expose sup Phi and the essential-range gaps so solvers can detect
/// saturation instead of chasing a root that does not exist. For
/// sample-backed handles sup Phi = -log(mass at the extreme sample), exactly.
class CgfHandle {
public:
    /// Equally weighted samples of f.
    static CgfHandle empirical(std::vector<double> samples) {
        if (samples.empty()) throw std::invalid_argument("CgfHandle: no samples");
        std::vector<double> w(samples.size(), 1.0);
        return weighted(std::move(samples), std::move(w));
    }

    /// Exact handle for a finite distribution and observable values on its support.
    static CgfHandle from_discrete(const DiscreteDist& p, std::span<const double> f_values) {
        if (f_values.size() != p.size())
            throw std::invalid_argument("CgfHandle: observable/support length mismatch");
        return weighted(std::vector<double>(f_values.begin(), f_values.end()), p.probs);
    }

    static CgfHandle weighted(std::vector<double> values, std::vector<double> weights) {
        if (values.size() != weights.size() || values.empty())
            throw std::invalid_argument("CgfHandle: bad weighted sample set");
        CgfHandle h;
        h.data_ = std::make_shared<Data>();
        Data& d = *h.data_;
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("CgfHandle: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("CgfHandle: zero total weight");
        // zero-weight atoms would corrupt the essential-range metadata
        std::size_t kept = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (weights[i] == 0.0) continue;
            values[kept] = values[i];
            weights[kept] = weights[i];
            ++kept;
        }
        values.resize(kept);
        weights.resize(kept);
        d.weights = std::move(weights);
        for (double& w : d.weights) w /= total;
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) m += d.weights[i] * values[i];
        d.mean = m;
        d.values.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) d.values[i] = values[i] - m;
        d.vmax = *std::max_element(d.values.begin(), d.values.end());
        d.vmin = *std::min_element(d.values.begin(), d.values.end());
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            if (d.values[i] == d.vmax) d.mass_at_max += d.weights[i];
            if (d.values[i] == d.vmin) d.mass_at_min += d.weights[i];
        }
        return h;
    }

    /// Closed-form centered CGF. `deriv` may be empty; a central finite
    /// difference is used in that case. Validates value(0) = 0 and
    /// deriv(0) = 0 (within 1e-8).
    static CgfHandle analytic(std::function<double(double)> value,
                              std::function<double(double)> deriv, double mean,
                              double c_minus = -kInf, double c_plus = kInf) {
        if (!value) throw std::invalid_argument("CgfHandle: missing evaluator");
        if (!(c_minus < 0.0 && c_plus > 0.0))
            throw std::invalid_argument("CgfHandle: domain must contain a neighborhood of 0");
        CgfHandle h;
        h.data_ = std::make_shared<Data>();
        Data& d = *h.data_;
        d.analytic_value = std::move(value);
        d.analytic_deriv = std::move(deriv);
        d.mean = mean;
        d.c_minus = c_minus;
        d.c_plus = c_plus;
        if (std::abs(h.value(0.0)) > 1e-10)
            throw std::invalid_argument("CgfHandle: analytic CGF has value(0) != 0");
        if (std::abs(h.deriv(0.0)) > 1e-8)
            throw std::invalid_argument("CgfHandle: analytic CGF is not centered");
        return h;
    }

    /// CGF of a N(mean, sigma^2) observable: c^2 sigma^2 / 2.
    static CgfHandle gaussian(double sigma, double mean = 0.0) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("CgfHandle: negative sigma");
        const double s2 = sigma * sigma;
        return analytic([s2](double c) { return 0.5 * c * c * s2; },
                        [s2](double c) { return c * s2; }, mean);
    }

    bool sample_backed() const { return !data_->values.empty(); }
    double mean() const { return data_->mean; }
    double domain_minus() const { return data_->c_minus; }
    double domain_plus() const { return data_->c_plus; }

    /// Centered CGF at c; +inf outside the declared domain.
    double value(double c) const {
        const Data& d = *data_;
        if (!d.values.empty()) {
            // expm1/log1p keeps the O(c^2 Var) signal near c = 0, where the
            // plain log-sum-exp would drown it below the ulp of 1
            const double shift = std::max(c * d.vmax, c * d.vmin);
            double s1 = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i)
                s1 += d.weights[i] * std::expm1(c * d.values[i] - shift);
            return (shift + std::log1p(s1)) * inv_time_;
        }
        if (c < d.c_minus || c > d.c_plus) return kInf;
        return d.analytic_value(c) * inv_time_;
    }

    /// d/dc of the centered CGF (mean of f-tilde under the c-tilted measure).
    double deriv(double c) const {
        const Data& d = *data_;
        if (!d.values.empty()) {
            const double shift = std::max(c * d.vmax, c * d.vmin);
            double s = 0.0, sf = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
                const double e = d.weights[i] * std::exp(c * d.values[i] - shift);
                s += e;
                sf += e * d.values[i];
            }
            return (sf / s) * inv_time_;
        }
        if (d.analytic_deriv) return d.analytic_deriv(c) * inv_time_;
        double h = 6e-6 * std::max(1.0, std::abs(c));
        h = fit_step(c, h);
        return (d.analytic_value(c + h) - d.analytic_value(c - h)) / (2.0 * h) * inv_time_;
    }

    /// Second derivative (tilted variance); exact for sample-backed handles.
    double second_deriv(double c) const {
        const Data& d = *data_;
        if (!d.values.empty()) {
            const double shift = std::max(c * d.vmax, c * d.vmin);
            double s = 0.0, sf = 0.0, sff = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
                const double e = d.weights[i] * std::exp(c * d.values[i] - shift);
                s += e;
                sf += e * d.values[i];
                sff += e * d.values[i] * d.values[i];
            }
            const double m1 = sf / s;
            return (sff / s - m1 * m1) * inv_time_;
        }
        double h = 1.2e-4 * std::max(1.0, std::abs(c));
        h = fit_step(c, h);
        return (deriv(c + h) - deriv(c - h)) / (2.0 * h);
    }

    double variance() const { return second_deriv(0.0); }

    /// ess-sup(f) - E f when known; +inf means unbounded above/unknown.
    double ess_sup_gap() const {
        const Data& d = *data_;
        if (!d.values.empty()) return d.vmax * inv_time_;
        return d.ess_sup_gap * inv_time_;
    }

    /// sup_c Phi(c); the relative-entropy budget beyond which the upper
    /// bound saturates at ess_sup_gap.
    double sup_phi() const {
        const Data& d = *data_;
        if (!d.values.empty()) {
            if (d.vmax == 0.0 && d.vmin == 0.0) return 0.0; // constant observable
            return -std::log(d.mass_at_max) * inv_time_;
        }
        return d.sup_phi_plus * inv_time_;
    }

    /// Handle for -f-tilde; swaps the roles of the two tails.
    CgfHandle mirrored() const {
        const Data& d = *data_;
        CgfHandle h;
        h.inv_time_ = inv_time_;
        h.data_ = std::make_shared<Data>();
        Data& m = *h.data_;
        if (!d.values.empty()) {
            m = d;
            for (double& v : m.values) v = -v;
            m.vmax = -d.vmin;
            m.vmin = -d.vmax;
            m.mass_at_max = d.mass_at_min;
            m.mass_at_min = d.mass_at_max;
            return h;
        }
        auto val = d.analytic_value;
        m.analytic_value = [val](double c) { return val(-c); };
        if (d.analytic_deriv) {
            auto der = d.analytic_deriv;
            m.analytic_deriv = [der](double c) { return -der(-c); };
        }
        m.mean = d.mean;
        m.c_minus = -d.c_plus;
        m.c_plus = -d.c_minus;
        m.ess_sup_gap = d.ess_inf_gap;
        m.ess_inf_gap = d.ess_sup_gap;
        m.sup_phi_plus = d.sup_phi_minus;
        m.sup_phi_minus = d.sup_phi_plus;
        return h;
    }

    /// Per-unit-time view: (1/T) value(c), for CGFs of T-scaled path sums.
    CgfHandle scaled_by_time(double time) const {
        if (!(time > 0.0)) throw std::invalid_argument("CgfHandle: nonpositive time");
        CgfHandle h = *this;
        h.inv_time_ = inv_time_ / time;
        return h;
    }

    /// Essential-range metadata for analytic handles of bounded observables:
    /// gaps (ess-sup f - E f) and (E f - ess-inf f), with sup Phi per tail.
    void declare_bounded_range(double sup_gap, double inf_gap, double sup_phi_plus,
                               double sup_phi_minus) {
        Data& d = *data_;
        d.ess_sup_gap = sup_gap;
        d.ess_inf_gap = inf_gap;
        d.sup_phi_plus = sup_phi_plus;
        d.sup_phi_minus = sup_phi_minus;
    }

private:
    struct Data {
        // sample-backed representation (centered values)
        std::vector<double> values;
        std::vector<double> weights;
        double vmax = 0.0, vmin = 0.0;
        double mass_at_max = 0.0, mass_at_min = 0.0;
        // analytic representation
        std::function<double(double)> analytic_value;
        std::function<double(double)> analytic_deriv;
        double c_minus = -kInf, c_plus = kInf;
        double ess_sup_gap = kInf, ess_inf_gap = kInf;
        double sup_phi_plus = kInf, sup_phi_minus = kInf;
        double mean = 0.0;
    };

    double fit_step(double c, double h) const {
        const Data& d = *data_;
        if (std::isfinite(d.c_plus)) h = std::min(h, 0.45 * (d.c_plus - c));
        if (std::isfinite(d.c_minus)) h = std::min(h, 0.45 * (c - d.c_minus));
        if (!(h > 0.0)) throw std::runtime_error("CgfHandle: derivative at domain boundary");
        return h;
    }

    std::shared_ptr<Data> data_; // treated as immutable once constructed
    double inv_time_ = 1.0;
};

/// Free-function form: Lambda-tilde_{P,f}(c).
inline double centered_cgf(const CgfHandle& h, double c) { return h.value(c); }

} // namespace uqsa
