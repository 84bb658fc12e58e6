#ifndef RAMAN_ECHO_ODE_HPP
#define RAMAN_ECHO_ODE_HPP

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "raman_echo/core.hpp"

namespace raman_echo {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-10;
    double max_step = 0.1;
    // When > 0 the classical fixed-step RK4 scheme is used with this step.
    double fixed_step = 0.0;
    long max_steps_per_call = 5'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

// Explicit integrator for dy/dt = f(t, y) on complex state vectors:
// Dormand-Prince 5(4) with error control, or fixed-step RK4 when
// options.fixed_step > 0. The accepted step size carries over between
// advance() calls, so sampling a trajectory on an output grid costs little.
template <typename Rhs>
class OdeIntegrator {
public:
    OdeIntegrator(Rhs rhs, IntegratorOptions options)
        : rhs_(std::move(rhs)), options_(options), h_(options.initial_step) {}

    const IntegratorStats& stats() const { return stats_; }

    // Advances y from t to t_end in place.
    void advance(double& t, Eigen::VectorXcd& y, double t_end)
    {
        if (options_.fixed_step > 0.0) {
            advance_fixed(t, y, t_end);
        } else {
            advance_adaptive(t, y, t_end);
        }
    }

private:
    void eval(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy)
    {
        rhs_(t, y, dy);
        ++stats_.rhs_calls;
    }

    void advance_fixed(double& t, Eigen::VectorXcd& y, double t_end)
    {
        const double span = t_end - t;
        if (span <= 0.0) {
            return;
        }
        const auto n = static_cast<long>(std::ceil(span / options_.fixed_step - 1e-9));
        const double h = span / static_cast<double>(n);
        resize(y.size());
        for (long i = 0; i < n; ++i) {
            eval(t, y, k_[0]);
            tmp_ = y + 0.5 * h * k_[0];
            eval(t + 0.5 * h, tmp_, k_[1]);
            tmp_ = y + 0.5 * h * k_[1];
            eval(t + 0.5 * h, tmp_, k_[2]);
            tmp_ = y + h * k_[2];
            eval(t + h, tmp_, k_[3]);
            y += (h / 6.0) * (k_[0] + 2.0 * k_[1] + 2.0 * k_[2] + k_[3]);
            t += h;
            ++stats_.accepted;
        }
        t = t_end;
    }

    void advance_adaptive(double& t, Eigen::VectorXcd& y, double t_end)
    {
        // Dormand-Prince tableau.
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                         b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        if (t_end <= t) {
            return;
        }
        resize(y.size());
        long steps = 0;
        eval(t, y, k_[0]);
        while (t < t_end) {
            if (++steps > options_.max_steps_per_call) {
                throw numerical_error("integrator exceeded the step budget (problem too stiff for explicit steps)");
            }
            double h = std::min({h_, options_.max_step, t_end - t});
            const bool last = (h >= t_end - t);

            tmp_ = y + h * a21 * k_[0];
            eval(t + c2 * h, tmp_, k_[1]);
            tmp_ = y + h * (a31 * k_[0] + a32 * k_[1]);
            eval(t + c3 * h, tmp_, k_[2]);
            tmp_ = y + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
            eval(t + c4 * h, tmp_, k_[3]);
            tmp_ = y + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
            eval(t + c5 * h, tmp_, k_[4]);
            tmp_ = y + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
            eval(t + h, tmp_, k_[5]);
            y_new_ = y + h * (b1 * k_[0] + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] + b6 * k_[5]);
            eval(t + h, y_new_, k_[6]);
            err_ = h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);

            double err = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double scale = options_.atol + options_.rtol * std::max(std::abs(y(i)), std::abs(y_new_(i)));
                err = std::max(err, std::abs(err_(i)) / scale);
            }

            if (err <= 1.0) {
                t = last ? t_end : t + h;
                y.swap(y_new_);
                k_[0].swap(k_[6]);
                ++stats_.accepted;
                const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                if (!last) {
                    h_ = h * grow;
                } else {
                    h_ = std::max(h_, h);
                }
            } else {
                ++stats_.rejected;
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h_ < options_.min_step) {
                    std::ostringstream os;
                    os << "step size underflow at t = " << t << " (h = " << h_ << ")";
                    throw numerical_error(os.str());
                }
            }
        }
    }

    void resize(Eigen::Index n)
    {
        for (auto& k : k_) {
            if (k.size() != n) {
                k.resize(n);
            }
        }
    }

    Rhs rhs_;
    IntegratorOptions options_;
    double h_;
    IntegratorStats stats_;
    Eigen::VectorXcd k_[7];
    Eigen::VectorXcd tmp_, y_new_, err_;
};

template <typename Rhs>
OdeIntegrator<Rhs> make_integrator(Rhs rhs, IntegratorOptions options)
{
    return OdeIntegrator<Rhs>(std::move(rhs), options);
}

} // namespace raman_echo

#endif // RAMAN_ECHO_ODE_HPP
