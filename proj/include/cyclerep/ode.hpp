#pragma once

// Adaptive Dormand-Prince 5(4) integrator for autonomous planar systems,
// with the standard fourth-order continuous extension for dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclerep {

using State = std::array<double, 2>;

/// Step-size underflow, non-finite state, or step budget exhausted.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double t, State last)
        : std::runtime_error(what), t_(t), last_(last) {}
    double time() const { return t_; }
    const State& last_state() const { return last_; }

private:
    double t_;
    State last_;
};

namespace dopri {

inline constexpr double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                        a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0, a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                        a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

} // namespace dopri

/// One accepted step with its interpolant.
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> rcont{};

    double t1() const { return t0 + h; }
    State at(double t) const {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        State y;
        for (std::size_t i = 0; i < 2; ++i)
            y[i] = rcont[0][i] + th * (rcont[1][i] + th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
        return y;
    }
};

struct StepperOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
};

/// Stateful stepper: each call to step() takes one accepted step, clipped so
/// as not to pass t_stop.
template <class Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, double t0, State y0, StepperOptions opt = {})
        : f_(std::move(rhs)), opt_(opt), t_(t0), y_(y0) {
        if (!(opt_.rtol > 0) || !(opt_.atol > 0)) throw std::invalid_argument("tolerances must be positive");
        check_finite(y_);
        k1_ = f_(y_);
        check_finite(k1_);
        h_ = initial_step();
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const DenseSegment& last_segment() const { return seg_; }
    long accepted() const { return accepted_; }

    void step(double t_stop = std::numeric_limits<double>::infinity()) {
        using namespace dopri;
        constexpr double safe = 0.9, facc1 = 5.0, facc2 = 0.1, beta = 0.04, expo1 = 0.2 - beta * 0.75;
        const double eps = std::numeric_limits<double>::epsilon();
        for (;;) {
            if (accepted_ + rejected_ >= opt_.max_steps) throw IntegrationFailure("step budget exhausted", t_, y_);
            double h = std::min(h_, opt_.h_max);
            bool last = false;
            if (t_ + h >= t_stop) {
                h = t_stop - t_;
                last = true;
            }
            if (h <= 10.0 * eps * std::max(1.0, std::abs(t_)))
                throw IntegrationFailure("step size underflow", t_, y_);

            State y2, y3, y4, y5, y6, y7, k2, k3, k4, k5, k6, k7;
            for (std::size_t i = 0; i < 2; ++i) y2[i] = y_[i] + h * a21 * k1_[i];
            k2 = f_(y2);
            for (std::size_t i = 0; i < 2; ++i) y3[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            k3 = f_(y3);
            for (std::size_t i = 0; i < 2; ++i) y4[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = f_(y4);
            for (std::size_t i = 0; i < 2; ++i)
                y5[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = f_(y5);
            for (std::size_t i = 0; i < 2; ++i)
                y6[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = f_(y6);
            for (std::size_t i = 0; i < 2; ++i)
                y7[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = f_(y7);

            double err = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < 2; ++i) {
                const double ei = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(y7[i]));
                err += (ei / sk) * (ei / sk);
                finite = finite && std::isfinite(y7[i]) && std::isfinite(k7[i]);
            }
            err = std::sqrt(err / 2.0);
            if (!finite || !std::isfinite(err)) {
                h_ = 0.1 * h;
                ++rejected_;
                continue;
            }

            const double fac11 = std::pow(err, expo1);
            if (err <= 1.0) {
                double fac = fac11 / std::pow(facold_, beta);
                fac = std::clamp(fac / safe, facc2, facc1);
                seg_.t0 = t_;
                seg_.h = h;
                for (std::size_t i = 0; i < 2; ++i) {
                    const double ydiff = y7[i] - y_[i];
                    const double bspl = h * k1_[i] - ydiff;
                    seg_.rcont[0][i] = y_[i];
                    seg_.rcont[1][i] = ydiff;
                    seg_.rcont[2][i] = bspl;
                    seg_.rcont[3][i] = ydiff - h * k7[i] - bspl;
                    seg_.rcont[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                facold_ = std::max(err, 1e-4);
                t_ = last ? t_stop : t_ + h;
                y_ = y7;
                k1_ = k7;
                ++accepted_;
                // a step clipped to t_stop keeps the previous proposal
                if (!last) h_ = h / fac;
                return;
            }
            h_ = h / std::min(facc1, fac11 / safe);
            ++rejected_;
        }
    }

private:
    void check_finite(const State& s) const {
        if (!std::isfinite(s[0]) || !std::isfinite(s[1])) throw IntegrationFailure("non-finite state", t_, y_);
    }

    // Hairer's starting step heuristic for a fifth-order method.
    double initial_step() {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
            dnf += (k1_[i] / sk) * (k1_[i] / sk);
            dny += (y_[i] / sk) * (y_[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, opt_.h_max);
        State y1;
        for (std::size_t i = 0; i < 2; ++i) y1[i] = y_[i] + h * k1_[i];
        const State f1 = f_(y1);
        double der2 = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
            der2 += ((f1[i] - k1_[i]) / sk) * ((f1[i] - k1_[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
        return std::min({100.0 * h, h1, opt_.h_max});
    }

    Rhs f_;
    StepperOptions opt_;
    double t_;
    State y_;
    State k1_{};
    double h_ = 0.0;
    double facold_ = 1e-4;
    long accepted_ = 0;
    long rejected_ = 0;
    DenseSegment seg_{};
};

/// Dense trajectory over [0, t_end].
struct Trajectory {
    std::vector<DenseSegment> segments;
    State start{};

    double t_end() const { return segments.empty() ? 0.0 : segments.back().t1(); }
    State final_state() const { return segments.empty() ? start : segments.back().at(segments.back().t1()); }
    State at(double t) const {
        if (segments.empty()) return start;
        auto it = std::lower_bound(segments.begin(), segments.end(), t,
                                   [](const DenseSegment& s, double tt) { return s.t1() < tt; });
        if (it == segments.end()) it = std::prev(segments.end());
        return it->at(t);
    }
};

/// Integrates y' = f(y) from `start` over [0, t_span], local error per step
/// bounded by `tol` (mixed absolute/relative).
template <class Rhs>
Trajectory integrate(Rhs rhs, State start, double t_span, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    if (!(t_span >= 0)) throw std::invalid_argument("t_span must be non-negative");
    Trajectory traj;
    traj.start = start;
    DormandPrince<Rhs> stepper(std::move(rhs), 0.0, start, {tol, tol});
    while (stepper.t() < t_span) {
        stepper.step(t_span);
        traj.segments.push_back(stepper.last_segment());
    }
    return traj;
}

} // namespace cyclerep
