#pragma once

// Numerical limit cycles: Poincare return maps on straight transverse
// sections, fixed points by damped secant iteration, multipliers by central
// differences, and the m^2-fold lift of a cycle through a Chebyshev pullback.

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclerep/branches.hpp"
#include "cyclerep/errors.hpp"
#include "cyclerep/ode.hpp"
#include "cyclerep/polynomial.hpp"
#include "cyclerep/pullback.hpp"

namespace cyclerep {

class NoReturn : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateCrossing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Float evaluator for a polynomial field.
class FieldF64 {
public:
    explicit FieldF64(const VectorField2& X) : p_(X.p_comp), q_(X.q_comp) {}
    State operator()(const State& z) const { return {p_(z[0], z[1]), q_(z[0], z[1])}; }

private:
    BiPolyF64 p_, q_;
};

inline double dot(const State& a, const State& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const State& a) { return std::hypot(a[0], a[1]); }

/// Open segment {base + s * direction : 0 < s < s_max}.
struct Section {
    State base{};
    State direction{1.0, 0.0};
    double s_max = 1.0;

    Section() = default;
    Section(State b, State d, double smax) : base(b), s_max(smax) {
        const double n = norm(d);
        if (!(n > 0) || !(smax > 0)) throw InvalidParameter("section needs a nonzero direction and positive length");
        direction = {d[0] / n, d[1] / n};
    }

    State point(double s) const { return {base[0] + s * direction[0], base[1] + s * direction[1]}; }
    State normal() const { return {-direction[1], direction[0]}; }
    double offset(const State& z) const { return dot(normal(), {z[0] - base[0], z[1] - base[1]}); }
    double param(const State& z) const { return dot(direction, {z[0] - base[0], z[1] - base[1]}); }
};

struct CycleConfig {
    double tol = 1e-10;           // integrator local error
    double eps_fix = 1e-9;        // |return(s) - s| at convergence
    double eps_transverse = 1e-8; // |field . normal| at crossings
    double eps_hyp = 1e-3;        // |multiplier - 1| for certification
    double margin = 1e-3;         // anchor distance to rectangle boundary
    double t_max = 200.0;         // give up on a return after this time
    double max_section_half_length = 0.05;
    int max_iters = 60;
    bool parallel = true;
};

struct ReturnResult {
    double s = 0.0;
    double flight_time = 0.0;
};

/// First return to the section, crossing it in the same direction as at the
/// start point.
inline ReturnResult poincare_return(const FieldF64& field, const Section& sec, double s, const CycleConfig& cfg) {
    if (!(s > 0 && s < sec.s_max)) throw InvalidParameter("start parameter outside the section");
    const State n = sec.normal();
    const State z0 = sec.point(s);
    const double flux0 = dot(n, field(z0));
    if (!(std::abs(flux0) > cfg.eps_transverse)) throw DegenerateCrossing("field is not transverse at the start point");
    const double orient = flux0 > 0 ? 1.0 : -1.0;

    DormandPrince<const FieldF64&> stepper(field, 0.0, z0, {cfg.tol, cfg.tol});
    double g_prev = 0.0;
    while (stepper.t() < cfg.t_max) {
        stepper.step(cfg.t_max);
        const State& y = stepper.y();
        const double g = orient * sec.offset(y);
        if (g_prev < 0.0 && g >= 0.0) {
            // Illinois regula falsi on the dense output
            const DenseSegment& seg = stepper.last_segment();
            double ta = seg.t0, tb = seg.t1(), ga = g_prev, gb = g;
            int side = 0;
            double tc = tb;
            for (int it = 0; it < 100; ++it) {
                tc = (ta * gb - tb * ga) / (gb - ga);
                const double gc = orient * sec.offset(seg.at(tc));
                if (gc == 0.0 || (tb - ta) <= 1e-15 * std::max(1.0, std::abs(tb))) break;
                if ((gc < 0) == (ga < 0)) {
                    ta = tc;
                    ga = gc;
                    if (side == -1) gb *= 0.5;
                    side = -1;
                } else {
                    tb = tc;
                    gb = gc;
                    if (side == 1) ga *= 0.5;
                    side = 1;
                }
                if (std::abs(gc) <= 1e-16) break;
            }
            const State zc = seg.at(tc);
            const double sc = sec.param(zc);
            if (sc > 0.0 && sc < sec.s_max) {
                if (!(std::abs(dot(n, field(zc))) > cfg.eps_transverse))
                    throw DegenerateCrossing("field is tangent to the section at the return point");
                return {sc, tc};
            }
        }
        g_prev = g;
    }
    throw NoReturn("no return to the section within t_max");
}

struct BranchRectangle {
    int i = 0;
    int j = 0;
    BranchInterval u_interval;
    BranchInterval v_interval;

    bool contains(const State& z) const { return u_interval.contains(z[0]) && v_interval.contains(z[1]); }
    double boundary_distance(const State& z) const {
        return std::min({z[0] - u_interval.lo, u_interval.hi - z[0], z[1] - v_interval.lo, v_interval.hi - z[1]});
    }
};

struct LimitCycleRecord {
    State anchor{};
    double section_param = 0.0;
    double period = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;  // |return(s) - s| at the anchor
    bool certified = false;
    std::optional<BranchRectangle> rect;
    bool orientation_reversed = false;
};

/// Fixed point of the return map by damped secant iteration from s0, then
/// the multiplier by a central difference.
inline LimitCycleRecord find_cycle(const FieldF64& field, const Section& sec, double s0, const CycleConfig& cfg) {
    auto displacement = [&](double s) {
        const auto r = poincare_return(field, sec, s, cfg);
        return std::pair{r.s - s, r.flight_time};
    };
    const double max_step = 0.25 * sec.s_max;
    auto keep_inside = [&](double from, double to) {
        double step = std::clamp(to - from, -max_step, max_step);
        while (!(from + step > 0.0 && from + step < sec.s_max) && std::abs(step) > 1e-300) step *= 0.5;
        return from + step;
    };

    double sa = s0;
    auto [ga, ta] = displacement(sa);
    double s_best = sa, g_best = ga, t_best = ta;
    if (std::abs(ga) > cfg.eps_fix) {
        double sb = keep_inside(sa, sa + ga);
        auto [gb, tb] = displacement(sb);
        if (std::abs(gb) < std::abs(g_best)) std::tie(s_best, g_best, t_best) = std::tuple{sb, gb, tb};
        for (int it = 0; it < cfg.max_iters && std::abs(g_best) > cfg.eps_fix; ++it) {
            if (gb == ga) throw SearchFailure("secant stalled: flat displacement");
            const double target = sb - gb * (sb - sa) / (gb - ga);
            const double sc = keep_inside(sb, target);
            auto [gc, tc] = displacement(sc);
            sa = sb;
            ga = gb;
            sb = sc;
            gb = gc;
            if (std::abs(gc) < std::abs(g_best)) std::tie(s_best, g_best, t_best) = std::tuple{sc, gc, tc};
        }
        if (std::abs(g_best) > cfg.eps_fix) throw SearchFailure("fixed point search did not converge");
    }

    LimitCycleRecord rec;
    rec.section_param = s_best;
    rec.anchor = sec.point(s_best);
    rec.period = t_best;
    rec.residual = std::abs(g_best);
    const double h = std::max(1e-6, 1e-6 * std::abs(s_best));
    if (!(s_best - h > 0.0 && s_best + h < sec.s_max)) throw SearchFailure("fixed point too close to the section end");
    const double plus = poincare_return(field, sec, s_best + h, cfg).s;
    const double minus = poincare_return(field, sec, s_best - h, cfg).s;
    rec.multiplier = (plus - minus) / (2.0 * h);
    rec.certified = std::abs(rec.multiplier - 1.0) > cfg.eps_hyp;
    return rec;
}

/// Lifting failed for some rectangles; the successful records are kept.
class PartialLiftError : public std::runtime_error {
public:
    PartialLiftError(std::vector<LimitCycleRecord> found, std::vector<std::pair<int, int>> failed, std::string detail)
        : std::runtime_error(describe(failed, detail)), found_(std::move(found)), failed_(std::move(failed)) {}
    const std::vector<LimitCycleRecord>& found() const { return found_; }
    const std::vector<std::pair<int, int>>& failed() const { return failed_; }

private:
    static std::string describe(const std::vector<std::pair<int, int>>& failed, const std::string& detail) {
        std::ostringstream os;
        os << "lift failed in rectangles";
        for (auto [i, j] : failed) os << " (" << i << "," << j << ")";
        if (!detail.empty()) os << ": " << detail;
        return os.str();
    }
    std::vector<LimitCycleRecord> found_;
    std::vector<std::pair<int, int>> failed_;
};

/// Sign of lambda = T_m'(u) T_m'(v) on I_i x I_j, from the branch directions.
inline int lambda_sign(int i, int j) { return sign_of(cheb_direction(i)) * sign_of(cheb_direction(j)); }

/// Section through `seed` perpendicular to the field, kept inside the rectangle.
inline Section lifted_section(const FieldF64& field, const State& seed, const BranchRectangle& rect, double cap) {
    const State f = field(seed);
    const double fn = norm(f);
    if (!(fn > 0)) throw DegenerateCrossing("field vanishes at the lifted seed");
    const State d{-f[1] / fn, f[0] / fn};
    auto reach = [&](double sign) {
        double best = std::numeric_limits<double>::infinity();
        const double du = sign * d[0], dv = sign * d[1];
        if (du > 0) best = std::min(best, (rect.u_interval.hi - seed[0]) / du);
        if (du < 0) best = std::min(best, (rect.u_interval.lo - seed[0]) / du);
        if (dv > 0) best = std::min(best, (rect.v_interval.hi - seed[1]) / dv);
        if (dv < 0) best = std::min(best, (rect.v_interval.lo - seed[1]) / dv);
        return best;
    };
    const double half = std::min({0.5 * reach(1.0), 0.5 * reach(-1.0), cap});
    return Section({seed[0] - half * d[0], seed[1] - half * d[1]}, d, 2.0 * half);
}

/// The m^2 lifts of a certified base cycle of X through Y = build_pullback(X, T_m).
/// Records are ordered by (i, j) regardless of completion order.
inline std::vector<LimitCycleRecord> lift_cycles(const PullbackResult& Y, const LimitCycleRecord& base, int m,
                                                 const CycleConfig& cfg = {}) {
    if (m < 2) throw InvalidParameter("lift_cycles requires m >= 2");
    if (!(Y.cover_poly == chebyshev(m))) throw InvalidParameter("pullback cover is not T_m");
    if (!base.certified) throw InvalidParameter("base cycle is not certified hyperbolic");
    if (!(std::abs(base.anchor[0]) < 1.0 && std::abs(base.anchor[1]) < 1.0))
        throw InvalidParameter("base cycle anchor lies outside (-1,1)^2");

    const FieldF64 field(Y.field);
    const BranchSet branches = cheb_branches(m);

    struct Outcome {
        std::optional<LimitCycleRecord> record;
        std::string error;
    };
    auto solve = [&](int i, int j) -> Outcome {
        BranchRectangle rect{i, j, branches.intervals[static_cast<std::size_t>(i - 1)],
                             branches.intervals[static_cast<std::size_t>(j - 1)]};
        try {
            const State seed{branch_inverse(m, i, base.anchor[0]), branch_inverse(m, j, base.anchor[1])};
            const Section sec = lifted_section(field, seed, rect, cfg.max_section_half_length);
            LimitCycleRecord rec = find_cycle(field, sec, 0.5 * sec.s_max, cfg);
            rec.rect = rect;
            rec.orientation_reversed = lambda_sign(i, j) < 0;
            if (!rec.certified) return {std::nullopt, "multiplier within eps_hyp of 1"};
            if (!(rect.boundary_distance(rec.anchor) >= cfg.margin)) return {std::nullopt, "anchor too close to rectangle boundary"};
            return {rec, {}};
        } catch (const std::exception& e) {
            return {std::nullopt, e.what()};
        }
    };

    std::vector<Outcome> outcomes(static_cast<std::size_t>(m * m));
    if (cfg.parallel) {
        std::vector<std::future<Outcome>> jobs;
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) jobs.push_back(std::async(std::launch::async, solve, i, j));
        for (std::size_t k = 0; k < jobs.size(); ++k) outcomes[k] = jobs[k].get();
    } else {
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) outcomes[static_cast<std::size_t>((i - 1) * m + (j - 1))] = solve(i, j);
    }

    std::vector<LimitCycleRecord> found;
    std::vector<std::pair<int, int>> failed;
    std::string detail;
    for (int k = 0; k < m * m; ++k) {
        auto& o = outcomes[static_cast<std::size_t>(k)];
        if (o.record) {
            found.push_back(*o.record);
        } else {
            failed.emplace_back(k / m + 1, k % m + 1);
            if (detail.empty()) detail = o.error;
        }
    }
    if (!failed.empty()) throw PartialLiftError(std::move(found), std::move(failed), detail);
    return found;
}

/// T_m(u)^2 + T_m(v)^2 - rho^2, the exact preimage of the circle of radius rho.
inline BiPoly implicit_lift_curve(int m, const Rat& rho) {
    if (m < 2) throw InvalidParameter("implicit_lift_curve requires m >= 2");
    if (!(rho > 0 && rho < 1)) throw InvalidParameter("rho must lie in (0, 1)");
    const UniPoly t = chebyshev(m);
    const UniPoly t2 = t * t;
    return BiPoly::in_u(t2) + BiPoly::in_v(t2) - BiPoly::constant(rho * rho);
}

/// Section along the positive x-axis, the natural one for fields rotating
/// about the origin.
inline Section positive_x_axis(double length = 1.0) { return Section({0.0, 0.0}, {1.0, 0.0}, length); }

inline nlohmann::json to_json(const LimitCycleRecord& r) {
    nlohmann::json j{{"anchor", {r.anchor[0], r.anchor[1]}},
                     {"period", r.period},
                     {"multiplier", r.multiplier},
                     {"certified", r.certified},
                     {"orientation_reversed", r.orientation_reversed}};
    if (r.rect) {
        j["i"] = r.rect->i;
        j["j"] = r.rect->j;
        j["rect"] = {{"u", {r.rect->u_interval.lo, r.rect->u_interval.hi}}, {"v", {r.rect->v_interval.lo, r.rect->v_interval.hi}}};
    }
    return j;
}

} // namespace cyclerep
