#pragma once

// Monotone full branches of univariate polynomials onto (-1, 1).
//
// Chebyshev branches are given in closed form. For a general polynomial the
// real critical points are isolated numerically and every maximal monotone
// piece is tested for covering (-1, 1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclerep/errors.hpp"
#include "cyclerep/polynomial.hpp"

namespace cyclerep {

enum class Direction { increasing, decreasing };

inline int sign_of(Direction d) { return d == Direction::increasing ? 1 : -1; }

struct BranchInterval {
    int index = 0;  // 1-based; index 1 is the rightmost interval
    double lo = 0.0;
    double hi = 0.0;
    Direction direction = Direction::increasing;

    bool contains(double x) const { return lo < x && x < hi; }
    double width() const { return hi - lo; }
};

struct BranchSet {
    UniPoly poly;
    std::vector<BranchInterval> intervals;
    int count = 0;
    bool degenerate_critical = false;
    std::vector<std::string> warnings;
};

/// Where full branches are searched for.
enum class BranchDomain {
    real_line,      // open intervals anywhere in R
    unit_interval,  // only monotone pieces of p restricted to (-1, 1)
};

// ---------------------------------------------------------------------------
// Chebyshev branches

inline std::vector<double> cheb_nodes(int m) {
    if (m < 2) throw InvalidParameter("cheb_nodes requires m >= 2");
    std::vector<double> nodes(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) nodes[static_cast<std::size_t>(k)] = std::cos(k * std::numbers::pi / m);
    // cos(pi/2) and friends are not exactly representable; pin the endpoints
    nodes.front() = 1.0;
    nodes.back() = -1.0;
    if (m % 2 == 0) nodes[static_cast<std::size_t>(m / 2)] = 0.0;
    return nodes;
}

/// T_m is increasing in x on I_k for odd k and decreasing for even k
/// (I_1 ends at x = 1 where T_m = 1).
inline Direction cheb_direction(int k) { return (k % 2 == 1) ? Direction::increasing : Direction::decreasing; }

inline BranchSet cheb_branches(int m) {
    auto nodes = cheb_nodes(m);
    BranchSet out;
    out.poly = chebyshev(m);
    for (int k = 1; k <= m; ++k)
        out.intervals.push_back({k, nodes[static_cast<std::size_t>(k)], nodes[static_cast<std::size_t>(k - 1)], cheb_direction(k)});
    out.count = m;
    return out;
}

/// The unique u in I_k with T_m(u) = y.
inline double branch_inverse(int m, int k, double y) {
    if (m < 2) throw InvalidParameter("branch_inverse requires m >= 2");
    if (k < 1 || k > m) throw InvalidParameter("branch index out of range");
    if (!(std::abs(y) < 1.0)) throw OutOfRange("branch_inverse: |y| must be < 1 (branch endpoints are critical values)");
    const double a = std::acos(y);
    const double pi = std::numbers::pi;
    const double u = (k % 2 == 1) ? std::cos(((k - 1) * pi + a) / m) : std::cos((k * pi - a) / m);

    const auto nodes = cheb_nodes(m);
    const double lo = nodes[static_cast<std::size_t>(k)], hi = nodes[static_cast<std::size_t>(k - 1)];
    if (!(lo < u && u < hi)) throw OutOfRange("branch_inverse: y too close to +-1 to resolve inside I_k");

    const UniPolyF64 tm(chebyshev(m));
    double scale = 0.0;
    for (double c : tm.coeffs()) scale += std::abs(c);
    const double allowed = std::max(1e-12, 8.0 * std::numeric_limits<double>::epsilon() * scale);
    if (std::abs(tm(u) - y) > allowed) throw std::logic_error("branch_inverse: residual check failed");
    return u;
}

// ---------------------------------------------------------------------------
// General polynomials

namespace detail {

inline double cauchy_bound(const std::vector<double>& c) {
    const double lead = std::abs(c.back());
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) worst = std::max(worst, std::abs(c[i]) / lead);
    return 1.0 + worst;
}

template <class F>
double bisect_root(const F& f, double a, double b, double tol) {
    double fa = f(a);
    for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

struct RootScan {
    std::vector<double> simple;   // sign-changing roots, ascending
    std::vector<double> touching; // near-multiple roots without a sign change
};

/// Real roots of f on [-R, R] by sign changes on a uniform grid, bisected to tol.
/// Cells without a sign change are checked for a hidden pair of roots at the
/// interior extremum of f.
inline RootScan scan_roots(const UniPolyF64& f, const UniPolyF64& df, double bound, int cells, double tol,
                           double touch_threshold) {
    RootScan out;
    std::vector<double> xs(static_cast<std::size_t>(cells) + 1), fs(xs.size());
    for (int i = 0; i <= cells; ++i) {
        xs[static_cast<std::size_t>(i)] = -bound + 2.0 * bound * i / cells;
        fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    }
    auto sgn = [](double v) { return (v > 0) - (v < 0); };

    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (fs[i] != 0.0) continue;
        const int left = i > 0 ? sgn(fs[i - 1]) : 0;
        const int right = i + 1 < xs.size() ? sgn(fs[i + 1]) : 0;
        if (left != 0 && right != 0 && left == right)
            out.touching.push_back(xs[i]);
        else
            out.simple.push_back(xs[i]);
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = xs[i], b = xs[i + 1];
        const int sa = sgn(fs[i]), sb = sgn(fs[i + 1]);
        if (sa == 0 || sb == 0) continue;
        if (sa != sb) {
            out.simple.push_back(bisect_root(f, a, b, tol));
            continue;
        }
        // no sign change: an interior extremum of f may hide two roots or a double root
        const double da = df(a), db = df(b);
        if (da == 0.0 || db == 0.0 || (da < 0) == (db < 0)) continue;
        const double xm = bisect_root(df, a, b, tol);
        const double fm = f(xm);
        if (sgn(fm) != sa && fm != 0.0) {
            out.simple.push_back(bisect_root(f, a, xm, tol));
            out.simple.push_back(bisect_root(f, xm, b, tol));
        } else if (std::abs(fm) <= touch_threshold) {
            out.touching.push_back(xm);
        }
    }
    std::sort(out.simple.begin(), out.simple.end());
    std::sort(out.touching.begin(), out.touching.end());
    return out;
}

inline double abs_sum(const std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) s += std::abs(v);
    return s;
}

inline RootScan real_roots(const UniPoly& f, double tol) {
    if (f.degree() < 1) return {};
    const UniPolyF64 ff(f), fd(derivative(f));
    const double bound = cauchy_bound(ff.coeffs());
    const int cells = 64 * f.degree().value();
    double peak = 0.0;
    for (double c : ff.coeffs()) peak = std::max(peak, std::abs(c));
    return scan_roots(ff, fd, bound, cells, tol, std::sqrt(tol) * peak);
}

/// True when p has a critical point within `radius` of x at which p equals
/// `level` exactly (decided through gcd(p - level, p') over the rationals).
inline bool exact_critical_touch(const UniPoly& p, int level, double x, double radius, double tol) {
    const UniPoly g = gcd(p - UniPoly::constant(Rat(level)), derivative(p));
    if (g.degree() < 1) return false;
    for (double r : real_roots(g, tol).simple)
        if (std::abs(r - x) <= radius) return true;
    return false;
}

} // namespace detail

/// Full branch intervals of p onto (-1, 1). Intervals are indexed from the
/// right, matching the Chebyshev convention. Near-degenerate situations are
/// reported through `degenerate_critical` and `warnings`, never thrown.
inline BranchSet full_branch_intervals(const UniPoly& p, double tol = 1e-12,
                                       BranchDomain domain = BranchDomain::real_line) {
    if (p.degree() < 1) throw InvalidParameter("full_branch_intervals requires deg(p) >= 1");
    if (!(tol > 0)) throw InvalidParameter("tol must be positive");
    const int d = p.degree().value();
    const UniPoly dp = derivative(p);
    const UniPolyF64 pf(p), dpf(dp);

    BranchSet out;
    out.poly = p;

    std::vector<double> crit;
    if (d >= 2) {
        const UniPolyF64 ddpf(derivative(dp));
        const double bound = detail::cauchy_bound(dpf.coeffs());
        double peak = 0.0;
        for (double c : dpf.coeffs()) peak = std::max(peak, std::abs(c));
        auto scan = detail::scan_roots(dpf, ddpf, bound, 64 * d, tol, std::sqrt(tol) * peak);
        crit = scan.simple;
        for (double x : scan.touching) {
            out.degenerate_critical = true;
            out.warnings.push_back("DegenerateCritical: p' has a near-multiple root without sign change near x = " +
                                   std::to_string(x));
        }
    }

    // Monotone pieces with their endpoint values; infinite ends carry +-inf.
    const double inf = std::numeric_limits<double>::infinity();
    const double lead = to_double(p.leading());
    const double at_neg_inf = ((d % 2 == 0) == (lead > 0)) ? inf : -inf;
    const double at_pos_inf = lead > 0 ? inf : -inf;

    struct Piece {
        double a, b;
        bool a_critical, b_critical;
    };
    std::vector<Piece> pieces;
    std::vector<double> cuts{-inf};
    cuts.insert(cuts.end(), crit.begin(), crit.end());
    cuts.push_back(inf);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        pieces.push_back({cuts[i], cuts[i + 1], i > 0, i + 2 < cuts.size()});
    if (domain == BranchDomain::unit_interval) {
        std::vector<Piece> clipped;
        for (auto pc : pieces) {
            if (pc.b <= -1.0 || pc.a >= 1.0) continue;
            if (pc.a <= -1.0) pc = {-1.0, pc.b, false, pc.b_critical};
            if (pc.b >= 1.0) pc = {pc.a, 1.0, pc.a_critical, false};
            clipped.push_back(pc);
        }
        pieces = std::move(clipped);
    }

    double coeff_mass = detail::abs_sum(pf.coeffs());
    auto value_at = [&](double x) {
        if (x == -inf) return at_neg_inf;
        if (x == inf) return at_pos_inf;
        return pf(x);
    };
    auto value_margin = [&](double x) {
        return std::max(tol, 16.0 * std::numeric_limits<double>::epsilon() * coeff_mass *
                                 std::pow(std::max(1.0, std::abs(x)), d));
    };
    // Is `v` (the value at endpoint x) at or beyond `level`, deciding near-ties
    // exactly where possible.
    auto reaches = [&](double x, bool critical, double v, int level) {
        const bool beyond = level > 0 ? v >= level : v <= level;
        if (!std::isfinite(v)) return beyond;
        if (std::abs(v - level) > value_margin(x)) return beyond;
        if (!critical) {
            // domain endpoint +-1 is rational: decide exactly
            return level > 0 ? eval(p, Rat(static_cast<long>(x))) >= level : eval(p, Rat(static_cast<long>(x))) <= level;
        }
        if (detail::exact_critical_touch(p, level, x, 1e3 * tol * std::max(1.0, std::abs(x)), tol)) return true;
        out.degenerate_critical = true;
        out.warnings.push_back("DegenerateCritical: critical value within tolerance of " + std::to_string(level) +
                               " at x = " + std::to_string(x));
        return true;
    };

    const double far = 1.0 + (detail::abs_sum(pf.coeffs()) + 1.0) / std::abs(lead);
    std::vector<BranchInterval> found;
    for (const auto& pc : pieces) {
        const double va = value_at(pc.a), vb = value_at(pc.b);
        const bool increasing = vb > va;
        const double lo_end = increasing ? pc.a : pc.b;  // endpoint carrying the low value
        const double hi_end = increasing ? pc.b : pc.a;
        const bool lo_crit = increasing ? pc.a_critical : pc.b_critical;
        const bool hi_crit = increasing ? pc.b_critical : pc.a_critical;
        const double vlo = std::min(va, vb), vhi = std::max(va, vb);
        if (!reaches(lo_end, lo_crit, vlo, -1) || !reaches(hi_end, hi_crit, vhi, 1)) continue;

        const double a = std::isfinite(pc.a) ? pc.a : -far;
        const double b = std::isfinite(pc.b) ? pc.b : far;
        auto solve_level = [&](int level) {
            auto g = [&](double x) { return pf(x) - level; };
            const double ga = g(a), gb = g(b);
            // a level reached at a critical endpoint is a multiple root of p - level;
            // the critical point is far better conditioned than bisecting there
            if (std::abs(ga) <= value_margin(a)) return a;
            if (std::abs(gb) <= value_margin(b)) return b;
            if ((ga < 0) == (gb < 0)) return std::abs(ga) < std::abs(gb) ? a : b;  // touching endpoint
            return detail::bisect_root(g, a, b, tol);
        };
        const double x_low = solve_level(-1), x_high = solve_level(1);
        found.push_back({0, std::min(x_low, x_high), std::max(x_low, x_high),
                         increasing ? Direction::increasing : Direction::decreasing});
    }
    std::sort(found.begin(), found.end(), [](const auto& l, const auto& r) { return l.lo > r.lo; });
    for (std::size_t i = 0; i < found.size(); ++i) found[i].index = static_cast<int>(i) + 1;
    out.intervals = std::move(found);
    out.count = static_cast<int>(out.intervals.size());
    return out;
}

inline int branch_count(const UniPoly& p, double tol = 1e-12, BranchDomain domain = BranchDomain::real_line) {
    return full_branch_intervals(p, tol, domain).count;
}

inline nlohmann::json to_json(const BranchSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& iv : s.intervals)
        arr.push_back({{"k", iv.index}, {"lo", iv.lo}, {"hi", iv.hi}, {"dir", iv.direction == Direction::increasing ? "+" : "-"}});
    nlohmann::json j{{"count", s.count}, {"intervals", arr}};
    if (s.degenerate_critical) {
        j["degenerate_critical"] = true;
        j["warnings"] = s.warnings;
    }
    return j;
}

} // namespace cyclerep
