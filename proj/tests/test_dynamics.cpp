#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cyclerep/dynamics.hpp"

using namespace cyclerep;

namespace {

constexpr double kPi = M_PI;

// Radial cubic in polar form: r' = r (rho^2 - r^2), theta' = -1.
double radial_oracle(double rho, double r0, double t) {
    const double rho2 = rho * rho;
    return rho / std::sqrt(1.0 - (1.0 - rho2 / (r0 * r0)) * std::exp(-2.0 * rho2 * t));
}

State radial_state(double rho, State z0, double t) {
    const double r0 = norm(z0), th0 = std::atan2(z0[1], z0[0]);
    const double r = radial_oracle(rho, r0, t);
    return {r * std::cos(th0 - t), r * std::sin(th0 - t)};
}

FieldF64 rotation() { return FieldF64(VectorField2{BiPoly::v(), -BiPoly::u()}); }

CycleConfig serial() {
    CycleConfig c;
    c.parallel = false;
    return c;
}

LimitCycleRecord base_cycle(const Rat& rho) {
    return find_cycle(FieldF64(radial_cubic(rho)), positive_x_axis(), 1.1 * to_double(rho), serial());
}

} // namespace

TEST(Integrate, RotationClosesAfterOneTurn) {
    const Trajectory tr = integrate(rotation(), {1.0, 0.0}, 2 * kPi, 1e-10);
    const State z = tr.final_state();
    EXPECT_NEAR(z[0], 1.0, 1e-8);
    EXPECT_NEAR(z[1], 0.0, 1e-8);
}

TEST(Integrate, RadialCubicMatchesClosedForm) {
    const FieldF64 f(radial_cubic(Rat(1, 2)));
    const Trajectory on_cycle = integrate(f, {0.5, 0.0}, 2 * kPi, 1e-10);
    EXPECT_NEAR(on_cycle.final_state()[0], 0.5, 1e-8);
    EXPECT_NEAR(on_cycle.final_state()[1], 0.0, 1e-8);

    const Trajectory outside = integrate(f, {0.9, 0.0}, 20.0, 1e-10);
    EXPECT_NEAR(norm(outside.final_state()), 0.5, 1e-4);
    for (double t : {0.37, 1.0, 3.3, 7.77, 12.5, 20.0}) {
        const State want = radial_state(0.5, {0.9, 0.0}, t);
        const State got = outside.at(t);  // dense output between steps
        EXPECT_NEAR(got[0], want[0], 1e-8) << t;
        EXPECT_NEAR(got[1], want[1], 1e-8) << t;
    }
}

TEST(Integrate, BlowUpIsReported) {
    const FieldF64 f(VectorField2{BiPoly::monomial(Rat(1), 2, 0), BiPoly()});  // x' = x^2 blows up at t = 1
    EXPECT_THROW(integrate(f, {1.0, 0.0}, 2.0, 1e-10), IntegrationFailure);
    try {
        integrate(f, {1.0, 0.0}, 2.0, 1e-10);
    } catch (const IntegrationFailure& e) {
        EXPECT_LE(e.time(), 1.0);
        EXPECT_GT(e.last_state()[0], 1e3);
    }
}

TEST(Poincare, ReturnOnTheCycle) {
    const FieldF64 f(radial_cubic(Rat(1, 2)));
    const ReturnResult r = poincare_return(f, positive_x_axis(), 0.5, serial());
    EXPECT_NEAR(r.s, 0.5, 1e-9);
    EXPECT_NEAR(r.flight_time, 2 * kPi, 1e-6);
}

TEST(Poincare, CentreIsIdentity) {
    const ReturnResult r = poincare_return(rotation(), positive_x_axis(), 0.7, serial());
    EXPECT_NEAR(r.s, 0.7, 1e-9);
}

TEST(Poincare, ContractionTowardTheCycle) {
    const FieldF64 f(radial_cubic(Rat(1, 2)));
    const ReturnResult r = poincare_return(f, positive_x_axis(), 0.8, serial());
    EXPECT_GT(r.s, 0.5);
    EXPECT_LT(r.s, 0.8);
    EXPECT_NEAR(r.s, radial_oracle(0.5, 0.8, 2 * kPi), 1e-8);
    EXPECT_NEAR(r.flight_time, 2 * kPi, 1e-8);
}

TEST(Poincare, Errors) {
    CycleConfig cfg = serial();
    cfg.t_max = 5.0;
    const FieldF64 up(VectorField2{BiPoly(), BiPoly::constant(Rat(1))});
    EXPECT_THROW(poincare_return(up, positive_x_axis(), 0.5, cfg), NoReturn);
    const FieldF64 along(VectorField2{BiPoly::constant(Rat(1)), BiPoly()});
    EXPECT_THROW(poincare_return(along, positive_x_axis(), 0.5, cfg), DegenerateCrossing);
    EXPECT_THROW(poincare_return(up, positive_x_axis(), 1.5, cfg), InvalidParameter);
}

TEST(FindCycle, RadialCubicHalf) {
    const LimitCycleRecord c = base_cycle(Rat(1, 2));
    EXPECT_NEAR(norm(c.anchor), 0.5, 1e-8);
    EXPECT_NEAR(c.period, 2 * kPi, 1e-6);
    EXPECT_NEAR(c.multiplier, std::exp(-kPi), 1e-4);
    EXPECT_TRUE(c.certified);
    EXPECT_LE(c.residual, 1e-9);
}

TEST(FindCycle, RadialCubicPointEight) {
    const LimitCycleRecord c = base_cycle(Rat(4, 5));
    EXPECT_NEAR(norm(c.anchor), 0.8, 1e-8);
    EXPECT_NEAR(c.multiplier, std::exp(-4 * kPi * 0.64), 1e-4);
    EXPECT_TRUE(c.certified);
}

TEST(FindCycle, CentreIsNotCertified) {
    const LimitCycleRecord c = find_cycle(rotation(), positive_x_axis(), 0.5, serial());
    EXPECT_NEAR(c.multiplier, 1.0, 1e-6);
    EXPECT_FALSE(c.certified);
}

TEST(ImplicitCurve, Forms) {
    const UniPoly t2 = chebyshev(2);
    EXPECT_EQ(implicit_lift_curve(2, Rat(1, 2)),
              BiPoly::in_u(t2 * t2) + BiPoly::in_v(t2 * t2) - BiPoly::constant(Rat(1, 4)));
    const BiPoly c3 = implicit_lift_curve(3, Rat(1, 2));
    EXPECT_EQ(c3.max_du(), 6);
    EXPECT_EQ(c3.max_dv(), 6);
    EXPECT_NEAR(eval_f64(c3, branch_inverse(3, 1, 0.5), branch_inverse(3, 2, 0.0)), 0.0, 1e-10);
    EXPECT_THROW(implicit_lift_curve(1, Rat(1, 2)), InvalidParameter);
    EXPECT_THROW(implicit_lift_curve(3, Rat(1)), InvalidParameter);
}

class Lift : public ::testing::TestWithParam<int> {};

TEST_P(Lift, OneCertifiedCycleInEveryRectangle) {
    const int m = GetParam();
    const Rat rho(1, 2);
    const LimitCycleRecord base = base_cycle(rho);
    const PullbackResult Y = build_pullback(radial_cubic(rho), chebyshev(m));
    const CycleConfig cfg;
    const auto recs = lift_cycles(Y, base, m, cfg);
    ASSERT_EQ(static_cast<int>(recs.size()), m * m);

    const BiPoly curve = implicit_lift_curve(m, rho);
    std::set<std::pair<int, int>> seen;
    double product_check = 0.0;
    for (const auto& r : recs) {
        ASSERT_TRUE(r.rect.has_value());
        seen.insert({r.rect->i, r.rect->j});
        EXPECT_TRUE(r.rect->contains(r.anchor));
        EXPECT_GE(r.rect->boundary_distance(r.anchor), cfg.margin);
        EXPECT_TRUE(r.certified);
        EXPECT_GT(std::abs(r.multiplier - 1.0), cfg.eps_hyp);
        EXPECT_LE(std::abs(eval_f64(curve, r.anchor[0], r.anchor[1])), 1e-6);
        EXPECT_EQ(r.orientation_reversed, lambda_sign(r.rect->i, r.rect->j) < 0);
        const double oracle = std::exp((r.orientation_reversed ? 4.0 : -4.0) * kPi * 0.25);
        EXPECT_NEAR(r.multiplier / oracle, 1.0, 1e-3) << r.rect->i << "," << r.rect->j;
        if (r.orientation_reversed) product_check = std::max(product_check, std::abs(r.multiplier * base.multiplier - 1.0));
    }
    EXPECT_EQ(static_cast<int>(seen.size()), m * m);
    EXPECT_LE(product_check, 5e-3);
}

INSTANTIATE_TEST_SUITE_P(Covers, Lift, ::testing::Values(2, 3, 4));

TEST(Lift, DeterministicAcrossSchedules) {
    const Rat rho(1, 2);
    const LimitCycleRecord base = base_cycle(rho);
    const PullbackResult Y = build_pullback(radial_cubic(rho), chebyshev(3));
    CycleConfig par;
    const auto a = lift_cycles(Y, base, 3, par);
    const auto b = lift_cycles(Y, base, 3, serial());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].anchor, b[k].anchor);
        EXPECT_EQ(a[k].period, b[k].period);
        EXPECT_EQ(a[k].multiplier, b[k].multiplier);
        EXPECT_EQ(a[k].rect->i, b[k].rect->i);
        EXPECT_EQ(a[k].rect->j, b[k].rect->j);
    }
}

TEST(Lift, Preconditions) {
    const Rat rho(1, 2);
    const LimitCycleRecord base = base_cycle(rho);
    const PullbackResult Y = build_pullback(radial_cubic(rho), chebyshev(3));
    EXPECT_THROW(lift_cycles(Y, base, 2), InvalidParameter);
    EXPECT_THROW(lift_cycles(Y, base, 1), InvalidParameter);
    LimitCycleRecord weak = base;
    weak.certified = false;
    EXPECT_THROW(lift_cycles(Y, weak, 3), InvalidParameter);
}

TEST(Lift, FailuresListRectangles) {
    const Rat rho(1, 2);
    const LimitCycleRecord base = base_cycle(rho);
    const PullbackResult Y = build_pullback(radial_cubic(rho), chebyshev(2));
    CycleConfig cfg = serial();
    cfg.margin = 0.4;  // wider than any rectangle allows
    try {
        lift_cycles(Y, base, 2, cfg);
        FAIL() << "expected PartialLiftError";
    } catch (const PartialLiftError& e) {
        EXPECT_EQ(e.failed().size(), 4u);
        EXPECT_TRUE(e.found().empty());
        EXPECT_NE(std::string(e.what()).find("(1,1)"), std::string::npos);
    }
}

// Phi maps trajectories of the pullback onto trajectories of the source, with
// time running at rate lambda. Follow the image of a lifted orbit and compare
// its radius against the closed-form source flow, parametrised by the angle
// swept (source time equals minus the unwrapped angle).
TEST(Lift, TimeChangeInvariance) {
    const double rho = 0.5;
    const int m = 3;
    const PullbackResult Y = build_pullback(radial_cubic(Rat(1, 2)), chebyshev(m));
    const FieldF64 f(Y.field);
    const UniPolyF64 t(chebyshev(m));
    const BranchSet b = cheb_branches(m);
    for (auto [i, j] : {std::pair{2, 2}, std::pair{1, 2}, std::pair{3, 1}}) {
        const BranchRectangle rect{i, j, b.intervals[static_cast<std::size_t>(i - 1)], b.intervals[static_cast<std::size_t>(j - 1)]};
        const State w0{branch_inverse(m, i, 0.3), branch_inverse(m, j, 0.2)};
        const Trajectory tr = integrate(f, w0, 0.02, 1e-10);
        const State z0{t(w0[0]), t(w0[1])};
        const double r0 = norm(z0);
        double phi_prev = std::atan2(z0[1], z0[0]), unwrapped = 0.0, worst = 0.0;
        for (int k = 1; k <= 200; ++k) {
            const State w = tr.at(tr.t_end() * k / 200);
            ASSERT_TRUE(rect.contains(w));
            const State z{t(w[0]), t(w[1])};
            const double phi = std::atan2(z[1], z[0]);
            double d = phi - phi_prev;
            if (d > kPi) d -= 2 * kPi;
            if (d < -kPi) d += 2 * kPi;
            unwrapped += d;
            phi_prev = phi;
            worst = std::max(worst, std::abs(norm(z) - radial_oracle(rho, r0, -unwrapped)));
        }
        EXPECT_LE(worst, 1e-5) << i << "," << j;
        // the swept angle has the sign of -lambda
        EXPECT_EQ(unwrapped < 0, lambda_sign(i, j) > 0) << i << "," << j;
    }
}

TEST(Section, Geometry) {
    const Section s({1.0, 1.0}, {0.0, 2.0}, 3.0);
    EXPECT_EQ(s.direction, (State{0.0, 1.0}));
    EXPECT_EQ(s.point(2.0), (State{1.0, 3.0}));
    EXPECT_DOUBLE_EQ(s.param({1.5, 2.0}), 1.0);
    EXPECT_DOUBLE_EQ(s.offset({1.5, 2.0}), -0.5);
    EXPECT_THROW(Section({0, 0}, {0, 0}, 1.0), InvalidParameter);
}
