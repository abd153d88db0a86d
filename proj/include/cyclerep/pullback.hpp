#pragma once

// Pullback vector fields and the exact identities that tie them to the source.
//
// Separable pullback by Phi(u, v) = (p(u), p(v)):
//     u' = p'(v) P(p(u), p(v)),   v' = p'(u) Q(p(u), p(v)),
// which satisfies DPhi . Y = p'(u) p'(v) . X o Phi. The general form
// Y = adj(DPhi) X(Phi) covers non-separable maps.

#include <array>
#include <utility>

#include <json.hpp>

#include "cyclerep/errors.hpp"
#include "cyclerep/poly_json.hpp"
#include "cyclerep/polynomial.hpp"

namespace cyclerep {

/// z = M w + b with invertible M.
class AffineMap2 {
public:
    using Matrix = std::array<std::array<Rat, 2>, 2>;
    using Vector = std::array<Rat, 2>;

    AffineMap2(Matrix m, Vector b) : m_(std::move(m)), b_(std::move(b)) {
        if (det() == 0) throw InvalidParameter("affine map matrix is singular");
    }
    static AffineMap2 identity() { return AffineMap2({{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}}, {Rat(0), Rat(0)}); }
    static AffineMap2 scaling(const Rat& s, Vector offset = {Rat(0), Rat(0)}) {
        return AffineMap2({{{s, Rat(0)}, {Rat(0), s}}}, std::move(offset));
    }

    const Matrix& matrix() const { return m_; }
    const Vector& offset() const { return b_; }
    Rat det() const { return m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]; }

    Matrix inverse_matrix() const {
        const Rat d = det();
        return {{{m_[1][1] / d, -m_[0][1] / d}, {-m_[1][0] / d, m_[0][0] / d}}};
    }
    AffineMap2 inverse() const {
        Matrix mi = inverse_matrix();
        Vector bi{-(mi[0][0] * b_[0] + mi[0][1] * b_[1]), -(mi[1][0] * b_[0] + mi[1][1] * b_[1])};
        return AffineMap2(mi, bi);
    }
    Vector apply(const Vector& w) const {
        return {m_[0][0] * w[0] + m_[0][1] * w[1] + b_[0], m_[1][0] * w[0] + m_[1][1] * w[1] + b_[1]};
    }
    std::array<double, 2> apply(const std::array<double, 2>& w) const {
        auto f = [](const Rat& r) { return to_double(r); };
        return {f(m_[0][0]) * w[0] + f(m_[0][1]) * w[1] + f(b_[0]), f(m_[1][0]) * w[0] + f(m_[1][1]) * w[1] + f(b_[1])};
    }

    friend bool operator==(const AffineMap2&, const AffineMap2&) = default;

private:
    Matrix m_;
    Vector b_;
};

/// Field in w-coordinates where z = A(w): w' = M^{-1} X(M w + b).
inline VectorField2 affine_transform(const VectorField2& X, const AffineMap2& A) {
    const auto& m = A.matrix();
    const auto& b = A.offset();
    const BiPoly x_sub = m[0][0] * BiPoly::u() + m[0][1] * BiPoly::v() + BiPoly::constant(b[0]);
    const BiPoly y_sub = m[1][0] * BiPoly::u() + m[1][1] * BiPoly::v() + BiPoly::constant(b[1]);
    const BiPoly P = compose(X.p_comp, x_sub, y_sub);
    const BiPoly Q = compose(X.q_comp, x_sub, y_sub);
    const auto mi = A.inverse_matrix();
    return {mi[0][0] * P + mi[0][1] * Q, mi[1][0] * P + mi[1][1] * Q};
}

struct Box {
    Rat x_lo, x_hi, y_lo, y_hi;
};

struct Normalized {
    VectorField2 field;  // in w-coordinates
    AffineMap2 map;      // z = map(w); map.inverse() sends the box into (-rho, rho)^2
};

/// Uniform diagonal scaling plus translation placing `bbox` inside
/// (-rho, rho)^2 (at half-width rho/2). A box already inside the closed
/// square [-rho, rho]^2 yields the identity.
inline Normalized normalize_into_box(const VectorField2& X, const Box& bbox, const Rat& rho = Rat(1, 2)) {
    if (!(rho > 0 && rho < 1)) throw InvalidParameter("rho must lie in (0, 1)");
    if (!(bbox.x_hi > bbox.x_lo) || !(bbox.y_hi > bbox.y_lo)) throw InvalidParameter("degenerate bounding box");
    if (bbox.x_lo >= -rho && bbox.x_hi <= rho && bbox.y_lo >= -rho && bbox.y_hi <= rho)
        return {X, AffineMap2::identity()};
    const Rat half_w = (bbox.x_hi - bbox.x_lo) / 2, half_h = (bbox.y_hi - bbox.y_lo) / 2;
    const Rat scale = 2 * (half_w > half_h ? half_w : half_h) / rho;
    AffineMap2 map = AffineMap2::scaling(scale, {(bbox.x_lo + bbox.x_hi) / 2, (bbox.y_lo + bbox.y_hi) / 2});
    return {affine_transform(X, map), std::move(map)};
}

struct PullbackResult {
    VectorField2 field;  // Y
    UniPoly cover_poly;  // p
    int source_degree = 0;
    int cover_degree = 0;
    BiPoly lambda;  // p'(u) p'(v)
};

inline PullbackResult build_pullback(const VectorField2& X, const UniPoly& p) {
    if (p.degree() < 2) throw InvalidParameter("pullback cover must have degree >= 2");
    if (!X.degree().is_finite()) throw InvalidParameter("source field is identically zero");
    const UniPoly dp = derivative(p);
    const BiPoly dp_u = BiPoly::in_u(dp), dp_v = BiPoly::in_v(dp);
    PullbackResult r;
    r.field = {dp_v * compose_separable(X.p_comp, p), dp_u * compose_separable(X.q_comp, p)};
    r.cover_poly = p;
    r.source_degree = X.degree().value();
    r.cover_degree = p.degree().value();
    r.lambda = dp_u * dp_v;
    return r;
}

/// Both residuals of DPhi . Y - lambda . X o Phi vanish identically.
inline bool verify_conjugacy(const PullbackResult& r, const VectorField2& X) {
    const UniPoly dp = derivative(r.cover_poly);
    const BiPoly dp_u = BiPoly::in_u(dp), dp_v = BiPoly::in_v(dp);
    const BiPoly res_u = dp_u * r.field.p_comp - r.lambda * compose_separable(X.p_comp, r.cover_poly);
    const BiPoly res_v = dp_v * r.field.q_comp - r.lambda * compose_separable(X.q_comp, r.cover_poly);
    return res_u.is_zero() && res_v.is_zero();
}

/// deg(Y) == m deg(X) + (m - 1).
inline bool check_exact_degree(const PullbackResult& r, const VectorField2& X) {
    if (X.degree() < 1) throw InvalidParameter("check_exact_degree requires deg(X) >= 1");
    const int m = r.cover_degree;
    return r.field.degree() == m * X.degree().value() + (m - 1);
}

/// Y = adj(DPhi) X(Phi) for Phi = (p, q).
inline VectorField2 build_adjugate_pullback(const VectorField2& X, const BiPoly& p, const BiPoly& q) {
    if (p.total_degree() < 1 || q.total_degree() < 1) throw InvalidParameter("covering components must be nonconstant");
    const BiPoly P = compose(X.p_comp, p, q), Q = compose(X.q_comp, p, q);
    const BiPoly pu = partial_u(p), pv = partial_v(p), qu = partial_u(q), qv = partial_v(q);
    return {qv * P - pv * Q, -(qu * P) + pu * Q};
}

/// DPhi . Y == det(DPhi) . X o Phi, exactly.
inline bool verify_conjugacy_adjugate(const VectorField2& Y, const VectorField2& X, const BiPoly& p, const BiPoly& q) {
    const BiPoly pu = partial_u(p), pv = partial_v(p), qu = partial_u(q), qv = partial_v(q);
    const BiPoly jac = pu * qv - pv * qu;
    const BiPoly res_u = pu * Y.p_comp + pv * Y.q_comp - jac * compose(X.p_comp, p, q);
    const BiPoly res_v = qu * Y.p_comp + qv * Y.q_comp - jac * compose(X.q_comp, p, q);
    return res_u.is_zero() && res_v.is_zero();
}

inline nlohmann::json to_json(const PullbackResult& r) {
    return {{"m", r.cover_degree},
            {"d", r.source_degree},
            {"deg_Y", r.field.degree().is_finite() ? nlohmann::json(r.field.degree().value()) : nlohmann::json(nullptr)},
            {"cover_poly", to_json(r.cover_poly)},
            {"lambda", to_json(r.lambda)},
            {"field", to_json(r.field)}};
}

inline PullbackResult pullback_from_json(const nlohmann::json& j) {
    for (const char* key : {"m", "d", "cover_poly", "lambda", "field"})
        if (!j.contains(key)) throw ParseError(std::string("PullbackResult missing \"") + key + "\"");
    PullbackResult r;
    r.cover_degree = j["m"].get<int>();
    r.source_degree = j["d"].get<int>();
    r.cover_poly = uni_from_json(j["cover_poly"]);
    r.lambda = bi_from_json(j["lambda"]);
    r.field = field_from_json(j["field"]);
    return r;
}

} // namespace cyclerep
