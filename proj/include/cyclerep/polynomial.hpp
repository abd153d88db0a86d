#pragma once

// Exact univariate and bivariate polynomials over the rationals.
//
// UniPoly is dense (index = power, no trailing zeros). BiPoly is sparse, a
// map from exponent pairs to nonzero coefficients. Both are immutable values
// once built: every operation returns a new polynomial.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cyclerep/errors.hpp"
#include "cyclerep/rational.hpp"

namespace cyclerep {

/// Polynomial degree with a distinct value for the zero polynomial.
/// Ordering places the sentinel below every finite degree.
class Degree {
public:
    constexpr explicit Degree(int d) : value_(d), finite_(true) {
        if (d < 0) throw InvalidParameter("finite degree must be non-negative");
    }
    static constexpr Degree neg_infinity() { return Degree(); }

    constexpr bool is_finite() const { return finite_; }
    constexpr int value() const {
        if (!finite_) throw OutOfRange("degree of the zero polynomial is -infinity");
        return value_;
    }

    friend constexpr bool operator==(const Degree& a, const Degree& b) {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }
    friend constexpr bool operator==(const Degree& a, int b) { return a.finite_ && a.value_ == b; }
    friend constexpr std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
        if (!a.finite_ || !b.finite_) return a.finite_ <=> b.finite_;
        return a.value_ <=> b.value_;
    }
    friend constexpr std::strong_ordering operator<=>(const Degree& a, int b) {
        if (!a.finite_) return std::strong_ordering::less;
        return a.value_ <=> b;
    }

    std::string str() const { return finite_ ? std::to_string(value_) : std::string("-inf"); }
    friend std::ostream& operator<<(std::ostream& os, const Degree& d) { return os << d.str(); }

private:
    constexpr Degree() : value_(0), finite_(false) {}
    int value_;
    bool finite_;
};

inline Degree max(const Degree& a, const Degree& b) { return a < b ? b : a; }

// ---------------------------------------------------------------------------
// UniPoly

class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rat> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
    UniPoly(std::initializer_list<long> ints) {
        coeffs_.reserve(ints.size());
        for (long c : ints) coeffs_.emplace_back(c);
        trim();
    }

    static UniPoly constant(const Rat& c) { return UniPoly(std::vector<Rat>{c}); }
    static UniPoly monomial(const Rat& c, int power) {
        if (power < 0) throw InvalidParameter("negative power");
        std::vector<Rat> cs(static_cast<std::size_t>(power) + 1);
        cs.back() = c;
        return UniPoly(std::move(cs));
    }
    static UniPoly identity() { return monomial(Rat(1), 1); }

    const std::vector<Rat>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    Degree degree() const {
        return is_zero() ? Degree::neg_infinity() : Degree(static_cast<int>(coeffs_.size()) - 1);
    }
    /// Coefficient of x^power, zero past the end.
    Rat coeff(int power) const {
        if (power < 0 || static_cast<std::size_t>(power) >= coeffs_.size()) return Rat(0);
        return coeffs_[static_cast<std::size_t>(power)];
    }
    const Rat& leading() const {
        if (is_zero()) throw OutOfRange("zero polynomial has no leading coefficient");
        return coeffs_.back();
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<Rat> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
        return UniPoly(std::move(out));
    }
    friend UniPoly operator-(const UniPoly& a) {
        std::vector<Rat> out(a.coeffs_);
        for (auto& c : out) c = -c;
        return UniPoly(std::move(out));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rat> out(a.coeffs_.size() + b.coeffs_.size() - 1);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return UniPoly(std::move(out));
    }
    friend UniPoly operator*(const Rat& s, const UniPoly& a) {
        std::vector<Rat> out(a.coeffs_);
        for (auto& c : out) c *= s;
        return UniPoly(std::move(out));
    }
    friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    std::vector<Rat> coeffs_;
};

inline UniPoly scalar_mul(const Rat& s, const UniPoly& p) { return s * p; }

inline UniPoly pow(const UniPoly& p, int k) {
    if (k < 0) throw InvalidParameter("negative exponent");
    UniPoly out = UniPoly::constant(Rat(1));
    for (int i = 0; i < k; ++i) out = out * p;
    return out;
}

/// T_m by the three-term recurrence T_{k+1} = 2x T_k - T_{k-1}.
inline UniPoly chebyshev(int m) {
    if (m < 0) throw InvalidParameter("Chebyshev index must be non-negative");
    UniPoly prev = UniPoly::constant(Rat(1));
    if (m == 0) return prev;
    UniPoly cur = UniPoly::identity();
    const UniPoly two_x = UniPoly::monomial(Rat(2), 1);
    for (int k = 1; k < m; ++k) {
        UniPoly next = two_x * cur - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

inline UniPoly derivative(const UniPoly& p) {
    if (p.coeffs().size() <= 1) return {};
    std::vector<Rat> out(p.coeffs().size() - 1);
    for (std::size_t i = 1; i < p.coeffs().size(); ++i) out[i - 1] = p.coeffs()[i] * Rat(static_cast<long>(i));
    return UniPoly(std::move(out));
}

inline Rat eval(const UniPoly& p, const Rat& x) {
    Rat acc(0);
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// outer(inner(x)), by Horner over exact polynomials.
inline UniPoly compose(const UniPoly& outer, const UniPoly& inner) {
    UniPoly acc;
    for (auto it = outer.coeffs().rbegin(); it != outer.coeffs().rend(); ++it)
        acc = acc * inner + UniPoly::constant(*it);
    return acc;
}

/// Quotient and remainder of exact division; divisor must be nonzero.
inline std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw InvalidParameter("division by the zero polynomial");
    std::vector<Rat> rem(a.coeffs());
    const std::size_t db = b.coeffs().size() - 1;
    if (rem.size() <= db) return {UniPoly(), a};
    std::vector<Rat> quot(rem.size() - db);
    for (std::size_t k = rem.size(); k-- > db;) {
        Rat factor = rem[k] / b.leading();
        quot[k - db] = factor;
        if (factor == 0) continue;
        for (std::size_t j = 0; j <= db; ++j) rem[k - db + j] -= factor * b.coeffs()[j];
    }
    rem.resize(db);
    return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

/// Monic greatest common divisor (zero if both inputs are zero).
inline UniPoly gcd(UniPoly a, UniPoly b) {
    while (!b.is_zero()) {
        UniPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return (Rat(1) / a.leading()) * a;
}

/// Float image of a UniPoly for repeated evaluation.
class UniPolyF64 {
public:
    UniPolyF64() = default;
    explicit UniPolyF64(const UniPoly& p) {
        coeffs_.reserve(p.coeffs().size());
        for (const auto& c : p.coeffs()) coeffs_.push_back(to_double(c));
    }
    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    const std::vector<double>& coeffs() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

inline double eval_f64(const UniPoly& p, double x) { return UniPolyF64(p)(x); }

// ---------------------------------------------------------------------------
// BiPoly

struct Exponent {
    int du = 0;
    int dv = 0;
    friend auto operator<=>(const Exponent&, const Exponent&) = default;
};

class BiPoly {
public:
    using TermMap = std::map<Exponent, Rat>;

    BiPoly() = default;
    explicit BiPoly(TermMap terms) : terms_(std::move(terms)) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first.du < 0 || it->first.dv < 0) throw InvalidParameter("negative exponent in BiPoly");
            it = (it->second == 0) ? terms_.erase(it) : std::next(it);
        }
    }

    static BiPoly constant(const Rat& c) { return monomial(c, 0, 0); }
    static BiPoly monomial(const Rat& c, int du, int dv) { return BiPoly(TermMap{{{du, dv}, c}}); }
    static BiPoly u() { return monomial(Rat(1), 1, 0); }
    static BiPoly v() { return monomial(Rat(1), 0, 1); }
    /// Embeds p as a polynomial in u alone.
    static BiPoly in_u(const UniPoly& p) {
        TermMap t;
        for (std::size_t i = 0; i < p.coeffs().size(); ++i) t.emplace(Exponent{static_cast<int>(i), 0}, p.coeffs()[i]);
        return BiPoly(std::move(t));
    }
    static BiPoly in_v(const UniPoly& p) {
        TermMap t;
        for (std::size_t i = 0; i < p.coeffs().size(); ++i) t.emplace(Exponent{0, static_cast<int>(i)}, p.coeffs()[i]);
        return BiPoly(std::move(t));
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rat coeff(int du, int dv) const {
        auto it = terms_.find({du, dv});
        return it == terms_.end() ? Rat(0) : it->second;
    }

    Degree total_degree() const {
        if (is_zero()) return Degree::neg_infinity();
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.du + e.dv);
        return Degree(d);
    }
    int max_du() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.du);
        return d;
    }
    int max_dv() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.dv);
        return d;
    }

    /// Terms of total degree exactly d.
    BiPoly homogeneous_part(int d) const {
        TermMap t;
        for (const auto& [e, c] : terms_)
            if (e.du + e.dv == d) t.emplace(e, c);
        return BiPoly(std::move(t));
    }

    friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
        TermMap t(a.terms_);
        for (const auto& [e, c] : b.terms_) t[e] += c;
        return BiPoly(std::move(t));
    }
    friend BiPoly operator-(const BiPoly& a) {
        TermMap t(a.terms_);
        for (auto& [e, c] : t) c = -c;
        return BiPoly(std::move(t));
    }
    friend BiPoly operator-(const BiPoly& a, const BiPoly& b) {
        TermMap t(a.terms_);
        for (const auto& [e, c] : b.terms_) t[e] -= c;
        return BiPoly(std::move(t));
    }
    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        TermMap t;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) t[{ea.du + eb.du, ea.dv + eb.dv}] += ca * cb;
        return BiPoly(std::move(t));
    }
    friend BiPoly operator*(const Rat& s, const BiPoly& a) {
        if (s == 0) return {};
        TermMap t(a.terms_);
        for (auto& [e, c] : t) c *= s;
        return BiPoly(std::move(t));
    }
    friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.terms_ == b.terms_; }

private:
    TermMap terms_;
};

inline Degree total_degree(const BiPoly& f) { return f.total_degree(); }
inline BiPoly scalar_mul(const Rat& s, const BiPoly& f) { return s * f; }

inline BiPoly pow(const BiPoly& f, int k) {
    if (k < 0) throw InvalidParameter("negative exponent");
    BiPoly out = BiPoly::constant(Rat(1));
    for (int i = 0; i < k; ++i) out = out * f;
    return out;
}

inline BiPoly partial_u(const BiPoly& f) {
    BiPoly::TermMap t;
    for (const auto& [e, c] : f.terms())
        if (e.du > 0) t.emplace(Exponent{e.du - 1, e.dv}, c * Rat(e.du));
    return BiPoly(std::move(t));
}

inline BiPoly partial_v(const BiPoly& f) {
    BiPoly::TermMap t;
    for (const auto& [e, c] : f.terms())
        if (e.dv > 0) t.emplace(Exponent{e.du, e.dv - 1}, c * Rat(e.dv));
    return BiPoly(std::move(t));
}

inline Rat eval(const BiPoly& f, const Rat& u, const Rat& v) {
    std::vector<Rat> upow{Rat(1)}, vpow{Rat(1)};
    for (int k = 0; k < f.max_du(); ++k) upow.push_back(upow.back() * u);
    for (int k = 0; k < f.max_dv(); ++k) vpow.push_back(vpow.back() * v);
    Rat acc(0);
    for (const auto& [e, c] : f.terms()) acc += c * upow[static_cast<std::size_t>(e.du)] * vpow[static_cast<std::size_t>(e.dv)];
    return acc;
}

/// Dense float image of a BiPoly, evaluated by nested Horner.
class BiPolyF64 {
public:
    BiPolyF64() = default;
    explicit BiPolyF64(const BiPoly& f) : nu_(f.is_zero() ? 0 : f.max_du() + 1), nv_(f.is_zero() ? 0 : f.max_dv() + 1) {
        grid_.assign(static_cast<std::size_t>(nu_ * nv_), 0.0);
        for (const auto& [e, c] : f.terms()) grid_[static_cast<std::size_t>(e.du * nv_ + e.dv)] = to_double(c);
    }
    double operator()(double u, double v) const {
        double acc = 0.0;
        for (int i = nu_ - 1; i >= 0; --i) {
            const double* row = grid_.data() + static_cast<std::ptrdiff_t>(i) * nv_;
            double inner = 0.0;
            for (int j = nv_ - 1; j >= 0; --j) inner = inner * v + row[j];
            acc = acc * u + inner;
        }
        return acc;
    }

private:
    int nu_ = 0;
    int nv_ = 0;
    std::vector<double> grid_;
};

inline double eval_f64(const BiPoly& f, double u, double v) { return BiPolyF64(f)(u, v); }

/// P(pu(u), pv(v)): substitute x <- pu(u), y <- pv(v).
inline BiPoly compose_separable(const BiPoly& P, const UniPoly& pu, const UniPoly& pv) {
    if (P.is_zero()) return {};
    std::vector<UniPoly> upow{UniPoly::constant(Rat(1))}, vpow{UniPoly::constant(Rat(1))};
    for (int k = 0; k < P.max_du(); ++k) upow.push_back(upow.back() * pu);
    for (int k = 0; k < P.max_dv(); ++k) vpow.push_back(vpow.back() * pv);

    const std::size_t nu = std::max<std::size_t>(1, upow.back().coeffs().size());
    const std::size_t nv = std::max<std::size_t>(1, vpow.back().coeffs().size());
    std::vector<Rat> acc(nu * nv);
    for (const auto& [e, c] : P.terms()) {
        const auto& a = upow[static_cast<std::size_t>(e.du)].coeffs();
        const auto& b = vpow[static_cast<std::size_t>(e.dv)].coeffs();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            const Rat ca = c * a[i];
            for (std::size_t j = 0; j < b.size(); ++j)
                if (b[j] != 0) acc[i * nv + j] += ca * b[j];
        }
    }
    BiPoly::TermMap t;
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            if (acc[i * nv + j] != 0) t.emplace(Exponent{static_cast<int>(i), static_cast<int>(j)}, std::move(acc[i * nv + j]));
    return BiPoly(std::move(t));
}

inline BiPoly compose_separable(const BiPoly& P, const UniPoly& p) { return compose_separable(P, p, p); }

/// P(f(u,v), g(u,v)) for arbitrary bivariate substitutions.
inline BiPoly compose(const BiPoly& P, const BiPoly& f, const BiPoly& g) {
    std::vector<BiPoly> fpow{BiPoly::constant(Rat(1))}, gpow{BiPoly::constant(Rat(1))};
    for (int k = 0; k < P.max_du(); ++k) fpow.push_back(fpow.back() * f);
    for (int k = 0; k < P.max_dv(); ++k) gpow.push_back(gpow.back() * g);
    BiPoly::TermMap t;
    for (const auto& [e, c] : P.terms()) {
        BiPoly term = fpow[static_cast<std::size_t>(e.du)] * gpow[static_cast<std::size_t>(e.dv)];
        for (const auto& [et, ct] : term.terms()) t[et] += c * ct;
    }
    return BiPoly(std::move(t));
}

// ---------------------------------------------------------------------------
// VectorField2

/// Planar field (x', y') = (P, Q). Degree is max(deg P, deg Q).
struct VectorField2 {
    BiPoly p_comp;
    BiPoly q_comp;

    Degree degree() const { return max(p_comp.total_degree(), q_comp.total_degree()); }
    friend bool operator==(const VectorField2&, const VectorField2&) = default;
};

inline VectorField2 operator+(const VectorField2& a, const VectorField2& b) {
    return {a.p_comp + b.p_comp, a.q_comp + b.q_comp};
}
inline VectorField2 operator*(const Rat& s, const VectorField2& a) { return {s * a.p_comp, s * a.q_comp}; }

/// The radial cubic x' = y - x(x^2+y^2-rho^2), y' = -x - y(x^2+y^2-rho^2),
/// whose unique limit cycle is the circle of radius rho (clockwise).
inline VectorField2 radial_cubic(const Rat& rho) {
    const BiPoly x = BiPoly::u(), y = BiPoly::v();
    const BiPoly excess = x * x + y * y - BiPoly::constant(rho * rho);
    return {y - x * excess, -x - y * excess};
}

} // namespace cyclerep
