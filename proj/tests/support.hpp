#pragma once

// Random instance generators shared by the test suites. Fixed seeds keep
// every run identical.

#include <random>

#include "cyclerep/polynomial.hpp"

namespace testsupport {

using namespace cyclerep;

/// Rational in [-3, 3] with denominator 1..4.
inline Rat random_rat(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> den_d(1, 4);
    const int den = den_d(rng);
    std::uniform_int_distribution<int> num_d(-3 * den, 3 * den);
    return Rat(BigInt(num_d(rng)), BigInt(den));
}

inline Rat random_nonzero_rat(std::mt19937_64& rng) {
    for (;;)
        if (Rat r = random_rat(rng); r != 0) return r;
}

inline UniPoly random_uni(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg_d(0, max_degree);
    std::vector<Rat> cs(static_cast<std::size_t>(deg_d(rng)) + 1);
    for (auto& c : cs) c = random_rat(rng);
    return UniPoly(std::move(cs));
}

/// Exactly degree `degree`.
inline UniPoly random_uni_exact(std::mt19937_64& rng, int degree) {
    std::vector<Rat> cs(static_cast<std::size_t>(degree) + 1);
    for (auto& c : cs) c = random_rat(rng);
    cs.back() = random_nonzero_rat(rng);
    return UniPoly(std::move(cs));
}

/// Dense-ish bivariate with total degree <= max_degree; about half of the
/// monomials are present.
inline BiPoly random_bi(std::mt19937_64& rng, int max_degree) {
    std::bernoulli_distribution keep(0.5);
    BiPoly::TermMap t;
    for (int d = 0; d <= max_degree; ++d)
        for (int i = 0; i <= d; ++i)
            if (keep(rng)) t[{i, d - i}] = random_rat(rng);
    return BiPoly(std::move(t));
}

/// Bivariate with a nonzero homogeneous part of exactly `degree`.
inline BiPoly random_bi_exact(std::mt19937_64& rng, int degree) {
    BiPoly f = random_bi(rng, degree);
    std::uniform_int_distribution<int> pick(0, degree);
    const int i = pick(rng);
    if (f.coeff(i, degree - i) == 0) f = f + BiPoly::monomial(random_nonzero_rat(rng), i, degree - i);
    return f;
}

/// Field of degree between 1 and max_degree.
inline VectorField2 random_field(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg_d(1, max_degree);
    const int d = deg_d(rng);
    std::bernoulli_distribution which(0.5);
    VectorField2 X{random_bi(rng, d), random_bi(rng, d)};
    if (which(rng))
        X.p_comp = random_bi_exact(rng, d);
    else
        X.q_comp = random_bi_exact(rng, d);
    return X;
}

} // namespace testsupport
