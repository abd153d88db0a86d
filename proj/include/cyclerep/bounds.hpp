#pragma once

// Replication arithmetic for Hilbert-number lower bounds.
//
// One Chebyshev pullback of degree m turns a degree-n field with k limit
// cycles into a degree-((n+1)m - 1) field with m^2 k cycles. This header
// holds the published seed values, the best one-step consequence for each
// target degree, the two comparison tables, and the quadratic ceiling for
// iterated replication.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclerep/errors.hpp"
#include "cyclerep/rational.hpp"

namespace cyclerep {

class MissingSeed : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class NoWitness : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::string kHanLi = "HanLi";
inline const std::string kProhensTorregrosa = "ProhensTorregrosa";

struct Seed {
    BigInt value;
    std::string source;
};

class SeedTable {
public:
    SeedTable() = default;
    explicit SeedTable(std::map<int, Seed> entries) : entries_(std::move(entries)) {
        for (const auto& [n, s] : entries_) {
            if (n < 1) throw InvalidParameter("seed degree must be >= 1");
            if (s.value <= 0) throw InvalidParameter("seed values must be positive");
        }
    }

    const Seed& lookup(int n) const {
        auto it = entries_.find(n);
        if (it == entries_.end()) throw MissingSeed("no seed bound for degree " + std::to_string(n));
        return it->second;
    }
    bool contains(int n) const { return entries_.count(n) != 0; }
    const std::map<int, Seed>& entries() const { return entries_; }

private:
    std::map<int, Seed> entries_;
};

/// Published lower bounds L_pub(n) used as replication seeds.
inline SeedTable builtin_seed_table() {
    const std::vector<std::tuple<int, long, const std::string*>> rows{
        {4, 28, &kProhensTorregrosa},  {5, 37, &kProhensTorregrosa},   {6, 53, &kProhensTorregrosa},
        {7, 74, &kProhensTorregrosa},  {8, 96, &kProhensTorregrosa},   {9, 120, &kProhensTorregrosa},
        {10, 142, &kProhensTorregrosa}, {11, 153, &kHanLi},            {12, 157, &kHanLi},
        {13, 212, &kProhensTorregrosa}, {14, 194, &kHanLi},            {15, 345, &kHanLi},
        {16, 351, &kHanLi},             {17, 384, &kProhensTorregrosa}, {18, 372, &kHanLi},
        {19, 503, &kHanLi},             {20, 509, &kHanLi},             {21, 568, &kProhensTorregrosa},
        {31, 1184, &kProhensTorregrosa}, {35, 1536, &kProhensTorregrosa}, {39, 1920, &kProhensTorregrosa},
        {43, 2272, &kProhensTorregrosa},
    };
    std::map<int, Seed> entries;
    for (const auto& [n, v, src] : rows) entries.emplace(n, Seed{BigInt(v), *src});
    return SeedTable(std::move(entries));
}

/// Override format: [{"n": 4, "value": 28, "source": "ProhensTorregrosa"}, ...].
/// Values may be JSON integers or decimal strings.
inline SeedTable seed_table_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("seed table must be a JSON array");
    std::map<int, Seed> entries;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("n") || !e.contains("value"))
            throw ParseError("seed entry needs \"n\" and \"value\"");
        if (!e["n"].is_number_integer()) throw ParseError("seed degree must be an integer");
        BigInt value;
        if (e["value"].is_number_integer())
            value = BigInt(e["value"].get<std::int64_t>());
        else if (e["value"].is_string())
            value = detail::parse_integer(e["value"].get<std::string>());
        else
            throw ParseError("seed value must be an integer");
        std::string source = e.contains("source") ? e["source"].get<std::string>() : std::string("user");
        if (!entries.emplace(e["n"].get<int>(), Seed{value, source}).second)
            throw ParseError("duplicate seed degree " + std::to_string(e["n"].get<int>()));
    }
    return SeedTable(std::move(entries));
}

inline nlohmann::json to_json(const SeedTable& t) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [n, s] : t.entries()) arr.push_back({{"n", n}, {"value", s.value.convert_to<std::int64_t>()}, {"source", s.source}});
    return arr;
}

struct Witness {
    int n = 0;
    int m = 0;
    friend bool operator==(const Witness&, const Witness&) = default;
};

struct BoundEntry {
    int target_degree = 0;
    BigInt value;
    std::optional<Witness> witness;
    std::string source;
};

/// H((n+1)m - 1) >= m^2 seed(n).
inline BoundEntry replication_bound(int n, int m, const SeedTable& seeds) {
    if (m < 2) throw InvalidParameter("replication requires m >= 2");
    const Seed& s = seeds.lookup(n);
    return {(n + 1) * m - 1, BigInt(m) * m * s.value, Witness{n, m}, s.source};
}

/// Maximum of m^2 seed(n) over N + 1 = (n + 1) m, m >= 2; ties go to the smallest m.
inline BoundEntry best_cheb_bound(int N, const SeedTable& seeds) {
    if (N < 3) throw InvalidParameter("best_cheb_bound requires N >= 3");
    std::optional<BoundEntry> best;
    for (int m = 2; m <= N + 1; ++m) {
        if ((N + 1) % m != 0) continue;
        const int n = (N + 1) / m - 1;
        if (n < 1 || !seeds.contains(n)) continue;
        BoundEntry cand = replication_bound(n, m, seeds);
        if (!best || cand.value > best->value) best = std::move(cand);
    }
    if (!best) throw NoWitness("no admissible factorization of " + std::to_string(N + 1) + " hits the seed table");
    return *best;
}

/// "H(29) ≥ 9·H(9) ≥ 9·120 = 1080"
inline std::string inequality_chain(const BoundEntry& e, const SeedTable& seeds) {
    if (!e.witness) return "H(" + std::to_string(e.target_degree) + ") ≥ " + e.value.str();
    const auto [n, m] = *e.witness;
    const std::string sq = std::to_string(m * m);
    std::ostringstream os;
    os << "H(" << e.target_degree << ") ≥ " << sq << "·H(" << n << ") ≥ " << sq << "·" << seeds.lookup(n).value.str()
       << " = " << e.value.str();
    return os.str();
}

// ---------------------------------------------------------------------------
// Comparison tables

struct PublishedBound {
    BigInt value;
    std::string citation;
};

/// Best published degree-specific bounds L_pub(N) for the compared degrees.
inline std::map<int, PublishedBound> builtin_published_bounds() {
    const std::string hl = "Han-Li 2012, Thm. 1.2(i)";
    const std::string pt = "Prohens-Torregrosa 2019, Cor. 2(a)";
    const std::vector<std::tuple<int, long, std::string>> rows{
        {11, 153, hl},  {13, 212, pt},  {14, 194, hl},  {15, 345, hl},  {17, 384, pt},   {19, 503, hl},
        {20, 509, hl},  {21, 568, pt},  {23, 833, hl},  {24, 843, hl},  {25, 870, hl},   {26, 880, hl},
        {27, 1023, hl}, {29, 1060, hl}, {31, 1184, pt}, {35, 1536, pt}, {39, 1920, pt},  {43, 2272, pt},
    };
    std::map<int, PublishedBound> out;
    for (const auto& [n, v, c] : rows) out.emplace(n, PublishedBound{BigInt(v), c});
    return out;
}

struct ComparisonRow {
    int N = 0;
    BigInt published;
    std::string citation;
    BoundEntry cheb;
    BigInt delta;  // cheb - published
};

inline std::vector<ComparisonRow> table_pub_vs_cheb(const SeedTable& seeds,
                                                    const std::map<int, PublishedBound>& pub_values) {
    std::vector<ComparisonRow> rows;
    for (const auto& [N, pub] : pub_values) {
        BoundEntry b = best_cheb_bound(N, seeds);
        BigInt delta = b.value - pub.value;
        rows.push_back({N, pub.value, pub.citation, std::move(b), std::move(delta)});
    }
    return rows;
}

namespace detail {
inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
} // namespace detail

inline std::string table1_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "N,L_pub(N),L_Ch(N),\"seed (n,m)\",Delta,L_pub source\n";
    for (const auto& r : rows) {
        const auto& w = *r.cheb.witness;
        os << r.N << ',' << r.published.str() << ',' << r.cheb.value.str() << ",\"(" << w.n << ',' << w.m << ")\","
           << r.delta.str() << ',' << detail::csv_quote(r.citation) << '\n';
    }
    return os.str();
}

/// Derivation table: one row per target degree with the factorization and
/// the seed used.
inline std::string table2_csv(const std::vector<int>& degrees, const SeedTable& seeds) {
    std::ostringstream os;
    os << "N,factorization of N+1,seed bound used,theorem output,value of L_Ch(N)\n";
    for (int N : degrees) {
        const BoundEntry b = best_cheb_bound(N, seeds);
        const auto [n, m] = *b.witness;
        os << N << ',' << (N + 1) << '=' << (n + 1) << "·" << m << ",H(" << n << ")≥" << seeds.lookup(n).value.str()
           << ",H(" << N << ")≥" << m * m << "·" << seeds.lookup(n).value.str() << ',' << b.value.str() << '\n';
    }
    return os.str();
}

inline std::vector<int> table_degrees() { return {11, 13, 14, 15, 17, 19, 20, 21, 23, 24, 25, 26, 27, 29, 31, 35, 39, 43}; }

// ---------------------------------------------------------------------------
// Quadratic ceiling

/// k0 ((N+1)/(n0+1))^2, exactly.
inline Rat quadratic_ceiling(const BigInt& k0, int n0, int N) {
    if (k0 < 0) throw InvalidParameter("k0 must be non-negative");
    if (n0 < 1) throw InvalidParameter("n0 must be >= 1");
    if (N < n0) throw InvalidParameter("N must be >= n0");
    const Rat ratio(BigInt(N + 1), BigInt(n0 + 1));
    return Rat(k0) * ratio * ratio;
}

struct Schedule {
    int n0 = 1;
    BigInt k0;
    std::vector<int> steps;  // cover degrees m_j >= 2
};

struct ScheduleOutcome {
    BigInt final_degree;
    BigInt cycle_bound;
};

/// Degree and cycle count after applying every step; the count always
/// saturates the quadratic ceiling.
inline ScheduleOutcome schedule_bound(const Schedule& s) {
    if (s.n0 < 1) throw InvalidParameter("n0 must be >= 1");
    if (s.k0 < 0) throw InvalidParameter("k0 must be non-negative");
    BigInt degree_plus_one = s.n0 + 1;
    BigInt cycles = s.k0;
    for (int m : s.steps) {
        if (m < 2) throw InvalidParameter("every replication step needs m >= 2");
        degree_plus_one *= m;
        cycles *= BigInt(m) * m;
    }
    ScheduleOutcome out{degree_plus_one - 1, cycles};
    const Rat ratio(degree_plus_one, BigInt(s.n0 + 1));
    if (Rat(cycles) != Rat(s.k0) * ratio * ratio) throw std::logic_error("schedule bound does not saturate the ceiling");
    return out;
}

} // namespace cyclerep
