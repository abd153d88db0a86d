#pragma once

// The cyclerep command line. Kept in a header so the test suites can drive
// run_cli() in-process.
//
// Exit codes: 0 ok, 1 I/O, 2 parse, 3 invalid parameter, 4 dynamics failure,
// 5 no witness, 6 identity check failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclerep/bounds.hpp"
#include "cyclerep/branches.hpp"
#include "cyclerep/dynamics.hpp"
#include "cyclerep/poly_json.hpp"
#include "cyclerep/pullback.hpp"
#include "cyclerep/svg.hpp"

namespace cyclerep::cli {

enum Exit : int {
    kOk = 0,
    kIoError = 1,
    kParseError = 2,
    kInvalidParameter = 3,
    kDynamicsFailure = 4,
    kNoWitness = 5,
    kIdentityFailure = 6,
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    CycleConfig cycle;
    Rat rho{1, 2};
    std::string out;
    std::string format;

    void validate() const {
        if (!(cycle.tol > 0) || !(cycle.eps_fix > 0) || !(cycle.eps_hyp > 0) || !(cycle.margin > 0))
            throw InvalidParameter("tolerances must be positive");
        if (!(rho > 0 && rho < 1)) throw InvalidParameter("rho must lie in (0, 1)");
    }
};

inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double round9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

/// Rounds every floating-point value in a JSON tree to 9 significant digits.
inline void round_floats(nlohmann::json& j) {
    if (j.is_number_float())
        j = round9(j.get<double>());
    else if (j.is_structured())
        for (auto& child : j) round_floats(child);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

/// Writes to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_file(path, text);
}

inline SeedTable active_seed_table() {
    if (const char* path = std::getenv("CYCLEREP_SEED_TABLE"); path && *path)
        return seed_table_from_json(parse_json_text(read_file(path)));
    return builtin_seed_table();
}

// ---------------------------------------------------------------------------
// pullback

inline int cmd_pullback(const std::string& field_file, int m, const std::string& out_file, std::ostream& out,
                        std::ostream& err) {
    const VectorField2 X = field_from_json(parse_json_text(read_file(field_file)));
    if (m < 2) throw InvalidParameter("--m must be >= 2");
    const PullbackResult r = build_pullback(X, chebyshev(m));
    const bool conj = verify_conjugacy(r, X);
    const bool exact = check_exact_degree(r, X);
    nlohmann::json j = to_json(r);
    j["checks"] = {{"conjugacy", conj}, {"exact_degree", exact}};
    emit(out_file, j.dump(2) + "\n", out);
    if (!conj || !exact) {
        err << "identity check failed:" << (conj ? "" : " conjugacy") << (exact ? "" : " exact_degree") << '\n';
        return kIdentityFailure;
    }
    if (!out_file.empty() && out_file != "-")
        out << "deg(X) = " << r.source_degree << ", m = " << m << ", deg(Y) = " << r.field.degree().str()
            << ", identities verified\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// example

struct ExampleResult {
    VectorField2 X;
    PullbackResult Y;
    LimitCycleRecord base;
    std::vector<LimitCycleRecord> lifts;
    std::vector<std::pair<int, int>> failed;
    std::string failure;
    bool conjugacy = false;
    bool exact_degree = false;
};

inline double analytic_multiplier(const Rat& rho, bool reversed) {
    const double r = to_double(rho);
    return std::exp((reversed ? 4.0 : -4.0) * M_PI * r * r);
}

/// Base cycle of the radial cubic, its T_m pullback, and the m^2 lifts.
inline ExampleResult run_example(int m, const RunConfig& rc) {
    if (m < 2) throw InvalidParameter("--m must be >= 2");
    rc.validate();
    ExampleResult res;
    res.X = radial_cubic(rc.rho);
    const double rho = to_double(rc.rho);
    res.base = find_cycle(FieldF64(res.X), positive_x_axis(1.0), std::min(1.1 * rho, 0.5 * (1.0 + rho)), rc.cycle);
    if (!res.base.certified) throw SearchFailure("base cycle is not hyperbolic at eps_hyp");
    res.Y = build_pullback(res.X, chebyshev(m));
    res.conjugacy = verify_conjugacy(res.Y, res.X);
    res.exact_degree = check_exact_degree(res.Y, res.X);
    try {
        res.lifts = lift_cycles(res.Y, res.base, m, rc.cycle);
    } catch (const PartialLiftError& e) {
        res.lifts = e.found();
        res.failed = e.failed();
        res.failure = e.what();
    }
    return res;
}

inline double curve_residual(const BiPoly& curve, const State& z) { return std::abs(eval_f64(curve, z[0], z[1])); }

inline std::string cycles_csv(const ExampleResult& r, const Rat& rho) {
    std::ostringstream os;
    os << "i,j,anchor_u,anchor_v,period,multiplier,analytic_multiplier,orientation_reversed\n";
    for (const auto& c : r.lifts)
        os << c.rect->i << ',' << c.rect->j << ',' << fmt9(c.anchor[0]) << ',' << fmt9(c.anchor[1]) << ','
           << fmt9(c.period) << ',' << fmt9(c.multiplier) << ',' << fmt9(analytic_multiplier(rho, c.orientation_reversed))
           << ',' << (c.orientation_reversed ? 1 : 0) << '\n';
    return os.str();
}

inline std::string residuals_csv(const ExampleResult& r, int m, const Rat& rho) {
    const BiPoly curve = implicit_lift_curve(m, rho);
    std::ostringstream os;
    os << "i,j,residual\n";
    for (const auto& c : r.lifts) os << c.rect->i << ',' << c.rect->j << ',' << fmt9(curve_residual(curve, c.anchor)) << '\n';
    return os.str();
}

inline nlohmann::json example_json(const ExampleResult& r, int m, const Rat& rho) {
    const BiPoly curve = implicit_lift_curve(m, rho);
    nlohmann::json base = to_json(r.base);
    base["analytic_multiplier"] = analytic_multiplier(rho, false);
    nlohmann::json lifts = nlohmann::json::array();
    for (const auto& c : r.lifts) {
        nlohmann::json j = to_json(c);
        j["analytic_multiplier"] = analytic_multiplier(rho, c.orientation_reversed);
        j["curve_residual"] = curve_residual(curve, c.anchor);
        lifts.push_back(std::move(j));
    }
    nlohmann::json failed = nlohmann::json::array();
    for (auto [i, j] : r.failed) failed.push_back({i, j});
    nlohmann::json j{{"m", m},
                     {"rho", to_string(rho)},
                     {"deg_X", r.X.degree().value()},
                     {"deg_Y", r.Y.field.degree().value()},
                     {"conjugacy", r.conjugacy},
                     {"exact_degree", r.exact_degree},
                     {"base", base},
                     {"count", r.lifts.size()},
                     {"cycles", lifts},
                     {"failed", failed}};
    round_floats(j);
    return j;
}

inline std::string phase_portrait_svg(const ExampleResult& r, const CycleConfig& cfg) {
    const FieldF64 f(r.X);
    svg::Canvas c;
    c.axes();
    for (int k = 0; k < 12; ++k) {
        const double a = 2.0 * M_PI * k / 12.0;
        for (double r0 : {0.08, 1.0}) {
            const State z0{r0 * std::cos(a), r0 * std::sin(a)};
            c.polyline(svg::sample(integrate(f, z0, 12.0, 1e-8), 600), "#7a9cc6", 1.2);
        }
    }
    c.polyline(svg::sample(integrate(f, r.base.anchor, r.base.period, cfg.tol), 800), "#c0392b", 4.0);
    c.circle(r.base.anchor[0], r.base.anchor[1], 6.0, "#c0392b");
    return c.str();
}

inline std::string lifted_cycles_svg(const ExampleResult& r, int m, const CycleConfig& cfg) {
    const BranchSet b = cheb_branches(m);
    svg::Canvas c;
    for (const auto& iu : b.intervals)
        for (const auto& iv : b.intervals)
            if (lambda_sign(iu.index, iv.index) < 0) c.rect(iu.lo, iv.lo, iu.hi, iv.hi, "#f3d9a4", 0.6);
    for (const auto& iv : b.intervals) {
        c.line(iv.lo, -1, iv.lo, 1, "#888888", 1.0, "6,4");
        c.line(-1, iv.lo, 1, iv.lo, "#888888", 1.0, "6,4");
    }
    c.rect(-1, -1, 1, 1, "none", 0.0, "#444444");
    const FieldF64 f(r.Y.field);
    for (const auto& cyc : r.lifts) {
        c.polyline(svg::sample(integrate(f, cyc.anchor, cyc.period, cfg.tol), 600),
                   cyc.orientation_reversed ? "#8e44ad" : "#c0392b", 3.0);
        c.circle(cyc.anchor[0], cyc.anchor[1], 5.0, "#222222");
    }
    return c.str();
}

inline int cmd_example(int m, const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const ExampleResult r = run_example(m, rc);
    const std::filesystem::path dir = rc.out.empty() ? std::filesystem::path("example_out") : std::filesystem::path(rc.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const bool all = rc.format.empty();
    if (all || rc.format == "csv") {
        write_file(dir / "cycles.csv", cycles_csv(r, rc.rho));
        write_file(dir / "residuals.csv", residuals_csv(r, m, rc.rho));
    }
    if (all || rc.format == "json") {
        write_file(dir / "cycles.json", example_json(r, m, rc.rho).dump(2) + "\n");
        write_file(dir / "pullback.json", to_json(r.Y).dump(2) + "\n");
    }
    if (all || rc.format == "svg") {
        write_file(dir / "phase_portrait.svg", phase_portrait_svg(r, rc.cycle));
        write_file(dir / "lifted_cycles.svg", lifted_cycles_svg(r, m, rc.cycle));
    }

    out << "base cycle: anchor (" << fmt9(r.base.anchor[0]) << ", " << fmt9(r.base.anchor[1]) << "), period "
        << fmt9(r.base.period) << ", multiplier " << fmt9(r.base.multiplier) << '\n';
    out << "deg(Y) = " << r.Y.field.degree().str() << ", certified lifted cycles: " << r.lifts.size() << " of "
        << m * m << '\n';
    if (!r.conjugacy || !r.exact_degree) {
        err << "identity check failed for the pullback field\n";
        return kIdentityFailure;
    }
    if (!r.failed.empty()) {
        err << r.failure << '\n';
        return kDynamicsFailure;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// bounds

inline nlohmann::json bound_json(const BoundEntry& e, const SeedTable& seeds) {
    nlohmann::json j{{"N", e.target_degree}, {"value", e.value.str()}, {"source", e.source}, {"chain", inequality_chain(e, seeds)}};
    if (e.witness) j["witness"] = {{"n", e.witness->n}, {"m", e.witness->m}};
    return j;
}

inline nlohmann::json table1_json(const std::vector<ComparisonRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"N", r.N},
                       {"L_pub", r.published.str()},
                       {"L_Ch", r.cheb.value.str()},
                       {"witness", {{"n", r.cheb.witness->n}, {"m", r.cheb.witness->m}}},
                       {"delta", r.delta.str()},
                       {"source", r.citation}});
    return arr;
}

inline nlohmann::json table2_json(const std::vector<int>& degrees, const SeedTable& seeds) {
    nlohmann::json arr = nlohmann::json::array();
    for (int N : degrees) arr.push_back(bound_json(best_cheb_bound(N, seeds), seeds));
    return arr;
}

inline std::string rat_display(const Rat& r) {
    return denominator_of(r) == 1 ? numerator_of(r).str() : to_string(r);
}

inline int cmd_bounds(const std::string& sub, const std::vector<std::string>& args, const RunConfig& rc,
                      std::ostream& out) {
    const bool json = rc.format == "json";
    if (!rc.format.empty() && rc.format != "csv" && rc.format != "json")
        throw InvalidParameter("bounds supports --format csv or json");
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw InvalidParameter("bounds " + sub + " expects " + std::to_string(n) + " argument(s)");
    };
    auto integer = [](const std::string& s) {
        if (!detail::is_integer_literal(s)) throw ParseError("not an integer: " + s);
        return detail::parse_integer(s);
    };
    auto small = [&](const std::string& s) {
        const BigInt v = integer(s);
        if (v > 1'000'000 || v < -1'000'000) throw InvalidParameter("degree out of range: " + s);
        return v.convert_to<int>();
    };
    const SeedTable seeds = active_seed_table();

    if (sub == "table1") {
        want(0);
        const auto rows = table_pub_vs_cheb(seeds, builtin_published_bounds());
        emit(rc.out, json ? table1_json(rows).dump(2) + "\n" : table1_csv(rows), out);
    } else if (sub == "table2") {
        want(0);
        emit(rc.out, json ? table2_json(table_degrees(), seeds).dump(2) + "\n" : table2_csv(table_degrees(), seeds), out);
    } else if (sub == "query") {
        want(1);
        const BoundEntry e = best_cheb_bound(small(args[0]), seeds);
        std::ostringstream os;
        if (json) {
            os << bound_json(e, seeds).dump(2) << '\n';
        } else {
            os << "N = " << e.target_degree << "\nL_Ch = " << e.value.str() << "\nwitness (n,m) = (" << e.witness->n
               << ',' << e.witness->m << ")\nseed source = " << e.source << '\n'
               << inequality_chain(e, seeds) << '\n';
        }
        emit(rc.out, os.str(), out);
    } else if (sub == "ceiling") {
        want(3);
        const Rat c = quadratic_ceiling(integer(args[0]), small(args[1]), small(args[2]));
        emit(rc.out, json ? nlohmann::json{{"ceiling", to_string(c)}}.dump() + "\n" : rat_display(c) + "\n", out);
    } else {
        throw InvalidParameter("unknown bounds subcommand: " + sub);
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// branches

inline std::string branches_svg(const BranchSet& s) {
    svg::Canvas c;
    for (const auto& iv : s.intervals)
        c.rect(std::max(iv.lo, -1.1), -1, std::min(iv.hi, 1.1), 1,
               iv.direction == Direction::increasing ? "#a8d5a2" : "#f3b6a4", 0.5);
    c.axes();
    c.line(-1.1, 1, 1.1, 1, "#444444", 1.0, "6,4");
    c.line(-1.1, -1, 1.1, -1, "#444444", 1.0, "6,4");
    const UniPolyF64 p(s.poly);
    std::vector<State> pts;
    for (int k = 0; k <= 2000; ++k) {
        const double x = -1.1 + 2.2 * k / 2000.0;
        pts.push_back({x, p(x)});
    }
    c.polyline(pts, "#1f4e79", 3.0);
    return c.str();
}

inline int cmd_branches(const std::string& poly_file, int cheb_m, double tol, bool unit_interval,
                        const std::string& svg_file, const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (!(tol > 0)) throw InvalidParameter("--tol must be positive");
    BranchSet s;
    if (cheb_m != 0) {
        if (!poly_file.empty()) throw InvalidParameter("give either a polynomial file or --cheb, not both");
        s = cheb_branches(cheb_m);
    } else {
        if (poly_file.empty()) throw InvalidParameter("branches needs a polynomial file or --cheb M");
        const UniPoly p = uni_from_json(parse_json_text(read_file(poly_file)));
        s = full_branch_intervals(p, tol, unit_interval ? BranchDomain::unit_interval : BranchDomain::real_line);
    }
    for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    if (!svg_file.empty()) write_file(svg_file, branches_svg(s));
    if (rc.format == "svg") {
        emit(rc.out, branches_svg(s), out);
        return kOk;
    }
    nlohmann::json j = to_json(s);
    round_floats(j);
    emit(rc.out, j.dump(2) + "\n", out);
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chebyshev pullback replication of limit cycles", "cyclerep"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string rho_text = "1/2";
    int m = 3;

    auto* pb = app.add_subcommand("pullback", "pull a field back by T_m and verify the identities");
    std::string field_file;
    pb->add_option("field", field_file, "VectorField2 JSON file")->required();
    pb->add_option("--m", m, "cover degree")->required();
    pb->add_option("--out", rc.out, "output file (default stdout)");

    auto* ex = app.add_subcommand("example", "radial cubic: base cycle, pullback, and lifted cycles");
    ex->add_option("--m", m, "cover degree")->capture_default_str();
    ex->add_option("--rho", rho_text, "cycle radius, rational or decimal")->capture_default_str();
    ex->add_option("--out", rc.out, "output directory (default example_out)");
    ex->add_option("--tol", rc.cycle.tol, "integrator tolerance")->capture_default_str();
    ex->add_option("--eps-fix", rc.cycle.eps_fix, "fixed-point residual")->capture_default_str();
    ex->add_option("--eps-hyp", rc.cycle.eps_hyp, "hyperbolicity threshold")->capture_default_str();
    ex->add_option("--margin", rc.cycle.margin, "anchor distance to rectangle edges")->capture_default_str();
    ex->add_option("--format", rc.format, "write only this output kind")->check(CLI::IsMember({"csv", "json", "svg"}));
    bool serial = false;
    ex->add_flag("--serial", serial, "solve rectangles one at a time");

    auto* bd = app.add_subcommand("bounds", "replication bounds: table1 | table2 | query N | ceiling k0 n0 N");
    std::string bounds_sub;
    std::vector<std::string> bounds_args;
    bd->add_option("what", bounds_sub, "table1, table2, query or ceiling")->required();
    bd->add_option("args", bounds_args, "subcommand arguments");
    bd->add_option("--out", rc.out, "output file (default stdout)");
    bd->add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* br = app.add_subcommand("branches", "full branch intervals of a polynomial");
    std::string poly_file, svg_file;
    int cheb_m = 0;
    double tol = 1e-12;
    bool unit = false;
    br->add_option("poly", poly_file, "UniPoly JSON file");
    br->add_option("--cheb", cheb_m, "use T_m instead of a file");
    br->add_option("--tol", tol, "root isolation tolerance")->capture_default_str();
    br->add_flag("--unit-interval", unit, "only count branches inside (-1,1)");
    br->add_option("--svg", svg_file, "also write a figure");
    br->add_option("--out", rc.out, "output file (default stdout)");
    br->add_option("--format", rc.format, "json or svg")->check(CLI::IsMember({"json", "svg"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (pb->parsed()) return cmd_pullback(field_file, m, rc.out, out, err);
        if (ex->parsed()) {
            try {
                rc.rho = parse_rat_or_decimal(rho_text);
            } catch (const ParseError&) {
                throw InvalidParameter("--rho is not a number: " + rho_text);
            }
            rc.cycle.parallel = !serial;
            return cmd_example(m, rc, out, err);
        }
        if (bd->parsed()) return cmd_bounds(bounds_sub, bounds_args, rc, out);
        if (br->parsed()) return cmd_branches(poly_file, cheb_m, tol, unit, svg_file, rc, out, err);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const nlohmann::json::exception& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const std::invalid_argument& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kInvalidParameter;
    } catch (const OutOfRange& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kInvalidParameter;
    } catch (const NoWitness& e) {
        err << "no witness: " << e.what() << '\n';
        return kNoWitness;
    } catch (const MissingSeed& e) {
        err << "no witness: " << e.what() << '\n';
        return kNoWitness;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const IntegrationFailure& e) {
        err << "dynamics failure: " << e.what() << " at t = " << fmt9(e.time()) << '\n';
        return kDynamicsFailure;
    } catch (const std::runtime_error& e) {
        // NoReturn, DegenerateCrossing, SearchFailure
        err << "dynamics failure: " << e.what() << '\n';
        return kDynamicsFailure;
    }
    return kInvalidParameter;
}

} // namespace cyclerep::cli
