// Lifts the limit cycle of a planar field through the Chebyshev cover T_m and
// prints one line per lifted cycle.
//
//   lift_cubic [field.json] [m]
//
// The field must have a hyperbolic limit cycle crossing the positive x-axis
// inside (0, 1); the bundled data/cubic_field.json has one at radius 1/2.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cyclerep/dynamics.hpp"
#include "cyclerep/poly_json.hpp"
#include "cyclerep/pullback.hpp"

using namespace cyclerep;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : std::string(CYCLEREP_DEMO_DATA_DIR) + "/cubic_field.json";
    const int m = argc > 2 ? std::stoi(argv[2]) : 3;

    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read " << path << '\n';
        return 1;
    }
    std::ostringstream text;
    text << in.rdbuf();

    try {
        const VectorField2 X = field_from_json(parse_json_text(text.str()));
        const LimitCycleRecord base = find_cycle(FieldF64(X), positive_x_axis(1.0), 0.6, {});
        std::printf("base cycle: anchor (%.9f, %.9f), period %.6f, multiplier %.6e\n", base.anchor[0], base.anchor[1],
                    base.period, base.multiplier);

        const PullbackResult Y = build_pullback(X, chebyshev(m));
        std::printf("deg X = %d, deg Y = %s, conjugacy %s\n", X.degree().value(), Y.field.degree().str().c_str(),
                    verify_conjugacy(Y, X) ? "exact" : "FAILED");

        const auto lifts = lift_cycles(Y, base, m);
        std::printf("%zu lifted cycles\n", lifts.size());
        std::printf("  i  j        anchor_u        anchor_v      period    multiplier\n");
        for (const auto& c : lifts)
            std::printf("%3d%3d %15.9f %15.9f %11.6f %13.6e%s\n", c.rect->i, c.rect->j, c.anchor[0], c.anchor[1], c.period,
                        c.multiplier, c.orientation_reversed ? "  (reversed)" : "");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
