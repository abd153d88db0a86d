#pragma once

// JSON encoding of exact polynomials. Coefficients are "num/den" strings;
// a BiPoly is an array of {"du", "dv", "c"} objects in exponent order; a
// VectorField2 is {"P": BiPoly, "Q": BiPoly}.

#include <json.hpp>

#include <string>

#include "cyclerep/errors.hpp"
#include "cyclerep/polynomial.hpp"
#include "cyclerep/rational.hpp"

namespace cyclerep {

using json = nlohmann::json;

inline json rat_to_json(const Rat& r) { return to_string(r); }

inline Rat rat_from_json(const json& j) {
    if (!j.is_string()) throw ParseError("coefficient must be a \"num/den\" string");
    return parse_rat(j.get<std::string>());
}

inline json to_json(const UniPoly& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back(rat_to_json(c));
    return arr;
}

inline UniPoly uni_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("UniPoly must be an array of coefficient strings");
    std::vector<Rat> cs;
    cs.reserve(j.size());
    for (const auto& c : j) cs.push_back(rat_from_json(c));
    return UniPoly(std::move(cs));
}

inline json to_json(const BiPoly& f) {
    json arr = json::array();
    for (const auto& [e, c] : f.terms()) arr.push_back({{"du", e.du}, {"dv", e.dv}, {"c", to_string(c)}});
    return arr;
}

inline BiPoly bi_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("BiPoly must be an array of terms");
    BiPoly::TermMap t;
    for (const auto& term : j) {
        if (!term.is_object() || !term.contains("du") || !term.contains("dv") || !term.contains("c"))
            throw ParseError("BiPoly term must have \"du\", \"dv\" and \"c\"");
        if (!term["du"].is_number_integer() || !term["dv"].is_number_integer())
            throw ParseError("BiPoly exponents must be integers");
        int du = term["du"].get<int>();
        int dv = term["dv"].get<int>();
        if (du < 0 || dv < 0) throw ParseError("BiPoly exponents must be non-negative");
        t[{du, dv}] += rat_from_json(term["c"]);
    }
    return BiPoly(std::move(t));
}

inline json to_json(const VectorField2& X) { return {{"P", to_json(X.p_comp)}, {"Q", to_json(X.q_comp)}}; }

inline VectorField2 field_from_json(const json& j) {
    if (!j.is_object() || !j.contains("P") || !j.contains("Q"))
        throw ParseError("VectorField2 must be an object with \"P\" and \"Q\"");
    return {bi_from_json(j["P"]), bi_from_json(j["Q"])};
}

/// Parses text, mapping any JSON syntax error to ParseError.
inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

} // namespace cyclerep
