#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qreflect/invariants.hpp"

namespace qreflect {

using Json = nlohmann::ordered_json;

// A parsed and validated problem: ring, generators, options. The working
// field is the declared root-of-unity order times 4 (one doubling for square
// roots, one for zeta_4), and every scalar is lifted into it up front.
struct ProblemSpec {
    long declared_order = 1;
    long field_order = 4;
    std::optional<PBWPresentation> ring;
    std::vector<GradedMap> generators;
    std::vector<NCPoly> invariant_generators;
    int max_degree = 12;
    long max_group_order = 10000;
    std::vector<std::string> commands;

    const PBWPresentation& algebra() const { return *ring; }
};

// Parses the JSON problem document; validates the ring parameters and every
// generator (each must be a graded automorphism). Errors carry field paths.
ProblemSpec parse_input(const std::string& json_text);

// Inverse of parse_input up to scalar representation; parse(serialize(s))
// yields an equivalent spec.
std::string serialize_spec(const ProblemSpec& spec);

bool specs_equal(const ProblemSpec& a, const ProblemSpec& b);

// Dispatches one command ("classify", "decompose", "decide-stc", "hilbert",
// "invariants", "trace g=<k>", "free-module", "compare-orders A B",
// "twist-check", "mgroup n alpha beta") and returns the full report object.
Json run_command(const ProblemSpec& spec, const std::string& command,
                 bool full_elements = false);

// Human-readable rendering of a report (the JSON is the source of truth).
std::string render_text(const Json& report);

// Scalar/polynomial/matrix serialization helpers shared with tests.
Json scalar_to_json(const CycScalar& c);
Json poly_to_json(const NCPoly& f);
Json matrix_to_json(const Matrix& m);

} // namespace qreflect
