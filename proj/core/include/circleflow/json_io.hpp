// JSON serialization for maps and straightening results; rationals travel as
// exact "p/q" strings so a round trip loses nothing.
#pragma once

#include <string>

#include "circleflow/pac_map.hpp"
#include "circleflow/straighten.hpp"

namespace circleflow {

std::string pac_map_to_json(const PacMap& m, int indent = 2);

// Parses and validates; malformed JSON or an inconsistent map throws
// validation_error with the offending location in the message.
PacMap pac_map_from_json(const std::string& text);

// Full straightening result: cut points "B", jump maps "sigma"/"tau", "orbits",
// component lengths "lambda", conjugator "f", and the hom/verification "report".
std::string straighten_result_to_json(const StraighteningResult& r,
                                      const std::string& family, int indent = 2);

// Reads back the conjugator ("f") of a serialized straightening result; its
// target domain carries the straightened component lengths.
PacMap conjugator_from_json(const std::string& text);

}  // namespace circleflow
