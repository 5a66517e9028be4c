#pragma once

#include <string>
#include <variant>

#include "movelab/measure.hpp"

namespace movelab {

// Runtime-dispatched measure: exact-rational or float, never mixed.
using AnyMeasure = std::variant<MeasureQ, MeasureD>;
using AnySigned = std::variant<SignedVector<Rat>, SignedVector<double>>;

inline bool is_exact(const AnyMeasure& m) { return std::holds_alternative<MeasureQ>(m); }

// File format: {"n": int, "labels"?: [...], "mode": "exact"|"float",
//               "entries": [[bitstring, value], ...]}
// with values as "a/b" or decimal strings, leftmost bitstring char = site 0,
// unlisted configurations zero, entries emitted in ascending bitmask order.
// Signed vectors carry an extra "signed": true.
std::string measure_to_json(const AnyMeasure& m);
std::string signed_to_json(const AnySigned& v);
AnyMeasure measure_from_json(const std::string& text);
AnySigned signed_from_json(const std::string& text);

AnyMeasure read_measure_file(const std::string& path);
void write_measure_file(const std::string& path, const AnyMeasure& m);
void write_signed_file(const std::string& path, const AnySigned& v);

}  // namespace movelab
