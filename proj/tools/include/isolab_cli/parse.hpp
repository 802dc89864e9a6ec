#pragma once

// Grammar for diffeomorphism specs (whitespace allowed between tokens):
//
//   spec := rot:<rho> | shear:<eps>:<q> | inv(spec) | pow(spec,<m>)
//         | comp(spec,spec) | conj(spec,spec)
//
// conj(h,g) = comp(h, comp(g, inv(h))).

#include <string>
#include <vector>

#include "isolab/circle.hpp"

namespace isolab::cli {

/// Throws ValidationError("parse error at position k: ...") on bad input.
Diffeo parse_diffeo_spec(const std::string& text);

/// Time lists: "fib:k", "a..b", "a..b:step", or comma separated integers
/// (items may mix the forms). "cf" is handled by the caller.
std::vector<int> parse_times(const std::string& text);

}  // namespace isolab::cli
