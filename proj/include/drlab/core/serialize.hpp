#pragma once

#include <string>

#include "drlab/core/spec.hpp"

namespace drlab {

// Text serialization of DrmdpSpec.
//
// The format is line-oriented with named sections:
//
//   drmdp-spec v1
//   [states]
//   A
//   B
//   [actions]
//   A: a0 a1
//   B: b
//   [transition]          # s a s' p, one triple per line
//   A a0 B 1
//   [initial]             # s p
//   A 0.5
//   [interval]            # n p, one support atom per line
//   2 1
//   [gamma]
//   0.99
//   [overlap]
//   0
//   [reward]
//   kind sum              # sum | max | square | weighted_sum | tabulated
//   step A a0 0.01        # per-step rewards (all kinds except tabulated)
//   weights 1 0.5         # weighted_sum only, one value per segment slot
//   entry A a0 , B b -> 1 # tabulated only; steps comma-separated, padding "~"
//
// '#' starts a comment; blank lines are ignored. Probabilities and rewards
// written with up to 15 significant digits round-trip exactly.
std::string save_spec(const DrmdpSpec& spec);

// Parses the format above. Throws std::invalid_argument with a line-number
// message on malformed input; the returned spec has been validated.
DrmdpSpec parse_spec(const std::string& text);

// Shortest decimal for a double that stays exact under 15-significant-digit
// round-trip (used by every text emitter in the project).
std::string format_double(double value);

}  // namespace drlab
