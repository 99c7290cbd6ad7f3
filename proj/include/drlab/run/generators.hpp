#pragma once

#include <cstdint>

#include "drlab/core/policy.hpp"
#include "drlab/core/rng.hpp"
#include "drlab/core/spec.hpp"

namespace drlab {

// Random process generators sized so that exact enumeration stays cheap.
// Two families:
//
//  * layered episodic processes — states arranged in layers with
//    transitions only to the next layer and a single zero-reward sink, so
//    every episode ends within (layers + 1) steps and enumeration is
//    finite regardless of gamma or stochasticity;
//
//  * cyclic processes — no sink, but deterministic transitions and short
//    intervals (lengths in {1, 2}) with gamma <= 0.6, so the discounted
//    mass of long continuations decays fast enough for enumeration.

// Layered episodic spec with stochastic transitions. `kind` selects the
// reward family (Max and Square force overlap 0; layer-increasing
// positive per-step rewards keep Max past-invariant). `overlap` is the
// overlap depth c for Sum / WeightedSum.
DrmdpSpec random_layered_spec(Rng& rng, RewardKind kind, std::int32_t overlap);

// Cyclic spec with deterministic single-successor transitions, Sum or
// WeightedSum rewards, gamma <= 0.6.  Interval lengths are drawn from
// {1, 2} when `mixed_lengths` is true, otherwise fixed at 2 (with a
// deterministic policy that makes every continuation a single path,
// which path-enumeration oracles can follow to machine precision).
DrmdpSpec random_cyclic_spec(Rng& rng, std::int32_t overlap, bool mixed_lengths = true);

// Past-invariant spec: Sum or WeightedSum layered (always past-invariant)
// or, when `allow_max` is set, occasionally a Max-form layered spec
// re-sampled until the brute-force checker accepts it.
DrmdpSpec random_pi_spec(Rng& rng, bool allow_max);

// Random phase policy for `spec`; deterministic rows when requested,
// otherwise Dirichlet-like positive rows.
PolicyS random_policy(Rng& rng, const DrmdpSpec& spec, bool deterministic);

}  // namespace drlab
