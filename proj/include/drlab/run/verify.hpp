#pragma once

#include <string>
#include <vector>

namespace drlab {

// Named groups of release-gate checks:
//
//  Theory           operator contraction, fixed-point-vs-enumeration
//                   agreement, action-order invariance, and monotone
//                   policy improvement on randomly generated processes;
//  Counterexamples  the hand-built processes where the per-step critic
//                   fails and the trajectory machinery succeeds;
//  Gradients        finite-difference validation of every approximator
//                   and of the action-gradient shortcut;
//  All              every suite above, in that order.
enum class VerifySuite { Theory, Counterexamples, Gradients, All };

const char* verify_suite_name(VerifySuite suite);
// Accepts "theory", "counterexamples", "gradients", "all"; throws
// std::invalid_argument otherwise.
VerifySuite verify_suite_from_string(const std::string& name);

// One check: a verdict plus the measured quantities behind it. A check
// that throws is reported failed with the exception text as its
// measurement; run_verify itself does not throw on check failures.
struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string measured;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool all_passed() const;
  // One "[PASS]/[FAIL] name  seconds  measured" line per check plus a
  // summary line.
  std::string render() const;
};

VerifyReport run_verify(VerifySuite suite);

}  // namespace drlab
