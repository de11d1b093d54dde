#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pgv {

struct Hypothesis {
  std::string name;
  bool holds = false;
  std::string witness;  // evidence or counterexample description
};

// Uniform result envelope for every checked claim. A FAIL conclusion always
// carries a concrete witness.
struct VerdictReport {
  std::string claim;
  std::vector<Hypothesis> hypotheses;
  std::map<std::string, std::string> computed;
  enum Conclusion { PASS, FAIL, NOT_APPLICABLE } conclusion = PASS;
  std::string witness;
  long samples = 0;
  uint64_t seed = 0;

  bool passed() const { return conclusion == PASS; }
  const char* conclusion_str() const {
    switch (conclusion) {
      case PASS: return "pass";
      case FAIL: return "fail";
      default: return "not-applicable";
    }
  }
};

}  // namespace pgv
