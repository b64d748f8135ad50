#ifndef FBH_ACCEPT_HPP
#define FBH_ACCEPT_HPP

#include <string>
#include <vector>

#include "fbh/report.hpp"

namespace fbh {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<Verdict> verdicts;
  Json details = Json::object();
};

/// Run one acceptance criterion (1..13).
CriterionResult run_criterion(int id);

/// Run the whole suite; prints one pass/fail line per criterion when verbose.
/// The final entry (id 14) aggregates the suite and its wall clock.
std::vector<CriterionResult> run_acceptance(int threads = 1, bool verbose = true);

int criterion_count();

}  // namespace fbh

#endif
