#ifndef FBH_REPORT_HPP
#define FBH_REPORT_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbh/fitting.hpp"
#include "fbh/types.hpp"

namespace fbh {

using Json = nlohmann::json;

/// One pass/fail line of a report; every verdict carries its tolerance and
/// where the expected value comes from.
struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string provenance;  // oracle / formula / regression that set the target
};

Json to_json(const Verdict& v);
Json to_json(const LogLogFit& f);

/// Report envelope: experiment id, config echo, metrics, verdicts, wall-clock.
struct Report {
  std::string experiment_id;
  Json config_echo = Json::object();
  Json metrics = Json::object();
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;

  bool all_pass() const;
  Json to_json() const;
  void write(const std::string& path) const;  // atomic (temp + rename)
};

void write_json(const Json& j, const std::string& path);
/// CSV series: header row then one row per record.
void write_csv(const std::string& header, const std::vector<std::vector<double>>& rows,
               const std::string& path);

}  // namespace fbh

#endif
