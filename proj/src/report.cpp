#include "fbh/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>

#include "fbh/io_util.hpp"

namespace fbh::io {

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigInvalid("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw ConfigInvalid("short write to " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ConfigInvalid("cannot rename into place: " + path);
  }
}

}  // namespace fbh::io

namespace fbh {

Json to_json(const Verdict& v) {
  return Json{{"name", v.name},
              {"pass", v.pass},
              {"measured", v.measured},
              {"tolerance", v.tolerance},
              {"provenance", v.provenance}};
}

Json to_json(const LogLogFit& f) {
  return Json{{"exponent", f.exponent}, {"constant", f.constant}, {"residual", f.residual}};
}

bool Report::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["experiment_id"] = experiment_id;
  j["config"] = config_echo;
  j["metrics"] = metrics;
  j["wall_seconds"] = wall_seconds;
  Json vs = Json::array();
  for (const auto& v : verdicts) vs.push_back(fbh::to_json(v));
  j["verdicts"] = vs;
  return j;
}

void Report::write(const std::string& path) const { write_json(to_json(), path); }

void write_json(const Json& j, const std::string& path) {
  io::atomic_write(path, j.dump(2) + "\n");
}

void write_csv(const std::string& header, const std::vector<std::vector<double>>& rows,
               const std::string& path) {
  std::string buf = header + "\n";
  char cell[64];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(cell, sizeof cell, "%.17g", row[i]);
      buf += cell;
      buf += i + 1 == row.size() ? '\n' : ',';
    }
  }
  io::atomic_write(path, buf);
}

}  // namespace fbh
