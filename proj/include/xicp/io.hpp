#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xicp/geometry.hpp"
#include "xicp/localizability.hpp"
#include "xicp/metrics.hpp"

namespace xicp {

/// Shortest round-trippable decimal rendering, locale-independent.
std::string format_double(double value);

/// ASCII PLY with properties x y z [nx ny nz]; the frame label travels in a
/// comment line.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_ply(const std::filesystem::path& path);

/// Trajectory CSV with header t,tx,ty,tz,rx,ry,rz (rotation vector, radians).
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// One row per ICP iteration of the per-frame detector output.
struct LocalizabilityCsvRow {
  int frame = 0;
  int iteration = 0;
  Vec6 eigenvalues = Vec6::Zero();  // [r1 r2 r3 t1 t2 t3]
  Vec6 l_combined = Vec6::Zero();
  Vec6 l_strong = Vec6::Zero();
  std::array<Localizability, 6> eta{};
};

LocalizabilityCsvRow to_csv_row(const LocalizabilityReport& report, int frame,
                                int iteration);
void write_localizability_csv(const std::filesystem::path& path,
                              const std::vector<LocalizabilityCsvRow>& rows);
std::vector<LocalizabilityCsvRow> read_localizability_csv(
    const std::filesystem::path& path);

/// Flat sectioned key-value config text: '[section]' headers, 'key = value'
/// entries, '#' comments. Repeated keys accumulate in order (waypoints).
class ConfigMap {
 public:
  void set(const std::string& section, const std::string& key,
           const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::vector<std::string> get_all(const std::string& section,
                                   const std::string& key) const;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      sections_;
};

ConfigMap parse_config_file(const std::filesystem::path& path);
ConfigMap parse_config_text(const std::string& text);

}  // namespace xicp
