#include "xicp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xicp/error.hpp"

namespace xicp {

std::string format_double(double value) {
  char buffer[40];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  return in;
}

Localizability category_from_string(const std::string& s) {
  if (s == "none") return Localizability::None;
  if (s == "partial") return Localizability::Partial;
  if (s == "full") return Localizability::Full;
  throw IoError("unknown localizability category '" + s + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) {
    fields.push_back(field);
  }
  return fields;
}

}  // namespace

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  if (!cloud.frame.empty()) {
    out << "comment frame " << cloud.frame << "\n";
  }
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) {
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  }
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z());
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normals[i];
      out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
          << format_double(n.z());
    }
    out << '\n';
  }
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "ply") {
    throw IoError(path.string() + ": not a PLY file");
  }

  PointCloud cloud;
  std::size_t vertex_count = 0;
  std::vector<std::string> properties;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream stream(line);
    std::string token;
    stream >> token;
    if (token == "format") {
      std::string format;
      stream >> format;
      if (format != "ascii") {
        throw IoError(path.string() + ": only ascii PLY is supported");
      }
    } else if (token == "comment") {
      std::string key;
      stream >> key;
      if (key == "frame") {
        stream >> cloud.frame;
      }
    } else if (token == "element") {
      std::string name;
      stream >> name >> vertex_count;
      if (name != "vertex") {
        throw IoError(path.string() + ": unsupported element '" + name + "'");
      }
    } else if (token == "property") {
      std::string type, name;
      stream >> type >> name;
      properties.push_back(name);
    }
  }

  const bool has_normals = properties.size() >= 6;
  cloud.points.reserve(vertex_count);
  if (has_normals) {
    cloud.normals.reserve(vertex_count);
  }
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) {
      throw IoError(path.string() + ": truncated vertex data");
    }
    std::istringstream stream(line);
    Vec3 p, n;
    stream >> p.x() >> p.y() >> p.z();
    if (has_normals) {
      stream >> n.x() >> n.y() >> n.z();
      cloud.normals.push_back(n);
    }
    if (!stream) {
      throw IoError(path.string() + ": malformed vertex line");
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& trajectory) {
  std::ofstream out = open_out(path);
  out << "t,tx,ty,tz,rx,ry,rz\n";
  for (const StampedPose& stamped : trajectory.poses) {
    const Vec3& t = stamped.pose.translation;
    const Vec3 r = log_rotmat(stamped.pose.rotation);
    out << format_double(stamped.t) << ',' << format_double(t.x()) << ','
        << format_double(t.y()) << ',' << format_double(t.z()) << ','
        << format_double(r.x()) << ',' << format_double(r.y()) << ','
        << format_double(r.z()) << '\n';
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "t,tx,ty,tz,rx,ry,rz") {
    throw IoError(path.string() + ": unexpected trajectory header");
  }
  Trajectory trajectory;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw IoError(path.string() + ": malformed trajectory row");
    }
    StampedPose stamped;
    stamped.t = std::stod(fields[0]);
    stamped.pose.translation =
        Vec3(std::stod(fields[1]), std::stod(fields[2]), std::stod(fields[3]));
    stamped.pose.rotation = exp_rotvec(
        Vec3(std::stod(fields[4]), std::stod(fields[5]), std::stod(fields[6])));
    trajectory.poses.push_back(stamped);
  }
  return trajectory;
}

LocalizabilityCsvRow to_csv_row(const LocalizabilityReport& report, int frame,
                                int iteration) {
  LocalizabilityCsvRow row;
  row.frame = frame;
  row.iteration = iteration;
  row.eigenvalues.head<3>() = report.basis.sigma_r;
  row.eigenvalues.tail<3>() = report.basis.sigma_t;
  row.l_combined = report.tables.l_combined;
  row.l_strong = report.tables.l_strong;
  row.eta = report.eta;
  return row;
}

namespace {
constexpr const char* kLocalizabilityHeader =
    "frame,iteration,"
    "eig_r1,eig_r2,eig_r3,eig_t1,eig_t2,eig_t3,"
    "lc_r1,lc_r2,lc_r3,lc_t1,lc_t2,lc_t3,"
    "ls_r1,ls_r2,ls_r3,ls_t1,ls_t2,ls_t3,"
    "cat_r1,cat_r2,cat_r3,cat_t1,cat_t2,cat_t3";
}

void write_localizability_csv(const std::filesystem::path& path,
                              const std::vector<LocalizabilityCsvRow>& rows) {
  std::ofstream out = open_out(path);
  out << kLocalizabilityHeader << '\n';
  for (const LocalizabilityCsvRow& row : rows) {
    out << row.frame << ',' << row.iteration;
    for (int j = 0; j < 6; ++j) {
      out << ',' << format_double(row.eigenvalues[j]);
    }
    for (int j = 0; j < 6; ++j) {
      out << ',' << format_double(row.l_combined[j]);
    }
    for (int j = 0; j < 6; ++j) {
      out << ',' << format_double(row.l_strong[j]);
    }
    for (int j = 0; j < 6; ++j) {
      out << ',' << to_string(row.eta[j]);
    }
    out << '\n';
  }
}

std::vector<LocalizabilityCsvRow> read_localizability_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kLocalizabilityHeader) {
    throw IoError(path.string() + ": unexpected localizability header");
  }
  std::vector<LocalizabilityCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 26) {
      throw IoError(path.string() + ": malformed localizability row");
    }
    LocalizabilityCsvRow row;
    row.frame = std::stoi(fields[0]);
    row.iteration = std::stoi(fields[1]);
    for (int j = 0; j < 6; ++j) {
      row.eigenvalues[j] = std::stod(fields[2 + j]);
      row.l_combined[j] = std::stod(fields[8 + j]);
      row.l_strong[j] = std::stod(fields[14 + j]);
      row.eta[j] = category_from_string(fields[20 + j]);
    }
    rows.push_back(row);
  }
  return rows;
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  sections_[section].emplace_back(key, value);
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) {
    return false;
  }
  for (const auto& [k, v] : it->second) {
    if (k == key) {
      return true;
    }
  }
  return false;
}

std::string ConfigMap::get_string(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) {
    return fallback;
  }
  std::string value = fallback;
  for (const auto& [k, v] : it->second) {
    if (k == key) {
      value = v;  // last assignment wins
    }
  }
  return value;
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  const std::string value = get_string(section, key, "");
  if (value.empty()) {
    return fallback;
  }
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw ConfigError("bad number for [" + section + "] " + key + ": '" +
                      value + "'");
  }
}

int ConfigMap::get_int(const std::string& section, const std::string& key,
                       int fallback) const {
  const std::string value = get_string(section, key, "");
  if (value.empty()) {
    return fallback;
  }
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for [" + section + "] " + key + ": '" +
                      value + "'");
  }
}

std::vector<std::string> ConfigMap::get_all(const std::string& section,
                                            const std::string& key) const {
  std::vector<std::string> values;
  const auto it = sections_.find(section);
  if (it == sections_.end()) {
    return values;
  }
  for (const auto& [k, v] : it->second) {
    if (k == key) {
      values.push_back(v);
    }
  }
  return values;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap config;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    config.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace xicp
