#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace avn::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kNotConverged = 3 };

/// Parses "0.5", "pi", "pi/6", "-pi/3", "3pi/8", "3*pi/8".
inline double parse_angle(std::string s) {
  std::erase(s, ' ');
  std::erase(s, '*');
  if (s.empty()) throw std::invalid_argument("empty angle");
  const auto p = s.find("pi");
  if (p == std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad angle '" + s + "'");
    return v;
  }
  double coeff = 1.0;
  const std::string head = s.substr(0, p);
  if (head == "-")
    coeff = -1.0;
  else if (!head.empty() && head != "+")
    coeff = std::stod(head);
  double denom = 1.0;
  const std::string tail = s.substr(p + 2);
  if (!tail.empty()) {
    if (tail[0] != '/') throw std::invalid_argument("bad angle '" + s + "'");
    denom = std::stod(tail.substr(1));
  }
  return coeff * std::numbers::pi / denom;
}

/// Writes to the named file, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::ios_base::failure("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (file_.fail()) throw std::ios_base::failure("failed writing output file");
  }

 private:
  std::ofstream file_;
};

}  // namespace avn::cli
