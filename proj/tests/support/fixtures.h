#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace equivfuse::testkit {

inline std::string fixturePath(const std::string &rel) { return std::string(EQUIVFUSE_FIXTURES) + "/" + rel; }

inline std::string readFixture(const std::string &rel) {
  std::ifstream in(fixturePath(rel), std::ios::binary);
  if (!in)
    throw std::runtime_error("missing fixture " + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace equivfuse::testkit
