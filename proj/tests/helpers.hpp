#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string dataDir() { return DMARKET_DATA_DIR; }

inline std::string dataPath(const std::string& name) {
  return dataDir() + "/" + name;
}

inline bool approxEq(double a, double b, double tol) {
  return std::fabs(a - b) <= tol;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Fresh scratch directory under the system temp root, removed on
/// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("dmarket_test_" + tag + "_" + std::to_string(std::rand()));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  std::string path() const { return base_.string(); }
  std::string file(const std::string& name) const {
    return (base_ / name).string();
  }

 private:
  std::filesystem::path base_;
};

}  // namespace testutil
