#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "stochnet/error.hpp"
#include "stochnet/netcore.hpp"

namespace testutil {

inline std::filesystem::path data(const std::string& name) { return std::filesystem::path(STOCHNET_TEST_DATA) / name; }

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("stochnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline stochnet::Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  stochnet::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline stochnet::Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double lo = 0.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  stochnet::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace testutil

// Checks that `expr` throws stochnet::Error carrying `code`.
#define CHECK_THROWS_CODE(expr, expected_code)                                   \
  do {                                                                           \
    bool thrown_ = false;                                                        \
    try {                                                                        \
      (void)(expr);                                                              \
    } catch (const stochnet::Error& e_) {                                        \
      thrown_ = true;                                                            \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());                    \
    }                                                                            \
    CHECK_MESSAGE(thrown_, "expected stochnet::Error from " #expr);              \
  } while (false)
