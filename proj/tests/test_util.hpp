#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "scriptsim/dtm.hpp"
#include "scriptsim/error.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("scriptsim_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Random sparse non-negative vector; roughly `density` of entries nonzero.
inline scriptsim::SparseVector random_sparse(std::mt19937_64& gen, std::size_t dim, double density,
                                             double scale = 5.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> dense(dim, 0.0);
  for (auto& v : dense) {
    if (u(gen) < density) v = u(gen) < 0.5 ? std::floor(u(gen) * scale) + 1 : u(gen) * scale;
  }
  return scriptsim::SparseVector::from_dense(dense);
}

// Two Gaussian clouds in `dim` dimensions whose means are `separation`
// standard deviations apart, labeled Proverb and Wisdom alternately. Means
// sit far from the origin so every coordinate stays positive.
struct Cloud {
  std::vector<scriptsim::SparseVector> rows;
  std::vector<scriptsim::BookLabel> labels;
};

inline Cloud two_clouds(std::uint64_t seed, std::size_t n, std::size_t dim, double separation) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double shift = separation / std::sqrt(static_cast<double>(dim));
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i % 2 == 1;
    std::vector<double> x(dim);
    for (auto& v : x) v = std::max(1e-3, 50.0 + (second ? shift : 0.0) + z(gen));
    c.rows.push_back(scriptsim::SparseVector::from_dense(x));
    c.labels.push_back(second ? scriptsim::BookLabel::Wisdom : scriptsim::BookLabel::Proverb);
  }
  return c;
}

template <class F>
scriptsim::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const scriptsim::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a scriptsim::Error");
}

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace testutil
