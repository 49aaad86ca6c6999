#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "sonc/error.hpp"

namespace sonc {

// Largest admissible exponent entry; keeps sums and scalings far from int64 overflow.
inline constexpr std::int64_t kMaxExponentEntry = std::int64_t{1} << 40;

class Exponent {
 public:
  using value_type = std::int64_t;

  Exponent() = default;
  explicit Exponent(std::size_t n) : e_(n, 0) {}
  Exponent(std::initializer_list<value_type> v) : e_(v) { check(); }
  explicit Exponent(std::vector<value_type> v) : e_(std::move(v)) { check(); }

  std::size_t size() const noexcept { return e_.size(); }
  value_type operator[](std::size_t i) const { return e_[i]; }
  const std::vector<value_type>& entries() const noexcept { return e_; }
  auto begin() const noexcept { return e_.begin(); }
  auto end() const noexcept { return e_.end(); }

  bool is_even() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](value_type v) { return v % 2 == 0; });
  }
  bool is_zero() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](value_type v) { return v == 0; });
  }
  value_type degree() const noexcept {
    value_type s = 0;
    for (auto v : e_) s += v;
    return s;
  }

  Exponent operator+(const Exponent& o) const {
    same_size(o);
    std::vector<value_type> r(e_.size());
    for (std::size_t i = 0; i < e_.size(); ++i) r[i] = e_[i] + o.e_[i];
    return Exponent(std::move(r));
  }

  // Entrywise difference; requires o <= *this entrywise.
  Exponent minus(const Exponent& o) const {
    same_size(o);
    std::vector<value_type> r(e_.size());
    for (std::size_t i = 0; i < e_.size(); ++i) r[i] = e_[i] - o.e_[i];
    return Exponent(std::move(r));
  }

  Exponent scaled(value_type k) const {
    if (k < 0) throw PreconditionError("negative exponent scale");
    std::vector<value_type> r(e_.size());
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (k != 0 && e_[i] > kMaxExponentEntry / k) throw PreconditionError("exponent overflow");
      r[i] = e_[i] * k;
    }
    return Exponent(std::move(r));
  }

  // Exact entrywise division.
  Exponent divided(value_type k) const {
    if (k <= 0) throw PreconditionError("nonpositive exponent divisor");
    std::vector<value_type> r(e_.size());
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (e_[i] % k != 0) throw PreconditionError("exponent not divisible by " + std::to_string(k));
      r[i] = e_[i] / k;
    }
    return Exponent(std::move(r));
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(e_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Exponent&, const Exponent&) = default;
  friend auto operator<=>(const Exponent& a, const Exponent& b) { return a.e_ <=> b.e_; }

 private:
  void check() const {
    for (auto v : e_) {
      if (v < 0) throw PreconditionError("negative exponent entry");
      if (v > kMaxExponentEntry) throw PreconditionError("exponent overflow");
    }
  }
  void same_size(const Exponent& o) const {
    if (o.size() != size()) throw PreconditionError("exponent length mismatch");
  }

  std::vector<value_type> e_;
};

// Canonical order: ascending total degree, then x1-heavy first within a degree.
struct GradedOrder {
  bool operator()(const Exponent& a, const Exponent& b) const {
    auto da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return b < a;
  }
};

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto v : e) h = (h ^ std::hash<std::int64_t>{}(v)) * 0x100000001b3ull;
    return h;
  }
};

}  // namespace sonc
