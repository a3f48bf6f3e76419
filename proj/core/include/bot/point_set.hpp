#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bot {

/// Dense row-major storage of `size()` points in R^dim.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t count, int dim) : dim_(dim), data_(count * static_cast<std::size_t>(dim), 0.0) {
    if (dim < 1) throw std::invalid_argument("PointSet: dimension must be positive");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return data_.empty(); }

  std::span<double> operator[](std::size_t i) {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim_) throw std::invalid_argument("PointSet: dimension mismatch");
    data_.insert(data_.end(), p.begin(), p.end());
  }
  void resize(std::size_t count) { data_.resize(count * static_cast<std::size_t>(dim_), 0.0); }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

double distance(std::span<const double> a, std::span<const double> b);

}  // namespace bot
