#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ordcif/ordcif.hpp"

namespace test {

inline ordcif::GroupSample group(std::string label, std::initializer_list<std::pair<double, int>> records) {
  ordcif::GroupSample g{std::move(label), {}};
  for (const auto& [t, c] : records) g.records.push_back(ordcif::make_record(t, c));
  return g;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace test
