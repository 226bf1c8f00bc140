#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace stochopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Sample indices into a finite-sum problem. A batch is a multiset of these.
using Batch = std::vector<std::size_t>;
using BatchView = std::span<const std::size_t>;

}  // namespace stochopt
