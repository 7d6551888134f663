#pragma once

// Data types of a huge n-fold program and of its compact solutions.

#include <map>
#include <vector>

#include "hugenfold/core.hpp"

namespace hugenfold {

/// One class of bricks: cost, bounds and right-hand side shared by
/// `count` bricks.
struct BrickType {
  IntVec w;
  ExtVec lower;
  ExtVec upper;
  IntVec b;
  Int count;
  friend bool operator==(const BrickType&, const BrickType&) = default;
};

class HugeNFoldInstance {
public:
  /// Validates dimensions, counts and bound order.
  HugeNFoldInstance(Bimatrix a, std::vector<BrickType> types, IntVec b0);

  const Bimatrix& bimatrix() const { return a_; }
  const std::vector<BrickType>& types() const { return types_; }
  const BrickType& type(std::size_t k) const { return types_.at(k); }
  std::size_t num_types() const { return types_.size(); }
  const IntVec& b0() const { return b0_; }
  /// Total number of bricks.
  const Int& n() const { return n_; }

  friend bool operator==(const HugeNFoldInstance&, const HugeNFoldInstance&) = default;

private:
  Bimatrix a_;
  std::vector<BrickType> types_;
  IntVec b0_;
  Int n_;
};

/// Multiplicity of each distinct brick; keys iterate lexicographically.
using BrickMap = std::map<IntVec, Int>;

struct CompactPresentation {
  std::vector<BrickMap> types;
  friend bool operator==(const CompactPresentation&, const CompactPresentation&) = default;
};

}  // namespace hugenfold
