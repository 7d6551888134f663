#include "hugenfold/instance.hpp"

#include <string>

namespace hugenfold {

HugeNFoldInstance::HugeNFoldInstance(Bimatrix a, std::vector<BrickType> types, IntVec b0)
    : a_(std::move(a)), types_(std::move(types)), b0_(std::move(b0)), n_(0) {
  if (types_.empty()) throw PreconditionError("instance needs at least one brick type");
  if (b0_.size() != a_.r()) {
    throw DimensionError("b0 has " + std::to_string(b0_.size()) + " entries, A1 has " + std::to_string(a_.r()) +
                         " rows");
  }
  const std::size_t d = a_.d();
  for (std::size_t k = 0; k < types_.size(); ++k) {
    const auto& t = types_[k];
    const std::string where = "type " + std::to_string(k + 1) + ": ";
    if (t.w.size() != d || t.lower.size() != d || t.upper.size() != d) {
      throw DimensionError(where + "cost and bounds need " + std::to_string(d) + " entries");
    }
    if (t.b.size() != a_.s()) {
      throw DimensionError(where + "b has " + std::to_string(t.b.size()) + " entries, A2 has " +
                           std::to_string(a_.s()) + " rows");
    }
    if (t.count < 1) throw PreconditionError(where + "count must be positive");
    for (std::size_t j = 0; j < d; ++j) {
      if (t.lower[j].is_pos_inf() || t.upper[j].is_neg_inf()) {
        throw PreconditionError(where + "+inf is only an upper bound and -inf only a lower bound");
      }
      if (t.lower[j] > t.upper[j]) throw PreconditionError(where + "lower bound exceeds upper bound");
    }
    n_ += t.count;
  }
}

}  // namespace hugenfold
