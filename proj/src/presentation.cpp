#include "hugenfold/presentation.hpp"

#include <algorithm>
#include <limits>

namespace hugenfold {

namespace {

std::string type_label(std::size_t k) { return "type " + std::to_string(k + 1); }

std::vector<bool> parity(const IntVec& z) {
  std::vector<bool> p(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) p[j] = bit_test(abs(z[j]), 0);
  return p;
}

Int squared_norm(const IntVec& z) {
  Int s = 0;
  for (const auto& v : z) s += v * v;
  return s;
}

}  // namespace

Int type_count(const BrickMap& m) {
  Int s = 0;
  for (const auto& [z, lambda] : m) s += lambda;
  return s;
}

PresentationReport check_presentation(const HugeNFoldInstance& inst, const CompactPresentation& cp) {
  PresentationReport rep;
  const Bimatrix& a = inst.bimatrix();
  const std::size_t d = a.d();

  rep.structural_ok = true;
  if (cp.types.size() != inst.num_types()) {
    rep.structural_ok = false;
    rep.issues.push_back("presentation has " + std::to_string(cp.types.size()) + " types, instance has " +
                         std::to_string(inst.num_types()));
  }
  const std::size_t t = std::min(cp.types.size(), inst.num_types());
  bool shapes = true;
  for (std::size_t k = 0; k < cp.types.size(); ++k) {
    if (cp.types[k].empty()) {
      rep.structural_ok = false;
      rep.issues.push_back(type_label(k) + ": empty support");
    }
    for (const auto& [z, lambda] : cp.types[k]) {
      if (z.size() != d) {
        rep.structural_ok = false;
        shapes = false;
        rep.issues.push_back(type_label(k) + ": brick " + to_string(z) + " has wrong width");
      }
      if (lambda <= 0) {
        rep.structural_ok = false;
        rep.issues.push_back(type_label(k) + ": non-positive multiplicity at " + to_string(z));
      }
    }
  }

  rep.counts_ok = cp.types.size() == inst.num_types();
  for (std::size_t k = 0; k < t; ++k) {
    Int c = type_count(cp.types[k]);
    if (c != inst.type(k).count) {
      rep.counts_ok = false;
      rep.issues.push_back(type_label(k) + ": multiplicities sum to " + to_string(c) + ", expected " +
                           to_string(inst.type(k).count));
    }
  }

  rep.bricks_ok = shapes && cp.types.size() == inst.num_types();
  if (shapes) {
    for (std::size_t k = 0; k < t; ++k) {
      const auto& ty = inst.type(k);
      for (const auto& [z, lambda] : cp.types[k]) {
        if (matvec(a.a2(), z) != ty.b) {
          rep.bricks_ok = false;
          rep.issues.push_back(type_label(k) + ": brick " + to_string(z) + " violates A2 z = b");
        }
        if (!in_box(z, ty.lower, ty.upper)) {
          rep.bricks_ok = false;
          rep.issues.push_back(type_label(k) + ": brick " + to_string(z) + " violates bounds");
        }
      }
    }
  }

  rep.aggregate_ok = false;
  if (shapes) {
    IntVec total = zeros(d);
    for (const auto& m : cp.types)
      for (const auto& [z, lambda] : m)
        for (std::size_t j = 0; j < d; ++j) total[j] += lambda * z[j];
    rep.aggregate_ok = matvec(a.a1(), total) == inst.b0();
    if (!rep.aggregate_ok) rep.issues.push_back("A1 times the brick sum differs from b0");
  } else {
    rep.issues.push_back("aggregate not evaluated on malformed bricks");
  }
  return rep;
}

Aggregate aggregate(const CompactPresentation& cp, std::size_t d) {
  Aggregate out;
  out.total = zeros(d);
  for (std::size_t k = 0; k < cp.types.size(); ++k) {
    if (cp.types[k].empty()) throw PreconditionError(type_label(k) + ": empty support");
    IntVec sum = zeros(d);
    for (const auto& [z, lambda] : cp.types[k]) {
      if (z.size() != d) throw DimensionError(type_label(k) + ": brick width differs from d");
      for (std::size_t j = 0; j < d; ++j) sum[j] += lambda * z[j];
    }
    for (std::size_t j = 0; j < d; ++j) out.total[j] += sum[j];
    out.per_type.push_back(std::move(sum));
  }
  return out;
}

Int cost(const HugeNFoldInstance& inst, const CompactPresentation& cp) {
  if (cp.types.size() != inst.num_types()) throw DimensionError("cost: type count mismatch");
  Int c = 0;
  for (std::size_t k = 0; k < cp.types.size(); ++k)
    for (const auto& [z, lambda] : cp.types[k]) c += lambda * dot(inst.type(k).w, z);
  return c;
}

std::vector<IntVec> expand(const HugeNFoldInstance& inst, const CompactPresentation& cp, std::size_t max_bricks) {
  if (inst.n() > max_bricks) {
    throw BudgetError("expand: n = " + to_string(inst.n()) + " exceeds the limit of " + std::to_string(max_bricks) +
                      " bricks");
  }
  if (cp.types.size() != inst.num_types()) throw DimensionError("expand: type count mismatch");
  std::vector<IntVec> out;
  for (std::size_t k = 0; k < cp.types.size(); ++k) {
    if (type_count(cp.types[k]) != inst.type(k).count) {
      throw PreconditionError(type_label(k) + ": multiplicities do not sum to the type count");
    }
    for (const auto& [z, lambda] : cp.types[k])
      for (Int c = 0; c < lambda; ++c) out.push_back(z);
  }
  return out;
}

Int support_potential(const CompactPresentation& cp) {
  Int p = 0;
  for (const auto& m : cp.types)
    for (const auto& [z, lambda] : m) p += lambda * squared_norm(z);
  return p;
}

CompactPresentation reduce_support(const HugeNFoldInstance& inst, const CompactPresentation& cp, ReduceStats* stats) {
  const std::size_t d = inst.bimatrix().d();
  if (cp.types.size() != inst.num_types()) throw PreconditionError("reduce_support: type count mismatch");
  CompactPresentation out = cp;
  for (std::size_t k = 0; k < out.types.size(); ++k) {
    BrickMap& m = out.types[k];
    for (const auto& [z, lambda] : m)
      if (z.size() != d || lambda <= 0) throw PreconditionError(type_label(k) + ": malformed support entry");

    // A small multiplicity squeezed between two huge ones doubles on every
    // merge, so the cap also scales with the bit length of the count.
    const Int initial = m.size();
    const Int count = type_count(m);
    Int cap = initial * initial * (msb(count) + 2);
    cap <<= static_cast<unsigned>(std::min<std::size_t>(d, 4096));
    Int steps = 0;
    Int potential = support_potential(CompactPresentation{{m}});
    while (true) {
      // Smallest pair: the class whose least member is least, with its
      // two least members.
      std::map<std::vector<bool>, std::vector<BrickMap::iterator>> classes;
      for (auto it = m.begin(); it != m.end(); ++it) {
        auto& cls = classes[parity(it->first)];
        if (cls.size() < 2) cls.push_back(it);
      }
      BrickMap::iterator lo = m.end(), hi = m.end();
      for (const auto& [p, cls] : classes) {
        if (cls.size() < 2) continue;
        if (lo == m.end() || cls[0]->first < lo->first) {
          lo = cls[0];
          hi = cls[1];
        }
      }
      if (lo == m.end()) break;
      if (++steps > cap) throw InternalError(type_label(k) + ": support reduction exceeded its step cap");

      IntVec mid(d);
      for (std::size_t j = 0; j < d; ++j) mid[j] = (lo->first[j] + hi->first[j]) / 2;
      const Int moved = std::min(lo->second, hi->second);
      lo->second -= moved;
      hi->second -= moved;
      if (lo->second == 0) m.erase(lo);
      if (hi->second == 0) m.erase(hi);
      m[mid] += 2 * moved;

      Int next = support_potential(CompactPresentation{{m}});
      if (next >= potential) throw InternalError("support reduction failed to lower the potential");
      potential = std::move(next);
      if (stats) ++stats->merges;
    }
  }
  return out;
}

}  // namespace hugenfold
