#include "hugenfold/augment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>

#include <omp.h>

#include "hugenfold/presentation.hpp"

namespace hugenfold {

namespace {

// Largest a >= 0 with lower <= z + a*h <= upper; nullopt means unlimited.
// Assumes z itself is inside the box.
std::optional<Int> alpha_cap(const IntVec& z, const IntVec& h, const ExtVec& lower, const ExtVec& upper) {
  std::optional<Int> cap;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (h[j] > 0 && upper[j].finite()) {
      Int room = upper[j].value() - z[j];
      Int q = room < 0 ? Int(0) : room / h[j];
      if (!cap || q < *cap) cap = q;
    } else if (h[j] < 0 && lower[j].finite()) {
      Int room = z[j] - lower[j].value();
      Int q = room < 0 ? Int(0) : room / -h[j];
      if (!cap || q < *cap) cap = q;
    }
  }
  return cap;
}

struct Slot {
  std::size_t type;
  const IntVec* brick;
  Int lambda;
};

std::vector<Slot> collect_slots(const CompactPresentation& cp) {
  std::vector<Slot> slots;
  for (std::size_t k = 0; k < cp.types.size(); ++k)
    for (const auto& [z, lambda] : cp.types[k]) slots.push_back({k, &z, lambda});
  return slots;
}

struct Candidate {
  Int improvement;
  Int alpha;
  std::size_t templ = 0;
  std::vector<std::size_t> seq;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.improvement != b.improvement) return a.improvement < b.improvement;
  if (a.templ != b.templ) return a.templ < b.templ;
  return a.seq < b.seq;
}

struct Entry {
  bool ok = false;
  bool unlimited = false;
  Int cap;
  Int cost;
};

class TemplateScan {
public:
  TemplateScan(const HugeNFoldInstance& inst, const std::vector<Slot>& slots, std::atomic<std::uint64_t>& leaves,
               std::uint64_t budget)
      : inst_(inst), slots_(slots), leaves_(leaves), budget_(budget) {}

  void scan(const Template& h, std::size_t index, std::optional<Candidate>& best) {
    const std::size_t p = h.bricks.size();
    if (p == 0) return;
    table_.assign(p, {});
    for (std::size_t i = 0; i < p; ++i) {
      if (i > 0 && h.bricks[i] == h.bricks[i - 1]) {
        table_[i] = table_[i - 1];
        continue;
      }
      table_[i].resize(slots_.size());
      for (std::size_t s = 0; s < slots_.size(); ++s) {
        const auto& ty = inst_.type(slots_[s].type);
        Entry e;
        auto cap = alpha_cap(*slots_[s].brick, h.bricks[i], ty.lower, ty.upper);
        e.unlimited = !cap.has_value();
        e.ok = e.unlimited || *cap >= 1;
        if (cap) e.cap = *cap;
        if (e.ok) e.cost = dot(ty.w, h.bricks[i]);
        table_[i][s] = std::move(e);
      }
    }
    h_ = &h;
    index_ = index;
    best_ = &best;
    used_.assign(slots_.size(), 0);
    seq_.assign(p, 0);
    dfs(0, 0, std::nullopt, Int(0));
  }

private:
  void dfs(std::size_t i, std::size_t start, const std::optional<Int>& alpha, const Int& cost) {
    const std::size_t p = h_->bricks.size();
    if (i == p) {
      if (leaves_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
        throw BudgetError("augmentation: lifting-map budget of " + std::to_string(budget_) + " exceeded");
      }
      if (cost >= 0) return;
      if (!alpha) throw UnboundedError("improving direction with no finite step bound: objective is unbounded");
      Candidate c{*alpha * cost, *alpha, index_, seq_};
      if (!*best_ || better(c, **best_)) *best_ = std::move(c);
      return;
    }
    const std::size_t from = (i > 0 && h_->bricks[i] == h_->bricks[i - 1]) ? start : 0;
    for (std::size_t s = from; s < slots_.size(); ++s) {
      const Entry& e = table_[i][s];
      if (!e.ok) continue;
      if (slots_[s].lambda <= used_[s]) continue;
      std::optional<Int> next = alpha;
      if (!e.unlimited && (!next || e.cap < *next)) next = e.cap;
      ++used_[s];
      seq_[i] = s;
      dfs(i + 1, s, next, cost + e.cost);
      --used_[s];
    }
  }

  const HugeNFoldInstance& inst_;
  const std::vector<Slot>& slots_;
  std::atomic<std::uint64_t>& leaves_;
  std::uint64_t budget_;
  std::vector<std::vector<Entry>> table_;
  const Template* h_ = nullptr;
  std::size_t index_ = 0;
  std::optional<Candidate>* best_ = nullptr;
  std::vector<std::size_t> used_;
  std::vector<std::size_t> seq_;
};

AugmentStep to_step(const GraverTemplates& templates, const std::vector<Slot>& slots, const Candidate& c) {
  AugmentStep step;
  step.template_index = c.templ;
  step.h = templates.templates[c.templ];
  for (std::size_t s : c.seq) step.phi.push_back({slots[s].type, *slots[s].brick});
  step.alpha = c.alpha;
  step.improvement = c.improvement;
  return step;
}

void check_width(const HugeNFoldInstance& inst, const GraverTemplates& templates) {
  if (templates.bimatrix.d() != inst.bimatrix().d()) throw DimensionError("templates belong to another brick width");
}

}  // namespace

GraverTemplates instance_templates(const HugeNFoldInstance& inst, const GraverOptions& options) {
  const std::size_t g = graver_complexity(inst.bimatrix(), options);
  if (inst.n() >= g) return graver_templates(inst.bimatrix(), g, options);
  GraverTemplates t = graver_templates(inst.bimatrix(), static_cast<std::size_t>(inst.n()), options);
  t.complexity = g;
  return t;
}

std::optional<AugmentStep> max_step(const HugeNFoldInstance& inst, const CompactPresentation& cp, const Template& h,
                                    const LiftingMap& phi) {
  if (phi.size() != h.bricks.size()) throw DimensionError("lifting map must assign every template brick");
  std::map<SlotRef, Int> used;
  for (const auto& s : phi) {
    if (s.type >= cp.types.size()) throw PreconditionError("lifting map names a missing type");
    auto it = cp.types[s.type].find(s.brick);
    if (it == cp.types[s.type].end()) throw PreconditionError("lifting map names a brick outside the support");
    if (++used[s] > it->second) throw PreconditionError("lifting map exceeds the multiplicity of " + to_string(s.brick));
  }
  Int direction = 0;
  std::optional<Int> alpha;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto& ty = inst.type(phi[i].type);
    direction += dot(ty.w, h.bricks[i]);
    auto cap = alpha_cap(phi[i].brick, h.bricks[i], ty.lower, ty.upper);
    if (cap && (!alpha || *cap < *alpha)) alpha = cap;
  }
  if (direction >= 0) return std::nullopt;
  if (!alpha) throw UnboundedError("improving direction with no finite step bound: objective is unbounded");
  if (*alpha < 1) return std::nullopt;
  AugmentStep step;
  step.h = h;
  step.phi = phi;
  step.alpha = *alpha;
  step.improvement = *alpha * direction;
  return step;
}

AugmentStep batch_step(const HugeNFoldInstance& inst, const CompactPresentation& cp, AugmentStep step) {
  std::map<SlotRef, std::vector<std::size_t>> by_slot;
  for (std::size_t i = 0; i < step.phi.size(); ++i) by_slot[step.phi[i]].push_back(i);

  std::optional<Int> beta;
  std::map<SlotRef, Int> replicate;
  for (const auto& [slot, idx] : by_slot) {
    const Int& lambda = cp.types.at(slot.type).at(slot.brick);
    const auto& ty = inst.type(slot.type);
    Int rep = lambda / Int(idx.size());
    std::optional<Int> scale;
    bool unlimited = true;
    for (std::size_t i : idx) {
      auto cap = alpha_cap(slot.brick, step.h.bricks[i], ty.lower, ty.upper);
      if (!cap) continue;
      Int k = *cap / step.alpha;
      if (unlimited || k < *scale) scale = k;
      unlimited = false;
    }
    replicate[slot] = rep;
    if (unlimited) continue;
    Int here = std::max(rep, *scale);
    if (!beta || here < *beta) beta = here;
  }
  if (!beta) throw UnboundedError("batched step has no finite repeat bound: objective is unbounded");
  if (*beta < 1) throw InternalError("batch_step called with an infeasible step");
  step.repeat = *beta;
  step.scaled.assign(step.phi.size(), false);
  for (const auto& [slot, idx] : by_slot)
    if (replicate[slot] < *beta)
      for (std::size_t i : idx) step.scaled[i] = true;
  return step;
}

CompactPresentation apply_step(const CompactPresentation& cp, const AugmentStep& step) {
  if (step.phi.size() != step.h.bricks.size()) throw InternalError("apply_step: malformed step");
  std::vector<std::map<IntVec, Int>> delta(cp.types.size());
  for (std::size_t i = 0; i < step.phi.size(); ++i) {
    const SlotRef& s = step.phi[i];
    if (s.type >= cp.types.size()) throw InternalError("apply_step: step names a missing type");
    const bool scaled = !step.scaled.empty() && step.scaled[i];
    const Int copies = scaled ? Int(1) : step.repeat;
    const Int factor = scaled ? step.repeat * step.alpha : step.alpha;
    IntVec target = s.brick;
    for (std::size_t j = 0; j < target.size(); ++j) target[j] += factor * step.h.bricks[i][j];
    delta[s.type][s.brick] -= copies;
    delta[s.type][target] += copies;
  }
  CompactPresentation out = cp;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    for (const auto& [z, dz] : delta[k]) {
      if (dz == 0) continue;
      Int& lambda = out.types[k][z];
      lambda += dz;
      if (lambda < 0) throw InternalError("apply_step: multiplicity of " + to_string(z) + " would become negative");
      if (lambda == 0) out.types[k].erase(z);
    }
  }
  return out;
}

std::optional<AugmentStep> best_augmentation_serial(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                                    const GraverTemplates& templates, const AugmentOptions& options) {
  check_width(inst, templates);
  const auto slots = collect_slots(cp);
  std::atomic<std::uint64_t> leaves{0};
  TemplateScan scan(inst, slots, leaves, options.phi_budget);
  std::optional<Candidate> best;
  for (std::size_t t = 0; t < templates.templates.size(); ++t) scan.scan(templates.templates[t], t, best);
  if (!best) return std::nullopt;
  return to_step(templates, slots, *best);
}

std::optional<AugmentStep> best_augmentation_parallel(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                                      const GraverTemplates& templates,
                                                      const AugmentOptions& options) {
  check_width(inst, templates);
  const auto slots = collect_slots(cp);
  std::atomic<std::uint64_t> leaves{0};
  std::optional<Candidate> best;
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(templates.templates.size());
  const int threads = std::max(1, options.threads);

#pragma omp parallel num_threads(threads)
  {
    TemplateScan scan(inst, slots, leaves, options.phi_budget);
    std::optional<Candidate> local;
    bool failed = false;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      if (failed) continue;
      try {
        scan.scan(templates.templates[static_cast<std::size_t>(t)], static_cast<std::size_t>(t), local);
      } catch (...) {
        failed = true;
#pragma omp critical(hugenfold_augment_failure)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp critical(hugenfold_augment_merge)
    if (local && (!best || better(*local, *best))) best = std::move(local);
  }
  if (failure) std::rethrow_exception(failure);
  if (!best) return std::nullopt;
  return to_step(templates, slots, *best);
}

std::optional<AugmentStep> best_augmentation(const HugeNFoldInstance& inst, const CompactPresentation& cp,
                                             const GraverTemplates& templates, const AugmentOptions& options) {
  if (options.threads > 1) return best_augmentation_parallel(inst, cp, templates, options);
  return best_augmentation_serial(inst, cp, templates, options);
}

OptimizeResult optimize(const HugeNFoldInstance& inst, const CompactPresentation& cp0, const GraverTemplates& templates,
                        const OptimizeOptions& options) {
  OptimizeResult res;
  res.cp = options.reduce ? reduce_support(inst, cp0) : cp0;
  Int current = cost(inst, res.cp);
  while (true) {
    auto step = best_augmentation(inst, res.cp, templates, options.augment);
    if (!step) {
      res.proven_optimal = templates.complete;
      return res;
    }
    if (res.rounds == options.max_rounds) {
      throw BudgetError("optimize: no fixed point after " + std::to_string(options.max_rounds) + " rounds");
    }
    if (options.batch) step = batch_step(inst, res.cp, std::move(*step));
    CompactPresentation next = apply_step(res.cp, *step);
    const Int after = cost(inst, next);
    if (after != current + step->total_improvement()) throw InternalError("optimize: cost change differs from prediction");
    if (options.on_step) options.on_step(res.cp, *step);
    res.cp = options.reduce ? reduce_support(inst, next) : std::move(next);
    res.total_improvement += step->total_improvement();
    current = after;
    ++res.rounds;
  }
}

}  // namespace hugenfold
