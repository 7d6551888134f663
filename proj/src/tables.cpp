#include "hugenfold/tables.hpp"

#include <map>
#include <mutex>
#include <set>

#include "hugenfold/presentation.hpp"

namespace hugenfold {

namespace {

IntVec slice(const IntVec& v, std::size_t from, std::size_t len) {
  return IntVec(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + len));
}

IntMatrix columns(const IntMatrix& a, std::size_t from, std::size_t len) {
  IntMatrix out(a.rows(), len);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < len; ++j) out(i, j) = a(i, from + j);
  return out;
}

Int sum(const IntVec& v) {
  Int s = 0;
  for (const auto& x : v) s += x;
  return s;
}

// Brick layout of a slack program: [x (d) | y (r) | z (s)].
struct Layout {
  std::size_t d = 0, r = 0, s = 0;
};

Layout layout_of(const Bimatrix& c) {
  Layout lay{0, c.r(), c.s()};
  if (c.d() <= lay.r + lay.s) throw PreconditionError("not an auxiliary bimatrix: too few columns");
  lay.d = c.d() - lay.r - lay.s;
  return lay;
}

bool has_aux_shape(const Bimatrix& c, const Layout& lay) {
  for (std::size_t i = 0; i < lay.r; ++i) {
    for (std::size_t j = 0; j < lay.r; ++j)
      if (c.a1()(i, lay.d + j) != (i == j ? 1 : 0)) return false;
    for (std::size_t j = 0; j < lay.s; ++j)
      if (c.a1()(i, lay.d + lay.r + j) != 0) return false;
  }
  for (std::size_t i = 0; i < lay.s; ++i) {
    for (std::size_t j = 0; j < lay.r; ++j)
      if (c.a2()(i, lay.d + j) != 0) return false;
    for (std::size_t j = 0; j < lay.s; ++j)
      if (c.a2()(i, lay.d + lay.r + j) != (i == j ? 1 : 0)) return false;
  }
  return true;
}

bool has_slack_costs(const HugeNFoldInstance& aux, const Layout& lay) {
  for (const auto& ty : aux.types()) {
    for (std::size_t j = 0; j < aux.bimatrix().d(); ++j) {
      const bool slack = j >= lay.d;
      if (ty.w[j] != (slack ? 1 : 0)) return false;
      if (!(ty.lower[j] == Int(0))) return false;
      if (slack && !ty.upper[j].is_pos_inf()) return false;
    }
    for (const auto& v : ty.b)
      if (v < 0) return false;
  }
  for (const auto& v : aux.b0())
    if (v < 0) return false;
  return true;
}

PhaseOneResult feasible_from_aux(const HugeNFoldInstance& inst, const CompactPresentation& aux_cp, std::string method,
                                 std::size_t rounds) {
  PhaseOneResult out;
  out.feasible = true;
  out.solution = reduce_support(inst, strip_slack(inst, aux_cp));
  if (!check_presentation(inst, *out.solution).ok()) throw InternalError("zero-slack point failed verification");
  out.method = std::move(method);
  out.rounds = rounds;
  return out;
}

}  // namespace

Int HugeTableInstance::n() const {
  Int s = 0;
  for (const auto& t : types) s += t.count;
  return s;
}

void validate_table(const HugeTableInstance& tbl) {
  if (tbl.l == 0 || tbl.m == 0) throw PreconditionError("table needs l, m >= 1");
  if (tbl.line_sums.rows() != tbl.l || tbl.line_sums.cols() != tbl.m) throw DimensionError("line_sums must be l x m");
  if (tbl.types.empty()) throw PreconditionError("table needs at least one type");
  for (std::size_t i = 0; i < tbl.l; ++i)
    for (std::size_t j = 0; j < tbl.m; ++j)
      if (tbl.line_sums(i, j) < 0) throw PreconditionError("line sums must be nonnegative");
  for (std::size_t k = 0; k < tbl.types.size(); ++k) {
    const auto& t = tbl.types[k];
    const std::string where = "type " + std::to_string(k + 1) + ": ";
    if (t.rows.size() != tbl.l) throw DimensionError(where + "row sums need l entries");
    if (t.cols.size() != tbl.m) throw DimensionError(where + "column sums need m entries");
    for (const auto& v : t.rows)
      if (v < 0) throw PreconditionError(where + "row sums must be nonnegative");
    for (const auto& v : t.cols)
      if (v < 0) throw PreconditionError(where + "column sums must be nonnegative");
    if (t.count < 1) throw PreconditionError(where + "count must be positive");
  }
}

Bimatrix table_bimatrix(std::size_t l, std::size_t m) {
  const std::size_t d = l * m;
  IntMatrix a2(l + m, d);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      a2(i, i + l * j) = 1;
      a2(l + j, i + l * j) = 1;
    }
  return Bimatrix(IntMatrix::identity(d), a2);
}

HugeNFoldInstance encode_table(const HugeTableInstance& tbl) {
  validate_table(tbl);
  const std::size_t d = tbl.l * tbl.m;
  std::vector<BrickType> types;
  for (const auto& t : tbl.types) {
    IntVec b = t.rows;
    b.insert(b.end(), t.cols.begin(), t.cols.end());
    types.push_back({zeros(d), ExtVec(d, ExtInt(0)), ExtVec(d, ExtInt::pos_inf()), std::move(b), t.count});
  }
  IntVec b0(d);
  for (std::size_t i = 0; i < tbl.l; ++i)
    for (std::size_t j = 0; j < tbl.m; ++j) b0[i + tbl.l * j] = tbl.line_sums(i, j);
  return HugeNFoldInstance(table_bimatrix(tbl.l, tbl.m), std::move(types), std::move(b0));
}

IntMatrix layer_matrix(const IntVec& z, std::size_t l, std::size_t m) {
  if (z.size() != l * m) throw DimensionError("layer has wrong length");
  IntMatrix out(l, m);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = z[i + l * j];
  return out;
}

Auxiliary build_auxiliary(const HugeNFoldInstance& inst) {
  const Bimatrix& a = inst.bimatrix();
  const std::size_t d = a.d(), r = a.r(), s = a.s(), c = d + r + s;
  for (const auto& v : inst.b0())
    if (v < 0) throw PreconditionError("slack program needs b0 >= 0");
  for (std::size_t k = 0; k < inst.num_types(); ++k) {
    const auto& ty = inst.type(k);
    for (const auto& v : ty.b)
      if (v < 0) throw PreconditionError("slack program needs b^k >= 0 (type " + std::to_string(k + 1) + ")");
    for (const auto& lo : ty.lower)
      if (!(lo == Int(0))) throw PreconditionError("slack program needs zero lower bounds (type " + std::to_string(k + 1) + ")");
  }

  IntMatrix c1(r, c), c2(s, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < d; ++j) c1(i, j) = a.a1()(i, j);
    c1(i, d + i) = 1;
  }
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < d; ++j) c2(i, j) = a.a2()(i, j);
    c2(i, d + r + i) = 1;
  }

  std::vector<BrickType> types;
  for (const auto& ty : inst.types()) {
    IntVec w(c, 0);
    ExtVec lower(c, ExtInt(0)), upper(c, ExtInt::pos_inf());
    for (std::size_t j = d; j < c; ++j) w[j] = 1;
    for (std::size_t j = 0; j < d; ++j) upper[j] = ty.upper[j];
    types.push_back({std::move(w), std::move(lower), std::move(upper), ty.b, ty.count});
  }
  HugeNFoldInstance aux(Bimatrix(std::move(c1), std::move(c2)), std::move(types), inst.b0());

  auto brick = [&](const IntVec& y, const IntVec& z) {
    IntVec v = zeros(d);
    v.insert(v.end(), y.begin(), y.end());
    v.insert(v.end(), z.begin(), z.end());
    return v;
  };
  CompactPresentation cp0;
  cp0.types.resize(inst.num_types());
  for (std::size_t k = 0; k < inst.num_types(); ++k) {
    const auto& ty = inst.type(k);
    if (k == 0) {
      cp0.types[0][brick(inst.b0(), ty.b)] += 1;
      if (ty.count > 1) cp0.types[0][brick(zeros(r), ty.b)] += ty.count - 1;
    } else {
      cp0.types[k][brick(zeros(r), ty.b)] = ty.count;
    }
  }
  return {std::move(aux), std::move(cp0)};
}

CompactPresentation strip_slack(const HugeNFoldInstance& inst, const CompactPresentation& aux_cp) {
  const std::size_t d = inst.bimatrix().d();
  CompactPresentation out;
  for (const auto& m : aux_cp.types) {
    BrickMap stripped;
    for (const auto& [z, lambda] : m) {
      for (std::size_t j = d; j < z.size(); ++j)
        if (z[j] != 0) throw PreconditionError("strip_slack: brick " + to_string(z) + " has nonzero slack");
      stripped[slice(z, 0, d)] += lambda;
    }
    out.types.push_back(std::move(stripped));
  }
  return out;
}

const GraverTemplates& phase_one_templates(const HugeNFoldInstance& aux) {
  static std::mutex mu;
  static std::map<std::string, GraverTemplates> cache;
  const Bimatrix& c = aux.bimatrix();
  std::lock_guard<std::mutex> lock(mu);
  std::string key;
  for (const auto& row : c.a1().row_vectors()) key += to_string(row);
  key += "|";
  for (const auto& row : c.a2().row_vectors()) key += to_string(row);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const Layout lay = layout_of(c);
  IntMatrix stacked(c.r() + c.s(), c.d());
  for (std::size_t i = 0; i < c.r(); ++i)
    for (std::size_t j = 0; j < c.d(); ++j) stacked(i, j) = c.a1()(i, j);
  for (std::size_t i = 0; i < c.s(); ++i)
    for (std::size_t j = 0; j < c.d(); ++j) stacked(c.r() + i, j) = c.a2()(i, j);

  std::set<Template> family;
  for (const auto& h : graver_basis(stacked).elements) {
    family.insert(Template{{h}});
    IntVec x = slice(h, 0, lay.d), y = slice(h, lay.d, lay.r), z = slice(h, lay.d + lay.r, lay.s);
    if (is_zero(x) || is_zero(y)) continue;
    IntVec receiver = x, donor = zeros(lay.d);
    receiver.insert(receiver.end(), lay.r, Int(0));
    receiver.insert(receiver.end(), z.begin(), z.end());
    donor.insert(donor.end(), y.begin(), y.end());
    donor.insert(donor.end(), lay.s, Int(0));
    Template t{{receiver, donor}};
    std::sort(t.bricks.begin(), t.bricks.end());
    family.insert(std::move(t));
  }
  GraverTemplates out{c, 2, {family.begin(), family.end()}, false};
  return cache.emplace(std::move(key), std::move(out)).first->second;
}

std::optional<EquationWitness> balance_witness(const HugeTableInstance& tbl) {
  const std::size_t t = tbl.types.size(), l = tbl.l, m = tbl.m;
  EquationWitness w;
  w.u = zeros(l * m);
  w.v.assign(t, zeros(l + m));
  for (std::size_t k = 0; k < t; ++k) {
    if (sum(tbl.types[k].rows) != sum(tbl.types[k].cols)) {
      for (std::size_t i = 0; i < l; ++i) w.v[k][i] = 1;
      for (std::size_t j = 0; j < m; ++j) w.v[k][l + j] = -1;
      return w;
    }
  }
  // Row i (column j) of g against the weighted layer row (column) sums.
  for (std::size_t line = 0; line < l + m; ++line) {
    const bool is_row = line < l;
    Int have = 0, want = 0;
    for (std::size_t c = 0; c < (is_row ? m : l); ++c) {
      const std::size_t i = is_row ? line : c, j = is_row ? c : line - l;
      have += tbl.line_sums(i, j);
      w.u[i + l * j] = 1;
    }
    for (const auto& ty : tbl.types) want += ty.count * (is_row ? ty.rows[line] : ty.cols[line - l]);
    if (have != want) {
      for (auto& v : w.v) v[line] = -1;
      return w;
    }
    w.u.assign(l * m, Int(0));
  }
  Int total = 0, expected = 0;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < m; ++j) total += tbl.line_sums(i, j);
  for (const auto& ty : tbl.types) expected += ty.count * sum(ty.rows);
  if (total == expected) return std::nullopt;
  for (auto& u : w.u) u = 1;
  for (auto& v : w.v)
    for (std::size_t i = 0; i < l; ++i) v[i] = -1;
  return w;
}

namespace {
SlackOptimum slack_optimum_dp(const HugeNFoldInstance& aux, std::size_t max_bricks, std::uint64_t work_cap,
                              std::uint64_t& work) {
  const Bimatrix& c = aux.bimatrix();
  const Layout lay = layout_of(c);
  if (aux.n() > max_bricks) {
    throw BudgetError("explicit slack optimum needs n <= " + std::to_string(max_bricks) + ", got " + to_string(aux.n()));
  }
  const IntMatrix a1 = columns(c.a1(), 0, lay.d);
  const IntMatrix a2 = columns(c.a2(), 0, lay.d);

  // Choices per type: x with 0 <= x <= u and A2 x <= b, as [x | z].
  IntMatrix a2z(lay.s, lay.d + lay.s);
  for (std::size_t i = 0; i < lay.s; ++i) {
    for (std::size_t j = 0; j < lay.d; ++j) a2z(i, j) = a2(i, j);
    a2z(i, lay.d + i) = 1;
  }
  struct Choice {
    IntVec x, z, ax;
    Int zsum, axsum;
  };
  std::vector<std::vector<Choice>> choices(aux.num_types());
  bool monotone = true;
  bool a1_nonneg = true;
  for (std::size_t i = 0; i < lay.r; ++i)
    for (std::size_t j = 0; j < lay.d; ++j) a1_nonneg = a1_nonneg && a1(i, j) >= 0;
  for (std::size_t k = 0; k < aux.num_types(); ++k) {
    const auto& ty = aux.type(k);
    ExtVec lower(lay.d + lay.s, ExtInt(0)), upper(lay.d + lay.s, ExtInt::pos_inf());
    for (std::size_t j = 0; j < lay.d; ++j) {
      lower[j] = ty.lower[j];
      upper[j] = ty.upper[j];
      // With A1 >= 0 every brick satisfies A1 x <= b0.
      if (!a1_nonneg) continue;
      for (std::size_t i = 0; i < lay.r; ++i) {
        if (a1(i, j) <= 0) continue;
        const Int cap = aux.b0()[i] / a1(i, j);
        if (upper[j] > cap) upper[j] = cap;
      }
    }
    for (std::size_t j = 0; j < lay.s; ++j) upper[lay.d + j] = ty.upper[lay.d + lay.r + j];
    if (work >= work_cap) throw BudgetError("explicit slack optimum: work cap exceeded");
    const auto cap = static_cast<std::size_t>(std::min<std::uint64_t>(work_cap - work, 1'000'000));
    BrickSet set;
    try {
      set = enumerate_bricks(a2z, ty.b, lower, upper, cap);
    } catch (const PreconditionError&) {
      throw BudgetError("explicit slack optimum needs finite brick sets; type " + std::to_string(k + 1) + " is unbounded");
    }
    for (auto& xz : set.elements) {
      ++work;
      Choice ch;
      ch.x = slice(xz, 0, lay.d);
      ch.z = slice(xz, lay.d, lay.s);
      ch.ax = matvec(a1, ch.x);
      ch.zsum = sum(ch.z);
      ch.axsum = sum(ch.ax);
      for (const auto& v : ch.ax) monotone = monotone && v >= 0;
      choices[k].push_back(std::move(ch));
    }
  }

  // Layer t of the DP: state = A1 * (x-sum so far) -> (value, parent, choice).
  // value = sum of z-slacks - sum of A1 x; final slack adds 1^T b0.
  struct Node {
    Int value;
    const IntVec* parent = nullptr;
    std::size_t choice = 0;
  };
  std::vector<std::map<IntVec, Node>> layers;
  std::vector<std::size_t> layer_type;
  layers.emplace_back();
  layers.back()[zeros(lay.r)] = Node{Int(0), nullptr, 0};
  auto within = [&](const IntVec& s) {
    for (std::size_t i = 0; i < lay.r; ++i)
      if (s[i] > aux.b0()[i]) return false;
    return true;
  };
  for (std::size_t k = 0; k < aux.num_types(); ++k) {
    const std::size_t copies = static_cast<std::size_t>(aux.type(k).count);
    for (std::size_t rep = 0; rep < copies; ++rep) {
      std::map<IntVec, Node> next;
      const auto& prev = layers.back();
      for (const auto& [state, node] : prev) {
        for (std::size_t q = 0; q < choices[k].size(); ++q) {
          if (++work > work_cap) throw BudgetError("explicit slack optimum: work cap exceeded");
          const Choice& ch = choices[k][q];
          IntVec s = add(state, ch.ax);
          if (monotone && !within(s)) continue;
          Int v = node.value + ch.zsum - ch.axsum;
          auto it = next.find(s);
          if (it == next.end()) {
            next.emplace(std::move(s), Node{v, &state, q});
          } else if (v < it->second.value) {
            it->second = Node{v, &state, q};
          }
        }
      }
      layers.push_back(std::move(next));
      layer_type.push_back(k);
    }
  }

  std::optional<Int> best;
  const IntVec* best_state = nullptr;
  const Int b0sum = sum(aux.b0());
  for (const auto& [state, node] : layers.back()) {
    if (!within(state)) continue;
    Int total = node.value + b0sum;
    if (!best || total < *best) {
      best = total;
      best_state = &state;
    }
  }
  if (!best) throw PreconditionError("slack program has no feasible point");

  // Walk parents back to recover one brick per layer.
  std::vector<std::pair<std::size_t, std::size_t>> picks(layer_type.size());
  const IntVec* cur = best_state;
  for (std::size_t t = layers.size() - 1; t > 0; --t) {
    const Node& node = layers[t].at(*cur);
    picks[t - 1] = {layer_type[t - 1], node.choice};
    cur = node.parent;
  }
  SlackOptimum out;
  out.value = *best;
  out.cp.types.resize(aux.num_types());
  IntVec y = sub(aux.b0(), *best_state);
  bool placed = false;
  for (const auto& [k, q] : picks) {
    const Choice& ch = choices[k][q];
    IntVec brick = ch.x;
    const IntVec& yy = placed ? zeros(lay.r) : y;
    brick.insert(brick.end(), yy.begin(), yy.end());
    brick.insert(brick.end(), ch.z.begin(), ch.z.end());
    placed = true;
    out.cp.types[k][brick] += 1;
  }
  out.cp = reduce_support(aux, out.cp);
  return out;
}
}  // namespace

SlackOptimum explicit_slack_optimum(const HugeNFoldInstance& aux, std::size_t max_bricks, std::uint64_t work_cap) {
  std::uint64_t work = 0;
  return slack_optimum_dp(aux, max_bricks, work_cap, work);
}

namespace {

// Joins slots of an alpha = 1 step where one copy's target is another
// slot's source, so the intermediate brick no longer limits batching.
void contract_chains(AugmentStep& step) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < step.phi.size() && !changed; ++j) {
      const IntVec target = add(step.phi[j].brick, step.h.bricks[j]);
      for (std::size_t i = 0; i < step.phi.size() && !changed; ++i) {
        if (i == j || step.phi[i].type != step.phi[j].type || step.phi[i].brick != target) continue;
        step.h.bricks[j] = add(step.h.bricks[j], step.h.bricks[i]);
        step.phi.erase(step.phi.begin() + static_cast<std::ptrdiff_t>(i));
        step.h.bricks.erase(step.h.bricks.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      }
    }
  }
  for (std::size_t i = step.phi.size(); i-- > 0;) {
    if (!is_zero(step.h.bricks[i])) continue;
    step.phi.erase(step.phi.begin() + static_cast<std::ptrdiff_t>(i));
    step.h.bricks.erase(step.h.bricks.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

}  // namespace

std::optional<AugmentStep> exchange_step(const HugeNFoldInstance& aux, const CompactPresentation& cp,
                                         const SolveOptions& options) {
  const Bimatrix& c = aux.bimatrix();
  const Layout lay = layout_of(c);
  const bool identity_a1 = columns(c.a1(), 0, lay.d) == IntMatrix::identity(lay.d);

  struct Pick {
    std::size_t type;
    const IntVec* brick;
    const Int* lambda;
  };
  std::vector<Pick> donors, partial, all;
  for (std::size_t k = 0; k < cp.types.size(); ++k)
    for (const auto& [z, lambda] : cp.types[k]) {
      Pick p{k, &z, &lambda};
      all.push_back(p);
      if (!is_zero(slice(z, lay.d, lay.r))) donors.push_back(p);
      else if (!is_zero(slice(z, lay.d + lay.r, lay.s))) partial.push_back(p);
    }
  std::vector<Pick> base = donors;
  base.insert(base.end(), partial.begin(), partial.end());
  if (base.empty()) return std::nullopt;

  std::optional<AugmentStep> best;
  std::uint64_t work = 0;  // shared by all neighborhoods
  auto evaluate = [&](const std::vector<Pick>& picks) {
    IntVec b0 = zeros(lay.r);
    Int before = 0;
    for (const auto& p : picks) {
      b0 = add(b0, add(matvec(columns(c.a1(), 0, lay.d), slice(*p.brick, 0, lay.d)), slice(*p.brick, lay.d, lay.r)));
      before += dot(aux.type(p.type).w, *p.brick);
    }
    std::vector<BrickType> types;
    for (const auto& p : picks) {
      BrickType ty = aux.type(p.type);
      ty.count = 1;
      if (identity_a1)
        for (std::size_t j = 0; j < lay.d; ++j)
          if (!ty.upper[j].finite() || ty.upper[j].value() > b0[j]) ty.upper[j] = b0[j];
      // Row/column slack of a brick may only shrink.
      for (std::size_t j = lay.d + lay.r; j < c.d(); ++j) ty.upper[j] = (*p.brick)[j];
      types.push_back(std::move(ty));
    }
    HugeNFoldInstance part(c, std::move(types), b0);
    SlackOptimum opt;
    try {
      opt = slack_optimum_dp(part, picks.size(), options.exchange_work_cap, work);
    } catch (const BudgetError&) {
      return;
    }
    if (opt.value >= before) return;
    AugmentStep step;
    step.alpha = 1;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      const IntVec& now = opt.cp.types[i].begin()->first;
      IntVec h = sub(now, *picks[i].brick);
      if (is_zero(h)) continue;
      step.h.bricks.push_back(std::move(h));
      step.phi.push_back({picks[i].type, *picks[i].brick});
    }
    step.improvement = opt.value - before;
    contract_chains(step);
    if (!best || step.improvement < best->improvement) best = std::move(step);
  };

  evaluate(base);
  for (const auto& extra : all) {
    if (best || work >= options.exchange_work_cap) break;
    std::size_t taken = 0;
    for (const auto& p : base) taken += (p.type == extra.type && p.brick == extra.brick) ? 1 : 0;
    if (*extra.lambda <= taken) continue;
    std::vector<Pick> picks = base;
    picks.push_back(extra);
    evaluate(picks);
  }
  return best;
}

namespace {

// A run of barely repeatable steps. The sum of a stretch of the run, taken
// brick by brick from the state where the stretch started, is often
// repeatable where each part was not, e.g. when two steps alternate on one
// small coordinate.
class StepRun {
 public:
  void reset() { history_.clear(); }
  std::size_t length() const { return history_.size(); }

  void push(const CompactPresentation& before, const AugmentStep& step) { history_.push_back({before, step}); }

  // Best batched sum of a stretch of at least two steps that repeats, with
  // the state it applies to.
  std::optional<std::pair<CompactPresentation, AugmentStep>> composite(const HugeNFoldInstance& aux) const {
    std::optional<std::pair<CompactPresentation, AugmentStep>> best;
    for (std::size_t from = 0; from + 1 < history_.size(); ++from) {
      auto step = stretch(aux, from);
      if (step && (!best || step->total_improvement() < best->second.total_improvement())) {
        best.emplace(history_[from].first, std::move(*step));
      }
    }
    return best;
  }

 private:
  struct Track {
    std::size_t type;
    IntVec anchor, now;
  };

  static void extend(std::vector<Track>& tracks, const AugmentStep& step) {
    std::vector<bool> used(tracks.size(), false);
    for (std::size_t i = 0; i < step.phi.size(); ++i) {
      const SlotRef& slot = step.phi[i];
      const bool scaled = !step.scaled.empty() && step.scaled[i];
      const Int factor = scaled ? step.repeat * step.alpha : step.alpha;
      const std::size_t copies = scaled ? 1 : static_cast<std::size_t>(step.repeat);
      IntVec target = slot.brick;
      for (std::size_t j = 0; j < target.size(); ++j) target[j] += factor * step.h.bricks[i][j];
      for (std::size_t c = 0; c < copies; ++c) {
        bool found = false;
        for (std::size_t t = 0; t < tracks.size() && !found; ++t) {
          if (used[t] || tracks[t].type != slot.type || tracks[t].now != slot.brick) continue;
          tracks[t].now = target;
          used[t] = found = true;
        }
        if (!found) {
          tracks.push_back({slot.type, slot.brick, target});
          used.push_back(true);
        }
      }
    }
  }

  std::optional<AugmentStep> stretch(const HugeNFoldInstance& aux, std::size_t from) const {
    std::vector<Track> tracks;
    for (std::size_t i = from; i < history_.size(); ++i) extend(tracks, history_[i].second);
    const CompactPresentation& anchor = history_[from].first;
    AugmentStep step;
    step.alpha = 1;
    std::map<SlotRef, Int> need;
    for (const auto& t : tracks) {
      if (t.now == t.anchor) continue;
      IntVec h = sub(t.now, t.anchor);
      step.improvement += dot(aux.type(t.type).w, h);
      step.h.bricks.push_back(std::move(h));
      step.phi.push_back({t.type, t.anchor});
      need[step.phi.back()] += 1;
    }
    if (step.phi.empty() || step.improvement >= 0) return std::nullopt;
    contract_chains(step);
    need.clear();
    for (const auto& slot : step.phi) need[slot] += 1;
    for (const auto& [slot, count] : need) {
      auto it = anchor.types[slot.type].find(slot.brick);
      if (it == anchor.types[slot.type].end() || it->second < count) return std::nullopt;
    }
    AugmentStep batched = batch_step(aux, anchor, std::move(step));
    if (batched.repeat < 2) return std::nullopt;
    return batched;
  }

  std::vector<std::pair<CompactPresentation, AugmentStep>> history_;
};

constexpr std::size_t kMaxRun = 16;
constexpr long kSmallRepeat = 64;

}  // namespace

PhaseOneResult phase_one(const HugeNFoldInstance& inst, const SolveOptions& options) {
  Auxiliary ax = build_auxiliary(inst);
  const GraverTemplates& family = phase_one_templates(ax.aux);
  CompactPresentation cp = reduce_support(ax.aux, ax.cp0);
  Int slack = cost(ax.aux, cp);
  std::size_t rounds = 0;
  std::string method = "augment";
  StepRun run;
  std::size_t singles = 0;  // consecutive unrepeatable steps
  auto advance = [&](const CompactPresentation& from, const AugmentStep& step, bool reduce) {
    if (rounds == options.max_rounds) {
      throw BudgetError("phase one: slack still " + to_string(slack) + " after " + std::to_string(rounds) + " rounds");
    }
    CompactPresentation next = apply_step(from, step);
    const Int after = cost(ax.aux, next);
    if (after != cost(ax.aux, from) + step.total_improvement()) {
      throw InternalError("phase one: cost change differs from prediction");
    }
    cp = reduce ? reduce_support(ax.aux, next) : std::move(next);
    slack = after;
    ++rounds;
  };
  while (slack > 0) {
    auto step = best_augmentation(ax.aux, cp, family, options.augment);
    if (step) step = batch_step(ax.aux, cp, std::move(*step));
    const bool single = step && step->repeat == 1;
    singles = single ? singles + 1 : 0;
    if (options.exchange && (!step || singles >= options.exchange_after)) {
      singles = 0;
      auto ex = exchange_step(ax.aux, cp, options);
      if (ex) {
        ex = batch_step(ax.aux, cp, std::move(*ex));
        if (!step || ex->total_improvement() < step->total_improvement()) {
          step = std::move(ex);
          method = "augment+exchange";
        }
      }
    }
    if (!step) break;
    if (step->repeat > kSmallRepeat) {
      run.reset();
      advance(cp, *step, true);
      continue;
    }
    run.push(cp, *step);
    if (auto comp = run.composite(ax.aux)) {
      run.reset();
      singles = 0;
      advance(comp->first, comp->second, true);
      continue;
    }
    // Support reduction would rename the bricks the run is tracking.
    advance(cp, *step, false);
    if (run.length() >= kMaxRun) {
      run.reset();
      cp = reduce_support(ax.aux, cp);
    }
  }
  cp = reduce_support(ax.aux, cp);
  OptimizeResult res;
  res.cp = std::move(cp);
  if (slack == 0) return feasible_from_aux(inst, res.cp, method, rounds);

  if (inst.n() > options.explicit_max_bricks) {
    throw BudgetError("augmentation stopped at slack " + to_string(slack) + " and n = " + to_string(inst.n()) +
                      " is past the explicit certification limit of " + std::to_string(options.explicit_max_bricks));
  }
  SlackOptimum exact = explicit_slack_optimum(ax.aux, options.explicit_max_bricks);
  if (exact.value == 0) return feasible_from_aux(inst, exact.cp, "augment+explicit", rounds);

  PhaseOneResult out;
  out.feasible = false;
  out.method = method;
  out.rounds = rounds;
  InfeasibilityCertificate cert{ax.aux, exact.value == slack ? res.cp : exact.cp, exact.value,
                                {"explicit", rounds, exact.value}, std::nullopt};
  out.certificate = std::move(cert);
  return out;
}

TableVerdict solve_table(const HugeTableInstance& tbl, const SolveOptions& options) {
  validate_table(tbl);
  HugeNFoldInstance inst = encode_table(tbl);
  TableVerdict v;
  if (auto w = balance_witness(tbl)) {
    Auxiliary ax = build_auxiliary(inst);
    Int slack = cost(ax.aux, ax.cp0);
    v.method = "balance";
    v.certificate = InfeasibilityCertificate{ax.aux, ax.cp0, slack, {"balance", 0, slack}, std::move(w)};
    return v;
  }
  if (options.strategy == Strategy::Augment) {
    PhaseOneResult r = phase_one(inst, options);
    v.feasible = r.feasible;
    v.solution = std::move(r.solution);
    v.certificate = std::move(r.certificate);
    v.method = r.method;
    v.rounds = r.rounds;
    return v;
  }

  v.method = "cone";
  if (auto cp = solve_cone(inst, options.cone)) {
    if (!check_presentation(inst, *cp).ok()) throw InternalError("cone solution failed verification");
    v.feasible = true;
    v.solution = std::move(*cp);
    return v;
  }
  if (inst.n() <= options.explicit_max_bricks) {
    Auxiliary ax = build_auxiliary(inst);
    SlackOptimum exact = explicit_slack_optimum(ax.aux, options.explicit_max_bricks);
    if (exact.value == 0) throw InternalError("cone search and slack optimum disagree on feasibility");
    v.certificate = InfeasibilityCertificate{ax.aux, exact.cp, exact.value, {"explicit", 0, exact.value}, std::nullopt};
  }
  return v;
}

bool verify_certificate(const InfeasibilityCertificate& cert, const SolveOptions& options) {
  try {
    const HugeNFoldInstance& aux = cert.aux;
    const Bimatrix& c = aux.bimatrix();
    const Layout lay = layout_of(c);
    if (!has_aux_shape(c, lay) || !has_slack_costs(aux, lay)) return false;
    if (!check_presentation(aux, cert.cp).ok()) return false;
    if (cert.slack <= 0 || cost(aux, cert.cp) != cert.slack) return false;
    if (cert.transcript.optimum != cert.slack) return false;

    if (cert.transcript.method == "balance") {
      if (!cert.witness || cert.witness->u.size() != lay.r || cert.witness->v.size() != aux.num_types()) return false;
      const IntMatrix a1 = columns(c.a1(), 0, lay.d);
      const IntMatrix a2 = columns(c.a2(), 0, lay.d);
      Int value = dot(cert.witness->u, aux.b0());
      for (std::size_t k = 0; k < aux.num_types(); ++k) {
        const IntVec& v = cert.witness->v[k];
        if (v.size() != lay.s) return false;
        for (std::size_t j = 0; j < lay.d; ++j) {
          Int col = 0;
          for (std::size_t i = 0; i < lay.r; ++i) col += cert.witness->u[i] * a1(i, j);
          for (std::size_t i = 0; i < lay.s; ++i) col += v[i] * a2(i, j);
          if (col != 0) return false;
        }
        value += aux.type(k).count * dot(v, aux.type(k).b);
      }
      return value != 0;
    }

    if (cert.transcript.method == "explicit") {
      if (cert.witness) return false;  // the witness field belongs to "balance" certificates
      if (best_augmentation(aux, cert.cp, phase_one_templates(aux), options.augment)) return false;
      return explicit_slack_optimum(aux, options.explicit_max_bricks).value == cert.slack;
    }
    return false;
  } catch (const Error&) {
    return false;
  }
}

bool verify_certificate(const HugeNFoldInstance& inst, const InfeasibilityCertificate& cert,
                        const SolveOptions& options) {
  try {
    if (!(build_auxiliary(inst).aux == cert.aux)) return false;
  } catch (const Error&) {
    return false;
  }
  return verify_certificate(cert, options);
}

}  // namespace hugenfold
