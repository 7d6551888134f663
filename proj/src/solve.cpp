#include "hugenfold/solve.hpp"

#include "hugenfold/graver.hpp"
#include "hugenfold/presentation.hpp"

namespace hugenfold {

NFoldVerdict solve_nfold(const HugeNFoldInstance& inst, const SolveOptions& options,
                         const std::optional<CompactPresentation>& start) {
  NFoldVerdict v;
  if (options.strategy == Strategy::Cone) {
    v.method = "cone";
    auto cp = solve_cone(inst, options.cone);
    if (!cp) return v;
    v.status = NFoldStatus::Optimal;
    v.objective = cost(inst, *cp);
    v.solution = std::move(cp);
    v.proven_optimal = true;
    return v;
  }

  CompactPresentation cp0;
  if (start) {
    PresentationReport rep = check_presentation(inst, *start);
    if (!rep.ok()) {
      std::string why = rep.issues.empty() ? "" : ": " + rep.issues.front();
      throw PreconditionError("start presentation is not feasible" + why);
    }
    cp0 = *start;
    v.method = "augment";
  } else {
    PhaseOneResult p = phase_one(inst, options);
    v.rounds = p.rounds;
    if (!p.feasible) {
      v.method = p.method;
      v.certificate = std::move(p.certificate);
      return v;
    }
    cp0 = std::move(*p.solution);
    v.method = p.method;
  }

  GraverOptions gopts;
  const GraverTemplates templates = instance_templates(inst, gopts);
  OptimizeOptions oopts;
  oopts.augment = options.augment;
  oopts.max_rounds = options.max_rounds;
  OptimizeResult res = optimize(inst, cp0, templates, oopts);
  v.status = NFoldStatus::Optimal;
  v.rounds += res.rounds;
  v.objective = cost(inst, res.cp);
  v.solution = std::move(res.cp);
  v.proven_optimal = res.proven_optimal;
  return v;
}

}  // namespace hugenfold
