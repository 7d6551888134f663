#pragma once

// Huge l x m x n tables with prescribed line-sums, per-type row and column
// sums, and the slack program whose optimum decides feasibility.

#include <optional>
#include <string>
#include <vector>

#include "hugenfold/augment.hpp"
#include "hugenfold/conesolver.hpp"
#include "hugenfold/instance.hpp"

namespace hugenfold {

struct TableType {
  IntVec rows;  // f^k, length l
  IntVec cols;  // e^k, length m
  Int count;
};

struct HugeTableInstance {
  std::size_t l = 0;
  std::size_t m = 0;
  IntMatrix line_sums;  // l x m
  std::vector<TableType> types;

  Int n() const;
};

/// Throws on shape errors, negative data or non-positive counts.
void validate_table(const HugeTableInstance& tbl);

/// A1 = I_{lm}, A2 = incidence of K_{l,m}: row constraints, then columns.
/// Cell (i, j) is coordinate i + l*j.
Bimatrix table_bimatrix(std::size_t l, std::size_t m);
HugeNFoldInstance encode_table(const HugeTableInstance& tbl);

/// Flattened table layer, inverse of the cell indexing.
IntMatrix layer_matrix(const IntVec& z, std::size_t l, std::size_t m);

struct Auxiliary {
  HugeNFoldInstance aux;
  CompactPresentation cp0;
};

/// Slack program: bricks [x | y | z] with C1 = [A1 I 0], C2 = [A2 0 I],
/// cost 1 on y and z. Requires b0 >= 0, b^k >= 0 and zero lower bounds.
Auxiliary build_auxiliary(const HugeNFoldInstance& inst);

/// Drops the slack coordinates of an auxiliary presentation.
CompactPresentation strip_slack(const HugeNFoldInstance& inst, const CompactPresentation& aux_cp);

/// Moves used for the slack program: single-brick Graver elements of C and
/// their split into a receiving brick and a donating brick. Not all of
/// G(C^(g)); marked incomplete.
const GraverTemplates& phase_one_templates(const HugeNFoldInstance& inst);

/// Dual vectors proving that the equations alone have no real solution:
/// u^T A1 + v_k^T A2 = 0 for every type, u^T b0 + sum_k n_k v_k^T b^k != 0.
struct EquationWitness {
  IntVec u;
  std::vector<IntVec> v;
};

struct CertificateTranscript {
  std::string method;  // "explicit" or "balance"
  std::size_t rounds = 0;
  Int optimum = 0;
};

struct InfeasibilityCertificate {
  HugeNFoldInstance aux;
  CompactPresentation cp;
  Int slack;
  CertificateTranscript transcript;
  std::optional<EquationWitness> witness;
};

struct SlackOptimum {
  Int value;
  CompactPresentation cp;
};

/// Exact minimum of the slack program by dynamic programming over the
/// A1-aggregate of explicit bricks. Throws BudgetError when n exceeds
/// max_bricks or the number of state expansions passes work_cap.
SlackOptimum explicit_slack_optimum(const HugeNFoldInstance& aux, std::size_t max_bricks = 64,
                                    std::uint64_t work_cap = 200'000'000);

enum class Strategy { Augment, Cone };
struct SolveOptions;

/// Exact re-optimization of one copy of every brick carrying slack plus
/// one further brick, expressed as a step on those bricks. nullopt when no
/// such neighborhood lowers the slack.
std::optional<AugmentStep> exchange_step(const HugeNFoldInstance& aux, const CompactPresentation& cp,
                                         const SolveOptions& options);

struct SolveOptions {
  Strategy strategy = Strategy::Augment;
  AugmentOptions augment;
  ConeOptions cone;
  std::size_t max_rounds = 100'000;
  std::size_t explicit_max_bricks = 64;
  /// Fall back to exchange steps when the template family stalls.
  bool exchange = true;
  /// Also try an exchange after this many consecutive unrepeatable steps.
  std::size_t exchange_after = 8;
  /// Enumerated bricks plus DP expansions per exchange call.
  std::uint64_t exchange_work_cap = 2'000'000;
};

struct TableVerdict {
  bool feasible = false;
  std::optional<CompactPresentation> solution;            // over encode_table(tbl)
  std::optional<InfeasibilityCertificate> certificate;    // absent only for cone verdicts past the explicit limit
  std::string method;
  std::size_t rounds = 0;
};

TableVerdict solve_table(const HugeTableInstance& tbl, const SolveOptions& options = {});

/// Infeasibility verdict for a general instance that admits the slack
/// program (zero lower bounds, nonnegative right-hand sides).
struct PhaseOneResult {
  bool feasible = false;
  std::optional<CompactPresentation> solution;
  std::optional<InfeasibilityCertificate> certificate;
  std::string method;
  std::size_t rounds = 0;
};
PhaseOneResult phase_one(const HugeNFoldInstance& inst, const SolveOptions& options = {});

/// Checks a certificate from its own contents only.
bool verify_certificate(const InfeasibilityCertificate& cert, const SolveOptions& options = {});

/// Also requires cert.aux to be build_auxiliary(inst).aux, so the
/// certificate speaks about `inst` and not some other slack program.
bool verify_certificate(const HugeNFoldInstance& inst, const InfeasibilityCertificate& cert,
                        const SolveOptions& options = {});

/// Equation witness for the table balance conditions, if one is violated.
std::optional<EquationWitness> balance_witness(const HugeTableInstance& tbl);

}  // namespace hugenfold
