// check_problem lives apart from lti_model.cpp because the existence-only
// classification needs an LP feasibility probe.

#include <string>

#include "handsoff/handsoff_solver.hpp"
#include "handsoff/lti_model.hpp"
#include "handsoff/spectral.hpp"

namespace handsoff {

CheckReport check_problem(const BoundaryProblem& bp) {
  bp.validate();
  CheckReport report;
  report.normality = check_normality(bp.sys);
  for (const std::string& r : report.normality.reasons) {
    report.reasons.push_back(r + " (normality fails)");
  }

  try {
    const SpectralSplit split = spectral_split(bp.sys.a());
    report.hyperbolic = true;
    report.stable_dim = split.stable_dim;
    report.x0_in_stable = subspace_membership(split, bp.x0, Subspace::kStable);
    report.xf_in_antistable = subspace_membership(split, bp.xf, Subspace::kAntistable);
    if (!*report.x0_in_stable) report.reasons.emplace_back("x0 not in L-(A)");
    if (!*report.xf_in_antistable) report.reasons.emplace_back("xf not in L+(A)");
  } catch (const NonHyperbolicError&) {
    report.hyperbolic = false;
    report.reasons.emplace_back("A has eigenvalues on or near the imaginary axis");
    report.warnings.emplace_back(
        "A is not hyperbolic: the center subspace is not computed, so the spectral "
        "preconditions on x0 and xf were skipped");
  }

  if (report.normality.normal && report.hyperbolic && *report.x0_in_stable &&
      *report.xf_in_antistable) {
    report.classification = Classification::kTurnpikeCertified;
    return report;
  }
  if (report.normality.normal && !report.hyperbolic) {
    try {
      report.feasible_at_horizon = is_feasible(bp);
    } catch (const ConditioningError& e) {
      report.warnings.emplace_back(std::string("feasibility probe skipped: ") + e.what());
    }
    if (report.feasible_at_horizon.value_or(false)) {
      report.classification = Classification::kExistenceOnly;
      return report;
    }
    report.reasons.emplace_back("transcription infeasible at the given horizon");
  }
  report.classification = Classification::kUncertified;
  return report;
}

}  // namespace handsoff
