#pragma once

#include "anchorlab/density.hpp"
#include "anchorlab/distribution.hpp"
#include "anchorlab/linalg.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace anchorlab {

// One checkable statement about quantum states.  Slot usage per fact id:
//   FVDG              states = {rho, sigma}; two-sided fidelity/trace-norm bound
//   FVDG_PURE_LITERAL pures = {psi, phi}; report-only variant without the
//                     factor of two on the trace norm
//   CHAN_MONO         states = {rho, sigma}; operators = Kraus elements of a
//                     channel; distance contracts and fidelity grows
//   PINSKER_STD       states = {rho, sigma}; l1 <= sqrt(2 ln2 * S)
//   PINSKER_PAPER     states = {rho, sigma}; report-only l1 vs sqrt(S)
//   EVENT_PROB        states = {rho, rho_alt}; eps; the eps-weighted mixture
//                     dominates rho at rate log2(1/eps)
//   SINF_TRIANGLE     states = {rho, mid, sigma} with nested supports
//   SINF_UNITARY      states = {rho, sigma}; operators = {U}; invariance
//   DIM_UB            states = {rho_yz bipartite}; max-information dimension cap
//   COND_DEC          cqs = {rho, sigma} on matching classical axes; relative
//                     entropy decomposes into classical plus conditional parts
//   IMAX_CLOSE        cqs = {sigma_xyz}; dists = {perturbed input table};
//                     eps, delta, c; tail probability of large per-input
//                     max-information
//   RAZ               cqs = {rho, sigma}, sigma product over every register;
//                     per-register informations sum below the relative entropy
//   SUBSTATE          states = {rho, sigma}; eps; smoothed min-entropy cap
//   JRS_VERIFY        pures = {cq_pure}; operators = measurement ops on all
//                     factors but the last; alpha = required common success
//                     probability, delta = closeness budget
struct QuantumFactInstance {
    std::string fact;
    std::vector<DensityOperator> states;
    std::vector<PureState> pures;
    std::vector<CQState> cqs;
    std::vector<FiniteDistribution> dists;
    std::vector<Mat> operators;
    double eps = 0.0;
    double delta = 0.0;
    double c = 0.0;
    double alpha = 0.0;

    nlohmann::ordered_json to_json() const;
    static QuantumFactInstance from_json(const nlohmann::json& j);
};

extern const std::vector<std::string> kQuantumFactIds;

// Ids whose checker reports a signed discrepancy with no pass/fail meaning.
bool quantum_fact_is_report_only(const std::string& fact);
// Ids checked as equalities: the checker returns |LHS - RHS|.
bool quantum_fact_is_equality(const std::string& fact);

// Inequality facts return margin = RHS - LHS (expected >= -1e-8); equality
// facts return |LHS - RHS| (expected <= 1e-8); report-only facts return the
// signed discrepancy.  Errors: UNKNOWN_FACT, HYPOTHESIS_VIOLATED,
// KRAUS_INCOMPLETE.
double verify_quantum_fact(const QuantumFactInstance& inst);

// Both margins of the projective-compression check: first the success
// probability slack min_x p_x - alpha, then the closeness slack
// delta - average post-measurement distance.
std::pair<double, double> jrs_margins(const QuantumFactInstance& inst);

} // namespace anchorlab
