#pragma once

#include <string>
#include <vector>

#include "anchorlab/distribution.hpp"

namespace anchorlab {

// Checkable inequalities about finite distributions.  Each checker computes
// both sides by full-table enumeration and returns the margin RHS - LHS, so
// a nonnegative margin (within tolerance) confirms the inequality on that
// instance.  Logarithms are base 2 throughout.
//
// Instance payload slots by fact id:
//   MARGINAL_L1  dists {P, Q} on identical axes; names = axes kept by the
//                marginal.  |restricted gap| <= |full gap|.
//   EVENT_GAP    dists {P, Q}; events {E}.  |P(E)-Q(E)| <= l1/2.
//   COUPLING     dists {J} with two equal-alphabet axes (a coupling).
//                l1(marginals) <= 2 * Pr[axes disagree].
//   COND_PROB    dists {P, P'}; events {E}; params alpha, eps with
//                l1(P,P') <= eps, P(E) >= alpha > eps.
//                l1(P|E, P'|E) <= 2*eps/alpha.
//   ANCHOR       dists {P_XYZ}; anchor_label on the middle axis, whose row
//                must satisfy P(x, anchor) = alpha * P_X(x) for all x.
//                || P - P_XY . (Z|X at anchor) ||_1
//                  <= (2/alpha) * || P - P_XY . (Z|X) ||_1.
//   ANCHOR_COR   dists {P_XY, P'_XYZ}; anchor_label on P_XY's second axis.
//                || P'_{XZ|anchor} - P'_XZ ||_1
//                  <= (11/alpha) * || P' - P_XY . (Z|X from P') ||_1.
//   HOLENSTEIN   dists {P_T}; kernels {U_1|T, ..., U_k|T, V|T U_1..U_k};
//                events {E on the composed joint}; k = coordinate count.
//                sum_i l1(P_{T U_i V|E}, P_{TV|E} . (U_i|T))
//                  <= sqrt(k * (log2|V| + log2(1/Pr[E]))).
struct ClassicalFactInstance {
    std::string fact;
    std::vector<FiniteDistribution> dists;
    std::vector<Event> events;
    std::vector<Kernel> kernels;
    std::vector<std::string> names;
    double alpha = 0.0;
    double eps = 0.0;
    std::size_t k = 0;
    std::string anchor_label;

    nlohmann::ordered_json to_json() const;
    static ClassicalFactInstance from_json(const nlohmann::json& j);
};

extern const std::vector<std::string> kClassicalFactIds;

// Margin RHS - LHS, expected >= -1e-9 on hypothesis-satisfying instances.
//            code HYPOTHESIS_VIOLATED | UNKNOWN_FACT | AXIS_MISMATCH
double verify_classical_fact(const ClassicalFactInstance& inst);

} // namespace anchorlab
