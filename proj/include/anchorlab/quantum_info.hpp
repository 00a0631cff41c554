#pragma once

#include <string>
#include <vector>

#include "anchorlab/density.hpp"

namespace anchorlab {

// --- distances -------------------------------------------------------------

// Sum of absolute eigenvalues of rho - sigma; in [0, 2].   code SPACE_MISMATCH
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// F(rho, sigma) = trace norm of sqrt(rho) sqrt(sigma); in [0, 1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// --- structural operations -------------------------------------------------

// Purification on space (x) one mirror factor of equal total dimension.
PureState purify(const DensityOperator& rho);

// Reduced operator after tracing out the named factors.  code UNKNOWN_FACTOR
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& drop);

// Same, acting on a raw matrix over `space` (no density validation).
Mat partial_trace_matrix(const Mat& m, const HilbertSpace& space,
                         const std::vector<std::string>& drop);

// View a vector on `space` as a matrix whose rows run over the `row_group`
// factors (in space order) and whose columns run over the rest.
Mat matricize(const Vec& v, const HilbertSpace& space,
              const std::vector<std::string>& row_group);

// --- entropic quantities (base-2 logarithms) -------------------------------

double von_neumann_entropy(const DensityOperator& rho);

// S(rho||sigma); +infinity when supp(rho) is not inside supp(sigma)
// (eigenvalues <= 1e-10 count as zero).                   code SPACE_MISMATCH
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

// S_inf(rho||sigma) = log2 of the largest eigenvalue of
// sigma^{-1/2} rho sigma^{-1/2} on supp(sigma); +infinity off-support.
double relative_min_entropy(const DensityOperator& rho, const DensityOperator& sigma);

struct SmoothWitness {
    DensityOperator rho_prime;  // trace_distance(rho, rho_prime) <= eps
    double value = 0.0;         // S_inf(rho_prime || sigma)
};

// Upper-bound witness for the eps-smooth relative min-entropy.  Candidates:
// the spectral truncation family of sigma^{-1/2} rho sigma^{-1/2} (threshold
// found by binary search against the trace-distance budget, then swept), and
// convex mixtures of rho toward sigma within the same budget; the feasible
// candidate with the least S_inf(.||sigma) is returned.
//            code SUPPORT_VIOLATION | PARAM_RANGE | WITNESS_NOT_FOUND
SmoothWitness smooth_min_entropy_witness(const DensityOperator& rho,
                                         const DensityOperator& sigma, double eps);

// --- mutual information ----------------------------------------------------

// I(G1:G2) = S(rho_G1) + S(rho_G2) - S(rho_G1G2); factors outside the two
// groups are traced out first.                            code UNKNOWN_FACTOR
double mutual_information(const DensityOperator& rho,
                          const std::vector<std::string>& group1,
                          const std::vector<std::string>& group2);

// CQ variant: groups may name classical axes and/or quantum factors.
double mutual_information(const CQState& cq,
                          const std::vector<std::string>& group1,
                          const std::vector<std::string>& group2);

// E over the conditioning axes' distribution of I(G1:G2) in the conditioned
// state; conditioning axes must be classical and disjoint from both groups.
double conditional_mutual_information(const CQState& cq,
                                      const std::vector<std::string>& group1,
                                      const std::vector<std::string>& group2,
                                      const std::vector<std::string>& given);

} // namespace anchorlab
