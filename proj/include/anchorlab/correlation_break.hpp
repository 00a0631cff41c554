#pragma once

#include "anchorlab/distribution.hpp"
#include "anchorlab/game.hpp"

namespace anchorlab {

inline constexpr const char* kAnchorLabel = "__anchor__";

// Base input table p over two axes plus the anchor weight used to pad it.
struct BreakerBase {
    FiniteDistribution p;
    double zeta = 0.0;
};

// Anchored padding of a two-axis table: the second axis gains the anchor
// label carrying zeta times the first-axis marginal, everything else scaled
// by (1-zeta), so the anchor column is exactly a product.
FiniteDistribution build_q(const FiniteDistribution& p, double zeta);

// Joint table over axes (X_i, Y_i, D_i, G_i) realizing the dependency-
// breaking construction: conditioned on (D_i, G_i) the two input coordinates
// are independent, while the (X_i, Y_i) marginal reproduces build_q(p,zeta).
struct BreakerJoint {
    FiniteDistribution base;  // the p the joint was built from
    double zeta = 0.0;
    FiniteDistribution joint;
};

BreakerJoint build_joint(const FiniteDistribution& p, double zeta);

// l1 gap between the joint's (X_i, Y_i) marginal and the padded table; this
// should vanish up to rounding.
double verify_marginal(const BreakerJoint& joint);

// P(Y_i != G_i | D_i = 1), computed from the table; closed form
// (1-zeta)^(2/3) (1-(1-zeta)^(1/3)), never more than zeta/3.
double mismatch_probability(const BreakerJoint& joint);

// I(X_i : Y_i | D_i, G_i) in bits, computed from the table; the construction
// makes this vanish up to rounding.
double breaker_conditional_mi(const BreakerJoint& joint);

// Read-only view of the proof-internal independence thresholds
// zeta^6/1440000 and zeta^6/(1440000 log2 |Z|).
struct IndependenceThresholds {
    double delta = 0.0;
    double delta_prime = 0.0;
};

IndependenceThresholds independence_thresholds(double zeta, double z_size);

// Extracts (p, zeta) from a game's input table.  When the second axis
// carries the anchor label, zeta is its mass and p is the table conditioned
// on not hitting it; the anchored column must then be an exact product
// (BAD_BASE otherwise).  Unanchored games use the table as-is with the
// supplied fallback weight.
BreakerBase breaker_base_from_game(const Game& game, double fallback_zeta);

} // namespace anchorlab
