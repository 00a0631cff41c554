#include "anchorlab/correlation_break.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace anchorlab {

namespace {

void check_base(const FiniteDistribution& p) {
    require(p.axes().size() == 2, "BAD_BASE", "base table must have exactly two axes");
    const auto& ylabels = p.axes()[1].labels;
    require(std::find(ylabels.begin(), ylabels.end(), kAnchorLabel) == ylabels.end(),
            "BAD_BASE", "second axis already carries the anchor label");
}

void check_zeta(double zeta) {
    require(zeta > 0.0 && zeta < 1.0, "PARAM_RANGE", "zeta must lie in (0,1)");
}

std::vector<double> x_marginal(const FiniteDistribution& p) {
    const std::size_t nx = p.axes()[0].labels.size();
    const std::size_t ny = p.axes()[1].labels.size();
    std::vector<double> px(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) px[x] += p.weight(Tuple{x, y});
    return px;
}

double entropy_bits(const std::vector<double>& w) {
    double h = 0.0;
    for (double v : w)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

} // namespace

FiniteDistribution build_q(const FiniteDistribution& p, double zeta) {
    check_base(p);
    check_zeta(zeta);
    const auto& xaxis = p.axes()[0];
    const auto& yaxis = p.axes()[1];
    const std::size_t nx = xaxis.labels.size();
    const std::size_t ny = yaxis.labels.size();
    const std::vector<double> px = x_marginal(p);

    Axis ystar = yaxis;
    ystar.labels.push_back(kAnchorLabel);
    std::vector<double> w(nx * (ny + 1), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y)
            w[x * (ny + 1) + y] = (1.0 - zeta) * p.weight(Tuple{x, y});
        w[x * (ny + 1) + ny] = zeta * px[x];
    }
    return make_normalized({xaxis, ystar}, std::move(w));
}

BreakerJoint build_joint(const FiniteDistribution& p, double zeta) {
    check_base(p);
    check_zeta(zeta);
    const auto& xlabels = p.axes()[0].labels;
    const auto& ylabels = p.axes()[1].labels;
    const std::size_t nx = xlabels.size();
    const std::size_t ny = ylabels.size();
    const std::vector<double> px = x_marginal(p);
    for (std::size_t x = 0; x < nx; ++x)
        require(px[x] > 0.0, "ZERO_ROW",
                "base table must have full support on its first-axis marginal");

    // Hint axis labels: every first-axis label, then second-axis labels not
    // already present, then the anchor label.
    std::vector<std::string> glabels = xlabels;
    std::set<std::string> seen(xlabels.begin(), xlabels.end());
    for (const auto& y : ylabels)
        if (seen.insert(y).second) glabels.push_back(y);
    if (seen.insert(kAnchorLabel).second) glabels.push_back(kAnchorLabel);
    const auto gpos = [&](const std::string& l) {
        return static_cast<std::size_t>(
            std::find(glabels.begin(), glabels.end(), l) - glabels.begin());
    };

    Axis xa{"X_i", xlabels};
    Axis ya{"Y_i", ylabels};
    ya.labels.push_back(kAnchorLabel);
    Axis da{"D_i", {"0", "1"}};
    Axis ga{"G_i", glabels};
    const std::size_t nys = ny + 1;  // second axis including the anchor slot
    const std::size_t ng = glabels.size();
    std::vector<double> w(nx * nys * 2 * ng, 0.0);
    const auto at = [&](std::size_t x, std::size_t y, std::size_t d, std::size_t g)
        -> double& { return w[((x * nys + y) * 2 + d) * ng + g]; };

    const double omz = 1.0 - zeta;
    const double third = std::cbrt(omz);           // (1-zeta)^(1/3)
    const double two_thirds = third * third;       // (1-zeta)^(2/3)
    const std::size_t gstar = gpos(kAnchorLabel);
    for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t gx = gpos(xlabels[x]);
        // D=0: the hint reveals the first coordinate.
        at(x, ny, 0, gx) += 0.5 * zeta * px[x];
        for (std::size_t y = 0; y < ny; ++y)
            at(x, y, 0, gx) += 0.5 * omz * p.weight(Tuple{x, y});
        // D=1, hint = anchor: second coordinate is forced to the anchor.
        at(x, ny, 1, gstar) += 0.5 * (1.0 - two_thirds) * px[x];
        // D=1, hint = a real second-coordinate value: the second coordinate
        // either follows the hint or falls back to the anchor.
        for (std::size_t y = 0; y < ny; ++y) {
            const double pxy = p.weight(Tuple{x, y});
            const std::size_t gy = gpos(ylabels[y]);
            at(x, ny, 1, gy) += 0.5 * two_thirds * (1.0 - third) * pxy;
            at(x, y, 1, gy) += 0.5 * omz * pxy;
        }
    }

    BreakerJoint out;
    out.base = p;
    out.zeta = zeta;
    out.joint = make_normalized({xa, ya, da, ga}, std::move(w));

    // Internal consistency: the coin is fair and the hint decouples the
    // coordinates.
    double d1 = 0.0;
    for (std::size_t i = 0; i < out.joint.size(); ++i) {
        const Tuple t = out.joint.tuple_of(i);
        if (t[2] == 1) d1 += out.joint.weight(i);
    }
    require(std::abs(d1 - 0.5) <= 1e-12, "NUMERIC_CHECK_FAILED",
            "coin marginal is not uniform");
    require(breaker_conditional_mi(out) <= 1e-10, "NUMERIC_CHECK_FAILED",
            "hint fails to decouple the coordinates");
    return out;
}

double verify_marginal(const BreakerJoint& joint) {
    FiniteDistribution m = marginal(joint.joint, {"X_i", "Y_i"});
    FiniteDistribution q = build_q(joint.base, joint.zeta);
    // Rename the reference axes so the two tables are directly comparable.
    std::vector<Axis> axes = q.axes();
    axes[0].name = "X_i";
    axes[1].name = "Y_i";
    FiniteDistribution ref = make_normalized(std::move(axes),
                                             std::vector<double>(q.weights()));
    return l1_distance(m, ref);
}

double mismatch_probability(const BreakerJoint& joint) {
    const auto& yl = joint.joint.axes()[1].labels;
    const auto& gl = joint.joint.axes()[3].labels;
    double d1 = 0.0;
    double bad = 0.0;
    for (std::size_t i = 0; i < joint.joint.size(); ++i) {
        const Tuple t = joint.joint.tuple_of(i);
        if (t[2] != 1) continue;
        const double v = joint.joint.weight(i);
        d1 += v;
        if (yl[t[1]] != gl[t[3]]) bad += v;
    }
    require(d1 > 0.0, "NUMERIC_CHECK_FAILED", "coin never lands on 1");
    return bad / d1;
}

double breaker_conditional_mi(const BreakerJoint& joint) {
    const FiniteDistribution& j = joint.joint;
    const std::size_t nx = j.axes()[0].labels.size();
    const std::size_t nys = j.axes()[1].labels.size();
    const std::size_t ng = j.axes()[3].labels.size();
    double cmi = 0.0;
    for (std::size_t d = 0; d < 2; ++d) {
        for (std::size_t g = 0; g < ng; ++g) {
            double mass = 0.0;
            std::vector<double> cell(nx * nys, 0.0);
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t y = 0; y < nys; ++y) {
                    const double v = j.weight(Tuple{x, y, d, g});
                    cell[x * nys + y] = v;
                    mass += v;
                }
            if (mass <= 1e-15) continue;
            std::vector<double> mx(nx, 0.0);
            std::vector<double> my(nys, 0.0);
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t y = 0; y < nys; ++y) {
                    cell[x * nys + y] /= mass;
                    mx[x] += cell[x * nys + y];
                    my[y] += cell[x * nys + y];
                }
            cmi += mass * (entropy_bits(mx) + entropy_bits(my) - entropy_bits(cell));
        }
    }
    return std::max(cmi, 0.0);
}

IndependenceThresholds independence_thresholds(double zeta, double z_size) {
    check_zeta(zeta);
    require(z_size >= 2.0, "PARAM_RANGE", "answer alphabet size must be at least 2");
    IndependenceThresholds out;
    const double z6 = std::pow(zeta, 6.0);
    out.delta = z6 / 1440000.0;
    out.delta_prime = z6 / (1440000.0 * std::log2(z_size));
    return out;
}

BreakerBase breaker_base_from_game(const Game& game, double fallback_zeta) {
    const FiniteDistribution& q = game.q;
    const auto& ylabels = q.axes()[1].labels;
    const auto it = std::find(ylabels.begin(), ylabels.end(), kAnchorLabel);
    if (it == ylabels.end()) return BreakerBase{q, fallback_zeta};

    const std::size_t ystar = static_cast<std::size_t>(it - ylabels.begin());
    const std::size_t nx = q.axes()[0].labels.size();
    const std::size_t ny = ylabels.size();
    double zeta = 0.0;
    for (std::size_t x = 0; x < nx; ++x) zeta += q.weight(Tuple{x, ystar});
    require(zeta > 1e-12 && zeta < 1.0 - 1e-12, "BAD_BASE",
            "anchor column mass must lie strictly inside (0,1)");

    Axis ya = q.axes()[1];
    ya.labels.erase(ya.labels.begin() + static_cast<std::ptrdiff_t>(ystar));
    std::vector<double> w(nx * (ny - 1), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        std::size_t col = 0;
        for (std::size_t y = 0; y < ny; ++y) {
            if (y == ystar) continue;
            w[x * (ny - 1) + col] = q.weight(Tuple{x, y}) / (1.0 - zeta);
            ++col;
        }
    }
    BreakerBase out;
    out.p = make_normalized({q.axes()[0], ya}, std::move(w));
    out.zeta = zeta;
    // The anchored column must be an exact product; rebuilding the padded
    // table from (p, zeta) must reproduce the game's table.
    FiniteDistribution rebuilt = build_q(out.p, zeta);
    std::vector<Axis> cmp = rebuilt.axes();
    // The rebuilt table puts the anchor label last; re-order to the game's
    // label order before comparing.
    const auto& gl = q.axes()[1].labels;
    std::vector<std::size_t> perm(gl.size());
    for (std::size_t y = 0; y < gl.size(); ++y) {
        const auto jt = std::find(cmp[1].labels.begin(), cmp[1].labels.end(), gl[y]);
        require(jt != cmp[1].labels.end(), "BAD_BASE", "label bookkeeping failed");
        perm[y] = static_cast<std::size_t>(jt - cmp[1].labels.begin());
    }
    double gap = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < gl.size(); ++y)
            gap += std::abs(q.weight(Tuple{x, y}) - rebuilt.weight(Tuple{x, perm[y]}));
    require(gap <= 1e-9, "BAD_BASE",
            "anchored column is not a product of the first-axis marginal");
    return out;
}

} // namespace anchorlab
