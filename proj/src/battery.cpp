#include "anchorlab/battery.hpp"

#include "anchorlab/compression.hpp"
#include "anchorlab/correlation_break.hpp"
#include "anchorlab/game.hpp"
#include "anchorlab/linalg.hpp"
#include "anchorlab/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace anchorlab {

namespace {

const std::vector<std::string> kBreakerFactIds = {
    "BRK_MARGINAL", "BRK_INDEPENDENCE", "BRK_MISMATCH", "BRK_YSTAR_SANDWICH",
    "BRK_ANCHOR_IDENTITY"};

std::uint64_t fact_salt(const std::string& id) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::size_t pick_size(Rng& rng, std::size_t lo, std::size_t hi) {
    if (hi <= lo) return lo;
    const std::size_t span = hi - lo + 1;
    return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span)) % span;
}

std::vector<std::string> labels_of(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

FiniteDistribution rand_table(Rng& rng, std::vector<Axis> axes, double floor = 0.0) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.labels.size();
    std::vector<double> w = dirichlet_flat(rng, n);
    if (floor > 0.0) {
        const double total = 1.0 + floor * static_cast<double>(n);
        for (double& v : w) v = (v + floor) / total;
    }
    return make_normalized(std::move(axes), std::move(w));
}

// Random-priority prefix whose mass reaches the target.
Event rand_event(Rng& rng, const FiniteDistribution& p, double min_mass) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i-- > 1;) {
        std::size_t j = pick_size(rng, 0, i);
        std::swap(order[i], order[j]);
    }
    std::vector<Tuple> tuples;
    double mass = 0.0;
    for (std::size_t f : order) {
        tuples.push_back(p.tuple_of(f));
        mass += p.weights()[f];
        if (mass >= min_mass) break;
    }
    return Event::from_tuples(p.axes(), std::move(tuples));
}

// Pair table with the last column of the second axis proportional to the
// first marginal; alpha is the column mass.
FiniteDistribution rand_anchored_pair(Rng& rng, std::size_t nx, std::size_t ny0,
                                      double zeta, const std::string& anchor) {
    std::vector<double> p = dirichlet_flat(rng, nx * ny0);
    std::vector<double> px(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny0; ++y) px[x] += p[x * ny0 + y];
    std::vector<std::string> ylab = labels_of(ny0);
    ylab.push_back(anchor);
    std::vector<double> w(nx * (ny0 + 1), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny0; ++y)
            w[x * (ny0 + 1) + y] = (1.0 - zeta) * p[x * ny0 + y];
        w[x * (ny0 + 1) + ny0] = zeta * px[x];
    }
    return make_normalized({{"X", labels_of(nx)}, {"Y", std::move(ylab)}}, std::move(w));
}

// ---------------------------------------------------------------- classical

ClassicalFactInstance gen_classical(const std::string& fact, Rng& rng,
                                    const BatteryConfig& cfg) {
    ClassicalFactInstance in;
    in.fact = fact;
    const std::size_t cap = cfg.max_alphabet;

    if (fact == "MARGINAL_L1") {
        std::vector<Axis> axes = {{"u", labels_of(pick_size(rng, 2, cap))},
                                  {"v", labels_of(pick_size(rng, 2, cap))}};
        in.dists = {rand_table(rng, axes), rand_table(rng, axes)};
        in.names = {uniform01(rng) < 0.5 ? "u" : "v"};
        return in;
    }
    if (fact == "EVENT_GAP") {
        std::vector<Axis> axes = {{"u", labels_of(pick_size(rng, 2, cap))},
                                  {"v", labels_of(pick_size(rng, 2, cap))}};
        in.dists = {rand_table(rng, axes), rand_table(rng, axes)};
        in.events = {rand_event(rng, in.dists[0], 0.05)};
        return in;
    }
    if (fact == "COUPLING") {
        auto lab = labels_of(pick_size(rng, 2, cap));
        in.dists = {rand_table(rng, {{"l", lab}, {"r", lab}})};
        return in;
    }
    if (fact == "COND_PROB") {
        std::vector<Axis> axes = {{"u", labels_of(pick_size(rng, 2, cap))},
                                  {"v", labels_of(pick_size(rng, 2, cap))}};
        FiniteDistribution p = rand_table(rng, axes);
        FiniteDistribution r = rand_table(rng, axes);
        const double eta = 0.12 * uniform01(rng);
        std::vector<double> w(p.size());
        for (std::size_t f = 0; f < p.size(); ++f)
            w[f] = (1.0 - eta) * p.weights()[f] + eta * r.weights()[f];
        FiniteDistribution q = make_normalized(axes, std::move(w));
        in.eps = l1_distance(p, q) + 0.01;
        in.alpha = 0.35;
        in.events = {rand_event(rng, p, 0.4)};
        in.dists = {std::move(p), std::move(q)};
        return in;
    }
    if (fact == "ANCHOR") {
        const std::size_t nx = pick_size(rng, 2, cap);
        const std::size_t ny0 = pick_size(rng, 2, std::max<std::size_t>(2, cap - 1));
        const std::size_t nz = pick_size(rng, 2, 3);
        const double zeta = 0.15 + 0.45 * uniform01(rng);
        in.anchor_label = "star";
        FiniteDistribution pair = rand_anchored_pair(rng, nx, ny0, zeta, in.anchor_label);
        const std::size_t ny = ny0 + 1;
        std::vector<double> w(nx * ny * nz, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                std::vector<double> row = dirichlet_flat(rng, nz);
                for (std::size_t z = 0; z < nz; ++z)
                    w[(x * ny + y) * nz + z] = pair.weights()[x * ny + y] * row[z];
            }
        std::vector<Axis> axes = pair.axes();
        axes.push_back({"Z", labels_of(nz)});
        in.dists = {make_normalized(std::move(axes), std::move(w))};
        return in;
    }
    if (fact == "ANCHOR_COR") {
        const std::size_t nx = pick_size(rng, 2, cap);
        const std::size_t ny0 = pick_size(rng, 2, std::max<std::size_t>(2, cap - 1));
        const std::size_t nz = pick_size(rng, 2, 3);
        const double zeta = 0.15 + 0.45 * uniform01(rng);
        in.anchor_label = "star";
        FiniteDistribution pair = rand_anchored_pair(rng, nx, ny0, zeta, in.anchor_label);
        const std::size_t ny = ny0 + 1;
        std::vector<double> w(nx * ny * nz, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                std::vector<double> row = dirichlet_flat(rng, nz);
                for (std::size_t z = 0; z < nz; ++z)
                    w[(x * ny + y) * nz + z] = pair.weights()[x * ny + y] * row[z];
            }
        if (uniform01(rng) < 0.5) {
            // push the extension a bit off the exact product form
            std::vector<double> noise = dirichlet_flat(rng, w.size());
            const double eta = 0.1 * uniform01(rng);
            for (std::size_t f = 0; f < w.size(); ++f)
                w[f] = (1.0 - eta) * w[f] + eta * noise[f];
        }
        std::vector<Axis> axes = pair.axes();
        axes.push_back({"Z", labels_of(nz)});
        in.dists = {std::move(pair), make_normalized(std::move(axes), std::move(w))};
        return in;
    }
    if (fact == "HOLENSTEIN") {
        const std::size_t nt = pick_size(rng, 2, 3);
        in.k = pick_size(rng, 1, 3);
        const std::size_t nv = pick_size(rng, 2, std::min<std::size_t>(4, cap));
        Axis t_axis{"t", labels_of(nt)};
        in.dists = {rand_table(rng, {t_axis})};
        std::vector<Axis> joint_axes = {t_axis};
        for (std::size_t i = 0; i < in.k; ++i) {
            Axis u_axis{"u" + std::to_string(i + 1), labels_of(pick_size(rng, 2, 3))};
            std::vector<FiniteDistribution> rows;
            for (std::size_t r = 0; r < nt; ++r) rows.push_back(rand_table(rng, {u_axis}));
            in.kernels.push_back(Kernel::from_rows({t_axis}, {u_axis}, std::move(rows)));
            joint_axes.push_back(u_axis);
        }
        Axis v_axis{"v", labels_of(nv)};
        std::size_t nrows = 1;
        for (const auto& a : joint_axes) nrows *= a.labels.size();
        std::vector<FiniteDistribution> rows;
        for (std::size_t r = 0; r < nrows; ++r) rows.push_back(rand_table(rng, {v_axis}));
        in.kernels.push_back(Kernel::from_rows(joint_axes, {v_axis}, std::move(rows)));

        FiniteDistribution joint = in.dists[0];
        for (const auto& k : in.kernels) joint = compose(joint, k);
        in.events = {rand_event(rng, joint, 0.1)};
        return in;
    }
    fail("UNKNOWN_FACT", "no classical generator for '" + fact + "'");
}

// ------------------------------------------------------------------ quantum

DensityOperator rand_state(Rng& rng, const HilbertSpace& sp, double floor = 0.0) {
    Mat m = random_density(sp.dim(), rng);
    if (floor > 0.0) {
        m = (1.0 - floor) * m +
            floor * Mat::Identity(sp.dim(), sp.dim()) / static_cast<double>(sp.dim());
    }
    return DensityOperator::make(sp, hermitize(m));
}

QuantumFactInstance gen_quantum(const std::string& fact, Rng& rng,
                                const BatteryConfig& cfg, std::size_t trial) {
    QuantumFactInstance in;
    in.fact = fact;
    const Eigen::Index cap = static_cast<Eigen::Index>(cfg.max_dim);

    if (fact == "FVDG" || fact == "PINSKER_STD" || fact == "EVENT_PROB" ||
        fact == "SINF_UNITARY") {
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, static_cast<std::size_t>(cap)));
        HilbertSpace sp({{"q", d}});
        in.states = {rand_state(rng, sp), rand_state(rng, sp, fact == "FVDG" ? 0.0 : 0.1)};
        if (fact == "EVENT_PROB") in.eps = 0.1 + 0.8 * uniform01(rng);
        if (fact == "SINF_UNITARY") in.operators = {random_unitary(d, rng)};
        return in;
    }
    if (fact == "PINSKER_PAPER") {
        if (trial % 3 == 0) {
            // planted pair whose printed form fails: trace norm beats the
            // square root of the bit-valued divergence
            const double t = 0.2 + 0.1 * uniform01(rng);
            HilbertSpace sp({{"q", 2}});
            Mat u = random_unitary(2, rng);
            Mat d1 = Mat::Zero(2, 2);
            d1(0, 0) = 0.5 - t;
            d1(1, 1) = 0.5 + t;
            in.states = {DensityOperator::make(sp, 0.5 * Mat::Identity(2, 2)),
                         DensityOperator::make(sp, hermitize(u * d1 * u.adjoint()))};
            return in;
        }
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, static_cast<std::size_t>(cap)));
        HilbertSpace sp({{"q", d}});
        in.states = {rand_state(rng, sp), rand_state(rng, sp, 0.1)};
        return in;
    }
    if (fact == "FVDG_PURE_LITERAL") {
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, static_cast<std::size_t>(cap)));
        HilbertSpace sp({{"q", d}});
        in.pures = {PureState::make(sp, random_unit_vector(d, rng)),
                    PureState::make(sp, random_unit_vector(d, rng))};
        return in;
    }
    if (fact == "CHAN_MONO") {
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, std::min<std::size_t>(4, static_cast<std::size_t>(cap))));
        HilbertSpace sp({{"q", d}});
        in.states = {rand_state(rng, sp), rand_state(rng, sp)};
        const Eigen::Index m = static_cast<Eigen::Index>(pick_size(rng, 1, 3));
        Mat iso = random_unitary(d * m, rng).leftCols(d);
        for (Eigen::Index i = 0; i < m; ++i)
            in.operators.push_back(iso.middleRows(i * d, d));
        return in;
    }
    if (fact == "SINF_TRIANGLE") {
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, static_cast<std::size_t>(cap)));
        HilbertSpace sp({{"q", d}});
        in.states = {rand_state(rng, sp, 0.08), rand_state(rng, sp, 0.08),
                     rand_state(rng, sp, 0.08)};
        return in;
    }
    if (fact == "DIM_UB") {
        Eigen::Index dy = 2, dz = 2;
        if (cap >= 6 && uniform01(rng) < 0.66) {
            if (uniform01(rng) < 0.5) dz = 3;
            else dy = 3;
        }
        HilbertSpace sp({{"Y", dy}, {"Z", dz}});
        in.states = {rand_state(rng, sp)};
        return in;
    }
    if (fact == "COND_DEC") {
        const std::size_t c = pick_size(rng, 2, 3);
        const Eigen::Index dq = static_cast<Eigen::Index>(pick_size(rng, 2, 3));
        std::vector<Axis> ax = {{"L", labels_of(c)}};
        HilbertSpace qs({{"q", dq}});
        std::vector<DensityOperator> rc, sc;
        for (std::size_t i = 0; i < c; ++i) {
            rc.push_back(rand_state(rng, qs));
            sc.push_back(rand_state(rng, qs, 0.1));
        }
        in.cqs = {CQState::make(rand_table(rng, ax), std::move(rc)),
                  CQState::make(rand_table(rng, ax, 0.1), std::move(sc))};
        return in;
    }
    if (fact == "IMAX_CLOSE") {
        const std::size_t nx = pick_size(rng, 2, 3);
        const std::size_t ny = pick_size(rng, 2, 3);
        std::vector<Axis> ax = {{"X", labels_of(nx)}, {"Y", labels_of(ny)}};
        HilbertSpace qs({{"Z", 2}});
        std::vector<DensityOperator> conds;
        for (std::size_t i = 0; i < nx * ny; ++i) conds.push_back(rand_state(rng, qs));
        CQState sigma = CQState::make(rand_table(rng, ax), std::move(conds));
        const double info =
            conditional_mutual_information(sigma, {"Y"}, {"Z"}, {"X"});
        in.c = info + 0.3 + 0.3 * uniform01(rng);
        in.eps = 0.3 + 0.15 * uniform01(rng);
        in.delta = 0.05 + 0.1 * uniform01(rng);
        const double eta = 0.4 * in.delta;
        std::vector<double> noise = dirichlet_flat(rng, sigma.classical.size());
        std::vector<double> w(sigma.classical.size());
        for (std::size_t f = 0; f < w.size(); ++f)
            w[f] = (1.0 - eta) * sigma.classical.weights()[f] + eta * noise[f];
        in.dists = {make_normalized(sigma.classical.axes(), std::move(w))};
        in.cqs = {std::move(sigma)};
        return in;
    }
    if (fact == "RAZ") {
        const std::size_t n1 = pick_size(rng, 2, 3);
        const std::size_t n2 = pick_size(rng, 2, 3);
        std::vector<Axis> ax = {{"U", labels_of(n1)}, {"V", labels_of(n2)}};
        HilbertSpace qs({{"q", 2}});
        std::vector<double> m1 = dirichlet_flat(rng, n1);
        std::vector<double> m2 = dirichlet_flat(rng, n2);
        const double t1 = 1.0 + 0.1 * static_cast<double>(n1);
        const double t2 = 1.0 + 0.1 * static_cast<double>(n2);
        for (double& v : m1) v = (v + 0.1) / t1;
        for (double& v : m2) v = (v + 0.1) / t2;
        std::vector<double> w(n1 * n2);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) w[i * n2 + j] = m1[i] * m2[j];
        DensityOperator fixed = rand_state(rng, qs, 0.1);
        std::vector<DensityOperator> sc(n1 * n2, fixed), rc;
        for (std::size_t i = 0; i < n1 * n2; ++i) rc.push_back(rand_state(rng, qs));
        in.cqs = {CQState::make(rand_table(rng, ax), std::move(rc)),
                  CQState::make(make_normalized(ax, std::move(w)), std::move(sc))};
        return in;
    }
    if (fact == "SUBSTATE") {
        const Eigen::Index d = static_cast<Eigen::Index>(
            pick_size(rng, 2, std::min<std::size_t>(4, static_cast<std::size_t>(cap))));
        HilbertSpace sp({{"q", d}});
        in.states = {rand_state(rng, sp), rand_state(rng, sp, 0.15)};
        in.eps = 0.25 + 0.1 * uniform01(rng);
        return in;
    }
    if (fact == "JRS_VERIFY") {
        const Eigen::Index dx = static_cast<Eigen::Index>(pick_size(rng, 2, 3));
        std::vector<double> spread = dirichlet_flat(rng, static_cast<std::size_t>(dx));
        const double lo = 0.27;
        std::vector<double> p(static_cast<std::size_t>(dx));
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = lo + (1.0 - lo * static_cast<double>(dx)) * spread[i];
        std::vector<Vec> s(static_cast<std::size_t>(dx), Vec::Zero(2));
        for (auto& v : s) {
            const double t = 0.05 + 0.3 * uniform01(rng);
            const double ph = 2.0 * M_PI * uniform01(rng);
            v(0) = std::cos(t);
            v(1) = std::sin(t) * Cplx(std::cos(ph), std::sin(ph));
        }
        HilbertSpace sp({{"X", dx}, {"Xc", dx}, {"B", 2}});
        Vec vec = Vec::Zero(sp.dim());
        for (Eigen::Index x = 0; x < dx; ++x)
            for (Eigen::Index b = 0; b < 2; ++b)
                vec((x * dx + x) * 2 + b) =
                    std::sqrt(p[static_cast<std::size_t>(x)]) *
                    s[static_cast<std::size_t>(x)](b);
        PureState st = PureState::make(sp, vec);

        HilbertSpace sp2({{"L", dx}, {"B", 2}});
        Mat rho_xb = Mat::Zero(2 * dx, 2 * dx);
        Mat theta = Mat::Zero(2, 2);
        Mat diag_p = Mat::Zero(dx, dx);
        for (Eigen::Index x = 0; x < dx; ++x) {
            const Mat blk = s[static_cast<std::size_t>(x)] *
                            s[static_cast<std::size_t>(x)].adjoint();
            rho_xb.block(2 * x, 2 * x, 2, 2) = p[static_cast<std::size_t>(x)] * blk;
            theta += p[static_cast<std::size_t>(x)] * blk;
            diag_p(x, x) = p[static_cast<std::size_t>(x)];
        }
        CompressionWitness witness{
            DensityOperator::make(sp2, hermitize(rho_xb)),
            DensityOperator::make(HilbertSpace({{"B", 2}}), hermitize(theta))};
        const double delta0 = 0.15 + 0.15 * uniform01(rng);
        CompressionResult res = compression_measurement(st, witness, delta0);
        const double k = relative_min_entropy(
            witness.rho_prime,
            DensityOperator::make(sp2, hermitize(kron(diag_p, theta))));
        in.pures = {std::move(st)};
        in.operators = std::move(res.operators);
        in.alpha = std::pow(2.0, -k / delta0) / 4.0;
        in.delta = 2.0 * delta0;
        return in;
    }
    fail("UNKNOWN_FACT", "no quantum generator for '" + fact + "'");
}

// ------------------------------------------------------------------ breaker

struct BreakerTrial {
    double margin = 0.0;
    nlohmann::ordered_json instance;
};

double breaker_margin_from_instance(const std::string& fact,
                                    const nlohmann::json& instance) {
    if (fact == "BRK_YSTAR_SANDWICH") {
        const double zeta = instance.at("zeta").get<double>();
        const double u = 1.0 - std::pow(1.0 - zeta, 2.0 / 3.0);
        return std::min(u - 2.0 * zeta / 3.0, zeta - u) + 1e-12;
    }
    if (fact == "BRK_ANCHOR_IDENTITY") {
        Game game = Game::from_json(instance.at("game"));
        AnchorSpec spec;
        spec.side = instance.at("side").get<std::string>();
        spec.zeta = instance.at("zeta").get<double>();
        Game anchored = anchor_game(game, spec);
        const double base = classical_value_exact(game).value;
        const double got = classical_value_exact(anchored).value;
        const double want = spec.zeta + (1.0 - spec.zeta) * base;
        return 1e-9 - std::abs(got - want);
    }
    FiniteDistribution p = FiniteDistribution::from_json(instance.at("p"));
    const double zeta = instance.at("zeta").get<double>();
    BreakerJoint joint = build_joint(p, zeta);
    if (fact == "BRK_MARGINAL") return 1e-12 - verify_marginal(joint);
    if (fact == "BRK_INDEPENDENCE")
        return 1e-10 - breaker_conditional_mi(joint);
    if (fact == "BRK_MISMATCH") {
        const double mm = mismatch_probability(joint);
        const double third = std::cbrt(1.0 - zeta);
        const double closed = third * third * (1.0 - third);
        return std::min(1e-12 - std::abs(mm - closed), zeta / 3.0 + 1e-12 - mm);
    }
    fail("UNKNOWN_FACT", "no breaker checker for '" + fact + "'");
}

BreakerTrial gen_breaker(const std::string& fact, Rng& rng, const BatteryConfig& cfg) {
    BreakerTrial out;
    if (fact == "BRK_YSTAR_SANDWICH") {
        out.instance["zeta"] = 0.02 + 0.88 * uniform01(rng);
    } else if (fact == "BRK_ANCHOR_IDENTITY") {
        const std::size_t lim = std::min<std::size_t>(3, cfg.max_alphabet);
        GameDraft draft;
        draft.x = labels_of(pick_size(rng, 2, lim));
        draft.y = labels_of(pick_size(rng, 2, lim));
        draft.a = labels_of(pick_size(rng, 2, lim));
        draft.b = labels_of(pick_size(rng, 2, lim));
        std::vector<double> q = dirichlet_flat(rng, draft.x.size() * draft.y.size());
        draft.q.assign(draft.x.size(), std::vector<double>(draft.y.size(), 0.0));
        for (std::size_t x = 0; x < draft.x.size(); ++x)
            for (std::size_t y = 0; y < draft.y.size(); ++y)
                draft.q[x][y] = q[x * draft.y.size() + y];
        for (const auto& x : draft.x)
            for (const auto& y : draft.y)
                for (const auto& a : draft.a)
                    for (const auto& b : draft.b)
                        draft.predicate.push_back({x, y, a, b, uniform01(rng) < 0.5});
        Game game = validate_game(draft);
        out.instance["game"] = game.to_json();
        out.instance["zeta"] = uniform01(rng) < 0.2 ? 0.0 : 0.05 + 0.65 * uniform01(rng);
        out.instance["side"] = uniform01(rng) < 0.5 ? "x" : "y";
    } else {
        const std::size_t nx = pick_size(rng, 2, cfg.max_alphabet);
        const std::size_t ny = pick_size(rng, 2, cfg.max_alphabet);
        FiniteDistribution p =
            rand_table(rng, {{"X", labels_of(nx)}, {"Y", labels_of(ny)}}, 0.01);
        out.instance["p"] = p.to_json();
        out.instance["zeta"] = fact == "BRK_MISMATCH"
                                   ? 0.02 + 0.88 * uniform01(rng)
                                   : 0.02 + 0.93 * uniform01(rng);
    }
    out.margin = breaker_margin_from_instance(fact, out.instance);
    return out;
}

// ------------------------------------------------------------------- runner

enum class Family { Classical, Quantum, Breaker };

Family family_of(const std::string& fact) {
    if (std::find(kClassicalFactIds.begin(), kClassicalFactIds.end(), fact) !=
        kClassicalFactIds.end())
        return Family::Classical;
    if (std::find(kQuantumFactIds.begin(), kQuantumFactIds.end(), fact) !=
        kQuantumFactIds.end())
        return Family::Quantum;
    if (std::find(kBreakerFactIds.begin(), kBreakerFactIds.end(), fact) !=
        kBreakerFactIds.end())
        return Family::Breaker;
    fail("UNKNOWN_FACT", "unrecognized fact id: " + fact);
}

double mapped_margin(const std::string& fact, double raw) {
    if (family_of(fact) == Family::Quantum && quantum_fact_is_equality(fact))
        return -std::abs(raw);
    return raw;
}

struct TrialRecord {
    double margin = 0.0;
    bool errored = false;
    std::string error;
    nlohmann::ordered_json instance;  // filled only when requested
};

TrialRecord run_trial(const std::string& fact, const BatteryConfig& cfg,
                      std::size_t trial, bool keep_instance) {
    Rng rng(mix_seed(mix_seed(cfg.seed, fact_salt(fact)), trial));
    TrialRecord rec;
    try {
        switch (family_of(fact)) {
            case Family::Classical: {
                ClassicalFactInstance inst = gen_classical(fact, rng, cfg);
                rec.margin = mapped_margin(fact, verify_classical_fact(inst));
                if (keep_instance) rec.instance = inst.to_json();
                break;
            }
            case Family::Quantum: {
                QuantumFactInstance inst = gen_quantum(fact, rng, cfg, trial);
                rec.margin = mapped_margin(fact, verify_quantum_fact(inst));
                if (keep_instance) rec.instance = inst.to_json();
                break;
            }
            case Family::Breaker: {
                BreakerTrial bt = gen_breaker(fact, rng, cfg);
                rec.margin = bt.margin;
                if (keep_instance) rec.instance = std::move(bt.instance);
                break;
            }
        }
    } catch (const Error& e) {
        rec.errored = true;
        rec.error = e.what();
        rec.margin = -std::numeric_limits<double>::infinity();
    }
    return rec;
}

void check_config(const BatteryConfig& cfg) {
    battery_fact_ids(cfg.suite);  // CONFIG_RANGE on a bad suite name
    require(cfg.max_alphabet >= 2 && cfg.max_alphabet <= 6, "CONFIG_RANGE",
            "alphabet cap must lie in [2, 6]");
    require(cfg.max_dim >= 2 && cfg.max_dim <= 8, "CONFIG_RANGE",
            "dimension cap must lie in [2, 8]");
    require(std::isfinite(cfg.classical_tolerance) && std::isfinite(cfg.quantum_tolerance),
            "CONFIG_RANGE", "tolerances must be finite");
}

} // namespace

std::vector<std::string> battery_fact_ids(const std::string& suite) {
    std::vector<std::string> out;
    if (suite == "classical" || suite == "all")
        out.insert(out.end(), kClassicalFactIds.begin(), kClassicalFactIds.end());
    if (suite == "quantum" || suite == "all")
        out.insert(out.end(), kQuantumFactIds.begin(), kQuantumFactIds.end());
    if (suite == "breaker" || suite == "all")
        out.insert(out.end(), kBreakerFactIds.begin(), kBreakerFactIds.end());
    require(!out.empty(), "CONFIG_RANGE", "unknown suite '" + suite + "'");
    return out;
}

double battery_trial_margin(const std::string& fact, const BatteryConfig& config,
                            std::size_t trial) {
    check_config(config);
    return run_trial(fact, config, trial, false).margin;
}

double replay_dump(const nlohmann::json& dump) {
    const std::string fact = dump.at("fact").get<std::string>();
    const auto& instance = dump.at("instance");
    switch (family_of(fact)) {
        case Family::Classical:
            return mapped_margin(
                fact, verify_classical_fact(ClassicalFactInstance::from_json(instance)));
        case Family::Quantum:
            return mapped_margin(
                fact, verify_quantum_fact(QuantumFactInstance::from_json(instance)));
        case Family::Breaker:
            return breaker_margin_from_instance(fact, instance);
    }
    fail("UNKNOWN_FACT", "unrecognized fact id: " + fact);
}

BatteryReport run_battery(const BatteryConfig& config) {
    check_config(config);
    BatteryReport report;
    report.seed = config.seed;
    if (config.trials == 0) return report;

    for (const std::string& fact : battery_fact_ids(config.suite)) {
        const Family fam = family_of(fact);
        const double tol = fam == Family::Quantum ? config.quantum_tolerance
                                                  : config.classical_tolerance;
        FactSummary sum;
        sum.fact = fact;
        sum.report_only = fam == Family::Quantum && quantum_fact_is_report_only(fact);
        sum.min_margin = std::numeric_limits<double>::infinity();
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
            TrialRecord rec = run_trial(fact, config, trial, false);
            ++sum.trials;
            sum.min_margin = std::min(sum.min_margin, rec.margin);
            const bool below = rec.margin < -tol;
            if (sum.report_only) {
                if (below) ++sum.discrepancies;
                continue;
            }
            if (below || rec.errored) {
                ++sum.violations;
                if (sum.dumps.size() < config.max_dumps) {
                    TrialRecord full = run_trial(fact, config, trial, true);
                    nlohmann::ordered_json dump;
                    dump["fact"] = fact;
                    dump["trial"] = trial;
                    dump["margin"] = rec.margin;
                    if (rec.errored) dump["error"] = rec.error;
                    dump["instance"] = std::move(full.instance);
                    sum.dumps.push_back(std::move(dump));
                }
            }
        }
        if (!sum.report_only && sum.violations > 0) report.pass = false;
        report.facts.push_back(std::move(sum));
    }
    return report;
}

nlohmann::ordered_json BatteryReport::to_json() const {
    nlohmann::ordered_json facts_json = nlohmann::ordered_json::object();
    for (const auto& f : facts) {
        nlohmann::ordered_json fj;
        fj["trials"] = f.trials;
        fj["min_margin"] = f.min_margin;
        fj["violations"] = f.violations;
        if (f.report_only) {
            fj["report_only"] = true;
            fj["discrepancies"] = f.discrepancies;
        }
        fj["dumps"] = nlohmann::ordered_json::array();
        for (const auto& d : f.dumps) fj["dumps"].push_back(d);
        facts_json[f.fact] = std::move(fj);
    }
    nlohmann::ordered_json out;
    out["seed"] = seed;
    out["facts"] = std::move(facts_json);
    return out;
}

} // namespace anchorlab
