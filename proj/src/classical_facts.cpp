#include "anchorlab/classical_facts.hpp"

#include <algorithm>
#include <cmath>

namespace anchorlab {

const std::vector<std::string> kClassicalFactIds = {
    "MARGINAL_L1", "EVENT_GAP", "COUPLING", "COND_PROB",
    "ANCHOR",      "ANCHOR_COR", "HOLENSTEIN"};

namespace {

double margin_marginal_l1(const ClassicalFactInstance& in) {
    require(in.dists.size() == 2, "HYPOTHESIS_VIOLATED", "need two distributions");
    double full = l1_distance(in.dists[0], in.dists[1]);
    double part = l1_distance(marginal(in.dists[0], in.names),
                              marginal(in.dists[1], in.names));
    return full - part;
}

double margin_event_gap(const ClassicalFactInstance& in) {
    require(in.dists.size() == 2 && in.events.size() == 1, "HYPOTHESIS_VIOLATED",
            "need two distributions and one event");
    double gap = std::abs(probability(in.dists[0], in.events[0]) -
                          probability(in.dists[1], in.events[0]));
    return 0.5 * l1_distance(in.dists[0], in.dists[1]) - gap;
}

double margin_coupling(const ClassicalFactInstance& in) {
    require(in.dists.size() == 1, "HYPOTHESIS_VIOLATED", "need one coupling");
    const FiniteDistribution& j = in.dists[0];
    require(j.axes().size() == 2 &&
                j.axes()[0].labels == j.axes()[1].labels,
            "HYPOTHESIS_VIOLATED", "coupling needs two equal-alphabet axes");
    const std::size_t n = j.axes()[0].labels.size();
    std::vector<double> m1(n, 0.0), m2(n, 0.0);
    double mismatch = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double w = j.weights()[a * n + b];
            m1[a] += w;
            m2[b] += w;
            if (a != b) mismatch += w;
        }
    double lhs = 0.0;
    for (std::size_t a = 0; a < n; ++a) lhs += std::abs(m1[a] - m2[a]);
    return 2.0 * mismatch - lhs;
}

double margin_cond_prob(const ClassicalFactInstance& in) {
    require(in.dists.size() == 2 && in.events.size() == 1, "HYPOTHESIS_VIOLATED",
            "need two distributions and one event");
    double dist = l1_distance(in.dists[0], in.dists[1]);
    require(dist <= in.eps + 1e-12, "HYPOTHESIS_VIOLATED",
            "distributions are farther apart than eps");
    require(probability(in.dists[0], in.events[0]) >= in.alpha - 1e-12,
            "HYPOTHESIS_VIOLATED", "event mass below alpha");
    require(in.alpha > in.eps, "HYPOTHESIS_VIOLATED", "needs alpha > eps");
    double lhs = l1_distance(condition(in.dists[0], in.events[0]),
                             condition(in.dists[1], in.events[0]));
    return 2.0 * in.eps / in.alpha - lhs;
}

// Mass of the anchor column and a check that it is proportional to the first
// marginal: P(x, anchor) = alpha * P_X(x) for every x.
double checked_anchor_mass(const FiniteDistribution& p, const std::string& label) {
    const std::size_t nx = p.axes()[0].labels.size();
    const auto& ylab = p.axes()[1].labels;
    auto it = std::find(ylab.begin(), ylab.end(), label);
    require(it != ylab.end(), "HYPOTHESIS_VIOLATED",
            "anchor label '" + label + "' missing from the second axis");
    std::size_t ystar = static_cast<std::size_t>(it - ylab.begin());

    std::size_t rest = p.size() / (nx * ylab.size());  // trailing axes block
    double alpha = 0.0;
    std::vector<double> px(nx, 0.0), col(nx, 0.0);
    for (std::size_t f = 0; f < p.size(); ++f) {
        Tuple t = p.tuple_of(f);
        px[t[0]] += p.weights()[f];
        if (t[1] == ystar) {
            col[t[0]] += p.weights()[f];
            alpha += p.weights()[f];
        }
    }
    (void)rest;
    require(alpha >= 1e-9, "HYPOTHESIS_VIOLATED", "anchor column has no mass");
    for (std::size_t x = 0; x < nx; ++x)
        require(std::abs(col[x] - alpha * px[x]) <= 1e-9, "HYPOTHESIS_VIOLATED",
                "anchor column is not proportional to the first marginal");
    return alpha;
}

// Joint on p's axes given by  p_{first two axes} * k(z | x).
FiniteDistribution front_times_kernel(const FiniteDistribution& p, const Kernel& k) {
    std::vector<std::string> xy = {p.axes()[0].name, p.axes()[1].name};
    return compose(marginal(p, xy), k);
}

double margin_anchor(const ClassicalFactInstance& in) {
    require(in.dists.size() == 1, "HYPOTHESIS_VIOLATED", "need one joint");
    const FiniteDistribution& p = in.dists[0];
    require(p.axes().size() == 3, "HYPOTHESIS_VIOLATED", "need three axes");
    double alpha = checked_anchor_mass(p, in.anchor_label);

    const std::string xn = p.axes()[0].name, yn = p.axes()[1].name, zn = p.axes()[2].name;
    FiniteDistribution at_anchor = condition(p, yn, in.anchor_label);  // axes (X, Z)
    Kernel k_star = conditional(at_anchor, {xn}, {zn});
    Kernel k_all = conditional(p, {xn}, {zn});
    double lhs = l1_distance(p, front_times_kernel(p, k_star));
    double rhs = (2.0 / alpha) * l1_distance(p, front_times_kernel(p, k_all));
    return rhs - lhs;
}

double margin_anchor_cor(const ClassicalFactInstance& in) {
    require(in.dists.size() == 2, "HYPOTHESIS_VIOLATED",
            "need the anchored pair law and the extended law");
    const FiniteDistribution& pxy = in.dists[0];
    const FiniteDistribution& pz = in.dists[1];
    require(pxy.axes().size() == 2 && pz.axes().size() == 3, "HYPOTHESIS_VIOLATED",
            "expected axes (X,Y) and (X,Y,Z)");
    for (int i = 0; i < 2; ++i)
        require(pxy.axes()[i].labels == pz.axes()[i].labels, "AXIS_MISMATCH",
                "pair law and extended law disagree on alphabets");
    double alpha = checked_anchor_mass(pxy, in.anchor_label);

    const std::string xn = pz.axes()[0].name, yn = pz.axes()[1].name, zn = pz.axes()[2].name;
    // eps := distance from pz to (pair law) x (z|x extracted from pz); the
    // pair-law closeness hypothesis follows from it by marginal contraction.
    Kernel k = conditional(pz, {xn}, {zn});
    std::vector<double> w(pz.size());
    {
        const std::size_t ny = pz.axes()[1].labels.size();
        const std::size_t nz = pz.axes()[2].labels.size();
        for (std::size_t f = 0; f < pz.size(); ++f) {
            Tuple t = pz.tuple_of(f);
            w[f] = pxy.weights()[t[0] * ny + t[1]] * k.rows[t[0]].weights()[t[2]];
        }
        (void)nz;
    }
    double eps = l1_distance(pz, make_normalized(pz.axes(), std::move(w)));

    FiniteDistribution lhs_cond = condition(pz, yn, in.anchor_label);  // axes (X, Z)
    FiniteDistribution lhs_marg = marginal(pz, {xn, zn});
    double lhs = l1_distance(lhs_cond, lhs_marg);
    return 11.0 * eps / alpha - lhs;
}

double margin_holenstein(const ClassicalFactInstance& in) {
    require(in.dists.size() == 1, "HYPOTHESIS_VIOLATED", "need the base law");
    require(in.kernels.size() == in.k + 1 && in.k >= 1, "HYPOTHESIS_VIOLATED",
            "need one kernel per coordinate plus the final one");
    require(in.events.size() == 1, "HYPOTHESIS_VIOLATED", "need the event");

    FiniteDistribution joint = in.dists[0];
    for (std::size_t i = 0; i < in.k; ++i) joint = compose(joint, in.kernels[i]);
    joint = compose(joint, in.kernels[in.k]);

    const std::string tn = in.dists[0].axes()[0].name;
    const std::string vn = in.kernels[in.k].target[0].name;
    const double nv = static_cast<double>(in.kernels[in.k].target[0].labels.size());

    double pr_e = probability(joint, in.events[0]);
    require(pr_e >= 1e-12, "HYPOTHESIS_VIOLATED", "event mass below 1e-12");
    FiniteDistribution cond = condition(joint, in.events[0]);

    double lhs = 0.0;
    for (std::size_t i = 0; i < in.k; ++i) {
        const std::string un = in.kernels[i].target[0].name;
        FiniteDistribution observed = marginal(cond, {tn, un, vn});
        FiniteDistribution product =
            marginal(compose(marginal(cond, {tn, vn}), in.kernels[i]), {tn, un, vn});
        lhs += l1_distance(observed, product);
    }
    double rhs = std::sqrt(static_cast<double>(in.k) *
                           (std::log2(nv) + std::log2(1.0 / pr_e)));
    return rhs - lhs;
}

} // namespace

double verify_classical_fact(const ClassicalFactInstance& inst) {
    if (inst.fact == "MARGINAL_L1") return margin_marginal_l1(inst);
    if (inst.fact == "EVENT_GAP") return margin_event_gap(inst);
    if (inst.fact == "COUPLING") return margin_coupling(inst);
    if (inst.fact == "COND_PROB") return margin_cond_prob(inst);
    if (inst.fact == "ANCHOR") return margin_anchor(inst);
    if (inst.fact == "ANCHOR_COR") return margin_anchor_cor(inst);
    if (inst.fact == "HOLENSTEIN") return margin_holenstein(inst);
    fail("UNKNOWN_FACT", "no checker for '" + inst.fact + "'");
}

nlohmann::ordered_json ClassicalFactInstance::to_json() const {
    nlohmann::ordered_json j;
    j["fact"] = fact;
    j["dists"] = nlohmann::ordered_json::array();
    for (const auto& d : dists) j["dists"].push_back(d.to_json());
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : events) j["events"].push_back(event_to_json(e));
    j["kernels"] = nlohmann::ordered_json::array();
    for (const auto& k : kernels) j["kernels"].push_back(kernel_to_json(k));
    j["names"] = names;
    j["alpha"] = alpha;
    j["eps"] = eps;
    j["k"] = k;
    j["anchor_label"] = anchor_label;
    return j;
}

ClassicalFactInstance ClassicalFactInstance::from_json(const nlohmann::json& j) {
    ClassicalFactInstance in;
    in.fact = j.at("fact").get<std::string>();
    for (const auto& d : j.at("dists")) in.dists.push_back(FiniteDistribution::from_json(d));
    for (const auto& e : j.at("events")) in.events.push_back(event_from_json(e));
    for (const auto& k : j.at("kernels")) in.kernels.push_back(kernel_from_json(k));
    in.names = j.at("names").get<std::vector<std::string>>();
    in.alpha = j.at("alpha").get<double>();
    in.eps = j.at("eps").get<double>();
    in.k = j.at("k").get<std::size_t>();
    in.anchor_label = j.at("anchor_label").get<std::string>();
    return in;
}

} // namespace anchorlab
