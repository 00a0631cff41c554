#include "anchorlab/quantum_facts.hpp"

#include "anchorlab/max_information.hpp"
#include "anchorlab/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCap = 1e6;  // stand-in for an infinite slack in margins

double capped(double v) { return std::isfinite(v) ? v : kCap; }

nlohmann::ordered_json mat_to_json(const Mat& m) {
    nlohmann::ordered_json re = nlohmann::ordered_json::array();
    nlohmann::ordered_json im = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json rr = nlohmann::ordered_json::array();
        nlohmann::ordered_json ri = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return nlohmann::ordered_json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Mat mat_from_json(const nlohmann::json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    Eigen::Index rows = static_cast<Eigen::Index>(re.size());
    Eigen::Index cols = rows ? static_cast<Eigen::Index>(re[0].size()) : 0;
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = Cplx(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                               .get<double>(),
                           im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                               .get<double>());
    return m;
}

Mat apply_channel(const std::vector<Mat>& kraus, const Mat& rho) {
    Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
    for (const Mat& k : kraus) out += k * rho * k.adjoint();
    return hermitize(out);
}

// Classical relative entropy in bits; +inf when p has mass where q does not.
double classical_relative_entropy(const std::vector<double>& p,
                                  const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 1e-12) continue;
        if (q[i] <= 1e-12) return kInf;
        s += p[i] * std::log2(p[i] / q[i]);
    }
    return s;
}

double margin_fvdg(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    double l1 = trace_distance(inst.states[0], inst.states[1]);
    double f = fidelity(inst.states[0], inst.states[1]);
    double lower = l1 - 2.0 * (1.0 - f);
    double upper = 2.0 * std::sqrt(std::max(0.0, 1.0 - f * f)) - l1;
    return std::min(lower, upper);
}

double report_fvdg_pure(const QuantumFactInstance& inst) {
    require(inst.pures.size() == 2, "HYPOTHESIS_VIOLATED", "needs two pure states");
    double l1 = trace_distance(inst.pures[0].density(), inst.pures[1].density());
    double ov = std::abs(inst.pures[0].vector.dot(inst.pures[1].vector));
    return std::sqrt(std::max(0.0, 1.0 - ov * ov)) - l1;
}

double margin_chan_mono(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    require(!inst.operators.empty(), "KRAUS_INCOMPLETE", "no Kraus elements given");
    const Eigen::Index d = inst.states[0].space.dim();
    Mat sum = Mat::Zero(d, d);
    for (const Mat& k : inst.operators) {
        require(k.rows() == d && k.cols() == d, "KRAUS_INCOMPLETE",
                "Kraus element has wrong shape");
        sum += k.adjoint() * k;
    }
    require((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-9,
            "KRAUS_INCOMPLETE", "Kraus elements do not sum to the identity");

    const auto& space = inst.states[0].space;
    DensityOperator out_rho =
        DensityOperator::make(space, apply_channel(inst.operators, inst.states[0].matrix));
    DensityOperator out_sigma =
        DensityOperator::make(space, apply_channel(inst.operators, inst.states[1].matrix));
    double td_shrink = trace_distance(inst.states[0], inst.states[1]) -
                       trace_distance(out_rho, out_sigma);
    double f_grow = fidelity(out_rho, out_sigma) - fidelity(inst.states[0], inst.states[1]);
    return std::min(td_shrink, f_grow);
}

double margin_pinsker_std(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    double s = relative_entropy(inst.states[0], inst.states[1]);
    if (!std::isfinite(s)) return kCap;
    double bound = std::sqrt(2.0 * std::log(2.0) * std::max(0.0, s));
    return bound - trace_distance(inst.states[0], inst.states[1]);
}

double report_pinsker_paper(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    double s = relative_entropy(inst.states[0], inst.states[1]);
    if (!std::isfinite(s)) s = kCap;
    return std::sqrt(std::max(0.0, s)) - trace_distance(inst.states[0], inst.states[1]);
}

double margin_event_prob(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    require(inst.eps > 0.0 && inst.eps <= 1.0, "HYPOTHESIS_VIOLATED",
            "mixture weight must lie in (0,1]");
    Mat mix = hermitize(inst.eps * inst.states[0].matrix +
                        (1.0 - inst.eps) * inst.states[1].matrix);
    DensityOperator sigma = DensityOperator::make(inst.states[0].space, std::move(mix));
    double s_inf = relative_min_entropy(inst.states[0], sigma);
    return std::log2(1.0 / inst.eps) - s_inf;
}

double margin_sinf_triangle(const QuantumFactInstance& inst) {
    require(inst.states.size() == 3, "HYPOTHESIS_VIOLATED", "needs three states");
    const auto& rho = inst.states[0];
    const auto& mid = inst.states[1];
    const auto& sigma = inst.states[2];
    double tol = scaled_tol(1e-9, rho.space.dim());
    require(support_leak(rho.matrix, mid.matrix) <= tol, "HYPOTHESIS_VIOLATED",
            "first support not inside the middle support");
    require(support_leak(mid.matrix, sigma.matrix) <= tol, "HYPOTHESIS_VIOLATED",
            "middle support not inside the last support");
    return relative_min_entropy(rho, mid) + relative_min_entropy(mid, sigma) -
           relative_min_entropy(rho, sigma);
}

double equality_sinf_unitary(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2 && inst.operators.size() == 1,
            "HYPOTHESIS_VIOLATED", "needs two states and one unitary");
    const Mat& u = inst.operators[0];
    require(is_unitary(u, 1e-8), "HYPOTHESIS_VIOLATED", "operator is not unitary");
    const auto& space = inst.states[0].space;
    DensityOperator rot_rho =
        DensityOperator::make(space, hermitize(u * inst.states[0].matrix * u.adjoint()));
    DensityOperator rot_sigma =
        DensityOperator::make(space, hermitize(u * inst.states[1].matrix * u.adjoint()));
    double lhs = relative_min_entropy(rot_rho, rot_sigma);
    double rhs = relative_min_entropy(inst.states[0], inst.states[1]);
    if (!std::isfinite(lhs) && !std::isfinite(rhs)) return 0.0;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) return kCap;
    return std::abs(lhs - rhs);
}

double margin_dim_ub(const QuantumFactInstance& inst) {
    require(inst.states.size() == 1, "HYPOTHESIS_VIOLATED", "needs one bipartite state");
    const auto& rho = inst.states[0];
    require(rho.space.factors().size() == 2, "HYPOTHESIS_VIOLATED",
            "state must be bipartite");
    double ly = std::log2(static_cast<double>(rho.space.factors()[0].dim));
    double lz = std::log2(static_cast<double>(rho.space.factors()[1].dim));
    return 2.0 * std::min(ly, lz) - max_information(rho, 0.0);
}

void require_matching_cq(const CQState& a, const CQState& b) {
    require(axes_equal(a.classical.axes(), b.classical.axes()), "HYPOTHESIS_VIOLATED",
            "classical axes differ");
    require(a.quantum_space() == b.quantum_space(), "HYPOTHESIS_VIOLATED",
            "quantum spaces differ");
}

double equality_cond_dec(const QuantumFactInstance& inst) {
    require(inst.cqs.size() == 2, "HYPOTHESIS_VIOLATED", "needs two CQ states");
    const CQState& rho = inst.cqs[0];
    const CQState& sigma = inst.cqs[1];
    require_matching_cq(rho, sigma);

    double lhs = relative_entropy(rho.embed(), sigma.embed());
    double rhs = classical_relative_entropy(rho.classical.weights(),
                                            sigma.classical.weights());
    if (std::isfinite(rhs)) {
        for (std::size_t i = 0; i < rho.classical.size(); ++i) {
            double w = rho.classical.weights()[i];
            if (w <= 1e-12) continue;
            double s = relative_entropy(rho.conditionals[i], sigma.conditionals[i]);
            if (!std::isfinite(s)) {
                rhs = kInf;
                break;
            }
            rhs += w * s;
        }
    }
    if (!std::isfinite(lhs) && !std::isfinite(rhs)) return 0.0;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) return kCap;
    return std::abs(lhs - rhs);
}

// Cheap sound upper bound on the (smoothed) max-information of a bipartite
// state: unsmoothed max-relative entropy against the better of two reference
// states that certify the dimension bound.
double max_information_quick_bound(const DensityOperator& rho_yz) {
    const Eigen::Index dz = rho_yz.space.factors()[1].dim;
    const std::string y_name = rho_yz.space.factors()[0].name;
    const std::string z_name = rho_yz.space.factors()[1].name;
    Mat rho_y = partial_trace_matrix(rho_yz.matrix, rho_yz.space, {z_name});
    Mat inv_sqrt_y = kron(psd_power(rho_y, -0.5), Mat::Identity(dz, dz));
    Mat hat_z = partial_trace_matrix(inv_sqrt_y * rho_yz.matrix * inv_sqrt_y,
                                     rho_yz.space, {y_name});
    double best = kInf;
    std::vector<Mat> cands = {Mat::Identity(dz, dz) / static_cast<double>(dz)};
    double tr = hat_z.trace().real();
    if (tr > 1e-14) cands.push_back(hermitize(hat_z / tr));
    for (const Mat& cand : cands) {
        Mat ref = kron(rho_y, cand);
        DensityOperator sigma =
            DensityOperator::make(rho_yz.space, hermitize(ref / ref.trace().real()));
        best = std::min(best, relative_min_entropy(rho_yz, sigma));
    }
    return best;
}

double margin_imax_close(const QuantumFactInstance& inst) {
    require(inst.cqs.size() == 1 && inst.dists.size() == 1, "HYPOTHESIS_VIOLATED",
            "needs one CQ state and one perturbed input table");
    const CQState& sigma = inst.cqs[0];
    const FiniteDistribution& perturbed = inst.dists[0];
    require(sigma.classical.axes().size() == 2, "HYPOTHESIS_VIOLATED",
            "classical part must have two axes");
    double dist = l1_distance(sigma.classical, perturbed);
    require(dist <= inst.delta + 1e-9, "HYPOTHESIS_VIOLATED",
            "input tables farther apart than the stated budget");
    require(inst.delta < 0.5 && inst.delta < inst.eps && inst.eps < 0.5,
            "HYPOTHESIS_VIOLATED", "need delta < eps < 1/2");

    const std::string x_axis = sigma.classical.axes()[0].name;
    const std::string y_axis = sigma.classical.axes()[1].name;
    std::vector<std::string> z_names;
    for (const auto& f : sigma.quantum_space().factors()) z_names.push_back(f.name);
    double cond_info = conditional_mutual_information(sigma, {y_axis}, z_names, {x_axis});
    require(cond_info <= inst.c + 1e-9, "HYPOTHESIS_VIOLATED",
            "conditional information exceeds the stated cap");

    const std::size_t nx = sigma.classical.axes()[0].labels.size();
    const std::size_t ny = sigma.classical.axes()[1].labels.size();
    const Eigen::Index dz = sigma.quantum_space().dim();
    const double threshold = (4.0 * inst.c + 1.0) / std::pow(inst.eps, 3);
    const double eps_smooth =
        std::min(inst.eps + 7.0 * inst.delta / inst.eps, 0.9);

    // Tail probability of a large per-input max-information under the
    // perturbed input table.
    FiniteDistribution perturbed_x = marginal(perturbed, {x_axis});
    double tail = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        double px = perturbed_x.weights()[x];
        if (px <= 1e-12) continue;
        // Conditioned state over (Y, Z) at this input, under the perturbed
        // table but with the shared conditionals.
        Mat block = Mat::Zero(static_cast<Eigen::Index>(ny) * dz,
                              static_cast<Eigen::Index>(ny) * dz);
        for (std::size_t y = 0; y < ny; ++y) {
            double pyx = perturbed.weights()[x * ny + y] / px;
            if (pyx <= 0.0) continue;
            block.block(static_cast<Eigen::Index>(y) * dz,
                        static_cast<Eigen::Index>(y) * dz, dz, dz) +=
                pyx * sigma.conditionals[x * ny + y].matrix;
        }
        HilbertSpace yz({{"cY", static_cast<Eigen::Index>(ny)}, {"cZ", dz}});
        DensityOperator rho_x = DensityOperator::make(yz, hermitize(block));
        double bound = max_information_quick_bound(rho_x);
        if (bound > threshold) bound = max_information(rho_x, eps_smooth);
        if (bound > threshold) tail += px;
    }
    return (2.0 * inst.eps + inst.delta / 2.0) - tail;
}

double margin_raz(const QuantumFactInstance& inst) {
    require(inst.cqs.size() == 2, "HYPOTHESIS_VIOLATED", "needs two CQ states");
    const CQState& rho = inst.cqs[0];
    const CQState& sigma = inst.cqs[1];
    require_matching_cq(rho, sigma);

    // The reference state must be product across every register: classical
    // table a product of its marginals, all conditionals one fixed state.
    const auto& axes = sigma.classical.axes();
    std::vector<FiniteDistribution> margins;
    for (const auto& ax : axes) margins.push_back(marginal(sigma.classical, {ax.name}));
    for (std::size_t f = 0; f < sigma.classical.size(); ++f) {
        Tuple t = sigma.classical.tuple_of(f);
        double prod = 1.0;
        for (std::size_t i = 0; i < axes.size(); ++i)
            prod *= margins[i].weights()[t[i]];
        require(std::abs(sigma.classical.weights()[f] - prod) <= 1e-9,
                "HYPOTHESIS_VIOLATED", "reference table is not a product");
        require((sigma.conditionals[f].matrix - sigma.conditionals[0].matrix)
                        .cwiseAbs()
                        .maxCoeff() <= 1e-9,
                "HYPOTHESIS_VIOLATED", "reference conditionals vary with the labels");
    }

    std::vector<std::string> q_names;
    for (const auto& f : rho.quantum_space().factors()) q_names.push_back(f.name);
    double lhs = 0.0;
    for (const auto& ax : axes) lhs += mutual_information(rho, {ax.name}, q_names);
    double rhs = relative_entropy(rho.embed(), sigma.embed());
    return capped(rhs) - lhs;
}

double margin_substate(const QuantumFactInstance& inst) {
    require(inst.states.size() == 2, "HYPOTHESIS_VIOLATED", "needs two states");
    require(inst.eps > 0.0 && inst.eps < 1.0, "HYPOTHESIS_VIOLATED",
            "eps must lie in (0,1)");
    const auto& rho = inst.states[0];
    const auto& sigma = inst.states[1];
    require(support_leak(rho.matrix, sigma.matrix) <=
                scaled_tol(1e-10, rho.space.dim()),
            "HYPOTHESIS_VIOLATED", "first state leaves the second state's support");
    double s = relative_entropy(rho, sigma);
    double bound = 4.0 * s / (inst.eps * inst.eps) +
                   std::log2(1.0 / (1.0 - inst.eps * inst.eps / 4.0));
    double value = smooth_min_entropy_witness(rho, sigma, inst.eps).value;
    return bound - value;
}

} // namespace

std::pair<double, double> jrs_margins(const QuantumFactInstance& inst) {
    require(inst.pures.size() == 1, "HYPOTHESIS_VIOLATED", "needs the joint pure state");
    const PureState& psi = inst.pures[0];
    const auto& factors = psi.space.factors();
    require(factors.size() >= 3, "HYPOTHESIS_VIOLATED",
            "need label, label-copy and at least one quantum factor");
    const Eigen::Index dx = factors[0].dim;
    require(factors[1].dim == dx, "HYPOTHESIS_VIOLATED",
            "label copy dimension differs from label dimension");
    require(static_cast<Eigen::Index>(inst.operators.size()) == dx,
            "HYPOTHESIS_VIOLATED", "one measurement operator per label required");
    const Eigen::Index db = factors.back().dim;
    const Eigen::Index total = psi.space.dim();
    const Eigen::Index front = total / db;             // everything but the last factor
    const Eigen::Index rest = front / (dx * dx);       // the middle factors

    // Diagonal-form check: amplitude blocks with mismatched label and copy
    // must vanish.
    double off_mass = 0.0;
    std::vector<Vec> cond(static_cast<std::size_t>(dx), Vec::Zero(rest * db));
    std::vector<double> p(static_cast<std::size_t>(dx), 0.0);
    for (Eigen::Index x = 0; x < dx; ++x)
        for (Eigen::Index xc = 0; xc < dx; ++xc) {
            double block = 0.0;
            for (Eigen::Index r = 0; r < rest * db; ++r) {
                Cplx amp = psi.vector((x * dx + xc) * rest * db + r);
                block += std::norm(amp);
                if (x == xc) cond[static_cast<std::size_t>(x)](r) = amp;
            }
            if (x == xc) p[static_cast<std::size_t>(x)] = block;
            else off_mass += block;
        }
    require(off_mass <= 1e-9, "HYPOTHESIS_VIOLATED",
            "state is not diagonal across the label and its copy");

    double min_success = kInf;
    double closeness = 0.0;
    for (Eigen::Index x = 0; x < dx; ++x) {
        const Mat& pi = inst.operators[static_cast<std::size_t>(x)];
        require(pi.rows() == front && pi.cols() == front, "HYPOTHESIS_VIOLATED",
                "measurement operator has the wrong shape");
        Vec w = kron(pi, Mat::Identity(db, db)) * psi.vector;
        double success = w.squaredNorm();
        min_success = std::min(min_success, success);
        double px = p[static_cast<std::size_t>(x)];
        if (px <= 1e-12) continue;
        double term;
        if (success <= 1e-15) {
            term = 2.0;  // the renormalized post state collapses to nothing
        } else {
            // Target: |x x> on the two label factors times the conditional
            // rest; both vectors unit, so the trace distance has the closed
            // two-dimensional form.
            Vec target = Vec::Zero(total);
            double scale = 1.0 / std::sqrt(px);
            for (Eigen::Index r = 0; r < rest * db; ++r)
                target((x * dx + x) * rest * db + r) =
                    cond[static_cast<std::size_t>(x)](r) * scale;
            double ov = std::abs(target.dot(w) / std::sqrt(success));
            term = 2.0 * std::sqrt(std::max(0.0, 1.0 - ov * ov));
        }
        closeness += px * term;
    }
    return {min_success - inst.alpha, inst.delta - closeness};
}

const std::vector<std::string> kQuantumFactIds = {
    "FVDG",        "FVDG_PURE_LITERAL", "CHAN_MONO", "PINSKER_STD",
    "PINSKER_PAPER", "EVENT_PROB",      "SINF_TRIANGLE", "SINF_UNITARY",
    "DIM_UB",      "COND_DEC",          "IMAX_CLOSE",    "RAZ",
    "SUBSTATE",    "JRS_VERIFY"};

bool quantum_fact_is_report_only(const std::string& fact) {
    return fact == "FVDG_PURE_LITERAL" || fact == "PINSKER_PAPER";
}

bool quantum_fact_is_equality(const std::string& fact) {
    return fact == "SINF_UNITARY" || fact == "COND_DEC";
}

double verify_quantum_fact(const QuantumFactInstance& inst) {
    if (inst.fact == "FVDG") return margin_fvdg(inst);
    if (inst.fact == "FVDG_PURE_LITERAL") return report_fvdg_pure(inst);
    if (inst.fact == "CHAN_MONO") return margin_chan_mono(inst);
    if (inst.fact == "PINSKER_STD") return margin_pinsker_std(inst);
    if (inst.fact == "PINSKER_PAPER") return report_pinsker_paper(inst);
    if (inst.fact == "EVENT_PROB") return margin_event_prob(inst);
    if (inst.fact == "SINF_TRIANGLE") return margin_sinf_triangle(inst);
    if (inst.fact == "SINF_UNITARY") return equality_sinf_unitary(inst);
    if (inst.fact == "DIM_UB") return margin_dim_ub(inst);
    if (inst.fact == "COND_DEC") return equality_cond_dec(inst);
    if (inst.fact == "IMAX_CLOSE") return margin_imax_close(inst);
    if (inst.fact == "RAZ") return margin_raz(inst);
    if (inst.fact == "SUBSTATE") return margin_substate(inst);
    if (inst.fact == "JRS_VERIFY") {
        auto [a, b] = jrs_margins(inst);
        return std::min(a, b);
    }
    fail("UNKNOWN_FACT", "unrecognized fact id: " + inst.fact);
}

nlohmann::ordered_json QuantumFactInstance::to_json() const {
    nlohmann::ordered_json j;
    j["fact"] = fact;
    j["states"] = nlohmann::ordered_json::array();
    for (const auto& s : states) j["states"].push_back(s.to_json());
    j["pures"] = nlohmann::ordered_json::array();
    for (const auto& s : pures) j["pures"].push_back(s.to_json());
    j["cqs"] = nlohmann::ordered_json::array();
    for (const auto& s : cqs) j["cqs"].push_back(s.to_json());
    j["dists"] = nlohmann::ordered_json::array();
    for (const auto& d : dists) j["dists"].push_back(d.to_json());
    j["operators"] = nlohmann::ordered_json::array();
    for (const auto& m : operators) j["operators"].push_back(mat_to_json(m));
    j["eps"] = eps;
    j["delta"] = delta;
    j["c"] = c;
    j["alpha"] = alpha;
    return j;
}

QuantumFactInstance QuantumFactInstance::from_json(const nlohmann::json& j) {
    QuantumFactInstance inst;
    inst.fact = j.at("fact").get<std::string>();
    for (const auto& s : j.at("states")) inst.states.push_back(DensityOperator::from_json(s));
    for (const auto& s : j.at("pures")) inst.pures.push_back(PureState::from_json(s));
    for (const auto& s : j.at("cqs")) inst.cqs.push_back(CQState::from_json(s));
    for (const auto& d : j.at("dists"))
        inst.dists.push_back(FiniteDistribution::from_json(d));
    for (const auto& m : j.at("operators")) inst.operators.push_back(mat_from_json(m));
    inst.eps = j.at("eps").get<double>();
    inst.delta = j.at("delta").get<double>();
    inst.c = j.at("c").get<double>();
    inst.alpha = j.at("alpha").get<double>();
    return inst;
}

} // namespace anchorlab
