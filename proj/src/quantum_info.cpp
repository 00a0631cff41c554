#include "anchorlab/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace anchorlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_space(const DensityOperator& a, const DensityOperator& b) {
    require(a.space == b.space, "SPACE_MISMATCH", "states live on different spaces");
}

} // namespace

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    return trace_norm_hermitian(rho.matrix - sigma.matrix);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    double f = trace_norm(psd_sqrt(rho.matrix) * psd_sqrt(sigma.matrix));
    return std::min(f, 1.0);
}

PureState purify(const DensityOperator& rho) {
    EigSym es = eig_sym(rho.matrix);
    const Eigen::Index d = rho.space.dim();
    std::string mirror = "mirror";
    while (rho.space.has_factor(mirror)) mirror += "~";
    std::vector<Factor> fs = rho.space.factors();
    fs.push_back({mirror, d});
    HilbertSpace big(std::move(fs));

    Vec psi = Vec::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double lam = std::max(es.values(i), 0.0);
        if (lam <= 0.0) continue;
        // |psi> += sqrt(lam_i) |v_i> (x) |i>_mirror
        double s = std::sqrt(lam);
        for (Eigen::Index r = 0; r < d; ++r) psi(r * d + i) += s * es.vectors(r, i);
    }
    psi.normalize();
    return PureState::make(std::move(big), std::move(psi));
}

Mat partial_trace_matrix(const Mat& m, const HilbertSpace& space,
                         const std::vector<std::string>& drop) {
    std::set<std::size_t> drop_pos;
    for (const auto& name : drop) drop_pos.insert(space.factor_index(name));

    std::vector<Eigen::Index> keep_stride, keep_dim, drop_stride, drop_dim;
    for (std::size_t i = 0; i < space.factors().size(); ++i) {
        if (drop_pos.count(i)) {
            drop_stride.push_back(space.strides()[i]);
            drop_dim.push_back(space.factors()[i].dim);
        } else {
            keep_stride.push_back(space.strides()[i]);
            keep_dim.push_back(space.factors()[i].dim);
        }
    }

    // Offsets of every kept / dropped multi-index into the full flat index.
    auto offsets = [](const std::vector<Eigen::Index>& strides,
                      const std::vector<Eigen::Index>& dims) {
        std::vector<Eigen::Index> offs = {0};
        for (std::size_t i = 0; i < dims.size(); ++i) {
            std::vector<Eigen::Index> next;
            next.reserve(offs.size() * dims[i]);
            for (Eigen::Index base : offs)
                for (Eigen::Index v = 0; v < dims[i]; ++v)
                    next.push_back(base + v * strides[i]);
            offs = std::move(next);
        }
        return offs;
    };
    std::vector<Eigen::Index> koff = offsets(keep_stride, keep_dim);
    std::vector<Eigen::Index> doff = offsets(drop_stride, drop_dim);

    Mat out = Mat::Zero(static_cast<Eigen::Index>(koff.size()),
                        static_cast<Eigen::Index>(koff.size()));
    for (std::size_t r = 0; r < koff.size(); ++r)
        for (std::size_t c = 0; c < koff.size(); ++c) {
            Cplx acc = 0.0;
            for (Eigen::Index d0 : doff) acc += m(koff[r] + d0, koff[c] + d0);
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& drop) {
    std::set<std::string> dropped(drop.begin(), drop.end());
    for (const auto& name : drop) rho.space.factor_index(name);  // UNKNOWN_FACTOR
    std::vector<Factor> kept;
    for (const auto& f : rho.space.factors())
        if (!dropped.count(f.name)) kept.push_back(f);
    require(!kept.empty(), "UNKNOWN_FACTOR", "cannot trace out every factor");
    Mat reduced = partial_trace_matrix(rho.matrix, rho.space, drop);
    return DensityOperator::make(HilbertSpace(std::move(kept)), std::move(reduced));
}

Mat matricize(const Vec& v, const HilbertSpace& space,
              const std::vector<std::string>& row_group) {
    std::set<std::size_t> row_pos;
    for (const auto& name : row_group) row_pos.insert(space.factor_index(name));

    std::vector<Eigen::Index> rstride, rdim, cstride, cdim;
    for (std::size_t i = 0; i < space.factors().size(); ++i) {
        if (row_pos.count(i)) {
            rstride.push_back(space.strides()[i]);
            rdim.push_back(space.factors()[i].dim);
        } else {
            cstride.push_back(space.strides()[i]);
            cdim.push_back(space.factors()[i].dim);
        }
    }
    auto offsets = [](const std::vector<Eigen::Index>& strides,
                      const std::vector<Eigen::Index>& dims) {
        std::vector<Eigen::Index> offs = {0};
        for (std::size_t i = 0; i < dims.size(); ++i) {
            std::vector<Eigen::Index> next;
            next.reserve(offs.size() * dims[i]);
            for (Eigen::Index base : offs)
                for (Eigen::Index val = 0; val < dims[i]; ++val)
                    next.push_back(base + val * strides[i]);
            offs = std::move(next);
        }
        return offs;
    };
    std::vector<Eigen::Index> roff = offsets(rstride, rdim);
    std::vector<Eigen::Index> coff = offsets(cstride, cdim);

    Mat out(static_cast<Eigen::Index>(roff.size()), static_cast<Eigen::Index>(coff.size()));
    for (std::size_t r = 0; r < roff.size(); ++r)
        for (std::size_t c = 0; c < coff.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                v(roff[r] + coff[c]);
    return out;
}

double von_neumann_entropy(const DensityOperator& rho) {
    EigSym es = eig_sym(rho.matrix);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        double lam = es.values(i);
        if (lam > kSupportCutoff) s -= lam * std::log2(lam);
    }
    return s;
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    if (support_leak(rho.matrix, sigma.matrix) > scaled_tol(1e-10, rho.space.dim()))
        return kInf;
    EigSym er = eig_sym(rho.matrix);
    EigSym es = eig_sym(sigma.matrix);

    double tr_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > kSupportCutoff)
            tr_rho_log_rho += er.values(i) * std::log2(er.values(i));

    // log sigma on its support; rho has (numerically) no mass elsewhere.
    Mat log_sigma = Mat::Zero(sigma.matrix.rows(), sigma.matrix.cols());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
        if (es.values(i) > kSupportCutoff)
            log_sigma += std::log2(es.values(i)) * es.vectors.col(i) *
                         es.vectors.col(i).adjoint();
    double tr_rho_log_sigma = (rho.matrix * log_sigma).trace().real();
    return tr_rho_log_rho - tr_rho_log_sigma;
}

double relative_min_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    if (support_leak(rho.matrix, sigma.matrix) > scaled_tol(1e-10, rho.space.dim()))
        return kInf;
    Mat inv_sqrt = psd_power(sigma.matrix, -0.5);
    EigSym es = eig_sym(inv_sqrt * rho.matrix * inv_sqrt);
    double top = es.values.maxCoeff();
    if (top <= kSupportCutoff) return 0.0;
    return std::log2(top);
}

namespace {

// Truncation candidate: keep only eigendirections of sigma^{-1/2} rho
// sigma^{-1/2} whose eigenvalue is <= 2^lambda, renormalize.
struct TruncationFamily {
    Mat rho;
    std::vector<double> log_ratios;  // ascending
    std::vector<Mat> projectors;     // cumulative, aligned with log_ratios

    explicit TruncationFamily(const Mat& rho_in, const Mat& sigma) : rho(rho_in) {
        Mat inv_sqrt = psd_power(sigma, -0.5);
        EigSym es = eig_sym(inv_sqrt * rho * inv_sqrt);
        Mat cum = Mat::Zero(rho.rows(), rho.cols());
        for (Eigen::Index i = 0; i < es.values.size(); ++i) {
            double v = std::max(es.values(i), 0.0);
            cum += es.vectors.col(i) * es.vectors.col(i).adjoint();
            log_ratios.push_back(v > kSupportCutoff ? std::log2(v) : -40.0);
            projectors.push_back(cum);
        }
    }

    // Truncated-and-renormalized state at threshold lambda, or empty on
    // vanishing mass.
    bool at(double lambda, Mat& out) const {
        Eigen::Index last = -1;
        for (std::size_t i = 0; i < log_ratios.size(); ++i)
            if (log_ratios[i] <= lambda + 1e-12) last = static_cast<Eigen::Index>(i);
        if (last < 0) return false;
        const Mat& p = projectors[static_cast<std::size_t>(last)];
        Mat cut = p * rho * p;
        double tr = cut.trace().real();
        if (tr < 1e-12) return false;
        out = hermitize(cut / tr);
        return true;
    }
};

} // namespace

SmoothWitness smooth_min_entropy_witness(const DensityOperator& rho,
                                         const DensityOperator& sigma, double eps) {
    require_same_space(rho, sigma);
    require(eps > 0.0 && eps < 1.0, "PARAM_RANGE", "eps must lie in (0,1)");
    require(support_leak(rho.matrix, sigma.matrix) <= scaled_tol(1e-10, rho.space.dim()),
            "SUPPORT_VIOLATION", "rho has mass outside supp(sigma)");

    const HilbertSpace& space = rho.space;
    auto dist_to_rho = [&](const Mat& cand) {
        return trace_norm_hermitian(rho.matrix - cand);
    };
    auto s_inf = [&](const Mat& cand) {
        return relative_min_entropy(DensityOperator::make(space, cand), sigma);
    };

    std::vector<Mat> candidates;
    TruncationFamily fam(rho.matrix, sigma.matrix);
    double lo = *std::min_element(fam.log_ratios.begin(), fam.log_ratios.end()) - 1.0;
    double hi = *std::max_element(fam.log_ratios.begin(), fam.log_ratios.end());

    // Feasibility (trace distance <= eps) is monotone in the threshold, so a
    // binary search brackets the lowest feasible truncation level.
    double lo_b = lo, hi_b = hi;
    bool found = false;
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo_b + hi_b);
        Mat cand;
        if (fam.at(mid, cand) && dist_to_rho(cand) <= eps) {
            hi_b = mid;
            found = true;
        } else {
            lo_b = mid;
        }
    }
    require(found || true, "WITNESS_NOT_FOUND", "unreachable");  // hi is always feasible
    for (int j = 0; j < 9; ++j) {
        double lam = hi_b + (hi - hi_b) * static_cast<double>(j) / 8.0;
        Mat cand;
        if (fam.at(lam, cand) && dist_to_rho(cand) <= eps) candidates.push_back(cand);
    }

    // Mixture candidates rho' = (1-beta) rho + beta sigma; the trace-distance
    // cost is exactly beta * ||rho - sigma||_1, so the budget caps beta.
    double gap = trace_norm_hermitian(rho.matrix - sigma.matrix);
    double beta_max = gap > 1e-15 ? std::min(1.0, eps / gap) : 1.0;
    for (double frac : {1.0, 0.5, 0.25}) {
        double beta = beta_max * frac;
        Mat cand = hermitize((1.0 - beta) * rho.matrix + beta * sigma.matrix);
        if (dist_to_rho(cand) <= eps + 1e-12) candidates.push_back(cand);
    }

    // Truncate-then-mix: spend any leftover budget on mixing toward sigma.
    {
        Mat base;
        if (fam.at(hi_b, base)) {
            double used = dist_to_rho(base);
            double left = eps - used;
            double g2 = trace_norm_hermitian(base - sigma.matrix);
            if (left > 0 && g2 > 1e-15) {
                double beta = std::min(1.0, left / g2);
                Mat cand = hermitize((1.0 - beta) * base + beta * sigma.matrix);
                if (dist_to_rho(cand) <= eps + 1e-12) candidates.push_back(cand);
            }
        }
    }

    SmoothWitness best;
    double best_val = kInf;
    for (const auto& cand : candidates) {
        double v = s_inf(cand);
        if (v < best_val) {
            best_val = v;
            best.rho_prime = DensityOperator::make(space, cand);
        }
    }
    require(std::isfinite(best_val), "WITNESS_NOT_FOUND",
            "no feasible candidate with finite relative min-entropy");
    best.value = best_val;
    return best;
}

double mutual_information(const DensityOperator& rho,
                          const std::vector<std::string>& group1,
                          const std::vector<std::string>& group2) {
    std::set<std::string> g1(group1.begin(), group1.end());
    for (const auto& n : group2)
        require(!g1.count(n), "UNKNOWN_FACTOR", "groups must be disjoint");
    std::set<std::string> used(group1.begin(), group1.end());
    used.insert(group2.begin(), group2.end());
    std::vector<std::string> rest;
    for (const auto& f : rho.space.factors())
        if (!used.count(f.name)) rest.push_back(f.name);
    DensityOperator joint = rest.empty() ? rho : partial_trace(rho, rest);

    std::vector<std::string> other1, other2;
    for (const auto& f : joint.space.factors()) {
        if (g1.count(f.name)) other2.push_back(f.name);  // traced out for rho_G2
        else other1.push_back(f.name);
    }
    DensityOperator r1 = partial_trace(joint, other1);
    DensityOperator r2 = partial_trace(joint, other2);
    return von_neumann_entropy(r1) + von_neumann_entropy(r2) - von_neumann_entropy(joint);
}

double mutual_information(const CQState& cq,
                          const std::vector<std::string>& group1,
                          const std::vector<std::string>& group2) {
    return mutual_information(cq.embed(), group1, group2);
}

double conditional_mutual_information(const CQState& cq,
                                      const std::vector<std::string>& group1,
                                      const std::vector<std::string>& group2,
                                      const std::vector<std::string>& given) {
    std::vector<std::size_t> cond_pos;
    for (const auto& name : given) cond_pos.push_back(cq.classical.axis_index(name));

    // Group classical tuples by their conditioning sub-tuple.
    std::vector<Eigen::Index> sub_dims;
    for (std::size_t p : cond_pos)
        sub_dims.push_back(static_cast<Eigen::Index>(cq.classical.axes()[p].labels.size()));
    std::size_t groups = 1;
    for (Eigen::Index d : sub_dims) groups *= static_cast<std::size_t>(d);

    std::vector<double> mass(groups, 0.0);
    std::vector<std::vector<std::size_t>> members(groups);
    for (std::size_t f = 0; f < cq.classical.size(); ++f) {
        Tuple t = cq.classical.tuple_of(f);
        std::size_t g = 0;
        for (std::size_t i = 0; i < cond_pos.size(); ++i)
            g = g * static_cast<std::size_t>(sub_dims[i]) + t[cond_pos[i]];
        mass[g] += cq.classical.weights()[f];
        members[g].push_back(f);
    }

    std::vector<Axis> sub_axes;
    for (std::size_t i = 0; i < cq.classical.axes().size(); ++i)
        if (std::find(cond_pos.begin(), cond_pos.end(), i) == cond_pos.end())
            sub_axes.push_back(cq.classical.axes()[i]);
    require(!sub_axes.empty(), "UNKNOWN_FACTOR",
            "conditioning on every classical axis leaves no classical part");

    double total = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (mass[g] < 1e-12) continue;
        std::vector<double> w;
        std::vector<DensityOperator> conds;
        for (std::size_t f : members[g]) {
            w.push_back(cq.classical.weights()[f] / mass[g]);
            conds.push_back(cq.conditionals[f]);
        }
        CQState sub = CQState::make(make_normalized(sub_axes, std::move(w)), std::move(conds));
        total += mass[g] * mutual_information(sub, group1, group2);
    }
    return total;
}

} // namespace anchorlab
