#include "anchorlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace anchorlab {

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    dim_ = 1;
    for (const auto& f : factors_) {
        require(f.dim >= 1, "DIMENSION_GUARD", "factor '" + f.name + "' has dimension < 1");
        require(seen.insert(f.name).second, "DUPLICATE_FACTOR",
                "factor name '" + f.name + "' appears twice");
        dim_ *= f.dim;
        require(dim_ <= 4096, "DIMENSION_GUARD", "total dimension exceeds 4096");
    }
    strides_.assign(factors_.size(), 1);
    for (std::size_t i = factors_.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * factors_[i].dim;
}

std::size_t HilbertSpace::factor_index(const std::string& name) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].name == name) return i;
    fail("UNKNOWN_FACTOR", "no factor named '" + name + "'");
}

bool HilbertSpace::has_factor(const std::string& name) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const Factor& f) { return f.name == name; });
}

Eigen::Index HilbertSpace::flat_index(const std::vector<Eigen::Index>& per_factor) const {
    Eigen::Index flat = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) flat += strides_[i] * per_factor[i];
    return flat;
}

std::vector<Eigen::Index> HilbertSpace::unflatten(Eigen::Index flat) const {
    std::vector<Eigen::Index> idx(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        idx[i] = flat / strides_[i];
        flat %= strides_[i];
    }
    return idx;
}

nlohmann::ordered_json HilbertSpace::to_json() const {
    auto j = nlohmann::ordered_json::array();
    for (const auto& f : factors_) j.push_back({{"name", f.name}, {"dim", f.dim}});
    return j;
}

HilbertSpace HilbertSpace::from_json(const nlohmann::json& j) {
    std::vector<Factor> fs;
    for (const auto& f : j)
        fs.push_back({f.at("name").get<std::string>(), f.at("dim").get<Eigen::Index>()});
    return HilbertSpace(std::move(fs));
}

DensityOperator DensityOperator::make(HilbertSpace space, Mat matrix) {
    require(matrix.rows() == space.dim() && matrix.cols() == space.dim(),
            "SPACE_MISMATCH", "matrix shape does not match the space dimension");
    double tol_h = scaled_tol(1e-10, space.dim());
    require(hermiticity_defect(matrix) <= tol_h, "NOT_HERMITIAN",
            "hermiticity defect " + std::to_string(hermiticity_defect(matrix)));
    Mat h = hermitize(matrix);
    EigSym es = eig_sym(h);
    require(es.values.minCoeff() >= -scaled_tol(1e-10, space.dim()), "NOT_PSD",
            "least eigenvalue " + std::to_string(es.values.minCoeff()));
    double tr = h.trace().real();
    require(std::abs(tr - 1.0) <= scaled_tol(1e-10, space.dim()), "NOT_NORMALIZED",
            "trace " + std::to_string(tr));
    return DensityOperator{std::move(space), std::move(h)};
}

nlohmann::ordered_json DensityOperator::to_json() const {
    return operator_to_json(space, matrix);
}

DensityOperator DensityOperator::from_json(const nlohmann::json& j) {
    auto [space, m] = operator_from_json(j);
    return make(std::move(space), std::move(m));
}

PureState PureState::make(HilbertSpace space, Vec vector) {
    require(vector.size() == space.dim(), "SPACE_MISMATCH",
            "vector length does not match the space dimension");
    double n = vector.norm();
    require(std::abs(n - 1.0) <= scaled_tol(1e-10, space.dim()), "NOT_UNIT",
            "norm " + std::to_string(n));
    return PureState{std::move(space), std::move(vector)};
}

DensityOperator PureState::density() const {
    Mat m = vector * vector.adjoint();
    return DensityOperator::make(space, std::move(m));
}

nlohmann::ordered_json PureState::to_json() const {
    nlohmann::ordered_json j;
    j["space"] = space.to_json();
    std::vector<double> re(vector.size()), im(vector.size());
    for (Eigen::Index i = 0; i < vector.size(); ++i) {
        re[i] = vector(i).real();
        im[i] = vector(i).imag();
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

PureState PureState::from_json(const nlohmann::json& j) {
    HilbertSpace space = HilbertSpace::from_json(j.at("space"));
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.at("im").get<std::vector<double>>();
    require(re.size() == im.size(), "BAD_SHAPE", "re/im length mismatch");
    Vec v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) v(i) = Cplx(re[i], im[i]);
    return make(std::move(space), std::move(v));
}

CQState CQState::make(FiniteDistribution classical,
                      std::vector<DensityOperator> conditionals) {
    require(!conditionals.empty() && conditionals.size() == classical.size(),
            "BAD_SHAPE", "need one conditional state per classical tuple");
    for (const auto& d : conditionals) {
        require(d.space == conditionals.front().space, "SPACE_MISMATCH",
                "conditional states must share one space");
        for (const auto& a : classical.axes())
            require(!d.space.has_factor(a.name), "DUPLICATE_FACTOR",
                    "classical axis '" + a.name + "' shadows a quantum factor");
    }
    return CQState{std::move(classical), std::move(conditionals)};
}

DensityOperator CQState::embed() const {
    const HilbertSpace& qs = quantum_space();
    std::vector<Factor> fs;
    for (const auto& a : classical.axes())
        fs.push_back({a.name, static_cast<Eigen::Index>(a.labels.size())});
    fs.insert(fs.end(), qs.factors().begin(), qs.factors().end());
    HilbertSpace big(fs);
    Mat m = Mat::Zero(big.dim(), big.dim());
    Eigen::Index d = qs.dim();
    // Classical flat ordering matches the leading factors' row-major layout.
    for (std::size_t x = 0; x < classical.size(); ++x)
        m.block(static_cast<Eigen::Index>(x) * d, static_cast<Eigen::Index>(x) * d, d, d) =
            classical.weights()[x] * conditionals[x].matrix;
    return DensityOperator::make(std::move(big), std::move(m));
}

nlohmann::ordered_json CQState::to_json() const {
    nlohmann::ordered_json j;
    j["classical"] = classical.to_json();
    j["conditionals"] = nlohmann::ordered_json::array();
    for (const auto& d : conditionals) j["conditionals"].push_back(d.to_json());
    return j;
}

CQState CQState::from_json(const nlohmann::json& j) {
    auto classical = FiniteDistribution::from_json(j.at("classical"));
    std::vector<DensityOperator> conds;
    for (const auto& d : j.at("conditionals")) conds.push_back(DensityOperator::from_json(d));
    return make(std::move(classical), std::move(conds));
}

POVM POVM::make(HilbertSpace space, std::vector<Mat> elements) {
    require(!elements.empty(), "BAD_SHAPE", "measurement needs at least one element");
    Mat sum = Mat::Zero(space.dim(), space.dim());
    for (const auto& e : elements) {
        require(e.rows() == space.dim() && e.cols() == space.dim(), "SPACE_MISMATCH",
                "element shape does not match the space");
        require(hermiticity_defect(e) <= scaled_tol(1e-10, space.dim()), "NOT_PSD",
                "element is not Hermitian");
        EigSym es = eig_sym(e);
        require(es.values.minCoeff() >= -scaled_tol(1e-10, space.dim()), "NOT_PSD",
                "element has eigenvalue " + std::to_string(es.values.minCoeff()));
        sum += e;
    }
    double defect = (sum - Mat::Identity(space.dim(), space.dim())).cwiseAbs().maxCoeff();
    require(defect <= scaled_tol(1e-9, space.dim()), "POVM_INCOMPLETE",
            "element sum differs from identity by " + std::to_string(defect));
    return POVM{std::move(space), std::move(elements)};
}

nlohmann::ordered_json operator_to_json(const HilbertSpace& space, const Mat& m) {
    nlohmann::ordered_json j;
    j["space"] = space.to_json();
    auto re = nlohmann::ordered_json::array();
    auto im = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto rr = nlohmann::ordered_json::array();
        auto ri = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

std::pair<HilbertSpace, Mat> operator_from_json(const nlohmann::json& j) {
    HilbertSpace space = HilbertSpace::from_json(j.at("space"));
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    Eigen::Index n = static_cast<Eigen::Index>(re.size());
    Mat m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = Cplx(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
    return {std::move(space), std::move(m)};
}

} // namespace anchorlab
