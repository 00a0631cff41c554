#pragma once

#include <string>
#include <vector>

#include "anchorlab/distribution.hpp"
#include "anchorlab/linalg.hpp"

#include <json.hpp>

namespace anchorlab {

struct Factor {
    std::string name;
    Eigen::Index dim = 1;
    bool operator==(const Factor&) const = default;
};

// Ordered tensor product of named finite-dimensional factors.
class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<Factor> factors);  // DUPLICATE_FACTOR | DIMENSION_GUARD

    const std::vector<Factor>& factors() const { return factors_; }
    Eigen::Index dim() const { return dim_; }
    std::size_t factor_index(const std::string& name) const;  // UNKNOWN_FACTOR
    bool has_factor(const std::string& name) const;

    // Row-major strides (last factor fastest), and index helpers.
    const std::vector<Eigen::Index>& strides() const { return strides_; }
    Eigen::Index flat_index(const std::vector<Eigen::Index>& per_factor) const;
    std::vector<Eigen::Index> unflatten(Eigen::Index flat) const;

    bool operator==(const HilbertSpace& o) const { return factors_ == o.factors_; }

    nlohmann::ordered_json to_json() const;
    static HilbertSpace from_json(const nlohmann::json& j);

private:
    std::vector<Factor> factors_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index dim_ = 1;
};

struct DensityOperator {
    HilbertSpace space;
    Mat matrix;

    // Validates hermiticity (1e-10), positivity (eigenvalues >= -1e-10) and
    // unit trace (1e-10); the matrix is symmetrized on acceptance.
    //            code SPACE_MISMATCH | NOT_HERMITIAN | NOT_PSD | NOT_NORMALIZED
    static DensityOperator make(HilbertSpace space, Mat matrix);

    nlohmann::ordered_json to_json() const;
    static DensityOperator from_json(const nlohmann::json& j);
};

struct PureState {
    HilbertSpace space;
    Vec vector;

    //            code SPACE_MISMATCH | NOT_UNIT (norm off by more than 1e-10)
    static PureState make(HilbertSpace space, Vec vector);

    DensityOperator density() const;

    nlohmann::ordered_json to_json() const;
    static PureState from_json(const nlohmann::json& j);
};

// Classical-quantum state: a distribution over classical label tuples plus
// one conditional density operator (on a shared space) per tuple.
struct CQState {
    FiniteDistribution classical;
    std::vector<DensityOperator> conditionals;  // indexed by classical flat index

    //            code BAD_SHAPE | SPACE_MISMATCH
    static CQState make(FiniteDistribution classical,
                        std::vector<DensityOperator> conditionals);

    const HilbertSpace& quantum_space() const { return conditionals.front().space; }

    // Block-diagonal embedding: each classical axis becomes an orthonormal
    // factor named after it, so entropic quantities can be computed directly.
    DensityOperator embed() const;

    nlohmann::ordered_json to_json() const;
    static CQState from_json(const nlohmann::json& j);
};

struct POVM {
    HilbertSpace space;
    std::vector<Mat> elements;

    //            code NOT_PSD (element below -1e-10) | POVM_INCOMPLETE (sum
    //            differs from identity by more than 1e-9) | SPACE_MISMATCH
    static POVM make(HilbertSpace space, std::vector<Mat> elements);
};

// Matrix-with-space serialization: {"space":[{"name","dim"}...],"re":[[..]],"im":[[..]]}.
nlohmann::ordered_json operator_to_json(const HilbertSpace& space, const Mat& m);
std::pair<HilbertSpace, Mat> operator_from_json(const nlohmann::json& j);

} // namespace anchorlab
