#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "anchorlab/errors.hpp"

#include <json.hpp>

namespace anchorlab {

// A named axis with an ordered alphabet of string labels.
struct Axis {
    std::string name;
    std::vector<std::string> labels;

    bool operator==(const Axis&) const = default;
};

// Index tuple over a list of axes (one label index per axis).
using Tuple = std::vector<std::size_t>;

// A probability table over the product of one or more labelled axes.
// Weights are stored row-major (last axis fastest).  Construction validates
// nonnegativity and normalization to 1e-9, then renormalizes exactly, so a
// held instance always sums to 1 within 1e-12.
class FiniteDistribution {
public:
    FiniteDistribution() = default;

    // code NEGATIVE_WEIGHT | NOT_NORMALIZED | DUPLICATE_AXIS | BAD_SHAPE
    static FiniteDistribution from_table(std::vector<Axis> axes,
                                         std::vector<double> weights);

    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

    std::size_t axis_index(const std::string& name) const;      // UNKNOWN_AXIS
    bool has_axis(const std::string& name) const;

    std::size_t flat_index(const Tuple& t) const;
    Tuple tuple_of(std::size_t flat) const;

    double weight(std::size_t flat) const { return weights_[flat]; }
    double weight(const Tuple& t) const { return weights_[flat_index(t)]; }

    // Label-addressed lookup, one label per axis in axis order.
    double prob(const std::vector<std::string>& labels) const;

    nlohmann::ordered_json to_json() const;
    static FiniteDistribution from_json(const nlohmann::json& j);

private:
    std::vector<Axis> axes_;
    std::vector<double> weights_;
    std::vector<std::size_t> strides_;

    void rebuild_strides();
    friend FiniteDistribution make_normalized(std::vector<Axis>, std::vector<double>);
};

// Internal constructor for operation outputs that are normalized by
// construction; still renormalizes defensively and checks invariants.
FiniteDistribution make_normalized(std::vector<Axis> axes, std::vector<double> weights);

// An event over a subset of axes: an indicator on the product of those axes.
// Membership of a full tuple is decided by its restriction to the event axes.
struct Event {
    std::vector<Axis> axes;            // subset, in a fixed order
    std::vector<bool> indicator;       // row-major over `axes`

    static Event from_tuples(std::vector<Axis> axes,
                             const std::vector<Tuple>& accepted);
};

// A conditional distribution: one row (a FiniteDistribution over the target
// axes) per tuple of the source axes.
struct Kernel {
    std::vector<Axis> source;
    std::vector<Axis> target;
    std::vector<FiniteDistribution> rows;  // indexed row-major over source

    static Kernel from_rows(std::vector<Axis> source, std::vector<Axis> target,
                            std::vector<FiniteDistribution> rows);  // BAD_SHAPE | AXIS_MISMATCH
};

bool axes_equal(const std::vector<Axis>& a, const std::vector<Axis>& b);

// Sum of absolute weight differences; requires identical axes (names, label
// sets, order).  Lies in [0, 2].           code AXIS_MISMATCH
double l1_distance(const FiniteDistribution& p, const FiniteDistribution& q);

// Restriction to the named axes (result axes follow the requested order).
//                                          code UNKNOWN_AXIS
FiniteDistribution marginal(const FiniteDistribution& p,
                            const std::vector<std::string>& keep);

// Probability of an event (event axes must all appear in p).
double probability(const FiniteDistribution& p, const Event& e);  // UNKNOWN_AXIS

// Condition on axis == label; the conditioned axis is dropped.
//            code UNKNOWN_AXIS | ZERO_PROBABILITY_CONDITION (mass < 1e-12)
FiniteDistribution condition(const FiniteDistribution& p,
                             const std::string& axis, const std::string& label);

// Condition on an event; axes are unchanged, off-event mass is removed.
//            code UNKNOWN_AXIS | ZERO_PROBABILITY_CONDITION
FiniteDistribution condition(const FiniteDistribution& p, const Event& e);

// Joint (p . k)(u, z) = p(u) * k(z | u restricted to k.source).  The kernel's
// source axes must appear in p (same names and labels); target axis names
// must not collide with p's.               code AXIS_MISMATCH
FiniteDistribution compose(const FiniteDistribution& p, const Kernel& k);

// Conditional kernel p(target | source) extracted from a joint.  Rows whose
// source tuple has mass < 1e-12 are filled with the uniform distribution so
// the kernel is total; callers relying on such rows should know their mass
// is negligible.                           code UNKNOWN_AXIS
Kernel conditional(const FiniteDistribution& p,
                   const std::vector<std::string>& source,
                   const std::vector<std::string>& target);

nlohmann::ordered_json event_to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::ordered_json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

} // namespace anchorlab
