#include "anchorlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace anchorlab {

namespace {

std::size_t product_size(const std::vector<Axis>& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.labels.size();
    return n;
}

void check_axes(const std::vector<Axis>& axes) {
    std::set<std::string> seen;
    for (const auto& a : axes) {
        require(!a.labels.empty(), "BAD_SHAPE", "axis '" + a.name + "' has an empty alphabet");
        if (!seen.insert(a.name).second)
            fail("DUPLICATE_AXIS", "axis name '" + a.name + "' appears twice");
        std::set<std::string> lab(a.labels.begin(), a.labels.end());
        require(lab.size() == a.labels.size(), "BAD_SHAPE",
                "axis '" + a.name + "' has repeated labels");
    }
}

} // namespace

void FiniteDistribution::rebuild_strides() {
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * axes_[i].labels.size();
}

FiniteDistribution FiniteDistribution::from_table(std::vector<Axis> axes,
                                                  std::vector<double> weights) {
    check_axes(axes);
    require(weights.size() == product_size(axes), "BAD_SHAPE",
            "expected " + std::to_string(product_size(axes)) + " weights, got " +
                std::to_string(weights.size()));
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))  // also rejects NaN
            fail("NEGATIVE_WEIGHT", "weight " + std::to_string(w) + " is negative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "NOT_NORMALIZED",
            "weights sum to " + std::to_string(sum));
    for (double& w : weights) w /= sum;  // exact normalization for internal use

    FiniteDistribution d;
    d.axes_ = std::move(axes);
    d.weights_ = std::move(weights);
    d.rebuild_strides();
    return d;
}

FiniteDistribution make_normalized(std::vector<Axis> axes, std::vector<double> weights) {
    check_axes(axes);
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-9, "NOT_NORMALIZED",
            "internal table sums to " + std::to_string(sum));
    for (double& w : weights) w /= sum;
    FiniteDistribution d;
    d.axes_ = std::move(axes);
    d.weights_ = std::move(weights);
    d.rebuild_strides();
    return d;
}

std::size_t FiniteDistribution::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    fail("UNKNOWN_AXIS", "no axis named '" + name + "'");
}

bool FiniteDistribution::has_axis(const std::string& name) const {
    return std::any_of(axes_.begin(), axes_.end(),
                       [&](const Axis& a) { return a.name == name; });
}

std::size_t FiniteDistribution::flat_index(const Tuple& t) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) flat += strides_[i] * t[i];
    return flat;
}

Tuple FiniteDistribution::tuple_of(std::size_t flat) const {
    Tuple t(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        t[i] = flat / strides_[i];
        flat %= strides_[i];
    }
    return t;
}

double FiniteDistribution::prob(const std::vector<std::string>& labels) const {
    require(labels.size() == axes_.size(), "BAD_SHAPE",
            "expected one label per axis");
    Tuple t(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        auto it = std::find(axes_[i].labels.begin(), axes_[i].labels.end(), labels[i]);
        require(it != axes_[i].labels.end(), "UNKNOWN_AXIS",
                "label '" + labels[i] + "' not on axis '" + axes_[i].name + "'");
        t[i] = static_cast<std::size_t>(it - axes_[i].labels.begin());
    }
    return weight(t);
}

nlohmann::ordered_json FiniteDistribution::to_json() const {
    nlohmann::ordered_json j;
    j["axes"] = nlohmann::ordered_json::array();
    for (const auto& a : axes_)
        j["axes"].push_back({{"name", a.name}, {"labels", a.labels}});
    j["weights"] = weights_;
    return j;
}

FiniteDistribution FiniteDistribution::from_json(const nlohmann::json& j) {
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes"))
        axes.push_back({a.at("name").get<std::string>(),
                        a.at("labels").get<std::vector<std::string>>()});
    return from_table(std::move(axes), j.at("weights").get<std::vector<double>>());
}

Event Event::from_tuples(std::vector<Axis> axes, const std::vector<Tuple>& accepted) {
    check_axes(axes);
    Event e;
    e.indicator.assign(product_size(axes), false);
    std::vector<std::size_t> strides(axes.size(), 1);
    for (std::size_t i = axes.size(); i-- > 1;)
        strides[i - 1] = strides[i] * axes[i].labels.size();
    for (const auto& t : accepted) {
        require(t.size() == axes.size(), "BAD_SHAPE", "event tuple arity mismatch");
        std::size_t flat = 0;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            require(t[i] < axes[i].labels.size(), "BAD_SHAPE", "event tuple out of range");
            flat += strides[i] * t[i];
        }
        e.indicator[flat] = true;
    }
    e.axes = std::move(axes);
    return e;
}

Kernel Kernel::from_rows(std::vector<Axis> source, std::vector<Axis> target,
                         std::vector<FiniteDistribution> rows) {
    check_axes(source);
    check_axes(target);
    require(rows.size() == product_size(source), "BAD_SHAPE",
            "expected one row per source tuple");
    for (const auto& r : rows)
        require(axes_equal(r.axes(), target), "AXIS_MISMATCH",
                "kernel row axes differ from declared target axes");
    return Kernel{std::move(source), std::move(target), std::move(rows)};
}

bool axes_equal(const std::vector<Axis>& a, const std::vector<Axis>& b) {
    return a == b;
}

double l1_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
    require(axes_equal(p.axes(), q.axes()), "AXIS_MISMATCH",
            "l1_distance requires identical axes");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        d += std::abs(p.weights()[i] - q.weights()[i]);
    return d;
}

FiniteDistribution marginal(const FiniteDistribution& p,
                            const std::vector<std::string>& keep) {
    std::vector<std::size_t> pos;
    std::vector<Axis> axes;
    std::set<std::string> seen;
    for (const auto& name : keep) {
        require(seen.insert(name).second, "DUPLICATE_AXIS",
                "axis '" + name + "' requested twice");
        std::size_t i = p.axis_index(name);
        pos.push_back(i);
        axes.push_back(p.axes()[i]);
    }
    std::vector<std::size_t> strides(axes.size(), 1);
    for (std::size_t i = axes.size(); i-- > 1;)
        strides[i - 1] = strides[i] * axes[i].labels.size();
    std::vector<double> w(strides.empty() ? 1
                                          : strides[0] * axes[0].labels.size(),
                          0.0);
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
        Tuple t = p.tuple_of(flat);
        std::size_t out = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) out += strides[i] * t[pos[i]];
        w[out] += p.weights()[flat];
    }
    return make_normalized(std::move(axes), std::move(w));
}

namespace {

// Positions of the event axes inside p, or fails with UNKNOWN_AXIS.
std::vector<std::size_t> event_positions(const FiniteDistribution& p, const Event& e) {
    std::vector<std::size_t> pos;
    for (const auto& a : e.axes) {
        std::size_t i = p.axis_index(a.name);
        require(p.axes()[i] == a, "AXIS_MISMATCH",
                "event axis '" + a.name + "' disagrees with the distribution's labels");
        pos.push_back(i);
    }
    return pos;
}

bool event_holds(const Event& e, const std::vector<std::size_t>& pos, const Tuple& t) {
    std::size_t flat = 0, stride = 1;
    for (std::size_t i = e.axes.size(); i-- > 0;) {
        flat += stride * t[pos[i]];
        stride *= e.axes[i].labels.size();
    }
    return e.indicator[flat];
}

} // namespace

double probability(const FiniteDistribution& p, const Event& e) {
    auto pos = event_positions(p, e);
    double mass = 0.0;
    for (std::size_t flat = 0; flat < p.size(); ++flat)
        if (event_holds(e, pos, p.tuple_of(flat))) mass += p.weights()[flat];
    return mass;
}

FiniteDistribution condition(const FiniteDistribution& p,
                             const std::string& axis, const std::string& label) {
    std::size_t ai = p.axis_index(axis);
    const auto& labels = p.axes()[ai].labels;
    auto it = std::find(labels.begin(), labels.end(), label);
    require(it != labels.end(), "UNKNOWN_AXIS",
            "label '" + label + "' not on axis '" + axis + "'");
    std::size_t li = static_cast<std::size_t>(it - labels.begin());

    std::vector<Axis> axes;
    for (std::size_t i = 0; i < p.axes().size(); ++i)
        if (i != ai) axes.push_back(p.axes()[i]);

    double mass = 0.0;
    std::vector<double> w;
    w.reserve(p.size() / labels.size());
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
        if (p.tuple_of(flat)[ai] != li) continue;
        w.push_back(p.weights()[flat]);
        mass += p.weights()[flat];
    }
    require(mass >= 1e-12, "ZERO_PROBABILITY_CONDITION",
            "conditioning mass " + std::to_string(mass) + " below 1e-12");
    for (double& v : w) v /= mass;
    if (axes.empty()) return make_normalized({{"unit", {"*"}}}, std::move(w));
    return make_normalized(std::move(axes), std::move(w));
}

FiniteDistribution condition(const FiniteDistribution& p, const Event& e) {
    auto pos = event_positions(p, e);
    double mass = 0.0;
    std::vector<double> w(p.size(), 0.0);
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
        if (!event_holds(e, pos, p.tuple_of(flat))) continue;
        w[flat] = p.weights()[flat];
        mass += p.weights()[flat];
    }
    require(mass >= 1e-12, "ZERO_PROBABILITY_CONDITION",
            "event mass " + std::to_string(mass) + " below 1e-12");
    for (double& v : w) v /= mass;
    return make_normalized(p.axes(), std::move(w));
}

FiniteDistribution compose(const FiniteDistribution& p, const Kernel& k) {
    // Locate kernel source axes inside p and check alphabets agree.
    std::vector<std::size_t> pos;
    for (const auto& a : k.source) {
        require(p.has_axis(a.name), "AXIS_MISMATCH",
                "kernel source axis '" + a.name + "' absent from the distribution");
        std::size_t i = p.axis_index(a.name);
        require(p.axes()[i] == a, "AXIS_MISMATCH",
                "kernel source axis '" + a.name + "' disagrees on labels");
        pos.push_back(i);
    }
    for (const auto& a : k.target)
        require(!p.has_axis(a.name), "AXIS_MISMATCH",
                "kernel target axis '" + a.name + "' already present");

    std::vector<Axis> axes = p.axes();
    axes.insert(axes.end(), k.target.begin(), k.target.end());

    std::vector<std::size_t> sstr(k.source.size(), 1);
    for (std::size_t i = k.source.size(); i-- > 1;)
        sstr[i - 1] = sstr[i] * k.source[i].labels.size();

    std::size_t tsize = k.rows.empty() ? 1 : k.rows.front().size();
    std::vector<double> w;
    w.reserve(p.size() * tsize);
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
        Tuple t = p.tuple_of(flat);
        std::size_t row = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) row += sstr[i] * t[pos[i]];
        const auto& rw = k.rows[row].weights();
        for (std::size_t z = 0; z < tsize; ++z)
            w.push_back(p.weights()[flat] * rw[z]);
    }
    return make_normalized(std::move(axes), std::move(w));
}

Kernel conditional(const FiniteDistribution& p,
                   const std::vector<std::string>& source,
                   const std::vector<std::string>& target) {
    std::vector<std::string> all = source;
    all.insert(all.end(), target.begin(), target.end());
    FiniteDistribution joint = marginal(p, all);  // axes: source..., target...

    std::vector<Axis> src_axes, tgt_axes;
    for (std::size_t i = 0; i < source.size(); ++i) src_axes.push_back(joint.axes()[i]);
    for (std::size_t i = source.size(); i < all.size(); ++i) tgt_axes.push_back(joint.axes()[i]);

    std::size_t tsize = 1;
    for (const auto& a : tgt_axes) tsize *= a.labels.size();
    std::size_t ssize = joint.size() / tsize;

    std::vector<FiniteDistribution> rows;
    rows.reserve(ssize);
    for (std::size_t s = 0; s < ssize; ++s) {
        double mass = 0.0;
        for (std::size_t t = 0; t < tsize; ++t) mass += joint.weights()[s * tsize + t];
        std::vector<double> row(tsize);
        if (mass < 1e-12) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(tsize));
        } else {
            for (std::size_t t = 0; t < tsize; ++t)
                row[t] = joint.weights()[s * tsize + t] / mass;
        }
        rows.push_back(make_normalized(tgt_axes, std::move(row)));
    }
    return Kernel{std::move(src_axes), std::move(tgt_axes), std::move(rows)};
}

namespace {

nlohmann::ordered_json axes_to_json(const std::vector<Axis>& axes) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& a : axes) j.push_back({{"name", a.name}, {"labels", a.labels}});
    return j;
}

std::vector<Axis> axes_from_json(const nlohmann::json& j) {
    std::vector<Axis> axes;
    for (const auto& a : j)
        axes.push_back({a.at("name").get<std::string>(),
                        a.at("labels").get<std::vector<std::string>>()});
    return axes;
}

} // namespace

nlohmann::ordered_json event_to_json(const Event& e) {
    nlohmann::ordered_json j;
    j["axes"] = axes_to_json(e.axes);
    j["indicator"] = nlohmann::ordered_json::array();
    for (bool b : e.indicator) j["indicator"].push_back(b ? 1 : 0);
    return j;
}

Event event_from_json(const nlohmann::json& j) {
    Event e;
    e.axes = axes_from_json(j.at("axes"));
    for (const auto& v : j.at("indicator")) e.indicator.push_back(v.get<int>() != 0);
    std::size_t n = 1;
    for (const auto& a : e.axes) n *= a.labels.size();
    require(e.indicator.size() == n, "BAD_SHAPE", "event indicator size mismatch");
    return e;
}

nlohmann::ordered_json kernel_to_json(const Kernel& k) {
    nlohmann::ordered_json j;
    j["source"] = axes_to_json(k.source);
    j["target"] = axes_to_json(k.target);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : k.rows) j["rows"].push_back(r.weights());
    return j;
}

Kernel kernel_from_json(const nlohmann::json& j) {
    auto source = axes_from_json(j.at("source"));
    auto target = axes_from_json(j.at("target"));
    std::vector<FiniteDistribution> rows;
    for (const auto& r : j.at("rows"))
        rows.push_back(FiniteDistribution::from_table(target, r.get<std::vector<double>>()));
    return Kernel::from_rows(std::move(source), std::move(target), std::move(rows));
}

} // namespace anchorlab
