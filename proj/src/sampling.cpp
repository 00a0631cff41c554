#include "anchorlab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace anchorlab {

namespace {

std::vector<double> cumulative(const FiniteDistribution& p) {
    std::vector<double> c(p.size());
    double run = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        run += p.weights()[i];
        c[i] = run;
    }
    c.back() = 1.0;  // guard against rounding at the top end
    return c;
}

std::size_t draw_flat(const std::vector<double>& cum, Rng& rng) {
    double u = uniform01(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

} // namespace

std::vector<Tuple> sample(const FiniteDistribution& p, std::size_t count,
                          std::uint64_t seed) {
    Rng rng(seed);
    auto cum = cumulative(p);
    std::vector<Tuple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(p.tuple_of(draw_flat(cum, rng)));
    return out;
}

CorrelatedDraw correlated_sample(const FiniteDistribution& p,
                                 const FiniteDistribution& q, Rng& rng) {
    require(axes_equal(p.axes(), q.axes()), "ALPHABET_MISMATCH",
            "correlated sampling needs a shared alphabet");
    constexpr std::size_t kCap = 1000000;
    const std::size_t n = p.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    // One shared threshold scale keeps each party's acceptance probability
    // proportional to its own density (so marginals are exact) while letting
    // the agreement analysis compare the two acceptance regions directly.
    double peak = 0.0;
    for (std::size_t z = 0; z < n; ++z)
        peak = std::max({peak, p.weights()[z], q.weights()[z]});
    const double scale = 1.0 / peak;

    CorrelatedDraw d;
    bool have_a = false, have_b = false;
    for (std::size_t t = 0; t < kCap; ++t) {
        std::size_t z = pick(rng);
        double u = uniform01(rng);
        d.rounds = t + 1;
        if (!have_a && u < p.weights()[z] * scale) {
            d.a = z;
            have_a = true;
        }
        if (!have_b && u < q.weights()[z] * scale) {
            d.b = z;
            have_b = true;
        }
        if (have_a && have_b) return d;
    }
    fail("STREAM_EXHAUSTED", "no acceptance within 1e6 shared rounds");
}

CorrelatedDraw correlated_sample(const FiniteDistribution& p,
                                 const FiniteDistribution& q, std::uint64_t seed) {
    Rng rng(seed);
    return correlated_sample(p, q, rng);
}

EmbedResult embed_inputs(const FiniteDistribution& p_xy,
                         const FiniteDistribution& target_xyr, double eps,
                         std::uint64_t seed, std::size_t trials) {
    require(p_xy.axes().size() == 2, "BAD_SHAPE", "p_xy must have exactly two axes");
    require(target_xyr.axes().size() == 3, "BAD_SHAPE", "target must have exactly three axes");
    require(trials >= 10000, "PARAM_RANGE", "trials must be at least 1e4");
    for (int i = 0; i < 2; ++i)
        require(p_xy.axes()[i].labels == target_xyr.axes()[i].labels, "AXIS_MISMATCH",
                "input and target alphabets must agree axiswise");

    const Axis& ax = p_xy.axes()[0];
    const Axis& ay = p_xy.axes()[1];
    const Axis& ar = target_xyr.axes()[2];
    const std::string xn = target_xyr.axes()[0].name;
    const std::string yn = target_xyr.axes()[1].name;
    const std::size_t nx = ax.labels.size(), ny = ay.labels.size(), nr = ar.labels.size();

    Kernel kx = conditional(target_xyr, {xn}, {ar.name});
    Kernel ky = conditional(target_xyr, {yn}, {ar.name});

    // Hypothesis joints p_xy(x,y) * k(r|x) and p_xy(x,y) * k(r|y), compared
    // against the target on the target's own axes.
    auto hypothesis = [&](bool via_x) {
        std::vector<double> w(nx * ny * nr);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                const auto& row = (via_x ? kx.rows[x] : ky.rows[y]).weights();
                for (std::size_t r = 0; r < nr; ++r)
                    w[(x * ny + y) * nr + r] = p_xy.weights()[x * ny + y] * row[r];
            }
        return l1_distance(make_normalized(target_xyr.axes(), std::move(w)), target_xyr);
    };

    EmbedResult res;
    res.hypothesis_x = hypothesis(true);
    res.hypothesis_y = hypothesis(false);
    require(res.hypothesis_x <= eps && res.hypothesis_y <= eps, "HYPOTHESIS_VIOLATED",
            "conditional reconstructions are " + std::to_string(res.hypothesis_x) + " and " +
                std::to_string(res.hypothesis_y) + " from the target; allowed " +
                std::to_string(eps));

    auto cum = cumulative(p_xy);
    std::vector<double> counts(nx * ny * nr * nr, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, t));
        std::size_t xy = draw_flat(cum, rng);
        std::size_t x = xy / ny, y = xy % ny;
        CorrelatedDraw d = correlated_sample(kx.rows[x], ky.rows[y], rng);
        counts[((x * ny + y) * nr + d.a) * nr + d.b] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(trials);

    std::vector<Axis> out_axes = {ax, ay, {ar.name + "_A", ar.labels}, {ar.name + "_B", ar.labels}};
    res.empirical = make_normalized(out_axes, std::move(counts));

    std::vector<double> ideal(nx * ny * nr * nr, 0.0);
    for (std::size_t i = 0; i < target_xyr.size(); ++i) {
        Tuple t = target_xyr.tuple_of(i);
        ideal[((t[0] * ny + t[1]) * nr + t[2]) * nr + t[2]] = target_xyr.weights()[i];
    }
    res.distance = l1_distance(res.empirical, make_normalized(out_axes, std::move(ideal)));
    res.slack = 3.0 * std::sqrt(static_cast<double>(nx * ny * nr * nr) /
                                static_cast<double>(trials));
    return res;
}

} // namespace anchorlab
