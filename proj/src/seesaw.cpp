#include "anchorlab/seesaw.hpp"

#include "anchorlab/linalg.hpp"
#include "anchorlab/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorlab {

namespace {

struct Working {
    std::vector<std::vector<Mat>> alice;  // [x][a], d x d
    std::vector<std::vector<Mat>> bob;    // [y][b]
    Vec psi;                              // d*d
};

// Effect operators S_a for one input: S_a = Tr_2[(I (x) K_a) rho], so that
// the objective contribution is sum_a Tr[M_a S_a].
std::vector<Mat> effect_operators(const Game& game, const Working& w, std::size_t x,
                                  bool alice_side, const HilbertSpace& pair_space) {
    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    const std::size_t nx = game.x_alphabet.size();
    const Eigen::Index d = w.alice[0][0].rows();
    const std::size_t outcomes = alice_side ? na : nb;

    Mat rho = w.psi * w.psi.adjoint();
    std::vector<Mat> s;
    for (std::size_t o = 0; o < outcomes; ++o) {
        Mat k = Mat::Zero(d, d);
        if (alice_side) {
            for (std::size_t y = 0; y < ny; ++y) {
                double qw = game.input_weight(x, y);
                if (qw <= 0.0) continue;
                for (std::size_t b = 0; b < nb; ++b)
                    if (game.wins(x, y, o, b)) k += qw * w.bob[y][b];
            }
            Mat lifted = kron(Mat::Identity(d, d), k) * rho;
            s.push_back(hermitize(partial_trace_matrix(lifted, pair_space, {"qb"})));
        } else {
            for (std::size_t xx = 0; xx < nx; ++xx) {
                double qw = game.input_weight(xx, x);  // x plays the y role here
                if (qw <= 0.0) continue;
                for (std::size_t a = 0; a < na; ++a)
                    if (game.wins(xx, x, a, o)) k += qw * w.alice[xx][a];
            }
            Mat lifted = kron(k, Mat::Identity(d, d)) * rho;
            s.push_back(hermitize(partial_trace_matrix(lifted, pair_space, {"qa"})));
        }
    }
    return s;
}

double response_objective(const std::vector<Mat>& povm, const std::vector<Mat>& s) {
    double v = 0.0;
    for (std::size_t o = 0; o < povm.size(); ++o)
        v += (povm[o] * s[o]).trace().real();
    return v;
}

// Exact two-outcome response: the first element is the projector onto the
// positive eigenspace of S_0 - S_1.
std::vector<Mat> helstrom_response(const std::vector<Mat>& s) {
    const Eigen::Index d = s[0].rows();
    EigSym es = eig_sym(s[0] - s[1]);
    Mat m0 = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        if (es.values(i) > 0.0)
            m0 += es.vectors.col(i) * es.vectors.col(i).adjoint();
    return {m0, Mat::Identity(d, d) - m0};
}

// A near-singular discrimination operator makes the inverse-square-root
// conjugation amplify rounding noise, which can leave an element visibly
// indefinite or the family incomplete; such iterates must not be kept.
bool measurement_family_ok(const std::vector<Mat>& povm) {
    const Eigen::Index d = povm[0].rows();
    Mat total = Mat::Zero(d, d);
    for (const auto& m : povm) {
        if (eig_sym(m).values.minCoeff() < -1e-11) return false;
        total += m;
    }
    return (total - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10;
}

// Iterative discrimination fixed point for three or more outcomes; keeps the
// previous measurement if the objective would decrease.
std::vector<Mat> fixed_point_response(const std::vector<Mat>& current,
                                      const std::vector<Mat>& s) {
    const Eigen::Index d = s[0].rows();
    const std::size_t n = current.size();
    std::vector<Mat> povm = current;
    for (int it = 0; it < 200; ++it) {
        Mat lambda = Mat::Zero(d, d);
        for (std::size_t o = 0; o < n; ++o) lambda += s[o] * povm[o] * s[o];
        Mat inv_sqrt = psd_power(hermitize(lambda), -0.5, 1e-14);
        std::vector<Mat> next;
        Mat total = Mat::Zero(d, d);
        for (std::size_t o = 0; o < n; ++o) {
            Mat m = hermitize(inv_sqrt * s[o] * povm[o] * s[o] * inv_sqrt);
            total += m;
            next.push_back(std::move(m));
        }
        // Spread any missing support uniformly so the family stays complete.
        Mat slack = (Mat::Identity(d, d) - total) / static_cast<double>(n);
        double change = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
            next[o] = hermitize(next[o] + slack);
            change = std::max(change, (next[o] - povm[o]).cwiseAbs().maxCoeff());
        }
        if (!measurement_family_ok(next)) break;  // stay on the last sound iterate
        povm = std::move(next);
        if (change < 1e-13) break;
    }
    return response_objective(povm, s) >= response_objective(current, s) ? povm
                                                                         : current;
}

std::vector<Mat> random_povm(Eigen::Index d, std::size_t outcomes, Rng& rng) {
    if (static_cast<Eigen::Index>(outcomes) <= d) {
        // Projective from the columns of a Haar-like unitary, round-robin.
        Mat u = random_unitary(d, rng);
        std::vector<Mat> povm(outcomes, Mat::Zero(d, d));
        for (Eigen::Index i = 0; i < d; ++i)
            povm[static_cast<std::size_t>(i) % outcomes] +=
                u.col(i) * u.col(i).adjoint();
        return povm;
    }
    // More outcomes than dimensions: normalized Gaussian Gram elements.
    std::vector<Mat> grams;
    Mat total = Mat::Zero(d, d);
    for (std::size_t o = 0; o < outcomes; ++o) {
        Mat g(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                g(r, c) = Cplx(gaussian(rng), gaussian(rng));
        Mat e = g.adjoint() * g;
        total += e;
        grams.push_back(std::move(e));
    }
    Mat inv_sqrt = psd_power(total, -0.5, 1e-14);
    std::vector<Mat> povm;
    for (auto& e : grams) povm.push_back(hermitize(inv_sqrt * e * inv_sqrt));
    return povm;
}

// Weighted win operator whose top eigenpair is the state update.
Mat win_operator(const Game& game, const Working& w) {
    const Eigen::Index d = w.alice[0][0].rows();
    Mat r = Mat::Zero(d * d, d * d);
    for (std::size_t x = 0; x < game.x_alphabet.size(); ++x)
        for (std::size_t y = 0; y < game.y_alphabet.size(); ++y) {
            double qw = game.input_weight(x, y);
            if (qw <= 0.0) continue;
            for (std::size_t a = 0; a < game.a_alphabet.size(); ++a)
                for (std::size_t b = 0; b < game.b_alphabet.size(); ++b)
                    if (game.wins(x, y, a, b))
                        r += qw * kron(w.alice[x][a], w.bob[y][b]);
        }
    return hermitize(r);
}

} // namespace

SeesawResult entangled_value_seesaw(const Game& game, Eigen::Index d, int restarts,
                                    int max_iters, double tol, std::uint64_t seed) {
    require(d >= 1, "PARAM_RANGE", "local dimension must be at least 1");
    require(restarts >= 1 && max_iters >= 1, "PARAM_RANGE",
            "need at least one restart and one iteration");
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    HilbertSpace pair_space({{"qa", d}, {"qb", d}});
    HilbertSpace local_a({{"qa", d}});
    HilbertSpace local_b({{"qb", d}});

    SeesawResult best;
    best.value = -1.0;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        Working w;
        for (std::size_t x = 0; x < nx; ++x) w.alice.push_back(random_povm(d, na, rng));
        for (std::size_t y = 0; y < ny; ++y) w.bob.push_back(random_povm(d, nb, rng));
        w.psi = random_unit_vector(d * d, rng);

        std::vector<double> trace;
        bool converged = false;
        double prev = -std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_iters; ++it) {
            for (std::size_t x = 0; x < nx; ++x) {
                std::vector<Mat> s = effect_operators(game, w, x, true, pair_space);
                w.alice[x] = na == 2 ? helstrom_response(s)
                                     : fixed_point_response(w.alice[x], s);
            }
            for (std::size_t y = 0; y < ny; ++y) {
                std::vector<Mat> s = effect_operators(game, w, y, false, pair_space);
                w.bob[y] = nb == 2 ? helstrom_response(s)
                                   : fixed_point_response(w.bob[y], s);
            }
            EigSym es = eig_sym(win_operator(game, w));
            Eigen::Index top = es.values.size() - 1;
            w.psi = es.vectors.col(top);
            // Fix the global phase so reruns are bit-stable.
            Eigen::Index lead;
            w.psi.cwiseAbs().maxCoeff(&lead);
            Cplx ph = w.psi(lead);
            if (std::abs(ph) > 0) w.psi *= std::conj(ph) / std::abs(ph);

            double obj = es.values(top);
            trace.push_back(obj);
            if (obj - prev <= tol && it > 0) {
                converged = true;
                break;
            }
            prev = obj;
        }

        EntangledStrategy strat;
        strat.d = d;
        strat.state = PureState::make(pair_space, w.psi);
        for (std::size_t x = 0; x < nx; ++x)
            strat.alice.push_back(POVM::make(local_a, w.alice[x]));
        for (std::size_t y = 0; y < ny; ++y)
            strat.bob.push_back(POVM::make(local_b, w.bob[y]));
        double value = strategy_value(game, strat);

        if (value > best.value) {
            best.value = value;
            best.strategy = std::move(strat);
            best.objective_trace = std::move(trace);
            best.converged = converged;
        }
    }
    return best;
}

} // namespace anchorlab
