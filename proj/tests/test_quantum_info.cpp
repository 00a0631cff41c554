#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anchorlab/linalg.hpp"
#include "anchorlab/max_information.hpp"
#include "anchorlab/quantum_info.hpp"
#include "anchorlab/rng.hpp"
#include "anchorlab/uhlmann.hpp"

#include <cmath>

using namespace anchorlab;

namespace {

HilbertSpace qubit(const std::string& name = "q") { return HilbertSpace({{name, 2}}); }

DensityOperator diag2(double a, double b, const std::string& name = "q") {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return DensityOperator::make(HilbertSpace({{name, 2}}), m);
}

PureState ket(const HilbertSpace& sp, std::vector<Cplx> amps) {
    Vec v(sp.dim());
    for (Eigen::Index i = 0; i < sp.dim(); ++i) v(i) = amps[i];
    return PureState::make(sp, v);
}

PureState bell_state() {
    HilbertSpace sp({{"qa", 2}, {"qb", 2}});
    const double r = 1.0 / std::sqrt(2.0);
    return ket(sp, {r, 0.0, 0.0, r});
}

} // namespace

TEST_CASE("trace distance spans zero to two") {
    auto zero = diag2(1.0, 0.0);
    auto one = diag2(0.0, 1.0);
    auto mix = diag2(0.5, 0.5);
    CHECK(trace_distance(zero, zero) == doctest::Approx(0.0));
    CHECK(trace_distance(zero, one) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(trace_distance(zero, mix) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(
        trace_distance(zero, diag2(1.0, 0.0, "other")),
        doctest::Contains("SPACE_MISMATCH"), Error);
}

TEST_CASE("fidelity matches the worked overlaps") {
    auto zero = diag2(1.0, 0.0);
    auto mix = diag2(0.5, 0.5);
    CHECK(fidelity(mix, mix) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fidelity(mix, zero) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

    const double r = 1.0 / std::sqrt(2.0);
    auto plus = ket(qubit(), {r, r}).density();
    CHECK(fidelity(zero, plus) == doctest::Approx(r).epsilon(1e-9));
}

TEST_CASE("purification mirrors the spectrum and restores the state") {
    auto rho = diag2(0.25, 0.75);
    PureState psi = purify(rho);
    CHECK(psi.space.dim() == 4);

    // Schmidt coefficients across the mirror cut are the eigenvalue roots
    Mat m = matricize(psi.vector, psi.space, {"q"});
    Eigen::JacobiSVD<Mat> svd(m);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + 2);
    std::sort(sv.begin(), sv.end());
    CHECK(sv[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sv[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));

    std::vector<std::string> mirror;
    for (const auto& f : psi.space.factors())
        if (f.name != "q") mirror.push_back(f.name);
    DensityOperator back = partial_trace(psi.density(), mirror);
    CHECK(trace_distance(back, rho) <= 1e-9);

    // purifying a maximally mixed qubit yields a maximally entangled pair
    PureState chi = purify(diag2(0.5, 0.5));
    Mat m2 = matricize(chi.vector, chi.space, {"q"});
    Eigen::JacobiSVD<Mat> svd2(m2);
    CHECK(svd2.singularValues()(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(svd2.singularValues()(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("partial trace on simple two-qubit states") {
    PureState bell = bell_state();
    DensityOperator half = partial_trace(bell.density(), {"qb"});
    CHECK(half.matrix(0, 0).real() == doctest::Approx(0.5));
    CHECK(half.matrix(1, 1).real() == doctest::Approx(0.5));
    CHECK(std::abs(half.matrix(0, 1)) <= 1e-12);

    HilbertSpace sp({{"qa", 2}, {"qb", 2}});
    const double r = 1.0 / std::sqrt(2.0);
    PureState superp = ket(sp, {r, r, 0.0, 0.0});  // first qubit fixed at 0
    DensityOperator first = partial_trace(superp.density(), {"qb"});
    CHECK(first.matrix(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(partial_trace(bell.density(), {"nope"}),
                         doctest::Contains("UNKNOWN_FACTOR"), Error);
}

TEST_CASE("relative entropy on commuting pairs and off support") {
    auto mix = diag2(0.5, 0.5);
    auto skew = diag2(0.25, 0.75);
    CHECK(relative_entropy(mix, mix) == doctest::Approx(0.0));
    const double expected = 0.5 * 1.0 + 0.5 * std::log2(2.0 / 3.0);
    CHECK(relative_entropy(mix, skew) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(0.20752).epsilon(1e-4));
    CHECK(std::isinf(relative_entropy(diag2(1.0, 0.0), diag2(0.0, 1.0))));
}

TEST_CASE("max relative entropy dominates relative entropy") {
    auto skew = diag2(0.25, 0.75);
    CHECK(relative_min_entropy(skew, skew) == doctest::Approx(0.0));
    CHECK(relative_min_entropy(diag2(1.0, 0.0), skew) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::isinf(relative_min_entropy(diag2(1.0, 0.0), diag2(0.0, 1.0))));

    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto rho = DensityOperator::make(qubit(), random_density(2, rng));
        auto sig = DensityOperator::make(
            qubit(),
            hermitize(0.75 * random_density(2, rng) + 0.25 * rho.matrix));
        const double s = relative_entropy(rho, sig);
        const double sinf = relative_min_entropy(rho, sig);
        CHECK(sinf >= s - 1e-8);
        CHECK(s >= -1e-9);
        // mixture reference: rho never exceeds 4x the mixture weight
        auto mixed = DensityOperator::make(
            qubit(), hermitize(0.25 * rho.matrix + 0.75 * random_density(2, rng)));
        CHECK(relative_min_entropy(rho, mixed) <= 2.0 + 1e-8);
    }
}

TEST_CASE("smoothing witness obeys its entropy budget") {
    auto mix = diag2(0.5, 0.5);
    auto skew = diag2(0.25, 0.75);

    SmoothWitness same = smooth_min_entropy_witness(skew, skew, 0.3);
    CHECK(same.value == doctest::Approx(0.0).epsilon(1e-9));

    const double eps = 0.3;
    SmoothWitness w = smooth_min_entropy_witness(mix, skew, eps);
    CHECK(trace_distance(mix, w.rho_prime) <= eps + 1e-9);
    CHECK(relative_min_entropy(w.rho_prime, skew) ==
          doctest::Approx(w.value).epsilon(1e-9));
    const double budget = 4.0 * relative_entropy(mix, skew) / (eps * eps) +
                          std::log2(1.0 / (1.0 - eps * eps / 4.0));
    CHECK(budget == doctest::Approx(9.256).epsilon(1e-3));
    CHECK(w.value <= budget + 1e-6);

    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        HilbertSpace q3({{"q", 3}});
        auto rho = DensityOperator::make(q3, random_density(3, rng));
        auto sig = DensityOperator::make(
            q3, hermitize(0.85 * random_density(3, rng) +
                          0.15 * Mat::Identity(3, 3) / 3.0));
        SmoothWitness ww = smooth_min_entropy_witness(rho, sig, 0.3);
        CHECK(trace_distance(rho, ww.rho_prime) <= 0.3 + 1e-9);
        CHECK(ww.value <= 4.0 * relative_entropy(rho, sig) / 0.09 +
                              std::log2(1.0 / (1.0 - 0.09 / 4.0)) + 1e-6);
    }

    CHECK_THROWS_WITH_AS(smooth_min_entropy_witness(diag2(1, 0), diag2(0, 1), 0.3),
                         doctest::Contains("SUPPORT_VIOLATION"), Error);
    CHECK_THROWS_WITH_AS(smooth_min_entropy_witness(mix, skew, 0.0),
                         doctest::Contains("PARAM_RANGE"), Error);
}

TEST_CASE("mutual information on product, correlated and entangled pairs") {
    HilbertSpace sp({{"Y", 2}, {"Z", 2}});
    Mat prod = Mat::Zero(4, 4);
    prod(0, 0) = 0.25;
    prod(1, 1) = 0.25;
    prod(2, 2) = 0.25;
    prod(3, 3) = 0.25;
    CHECK(mutual_information(DensityOperator::make(sp, prod), {"Y"}, {"Z"}) ==
          doctest::Approx(0.0).epsilon(1e-10));

    Mat corr = Mat::Zero(4, 4);
    corr(0, 0) = 0.5;
    corr(3, 3) = 0.5;
    CHECK(mutual_information(DensityOperator::make(sp, corr), {"Y"}, {"Z"}) ==
          doctest::Approx(1.0).epsilon(1e-10));

    PureState bell = bell_state();
    CHECK(mutual_information(bell.density(), {"qa"}, {"qb"}) ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("conditional information satisfies the chain rule") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        auto label = FiniteDistribution::from_table(
            {{"A", {"0", "1"}}, {"B", {"0", "1", "2"}}}, dirichlet_flat(rng, 6));
        std::vector<DensityOperator> conds;
        for (int i = 0; i < 6; ++i)
            conds.push_back(DensityOperator::make(qubit(), random_density(2, rng)));
        CQState cq = CQState::make(label, conds);
        const double lhs = mutual_information(cq, {"A", "B"}, {"q"});
        const double rhs = mutual_information(cq, {"B"}, {"q"}) +
                           conditional_mutual_information(cq, {"A"}, {"q"}, {"B"});
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("max information stays under the dimension ceiling") {
    HilbertSpace sp({{"Y", 2}, {"Z", 2}});
    Mat prod = Mat::Zero(4, 4);
    prod.diagonal().setConstant(0.25);
    CHECK(max_information(DensityOperator::make(sp, prod), 0.0) ==
          doctest::Approx(0.0).epsilon(1e-6));

    Mat corr = Mat::Zero(4, 4);
    corr(0, 0) = 0.5;
    corr(3, 3) = 0.5;
    CHECK(max_information(DensityOperator::make(sp, corr), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-6));

    Rng rng(31);
    auto rnd = DensityOperator::make(sp, random_density(4, rng));
    const double v = max_information(rnd, 0.0);
    CHECK(v <= 2.0 + 1e-6);
    CHECK(v >= -1e-9);

    HilbertSpace big({{"Y", 2}, {"Z", 5}});
    CHECK_THROWS_WITH_AS(
        max_information(DensityOperator::make(
                            big, Mat::Identity(10, 10) / 10.0), 0.0),
        doctest::Contains("DIMENSION_GUARD"), Error);
}

TEST_CASE("reduced-state alignment achieves the fidelity") {
    HilbertSpace sp({{"qa", 2}, {"qb", 2}});
    const double r = 1.0 / std::sqrt(2.0);

    PureState psi = ket(sp, {1.0, 0.0, 0.0, 0.0});  // |0>|0>
    PureState phi = ket(sp, {0.0, 1.0, 0.0, 0.0});  // |0>|1>
    UhlmannResult flip = uhlmann_unitary(psi, phi, {"qa"});
    CHECK(flip.overlap == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(flip.complement.factors().size() == 1);
    CHECK(flip.complement.factors()[0].name == "qb");

    UhlmannResult same = uhlmann_unitary(psi, psi, {"qa"});
    CHECK(same.overlap == doctest::Approx(1.0).epsilon(1e-10));

    UhlmannResult bell_to_zero = uhlmann_unitary(bell_state(), psi, {"qa"});
    CHECK(bell_to_zero.overlap == doctest::Approx(r).epsilon(1e-8));

    // the returned matrix is unitary and achieves the reported overlap
    Mat u = bell_to_zero.unitary;
    CHECK((u.adjoint() * u - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
    Mat lifted = kron(Mat::Identity(2, 2), u);
    const Cplx amp = (bell_state().vector.adjoint() * lifted * psi.vector)(0);
    CHECK(std::abs(amp) == doctest::Approx(bell_to_zero.overlap).epsilon(1e-9));

    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        PureState a = PureState::make(sp, random_unit_vector(4, rng));
        PureState b = PureState::make(sp, random_unit_vector(4, rng));
        UhlmannResult res = uhlmann_unitary(a, b, {"qa"});
        const double f = fidelity(partial_trace(a.density(), {"qb"}),
                                  partial_trace(b.density(), {"qb"}));
        CHECK(std::abs(res.overlap - f) <= 1e-8);
    }

    CHECK_THROWS_WITH_AS(uhlmann_unitary(psi, phi, {}),
                         doctest::Contains("TRIVIAL_COMPLEMENT"), Error);
    CHECK_THROWS_WITH_AS(uhlmann_unitary(psi, phi, {"qa", "qb"}),
                         doctest::Contains("TRIVIAL_COMPLEMENT"), Error);
    HilbertSpace other({{"qa", 2}, {"qc", 2}});
    CHECK_THROWS_WITH_AS(
        uhlmann_unitary(psi, PureState::make(other, psi.vector), {"qa"}),
        doctest::Contains("SPACE_MISMATCH"), Error);
}

TEST_CASE("fidelity and trace distance sandwich each other") {
    Rng rng(37);
    for (Eigen::Index d = 2; d <= 5; ++d) {
        HilbertSpace sp({{"q", d}});
        for (int trial = 0; trial < 25; ++trial) {
            auto rho = DensityOperator::make(sp, random_density(d, rng));
            auto sig = DensityOperator::make(sp, random_density(d, rng));
            const double td = trace_distance(rho, sig);
            const double f = fidelity(rho, sig);
            CHECK(2.0 * (1.0 - f) <= td + 1e-8);
            CHECK(td <= 2.0 * std::sqrt(1.0 - f * f) + 1e-8);
        }
    }
}
