#include "simsr/transport.hpp"

#include "simsr/errors.hpp"
#include "simsr/rng.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace simsr;

namespace {

// 1D ground metric |i - j| on {0..n-1}. For distributions on the line,
// W1 equals the L1 distance between the CDFs, which gives an oracle that
// does not share any code with the simplex implementation.
Matrix line_ground(int n) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = std::abs(i - j);
    return g;
}

double w1_line_oracle(const Vector& p, const Vector& q) {
    double total = 0.0;
    double cdf_gap = 0.0;
    for (int i = 0; i + 1 < p.size(); ++i) {
        cdf_gap += p(i) - q(i);
        total += std::abs(cdf_gap);
    }
    return total;
}

}  // namespace

TEST_CASE("identical distributions have zero cost under a zero-diagonal ground") {
    Rng rng(7);
    for (int n : {1, 2, 5, 9}) {
        const Vector p = test::random_probability_vector(n, rng);
        Matrix g = test::random_distance_matrix(n, rng, 3.0);
        g.diagonal().setZero();
        CHECK(w1_exact(p, p, g) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("point masses pay exactly the ground cost") {
    Matrix g = line_ground(4);
    Vector p = Vector::Zero(4), q = Vector::Zero(4);
    p(0) = 1.0;
    q(3) = 1.0;
    CHECK(w1_exact(p, q, g) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("half the mass moved across distance 2 costs 1") {
    Vector p(2), q(2);
    p << 0.5, 0.5;
    q << 0.0, 1.0;
    Matrix g(2, 2);
    g << 0.0, 2.0, 2.0, 0.0;
    CHECK(w1_exact(p, q, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matches the CDF oracle on the line") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(9));
        const Vector p = test::random_probability_vector(n, rng);
        const Vector q = test::random_probability_vector(n, rng);
        const double got = w1_exact(p, q, line_ground(n));
        const double want = w1_line_oracle(p, q);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("2x2 brute force: single transshipment variable") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const Vector p = test::random_probability_vector(2, rng);
        const Vector q = test::random_probability_vector(2, rng);
        Matrix g(2, 2);
        g(0, 0) = rng.uniform();
        g(0, 1) = rng.uniform() * 2;
        g(1, 0) = rng.uniform() * 2;
        g(1, 1) = rng.uniform();
        // Plan is determined by t = plan(0,0) in [max(0, p0 - q1), min(p0, q0)].
        const double lo = std::max(0.0, p(0) - q(1));
        const double hi = std::min(p(0), q(0));
        auto cost_at = [&](double t) {
            return t * g(0, 0) + (p(0) - t) * g(0, 1) + (q(0) - t) * g(1, 0) +
                   (q(1) - p(0) + t) * g(1, 1);
        };
        const double want = std::min(cost_at(lo), cost_at(hi));  // objective is linear in t
        CHECK(w1_exact(p, q, g) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("random rectangular instances are certified optimal") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(8));
        const int m = 1 + static_cast<int>(rng.uniform_int(8));
        const Vector p = test::random_probability_vector(n, rng);
        const Vector q = test::random_probability_vector(m, rng);
        Matrix g(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) g(i, j) = rng.uniform() * 5.0;
        const TransportResult res = solve_transport(p, q, g);
        CHECK(certify_transport(p, q, g, res));
        // Plan marginals match the inputs.
        CHECK((res.plan.rowwise().sum() - p).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((res.plan.colwise().sum().transpose() - q).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(res.plan.minCoeff() >= 0.0);
    }
}

TEST_CASE("sparse marginals with exact zeros are handled") {
    Vector p(5), q(5);
    p << 0.0, 0.5, 0.0, 0.5, 0.0;
    q << 0.25, 0.0, 0.5, 0.0, 0.25;
    const Matrix g = line_ground(5);
    const double got = w1_exact(p, q, g);
    CHECK(got == doctest::Approx(w1_line_oracle(p, q)).epsilon(1e-9));
}

TEST_CASE("degenerate ties are resolved deterministically") {
    // Uniform marginals over 4 points with constant ground: many optimal plans.
    Vector p = Vector::Constant(4, 0.25);
    Vector q = Vector::Constant(4, 0.25);
    Matrix g = Matrix::Constant(4, 4, 1.0);
    const TransportResult a = solve_transport(p, q, g);
    const TransportResult b = solve_transport(p, q, g);
    CHECK(a.cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((a.plan - b.plan).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.pivots == b.pivots);
}

TEST_CASE("symmetric metric ground gives symmetric distance") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(6));
        const Vector p = test::random_probability_vector(n, rng);
        const Vector q = test::random_probability_vector(n, rng);
        Matrix g = test::random_distance_matrix(n, rng, 2.0);
        CHECK(w1_exact(p, q, g) == doctest::Approx(w1_exact(q, p, g)).epsilon(1e-9));
    }
}

TEST_CASE("input validation rejects malformed problems") {
    Vector p(2), q(2);
    p << 0.5, 0.5;
    q << 0.5, 0.5;
    Matrix g = Matrix::Zero(2, 2);

    Vector short_q(1);
    short_q << 1.0;
    CHECK_THROWS_AS(solve_transport(p, short_q, g), ValidationError);

    Vector unbalanced(2);
    unbalanced << 0.5, 0.4;
    CHECK_THROWS_AS(solve_transport(p, unbalanced, g), ValidationError);

    Vector negative(2);
    negative << 1.1, -0.1;
    CHECK_THROWS_AS(solve_transport(p, negative, g), ValidationError);

    Matrix bad_ground(2, 2);
    bad_ground << 0.0, std::nan(""), 0.0, 0.0;
    CHECK_THROWS_AS(solve_transport(p, q, bad_ground), ValidationError);

    Matrix wrong_shape = Matrix::Zero(3, 2);
    CHECK_THROWS_AS(solve_transport(p, q, wrong_shape), ValidationError);
}
