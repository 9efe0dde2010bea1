#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cosparse/dataio.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"
#include "cosparse/metrics.hpp"
#include "cosparse/reconstruction.hpp"
#include "oracles.hpp"

using namespace cosparse;

namespace {

struct Problem {
    DenseMatrix x;
    MeasurementMatrix phi;
    DenseMatrix y;
};

Problem cosparse_problem(std::size_t n_signal, std::size_t cosupport, std::size_t n, std::size_t channels,
                         std::uint64_t seed) {
    auto sample = synth_cosparse(n_signal, cosupport, channels, true, seed);
    auto phi = gaussian_measurement(n, n_signal, seed + 7919);
    auto y = linalg::matmul(phi.matrix, sample.segment.data);
    return {std::move(sample.segment.data), std::move(phi), std::move(y)};
}

DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
        for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
    }
    return out;
}

}  // namespace

TEST_CASE("residual_ratio") {
    const auto a = oracle::random_matrix(10, 3, 1);
    const auto same = residual_ratio(a, a);
    CHECK(same.values == std::vector<double>{0, 0, 0});
    CHECK_FALSE(same.zero_previous);

    DenseMatrix doubled = a;
    for (double& v : doubled.data()) v *= 2.0;
    for (double r : residual_ratio(doubled, a).values) CHECK(r == doctest::Approx(-1.0).epsilon(1e-15));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto cur = oracle::random_matrix(8, 3, seed);
        const auto prev = oracle::random_matrix(8, 3, seed + 99);
        const auto r = residual_ratio(cur, prev);
        for (std::size_t c = 0; c < 3; ++c) {
            double nc = 0, np = 0;
            for (std::size_t i = 0; i < 8; ++i) {
                nc += cur(i, c) * cur(i, c);
                np += prev(i, c) * prev(i, c);
            }
            CHECK(std::abs(r.values[c] - (1.0 - std::sqrt(nc) / std::sqrt(np))) <= 1e-12);
        }
    }

    DenseMatrix zero_prev(10, 3);
    for (std::size_t i = 0; i < 10; ++i) zero_prev(i, 0) = 1.0;
    const auto z = residual_ratio(a, zero_prev);
    CHECK(z.zero_previous);
    CHECK(z.values[1] == 0.0);
    CHECK_THROWS_AS(residual_ratio(a, DenseMatrix(10, 2)), ShapeError);
}

TEST_CASE("solve_estimate") {
    SUBCASE("normal equations agree with the stacked least-squares form") {
        const auto omega = second_order_diff(60);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto phi = gaussian_measurement(30, 60, seed);
            const auto y = oracle::random_matrix(30, 2, seed + 1);
            std::vector<std::size_t> rows(60);
            std::iota(rows.begin(), rows.end(), 0);
            std::shuffle(rows.begin(), rows.end(), std::mt19937_64(seed));
            rows.resize(35 + seed);
            std::sort(rows.begin(), rows.end());
            const auto x = solve_estimate(linalg::gram(phi.matrix), linalg::matmul_at(phi.matrix, y), omega, rows, 0.05);
            const auto ref = oracle::stacked_estimate(phi.matrix, y, omega.matrix, rows, 0.05);
            CHECK(max_abs_diff(x, ref) <= 1e-8 * std::max(1.0, linalg::frobenius_norm(ref)));
        }
    }
    SUBCASE("empty co-support with square orthogonal phi returns phi^T y") {
        const auto phi = orthogonal_measurement(20, 3);
        const auto y = oracle::random_matrix(20, 1, 4);
        const auto x = solve_estimate(linalg::gram(phi.matrix), linalg::matmul_at(phi.matrix, y),
                                      second_order_diff(20), {}, 0.05);
        CHECK(max_abs_diff(x, linalg::matmul_at(phi.matrix, y)) <= 1e-12);
    }
    SUBCASE("full co-support on an affine signal is at least as smooth as the truth") {
        const std::size_t n_signal = 50;
        const auto omega = second_order_diff(n_signal);
        DenseMatrix x(n_signal, 1);
        for (std::size_t i = 0; i < n_signal; ++i) x(i, 0) = 0.3 * static_cast<double>(i) - 2.0;
        const auto phi = gaussian_measurement(25, n_signal, 8);
        const auto y = linalg::matmul(phi.matrix, x);
        std::vector<std::size_t> all(n_signal);
        std::iota(all.begin(), all.end(), 0);
        const auto est = solve_estimate(linalg::gram(phi.matrix), linalg::matmul_at(phi.matrix, y), omega, all, 0.05);
        const auto ref = oracle::stacked_estimate(phi.matrix, y, omega.matrix, all, 0.05);
        CHECK(max_abs_diff(est, ref) <= 1e-8 * linalg::frobenius_norm(ref));
        CHECK(linalg::frobenius_norm(linalg::matmul(omega.matrix, est)) <=
              linalg::frobenius_norm(linalg::matmul(omega.matrix, x)) * (1 + 1e-12));
    }
    SUBCASE("errors") {
        const auto omega = second_order_diff(10);
        CHECK_THROWS_AS(solve_estimate(DenseMatrix::identity(9), DenseMatrix(10, 1), omega, {}, 0.05), ShapeError);
        const std::vector<std::size_t> bad{10};
        CHECK_THROWS_AS(solve_estimate(DenseMatrix::identity(10), DenseMatrix(10, 1), omega, bad, 0.05), ConfigError);
        DenseMatrix rank_deficient(10, 10);
        CHECK_THROWS_AS(solve_estimate(rank_deficient, DenseMatrix(10, 1), omega, {}, 0.05), SingularMatrixError);
    }
}

TEST_CASE("GapConfig") {
    GapConfig cfg;
    CHECK(cfg.t == 10);
    CHECK(cfg.lambda == 0.05);
    CHECK(cfg.k_max(720) == 71);
    CHECK(cfg.k_max(120) == 11);
    CHECK(cfg.k_max(5) == 0);
    cfg.k_max_override = 3;
    CHECK(cfg.k_max(720) == 3);
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.lambda = 0.05;
    cfg.t = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("gap") {
    const auto omega = second_order_diff(120);

    SUBCASE("recovers a piecewise-linear signal from 72 measurements") {
        const auto p = cosparse_problem(120, 110, 72, 1, 3);
        const auto res = gap(p.y, p.phi, omega);
        CHECK(oracle::rel_error(p.x, res.estimate) <= 1e-3);
        CHECK(res.solve_count == res.iterations + 1);
        CHECK(res.iterations <= 11);
        CHECK(res.index_set.size() == 120 - 10 * res.iterations);
    }
    SUBCASE("zero signal is a fixed point") {
        const auto phi = gaussian_measurement(72, 120, 1);
        const auto res = gap(DenseMatrix(72, 1), phi, omega);
        CHECK(linalg::frobenius_norm(res.estimate) == 0.0);
        CHECK(res.stop_reason == StopReason::zero_estimate);
        CHECK(res.index_set.size() == 120);
        CHECK(res.solve_count == 1);
    }
    SUBCASE("precalculation does not change the result and saves products") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto p = cosparse_problem(120, 108, 72, 1, seed);
            GapConfig naive;
            naive.precalculate = false;
            const auto fast = gap(p.y, p.phi, omega);
            const auto slow = gap(p.y, p.phi, omega, naive);
            CHECK(max_abs_diff(fast.estimate, slow.estimate) <= 1e-12);
            CHECK(fast.iterations == slow.iterations);
            CHECK(fast.product_count < slow.product_count);
        }
    }
    SUBCASE("every iterate solves its defining system and the co-support shrinks by t") {
        const auto p = cosparse_problem(120, 106, 80, 1, 11);
        GapConfig cfg;
        cfg.record_history = true;
        const auto res = gap(p.y, p.phi, omega, cfg);
        REQUIRE(res.estimate_history.size() == res.solve_count);
        const auto g = linalg::gram(p.phi.matrix);
        const auto rhs = linalg::matmul_at(p.phi.matrix, p.y);
        for (std::size_t k = 0; k < res.solve_count; ++k) {
            CHECK(res.index_set_sizes[k] == 120 - 10 * k);
            CHECK(res.cosupport_history[k].size() == 120 - 10 * k);
            DenseMatrix system = g;
            for (auto i : res.cosupport_history[k])
                for (std::size_t a = 0; a < 120; ++a)
                    for (std::size_t b = 0; b < 120; ++b) system(a, b) += 0.05 * omega.matrix(i, a) * omega.matrix(i, b);
            DenseMatrix resid = oracle::multiply(system, res.estimate_history[k]);
            for (std::size_t i = 0; i < resid.size(); ++i) resid.data()[i] -= rhs.data()[i];
            const double scale = oracle::frobenius(system) * oracle::frobenius(res.estimate_history[k]) + oracle::frobenius(rhs);
            CHECK(oracle::frobenius(resid) <= 1e-8 * scale);
        }
    }
    SUBCASE("rollback returns the iterate before the ratio test fired") {
        const auto p = cosparse_problem(120, 110, 72, 1, 0);
        GapConfig keep;
        keep.keep_previous_on_stop = true;
        keep.record_history = true;
        const auto res = gap(p.y, p.phi, omega, keep);
        if (res.stop_reason == StopReason::residual_ratio) {
            CHECK(res.estimate == res.estimate_history[res.solve_count - 2]);
            CHECK(res.index_set == res.cosupport_history[res.solve_count - 2]);
        } else {
            CHECK(res.estimate == res.estimate_history.back());
        }
    }
    SUBCASE("signed ratio test is available") {
        const auto p = cosparse_problem(120, 110, 72, 1, 2);
        GapConfig cfg;
        cfg.ratio_test = RatioTest::signed_increase;
        const auto res = gap(p.y, p.phi, omega, cfg);
        CHECK(res.solve_count == res.iterations + 1);
        for (std::size_t k = 1; k + 1 < res.residual_ratio_history.size(); ++k)
            CHECK(res.residual_ratio_history[k][0] <= res.residual_ratio_history[k - 1][0]);
    }
    SUBCASE("co-support exhaustion under an override") {
        const auto p = cosparse_problem(30, 25, 29, 1, 5);
        GapConfig cfg;
        cfg.t = 7;
        cfg.k_max_override = 10;
        cfg.ratio_test = RatioTest::signed_increase;
        cfg.lambda = 1.0;
        const auto omega30 = second_order_diff(30);
        const auto res = gap(p.y, p.phi, omega30, cfg);
        CHECK(res.iterations <= 5);
        for (std::size_t k = 0; k + 1 < res.index_set_sizes.size(); ++k)
            CHECK(res.index_set_sizes[k + 1] == std::max<std::size_t>(res.index_set_sizes[k], 7) - 7);
    }
    SUBCASE("shape errors") {
        const auto phi = gaussian_measurement(72, 120, 1);
        CHECK_THROWS_AS(gap(DenseMatrix(71, 1), phi, omega), ShapeError);
        CHECK_THROWS_AS(gap(DenseMatrix(72, 2), phi, omega), ShapeError);
        CHECK_THROWS_AS(gap(DenseMatrix(72, 1), phi, second_order_diff(100)), ShapeError);
    }
}

TEST_CASE("sgap") {
    const auto omega = second_order_diff(120);

    SUBCASE("single channel matches gap") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto p = cosparse_problem(120, 110, 72, 1, seed);
            const auto a = gap(p.y, p.phi, omega);
            const auto b = sgap(p.y, p.phi, omega);
            CHECK(max_abs_diff(a.estimate, b.estimate) <= 1e-12);
            CHECK(a.index_set == b.index_set);
            CHECK(a.residual_ratio_history == b.residual_ratio_history);
        }
    }
    SUBCASE("replicated channels reproduce the single-channel result") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto p = cosparse_problem(120, 110, 72, 1, seed);
            const auto single = gap(p.y, p.phi, omega);
            const auto joint = sgap(hstack(p.y, hstack(p.y, p.y)), p.phi, omega);
            for (std::size_t c = 0; c < 3; ++c) CHECK(max_abs_diff(joint.estimate.col(c), single.estimate) <= 1e-10);
            CHECK(joint.solve_count == single.solve_count);
        }
    }
    SUBCASE("one solve per iteration regardless of channel count") {
        const auto p = cosparse_problem(120, 110, 72, 2, 4);
        const auto joint = sgap(p.y, p.phi, omega);
        CHECK(joint.solve_count == joint.iterations + 1);
        const auto c0 = gap(p.y.col(0), p.phi, omega);
        const auto c1 = gap(p.y.col(1), p.phi, omega);
        if (c0.iterations == joint.iterations && c1.iterations == joint.iterations)
            CHECK(2 * joint.solve_count == c0.solve_count + c1.solve_count);
        CHECK(oracle::rel_error(p.x, joint.estimate) <= 1e-3);
    }
    SUBCASE("channel permutation permutes the estimate") {
        const auto p = cosparse_problem(120, 108, 80, 3, 6);
        DenseMatrix swapped(p.y.rows(), 3);
        const std::size_t perm[] = {2, 0, 1};
        for (std::size_t c = 0; c < 3; ++c) swapped.set_column(c, p.y.column_values(perm[c]));
        const auto a = sgap(p.y, p.phi, omega);
        const auto b = sgap(swapped, p.phi, omega);
        for (std::size_t c = 0; c < 3; ++c) CHECK(max_abs_diff(b.estimate.col(c), a.estimate.col(perm[c])) <= 1e-10);
        CHECK(a.index_set == b.index_set);
    }
    SUBCASE("abs-sum aggregation survives opposite-polarity channels") {
        auto p = cosparse_problem(120, 110, 72, 1, 9);
        DenseMatrix neg = p.y;
        for (double& v : neg.data()) v = -v;
        GapConfig cfg;
        cfg.aggregation = RowAggregation::abs_sum;
        const auto res = sgap(hstack(p.y, neg), p.phi, omega, cfg);
        const auto single = gap(p.y, p.phi, omega);
        CHECK(max_abs_diff(res.estimate.col(0), single.estimate) <= 1e-10);
        // The signed sum cancels to zero everywhere, so pruning degenerates to index order.
        const auto cancelled = sgap(hstack(p.y, neg), p.phi, omega);
        CHECK(cancelled.solve_count >= 1);
    }
}

TEST_CASE("PursuitConfig") {
    PursuitConfig cfg;
    CHECK(cfg.atoms_per_iter == 4);
    CHECK(cfg.residual_tol == 1e-4);
    CHECK(cfg.max_iterations(720) == 180);
    CHECK(cfg.max_iterations(721) == 181);
    cfg.atoms_per_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("ommp") {
    SUBCASE("4-sparse signal under an orthogonal dictionary in one iteration") {
        const auto a = orthogonal_measurement(32, 2).matrix;
        DenseMatrix s(32, 1);
        s(3, 0) = 1.5;
        s(10, 0) = -2.0;
        s(11, 0) = 0.7;
        s(30, 0) = 3.1;
        const auto res = ommp(linalg::matmul(a, s), a);
        CHECK(res.iterations == 1);
        CHECK(res.index_set == std::vector<std::size_t>{3, 10, 11, 30});
        CHECK(max_abs_diff(res.estimate, s) <= 1e-12);
    }
    SUBCASE("zero measurements") {
        const auto a = oracle::random_matrix(20, 40, 1);
        const auto res = ommp(DenseMatrix(20, 1), a);
        CHECK(res.iterations == 0);
        CHECK(linalg::frobenius_norm(res.estimate) == 0.0);
    }
    SUBCASE("8-sparse recovery with a Gaussian dictionary") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto a = oracle::random_matrix(64, 128, seed, 0.125);
            DenseMatrix s(128, 1);
            std::vector<std::size_t> support(128);
            std::iota(support.begin(), support.end(), 0);
            std::shuffle(support.begin(), support.end(), std::mt19937_64(seed + 5));
            support.resize(8);
            std::sort(support.begin(), support.end());
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> amp(1.0, 2.0);
            for (auto j : support) s(j, 0) = (rng() % 2 ? 1.0 : -1.0) * amp(rng);
            const auto res = ommp(linalg::matmul(a, s), a);
            CHECK(std::includes(res.index_set.begin(), res.index_set.end(), support.begin(), support.end()));
            CHECK(max_abs_diff(res.estimate, s) <= 1e-6);
        }
    }
    SUBCASE("residual is non-increasing") {
        const auto a = oracle::random_matrix(40, 100, 3);
        const auto y = oracle::random_matrix(40, 1, 4);
        const auto res = ommp(y, a);
        CHECK(res.stop_reason == StopReason::residual_tol);
        for (std::size_t k = 1; k < res.relative_residual_history.size(); ++k)
            CHECK(res.relative_residual_history[k][0] <= res.relative_residual_history[k - 1][0] + 1e-12);
        CHECK(res.index_set.size() <= 40);
    }
    SUBCASE("duplicate atoms trigger the ridge fallback") {
        DenseMatrix a = oracle::random_matrix(10, 20, 6);
        for (std::size_t r = 0; r < 10; ++r) a(r, 1) = a(r, 0);
        const auto res = ommp(a.col(0), a, PursuitConfig{2, 1e-6, 1});
        CHECK(res.ridge_fallback);
        CHECK(res.index_set == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("signal-domain variant maps through the dictionary") {
        const auto psi = daubechies_dictionary(64, 4, 3);
        const auto sample = synth_sparse(psi, 6, 1, true, 12);
        const auto phi = gaussian_measurement(40, 64, 13);
        const auto res = ommp(linalg::matmul(phi.matrix, sample.segment.data), phi, psi);
        CHECK(oracle::rel_error(sample.segment.data, res.estimate) <= 1e-6);
        CHECK(std::includes(res.index_set.begin(), res.index_set.end(), sample.supports[0].begin(),
                            sample.supports[0].end()));
    }
    SUBCASE("errors") {
        const auto a = oracle::random_matrix(10, 20, 1);
        CHECK_THROWS_AS(ommp(DenseMatrix(9, 1), a), ShapeError);
        CHECK_THROWS_AS(ommp(DenseMatrix(10, 2), a), ShapeError);
        DenseMatrix zero_col = a;
        for (std::size_t r = 0; r < 10; ++r) zero_col(r, 4) = 0.0;
        CHECK_THROWS_AS(ommp(a.col(0), zero_col), ConfigError);
    }
}

TEST_CASE("sommp") {
    const auto psi = daubechies_dictionary(64, 4, 3);
    const auto phi = gaussian_measurement(40, 64, 21);
    const auto a = linalg::matmul(phi.matrix, psi.matrix);

    SUBCASE("single channel matches ommp") {
        const auto y = oracle::random_matrix(40, 1, 1);
        const auto r1 = ommp(y, a);
        const auto r2 = sommp(y, a);
        CHECK(max_abs_diff(r1.estimate, r2.estimate) <= 1e-12);
        CHECK(r1.index_set == r2.index_set);
    }
    SUBCASE("identical channels share the single-channel support") {
        const auto sample = synth_sparse(psi, 5, 1, true, 3);
        const auto y = linalg::matmul(phi.matrix, sample.segment.data);
        const auto single = ommp(y, a, psi);
        const auto joint = sommp(hstack(y, y), a, psi);
        CHECK(joint.index_set == single.index_set);
        CHECK(max_abs_diff(joint.estimate.col(1), single.estimate) <= 1e-10);
    }
    SUBCASE("joint-sparse channels with distinct coefficients") {
        const auto sample = synth_sparse(psi, 6, 2, true, 8);
        const auto y = linalg::matmul(phi.matrix, sample.segment.data);
        const auto res = sommp(y, a, psi);
        CHECK(std::includes(res.index_set.begin(), res.index_set.end(), sample.supports[0].begin(),
                            sample.supports[0].end()));
        CHECK(max_abs_diff(res.coefficients, sample.coefficients) <= 1e-8);
        CHECK_FALSE(max_abs_diff(res.coefficients.col(0), res.coefficients.col(1)) < 1e-3);
        CHECK(res.solve_count == res.iterations);
    }
}
