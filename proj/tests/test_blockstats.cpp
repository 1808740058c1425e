#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "bilt/blockstats.hpp"
#include "bilt/error.hpp"
#include "support.hpp"

using namespace bilt;

namespace {

TwoSampleData from_rows(std::initializer_list<std::initializer_list<double>> xs,
                        std::initializer_list<std::initializer_list<double>> ys)
{
    auto to_matrix = [](std::initializer_list<std::initializer_list<double>> rows) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
        Eigen::Index i = 0;
        for (const auto& r : rows) {
            Eigen::Index j = 0;
            for (double v : r) m(i, j++) = v;
            ++i;
        }
        return m;
    };
    return TwoSampleData(to_matrix(xs), to_matrix(ys));
}

} // namespace

TEST_CASE("hand dataset with collinear pooled covariance is singular")
{
    const auto data = from_rows({{1, 0}, {2, 1}, {3, 2}}, {{0, 0}, {1, 1}, {2, 2}});
    const Eigen::MatrixXd s = pooled_block_covariance(data, {0, 2});
    CHECK(s.isApprox(Eigen::MatrixXd::Ones(2, 2), 1e-15));
    CHECK_THROWS_AS(block_statistic(data, {0, 2}), SingularBlockCovariance);
}

TEST_CASE("hand dataset with exact fraction oracle")
{
    const auto data = from_rows({{1, 0}, {2, 1}, {3, 3}}, {{0, 0}, {1, 2}, {2, 1}});
    Eigen::Matrix2d expected;
    expected << 1.0, 1.0, 1.0, 5.0 / 3.0;
    CHECK((pooled_block_covariance(data, {0, 2}) - expected).cwiseAbs().maxCoeff() < 1e-15);
    const BlockStat st = block_statistic(data, {0, 2});
    CHECK(std::abs(st.a - 2.5) < 1e-13);
    CHECK(std::abs(st.u - 2.9130468946902048468) < 1e-13);
    CHECK(st.block_size == 2);
    CHECK(std::abs(block_log_statistic(2.5, 6) - 2.9130468946902048468) < 1e-14);
}

TEST_CASE("fixed partitions")
{
    const auto p = BlockPartition::fixed(7, 3);
    CHECK(p.sizes() == std::vector<int>{3, 3, 1});
    CHECK(p.total() == 7);
    CHECK(p.max_size() == 3);
    CHECK_FALSE(p.uniform());
    const auto r = p.ranges();
    REQUIRE(r.size() == 3);
    CHECK(r[2].begin == 6);
    CHECK(r[2].size == 1);
    CHECK(BlockPartition::fixed(8, 2).uniform());
    CHECK(BlockPartition::fixed(8, 2).count() == 4);
    CHECK(BlockPartition::fixed(3, 10).sizes() == std::vector<int>{3});
    CHECK_THROWS_AS(BlockPartition::fixed(0, 2), InvalidArgument);
    CHECK_THROWS_AS(BlockPartition({2, 0}), InvalidArgument);
    CHECK_THROWS_AS(BlockPartition::fixed(8, 2).check_dimension(9), InvalidArgument);
}

TEST_CASE("block statistic invariances")
{
    bilt::PhiloxStream rng(17, 0);
    const Eigen::MatrixXd x = testing::gaussian_matrix(9, 6, rng);
    const Eigen::MatrixXd y = testing::gaussian_matrix(12, 6, rng, 0.4);
    const TwoSampleData data(x, y);
    const auto base = all_block_statistics(data, BlockPartition::fixed(6, 3));

    SUBCASE("common translation")
    {
        Eigen::RowVectorXd shift(6);
        shift << 3, -2, 10, 0.5, 1e3, -7;
        const auto moved = all_block_statistics(TwoSampleData(x.rowwise() + shift, y.rowwise() + shift),
                                                BlockPartition::fixed(6, 3));
        for (std::size_t k = 0; k < base.size(); ++k) CHECK(moved[k].a == doctest::Approx(base[k].a).epsilon(1e-10));
    }
    SUBCASE("invertible transform within each block")
    {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 6);
        t.block(0, 0, 3, 3) << 2, 1, 0, 0, 3, -1, 1, 0, 1;
        t.block(3, 3, 3, 3) << 1, 0, 0, 5, 1, 0, -2, 4, 0.5;
        const auto mapped = all_block_statistics(TwoSampleData(x * t, y * t), BlockPartition::fixed(6, 3));
        for (std::size_t k = 0; k < base.size(); ++k) CHECK(mapped[k].a == doctest::Approx(base[k].a).epsilon(1e-9));
    }
    SUBCASE("group swap")
    {
        const auto swapped = all_block_statistics(data.swapped(), BlockPartition::fixed(6, 3));
        for (std::size_t k = 0; k < base.size(); ++k) CHECK(swapped[k].a == doctest::Approx(base[k].a).epsilon(1e-12));
    }
    SUBCASE("one block spanning all variables is Hotelling's T^2")
    {
        const auto whole = all_block_statistics(data, BlockPartition::fixed(6, 6));
        CHECK(whole.front().a == doctest::Approx(hotelling_t2(data).t2).epsilon(1e-12));
    }
    SUBCASE("unit blocks are squared pooled t statistics")
    {
        const auto unit = all_block_statistics(data, BlockPartition::fixed(6, 1));
        for (int j = 0; j < 6; ++j) {
            const double mx = x.col(j).mean();
            const double my = y.col(j).mean();
            const double ss = (x.col(j).array() - mx).square().sum() + (y.col(j).array() - my).square().sum();
            const double s2 = ss / (21 - 2);
            const double t2 = (mx - my) * (mx - my) / (s2 * (1.0 / 9 + 1.0 / 12));
            CHECK(unit[static_cast<std::size_t>(j)].a == doctest::Approx(t2).epsilon(1e-12));
        }
    }
}

TEST_CASE("error paths")
{
    bilt::PhiloxStream rng(3, 0);
    CHECK_THROWS_AS(TwoSampleData(testing::gaussian_matrix(4, 3, rng), testing::gaussian_matrix(4, 2, rng)), ShapeMismatch);
    CHECK_THROWS_AS(TwoSampleData(testing::gaussian_matrix(1, 3, rng), testing::gaussian_matrix(4, 3, rng)), InvalidArgument);
    Eigen::MatrixXd bad = testing::gaussian_matrix(4, 3, rng);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(TwoSampleData(bad, testing::gaussian_matrix(4, 3, rng)), InvalidArgument);

    const TwoSampleData small(testing::gaussian_matrix(3, 8, rng), testing::gaussian_matrix(3, 8, rng));
    CHECK_THROWS_AS(all_block_statistics(small, BlockPartition::fixed(8, 4)), InsufficientSampleSize);
    CHECK_NOTHROW(all_block_statistics(small, BlockPartition::fixed(8, 3)));
    CHECK_THROWS_AS(hotelling_t2(small), DimensionTooLarge);

    Eigen::MatrixXd x = testing::gaussian_matrix(10, 8, rng);
    Eigen::MatrixXd y = testing::gaussian_matrix(10, 8, rng);
    x.col(5).setConstant(2.0);
    y.col(5).setConstant(2.0);
    try {
        all_block_statistics(TwoSampleData(x, y), BlockPartition::fixed(8, 2));
        FAIL("expected SingularBlockCovariance");
    } catch (const SingularBlockCovariance& e) {
        CHECK(e.block_index() == 2);
    }
    try {
        all_block_statistics(TwoSampleData(x, y), BlockPartition::fixed(8, 1));
        FAIL("expected SingularBlockCovariance");
    } catch (const SingularBlockCovariance& e) {
        CHECK(e.block_index() == 5);
    }
}

TEST_CASE("F upper tail")
{
    // P(F(2, m) > f) = (1 + 2 f / m)^(-m/2)
    for (double f : {0.1, 1.0, 3.5, 20.0}) {
        for (int m : {3, 10, 57}) CHECK(f_upper_tail(f, 2, m) == doctest::Approx(std::pow(1.0 + 2.0 * f / m, -m / 2.0)).epsilon(1e-12));
    }
    CHECK(f_upper_tail(0.0, 3, 4) == 1.0);
    CHECK(f_upper_tail(-1.0, 3, 4) == 1.0);
    CHECK_THROWS_AS(f_upper_tail(1.0, 0, 4), InvalidArgument);
}

TEST_CASE("Hotelling with one variable is the pooled two-sample t test")
{
    bilt::PhiloxStream rng(11, 0);
    const Eigen::MatrixXd x = testing::gaussian_matrix(7, 1, rng);
    const Eigen::MatrixXd y = testing::gaussian_matrix(10, 1, rng, 0.8);
    const auto h = hotelling_t2(TwoSampleData(x, y));
    const double mx = x.mean(), my = y.mean();
    const double ss = (x.array() - mx).square().sum() + (y.array() - my).square().sum();
    const double t = (mx - my) / std::sqrt(ss / 15.0 * (1.0 / 7 + 1.0 / 10));
    CHECK(h.t2 == doctest::Approx(t * t).epsilon(1e-12));
    CHECK(h.f_stat == doctest::Approx(t * t).epsilon(1e-12));
    CHECK(h.df1 == 1);
    CHECK(h.df2 == 15);
    const boost::math::students_t dist(15);
    CHECK(h.p_value == doctest::Approx(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))).epsilon(1e-10));
}

TEST_CASE("scaled Hotelling T^2 follows F(p, N-p-1) under the null")
{
    bilt::PhiloxStream rng(2718, 0);
    std::vector<double> f;
    for (int r = 0; r < 3000; ++r) {
        const TwoSampleData d(testing::gaussian_matrix(20, 5, rng), testing::gaussian_matrix(20, 5, rng));
        f.push_back(hotelling_t2(d).f_stat);
    }
    const boost::math::fisher_f dist(5, 34);
    // 3000 draws: the 99.9% KS critical value is about 0.036.
    CHECK(testing::ks_distance(f, [&](double v) { return boost::math::cdf(dist, v); }) < 0.036);
}
