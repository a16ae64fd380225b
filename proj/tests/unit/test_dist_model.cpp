#include <cmath>

#include <gtest/gtest.h>

#include "depfdr/dist_model.hpp"
#include "oracles.hpp"

using namespace depfdr;

namespace {
constexpr double kA = 1.0 / 98.0;

// Forward difference of f at 0 with Richardson extrapolation, O(h^2).
double forward_slope(const std::function<double(double)>& f, double h) {
  const double d1 = (f(h) - f(0.0)) / h;
  const double d2 = (f(h / 2) - f(0.0)) / (h / 2);
  return 2.0 * d2 - d1;
}
}  // namespace

TEST(ShiftedReciprocalFamily, DensityEndpoints) {
  EXPECT_NEAR(paper_family::density(0.0, kA), 100.0, 1e-10);
  EXPECT_NEAR(paper_family::density(1.0, kA), 0.0, 1e-15);
}

TEST(ShiftedReciprocalFamily, DensityMidpointMatchesDifferencedCdf) {
  const double g = paper_family::density(0.5, kA);
  EXPECT_NEAR(g, 0.0297, 1e-3);
  const double h = 1e-6;
  const double fd = (oracle::G_quadrature(0.5 + h, kA) - oracle::G_quadrature(0.5 - h, kA)) / (2 * h);
  EXPECT_NEAR(g, fd, 1e-6);
}

TEST(ShiftedReciprocalFamily, CdfMatchesQuadratureOnGrid) {
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    worst = std::max(worst, std::abs(paper_family::cdf(x, kA) - oracle::G_quadrature(x, kA)));
  }
  EXPECT_LE(worst, 1e-10);
  EXPECT_EQ(paper_family::cdf(0.0, 0.3), 0.0);
  EXPECT_NEAR(paper_family::cdf(1.0, kA), 1.0, 1e-15);
  EXPECT_NEAR(paper_family::cdf(0.0434782, kA), 0.826, 1e-3);
}

TEST(ShiftedReciprocalFamily, DerivativeConsistency) {
  const double h = 1e-6;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    const double fd = (paper_family::cdf(x + h, kA) - paper_family::cdf(x - h, kA)) / (2 * h);
    ASSERT_LE(std::abs(fd - paper_family::density(x, kA)), 1e-5) << "x=" << x;
  }
}

TEST(ShiftedReciprocalFamily, InverseIsRightInverseAndLeftInverse) {
  for (int i = 0; i <= 1000; ++i) {
    const double u = i / 1000.0;
    ASSERT_LE(std::abs(paper_family::cdf(paper_family::inverse(u, kA), kA) - u), 1e-10) << "u=" << u;
    const double x = i / 1000.0;
    ASSERT_LE(std::abs(paper_family::inverse(paper_family::cdf(x, kA), kA) - x), 1e-10) << "x=" << x;
  }
}

TEST(ShiftedReciprocalFamily, InverseKnownValues) {
  EXPECT_EQ(paper_family::inverse(0.0, kA), 0.0);
  EXPECT_EQ(paper_family::inverse(1.0, kA), 1.0);
  const double bisected = oracle::bisect_increasing([](double x) { return oracle::G_quadrature(x, kA) - 0.5; }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(paper_family::inverse(0.5, kA), bisected, 1e-10);
  EXPECT_NEAR(paper_family::inverse(0.5, kA), (51.0 - std::sqrt(2599.0)) / 2.0, 1e-12);
}

TEST(ShiftedReciprocalFamily, DomainErrors) {
  EXPECT_THROW(paper_family::density(-0.1, kA), std::domain_error);
  EXPECT_THROW(paper_family::density(1.1, kA), std::domain_error);
  EXPECT_THROW(paper_family::density(0.5, 0.0), std::domain_error);
  EXPECT_THROW(paper_family::cdf(0.5, -1.0), std::domain_error);
  EXPECT_THROW(paper_family::inverse(1.5, kA), std::domain_error);
  EXPECT_THROW(AlternativeDistribution::paper(0.0), std::domain_error);
}

TEST(PopulationModel, MixtureValues) {
  const auto pure = PopulationModel::paper_default(0.1, 1.0);
  EXPECT_DOUBLE_EQ(pure.mixture_cdf(0.5), 0.5);
  EXPECT_DOUBLE_EQ(pure.mixture_density(0.5), 1.0);
  const auto m = PopulationModel::paper_default();
  EXPECT_NEAR(m.mixture_density(0.0), 50.5, 1e-10);
  EXPECT_NEAR(m.mixture_density(0.0434782), 2.30, 5e-3);
  EXPECT_DOUBLE_EQ(m.null_mass(0.2), 0.1);
  EXPECT_NEAR(m.alternative_mass(0.2), 0.5 * paper_family::cdf(0.2, kA), 1e-15);
  EXPECT_EQ(m.mixture_cdf(0.0), 0.0);
  EXPECT_NEAR(m.mixture_cdf(1.0), 1.0, 1e-15);
}

TEST(PopulationModel, AlphaStar) {
  EXPECT_DOUBLE_EQ(PopulationModel::paper_default(0.1, 1.0).alpha_star(), 1.0);
  EXPECT_NEAR(PopulationModel::paper_default().alpha_star(), 2.0 / 101.0, 1e-15);
  EXPECT_NEAR(PopulationModel::paper_default(0.1, 0.9).alpha_star(), 1.0 / 10.9, 1e-15);
}

TEST(PopulationModel, AlphaStarDecreasesWithPi1) {
  double prev = 2.0;
  for (double pi1 = 0.0; pi1 <= 1.0; pi1 += 0.05) {
    const double s = PopulationModel::paper_default(0.1, 1.0 - pi1).alpha_star();
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(PopulationModel, NuRootBelowCriticalityIsZero) {
  const auto m = PopulationModel::paper_default(0.01);
  ASSERT_LT(m.alpha(), m.alpha_star());
  EXPECT_EQ(m.nu0(), 0.0);
  EXPECT_EQ(m.nu_root_scan(1.0), 0.0);
}

TEST(PopulationModel, NuRootsMatchBisectionOracle) {
  const auto m = PopulationModel::paper_default();
  const double nu0 = oracle::bisect_increasing([](double t) { return 19.0 * t - oracle::G_quadrature(t, kA); }, 1e-4, 1.0, 1e-13);
  const double nu_star = oracle::bisect_increasing([](double t) { return 9.0 * t - oracle::G_quadrature(t, kA); }, 1e-4, 1.0, 1e-13);
  EXPECT_NEAR(m.nu0(), nu0, 1e-10);
  EXPECT_NEAR(m.nu_star(), nu_star, 1e-10);
  EXPECT_NEAR(m.nu0(), 0.043478, 1e-6);
  EXPECT_NEAR(m.nu_star(), 0.103058, 1e-6);
  EXPECT_NEAR(m.nu_root_scan(1.0), m.nu0(), 1e-11);
  EXPECT_NEAR(m.nu_root_scan(0.5), m.nu_star(), 1e-11);
}

TEST(PopulationModel, NuRootIsTheSupremum) {
  for (double pi0 : {0.3, 0.5, 0.8, 0.95}) {
    for (double alpha : {0.05, 0.1, 0.2, 0.5}) {
      const auto m = PopulationModel::paper_default(alpha, pi0);
      for (double scale : {1.0, pi0}) {
        const double t = m.nu_root(scale);
        EXPECT_LE(t * scale / alpha, m.mixture_cdf(t) + 1e-12);
        if (t < 1.0 - 1e-6) {
          const double e = 1e-6;
          EXPECT_GT((t + e) * scale / alpha, m.mixture_cdf(t + e)) << "pi0=" << pi0 << " alpha=" << alpha;
        }
        EXPECT_NEAR(m.nu_root_scan(scale), t, 1e-10);
      }
    }
  }
}

TEST(PopulationModel, BoundaryScaleC0) {
  const auto m = PopulationModel::paper_default();
  EXPECT_NEAR(m.c0(), 9801.0 / (2.0 * std::sqrt(50.5)), 1e-9);
  EXPECT_NEAR(m.c0(), 689.6, 0.05);
  const double fd = forward_slope([&](double t) { return m.mixture_density(t); }, 1e-6);
  EXPECT_NEAR(fd / -9801.0, 1.0, 1e-4);
  EXPECT_THROW(PopulationModel::paper_default(0.1, 1.0).c0(), std::domain_error);
}

TEST(PopulationModel, BoundaryScaleMatchesFiniteDifferenceForOtherShape) {
  const double a = 1.0 / 9.0;
  const PopulationModel m{0.5, AlternativeDistribution::paper(a), 0.1};
  const double slope = forward_slope([&](double t) { return 0.5 + 0.5 * oracle::g(t, a); }, 1e-6);
  const double expected = -slope / (2.0 * std::sqrt(0.5 + 0.5 * oracle::g(0.0, a)));
  EXPECT_GT(m.c0(), 0.0);
  EXPECT_NEAR(m.c0() / expected, 1.0, 1e-4);
}

TEST(PopulationModel, SupercriticalChain) {
  const auto m = PopulationModel::paper_default();
  EXPECT_GT(1.0 / m.alpha_star(), 1.0 / m.alpha());
  EXPECT_GT(1.0 / m.alpha(), m.mixture_density(m.nu0()));
  EXPECT_NEAR(m.mixture_density(m.nu0()), 2.30, 5e-3);
  EXPECT_TRUE(m.supercritical_chain_holds());
  EXPECT_FALSE(PopulationModel::paper_default(0.01).supercritical_chain_holds());
}

TEST(PopulationModel, RejectsBadParameters) {
  EXPECT_THROW(PopulationModel::paper_default(0.0), std::domain_error);
  EXPECT_THROW(PopulationModel::paper_default(1.0), std::domain_error);
  EXPECT_THROW(PopulationModel::paper_default(0.1, 1.5), std::domain_error);
  EXPECT_THROW(PopulationModel::paper_default().nu_root(0.0), std::domain_error);
}

TEST(TabulatedAlternative, InterpolatesAndInverts) {
  const auto t = AlternativeDistribution::tabulated({0.0, 0.5, 1.0}, {0.0, 0.8, 1.0});
  EXPECT_DOUBLE_EQ(t.cdf(0.25), 0.4);
  EXPECT_DOUBLE_EQ(t.density(0.25), 1.6);
  EXPECT_DOUBLE_EQ(t.density(0.75), 0.4);
  EXPECT_DOUBLE_EQ(t.inverse(0.4), 0.25);
  EXPECT_DOUBLE_EQ(t.inverse(0.9), 0.75);
  EXPECT_THROW(AlternativeDistribution::tabulated({0.0, 1.0}, {0.0, 0.9}), std::invalid_argument);
  EXPECT_THROW(AlternativeDistribution::tabulated({0.0, 0.6, 0.5, 1.0}, {0.0, 0.1, 0.2, 1.0}), std::invalid_argument);
}

TEST(TabulatedAlternative, FineTableReproducesClosedFormRoot) {
  std::vector<double> knots, cdf;
  for (int i = 0; i <= 20000; ++i) {
    const double x = i / 20000.0;
    knots.push_back(x);
    cdf.push_back(i == 20000 ? 1.0 : paper_family::cdf(x, kA));
  }
  const PopulationModel table{0.5, AlternativeDistribution::tabulated(knots, cdf), 0.1};
  EXPECT_NEAR(table.nu0(), PopulationModel::paper_default().nu0(), 1e-5);
  EXPECT_NEAR(table.alpha_star(), 2.0 / 101.0, 1e-3);
}
