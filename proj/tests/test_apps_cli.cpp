#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "manipyr/apps.hpp"
#include "manipyr/error.hpp"
#include "manipyr/io.hpp"

using namespace manipyr;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("manipyr_test_" + name)).string();
}

ManifoldSequence short_so3_curve(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  ManifoldSequence c;
  c.scale = 3;
  Eigen::Matrix3d R = random_rotation(rng);
  std::normal_distribution<double> nd(0.0, 0.02);
  for (int i = 0; i < n; ++i) {
    c.points.push_back(ManifoldPoint::so3(R));
    R = R * so3_exp(Eigen::Vector3d(0.03 + nd(rng), nd(rng), nd(rng)));
  }
  return c;
}

}  // namespace

TEST(Generators, MorletShapeAndSymmetry) {
  const auto c = gen_morlet(6);
  ASSERT_EQ(c.size(), 641u);
  EXPECT_EQ(c.scale, 6);
  EXPECT_DOUBLE_EQ(c.values[320], 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c.values[i], c.values[640 - i], 1e-14);
}

TEST(Generators, NoiseIsSeededAndScaled) {
  const auto c = gen_morlet(8);
  EXPECT_EQ(add_noise(c, 0.0, 3).values, c.values);
  const auto a = add_noise(c, 0.01, 7);
  EXPECT_EQ(a.values, add_noise(c, 0.01, 7).values);
  EXPECT_NE(a.values, add_noise(c, 0.01, 8).values);
  const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
  const double sigma = 0.01 * (*hi - *lo);
  double ss = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) ss += (a.values[i] - c.values[i]) * (a.values[i] - c.values[i]);
  EXPECT_NEAR(std::sqrt(ss / c.size()), sigma, 0.1 * sigma);
}

TEST(Generators, So3CurveIsValidAndDeterministic) {
  const auto c = gen_so3_curve(5);
  ASSERT_EQ(c.size(), 641u);
  EXPECT_EQ(c.scale, 6);
  EXPECT_NO_THROW(validate(c));
  const auto d = gen_so3_curve(5);
  for (std::size_t i = 0; i < c.size(); i += 40) EXPECT_EQ(c.points[i].R, d.points[i].R);
}

TEST(Generators, ConeWrapEndpoints) {
  const auto so3 = gen_so3_curve(2);
  const ConeParams cone{1.5, 2.0, 3.0};
  const auto se3 = wrap_on_cone(so3, cone);
  ASSERT_EQ(se3.kind(), ManifoldKind::SE3);
  EXPECT_NEAR((se3.points.front().x - Eigen::Vector3d(1.5, 0.0, 0.0)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((se3.points.back().x - Eigen::Vector3d(0.0, 0.0, 2.0)).norm(), 0.0, 1e-14);
  EXPECT_EQ(se3.points[17].R, so3.points[17].R);
  EXPECT_THROW(wrap_on_cone(se3, cone), TagMismatch);
}

TEST(Config, DefaultsValidateAndBadFieldsAreNamed) {
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  ExperimentConfig bad;
  bad.xi = -0.1;
  try {
    bad.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("xi"), std::string::npos);
  }
  ExperimentConfig mode;
  mode.mode = "sideways";
  EXPECT_THROW(mode.validate(), ValidationError);
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  ExperimentConfig cfg;
  cfg.xi = 1.4;
  cfg.seed = 99;
  cfg.cone.nu = 2.5;
  const auto back = io::config_from_json(io::to_json(cfg));
  EXPECT_EQ(back.xi, 1.4);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.cone.nu, 2.5);
  auto j = io::to_json(cfg);
  j["colour"] = "blue";
  EXPECT_THROW(io::config_from_json(j), ValidationError);
}

TEST(Io, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(io::format_double(v)), v);
  EXPECT_EQ(io::number(INFINITY).get<std::string>(), "inf");
  EXPECT_TRUE(std::isinf(io::to_double(json("inf"), "x")));
  EXPECT_THROW(io::to_double(json("seven"), "x"), ValidationError);
}

TEST(Io, KernelJsonIsVerifiedOnLoad) {
  const auto pair = pseudo_reverse_mask(least_squares_mask(), 0.64);
  const auto j = io::to_json(pair.kernel);
  const auto k = io::kernel_from_json(j);
  ASSERT_EQ(k.gamma.min_index(), pair.kernel.gamma.min_index());
  EXPECT_TRUE(std::ranges::equal(k.gamma.coeffs(), pair.kernel.gamma.coeffs()));
  auto broken = j;
  broken["coeffs"][3] = broken["coeffs"][3].get<double>() + 1e-3;
  EXPECT_THROW(io::kernel_from_json(broken), ValidationError);
}

TEST(Io, SequenceCsvRoundTripAndLineTaggedErrors) {
  const auto c = add_noise(gen_morlet(3), 0.05, 4);
  const auto back = io::sequence_from_csv(io::sequence_to_csv(c), 3);
  EXPECT_EQ(back.values, c.values);
  try {
    io::sequence_from_csv("index,value\n0,1.0\n1,abc\n", 0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Io, LinearPyramidJsonRoundTrip) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto pyr = analyze(pair.mask, pair.kernel, gen_morlet(5), 3);
  const auto j = io::to_json(pyr, cfg);
  EXPECT_TRUE(j.contains("config"));
  const auto back = io::linear_pyramid_from_json(j);
  EXPECT_EQ(back.coarse.values, pyr.coarse.values);
  ASSERT_EQ(back.details.size(), pyr.details.size());
  for (std::size_t l = 0; l < pyr.details.size(); ++l) EXPECT_EQ(back.details[l].values, pyr.details[l].values);
  EXPECT_EQ(synthesize(pair.mask, back).values, synthesize(pair.mask, pyr).values);
}

TEST(Io, CurveJsonReportsOffendingIndex) {
  auto j = io::to_json(short_so3_curve(9, 3));
  const auto back = io::curve_from_json(j);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back.points[i].R, short_so3_curve(9, 3).points[i].R);
  j["points"][5][0] = 3.0;
  try {
    io::curve_from_json(j);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("[5]"), std::string::npos) << e.what();
  }
}

TEST(Io, ManifoldPyramidJsonRoundTrip) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto c = wrap_on_cone(short_so3_curve(33, 8));
  const auto pyr = m_analyze(pair.mask, pair.kernel, c, 2);
  const auto back = io::manifold_pyramid_from_json(io::to_json(pyr, cfg));
  const auto a = m_synthesize(pair.mask, pyr);
  const auto b = m_synthesize(pair.mask, back);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(distance(a.points[i], b.points[i]), 1e-12);
}

TEST(Io, AtomicWriteReplacesWholeFile) {
  const auto path = temp_path("atomic.txt");
  io::write_file_atomic(path, std::string(10000, 'a'));
  io::write_file_atomic(path, "short\n");
  EXPECT_EQ(io::read_file(path), "short\n");
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::temp_directory_path()))
    EXPECT_EQ(e.path().filename().string().find("manipyr_test_atomic.txt."), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_THROW(io::write_file_atomic("/nonexistent-dir/x.json", "{}"), Error);
}

TEST(Compress, FullFractionIsLossless) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto c = short_so3_curve(65, 2);
  const auto pyr = m_analyze(pair.mask, pair.kernel, c, 3);
  const auto res = compress(pair.mask, pyr, 1.0, &c);
  EXPECT_EQ(res.report.stored_detail_count, res.report.total_detail_count);
  EXPECT_LE(res.report.max_error, 1e-8);
}

TEST(Compress, OnePercentOfSe3CurveKeepsTwelve) {
  ExperimentConfig cfg;
  const auto c = wrap_on_cone(gen_so3_curve(cfg.seed));
  const auto pair = make_pair(cfg);
  const auto pyr = m_analyze(pair.mask, pair.kernel, c, 4);
  const auto res = compress(pair.mask, pyr, 0.01, &c);
  EXPECT_EQ(res.report.original_count, 641u);
  EXPECT_EQ(res.report.stored_coarse_count, 41u);
  EXPECT_EQ(res.report.total_detail_count, 641u + 321u + 161u + 81u);
  EXPECT_EQ(res.report.stored_detail_count, 12u);
  ASSERT_EQ(res.report.errors.size(), 641u);
  for (double e : res.report.errors) EXPECT_TRUE(std::isfinite(e));
  const auto zero = compress(pair.mask, pyr, 0.0, &c);
  EXPECT_EQ(zero.report.stored_detail_count, 0u);
  EXPECT_GE(zero.report.max_error, res.report.max_error);
}

TEST(Enhance, IdentityWhenGainOrFractionVanish) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto c = short_so3_curve(65, 5);
  const auto pyr = m_analyze(pair.mask, pair.kernel, c, 3);
  for (auto [f, g] : {std::pair{0.0, 0.4}, std::pair{0.2, 0.0}}) {
    const auto res = enhance(pyr, f, g);
    for (std::size_t l = 0; l < pyr.details.size(); ++l)
      for (std::size_t i = 0; i < pyr.details[l].size(); ++i)
        EXPECT_EQ(res.pyramid.details[l][i].S, pyr.details[l][i].S);
  }
}

TEST(Enhance, ChangesStayInsideTheInfluenceOfScaledDetails) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto c = short_so3_curve(129, 6);
  const auto pyr = m_analyze(pair.mask, pair.kernel, c, 3);
  const auto res = enhance(pyr, 0.05, 0.4);
  const auto out = m_synthesize(pair.mask, res.pyramid);
  const auto base = m_synthesize(pair.mask, pyr);
  const auto reach = influenced_indices(pair.mask, res.scaled);
  ASSERT_EQ(reach.size(), c.size());
  std::size_t untouched = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (reach[i]) continue;
    ++untouched;
    EXPECT_LE(distance(out.points[i], base.points[i]), 1e-12) << i;
  }
  EXPECT_GT(untouched, 0u);
}

TEST(Enhance, RejectsDetailsBeyondInjectivityRadius) {
  ManifoldPyramid pyr;
  pyr.coarse.points = {ManifoldPoint::so3(Eigen::Matrix3d::Identity())};
  TangentVector big = TangentVector::zero(pyr.coarse.points[0]);
  big.S = hat(Eigen::Vector3d(0.0, 0.0, 3.0));
  pyr.details = {{big}};
  EXPECT_THROW(enhance(pyr, 1.0, 0.1), OutOfInjectivityRadius);
}

TEST(Tables, BsplineKappaTable) {
  const std::string csv = run_table(2);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "order,kappa");
  const double expect[] = {2, 2, 4, 4, 8, 8};
  for (int i = 0; i < 6; ++i) {
    ASSERT_TRUE(std::getline(in, line));
    const auto comma = line.find(',');
    EXPECT_EQ(std::stoi(line.substr(0, comma)), i + 2);
    EXPECT_NEAR(std::stod(line.substr(comma + 1)), expect[i], 1e-6);
  }
  EXPECT_THROW(run_table(9), ValidationError);
}

TEST(Tables, LeastSquaresKappaDecreasesWithXi) {
  std::istringstream in(run_table(1));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "xi,kappa,mask_perturbation_l1");
  double prev_kappa = INFINITY, prev_pert = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string xi, kappa, pert;
    std::getline(ss, xi, ',');
    std::getline(ss, kappa, ',');
    std::getline(ss, pert, ',');
    const double k = kappa == "inf" ? INFINITY : std::stod(kappa);
    EXPECT_TRUE(k < prev_kappa || (rows == 0 && std::isinf(k)));
    EXPECT_GT(std::stod(pert), prev_pert);
    prev_kappa = k;
    prev_pert = std::stod(pert);
    ++rows;
  }
  EXPECT_EQ(rows, 13);
}

TEST(LayerStats, So3ExperimentEvenDetailsBelowOdd) {
  ExperimentConfig cfg;
  const auto pair = make_pair(cfg);
  const auto pyr = m_analyze(pair.mask, pair.kernel, gen_so3_curve(cfg.seed), cfg.layers);
  const auto stats = layer_stats(pair.mask, pyr, interior_margin(pair.mask, pair.kernel));
  ASSERT_EQ(stats.size(), 4u);
  EXPECT_GT(stats.back().odd_max_norm, 0.0);
  EXPECT_LE(stats.back().even_max_norm, stats.back().odd_max_norm);
}
