#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "gelgrip/core/error.hpp"
#include "gelgrip/force/hhd.hpp"
#include "gelgrip/force/interpolate.hpp"
#include "gelgrip/sim/fruit.hpp"
#include "gelgrip/sim/sequences.hpp"
#include "gelgrip/sim/tactile.hpp"

using namespace gelgrip;
using namespace gelgrip::sim;

namespace {

ContactMask mask_of(const HeightMap& h, double t = 0.3) {
  return ContactMask(h.values().array() > t, t);
}

double slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sx += i;
    sy += y[i];
    sxx += double(i) * i;
    sxy += i * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("indent_heightmap") {
  const GelModel gel;
  const double s = gel.px_per_mm();
  SUBCASE("zero depth gives a flat map") {
    CHECK(indent_heightmap(Sphere{}, {15, 15}, 0.0, gel).values().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("sphere cap matches the analytic penetration pixel by pixel") {
    const double r = 5.0, d = 1.0;
    const Vec2 c{14.3, 15.6};
    const HeightMap h = indent_heightmap(Sphere{r}, c, d, gel);
    double worst = 0.0, patch = 0.0;
    for (int y = 0; y < h.height(); ++y) {
      for (int x = 0; x < h.width(); ++x) {
        const double rho2 = std::pow(x / s - c.x, 2) + std::pow(y / s - c.y, 2);
        const double truth = rho2 < r * r ? std::max(0.0, std::sqrt(r * r - rho2) - (r - d)) : 0.0;
        worst = std::max(worst, std::abs(h.at(y, x) - truth));
        if (h.at(y, x) > 0.0) patch = std::max(patch, std::sqrt(rho2));
      }
    }
    CHECK(worst < 1e-12);
    CHECK(patch <= 3.0);
    CHECK(patch > 3.0 - 1.0 / s);
    CHECK(h.max() == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("hex pyramid at full depth has a hexagonal footprint and a 2 mm apex") {
    const HexPyramid p;
    const HeightMap h = indent_heightmap(p, {15, 15}, p.height_mm, gel);
    CHECK(h.max() == doctest::Approx(2.0).epsilon(0.03));
    const double area = (h.values().array() > 0.0).count() / (s * s);
    const double hex = 1.5 * std::sqrt(3.0) * 25.0;  // regular hexagon, circumradius 5
    CHECK(area == doctest::Approx(hex).epsilon(0.05));
  }
  SUBCASE("too deep or off the pad is an error") {
    CHECK_THROWS_AS(indent_heightmap(HexPyramid{}, {15, 15}, 2.5, gel), Error);
    CHECK_THROWS_AS(indent_heightmap(Sphere{}, {-1, 15}, 1.0, gel), Error);
  }
}

TEST_CASE("press") {
  const GelModel gel;
  const double s = gel.px_per_mm();
  SUBCASE("zero stays zero") {
    const HeightMap z = HeightMap::zeros(gel.frame_px, gel.frame_px, s);
    CHECK(press(z, gel).values().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("never raises the peak") {
    for (double d : {0.3, 1.0, 2.0}) {
      const HeightMap raw = indent_heightmap(HexPyramid{}, {15, 15}, d, gel);
      CHECK(press(raw, gel).max() <= raw.max());
    }
  }
  SUBCASE("a spike becomes a Gaussian of the membrane width") {
    Grid g = Grid::Zero(gel.frame_px, gel.frame_px);
    g(64, 64) = 1.0;
    const HeightMap b = press(HeightMap(g, s), gel);
    double m0 = 0, mxx = 0, myy = 0;
    for (int y = 0; y < b.height(); ++y) {
      for (int x = 0; x < b.width(); ++x) {
        m0 += b.at(y, x);
        mxx += b.at(y, x) * (x - 64) * (x - 64);
        myy += b.at(y, x) * (y - 64) * (y - 64);
      }
    }
    const double sigma_px = gel.membrane_sigma_mm * s;
    CHECK(mxx / m0 == doctest::Approx(sigma_px * sigma_px).epsilon(0.03));
    CHECK(myy / m0 == doctest::Approx(sigma_px * sigma_px).epsilon(0.03));
  }
  SUBCASE("vanishing width returns the input") {
    GelModel thin = gel;
    thin.membrane_sigma_mm = 1e-6;
    const HeightMap raw = indent_heightmap(Sphere{}, {15, 15}, 1.0, thin);
    CHECK((press(raw, thin).values() - raw.values()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("render_tactile") {
  const GelModel gel;
  const LightRig rig = LightRig::standard();
  SUBCASE("flat pad is background plus flat shading") {
    const TactileFrame f = render_tactile(HeightMap::zeros(128, 128, gel.px_per_mm()), rig, gel);
    for (int c = 0; c < 3; ++c) {
      const double expect = gel.background[c] + 0.5 * rig.lights[c].direction.z();
      CHECK(f.pixels().channel(c).maxCoeff() == doctest::Approx(expect));
      CHECK(f.pixels().channel(c).minCoeff() == doctest::Approx(expect));
    }
  }
  SUBCASE("is bit-for-bit deterministic") {
    const HeightMap h = press(indent_heightmap(Sphere{}, {12, 17}, 0.8, gel), gel);
    const TactileFrame a = render_tactile(h, rig, gel), b = render_tactile(h, rig, gel);
    for (int c = 0; c < 3; ++c) CHECK((a.pixels().channel(c).array() == b.pixels().channel(c).array()).all());
  }
  SUBCASE("rotating lights and surface together rotates the image") {
    const HeightMap h = press(indent_heightmap(Sphere{}, {11, 17}, 1.0, gel), gel);
    const int n = h.width();
    Grid rot(n, n);
    // quarter turn about the frame centre: (x, y) -> (n-1-y, x)
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) rot(x, n - 1 - y) = h.at(y, x);
    }
    const TactileFrame a = render_tactile(h, rig, gel);
    const TactileFrame b = render_tactile(HeightMap(rot, h.px_per_mm()), rig.rotated(std::numbers::pi / 2), gel);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) worst = std::max(worst, std::abs(b.at(x, n - 1 - y, c) - a.at(y, x, c)));
      }
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("deform_markers") {
  const GelModel gel;
  const MarkerSet rest = gel.rest_markers();
  const HeightMap h = indent_heightmap(Sphere{}, {15, 15}, 1.0, gel);
  const ContactMask mask = mask_of(h);
  const auto grid = GridGeometry::covering(128, 128, 32, 32);

  SUBCASE("zero shear leaves markers at rest") {
    const MarkerSet m = deform_markers(rest, mask, {0, 0}, ShearMode::kTranslation, gel);
    for (const Marker& k : m.markers()) {
      CHECK(k.x == rest.find(k.id)->x);
      CHECK(k.y == rest.find(k.id)->y);
    }
  }
  SUBCASE("translation moves in-contact markers by the shear") {
    const MarkerSet m = deform_markers(rest, mask, {1, 0}, ShearMode::kTranslation, gel);
    const ContactDisc disc = equivalent_disc(mask);
    int inside = 0;
    for (const Marker& k : rest.markers()) {
      if ((Vec2{k.x, k.y} - disc.center).norm() >= disc.radius) continue;
      ++inside;
      CHECK(m.find(k.id)->x - k.x == doctest::Approx(gel.px_per_mm()).epsilon(1e-9));
      CHECK(m.find(k.id)->y - k.y == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(inside > 0);
  }
  SUBCASE("translation is curl-poor and rotation divergence-poor") {
    auto integrals = [&](ShearMode mode) {
      const auto f = force::interpolate_markers(rest, deform_markers(rest, mask, {1, 0}, mode, gel), grid);
      return std::pair{force::divergence(f).cwiseAbs().sum(), force::curl(f).cwiseAbs().sum()};
    };
    const auto [div_t, curl_t] = integrals(ShearMode::kTranslation);
    const auto [div_r, curl_r] = integrals(ShearMode::kRotation);
    CHECK(curl_t < 0.1 * div_t);
    CHECK(div_r < 0.05 * curl_r);
  }
  SUBCASE("decomposed energies split by mode") {
    auto energies = [&](ShearMode mode) {
      const auto f = force::interpolate_markers(rest, deform_markers(rest, mask, {1, 0}, mode, gel), grid);
      const auto r = force::hhd_decompose(f);
      auto e = [](const DisplacementField& d) { return d.u.squaredNorm() + d.v.squaredNorm(); };
      return std::array{e(r.p), e(r.s), e(r.h)};
    };
    const auto t = energies(ShearMode::kTranslation);
    const auto r = energies(ShearMode::kRotation);
    CHECK(t[1] < 0.05 * (t[0] + t[2]));
    CHECK(r[0] < 0.05 * (r[1] + r[2]));
  }
  SUBCASE("shear of a quarter pad or more is rejected") {
    CHECK_THROWS_AS(deform_markers(rest, mask, {7.5, 0}, ShearMode::kTranslation, gel), Error);
  }
}

TEST_CASE("synth_slip_sequence") {
  const GelModel gel = GelModel{}.with_frame_px(64);
  const LightRig rig = LightRig::standard();
  auto run = [&](double load, std::uint64_t seed) {
    GraspScene scene;
    scene.load_g = load;
    scene.opening_mm = scene.fruit.diameter_mm - 2.0;
    Rng rng(seed);
    return synth_slip_sequence(scene, 120, gel, rig, {}, rng);
  };
  SUBCASE("no load never slips") {
    const SlipSequence s = run(0.0, 1);
    CHECK(s.slip_onset == -1);
    for (bool b : s.slip_truth) CHECK_FALSE(b);
  }
  SUBCASE("heavier loads slip sooner") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const SlipSequence light = run(10.0, seed), heavy = run(50.0, seed);
      REQUIRE(light.slip_onset > 0);
      CHECK(heavy.slip_onset < light.slip_onset);
    }
  }
  SUBCASE("labels follow the relative-speed rule") {
    const SlipSequence s = run(20.0, 4);
    REQUIRE(s.relative_speed.size() == s.slip_truth.size());
    for (std::size_t i = 0; i < s.slip_truth.size(); ++i) {
      CHECK(s.slip_truth[i] == (s.relative_speed[i] > SlipDynamics{}.slip_threshold_px));
    }
  }
  SUBCASE("phases run static, incipient, full slip") {
    const SlipSequence s = run(20.0, 5);
    CHECK(s.incipient_onset > 0);
    CHECK(s.slip_onset > s.incipient_onset);
    CHECK(s.phase[s.incipient_onset - 1] == SlipPhase::kStatic);
    CHECK(s.phase[s.slip_onset] == SlipPhase::kFullSlip);
  }
  SUBCASE("fewer than 10 frames is an error") {
    GraspScene scene;
    scene.opening_mm = 26.0;
    Rng rng(1);
    CHECK_THROWS_AS(synth_slip_sequence(scene, 9, gel, rig, {}, rng), Error);
  }
}

TEST_CASE("grasp scene limits the opening") {
  GraspScene scene;
  scene.opening_mm = 41.0;
  CHECK_THROWS_AS(scene.validate(), Error);
  scene.opening_mm = 26.3;
  CHECK_NOTHROW(scene.validate());
}

TEST_CASE("synth_compression_clip") {
  const GelModel gel = GelModel{}.with_frame_px(48);
  const LightRig rig = LightRig::standard();
  CompressionParams p;
  SUBCASE("equal hardness gives equal current slopes within the noise") {
    Rng rng(7);
    const auto a = synth_compression_clip(silicone_replica(FruitType::kCherryTomato, 51.4), 20, gel, rig, p, rng);
    const auto b = synth_compression_clip(silicone_replica(FruitType::kCherryTomato, 51.4), 20, gel, rig, p, rng);
    CHECK(std::abs(slope(a.current) - slope(b.current)) < p.current_noise);
  }
  SUBCASE("harder replicas raise the current faster") {
    Rng rng(8);
    const auto hard = synth_compression_clip(silicone_replica(FruitType::kStrawberry, 68.4), 20, gel, rig, p, rng);
    const auto soft = synth_compression_clip(silicone_replica(FruitType::kStrawberry, 42.2), 20, gel, rig, p, rng);
    CHECK(slope(hard.current) > slope(soft.current));
    CHECK(slope(hard.force) > slope(soft.force));
  }
  SUBCASE("no closing leaves the background") {
    p.closing_mm = 0.0;
    p.pixel_noise = 0.0;
    Rng rng(9);
    const auto c = synth_compression_clip(silicone_replica(FruitType::kRaspberry, 64.8), 6, gel, rig, p, rng);
    for (const auto& f : c.frames) {
      for (int ch = 0; ch < 3; ++ch) {
        CHECK((f.pixels().channel(ch) - c.background.pixels().channel(ch)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("fruit models") {
  CHECK(fruit_type_from_string("cherry_tomato") == FruitType::kCherryTomato);
  CHECK_THROWS_AS(fruit_type_from_string("banana"), Error);
  FruitModel f;
  f.detachment_force_n = 2.0;
  f.bruise_force_n = 1.0;
  CHECK_FALSE(f.harvestable());
  CHECK(replica_stiffness(68.4) > replica_stiffness(42.2));
}
