#include <doctest.h>

#include <cmath>

#include "gelgrip/core/error.hpp"
#include "gelgrip/core/random.hpp"
#include "gelgrip/sim/sequences.hpp"
#include "gelgrip/sim/tactile.hpp"
#include "gelgrip/slip/slip.hpp"

using namespace gelgrip;
using namespace gelgrip::slip;

namespace {

ContactMask disc(int n, Vec2 c, double r) {
  BoolGrid m(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) m(y, x) = std::hypot(x - c.x, y - c.y) <= r;
  }
  return ContactMask(m, 0.3);
}

MarkerSet lattice(Vec2 offset) {
  std::vector<Marker> m;
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) m.push_back({r * 12 + c, 4.0 + 8.0 * c + offset.x, 4.0 + 8.0 * r + offset.y});
  }
  return MarkerSet(m, 12, 12);
}

// Object moves by `obj` px per frame, markers by `mk` px per frame.
void moving_scene(int frames, Vec2 obj, Vec2 mk, std::vector<ContactMask>& masks,
                  std::vector<MarkerSet>& tracks) {
  for (int i = 0; i < frames; ++i) {
    masks.push_back(disc(200, Vec2{30, 40} + obj * i, 12));
    tracks.push_back(lattice(mk * i));
  }
}

sim::SlipSequence slip_run(double load, std::uint64_t seed) {
  sim::GraspScene scene;
  scene.load_g = load;
  scene.opening_mm = scene.fruit.diameter_mm - 2.0;
  Rng rng(seed);
  return sim::synth_slip_sequence(scene, 120, sim::GelModel{}, sim::LightRig::standard(), {}, rng);
}

std::vector<ContactMask> truth_masks(const sim::SlipSequence& s) {
  std::vector<ContactMask> m;
  for (const auto& h : s.heights) m.push_back(segment_contact(h, 0.3));
  return m;
}

}  // namespace

TEST_CASE("segment_contact") {
  const sim::GelModel gel;
  SUBCASE("flat map has no contact") {
    CHECK(segment_contact(HeightMap::zeros(64, 64, 2.0), 0.3).empty());
  }
  SUBCASE("a sphere cap thresholded at half its depth is a disc of the analytic radius") {
    const double r = 5.0;
    const HeightMap h = sim::indent_heightmap(sim::Sphere{r}, {15, 15}, 1.0, gel);
    const ContactMask m = segment_contact(h, 0.5);
    const double expect = std::sqrt(2 * r * 0.5 - 0.25) * gel.px_per_mm();
    const double measured = std::sqrt(m.count() / M_PI);
    CHECK(std::abs(measured - expect) <= 1.0);
  }
  SUBCASE("threshold above the peak gives nothing") {
    const HeightMap h = sim::indent_heightmap(sim::Sphere{5.0}, {15, 15}, 1.0, gel);
    CHECK(segment_contact(h, 1.01).empty());
  }
  SUBCASE("non-positive thresholds are rejected") {
    CHECK_THROWS_AS(segment_contact(HeightMap::zeros(8, 8, 1.0), 0.0), Error);
  }
}

TEST_CASE("velocities") {
  std::vector<ContactMask> masks;
  std::vector<MarkerSet> tracks;
  SUBCASE("static scene") {
    moving_scene(6, {0, 0}, {0, 0}, masks, tracks);
    for (const Vec2& v : object_velocity(masks)) CHECK(v.norm() == 0.0);
    for (const Vec2& v : marker_velocity(tracks, masks)) CHECK(v.norm() == 0.0);
  }
  SUBCASE("constant motion is exact with and without smoothing") {
    moving_scene(8, {3, 0}, {3, 0}, masks, tracks);
    for (bool smooth : {true, false}) {
      const auto ov = object_velocity(masks, smooth);
      const auto mv = marker_velocity(tracks, masks, smooth);
      REQUIRE(ov.size() == 7);
      for (std::size_t i = 0; i < ov.size(); ++i) {
        CHECK(ov[i].x == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(std::abs(ov[i].y) < 1e-12);
        CHECK(mv[i].x == doctest::Approx(ov[i].x).epsilon(1e-12));
      }
    }
  }
  SUBCASE("smoothing averages neighbouring transitions") {
    const auto s = smooth_velocities({{0, 0}, {3, 0}, {6, 0}});
    CHECK(s[0].x == doctest::Approx(1.5));
    CHECK(s[1].x == doctest::Approx(3.0));
    CHECK(s[2].x == doctest::Approx(4.5));
  }
  SUBCASE("empty masks are rejected") {
    masks.push_back(disc(32, {10, 10}, 3));
    masks.push_back(ContactMask(BoolGrid::Constant(32, 32, false), 0.3));
    CHECK_THROWS_AS(object_velocity(masks), Error);
  }
  SUBCASE("the contact centroid follows the simulated object") {
    const auto s = slip_run(20.0, 3);
    const auto masks_t = truth_masks(s);
    const auto ov = object_velocity(masks_t, false);
    int checked = 0;
    for (std::size_t i = 0; i + 1 < s.object_px.size(); ++i) {
      // skip transitions where the contact runs into the pad edge
      if (s.object_px[i + 1].y > 100.0) continue;
      const Vec2 truth = s.object_px[i + 1] - s.object_px[i];
      CHECK((ov[i] - truth).norm() <= 1.0);
      ++checked;
    }
    CHECK(checked > 20);
  }
  SUBCASE("markers lag the object once it slides") {
    const auto s = slip_run(50.0, 4);
    const auto masks_t = truth_masks(s);
    const auto ov = object_velocity(masks_t, false);
    const auto mv = marker_velocity(s.markers, masks_t, false);
    int lagging = 0, full = 0;
    for (std::size_t i = 0; i < ov.size(); ++i) {
      if (s.phase[i] != sim::SlipPhase::kFullSlip || s.phase[i + 1] != sim::SlipPhase::kFullSlip) continue;
      ++full;
      if (mv[i].norm() < ov[i].norm()) ++lagging;
    }
    REQUIRE(full > 0);
    CHECK(lagging == full);
  }
}

TEST_CASE("detect_slip") {
  CHECK_FALSE(detect_slip({4, 4}, {4, 4}));
  CHECK(detect_slip({12, 0}, {0, 0}));
  CHECK_FALSE(detect_slip({10, 0}, {0, 0}));
  CHECK(detect_slip({10.000001, 0}, {0, 0}));
  CHECK_FALSE(detect_slip({6, 8}, {0, 0}));

  Rng rng(17);
  for (int k = 0; k < 500; ++k) {
    const Vec2 a{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const Vec2 b{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const double t = uniform(rng, 0.0, 30.0);
    CHECK(detect_slip(a, b, t) == detect_slip(a * -1.0, b * -1.0, t));
    if (!detect_slip(a, b, t)) CHECK_FALSE(detect_slip(a, b, t + uniform(rng, 0.0, 10.0)));
    CHECK_FALSE(detect_slip(a, a, t));
  }
}

TEST_CASE("detect_sequence") {
  std::vector<ContactMask> masks;
  std::vector<MarkerSet> tracks;
  SUBCASE("markers riding with the contact never slip") {
    moving_scene(10, {8, 1}, {8, 1}, masks, tracks);
    for (const auto& f : detect_sequence(masks, tracks, 0.5)) CHECK_FALSE(f.slip);
  }
  SUBCASE("a contact outrunning stuck markers slips") {
    moving_scene(6, {12, 0}, {0, 0}, masks, tracks);
    const auto r = detect_sequence(masks, tracks);
    for (const auto& f : r) {
      CHECK(f.slip);
      CHECK(f.speed_difference == doctest::Approx(12.0));
    }
    for (const auto& f : detect_sequence(masks, tracks, 1e9)) CHECK_FALSE(f.slip);
  }
}

TEST_CASE("evaluate_slip_detector") {
  const std::vector<std::vector<bool>> truth{{false, false, true, true}, {false, true, true}};
  SUBCASE("perfect predictions") {
    const auto s = evaluate_slip_detector(truth, truth, 10.0);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    REQUIRE(s.mean_lead_time_s);
    CHECK(*s.mean_lead_time_s == doctest::Approx(0.0));
  }
  SUBCASE("all negative") {
    const std::vector<std::vector<bool>> none{{false, false, false, false}, {false, false, false}};
    const auto s = evaluate_slip_detector(none, truth, 10.0);
    CHECK(s.recall == 0.0);
    CHECK(s.precision == 1.0);
    CHECK(s.f1 == 0.0);
    CHECK_FALSE(s.mean_lead_time_s);
  }
  SUBCASE("early detection counts as lead time") {
    const std::vector<std::vector<bool>> early{{false, true, true, true}, {false, true, true}};
    const auto s = evaluate_slip_detector(early, truth, 10.0);
    CHECK(s.false_positives == 1);
    CHECK(s.precision == doctest::Approx(0.8));
    CHECK(*s.mean_lead_time_s == doctest::Approx(0.05));
  }
  SUBCASE("misaligned series are rejected") {
    CHECK_THROWS_AS(evaluate_slip_detector({{true}}, truth, 10.0), Error);
  }
}

TEST_CASE("SlipMonitor matches the batch detector") {
  std::vector<ContactMask> masks;
  std::vector<MarkerSet> tracks;
  for (int i = 0; i < 12; ++i) {
    const double x = i < 6 ? 2.0 * i : 10.0 + 14.0 * (i - 5);
    masks.push_back(disc(160, {20 + x, 50}, 12));
    tracks.push_back(lattice({i < 6 ? x : 10.0, 0}));
  }
  const auto batch = detect_sequence(masks, tracks);
  SlipMonitor mon;
  std::vector<SlipFrame> stream;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (auto f = mon.push(masks[i], tracks[i])) stream.push_back(*f);
  }
  REQUIRE(stream.size() + 1 == batch.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    CHECK(stream[i].slip == batch[i].slip);
    CHECK(stream[i].speed_difference == doctest::Approx(batch[i].speed_difference));
  }
  SUBCASE("a frame without contact resets it") {
    CHECK_FALSE(mon.push(ContactMask(BoolGrid::Constant(160, 160, false), 0.3), tracks[0]));
    CHECK_FALSE(mon.push(masks[0], tracks[0]));
  }
}

TEST_CASE("benchmark on simulated truth geometry") {
  std::vector<std::vector<bool>> pred, truth;
  for (double load : {10.0, 20.0, 50.0}) {
    for (std::uint64_t rep = 0; rep < 2; ++rep) {
      const auto s = slip_run(load, 40 + rep);
      std::vector<bool> p;
      for (const auto& f : detect_sequence(truth_masks(s), s.markers)) p.push_back(f.slip);
      pred.push_back(p);
      truth.push_back(s.slip_truth);
    }
  }
  CHECK(evaluate_slip_detector(pred, truth, 30.0).f1 >= 0.69);
}
