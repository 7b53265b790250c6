#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gelgrip/core/error.hpp"
#include "gelgrip/core/image_ops.hpp"
#include "gelgrip/geometry/calibration.hpp"
#include "gelgrip/geometry/integrate.hpp"
#include "gelgrip/geometry/reconstruction.hpp"
#include "gelgrip/geometry/rgb2normal.hpp"
#include "gelgrip/sim/tactile.hpp"

using namespace gelgrip;
using namespace gelgrip::geometry;

namespace {

struct Press {
  HeightMap height;
  CalibrationPress press;
};

Press sphere_press(const sim::GelModel& gel, const sim::LightRig& rig, Rng& rng, double noise) {
  const double r = 5.0;
  const double depth = uniform(rng, 0.5, 1.2);
  const Vec2 c{uniform(rng, 8.0, 22.0), uniform(rng, 8.0, 22.0)};
  const HeightMap h = sim::press(sim::indent_heightmap(sim::Sphere{r}, c, depth, gel), gel);
  const TactileFrame f = sim::add_pixel_noise(sim::render_tactile(h, rig, gel), noise, rng);
  const double contact = std::sqrt(2 * r * depth - depth * depth) * gel.px_per_mm();
  return {h, {diff_image(f, sim::render_background(rig, gel)), c * gel.px_per_mm(), contact, r}};
}

// One calibrated model shared by the slower cases.
const Rgb2NormalModel& trained_model() {
  static const Rgb2NormalModel model = [] {
    const sim::GelModel gel;
    const sim::LightRig rig = sim::LightRig::standard();
    Rng rng(21);
    std::vector<CalibrationPress> presses;
    for (int i = 0; i < 10; ++i) presses.push_back(sphere_press(gel, rig, rng, 0.004).press);
    FitOptions o;
    o.seed = 3;
    return fit_rgb2normal(build_calibration_dataset(presses), o).model;
  }();
  return model;
}

NormalMap cap_normals(int n, double s, Vec2 c_px, double r, double depth) {
  Grid nx(n, n), ny(n, n), nz(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Vec2 q{(x - c_px.x) / s, (y - c_px.y) / s};
      const double rho = q.norm();
      const double rim = std::sqrt(2 * r * depth - depth * depth);
      Eigen::Vector3d v(0, 0, 1);
      if (rho < rim) v = Eigen::Vector3d(q.x, q.y, std::sqrt(r * r - rho * rho)) / r;
      nx(y, x) = v.x();
      ny(y, x) = v.y();
      nz(y, x) = v.z();
    }
  }
  return NormalMap(nx, ny, nz);
}

}  // namespace

TEST_CASE("calibration labels") {
  SUBCASE("apex is flat") {
    const Eigen::Vector3d n = sphere_normal({0, 0}, 5.0);
    CHECK(n.x() == 0.0);
    CHECK(n.z() == doctest::Approx(1.0));
  }
  SUBCASE("rim normal of a cap of depth d is (r - d) / r, as finite differences agree") {
    const double r = 5.0, d = 1.0;
    const double rim = std::sqrt(2 * r * d - d * d);
    CHECK(sphere_normal({rim, 0}, r).z() == doctest::Approx((r - d) / r).epsilon(1e-12));
    // finite-difference normal of the analytic cap just inside the rim
    auto cap = [&](double x, double y) { return std::sqrt(r * r - x * x - y * y) - (r - d); };
    const double x0 = rim * 0.98, y0 = 0.3, e = 1e-6;
    const double hx = (cap(x0 + e, y0) - cap(x0 - e, y0)) / (2 * e);
    const double hy = (cap(x0, y0 + e) - cap(x0, y0 - e)) / (2 * e);
    const Eigen::Vector3d fd = Eigen::Vector3d(-hx, -hy, 1).normalized();
    CHECK(angular_error_deg(fd, sphere_normal({x0, y0}, r)) < 1e-3);
  }
  SUBCASE("dataset pairs in-contact pixels with ball normals and samples the flat rest") {
    const sim::GelModel gel = sim::GelModel{}.with_frame_px(64);
    const DiffFrame diff(RgbImage(64, 64), gel.px_per_mm());
    const CalibrationDataset d = build_calibration_dataset({{diff, {32, 32}, 8.0, 5.0}}, 8);
    int flat = 0, curved = 0;
    for (const auto& s : d.samples) {
      CHECK(s.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
      (s.normal.z() == 1.0 ? flat : curved)++;
    }
    CHECK(curved > 150);
    CHECK(flat > 40);
  }
  SUBCASE("bad presses are rejected") {
    const DiffFrame diff(RgbImage(64, 64), 64 / 30.0);
    CHECK_THROWS_AS(build_calibration_dataset({{diff, {70, 32}, 5.0, 5.0}}), Error);
    CHECK_THROWS_AS(build_calibration_dataset({{diff, {32, 32}, 5.0 * 64 / 30.0, 5.0}}), Error);
  }
}

TEST_CASE("rgb2normal model") {
  Rng rng(5);
  SUBCASE("predictions are unit normals facing the camera") {
    for (int k = 0; k < 5; ++k) {
      Rgb2NormalModel m = Rgb2NormalModel::random(rng);
      Eigen::VectorXd p = m.parameters() * 20.0;
      m.set_parameters(p);
      for (int i = 0; i < 200; ++i) {
        PixelInput in;
        for (double& v : in) v = uniform(rng, -1.0, 1.0);
        const Eigen::Vector3d n = m.predict(in);
        CHECK(std::abs(n.norm() - 1.0) < 1e-12);
        CHECK(n.z() > 0.0);
      }
    }
  }
  SUBCASE("analytic gradient matches central differences") {
    const Rgb2NormalModel m = Rgb2NormalModel::random(rng);
    Eigen::MatrixXd in = Eigen::MatrixXd::Random(5, 40);
    Eigen::MatrixXd nrm(3, 40);
    for (int i = 0; i < 40; ++i) nrm.col(i) = Eigen::Vector3d::Random().normalized().cwiseAbs();
    Eigen::VectorXd grad;
    m.loss(in, nrm, &grad);
    const Eigen::VectorXd p0 = m.parameters();
    for (int k = 0; k < 10; ++k) {
      const int i = uniform_int(rng, 0, static_cast<int>(p0.size()) - 1);
      Rgb2NormalModel a = m, b = m;
      Eigen::VectorXd pa = p0, pb = p0;
      const double e = 1e-5;
      pa(i) += e;
      pb(i) -= e;
      a.set_parameters(pa);
      b.set_parameters(pb);
      const double fd = (a.loss(in, nrm) - b.loss(in, nrm)) / (2 * e);
      CHECK(std::abs(fd - grad(i)) <= 1e-4 * std::max(1e-3, std::abs(fd)));
    }
  }
  SUBCASE("a constant target is learnt within 200 epochs") {
    CalibrationDataset d;
    for (int i = 0; i < 50; ++i) d.samples.push_back({{0.1, -0.05, 0.02, 0.3, -0.2}, Eigen::Vector3d(0.3, 0.1, std::sqrt(0.9))});
    FitOptions o;
    o.epochs = 200;
    CHECK(fit_rgb2normal(d, o).final_loss < 1e-4);
  }
  SUBCASE("full-batch descent at the default rate never raises the loss") {
    const sim::GelModel gel = sim::GelModel{}.with_frame_px(64);
    const sim::LightRig rig = sim::LightRig::standard();
    std::vector<CalibrationPress> presses;
    for (int i = 0; i < 3; ++i) presses.push_back(sphere_press(gel, rig, rng, 0.004).press);
    FitOptions o;
    o.optimizer = Optimizer::kGradientDescent;
    o.learning_rate = kDefaultGdRate;
    o.epochs = 300;
    const auto fit = fit_rgb2normal(build_calibration_dataset(presses, 4), o);
    for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
      REQUIRE(fit.loss_history[i] <= fit.loss_history[i - 1] + 1e-15);
    }
    CHECK(fit.final_loss < fit.loss_history.front());
  }
  SUBCASE("divergence is reported") {
    CalibrationDataset d;
    for (int i = 0; i < 20; ++i) {
      d.samples.push_back({{uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50), 5.0 * i, -5.0 * i},
                           Eigen::Vector3d(0.6, 0, 0.8)});
    }
    FitOptions o;
    o.optimizer = Optimizer::kGradientDescent;
    o.learning_rate = std::numeric_limits<double>::max();
    o.epochs = 50;
    CHECK_THROWS_WITH(fit_rgb2normal(d, o), "diverged; reduce learning rate");
  }
  SUBCASE("text round trip") {
    const Rgb2NormalModel m = Rgb2NormalModel::random(rng);
    std::stringstream ss;
    m.save(ss);
    const Rgb2NormalModel back = Rgb2NormalModel::load(ss);
    CHECK((back.parameters() - m.parameters()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("integration") {
  const int n = 96;
  const double s = 96 / 30.0;
  const HeightIntegrator integ(n, n);
  SUBCASE("flat normals give a flat map") {
    CHECK(integ.integrate(NormalMap::flat(n, n), s).values().cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("sphere-cap normals recover the cap") {
    const double r = 5.0, d = 1.0;
    const Vec2 c{48, 48};
    const HeightMap h = integ.integrate(cap_normals(n, s, c, r, d), s);
    CHECK(h.max() == doctest::Approx(1.0).epsilon(0.05));
    double se = 0.0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double rho2 = (std::pow(x - c.x, 2) + std::pow(y - c.y, 2)) / (s * s);
        const double truth = std::max(0.0, std::sqrt(std::max(0.0, r * r - rho2)) - (r - d));
        se += std::pow(h.at(y, x) - truth, 2);
      }
    }
    CHECK(std::sqrt(se / (n * n)) < 0.05);
  }
  SUBCASE("the raw solve is linear in the gradient field") {
    Rng rng(6);
    const Grid g1x = Grid::Random(n, n), g1y = Grid::Random(n, n);
    const Grid g2x = Grid::Random(n, n), g2y = Grid::Random(n, n);
    const Grid sum = integ.solve(g1x + 2.0 * g2x, g1y + 2.0 * g2y);
    const Grid parts = integ.solve(g1x, g1y) + 2.0 * integ.solve(g2x, g2y);
    CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("mismatched sizes are rejected") {
    CHECK_THROWS_AS(integ.solve(Grid::Zero(10, 10), Grid::Zero(10, 10)), Error);
  }
}

TEST_CASE("reconstruction error") {
  Grid g = Grid::Random(20, 20).cwiseAbs();
  const HeightMap a(g, 1.0);
  CHECK(reconstruction_error(a, a) == 0.0);
  const HeightMap shifted(g.array() + 0.1, 1.0);
  CHECK(reconstruction_error(shifted, a) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("calibrated pipeline") {
  const sim::GelModel gel;
  const sim::LightRig rig = sim::LightRig::standard();
  const Rgb2NormalModel& model = trained_model();
  Rng rng(99);
  SUBCASE("held-out presses have median angular error under 3 degrees") {
    std::vector<double> err;
    for (int k = 0; k < 3; ++k) {
      const Press p = sphere_press(gel, rig, rng, 0.004);
      const NormalMap pred = predict_normals(p.press.diff, model);
      const NormalMap truth = sim::heightmap_normals(p.height);
      for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 128; ++x) {
          if (std::hypot(x - p.press.center_px.x, y - p.press.center_px.y) < p.press.contact_radius_px) {
            err.push_back(angular_error_deg(pred.at(y, x), truth.at(y, x)));
          }
        }
      }
    }
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    CHECK(err[err.size() / 2] < 3.0);
  }
  SUBCASE("pyramid reconstruction stays within the error budget") {
    const HeightIntegrator integ(128, 128);
    const sim::HexPyramid pyr;
    const HeightMap raw = sim::indent_heightmap(pyr, {14.0, 16.0}, pyr.height_mm, gel);
    const TactileFrame f = sim::add_pixel_noise(sim::render_tactile(sim::press(raw, gel), rig, gel), 0.004, rng);
    const HeightMap rec = reconstruct_heightmap(diff_image(f, sim::render_background(rig, gel)), model, integ);
    CHECK(rec.min() == 0.0);
    CHECK(reconstruction_error(rec, raw) <= 0.201);
  }
}
