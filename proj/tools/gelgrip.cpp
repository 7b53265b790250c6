#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gelgrip/cli/config.hpp"
#include "gelgrip/cli/experiments.hpp"
#include "gelgrip/core/error.hpp"
#include "gelgrip/core/image_ops.hpp"
#include "gelgrip/core/io.hpp"
#include "gelgrip/geometry/reconstruction.hpp"
#include "gelgrip/sim/tactile.hpp"

namespace fs = std::filesystem;
using namespace gelgrip;

namespace {

std::string numbered(const std::string& stem, int i, const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(4) << std::setfill('0') << i << ext;
  return os.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << std::setprecision(10);
  return os;
}

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;

  cli::Config config() const {
    return config_path.empty() ? cli::Config{} : cli::load_config(config_path);
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key=value config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

int count_files(const fs::path& dir, const std::string& prefix) {
  int n = 0;
  while (fs::exists(dir / numbered(prefix, n, prefix == "frame" ? ".ppm" : ".csv"))) ++n;
  return n;
}

// sim

struct SimArgs {
  std::string scene = "slip";
  std::string out;
  std::string fruit = "cherry_tomato";
  std::string pose = "top";
  double load_g = 20.0;
  double shore00 = 51.4;
};

void run_sim(const Common& common, const SimArgs& a) {
  const cli::Config c = common.config();
  const sim::GelModel gel = c.sim.gel();
  const sim::LightRig rig = c.sim.rig();
  const fs::path dir(a.out);
  fs::create_directories(dir);
  Rng rng(common.seed);
  const TactileFrame bg = sim::render_background(rig, gel);
  io::save_ppm(dir / "background.ppm", bg);

  if (a.scene == "sphere" || a.scene == "pyramid") {
    const double mid = 0.5 * gel.gel_size_mm;
    const Vec2 center{mid + uniform(rng, -3.0, 3.0), mid + uniform(rng, -3.0, 3.0)};
    const HeightMap raw =
        a.scene == "sphere"
            ? sim::indent_heightmap(sim::Sphere{c.geometry.sphere_radius_mm}, center,
                                    uniform(rng, 0.5, 1.2), gel)
            : sim::indent_heightmap(sim::HexPyramid{}, center, sim::HexPyramid{}.height_mm, gel);
    const HeightMap h = sim::press(raw, gel);
    io::save_ppm(dir / numbered("frame", 0, ".ppm"),
                 sim::add_pixel_noise(sim::render_tactile(h, rig, gel), c.sim.pixel_noise, rng));
    io::save_heightmap_csv(dir / numbered("height", 0, ".csv"), a.scene == "sphere" ? h : raw);
  } else if (a.scene == "slip") {
    sim::GraspScene scene;
    scene.fruit.type = sim::fruit_type_from_string(a.fruit);
    scene.opening_mm = scene.fruit.diameter_mm - 2.0;
    scene.pose = a.pose == "side" ? sim::GraspPose::kSide : sim::GraspPose::kTop;
    scene.load_g = a.load_g;
    sim::SlipDynamics dyn;
    dyn.pixel_noise = c.slip.pixel_noise;
    dyn.marker_noise_px = c.slip.marker_noise_px;
    dyn.slip_threshold_px = c.slip.threshold_px;
    const auto seq = sim::synth_slip_sequence(scene, c.slip.frames, gel, rig, dyn, rng);
    const double grip_n = scene.fruit.stiffness_n_per_mm * (scene.fruit.diameter_mm - scene.opening_mm);
    std::ofstream cur = open_out(dir / "current.csv");
    cur << "frame,current\n";
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      io::save_ppm(dir / numbered("frame", static_cast<int>(i), ".ppm"), seq.frames[i]);
      io::save_heightmap_csv(dir / numbered("height", static_cast<int>(i), ".csv"), seq.heights[i]);
      cur << i << ',' << c.force.current_per_n * grip_n + c.force.current_offset +
                             normal(rng, 0.0, c.harvest.current_noise)
          << '\n';
    }
    io::save_markers_csv(dir / "markers.csv", seq.markers);
    std::ofstream truth = open_out(dir / "truth.csv");
    truth << "transition,relative_speed_px,slip\n";
    for (std::size_t i = 0; i < seq.slip_truth.size(); ++i) {
      truth << i << ',' << seq.relative_speed[i] << ',' << (seq.slip_truth[i] ? 1 : 0) << '\n';
    }
  } else if (a.scene == "compression") {
    sim::CompressionParams p;
    p.current_per_n = c.force.current_per_n;
    p.current_offset = c.force.current_offset;
    p.pixel_noise = c.sim.pixel_noise;
    const auto clip = sim::synth_compression_clip(
        sim::silicone_replica(sim::fruit_type_from_string(a.fruit), a.shore00),
        c.softness.clip_frames, gel.with_frame_px(c.softness.frame_px), rig, p, rng);
    io::save_ppm(dir / "background.ppm", clip.background);
    std::ofstream cur = open_out(dir / "current.csv");
    cur << "frame,current,force_n\n";
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
      io::save_ppm(dir / numbered("frame", static_cast<int>(i), ".ppm"), clip.frames[i]);
      cur << i << ',' << clip.current[i] << ',' << clip.force[i] << '\n';
    }
  } else {
    throw Error("unknown scene '" + a.scene + "' (sphere, pyramid, slip, compression)");
  }
  std::cout << "wrote " << a.scene << " scene to " << dir.string() << '\n';
}

// calibrate / reconstruct

void run_calibrate(const Common& common, const std::string& out) {
  const cli::Config c = common.config();
  const auto run = cli::calibrate(c, c.sim.pixel_noise, common.seed);
  run.fit.model.save(out);
  std::cout << "samples " << run.samples << "\nloss " << run.fit.loss_history.front() << " -> "
            << run.fit.final_loss << "\nseconds " << run.seconds << "\nmodel " << out << '\n';
}

struct ReconstructArgs {
  std::string model;
  std::string frame;
  std::string background;
  std::string out;
  int pyramids = 4;
};

void run_reconstruct(const Common& common, const ReconstructArgs& a) {
  const cli::Config c = common.config();
  const auto model = geometry::Rgb2NormalModel::load(a.model);
  if (!a.frame.empty()) {
    if (a.background.empty() || a.out.empty()) throw Error("--frame needs --background and --out");
    const TactileFrame f = io::load_ppm(a.frame, c.sim.px_per_mm);
    const TactileFrame bg = io::load_ppm(a.background, c.sim.px_per_mm);
    const geometry::HeightIntegrator integ(f.width(), f.height());
    const HeightMap h = geometry::reconstruct_heightmap(diff_image(f, bg), model, integ);
    io::save_heightmap_csv(a.out, h);
    std::cout << "max height " << h.max() << " mm\nheightmap " << a.out << '\n';
    return;
  }
  const auto rep = cli::reconstruct_pyramids(c, model, a.pyramids, c.sim.pixel_noise, common.seed);
  std::cout << "press,mse_mm2\n";
  for (std::size_t i = 0; i < rep.mse_mm2.size(); ++i) std::cout << i << ',' << rep.mse_mm2[i] << '\n';
  std::cout << "mean MSE " << rep.mean_mse_mm2 << " mm^2\nms per frame "
            << 1e3 * rep.seconds_per_frame << '\n';
}

// force

struct ForceArgs {
  std::string dir;
  std::string normal_out;
  std::string shear_out;
};

void run_force(const Common& common, const ForceArgs& a) {
  const cli::Config c = common.config();
  const auto nf = cli::normal_force_experiment(c, common.seed);
  const auto sh = cli::shear_experiment(c, common.seed);
  if (!a.normal_out.empty()) {
    std::ofstream os = open_out(a.normal_out);
    force::save_normal_force(os, nf.model);
  }
  if (!a.shear_out.empty()) {
    std::ofstream os = open_out(a.shear_out);
    force::save_shear_model(os, sh.model);
  }
  if (a.dir.empty()) {
    std::cout << "normal samples " << nf.samples << " R2 " << nf.r2 << " MAPE " << 100 * nf.mape
              << "%\nshear train " << sh.train << " test " << sh.test << " R2 " << sh.r2
              << " MAPE " << 100 * sh.mape << "%\n";
    return;
  }
  // stream estimates over a recorded sequence
  const fs::path dir(a.dir);
  const auto tracks = io::load_markers_csv(dir / "markers.csv");
  std::vector<double> current;
  if (std::ifstream in(dir / "current.csv"); in) {
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) current.push_back(std::stod(line.substr(line.find(',') + 1)));
  }
  const force::HhdSolver solver(
      GridGeometry::covering(c.sim.frame_px, c.sim.frame_px, c.force.grid, c.force.grid));
  const MarkerSet rest = c.sim.gel().rest_markers();
  std::cout << std::setprecision(6) << "frame,fn_n,fx_n,fy_n\n";
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const HeightMap h = io::load_heightmap_csv(dir / numbered("height", static_cast<int>(i), ".csv"));
    const ContactMask mask = slip::segment_contact(h, c.force.contact_threshold_mm);
    Vec2 shear;
    if (mask.count() > 0) shear = force::predict_shear(cli::shear_feature(rest, tracks[i], mask, solver), sh.model);
    std::cout << i << ',';
    if (i < current.size()) std::cout << std::max(0.0, force::predict_normal_force(current[i], nf.model));
    std::cout << ',' << shear.x << ',' << shear.y << '\n';
  }
}

// slip

struct SlipArgs {
  std::string dir;
  std::string model;
  bool benchmark = false;
  double threshold = -1.0;
};

void print_summary(const slip::SlipSummary& s) {
  std::cout << "precision " << s.precision << "\nrecall " << s.recall << "\nf1 " << s.f1
            << "\ntrue_positives " << s.true_positives << "\nfalse_positives "
            << s.false_positives << "\nfalse_negatives " << s.false_negatives << "\nlead_time_s ";
  if (s.mean_lead_time_s) std::cout << *s.mean_lead_time_s; else std::cout << "n/a";
  std::cout << '\n';
}

void run_slip(const Common& common, const SlipArgs& a) {
  cli::Config c = common.config();
  if (a.threshold >= 0.0) c.slip.threshold_px = a.threshold;
  std::optional<geometry::Rgb2NormalModel> model;
  if (!a.model.empty()) model = geometry::Rgb2NormalModel::load(a.model);
  if (a.benchmark) {
    const auto b = cli::slip_benchmark(c, model ? &*model : nullptr, common.seed);
    std::cout << "pose,load_g,repeat,flagged,true\n";
    for (const auto& t : b.trials) {
      int flagged = 0, truth = 0;
      for (const auto& f : t.frames) flagged += f.slip;
      for (bool v : t.truth) truth += v;
      std::cout << (t.pose == sim::GraspPose::kTop ? "top" : "side") << ',' << t.load_g << ','
                << t.repeat << ',' << flagged << ',' << truth << '\n';
    }
    print_summary(b.summary);
    return;
  }
  if (a.dir.empty()) throw Error("slip needs --dir or --benchmark");
  const fs::path dir(a.dir);
  const auto tracks = io::load_markers_csv(dir / "markers.csv");
  std::vector<ContactMask> masks;
  if (model) {
    const TactileFrame bg = io::load_ppm(dir / "background.ppm", c.sim.px_per_mm);
    const geometry::HeightIntegrator integ(bg.width(), bg.height());
    const int n = count_files(dir, "frame");
    for (int i = 0; i < n; ++i) {
      const TactileFrame f = io::load_ppm(dir / numbered("frame", i, ".ppm"), c.sim.px_per_mm);
      masks.push_back(slip::segment_contact(
          geometry::reconstruct_heightmap(diff_image(f, bg), *model, integ), c.slip.contact_threshold_mm));
    }
  } else {
    const int n = count_files(dir, "height");
    for (int i = 0; i < n; ++i) {
      masks.push_back(slip::segment_contact(io::load_heightmap_csv(dir / numbered("height", i, ".csv")),
                                            c.slip.contact_threshold_mm));
    }
  }
  if (masks.size() != tracks.size()) throw Error("frame and marker counts differ");
  const auto frames = slip::detect_sequence(masks, tracks, c.slip.threshold_px, c.slip.smooth);
  std::cout << std::setprecision(6)
            << "transition,object_vx,object_vy,marker_vx,marker_vy,speed_difference,slip\n";
  std::vector<bool> predicted;
  int flagged = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    std::cout << i << ',' << f.object_v.x << ',' << f.object_v.y << ',' << f.marker_v.x << ','
              << f.marker_v.y << ',' << f.speed_difference << ',' << (f.slip ? 1 : 0) << '\n';
    predicted.push_back(f.slip);
    flagged += f.slip;
  }
  std::cout << "\nslip_frames " << flagged << '\n';
  if (std::ifstream in(dir / "truth.csv"); in) {
    std::vector<bool> truth;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) truth.push_back(line.back() == '1');
    if (truth.size() == predicted.size()) print_summary(slip::evaluate_slip_detector({predicted}, {truth}, 30.0));
  }
}

// softness

void run_softness_train(const Common& common, const std::string& out) {
  const cli::Config c = common.config();
  const auto d = cli::softness_dataset(c, common.seed);
  const auto pairs = softness::make_pairs(d.train, d.fruit, d.shore00);
  const auto res = softness::train_ranker(d.clips, d.fruit, pairs, c.softness.train_options(common.seed));
  std::ofstream os = open_out(out);
  res.model.save(os);
  const auto rep = softness::eval_pairwise_accuracy(res.model, d.clips, d.fruit, d.shore00, pairs);
  std::cout << "pairs " << pairs.size() << "\nloss " << res.loss_history.front() << " -> "
            << res.loss_history.back() << "\ntrain accuracy " << rep.aggregate << "\nmodel " << out
            << '\n';
}

void run_softness_eval(const Common& common, const std::string& model_path, const std::string& csv) {
  const cli::Config c = common.config();
  std::ifstream in(model_path);
  if (!in) throw Error("cannot open " + model_path);
  const auto model = softness::RankerModel::load(in);
  const auto d = cli::softness_dataset(c, common.seed);
  const auto pairs = softness::make_pairs(d.test, d.fruit, d.shore00);
  const auto rep = softness::eval_pairwise_accuracy(model, d.clips, d.fruit, d.shore00, pairs);
  if (!csv.empty()) {
    std::ofstream os = open_out(csv);
    softness::write_accuracy_csv(os, rep);
  }
  softness::write_accuracy_csv(std::cout, rep);
  std::cout << "aggregate " << rep.aggregate << " over " << rep.pairs << " pairs\n";
}

// harvest

struct HarvestArgs {
  std::string strategy = "all";
  std::string fruit = "all";
  int trials = -1;
  std::string trials_csv;
};

void run_harvest(const Common& common, const HarvestArgs& a) {
  cli::Config c = common.config();
  if (a.trials > 0) c.harvest.trials = a.trials;
  c.validate();
  std::vector<harvest::Strategy> strategies;
  if (a.strategy == "all") {
    strategies = {harvest::Strategy::kOpenLoop, harvest::Strategy::kSlip, harvest::Strategy::kSlipForce};
  } else {
    strategies = {harvest::strategy_from_string(a.strategy)};
  }
  std::vector<sim::FruitType> fruits;
  if (a.fruit == "all") {
    fruits = {sim::FruitType::kCherryTomato, sim::FruitType::kStrawberry};
  } else {
    fruits = {sim::fruit_type_from_string(a.fruit)};
  }
  const auto r = cli::harvest_experiment(c, strategies, fruits, common.seed);
  if (!a.trials_csv.empty()) {
    std::ofstream os = open_out(a.trials_csv);
    harvest::write_trials_csv(os, r);
  }
  harvest::write_summary_csv(std::cout, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and perception toolkit for a tactile fruit gripper"};
  app.require_subcommand(1);
  std::ostringstream keys;
  keys << "\nConfig keys (defaults):\n";
  cli::write_config_reference(keys);
  app.footer(keys.str());

  Common common;

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("sim", "simulate a scene into a directory");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--scene", sim_args.scene, "sphere, pyramid, slip or compression")->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out, "output directory")->required();
  sim_cmd->add_option("--fruit", sim_args.fruit, "cherry_tomato, strawberry or raspberry")->capture_default_str();
  sim_cmd->add_option("--pose", sim_args.pose, "top or side (slip)")->capture_default_str();
  sim_cmd->add_option("--load", sim_args.load_g, "external load in grams (slip)")->capture_default_str();
  sim_cmd->add_option("--shore", sim_args.shore00, "replica Shore 00 hardness (compression)")->capture_default_str();

  std::string calib_out;
  auto* cal_cmd = app.add_subcommand("calibrate", "fit the RGB-to-normal model on simulated sphere presses");
  add_common(cal_cmd, common);
  cal_cmd->add_option("--out", calib_out, "model file")->required();

  ReconstructArgs rec_args;
  auto* rec_cmd = app.add_subcommand("reconstruct", "heightmap from a frame, or the pyramid benchmark");
  add_common(rec_cmd, common);
  rec_cmd->add_option("--model", rec_args.model, "RGB-to-normal model")->required()->check(CLI::ExistingFile);
  rec_cmd->add_option("--frame", rec_args.frame, "contact frame (.ppm)");
  rec_cmd->add_option("--background", rec_args.background, "background frame (.ppm)");
  rec_cmd->add_option("--out", rec_args.out, "heightmap CSV");
  rec_cmd->add_option("--pyramids", rec_args.pyramids, "pyramid presses when no frame is given")->capture_default_str();

  ForceArgs force_args;
  auto* force_cmd = app.add_subcommand("force", "fit force models; stream estimates over a slip scene");
  add_common(force_cmd, common);
  force_cmd->add_option("--dir", force_args.dir, "scene directory written by sim --scene slip");
  force_cmd->add_option("--normal-out", force_args.normal_out, "save the normal-force model");
  force_cmd->add_option("--shear-out", force_args.shear_out, "save the shear model");

  SlipArgs slip_args;
  auto* slip_cmd = app.add_subcommand("slip", "slip detection over a scene or the benchmark");
  add_common(slip_cmd, common);
  slip_cmd->add_option("--dir", slip_args.dir, "scene directory written by sim --scene slip");
  slip_cmd->add_option("--model", slip_args.model, "reconstruct heights from frames with this model");
  slip_cmd->add_flag("--benchmark", slip_args.benchmark, "2 poses x 3 loads x 2 repeats");
  slip_cmd->add_option("--threshold", slip_args.threshold, "override slip.threshold_px");

  std::string soft_out;
  auto* st_cmd = app.add_subcommand("softness-train", "train the softness ranker on simulated squeezes");
  add_common(st_cmd, common);
  st_cmd->add_option("--out", soft_out, "model file")->required();

  std::string soft_model, soft_csv;
  auto* se_cmd = app.add_subcommand("softness-eval", "per-hardness accuracy on the held-out squeezes");
  add_common(se_cmd, common);
  se_cmd->add_option("--model", soft_model, "ranker model")->required()->check(CLI::ExistingFile);
  se_cmd->add_option("--csv", soft_csv, "also write the table here");

  HarvestArgs hv_args;
  auto* hv_cmd = app.add_subcommand("harvest-sim", "grasp-and-pull trials per strategy and fruit");
  add_common(hv_cmd, common);
  hv_cmd->add_option("--strategy", hv_args.strategy, "open_loop, slip, slip_force or all")->capture_default_str();
  hv_cmd->add_option("--fruit", hv_args.fruit, "cherry_tomato, strawberry or all")->capture_default_str();
  hv_cmd->add_option("--trials", hv_args.trials, "trials per cell (overrides harvest.trials)");
  hv_cmd->add_option("--trials-csv", hv_args.trials_csv, "per-trial CSV");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim_cmd) run_sim(common, sim_args);
    if (*cal_cmd) run_calibrate(common, calib_out);
    if (*rec_cmd) run_reconstruct(common, rec_args);
    if (*force_cmd) run_force(common, force_args);
    if (*slip_cmd) run_slip(common, slip_args);
    if (*st_cmd) run_softness_train(common, soft_out);
    if (*se_cmd) run_softness_eval(common, soft_model, soft_csv);
    if (*hv_cmd) run_harvest(common, hv_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
