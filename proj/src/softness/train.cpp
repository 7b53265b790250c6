#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "gelgrip/core/error.hpp"
#include "gelgrip/softness/ranker.hpp"

namespace gelgrip::softness {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double ranker_loss(const RankerModel& m, const std::vector<ClipTensor>& clips,
                   const std::vector<ClipPair>& pairs, Eigen::VectorXd* grad) {
  if (pairs.empty()) throw Error("ranker loss needs at least one pair");
  std::vector<char> used(clips.size(), 0);
  for (const ClipPair& p : pairs) {
    if (p.a < 0 || p.b < 0 || p.a >= static_cast<int>(clips.size()) ||
        p.b >= static_cast<int>(clips.size())) {
      throw Error("pair refers to a missing clip");
    }
    if (p.label != 0 && p.label != 1) throw Error("pair labels must be 0 or 1");
    used[static_cast<std::size_t>(p.a)] = used[static_cast<std::size_t>(p.b)] = 1;
  }
  std::vector<Eigen::VectorXd> e(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (used[i]) e[i] = m.encode(clips[i]);
  }
  const Eigen::MatrixXd w = m.w();
  const double n = static_cast<double>(pairs.size());
  double loss = 0.0;
  std::vector<Eigen::VectorXd> de(clips.size());
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(kEmbedDim, kEmbedDim);
  double db = 0.0;
  for (const ClipPair& p : pairs) {
    const auto& ea = e[static_cast<std::size_t>(p.a)];
    const auto& eb = e[static_cast<std::size_t>(p.b)];
    const double f = ea.dot(w * eb) + m.bias();
    loss += softplus(f) - p.label * f;
    if (grad == nullptr) continue;
    const double g = (sigmoid(f) - p.label) / n;
    auto& dea = de[static_cast<std::size_t>(p.a)];
    auto& deb = de[static_cast<std::size_t>(p.b)];
    if (dea.size() == 0) dea = Eigen::VectorXd::Zero(kEmbedDim);
    if (deb.size() == 0) deb = Eigen::VectorXd::Zero(kEmbedDim);
    dea += g * (w * eb);
    deb += g * (w.transpose() * ea);
    da += g * (ea * eb.transpose() - eb * ea.transpose());
    db += g;
  }
  loss /= n;
  if (grad != nullptr) {
    grad->setZero(m.parameter_count());
    for (std::size_t i = 0; i < clips.size(); ++i) {
      if (de[i].size() != 0) m.backprop_clip(clips[i], de[i], *grad);
    }
    const Eigen::Index a_off = m.parameter_count() - kEmbedDim * kEmbedDim - 1;
    for (Eigen::Index i = 0; i < da.size(); ++i) (*grad)(a_off + i) = da.data()[i];
    (*grad)(m.parameter_count() - 1) = db;
  }
  return loss;
}

TrainResult train_ranker(const std::vector<ClipTensor>& clips,
                         const std::vector<std::string>& fruit_of_clip,
                         const std::vector<ClipPair>& pairs, const TrainOptions& opt) {
  if (fruit_of_clip.size() != clips.size()) throw Error("one fruit tag per clip is required");
  if (pairs.empty()) throw Error("training needs at least one pair");
  if (!(opt.learning_rate > 0.0)) throw Error("learning rate must be positive");
  for (const ClipPair& p : pairs) {
    if (p.a < 0 || p.b < 0 || p.a >= static_cast<int>(clips.size()) ||
        p.b >= static_cast<int>(clips.size())) {
      throw Error("pair refers to a missing clip");
    }
    if (fruit_of_clip[static_cast<std::size_t>(p.a)] != fruit_of_clip[static_cast<std::size_t>(p.b)]) {
      throw Error("training pairs must compare clips of the same fruit type");
    }
  }
  Rng rng(opt.seed);
  TrainResult r{RankerModel::random(rng, opt.init_scale), {}};
  Eigen::VectorXd p = r.model.parameters();
  Eigen::VectorXd grad, m1 = Eigen::VectorXd::Zero(p.size()), m2 = m1;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const double loss = ranker_loss(r.model, clips, pairs, &grad);
    if (!std::isfinite(loss) || !grad.allFinite()) throw Error("ranker training diverged");
    r.loss_history.push_back(loss);
    if (!opt.train_bias) grad(grad.size() - 1) = 0.0;
    if (opt.optimizer == RankerOptimizer::kGradientDescent) {
      p -= opt.learning_rate * grad;
    } else {
      m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
      m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(kBeta1, epoch + 1);
      const double c2 = 1.0 - std::pow(kBeta2, epoch + 1);
      p.array() -= opt.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kEps);
    }
    r.model.set_parameters(p);
  }
  const double final_loss = ranker_loss(r.model, clips, pairs);
  if (!std::isfinite(final_loss)) throw Error("ranker training diverged");
  r.loss_history.push_back(final_loss);
  return r;
}

AccuracyReport eval_pairwise_accuracy(const RankerModel& m, const std::vector<ClipTensor>& clips,
                                      const std::vector<std::string>& fruit_of_clip,
                                      const std::vector<double>& shore_of_clip,
                                      const std::vector<ClipPair>& pairs) {
  if (fruit_of_clip.size() != clips.size() || shore_of_clip.size() != clips.size()) {
    throw Error("one fruit and hardness tag per clip is required");
  }
  std::vector<Eigen::VectorXd> e(clips.size());
  auto embed = [&](int i) -> const Eigen::VectorXd& {
    auto& v = e[static_cast<std::size_t>(i)];
    if (v.size() == 0) v = m.encode(clips[static_cast<std::size_t>(i)]);
    return v;
  };
  std::map<std::pair<std::string, double>, AccuracyCell> cells;
  std::map<std::string, AccuracyCell> fruits;
  AccuracyReport r;
  int correct = 0;
  for (const ClipPair& p : pairs) {
    const bool predicted_harder = m.compare(embed(p.a), embed(p.b)) >= 0.0;
    const bool ok = predicted_harder == (p.label == 1);
    correct += ok;
    ++r.pairs;
    const std::string& fruit = fruit_of_clip[static_cast<std::size_t>(p.a)];
    for (int idx : {p.a, p.b}) {
      const double shore = shore_of_clip[static_cast<std::size_t>(idx)];
      auto& c = cells[{fruit, shore}];
      c.fruit = fruit;
      c.shore00 = shore;
      c.correct += ok;
      ++c.total;
    }
    auto& f = fruits[fruit];
    f.fruit = fruit;
    f.correct += ok;
    ++f.total;
  }
  for (auto& [k, c] : cells) r.cells.push_back(c);
  for (auto& [k, c] : fruits) r.per_fruit.push_back(c);
  r.aggregate = r.pairs == 0 ? 0.0 : double(correct) / r.pairs;
  return r;
}

std::vector<ClipPair> make_pairs(const std::vector<int>& indices,
                                 const std::vector<std::string>& fruit_of_clip,
                                 const std::vector<double>& shore_of_clip) {
  std::vector<ClipPair> out;
  for (int a : indices) {
    for (int b : indices) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      if (a == b || fruit_of_clip[ua] != fruit_of_clip[ub] || shore_of_clip[ua] == shore_of_clip[ub]) {
        continue;
      }
      out.push_back({a, b, shore_of_clip[ua] > shore_of_clip[ub] ? 1 : 0});
    }
  }
  return out;
}

void write_accuracy_csv(std::ostream& os, const AccuracyReport& r) {
  os << "fruit,shore00,correct,total,accuracy\n";
  for (const auto& c : r.cells) {
    os << c.fruit << ',' << c.shore00 << ',' << c.correct << ',' << c.total << ',' << c.accuracy() << '\n';
  }
  for (const auto& c : r.per_fruit) {
    os << c.fruit << ",all," << c.correct << ',' << c.total << ',' << c.accuracy() << '\n';
  }
  os << "all,all,,," << r.aggregate << '\n';
}

}  // namespace gelgrip::softness
