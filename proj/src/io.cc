#include "relaygame/io.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace relaygame {

std::string format_number(double x) {
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CSV header is empty");
  for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
  text_ += "\n";
}

Csv& Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CSV row has the wrong width");
  for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
  text_ += "\n";
  ++rows_;
  return *this;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

namespace {

Json sparse_to_json(const std::vector<SparseEntry>& v) {
  Json a = Json::array();
  for (const auto& e : v) a.push_back({e.index, e.p});
  return a;
}

std::vector<SparseEntry> sparse_from_json(const Json& a) {
  std::vector<SparseEntry> v;
  for (const auto& e : a) v.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
  return v;
}

Json reward_json(const Reward& r) { return r.feasible() ? Json(r.value()) : Json(nullptr); }

Json pair_json(const std::array<double, 2>& p) { return {p[0], p[1]}; }

}  // namespace

Json model_to_json(const RewardModel& model) {
  Json j;
  j["format"] = "relaygame.reward_model";
  j["version"] = kModelFormatVersion;
  j["finite_rewards"] = model.finite_rewards();
  j["location_probs"] = model.location_probs();
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    Json cond = Json::array();
    for (int l = 0; l < model.num_locations(); ++l)
      cond.push_back(sparse_to_json(model.conditional(f, l)));
    j[f == Forwarder::kFirst ? "conditional_1" : "conditional_2"] = cond;
  }
  Json pts = Json::array();
  for (const auto& p : model.location_points()) pts.push_back({p.x, p.y});
  j["location_points"] = pts;
  Json joint = Json::array();
  for (const auto& c : model.joint()) joint.push_back({c.i, c.j, c.p});
  j["joint"] = joint;
  return j;
}

RewardModel model_from_json(const Json& j) {
  if (j.value("format", "") != "relaygame.reward_model")
    throw std::invalid_argument("not a reward model record");
  const int version = j.value("version", -1);
  if (version != kModelFormatVersion)
    throw std::invalid_argument("unsupported reward model version " + std::to_string(version));
  std::vector<std::vector<SparseEntry>> c1, c2;
  for (const auto& l : j.at("conditional_1")) c1.push_back(sparse_from_json(l));
  for (const auto& l : j.at("conditional_2")) c2.push_back(sparse_from_json(l));
  std::vector<Point> pts;
  for (const auto& p : j.at("location_points")) pts.push_back({p.at(0), p.at(1)});
  std::vector<JointCell> joint;
  for (const auto& c : j.at("joint"))
    joint.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
  auto m = RewardModel::WithExplicitJoint(j.at("finite_rewards").get<std::vector<double>>(),
                                          j.at("location_probs").get<std::vector<double>>(),
                                          std::move(c1), std::move(c2), std::move(joint),
                                          std::move(pts));
  m.validate(1e-9);
  return m;
}

Json co_solution_to_json(const CoNeppSolution& sol, const RewardModel& model) {
  Json j;
  j["kind"] = "co_nepp";
  j["family"] = family_name(sol.family);
  j["cost"] = pair_json(sol.cost);
  j["d"] = pair_json(sol.d);
  j["alpha"] = pair_json(sol.alpha);
  j["zeta"] = pair_json(sol.thresholds.zeta);
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  Json states = Json::array();
  for (const auto& c : model.joint()) {
    const auto o = sol.outcome(c.i, c.j);
    states.push_back({{"i", c.i},
                      {"j", c.j},
                      {"p", c.p},
                      {"r_i", reward_json(model.reward(c.i))},
                      {"r_j", reward_json(model.reward(c.j))},
                      {"region", region_name(o.region)},
                      {"stop_prob", pair_json(o.sigma)},
                      {"value", pair_json(o.value)}});
  }
  j["states"] = states;
  Json lone = Json::array();
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    Json rows = Json::array();
    for (int i = 0; i < model.size(); ++i)
      rows.push_back({{"i", i},
                      {"stop_prob", sol.lone_stop_prob(f, i)},
                      {"value", sol.lone_value(f, i)}});
    lone.push_back(rows);
  }
  j["lone"] = lone;
  return j;
}

Json po_solution_to_json(const PoNeppSolution& sol, const RewardModel& model,
                         const GameConfig& config) {
  Json j;
  j["kind"] = "po_nepp";
  j["variant"] = variant_name(sol.variant);
  j["cost"] = pair_json(sol.cost);
  j["d"] = pair_json(sol.d);
  j["alpha"] = pair_json(sol.alpha);
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  Json locs = Json::array();
  for (int l = 0; l < model.num_locations(); ++l) {
    Json g1 = Json::array(), g2 = Json::array();
    for (const auto& e : model.conditional(Forwarder::kFirst, l))
      g1.push_back({e.index, sol.stage_value(Forwarder::kFirst, e.index, l, model, config)});
    for (const auto& e : model.conditional(Forwarder::kSecond, l))
      g2.push_back({e.index, sol.stage_value(Forwarder::kSecond, e.index, l, model, config)});
    locs.push_back({{"location", l},
                    {"q", model.location_prob(l)},
                    {"phi", sol.thresholds.at(l).first},
                    {"psi", sol.thresholds.at(l).second},
                    {"value_1", g1},
                    {"value_2", g2}});
  }
  j["locations"] = locs;
  return j;
}

Json coop_solution_to_json(const CoopSolution& sol, const RewardModel& model) {
  Json j;
  j["kind"] = "coop";
  j["gamma"] = sol.gamma;
  j["cost"] = pair_json(sol.cost);
  j["weighted_cost"] = sol.weighted_cost;
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  Json states = Json::array();
  for (const auto& c : model.joint()) {
    const char* a = "cc";
    switch (sol.action(c.i, c.j)) {
      case JointAction::kStopContinue: a = "sc"; break;
      case JointAction::kContinueStop: a = "cs"; break;
      default: break;
    }
    states.push_back({{"i", c.i}, {"j", c.j}, {"action", a}, {"value", sol.value(c.i, c.j)}});
  }
  j["states"] = states;
  return j;
}

}  // namespace relaygame
