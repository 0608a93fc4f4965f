#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "grn/harness.hpp"

namespace grn::harness {

int gold_rank(const std::array<double, 4>& scores, int label) {
  if (label < 0 || label > 3) {
    throw std::invalid_argument("metrics: label " + std::to_string(label) + " out of range");
  }
  int rank = 1;
  for (int j = 0; j < 4; ++j) {
    if (j == label) continue;
    if (scores[j] > scores[label] || (scores[j] == scores[label] && j < label)) ++rank;
  }
  return rank;
}

int EvalReport::bucket_of(int turns) {
  if (turns <= 2) return 0;
  if (turns >= 6) return 4;
  return turns - 2;
}

EvalReport compute_metrics(const std::vector<ScoredInstance>& instances) {
  if (instances.empty()) throw std::invalid_argument("metrics: empty instance list");
  EvalReport rep;
  std::array<double, 5> r1{}, r2{}, mrr{};
  double o1 = 0.0, o2 = 0.0, omrr = 0.0;
  for (const ScoredInstance& inst : instances) {
    const int rank = gold_rank(inst.scores, inst.label);
    const int b = EvalReport::bucket_of(inst.turns);
    const double hit1 = rank == 1 ? 1.0 : 0.0;
    const double hit2 = rank <= 2 ? 1.0 : 0.0;
    const double rr = 1.0 / rank;
    o1 += hit1;
    o2 += hit2;
    omrr += rr;
    r1[b] += hit1;
    r2[b] += hit2;
    mrr[b] += rr;
    ++rep.by_turns[b].count;
  }
  const int n = static_cast<int>(instances.size());
  rep.overall = {o1 / n, o2 / n, omrr / n, n};
  for (int b = 0; b < 5; ++b) {
    if (rep.by_turns[b].count == 0) continue;
    const int c = rep.by_turns[b].count;
    rep.by_turns[b].r_at_1 = r1[b] / c;
    rep.by_turns[b].r_at_2 = r2[b] / c;
    rep.by_turns[b].mrr = mrr[b] / c;
  }
  return rep;
}

std::string EvalReport::summary() const {
  char buf[80];
  std::snprintf(buf, sizeof buf, "R@1 %.3f R@2 %.3f MRR %.3f", overall.r_at_1, overall.r_at_2,
                overall.mrr);
  return buf;
}

std::string EvalReport::to_table(bool per_turn) const {
  std::string out = "bucket   count    R@1    R@2    MRR\n";
  char buf[96];
  auto row = [&](const char* name, const MetricRow& r) {
    if (r.count == 0) {
      std::snprintf(buf, sizeof buf, "%-8s %5d      -      -      -\n", name, 0);
    } else {
      std::snprintf(buf, sizeof buf, "%-8s %5d  %.3f  %.3f  %.3f\n", name, r.count, r.r_at_1,
                    r.r_at_2, r.mrr);
    }
    out += buf;
  };
  row("overall", overall);
  if (per_turn) {
    for (int b = 0; b < 5; ++b) row(kBucketNames[b], by_turns[b]);
  }
  return out;
}

std::string EvalReport::to_json_text() const {
  nlohmann::json j;
  auto fill = [](const MetricRow& r) {
    return nlohmann::json{
        {"r_at_1", r.r_at_1}, {"r_at_2", r.r_at_2}, {"mrr", r.mrr}, {"count", r.count}};
  };
  j = fill(overall);
  for (int b = 0; b < 5; ++b) j["by_turns"][kBucketNames[b]] = fill(by_turns[b]);
  return j.dump(2);
}

EvalReport evaluate(const GrnModel& model, const std::vector<reasoner::PreparedDialogue>& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  const auto ecfg = model.encoder_config();
  const int n = static_cast<int>(data.size());
  std::vector<ScoredInstance> scored(data.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const reasoner::CandidateScores s =
        reasoner::predict(data[i], model.params, model.cfg, ecfg);
    scored[i] = {s.scores, data[i].label, data[i].turns};
  }
  return compute_metrics(scored);
}

EvalReport evaluate_dialogues(const GrnModel& model, const std::vector<corpus::Dialogue>& data) {
  std::vector<reasoner::PreparedDialogue> prepared;
  prepared.reserve(data.size());
  for (const corpus::Dialogue& d : data) {
    prepared.push_back(reasoner::prepare_dialogue(d, model.vocab, model.cfg));
  }
  return evaluate(model, prepared);
}

}  // namespace grn::harness
