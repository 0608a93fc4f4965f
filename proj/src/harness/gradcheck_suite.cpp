#include <functional>
#include <utility>

#include "grn/encoder.hpp"
#include "grn/gradcheck.hpp"
#include "grn/harness.hpp"
#include "grn/ops.hpp"
#include "grn/rng.hpp"

namespace grn::harness {

namespace {

using num::Tensor;

Tensor rnd(std::vector<int> shape, double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  return Tensor::uniform(std::move(shape), lo, hi, rng);
}

// Weighted sum with fixed random weights keeps every output coordinate in
// play, so the checked gradient is nondegenerate.
Tensor wsum(const Tensor& t, const Tensor& w) { return num::sum(num::mul(t, w)); }

using ScalarFn = std::function<Tensor(const Tensor&)>;

// Checks the loss body with one named parameter swapped for the probe value.
template <typename Body>
ScalarFn param_probe(const ModelParams& mp, std::string name, Body body) {
  return [&mp, name = std::move(name), body = std::move(body)](const Tensor& w) {
    TrackedParams tp = w.tracked() ? TrackedParams(mp, *w.tape()) : TrackedParams(mp);
    tp.replace(name, w);
    return body(tp);
  };
}

}  // namespace

std::vector<OpGradCheck> op_gradient_checks() {
  std::vector<OpGradCheck> out;
  auto run = [&](const std::string& name, const ScalarFn& f, const Tensor& x) {
    const num::GradCheckResult r = num::grad_check(f, x);
    out.push_back({name, r.max_rel_error, r.coords_checked, r.kinks_skipped});
  };

  const Tensor a34 = rnd({3, 4}, -1, 1, 11);
  const Tensor b42 = rnd({4, 2}, -1, 1, 12);
  const Tensor w32 = rnd({3, 2}, -1, 1, 13);
  const Tensor w34 = rnd({3, 4}, -1, 1, 14);

  run("matmul.lhs", [&](const Tensor& x) { return wsum(num::matmul(x, b42), w32); }, a34);
  run("matmul.rhs", [&](const Tensor& x) { return wsum(num::matmul(a34, x), w32); },
      rnd({4, 2}, -1, 1, 15));
  run("add.lhs", [&](const Tensor& x) { return wsum(num::add(x, a34), w34); },
      rnd({3, 4}, -1, 1, 16));
  run("add.rhs_broadcast", [&](const Tensor& x) { return wsum(num::add(a34, x), w34); },
      rnd({4}, -1, 1, 17));
  run("sub.rhs", [&](const Tensor& x) { return wsum(num::sub(a34, x), w34); },
      rnd({3, 4}, -1, 1, 18));
  run("mul", [&](const Tensor& x) { return wsum(num::mul(x, a34), w34); },
      rnd({3, 4}, -1, 1, 19));
  run("scalar_mul", [&](const Tensor& x) { return wsum(num::scalar_mul(x, 1.7), w34); },
      rnd({3, 4}, -1, 1, 20));
  run("scalar_add", [&](const Tensor& x) { return wsum(num::scalar_add(x, -0.6), w34); },
      rnd({3, 4}, -1, 1, 21));
  run("neg", [&](const Tensor& x) { return wsum(num::neg(x), w34); }, rnd({3, 4}, -1, 1, 22));

  const Tensor w33 = rnd({3, 3}, -1, 1, 23);
  const Tensor part13 = rnd({1, 3}, -1, 1, 24);
  run("concat.axis0",
      [&](const Tensor& x) { return wsum(num::concat({x, part13}, 0), w33); },
      rnd({2, 3}, -1, 1, 25));
  const Tensor part32 = rnd({3, 2}, -1, 1, 26);
  run("concat.axis1",
      [&](const Tensor& x) { return wsum(num::concat({part32, x}, 1), w33); },
      rnd({3, 1}, -1, 1, 27));
  const Tensor w23 = rnd({2, 3}, -1, 1, 28);
  run("slice_rows", [&](const Tensor& x) { return wsum(num::slice_rows(x, 1, 3), w23); },
      rnd({4, 3}, -1, 1, 29));
  const Tensor w43 = rnd({4, 3}, -1, 1, 30);
  run("transpose", [&](const Tensor& x) { return wsum(num::transpose(x), w43); },
      rnd({3, 4}, -1, 1, 31));
  const Tensor w26 = rnd({2, 6}, -1, 1, 32);
  run("reshape", [&](const Tensor& x) { return wsum(num::reshape(x, {2, 6}), w26); },
      rnd({3, 4}, -1, 1, 33));

  run("tanh", [&](const Tensor& x) { return wsum(num::tanh(x), w34); },
      rnd({3, 4}, -2, 2, 34));
  run("relu", [&](const Tensor& x) { return wsum(num::relu(x), w34); },
      rnd({3, 4}, -2, 2, 35));
  run("sigmoid", [&](const Tensor& x) { return wsum(num::sigmoid(x), w34); },
      rnd({3, 4}, -2, 2, 36));
  run("log", [&](const Tensor& x) { return wsum(num::log(x), w34); },
      rnd({3, 4}, 0.4, 2.5, 37));
  run("softmax.axis0", [&](const Tensor& x) { return wsum(num::softmax(x, 0), w34); },
      rnd({3, 4}, -2, 2, 38));
  run("softmax.axis1", [&](const Tensor& x) { return wsum(num::softmax(x, 1), w34); },
      rnd({3, 4}, -2, 2, 39));
  const Tensor w3 = rnd({3}, -1, 1, 40);
  run("max_over_axis", [&](const Tensor& x) { return wsum(num::max_over_axis(x, 0), w3); },
      rnd({4, 3}, -2, 2, 41));
  run("sum", [&](const Tensor& x) { return num::scalar_mul(num::sum(x), 1.3); },
      rnd({3, 4}, -1, 1, 42));
  run("embedding_lookup",
      [&](const Tensor& x) {
        return wsum(num::embedding_lookup(x, {1, 3, 3, 0}), w43);
      },
      rnd({5, 3}, -1, 1, 43));

  const Tensor ln_x = rnd({3, 5}, -1.5, 1.5, 44);
  const Tensor ln_gain = rnd({5}, 0.5, 1.5, 45);
  const Tensor ln_bias = rnd({5}, -0.5, 0.5, 46);
  const Tensor w35 = rnd({3, 5}, -1, 1, 47);
  run("layer_norm.x",
      [&](const Tensor& x) { return wsum(num::layer_norm(x, ln_gain, ln_bias, 1e-5), w35); },
      ln_x);
  run("layer_norm.gain",
      [&](const Tensor& g) { return wsum(num::layer_norm(ln_x, g, ln_bias, 1e-5), w35); },
      ln_gain);
  run("layer_norm.bias",
      [&](const Tensor& b) { return wsum(num::layer_norm(ln_x, ln_gain, b, 1e-5), w35); },
      ln_bias);

  // ---- composite reasoning blocks ----
  const int d = 4;
  ModelParams mp;
  mp.add("pool.w1", rnd({d, d}, -1, 1, 50));
  mp.add("pool.w2", rnd({d, d}, -1, 1, 51));
  mp.add("pool.v", rnd({d, 1}, -1, 1, 52));
  for (int h = 0; h < 2; ++h) {
    const std::string sfx = ".h" + std::to_string(h);
    mp.add("seq.wq" + sfx, rnd({d, d / 2}, -1, 1, 53 + h));
    mp.add("seq.wk" + sfx, rnd({d, d / 2}, -1, 1, 55 + h));
    mp.add("seq.wv" + sfx, rnd({d, d / 2}, -1, 1, 57 + h));
  }
  mp.add("seq.wo", rnd({d, d}, -1, 1, 59));
  mp.add("cross.wl", rnd({d, d}, -1, 1, 60));
  mp.add("cross.wr", rnd({d, d}, -1, 1, 61));
  mp.add("cross.v", rnd({d, 1}, -1, 1, 62));
  mp.add("gate.w", rnd({2 * d, d}, -1, 1, 63));
  mp.add("out.w", rnd({d, 1}, -1, 1, 64));
  mp.add("out.b", rnd({1}, -0.5, 0.5, 65));

  const std::vector<std::pair<int, int>> spans = {{0, 2}, {2, 5}};
  const Tensor h54 = rnd({5, d}, -1, 1, 70);
  const Tensor w24 = rnd({2, d}, -1, 1, 71);
  auto pool_body = [&](const TrackedParams& tp) {
    return wsum(reasoner::utterance_pool(h54, spans, tp), w24);
  };
  run("utterance_pool.features",
      [&](const Tensor& x) {
        if (x.tracked()) {
          TrackedParams tp(mp, *x.tape());
          return wsum(reasoner::utterance_pool(x, spans, tp), w24);
        }
        return wsum(reasoner::utterance_pool(x, spans, TrackedParams(mp)), w24);
      },
      h54);
  run("utterance_pool.pool_w1", param_probe(mp, "pool.w1", pool_body), mp.at("pool.w1"));
  run("utterance_pool.pool_v", param_probe(mp, "pool.v", pool_body), mp.at("pool.v"));

  const Tensor cls44 = rnd({4, d}, -1, 1, 72);
  const Tensor w44 = rnd({4, d}, -1, 1, 73);
  auto seq_body = [&](const TrackedParams& tp) {
    return wsum(reasoner::sequence_reason(cls44, tp, 2, d), w44);
  };
  run("self_attention.x",
      [&](const Tensor& x) {
        if (x.tracked()) {
          TrackedParams tp(mp, *x.tape());
          return wsum(reasoner::sequence_reason(x, tp, 2, d), w44);
        }
        return wsum(reasoner::sequence_reason(x, TrackedParams(mp), 2, d), w44);
      },
      cls44);
  run("self_attention.wq", param_probe(mp, "seq.wq.h0", seq_body), mp.at("seq.wq.h0"));
  run("self_attention.wo", param_probe(mp, "seq.wo", seq_body), mp.at("seq.wo"));

  const Tensor nodes34 = rnd({3, d}, -1, 1, 74);
  const Tensor a_hat = rnd({3, 3}, 0.1, 0.6, 75);
  const Tensor gw = rnd({d, d}, -1, 1, 76);
  run("gcn_layer.features",
      [&](const Tensor& x) { return wsum(reasoner::gcn_layer(x, a_hat, gw), w34); }, nodes34);
  run("gcn_layer.weight",
      [&](const Tensor& w) { return wsum(reasoner::gcn_layer(nodes34, a_hat, w), w34); }, gw);

  auto cross_body = [&](const TrackedParams& tp) {
    return wsum(reasoner::cross_attention(nodes34, tp), w34);
  };
  run("cross_attention.features",
      [&](const Tensor& x) {
        if (x.tracked()) {
          TrackedParams tp(mp, *x.tape());
          return wsum(reasoner::cross_attention(x, tp), w34);
        }
        return wsum(reasoner::cross_attention(x, TrackedParams(mp)), w34);
      },
      nodes34);
  run("cross_attention.wl", param_probe(mp, "cross.wl", cross_body), mp.at("cross.wl"));
  run("cross_attention.v", param_probe(mp, "cross.v", cross_body), mp.at("cross.v"));

  const Tensor os14 = rnd({1, d}, -1, 1, 77);
  const Tensor og14 = rnd({1, d}, -1, 1, 78);
  const Tensor w14 = rnd({1, d}, -1, 1, 79);
  auto agg_body = [&](const TrackedParams& tp) {
    return wsum(reasoner::aggregate(os14, og14, tp, false), w14);
  };
  run("aggregate.branch",
      [&](const Tensor& x) {
        if (x.tracked()) {
          TrackedParams tp(mp, *x.tape());
          return wsum(reasoner::aggregate(x, og14, tp, false), w14);
        }
        return wsum(reasoner::aggregate(x, og14, TrackedParams(mp), false), w14);
      },
      os14);
  run("aggregate.gate_w", param_probe(mp, "gate.w", agg_body), mp.at("gate.w"));

  const Tensor o44 = rnd({4, d}, -1, 1, 80);
  auto score_body = [&](const TrackedParams& tp) {
    return reasoner::score_and_loss(o44, 2, tp).second;
  };
  run("score_and_loss.input",
      [&](const Tensor& x) {
        if (x.tracked()) {
          TrackedParams tp(mp, *x.tape());
          return reasoner::score_and_loss(x, 2, tp).second;
        }
        return reasoner::score_and_loss(x, 2, TrackedParams(mp)).second;
      },
      o44);
  run("score_and_loss.out_w", param_probe(mp, "out.w", score_body), mp.at("out.w"));

  // ---- one encoder block end to end ----
  ModelParams ep;
  ep.add("embed.token", rnd({8, d}, -1, 1, 90));
  ep.add("embed.pos", rnd({16, d}, -1, 1, 91));
  for (int h = 0; h < 2; ++h) {
    const std::string sfx = ".h" + std::to_string(h);
    ep.add("enc.b0.attn.wq" + sfx, rnd({d, d / 2}, -1, 1, 92 + h));
    ep.add("enc.b0.attn.wk" + sfx, rnd({d, d / 2}, -1, 1, 94 + h));
    ep.add("enc.b0.attn.wv" + sfx, rnd({d, d / 2}, -1, 1, 96 + h));
  }
  ep.add("enc.b0.attn.wo", rnd({d, d}, -1, 1, 98));
  ep.add("enc.b0.ln1.gain", rnd({d}, 0.7, 1.3, 99));
  ep.add("enc.b0.ln1.bias", rnd({d}, -0.3, 0.3, 100));
  ep.add("enc.b0.ff.w1", rnd({d, 2 * d}, -1, 1, 101));
  ep.add("enc.b0.ff.b1", rnd({2 * d}, -0.3, 0.3, 102));
  ep.add("enc.b0.ff.w2", rnd({2 * d, d}, -1, 1, 103));
  ep.add("enc.b0.ff.b2", rnd({d}, -0.3, 0.3, 104));
  ep.add("enc.b0.ln2.gain", rnd({d}, 0.7, 1.3, 105));
  ep.add("enc.b0.ln2.bias", rnd({d}, -0.3, 0.3, 106));

  encoder::EncoderConfig ecfg;
  ecfg.vocab_size = 8;
  ecfg.d_model = d;
  ecfg.layers = 1;
  ecfg.heads = 2;
  ecfg.max_positions = 16;
  ecfg.ff_dim = 2 * d;
  const std::vector<int> ids = {2, 5, 6, 3, 7, 3};
  const std::vector<std::pair<int, int>> enc_spans = {{1, 3}, {3, 4}};
  const Tensor w64 = rnd({6, d}, -1, 1, 107);
  auto enc_body = [&](const TrackedParams& tp) {
    return wsum(encoder::encode(ids, enc_spans, tp, ecfg).h, w64);
  };
  run("encoder.embed_token", param_probe(ep, "embed.token", enc_body), ep.at("embed.token"));
  run("encoder.ff_w1", param_probe(ep, "enc.b0.ff.w1", enc_body), ep.at("enc.b0.ff.w1"));
  run("encoder.attn_wq", param_probe(ep, "enc.b0.attn.wq.h0", enc_body),
      ep.at("enc.b0.attn.wq.h0"));

  return out;
}

}  // namespace grn::harness
