#include "grn/model.hpp"

#include <cmath>

#include "grn/rng.hpp"

namespace grn {

GrnModel init_model(const TrainConfig& cfg, corpus::Vocab vocab) {
  cfg.validate();
  GrnModel m{cfg, std::move(vocab), {}};
  const int d = cfg.d_model;
  const int dh = d / cfg.heads;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));

  auto weight = [&](const std::string& name, std::vector<int> shape) {
    Rng rng(mix_string(cfg.seed, name));
    m.params.add(name, num::Tensor::uniform(std::move(shape), -bound, bound, rng));
  };
  auto zeros = [&](const std::string& name, std::vector<int> shape) {
    m.params.add(name, num::Tensor::zeros(std::move(shape)));
  };
  auto ones = [&](const std::string& name, std::vector<int> shape) {
    m.params.add(name, num::Tensor::full(std::move(shape), 1.0));
  };

  weight("embed.token", {m.vocab.size(), d});
  weight("embed.pos", {cfg.max_positions, d});

  for (int b = 0; b < cfg.enc_layers; ++b) {
    const std::string blk = "enc.b" + std::to_string(b);
    for (int h = 0; h < cfg.heads; ++h) {
      const std::string suffix = ".h" + std::to_string(h);
      weight(blk + ".attn.wq" + suffix, {d, dh});
      weight(blk + ".attn.wk" + suffix, {d, dh});
      weight(blk + ".attn.wv" + suffix, {d, dh});
    }
    weight(blk + ".attn.wo", {d, d});
    ones(blk + ".ln1.gain", {d});
    zeros(blk + ".ln1.bias", {d});
    weight(blk + ".ff.w1", {d, cfg.ff_dim});
    zeros(blk + ".ff.b1", {cfg.ff_dim});
    weight(blk + ".ff.w2", {cfg.ff_dim, d});
    zeros(blk + ".ff.b2", {d});
    ones(blk + ".ln2.gain", {d});
    zeros(blk + ".ln2.bias", {d});
  }

  weight("head.uop.w", {d, 2});
  zeros("head.uop.b", {2});
  weight("head.nup.w", {d, 2});
  zeros("head.nup.b", {2});

  // clue-word pooling
  weight("pool.w1", {d, d});
  weight("pool.w2", {d, d});
  weight("pool.v", {d, 1});

  // graph branch
  for (int l = 0; l < cfg.gcn_layers; ++l) {
    weight("gcn.w" + std::to_string(l), {d, d});
  }
  weight("cross.wl", {d, d});
  weight("cross.wr", {d, d});
  weight("cross.v", {d, 1});

  // sequence branch
  for (int h = 0; h < cfg.heads; ++h) {
    const std::string suffix = ".h" + std::to_string(h);
    weight("seq.wq" + suffix, {d, dh});
    weight("seq.wk" + suffix, {d, dh});
    weight("seq.wv" + suffix, {d, dh});
  }
  weight("seq.wo", {d, d});

  // gated aggregation and scoring
  weight("gate.w", {2 * d, cfg.scalar_gate ? 1 : d});
  weight("out.w", {d, 1});
  zeros("out.b", {1});

  return m;
}

}  // namespace grn
