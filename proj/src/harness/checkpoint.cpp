#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "grn/harness.hpp"

namespace grn::harness {

namespace {

constexpr char kMagic[4] = {'G', 'R', 'N', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void save_checkpoint(const GrnModel& model, const std::string& path) {
  nlohmann::json header;
  header["config"] = nlohmann::json::parse(model.cfg.to_json_text());
  header["vocab"] = model.vocab.tokens();
  header["tensors"] = nlohmann::json::array();

  std::string payload;
  for (const std::string& name : model.params.names()) {
    const num::Tensor& t = model.params.at(name);
    nlohmann::json entry;
    entry["name"] = name;
    entry["shape"] = t.shape();
    entry["offset"] = payload.size();
    entry["count"] = t.data().size();
    header["tensors"].push_back(std::move(entry));
    for (double d : t.data()) {
      put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
    }
  }

  const std::string header_text = header.dump();
  if (header_text.size() > 0xffffffffull) {
    throw std::runtime_error("checkpoint: header too large");
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  std::string len;
  put_u32(len, static_cast<std::uint32_t>(header_text.size()));
  out.write(len.data(), 4);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("checkpoint: write to '" + path + "' failed");
}

GrnModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  if (bytes.size() < 8 || std::string_view(bytes.data(), 4) != std::string_view(kMagic, 4)) {
    throw std::runtime_error("checkpoint: '" + path + "' is not a model checkpoint");
  }
  const std::uint32_t header_len = get_u32(bytes, 4);
  if (bytes.size() < 8ull + header_len) {
    throw std::runtime_error("checkpoint: '" + path + "' is truncated");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("checkpoint: bad header in '" + path + "': " + e.what());
  }
  if (!header.contains("config") || !header.contains("vocab") || !header.contains("tensors")) {
    throw std::runtime_error("checkpoint: header in '" + path + "' is missing sections");
  }

  GrnModel m;
  m.cfg = TrainConfig::from_json_text(header["config"].dump());
  m.vocab = corpus::Vocab::from_tokens(header["vocab"].get<std::vector<std::string>>());

  const size_t payload_start = 8ull + header_len;
  const size_t payload_size = bytes.size() - payload_start;
  for (const auto& entry : header["tensors"]) {
    const std::string name = entry.at("name").get<std::string>();
    const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    const size_t offset = entry.at("offset").get<size_t>();
    const size_t count = entry.at("count").get<size_t>();
    size_t expect = 1;
    for (int dim : shape) expect *= static_cast<size_t>(dim);
    if (expect != count || offset + 4 * count > payload_size) {
      throw std::runtime_error("checkpoint: tensor '" + name + "' in '" + path +
                               "' has inconsistent layout");
    }
    std::vector<double> values(count);
    for (size_t i = 0; i < count; ++i) {
      const std::uint32_t raw = get_u32(bytes, payload_start + offset + 4 * i);
      values[i] = static_cast<double>(std::bit_cast<float>(raw));
    }
    m.params.add(name, num::Tensor(shape, std::move(values)));
  }
  return m;
}

}  // namespace grn::harness
