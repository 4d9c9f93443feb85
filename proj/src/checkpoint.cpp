#include "vain/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace vain {

using json = nlohmann::json;

namespace {
constexpr char kMagic[8] = {'V', 'A', 'I', 'N', 'C', 'K', 'P', '1'};
}

json spec_to_json(const ModelSpec& s) {
  return json{{"arch", to_string(s.arch)},
              {"feature_dim", s.feature_dim},
              {"n_slots", s.n_slots},
              {"es_hidden", s.es_hidden},
              {"es_out", s.es_out},
              {"ec_hidden", s.ec_hidden},
              {"comm_dim", s.comm_dim},
              {"attn_dim", s.attn_dim},
              {"psi_hidden", s.psi_hidden},
              {"dec_hidden", s.dec_hidden},
              {"out_dim", s.out_dim},
              {"head", to_string(s.head)},
              {"kernel", to_string(s.kernel)},
              {"aggregation", to_string(s.aggregation)},
              {"batchnorm", s.batchnorm},
              {"absent_flag_index", s.absent_flag_index},
              {"seed", s.seed}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.arch = arch_from_string(j.at("arch").get<std::string>());
  s.feature_dim = j.at("feature_dim").get<int>();
  s.n_slots = j.value("n_slots", 0);
  s.es_hidden = j.value("es_hidden", std::vector<int>{});
  s.es_out = j.value("es_out", 32);
  s.ec_hidden = j.value("ec_hidden", std::vector<int>{});
  s.comm_dim = j.value("comm_dim", 32);
  s.attn_dim = j.value("attn_dim", 10);
  s.psi_hidden = j.value("psi_hidden", std::vector<int>{});
  s.dec_hidden = j.value("dec_hidden", std::vector<int>{});
  s.out_dim = j.at("out_dim").get<int>();
  s.head = head_from_string(j.at("head").get<std::string>());
  s.kernel = kernel_from_string(j.value("kernel", "softmax"));
  s.aggregation = agg_from_string(j.value("aggregation", "mean"));
  s.batchnorm = j.value("batchnorm", false);
  s.absent_flag_index = j.value("absent_flag_index", -1);
  s.seed = j.value("seed", static_cast<uint64_t>(0));
  return s;
}

void save_checkpoint(const std::string& path, const Model& model) {
  const std::vector<double> values = model.save_flat();
  json header = {{"format", 1}, {"spec", spec_to_json(model.spec())}, {"param_count", values.size()}};
  const std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  const uint32_t hlen = static_cast<uint32_t>(head.size());
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  }
  uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string head(hlen, '\0');
  in.read(head.data(), hlen);
  if (!in) throw std::runtime_error("load_checkpoint: truncated header in " + path);
  const json header = json::parse(head);
  if (header.at("format").get<int>() != 1) {
    throw std::runtime_error("load_checkpoint: unsupported format version");
  }
  Model model(spec_from_json(header.at("spec")));
  const size_t n = header.at("param_count").get<size_t>();
  std::vector<double> values(n);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("load_checkpoint: truncated parameters in " + path);
  model.load_flat(values);
  return model;
}

}  // namespace vain
