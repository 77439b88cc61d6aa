#include "neurojscc/checkpoint.hpp"

#include <fstream>

#include "neurojscc/errors.hpp"
#include "neurojscc/rng.hpp"

namespace neurojscc {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json model_to_json(const SnnModel& model) {
  json neurons = json::array();
  for (int i = 0; i < model.topology().num_neurons(); ++i) {
    const auto p = model.params(i);
    neurons.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return {{"neurons", neurons}};
}

void model_from_json(const json& j, SnnModel& model) {
  const auto& neurons = j.at("neurons");
  if (static_cast<int>(neurons.size()) != model.topology().num_neurons()) {
    throw IoError("checkpoint: neuron count does not match the topology descriptor");
  }
  for (int i = 0; i < model.topology().num_neurons(); ++i) {
    const auto vals = neurons.at(i).get<std::vector<double>>();
    auto p = model.params(i);
    if (vals.size() != p.size()) {
      throw IoError("checkpoint: parameter count mismatch at neuron " + std::to_string(i));
    }
    std::copy(vals.begin(), vals.end(), p.begin());
  }
}

json filters_to_json(const FilterConfig& f) {
  return {{"type", f.type == FilterConfig::Type::kRaisedCosine ? "raised_cosine" : "exponential"},
          {"K", f.num_filters},
          {"W", f.window},
          {"log_offset", f.log_offset},
          {"betas", f.betas}};
}

FilterConfig filters_from_json(const json& j) {
  FilterConfig f;
  const auto type = j.at("type").get<std::string>();
  f.type = type == "raised_cosine" ? FilterConfig::Type::kRaisedCosine
                                   : FilterConfig::Type::kExponential;
  j.at("K").get_to(f.num_filters);
  j.at("W").get_to(f.window);
  j.at("log_offset").get_to(f.log_offset);
  j.at("betas").get_to(f.betas);
  return f;
}

}  // namespace

std::unique_ptr<SnnModel> build_encoder(const TopologyConfig& topo, const FilterConfig& filters,
                                        std::uint64_t seed, double init_scale) {
  auto model = std::make_unique<SnnModel>(
      NetworkTopology::fully_connected(topo.d_u, topo.n_hidden_encoder, topo.d_x()),
      filters.build());
  model->init_params(seed, init_scale);
  return model;
}

std::unique_ptr<SnnModel> build_decoder(const TopologyConfig& topo, const FilterConfig& filters,
                                        std::uint64_t seed, double init_scale) {
  auto topology = topo.full_decoder_recurrence
                      ? NetworkTopology::fully_connected(topo.d_x(), topo.n_hidden_decoder,
                                                         topo.d_v)
                      : NetworkTopology::recurrent_hidden(topo.d_x(), topo.n_hidden_decoder,
                                                          topo.d_v);
  auto model = std::make_unique<SnnModel>(std::move(topology), filters.build());
  model->init_params(seed, init_scale);
  return model;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = ck.seed;
  j["iterations_completed"] = ck.iterations_completed;
  j["uncoded"] = ck.uncoded;
  j["encoder_density"] = ck.encoder_density;
  j["sigma2_last"] = ck.sigma2_last ? json(*ck.sigma2_last) : json(nullptr);
  j["topology"] = {{"d_u", ck.topology.d_u},
                   {"rate", ck.topology.rate},
                   {"n_hidden_encoder", ck.topology.n_hidden_encoder},
                   {"n_hidden_decoder", ck.topology.n_hidden_decoder},
                   {"d_v", ck.topology.d_v},
                   {"full_decoder_recurrence", ck.topology.full_decoder_recurrence}};
  j["filters"] = filters_to_json(ck.filters);
  if (ck.channel.type == ChannelConfig::Type::kGaussianQuantized) {
    j["channel"] = {{"type", "gaussian_quantized"},
                    {"snr_db", ck.channel.snr_db},
                    {"threshold", ck.channel.threshold}};
  } else {
    j["channel"] = {{"type", "identity"}};
  }
  j["encoder"] = ck.encoder ? model_to_json(*ck.encoder) : json(nullptr);
  j["decoder"] = model_to_json(*ck.decoder);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": invalid checkpoint JSON: " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw IoError(path + ": unsupported checkpoint format version");
    }
    Checkpoint ck;
    j.at("seed").get_to(ck.seed);
    j.at("iterations_completed").get_to(ck.iterations_completed);
    j.at("uncoded").get_to(ck.uncoded);
    j.at("encoder_density").get_to(ck.encoder_density);
    if (!j.at("sigma2_last").is_null()) ck.sigma2_last = j.at("sigma2_last").get<double>();
    const auto& t = j.at("topology");
    t.at("d_u").get_to(ck.topology.d_u);
    t.at("rate").get_to(ck.topology.rate);
    t.at("n_hidden_encoder").get_to(ck.topology.n_hidden_encoder);
    t.at("n_hidden_decoder").get_to(ck.topology.n_hidden_decoder);
    t.at("d_v").get_to(ck.topology.d_v);
    t.at("full_decoder_recurrence").get_to(ck.topology.full_decoder_recurrence);
    ck.filters = filters_from_json(j.at("filters"));
    const auto& c = j.at("channel");
    if (c.at("type").get<std::string>() == "gaussian_quantized") {
      ck.channel.type = ChannelConfig::Type::kGaussianQuantized;
      c.at("snr_db").get_to(ck.channel.snr_db);
      c.at("threshold").get_to(ck.channel.threshold);
    } else {
      ck.channel.type = ChannelConfig::Type::kIdentity;
    }
    ck.decoder = std::make_unique<SnnModel>(
        ck.topology.full_decoder_recurrence
            ? NetworkTopology::fully_connected(ck.topology.d_x(), ck.topology.n_hidden_decoder,
                                               ck.topology.d_v)
            : NetworkTopology::recurrent_hidden(ck.topology.d_x(), ck.topology.n_hidden_decoder,
                                                ck.topology.d_v),
        ck.filters.build());
    model_from_json(j.at("decoder"), *ck.decoder);
    if (!j.at("encoder").is_null()) {
      ck.encoder = std::make_unique<SnnModel>(
          NetworkTopology::fully_connected(ck.topology.d_u, ck.topology.n_hidden_encoder,
                                           ck.topology.d_x()),
          ck.filters.build());
      model_from_json(j.at("encoder"), *ck.encoder);
    }
    return ck;
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace neurojscc
