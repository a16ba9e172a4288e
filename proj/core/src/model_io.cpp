#include "dnsguard/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "dnsguard/error.hpp"

namespace dnsguard::classifiers {

using nlohmann::json;

namespace {

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ParseError(0, "", "matrix has wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(0, "", "matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json to_json(const InputScaling& s) { return {{"offset", s.offset}, {"scale", s.scale}}; }

InputScaling scaling_from(const json& j) {
  return {j.at("offset").get<Vec3>(), j.at("scale").get<Vec3>()};
}

json to_json(const TrainReport& r) {
  return {{"final_mse", r.final_mse},
          {"epochs_run", r.epochs_run},
          {"wall_time", r.wall_time},
          {"converged", r.converged}};
}

TrainReport report_from(const json& j) {
  TrainReport r;
  r.final_mse = j.at("final_mse").get<double>();
  r.epochs_run = j.at("epochs_run").get<std::size_t>();
  r.wall_time = j.at("wall_time").get<double>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

json encode(const MlpRecord& rec) {
  const auto& m = rec.model;
  const auto& c = rec.config;
  return {{"type", "mlp"},
          {"hidden", m.hidden()},
          {"hidden_weights", to_json(m.hidden_weights)},
          {"hidden_bias", std::vector<double>(m.hidden_bias.begin(), m.hidden_bias.end())},
          {"output_weights", to_json(m.output_weights)},
          {"output_bias", std::vector<double>(m.output_bias.begin(), m.output_bias.end())},
          {"scaling", to_json(m.scaling)},
          {"config",
           {{"max_epochs", c.max_epochs},
            {"target_mse", c.target_mse},
            {"lambda_init", c.lambda_init},
            {"lambda_up", c.lambda_up},
            {"lambda_down", c.lambda_down},
            {"lambda_max", c.lambda_max},
            {"weight_init_range", c.weight_init_range},
            {"seed", c.seed},
            {"scale_inputs", c.scale_inputs}}},
          {"report", to_json(rec.report)}};
}

MlpRecord decode_mlp(const json& j) {
  MlpRecord rec;
  const auto h = j.at("hidden").get<Eigen::Index>();
  if (h < 1 || h > static_cast<Eigen::Index>(kMaxHidden)) throw ParseError(0, "hidden", "bad width");
  auto& m = rec.model;
  m.hidden_weights = matrix_from(j.at("hidden_weights"), h, 3);
  const auto hb = j.at("hidden_bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(hb.size()) != h) throw ParseError(0, "hidden_bias", "wrong length");
  m.hidden_bias = Eigen::Map<const Eigen::VectorXd>(hb.data(), h);
  m.output_weights = matrix_from(j.at("output_weights"), 3, h);
  const auto ob = j.at("output_bias").get<Vec3>();
  m.output_bias = Eigen::Vector3d(ob[0], ob[1], ob[2]);
  m.scaling = scaling_from(j.at("scaling"));
  const json& c = j.at("config");
  rec.config.max_epochs = c.at("max_epochs").get<std::size_t>();
  rec.config.target_mse = c.at("target_mse").get<double>();
  rec.config.lambda_init = c.at("lambda_init").get<double>();
  rec.config.lambda_up = c.at("lambda_up").get<double>();
  rec.config.lambda_down = c.at("lambda_down").get<double>();
  rec.config.lambda_max = c.at("lambda_max").get<double>();
  rec.config.weight_init_range = c.at("weight_init_range").get<double>();
  rec.config.seed = c.at("seed").get<std::uint64_t>();
  rec.config.scale_inputs = c.at("scale_inputs").get<bool>();
  rec.report = report_from(j.at("report"));
  return rec;
}

json encode(const RbfRecord& rec) {
  const auto& m = rec.model;
  const auto& c = rec.config;
  return {{"type", "rbf"},
          {"centers", m.centers},
          {"width", m.width},
          {"output_weights", to_json(m.output_weights)},
          {"output_bias", std::vector<double>(m.output_bias.begin(), m.output_bias.end())},
          {"scaling", to_json(m.scaling)},
          {"config",
           {{"centers", c.centers},
            {"seed", c.seed},
            {"ridge", c.ridge},
            {"target_mse", c.target_mse},
            {"scale_inputs", c.scale_inputs}}},
          {"report", to_json(rec.report)}};
}

RbfRecord decode_rbf(const json& j) {
  RbfRecord rec;
  auto& m = rec.model;
  m.centers = j.at("centers").get<std::vector<Vec3>>();
  if (m.centers.empty()) throw ParseError(0, "centers", "no centers");
  m.width = j.at("width").get<double>();
  const auto k = static_cast<Eigen::Index>(m.centers.size());
  m.output_weights = matrix_from(j.at("output_weights"), 3, k);
  const auto ob = j.at("output_bias").get<Vec3>();
  m.output_bias = Eigen::Vector3d(ob[0], ob[1], ob[2]);
  m.scaling = scaling_from(j.at("scaling"));
  const json& c = j.at("config");
  rec.config.centers = c.at("centers").get<std::size_t>();
  rec.config.seed = c.at("seed").get<std::uint64_t>();
  rec.config.ridge = c.at("ridge").get<double>();
  rec.config.target_mse = c.at("target_mse").get<double>();
  rec.config.scale_inputs = c.at("scale_inputs").get<bool>();
  rec.report = report_from(j.at("report"));
  return rec;
}

json encode(const SomRecord& rec) {
  const auto& m = rec.model;
  const auto& c = rec.config;
  json labels = nullptr;
  if (m.neuron_labels) {
    labels = json::array();
    for (const auto l : *m.neuron_labels) labels.push_back(std::string(to_string(l)));
  }
  return {{"type", "som"},
          {"rows", kSomRows},
          {"cols", kSomCols},
          {"codebook", m.codebook},
          {"neuron_labels", labels},
          {"config",
           {{"epochs", c.epochs},
            {"ordering_lr", c.ordering_lr},
            {"ordering_steps", c.ordering_steps},
            {"tuning_lr", c.tuning_lr},
            {"tuning_neighbor_dist", c.tuning_neighbor_dist},
            {"seed", c.seed}}},
          {"report", to_json(rec.report)}};
}

SomRecord decode_som(const json& j) {
  SomRecord rec;
  if (j.at("rows").get<std::size_t>() != kSomRows || j.at("cols").get<std::size_t>() != kSomCols) {
    throw ParseError(0, "rows", "only the 5x5 grid is supported");
  }
  const auto codebook = j.at("codebook").get<std::vector<Vec3>>();
  if (codebook.size() != kSomNeurons) throw ParseError(0, "codebook", "expected 25 vectors");
  std::copy(codebook.begin(), codebook.end(), rec.model.codebook.begin());
  const json& labels = j.at("neuron_labels");
  if (!labels.is_null()) {
    if (!labels.is_array() || labels.size() != kSomNeurons) {
      throw ParseError(0, "neuron_labels", "expected 25 labels");
    }
    std::array<ClassLabel, kSomNeurons> parsed{};
    for (std::size_t n = 0; n < kSomNeurons; ++n) {
      const auto l = parse_label(labels[n].get<std::string>());
      if (!l) throw ParseError(0, "neuron_labels", "unknown label");
      parsed[n] = *l;
    }
    rec.model.neuron_labels = parsed;
  }
  const json& c = j.at("config");
  rec.config.epochs = c.at("epochs").get<std::size_t>();
  rec.config.ordering_lr = c.at("ordering_lr").get<double>();
  rec.config.ordering_steps = c.at("ordering_steps").get<std::size_t>();
  rec.config.tuning_lr = c.at("tuning_lr").get<double>();
  rec.config.tuning_neighbor_dist = c.at("tuning_neighbor_dist").get<double>();
  rec.config.seed = c.at("seed").get<std::uint64_t>();
  rec.report = report_from(j.at("report"));
  return rec;
}

}  // namespace

void write_model(std::ostream& out, const ModelRecord& record, const std::string& provenance) {
  json doc = std::visit([](const auto& rec) { return encode(rec); }, record);
  doc["provenance"] = provenance;
  out << doc.dump(2) << '\n';
}

ModelRecord read_model(std::istream& in, std::string* provenance) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, "", std::string("invalid JSON: ") + e.what());
  }
  try {
    if (provenance) *provenance = doc.value("provenance", std::string());
    const auto type = doc.at("type").get<std::string>();
    if (type == "mlp") return decode_mlp(doc);
    if (type == "rbf") return decode_rbf(doc);
    if (type == "som") return decode_som(doc);
    throw ParseError(0, "type", "unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(0, "", std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelRecord& record,
                const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot open " + path.string() + " for writing");
  write_model(out, record, provenance);
}

ModelRecord load_model(const std::filesystem::path& path, std::string* provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "", "cannot open " + path.string());
  return read_model(in, provenance);
}

ClassLabel classify(const ModelRecord& record, const FeatureVector& x) {
  return std::visit(
      [&](const auto& rec) -> ClassLabel {
        using T = std::decay_t<decltype(rec)>;
        if constexpr (std::is_same_v<T, MlpRecord>) return mlp_classify(rec.model, x);
        else if constexpr (std::is_same_v<T, RbfRecord>) return rbf_classify(rec.model, x);
        else return som_classify(rec.model, x);
      },
      record);
}

}  // namespace dnsguard::classifiers
