#include "protopal/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "protopal/json_io.hpp"

namespace protopal {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "bundle arrays assume a little-endian host");

const TrainedDiseaseModel* ModelBundle::find(const std::string& disease) const {
  for (const auto& m : models)
    if (m.disease == disease) return &m;
  return nullptr;
}

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(const std::string& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                 static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw BundleError("corrupt bundle: base64 length is not a multiple of 4");
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      int x = value(c);
      if (x < 0 || pad > 0) throw BundleError("corrupt bundle: invalid base64 data");
      v = (v << 6) | static_cast<unsigned>(x);
    }
    out += static_cast<char>((v >> 16) & 0xFF);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xFF);
    if (pad < 1) out += static_cast<char>(v & 0xFF);
  }
  return out;
}

namespace {

json encode_array(const Eigen::MatrixXd& m) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  std::string bytes(static_cast<std::size_t>(rm.size()) * sizeof(double), '\0');
  if (rm.size() > 0) std::memcpy(bytes.data(), rm.data(), bytes.size());
  return {{"shape", {m.rows(), m.cols()}}, {"dtype", "f64le"}, {"data", base64_encode(bytes)}};
}

json encode_vector(const Eigen::VectorXd& v) {
  json j = encode_array(v);
  j["shape"] = {v.size()};
  return j;
}

json encode_vector(const std::vector<double>& v) {
  return encode_vector(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval());
}

Eigen::MatrixXd decode_array(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw BundleError("corrupt bundle: malformed array at " + where);
  if (j.value("dtype", "f64le") != "f64le") throw BundleError("corrupt bundle: unsupported dtype at " + where);
  auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  Eigen::Index rows = 0, cols = 0;
  if (shape.size() == 1) {
    rows = shape[0];
    cols = 1;
  } else if (shape.size() == 2) {
    rows = shape[0];
    cols = shape[1];
  } else {
    throw BundleError("corrupt bundle: bad shape at " + where);
  }
  if (rows < 0 || cols < 0) throw BundleError("corrupt bundle: negative shape at " + where);
  std::string bytes = base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double))
    throw BundleError("corrupt bundle: array size does not match shape at " + where);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  if (!bytes.empty()) std::memcpy(rm.data(), bytes.data(), bytes.size());
  return rm;
}

Eigen::VectorXd decode_vector(const json& j, const std::string& where) {
  Eigen::MatrixXd m = decode_array(j, where);
  if (m.cols() != 1 && m.size() != 0) throw BundleError("corrupt bundle: expected a vector at " + where);
  return Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
}

json standardizer_json(const Standardizer& s) {
  return {{"mean", encode_vector(s.mean())}, {"scale", encode_vector(s.scale())}};
}

Standardizer standardizer_from(const json& j, const std::string& where) {
  return Standardizer(decode_vector(j.at("mean"), where + ".mean"), decode_vector(j.at("scale"), where + ".scale"));
}

json model_json(const TrainedDiseaseModel& m) {
  json items = json::array();
  for (const auto& p : m.prototypes.prototypes())
    items.push_back({{"class", to_string(p.label)}, {"w", encode_vector(p.w)}, {"basis", encode_array(p.basis.matrix())}});
  json protos{{"measure", to_string(m.prototypes.measure())}, {"items", items}};
  protos["omega"] = m.prototypes.omega().size() ? encode_array(m.prototypes.omega()) : json(nullptr);

  json aes = json::array();
  for (const auto& ae : m.autoencoders)
    aes.push_back({{"encoder_weights", encode_array(ae.encoder_weights())},
                   {"encoder_bias", encode_vector(ae.encoder_bias())},
                   {"decoder_weights", encode_array(ae.decoder_weights())},
                   {"decoder_bias", encode_vector(ae.decoder_bias())}});

  json training{{"config", to_json(m.metadata.config)},
                {"cost_history", encode_vector(m.metadata.cost_history)},
                {"final_cost", encode_vector(std::vector<double>{m.metadata.final_cost})},
                {"n_train", m.metadata.n_train},
                {"autoencoder", to_json(m.metadata.autoencoder)}};
  return {{"code", m.disease},
          {"name", m.name},
          {"schema_hash", m.schema_hash},
          {"standardizer", standardizer_json(m.standardizer)},
          {"prototypes", protos},
          {"autoencoders", aes},
          {"training", training}};
}

TrainedDiseaseModel model_from(const json& j, const FeatureSchema& schema, std::vector<std::string>& warnings) {
  TrainedDiseaseModel m;
  m.disease = j.at("code").get<std::string>();
  const std::string where = "diseases." + m.disease;
  m.name = j.value("name", m.disease);
  m.schema = schema;
  m.schema_hash = j.at("schema_hash").get<std::string>();
  if (m.schema_hash != schema.hash())
    warnings.push_back(m.disease + ": schema hash " + m.schema_hash + " differs from bundle schema " + schema.hash());
  m.standardizer = standardizer_from(j.at("standardizer"), where + ".standardizer");

  const json& pj = j.at("prototypes");
  Measure measure = parse_measure(pj.at("measure").get<std::string>());
  std::vector<Prototype> protos;
  std::size_t k = 0;
  for (const auto& item : pj.at("items")) {
    std::string at = where + ".prototypes." + std::to_string(k++);
    Prototype p;
    p.label = parse_label(item.at("class").get<std::string>());
    p.w = decode_vector(item.at("w"), at + ".w");
    Eigen::MatrixXd v = decode_array(item.at("basis"), at + ".basis");
    if (v.cols() == 0) {
      p.basis = Basis::empty(p.w.size());
    } else {
      try {
        p.basis = Basis::from_orthonormal(std::move(v));
      } catch (const DegenerateBasisError& e) {
        throw BundleError("corrupt bundle: " + at + ": " + e.what());
      }
    }
    protos.push_back(std::move(p));
  }
  Eigen::MatrixXd omega;
  if (pj.contains("omega") && !pj.at("omega").is_null()) omega = decode_array(pj.at("omega"), where + ".omega");
  m.prototypes = PrototypeSet(measure, std::move(protos), std::move(omega));

  for (const auto& aj : j.at("autoencoders")) {
    m.autoencoders.emplace_back(decode_array(aj.at("encoder_weights"), where + ".encoder_weights"),
                                decode_vector(aj.at("encoder_bias"), where + ".encoder_bias"),
                                decode_array(aj.at("decoder_weights"), where + ".decoder_weights"),
                                decode_vector(aj.at("decoder_bias"), where + ".decoder_bias"));
  }
  if (!m.autoencoders.empty() && m.autoencoders.size() != m.prototypes.size())
    throw BundleError("corrupt bundle: " + where + " has " + std::to_string(m.autoencoders.size()) +
                      " autoencoders for " + std::to_string(m.prototypes.size()) + " prototypes");

  const json& tj = j.at("training");
  m.metadata.config = training_config_from_json(tj.at("config"));
  Eigen::VectorXd hist = decode_vector(tj.at("cost_history"), where + ".cost_history");
  m.metadata.cost_history.assign(hist.data(), hist.data() + hist.size());
  Eigen::VectorXd fc = decode_vector(tj.at("final_cost"), where + ".final_cost");
  if (fc.size() != 1) throw BundleError("corrupt bundle: " + where + ".final_cost");
  m.metadata.final_cost = fc[0];
  m.metadata.n_train = tj.value("n_train", std::size_t{0});
  m.metadata.autoencoder = autoencoder_config_from_json(tj.at("autoencoder"));
  return m;
}

}  // namespace

void save_bundle(const ModelBundle& bundle, std::ostream& out) {
  json diseases = json::array();
  for (const auto& m : bundle.models) diseases.push_back(model_json(m));
  json j{{"format", "protopal-bundle"},
         {"version", bundle.version},
         {"schema", json::parse(schema_to_json(bundle.schema)).at("features")},
         {"schema_hash", bundle.schema.hash()},
         {"standardizer", standardizer_json(bundle.standardizer)},
         {"metadata", bundle.metadata},
         {"diseases", diseases}};
  out << j.dump(1) << '\n';
  if (!out) throw BundleError("failed writing bundle");
}

ModelBundle load_bundle(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw BundleError(std::string("corrupt bundle: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "protopal-bundle")
    throw BundleError("corrupt bundle: not a protopal bundle");
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw BundleError("corrupt bundle: missing version");
  int found = j["version"].get<int>();
  if (found != kBundleVersion)
    throw BundleError("bundle version mismatch: expected " + std::to_string(kBundleVersion) + ", found " +
                      std::to_string(found));
  ModelBundle b;
  b.version = found;
  try {
    b.schema = schema_from_json(j.at("schema").dump());
    if (j.value("schema_hash", "") != b.schema.hash())
      b.warnings.push_back("bundle schema hash field does not match its schema");
    b.standardizer = standardizer_from(j.at("standardizer"), "standardizer");
    b.metadata = j.value("metadata", std::map<std::string, std::string>{});
    for (const auto& dj : j.at("diseases")) b.models.push_back(model_from(dj, b.schema, b.warnings));
  } catch (const json::exception& e) {
    throw BundleError(std::string("corrupt bundle: ") + e.what());
  } catch (const BundleError&) {
    throw;
  } catch (const Error& e) {
    throw BundleError(std::string("corrupt bundle: ") + e.what());
  }
  return b;
}

void save_bundle_file(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BundleError("cannot open '" + path + "' for writing");
  save_bundle(bundle, out);
}

ModelBundle load_bundle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open bundle '" + path + "'");
  return load_bundle(in);
}

}  // namespace protopal
