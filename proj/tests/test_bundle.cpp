#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "protopal/bundle.hpp"
#include "protopal/errors.hpp"

using namespace protopal;

namespace {

ModelBundle fixture_bundle() {
  const auto& t = testdata::small_trained();
  ModelBundle b;
  b.schema = t.cohort.dataset.schema();
  b.standardizer = Standardizer::fit(t.cohort.dataset);
  b.models = t.models;
  b.metadata["split_seed"] = "7";
  return b;
}

std::string dump(const ModelBundle& b) {
  std::ostringstream out;
  save_bundle(b, out);
  return out.str();
}

ModelBundle parse(const std::string& text) {
  std::istringstream in(text);
  return load_bundle(in);
}

void require_same(const TrainedDiseaseModel& a, const TrainedDiseaseModel& b) {
  CHECK(a.disease == b.disease);
  CHECK(a.name == b.name);
  CHECK(a.schema == b.schema);
  CHECK(a.schema_hash == b.schema_hash);
  CHECK(a.standardizer == b.standardizer);
  CHECK(a.prototypes.measure() == b.prototypes.measure());
  REQUIRE(a.prototypes.size() == b.prototypes.size());
  for (std::size_t j = 0; j < a.prototypes.size(); ++j) {
    CHECK(a.prototypes[j].w == b.prototypes[j].w);
    CHECK(a.prototypes[j].label == b.prototypes[j].label);
    CHECK(a.prototypes[j].basis == b.prototypes[j].basis);
  }
  CHECK(a.prototypes.omega() == b.prototypes.omega());
  REQUIRE(a.autoencoders.size() == b.autoencoders.size());
  for (std::size_t j = 0; j < a.autoencoders.size(); ++j) CHECK(a.autoencoders[j] == b.autoencoders[j]);
  CHECK(a.metadata.cost_history == b.metadata.cost_history);
  CHECK(a.metadata.final_cost == b.metadata.final_cost);
  CHECK(a.metadata.n_train == b.metadata.n_train);
}

}  // namespace

TEST_CASE("trained multi-disease bundle round-trips bit-exactly") {
  auto original = fixture_bundle();
  auto text = dump(original);
  auto loaded = parse(text);
  CHECK(loaded.version == kBundleVersion);
  CHECK(loaded.schema == original.schema);
  CHECK(loaded.standardizer == original.standardizer);
  CHECK(loaded.metadata == original.metadata);
  CHECK(loaded.warnings.empty());
  REQUIRE(loaded.models.size() == original.models.size());
  for (std::size_t k = 0; k < loaded.models.size(); ++k) require_same(loaded.models[k], original.models[k]);
  CHECK(dump(loaded) == text);
}

TEST_CASE("empty bundle round-trips") {
  ModelBundle empty;
  empty.schema = FeatureSchema::default_schema();
  empty.standardizer = Standardizer::identity(static_cast<Eigen::Index>(empty.schema.size()));
  auto loaded = parse(dump(empty));
  CHECK(loaded.models.empty());
  CHECK(loaded.schema == empty.schema);
  CHECK(loaded.find("E11") == nullptr);
}

TEST_CASE("version tampering is detected") {
  auto j = nlohmann::json::parse(dump(fixture_bundle()));
  j["version"] = 2;
  try {
    parse(j.dump());
    FAIL("expected a version error");
  } catch (const BundleError& e) {
    CHECK(std::string(e.what()) == "bundle version mismatch: expected 1, found 2");
  }
}

TEST_CASE("corruption is reported, hash drift is a warning") {
  auto text = dump(fixture_bundle());
  CHECK_THROWS_AS(parse(text.substr(0, text.size() / 2)), BundleError);
  CHECK_THROWS_AS(parse("[]"), BundleError);
  auto j = nlohmann::json::parse(text);
  j["format"] = "something-else";
  CHECK_THROWS_AS(parse(j.dump()), BundleError);

  j = nlohmann::json::parse(text);
  j["diseases"][0]["schema_hash"] = "ffffffffffffffff";
  auto loaded = parse(j.dump());
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find(loaded.models[0].disease) != std::string::npos);
}

TEST_CASE("base64 codec") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  std::string bytes;
  for (int c = 0; c < 256; ++c) bytes.push_back(static_cast<char>(c));
  CHECK(base64_decode(base64_encode(bytes)) == bytes);
  CHECK_THROWS_AS(base64_decode("a*=="), BundleError);
}

TEST_CASE("file helpers") {
  auto path = std::string("bundle_test.json");
  auto b = fixture_bundle();
  save_bundle_file(b, path);
  CHECK(load_bundle_file(path).models.size() == b.models.size());
  CHECK_THROWS_AS(load_bundle_file("does/not/exist.json"), BundleError);
}
