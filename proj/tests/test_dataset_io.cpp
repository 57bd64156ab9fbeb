#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "syhd/dataset.hpp"
#include "syhd/errors.hpp"
#include "syhd/hd_classifier.hpp"
#include "syhd/item_memory.hpp"
#include "syhd/matrix.hpp"
#include "syhd/mlp.hpp"
#include "syhd/model_io.hpp"
#include "syhd/report.hpp"
#include "syhd/rng.hpp"

using syhd::align_labels;
using syhd::BadChecksumError;
using syhd::BadMagicError;
using syhd::BadVersionError;
using syhd::Dataset;
using syhd::deserialize_model;
using syhd::fnv1a64;
using syhd::HdModel;
using syhd::IoError;
using syhd::ItemMemory;
using syhd::load_csv_dataset;
using syhd::load_dataset;
using syhd::load_model;
using syhd::load_xy_dataset;
using syhd::Matrix;
using syhd::ModelBundle;
using syhd::ModelKind;
using syhd::ParseError;
using syhd::Quantizer;
using syhd::ResultRecord;
using syhd::save_csv_dataset;
using syhd::save_model;
using syhd::serialize_model;
using syhd::SplitMix64;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "syhd_io_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

ModelBundle hdl_bundle() {
  auto mem = ItemMemory::generate(2, 32, 2, 3);
  mem.set_quantizer(Quantizer::uniform(2, 2, 0.0, 1.0));
  const auto x = Matrix::from_rows({{0.1, 0.9}, {0.8, 0.2}});
  ModelBundle b;
  b.kind = ModelKind::kHdl;
  b.hd = HdModel::train(x, std::vector<int>{1, 2}, mem, 2);
  b.label_values = {10, 20};
  return b;
}

ModelBundle nn_bundle(bool codec) {
  SplitMix64 rng(41);
  Matrix x(12, 3);
  std::vector<int> y;
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x.at(i, j) = rng.next_double();
    y.push_back(1 + static_cast<int>(i % 2));
  }
  syhd::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  const syhd::MlpArch arch{3, {4, 2}, 2};
  const std::optional<syhd::CodecSpec> spec =
      codec ? std::optional<syhd::CodecSpec>(syhd::CodecSpec{16, 4, 5}) : std::nullopt;
  const auto mlp = syhd::train_mlp(x, y, arch, spec, cfg);

  const auto feats = mlp.extract_features(x);
  ItemMemory mem;
  if (codec) {
    mem = mlp.codec_memory_with_range();
  } else {
    mem = ItemMemory::generate(feats.cols(), 32, 4, 6);
    mem.set_quantizer(Quantizer::fit(feats, 4));
  }
  ModelBundle b;
  b.kind = codec ? ModelKind::kSynergic : ModelKind::kNnHdl;
  b.hd = HdModel::train(feats, y, mem, 2);
  b.mlp = mlp;
  b.label_values = {0, 1};
  return b;
}

}  // namespace

TEST_CASE("csv datasets parse features and trailing labels") {
  const auto path = write_file("toy.csv", "1.5,2.25,7\n\n-0.5,3,2\n");
  auto ds = load_csv_dataset(path.string());
  REQUIRE(ds.size() == 2);
  REQUIRE(ds.feature_count() == 2);
  CHECK(ds.x.at(0, 0) == 1.5);
  CHECK(ds.x.at(0, 1) == 2.25);
  CHECK(ds.x.at(1, 0) == -0.5);
  CHECK(ds.x.at(1, 1) == 3.0);
  CHECK(ds.raw_labels == std::vector<long long>{7, 2});
  CHECK(ds.y.empty());  // dense labels appear only after alignment

  align_labels({&ds});
  CHECK(ds.class_count == 2);
  CHECK(ds.label_values == std::vector<long long>{2, 7});
  CHECK(ds.y == std::vector<int>{2, 1});
}

TEST_CASE("csv separators may be commas, whitespace, or both") {
  const auto path = write_file("sep.csv", "1 2 3\n4,\t5 , 6\n");
  const auto ds = load_csv_dataset(path.string());
  CHECK(ds.x.at(0, 0) == 1.0);
  CHECK(ds.x.at(1, 1) == 5.0);
  CHECK(ds.raw_labels == std::vector<long long>{3, 6});
}

TEST_CASE("float-formatted integral labels are accepted") {
  const auto path = write_file("floatlabel.csv", "0.5,1.\n0.25,26.0\n");
  const auto ds = load_csv_dataset(path.string());
  CHECK(ds.raw_labels == std::vector<long long>{1, 26});

  const auto bad = write_file("fracational.csv", "0.5,1.5\n");
  CHECK_THROWS_AS(load_csv_dataset(bad.string()), ParseError);
}

TEST_CASE("malformed csv reports the offending line") {
  const auto ragged = write_file("ragged.csv", "1,2,3\n1,2\n");
  try {
    load_csv_dataset(ragged.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const auto alpha = write_file("alpha.csv", "1,2,3\n1,x,3\n");
  try {
    load_csv_dataset(alpha.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const auto empty = write_file("empty.csv", "\n\n");
  CHECK_THROWS_AS(load_csv_dataset(empty.string()), ParseError);
  CHECK_THROWS_AS(load_csv_dataset((scratch_dir() / "missing.csv").string()), IoError);
}

TEST_CASE("paired feature and label files load and validate together") {
  const auto xf = write_file("har_x.txt", "  0.1  0.2\n0.3 0.4\n");
  const auto yf = write_file("har_y.txt", "5\n3\n");
  const auto ds = load_xy_dataset(xf.string(), yf.string());
  REQUIRE(ds.size() == 2);
  CHECK(ds.x.at(1, 1) == 0.4);
  CHECK(ds.raw_labels == std::vector<long long>{5, 3});

  // The dispatch helper picks the layout from the second path.
  const auto via_pair = load_dataset(xf.string(), yf.string());
  CHECK(via_pair.raw_labels == ds.raw_labels);
  const auto csv = write_file("dispatch.csv", "1,2\n");
  CHECK(load_dataset(csv.string(), std::nullopt).raw_labels == std::vector<long long>{2});

  const auto yshort = write_file("har_y_short.txt", "5\n");
  CHECK_THROWS_AS(load_xy_dataset(xf.string(), yshort.string()), ParseError);
  const auto ywide = write_file("har_y_wide.txt", "5 1\n3 1\n");
  CHECK_THROWS_AS(load_xy_dataset(xf.string(), ywide.string()), ParseError);
}

TEST_CASE("label alignment builds one dense map across splits") {
  const auto f1 = write_file("a.csv", "0,5\n0,9\n");
  const auto f2 = write_file("b.csv", "0,9\n0,11\n");
  auto train = load_csv_dataset(f1.string());
  auto test = load_csv_dataset(f2.string());
  align_labels({&train, &test});

  CHECK(train.class_count == 3);
  CHECK(test.class_count == 3);
  CHECK(train.label_values == std::vector<long long>{5, 9, 11});
  CHECK(test.label_values == train.label_values);
  CHECK(train.y == std::vector<int>{1, 2});
  CHECK(test.y == std::vector<int>{2, 3});
}

TEST_CASE("saved datasets parse back to identical numbers") {
  SplitMix64 rng(51);
  Dataset ds;
  ds.x = Matrix(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    ds.x.at(i, 0) = rng.next_double(-10.0, 10.0);
    ds.x.at(i, 1) = 1.0 / 3.0 * static_cast<double>(i);
    ds.x.at(i, 2) = 1e-17 * static_cast<double>(1 + i);
    ds.raw_labels.push_back(static_cast<long long>(i % 3));
  }
  const auto path = scratch_dir() / "roundtrip.csv";
  save_csv_dataset(path.string(), ds);
  const auto back = load_csv_dataset(path.string());
  REQUIRE(back.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(back.x.at(i, j) == ds.x.at(i, j));
  }
  CHECK(back.raw_labels == ds.raw_labels);
}

TEST_CASE("model serialization round trips bytes exactly") {
  // Extractor weights are stored as 32-bit floats, so the first save narrows
  // them once; after that, save -> load -> save is the identity on bytes and
  // load -> save -> load is the identity on bundles.
  for (const auto& bundle : {hdl_bundle(), nn_bundle(false), nn_bundle(true)}) {
    const auto bytes = serialize_model(bundle);
    const auto once = deserialize_model(bytes);
    REQUIRE(serialize_model(once) == bytes);
    REQUIRE(deserialize_model(serialize_model(once)) == once);
    CHECK(once.kind == bundle.kind);
    CHECK(once.label_values == bundle.label_values);
    CHECK(once.hd == bundle.hd);  // classifier state is stored exactly
    CHECK(once.mlp.has_value() == bundle.mlp.has_value());

    const auto path = scratch_dir() / ("model_" + to_string(bundle.kind) + ".syhd");
    save_model(path.string(), once);
    REQUIRE(load_model(path.string()) == once);
  }

  // A classifier-only bundle has no narrowed fields at all.
  const auto hdl = hdl_bundle();
  CHECK(deserialize_model(serialize_model(hdl)) == hdl);
}

TEST_CASE("model files fail closed on damage") {
  const auto bundle = hdl_bundle();
  auto bytes = serialize_model(bundle);

  // Magic.
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_model(bad_magic), BadMagicError);
  CHECK_THROWS_AS(deserialize_model(std::vector<std::uint8_t>{}), BadMagicError);

  // Version (checked before the checksum, so no fixup needed).
  auto bad_version = bytes;
  bad_version[4] += 1;
  CHECK_THROWS_AS(deserialize_model(bad_version), BadVersionError);

  // Truncation and corruption both surface as checksum failures.
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(deserialize_model(truncated), BadChecksumError);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK_THROWS_AS(deserialize_model(flipped), BadChecksumError);

  CHECK_THROWS_AS(load_model((scratch_dir() / "missing.syhd").string()), IoError);
}

TEST_CASE("model kind names round trip") {
  CHECK(to_string(ModelKind::kHdl) == "hdl");
  CHECK(to_string(ModelKind::kNnHdl) == "nn-hdl");
  CHECK(to_string(ModelKind::kSynergic) == "synergic");
  for (const auto kind : {ModelKind::kHdl, ModelKind::kNnHdl, ModelKind::kSynergic}) {
    CHECK(syhd::model_kind_from_string(to_string(kind)) == kind);
  }
  CHECK(syhd::model_kind_from_string("nn_hdl") == ModelKind::kNnHdl);
  CHECK_THROWS_AS(syhd::model_kind_from_string("frobnicate"), std::invalid_argument);
}

TEST_CASE("fnv1a64 matches the published vectors") {
  const auto of = [](std::string_view s) {
    return fnv1a64({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  };
  CHECK(of("") == 0xcbf29ce484222325ULL);
  CHECK(of("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(of("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("result csv round trips records losslessly") {
  ResultRecord full;
  full.model_kind = "synergic";
  full.dh = 10240;
  full.q = 26;
  full.seed = 7;
  full.ratio = 0.25;
  full.accuracy = 0.9532;
  full.mean_err = 1.0 / 3.0;
  full.std_err = 1e-9;
  full.cycles = 41305;
  full.us = 41305.0 / 344.0;

  ResultRecord sparse;
  sparse.model_kind = "hdl";
  sparse.dh = 16;
  sparse.accuracy = 1.0;

  const std::vector<ResultRecord> records = {full, sparse};
  const auto csv = syhd::result_csv(records);
  CHECK(csv.rfind(std::string(syhd::kResultCsvHeader) + "\n", 0) == 0);

  const auto back = syhd::parse_result_csv(csv);
  REQUIRE(back.size() == 2);
  // Config-echo fields never travel through the CSV; compare the rest.
  CHECK(back[0] == full);
  CHECK(back[1] == sparse);

  CHECK(syhd::result_csv({}) == std::string(syhd::kResultCsvHeader) + "\n");
  CHECK(syhd::parse_result_csv(syhd::result_csv({})).empty());

  CHECK_THROWS_AS(syhd::parse_result_csv("nope\n"), ParseError);
  CHECK_THROWS_AS(
      syhd::parse_result_csv(std::string(syhd::kResultCsvHeader) + "\nhdl,1,2\n"), ParseError);
  CHECK_THROWS_AS(
      syhd::parse_result_csv(std::string(syhd::kResultCsvHeader) +
                             "\nhdl,zz,4,1,,,,,,\n"),
      ParseError);
}

TEST_CASE("jsonl records omit absent fields and echo the config") {
  ResultRecord rec;
  rec.model_kind = "synergic";
  rec.dh = 16;
  rec.accuracy = 0.5;
  rec.epochs = 120;
  rec.max_lr = 0.01;

  const auto jsonl = syhd::result_jsonl(std::vector<ResultRecord>{rec});
  CHECK(jsonl.find("\"model_kind\":\"synergic\"") != std::string::npos);
  CHECK(jsonl.find("\"dh\":16") != std::string::npos);
  CHECK(jsonl.find("\"epochs\":120") != std::string::npos);
  CHECK(jsonl.find("\"max_lr\":0.01") != std::string::npos);
  CHECK(jsonl.find("\"q\"") == std::string::npos);
  CHECK(jsonl.find("\"cycles\"") == std::string::npos);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 1);
  CHECK(syhd::result_jsonl({}).empty());
}

TEST_CASE("write_text_file creates files and reports failures") {
  const auto path = scratch_dir() / "note.txt";
  syhd::write_text_file(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");

  CHECK_THROWS_AS(syhd::write_text_file("/nonexistent_dir_syhd/x.txt", "y"), IoError);
}
