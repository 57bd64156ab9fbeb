#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syhd {

// One experiment result row. Absent fields stay empty in CSV and are omitted
// from the line-delimited records; wall-clock time is never part of a record.
struct ResultRecord {
  std::string model_kind;
  std::optional<std::uint64_t> dh;
  std::optional<int> q;
  std::optional<std::uint64_t> seed;
  std::optional<double> ratio;
  std::optional<double> accuracy;
  std::optional<double> mean_err;
  std::optional<double> std_err;
  std::optional<std::uint64_t> cycles;
  std::optional<double> us;

  // Config echo, carried by the line-delimited records only (the CSV keeps
  // its fixed plot-ready columns).
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> max_lr;
  std::optional<double> l2;
  std::optional<std::uint64_t> dnn;
  std::optional<int> repetitions;

  bool operator==(const ResultRecord&) const = default;
};

inline constexpr std::string_view kResultCsvHeader =
    "model_kind,dh,q,seed,ratio,accuracy,mean_err,std_err,cycles,us";

// Plot-ready CSV: header always present, one row per record, shortest
// round-trip number formatting so parse_result_csv is lossless.
std::string result_csv(std::span<const ResultRecord> records);
std::vector<ResultRecord> parse_result_csv(std::string_view text);

// One JSON object per line, keys in header order, absent fields omitted.
std::string result_jsonl(std::span<const ResultRecord> records);

// Throws IoError when the path cannot be created or written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace syhd
