#include "syhd/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "syhd/errors.hpp"
#include "syhd/numfmt.hpp"

namespace syhd {

namespace {

template <typename T>
void append_cell(std::string& out, const std::optional<T>& value) {
  out.push_back(',');
  if (value) out += to_shortest(*value);
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
std::optional<T> parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell.empty()) return std::nullopt;
  T value{};
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("bad result cell '" + cell + "'", line_no);
  }
  return value;
}

}  // namespace

std::string result_csv(std::span<const ResultRecord> records) {
  std::string out(kResultCsvHeader);
  out.push_back('\n');
  for (const ResultRecord& r : records) {
    out += r.model_kind;
    append_cell(out, r.dh);
    append_cell(out, r.q);
    append_cell(out, r.seed);
    append_cell(out, r.ratio);
    append_cell(out, r.accuracy);
    append_cell(out, r.mean_err);
    append_cell(out, r.std_err);
    append_cell(out, r.cycles);
    append_cell(out, r.us);
    out.push_back('\n');
  }
  return out;
}

std::vector<ResultRecord> parse_result_csv(std::string_view text) {
  std::vector<ResultRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kResultCsvHeader) throw ParseError("unexpected result header", 1);
      continue;
    }
    const auto cells = split_line(line);
    if (cells.size() != 10) throw ParseError("expected 10 result cells", line_no);
    ResultRecord r;
    r.model_kind = cells[0];
    r.dh = parse_cell<std::uint64_t>(cells[1], line_no);
    r.q = parse_cell<int>(cells[2], line_no);
    r.seed = parse_cell<std::uint64_t>(cells[3], line_no);
    r.ratio = parse_cell<double>(cells[4], line_no);
    r.accuracy = parse_cell<double>(cells[5], line_no);
    r.mean_err = parse_cell<double>(cells[6], line_no);
    r.std_err = parse_cell<double>(cells[7], line_no);
    r.cycles = parse_cell<std::uint64_t>(cells[8], line_no);
    r.us = parse_cell<double>(cells[9], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::string result_jsonl(std::span<const ResultRecord> records) {
  std::string out;
  for (const ResultRecord& r : records) {
    nlohmann::ordered_json obj;
    if (!r.model_kind.empty()) obj["model_kind"] = r.model_kind;
    if (r.dh) obj["dh"] = *r.dh;
    if (r.q) obj["q"] = *r.q;
    if (r.seed) obj["seed"] = *r.seed;
    if (r.ratio) obj["ratio"] = *r.ratio;
    if (r.accuracy) obj["accuracy"] = *r.accuracy;
    if (r.mean_err) obj["mean_err"] = *r.mean_err;
    if (r.std_err) obj["std_err"] = *r.std_err;
    if (r.cycles) obj["cycles"] = *r.cycles;
    if (r.us) obj["us"] = *r.us;
    if (r.epochs) obj["epochs"] = *r.epochs;
    if (r.batch_size) obj["batch_size"] = *r.batch_size;
    if (r.max_lr) obj["max_lr"] = *r.max_lr;
    if (r.l2) obj["l2"] = *r.l2;
    if (r.dnn) obj["dnn"] = *r.dnn;
    if (r.repetitions) obj["repetitions"] = *r.repetitions;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  file.flush();
  if (!file) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace syhd
