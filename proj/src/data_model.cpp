#include "wkappa/data_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "wkappa/error.hpp"

namespace wkappa {

PairedCounts PairedCounts::from_cells(const std::array<double, 8>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!std::isfinite(cells[k]) || cells[k] < 0.0) {
      throw Error(ErrorCode::Ingestion,
                  fmt::format("cell {} must be a finite non-negative count", k + 1));
    }
  }
  return PairedCounts{cells[0], cells[1], cells[2], cells[3],
                      cells[4], cells[5], cells[6], cells[7]};
}

std::array<double, 8> PairedCounts::cells() const {
  return {s11, s10, s01, s00, r11, r10, r01, r00};
}

double PairedCounts::margin(int i, int j) const {
  if (i == 1 && j == 1) return s11 + r11;
  if (i == 1 && j == 0) return s10 + r10;
  if (i == 0 && j == 1) return s01 + r01;
  if (i == 0 && j == 0) return s00 + r00;
  throw Error(ErrorCode::Domain, "margin indices must be 0 or 1");
}

PairedCounts counts_from_records(const std::vector<SubjectRecord>& records) {
  PairedCounts counts;
  for (std::size_t row = 0; row < records.size(); ++row) {
    const auto& rec = records[row];
    auto binary = [](int v) { return v == 0 || v == 1; };
    if (!binary(rec.d) || !binary(rec.t1) || !binary(rec.t2)) {
      throw Error(ErrorCode::Ingestion,
                  fmt::format("record {}: fields must be 0 or 1", row));
    }
    double* cell = nullptr;
    if (rec.d == 1) {
      cell = rec.t1 ? (rec.t2 ? &counts.s11 : &counts.s10)
                    : (rec.t2 ? &counts.s01 : &counts.s00);
    } else {
      cell = rec.t1 ? (rec.t2 ? &counts.r11 : &counts.r10)
                    : (rec.t2 ? &counts.r01 : &counts.r00);
    }
    *cell += 1.0;
  }
  return counts;
}

CountsValidation validate_counts(const PairedCounts& counts) {
  CountsValidation out;
  out.estimable = counts.s() > 0.0 && counts.r() > 0.0;
  static constexpr std::pair<int, int> kMargins[] = {{1, 1}, {1, 0}, {0, 1}, {0, 0}};
  for (auto [i, j] : kMargins) {
    if (counts.margin(i, j) == 0.0) {
      out.degenerate_margins.push_back(fmt::format("{}{}", i, j));
    }
  }
  out.correction_required = out.degenerate_margins.size() >= 2;
  return out;
}

PairedCounts apply_continuity_correction(const PairedCounts& counts) {
  PairedCounts out = counts;
  for (double* cell : {&out.s11, &out.s10, &out.s01, &out.s00, &out.r11, &out.r10,
                       &out.r01, &out.r00}) {
    *cell += 0.5;
  }
  return out;
}

PairedCounts swap_tests(const PairedCounts& counts) {
  PairedCounts out = counts;
  std::swap(out.s10, out.s01);
  std::swap(out.r10, out.r01);
  return out;
}

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

int parse_binary(const std::string& field, std::size_t line_no) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw Error(ErrorCode::Ingestion,
              fmt::format("line {}: expected 0 or 1, got '{}'", line_no, field));
}

}  // namespace

std::vector<SubjectRecord> read_records(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Ingestion, "record file is empty; expected header d,t1,t2");
  }
  ++line_no;
  if (trim(line) != "d,t1,t2") {
    throw Error(ErrorCode::Ingestion,
                fmt::format("line 1: expected header 'd,t1,t2', got '{}'", trim(line)));
  }

  std::vector<SubjectRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw Error(ErrorCode::Ingestion,
                  fmt::format("line {}: expected 3 fields, got {}", line_no, fields.size()));
    }
    records.push_back({parse_binary(fields[0], line_no), parse_binary(fields[1], line_no),
                       parse_binary(fields[2], line_no)});
  }
  return records;
}

std::vector<SubjectRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Ingestion, "cannot open record file: " + path);
  return read_records(in);
}

}  // namespace wkappa
