#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace wkappa {

// Cell counts of the paired 2x2x2 layout. s_ij counts diseased subjects with
// T1=i, T2=j; r_ij the non-diseased ones. Cells are reals so that
// continuity-corrected tables flow through the estimators unchanged.
struct PairedCounts {
  double s11 = 0, s10 = 0, s01 = 0, s00 = 0;
  double r11 = 0, r10 = 0, r01 = 0, r00 = 0;

  // Throws ErrorCode::Ingestion on a negative or non-finite cell.
  static PairedCounts from_cells(const std::array<double, 8>& cells);

  // Cell order (s11, s10, s01, s00, r11, r10, r01, r00).
  std::array<double, 8> cells() const;

  double s() const { return s11 + s10 + s01 + s00; }
  double r() const { return r11 + r10 + r01 + r00; }
  double n() const { return s() + r(); }

  // Column margin s_ij + r_ij.
  double margin(int i, int j) const;

  bool operator==(const PairedCounts&) const = default;
};

struct SubjectRecord {
  int d = 0;
  int t1 = 0;
  int t2 = 0;
};

struct CountsValidation {
  bool estimable = false;
  // Zero column margins, named "11", "10", "01", "00".
  std::vector<std::string> degenerate_margins;
  bool correction_required = false;
};

// Throws ErrorCode::Ingestion naming the (zero-based) offending record.
PairedCounts counts_from_records(const std::vector<SubjectRecord>& records);

CountsValidation validate_counts(const PairedCounts& counts);

PairedCounts apply_continuity_correction(const PairedCounts& counts);

// Relabels test 1 as test 2 and vice versa (s10<->s01, r10<->r01).
PairedCounts swap_tests(const PairedCounts& counts);

// Record file: header `d,t1,t2`, one subject per line, values 0/1.
// Errors carry the 1-based line number.
std::vector<SubjectRecord> read_records(std::istream& in);
std::vector<SubjectRecord> read_records_file(const std::string& path);

}  // namespace wkappa
