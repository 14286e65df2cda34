#ifndef MEP_IO_HPP
#define MEP_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "mep/discretize.hpp"

namespace mep {

/// Problem container ("mep3" JSON format): twelve dense complex matrices,
/// application metadata, collocation grid descriptors, kept indices and an
/// optional oracle spectrum. Grids are stored as (n, a, b) and rebuilt on
/// load.
struct ProblemFile {
  BvpProblem bvp;
  std::optional<std::vector<EigenTriple>> oracle;
};

void save_problem(const ProblemFile& pf, const std::string& path);
ProblemFile load_problem(const std::string& path);

/// One row of the result CSV. Optional fields serialize as empty cells.
struct CsvRow {
  int idx = 0;
  EigenTriple value;
  double residual = 0.0;
  std::optional<std::array<int, 3>> index;
  std::optional<double> omega;
};

extern const char* const kCsvHeader;

std::string format_csv(const std::vector<CsvRow>& rows);
void save_csv(const std::vector<CsvRow>& rows, const std::string& path);
std::vector<CsvRow> load_csv(const std::string& path);

/// Oracle spectra are exchanged in the same CSV schema (residual 0, no
/// index/omega columns).
std::vector<CsvRow> oracle_rows(const std::vector<EigenTriple>& spectrum);

struct CompareReport {
  int matched = 0;
  int unmatched = 0;
  double max_mismatch = 0.0;         // over matched rows
  std::vector<int> unmatched_rows;   // idx values of unmatched result rows
  bool ok(double tol) const { return unmatched == 0 && max_mismatch <= tol; }
};

/// Nearest-neighbor matching of result rows against reference rows in
/// (lambda, mu, eta) under the componentwise max norm.
CompareReport compare_spectra(const std::vector<CsvRow>& result,
                              const std::vector<CsvRow>& reference, double tol);

struct SvgPoint {
  double x = 0.0, y = 0.0;
};

/// Minimal static scatter plot.
void save_svg_scatter(const std::vector<SvgPoint>& points,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& path);

}  // namespace mep

#endif
