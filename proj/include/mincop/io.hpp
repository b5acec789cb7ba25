#pragma once

#include "mincop/prob_array.hpp"
#include "mincop/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mincop::io {

/// Raw contents of an array file.
struct ArrayData {
    GridShape shape;
    std::vector<double> values;
};

// Array files: "# d=<d> n=<n>", "# order=row-major", then one value per
// line in linear-index order with 17 significant digits.
void write_array(std::ostream& out, const GridShape& shape, std::span<const double> values);
void write_array(const std::filesystem::path& path, const GridShape& shape, std::span<const double> values);
void write_array(const std::filesystem::path& path, const ProbArray& p);
ArrayData read_array(std::istream& in, const std::string& source = "<stream>");
ArrayData read_array(const std::filesystem::path& path);
ProbArray read_prob_array(const std::filesystem::path& path);

/// Header `v1,...,vd`, one point per row.
void write_samples(std::ostream& out, const std::vector<std::vector<double>>& points, std::size_t dims);
void write_samples(const std::filesystem::path& path, const std::vector<std::vector<double>>& points,
                   std::size_t dims);

/// Columns `cycle,max_abs_change,<constraint names>`.
void write_trace(std::ostream& out, const SolveReport& report);
void write_trace(const std::filesystem::path& path, const SolveReport& report);

/// Plain-text run summary: status, cycle count, residuals, moment values, wall time.
std::string format_summary(const SolveReport& report, double epsilon);

}  // namespace mincop::io
