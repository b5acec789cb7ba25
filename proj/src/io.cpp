#include "mincop/io.hpp"

#include "mincop/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace mincop::io {

namespace {

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

void write_array(std::ostream& out, const GridShape& shape, std::span<const double> values) {
    if (values.size() != shape.size()) fail(ErrorKind::ShapeError, "value count does not match the grid");
    out << "# d=" << shape.dims() << " n=" << shape.n() << "\n# order=row-major\n";
    for (double v : values) out << format17(v) << '\n';
}

void write_array(const std::filesystem::path& path, const GridShape& shape, std::span<const double> values) {
    auto out = open_out(path);
    write_array(out, shape, values);
    finish(out, path);
}

void write_array(const std::filesystem::path& path, const ProbArray& p) { write_array(path, p.shape(), p.values()); }

ArrayData read_array(std::istream& in, const std::string& source) {
    auto parse_error = [&](std::size_t line, const std::string& what) {
        fail(ErrorKind::IoError, source + ":" + std::to_string(line) + ": " + what);
    };

    std::string line;
    if (!std::getline(in, line)) parse_error(1, "missing header '# d=<d> n=<n>'");
    unsigned long d = 0;
    unsigned long n = 0;
    char tail = 0;
    if (std::sscanf(trim(line).c_str(), "# d=%lu n=%lu%c", &d, &n, &tail) != 2) {
        parse_error(1, "expected '# d=<d> n=<n>', got '" + line + "'");
    }
    if (!std::getline(in, line) || trim(line) != "# order=row-major") {
        parse_error(2, "expected '# order=row-major'");
    }
    std::optional<GridShape> parsed;
    try {
        parsed.emplace(d, n);
    } catch (const Error& e) {
        parse_error(1, e.what());
    }
    const GridShape shape = *parsed;

    std::vector<double> values;
    values.reserve(shape.size());
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty()) continue;
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
            parse_error(line_no, "not a number: '" + text + "'");
        }
        values.push_back(v);
    }
    if (values.size() != shape.size()) {
        parse_error(line_no, "expected " + std::to_string(shape.size()) + " values, found " +
                                 std::to_string(values.size()));
    }
    return {shape, std::move(values)};
}

ArrayData read_array(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return read_array(in, path.string());
}

ProbArray read_prob_array(const std::filesystem::path& path) {
    auto data = read_array(path);
    return {data.shape, std::move(data.values)};
}

void write_samples(std::ostream& out, const std::vector<std::vector<double>>& points, std::size_t dims) {
    for (std::size_t a = 0; a < dims; ++a) out << (a ? ",v" : "v") << a + 1;
    out << '\n';
    for (const auto& p : points) {
        if (p.size() != dims) fail(ErrorKind::ShapeError, "sample point has the wrong dimension");
        for (std::size_t a = 0; a < dims; ++a) out << (a ? "," : "") << format17(p[a]);
        out << '\n';
    }
}

void write_samples(const std::filesystem::path& path, const std::vector<std::vector<double>>& points,
                   std::size_t dims) {
    auto out = open_out(path);
    write_samples(out, points, dims);
    finish(out, path);
}

void write_trace(std::ostream& out, const SolveReport& report) {
    out << "cycle,max_abs_change";
    for (const auto& name : report.constraint_names) out << ',' << name;
    out << '\n';
    for (const auto& rec : report.trace) {
        out << rec.cycle << ',' << format17(rec.max_abs_change);
        for (double r : rec.residuals) out << ',' << format17(r);
        out << '\n';
    }
}

void write_trace(const std::filesystem::path& path, const SolveReport& report) {
    auto out = open_out(path);
    write_trace(out, report);
    finish(out, path);
}

std::string format_summary(const SolveReport& report, double epsilon) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "Procedure: " << (report.procedure == Procedure::Gis ? "I (generalized iterative scaling)"
                                                                 : "II (exponential tilt)")
       << '\n';
    const double last = report.trace.empty() ? 0.0 : report.trace.back().max_abs_change;
    if (report.failure) {
        os << "Status: failed at constraint " << report.failure->constraint << " after " << report.cycles_run
           << " completed cycles\n"
           << "Error: " << report.failure->message << '\n';
    } else if (report.converged) {
        os << "Status: numerical convergence reached after " << report.cycles_run << " cycles\n"
           << "Max abs change: " << std::scientific << last << " < epsilon = " << epsilon << std::defaultfloat
           << '\n';
    } else {
        os << "Status: no convergence after " << report.cycles_run << " cycles\n"
           << "Max abs change: " << std::scientific << last << " >= epsilon = " << epsilon << std::defaultfloat
           << '\n'
           << "Suspected inconsistent constraints (heuristic plateau test): "
           << (report.suspected_inconsistent ? "yes" : "no") << '\n';
    }
    os << "Residuals:\n";
    for (const auto& r : report.final_residuals) {
        os << "  " << std::left << std::setw(10) << r.name << std::right;
        if (r.is_moment) {
            os << " moment " << std::setprecision(12) << r.value << " target " << r.target
               << std::setprecision(6) << " abs error " << std::scientific << r.error << std::defaultfloat << '\n';
        } else {
            os << " max abs margin error " << std::scientific << r.error << std::defaultfloat << '\n';
        }
    }
    os << "Wall time: " << std::fixed << std::setprecision(3) << report.wall_seconds << " s\n";
    return os.str();
}

}  // namespace mincop::io
