#include "mincop/cli.hpp"

#include "mincop/error.hpp"
#include "mincop/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mincop::cli {

namespace {

using nlohmann::json;

// Arrays beyond 2^27 cells (1 GiB each) are refused before allocation.
constexpr std::size_t kMaxCells = std::size_t{1} << 27;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    fail(ErrorKind::ConfigError, field + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& field) {
    const auto it = obj.find(key);
    if (it == obj.end()) config_error(field, std::string("missing field '") + key + "'");
    return *it;
}

void expect_object(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_error(field, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            config_error(field, "unknown field '" + key + "'");
        }
    }
}

std::uint64_t as_unsigned(const json& j, const std::string& field, std::uint64_t min_value) {
    if (!j.is_number_integer()) config_error(field, "expected an integer");
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v < min_value) config_error(field, "must be at least " + std::to_string(min_value));
        return v;
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::uint64_t>(v) < min_value) {
        config_error(field, "must be at least " + std::to_string(min_value));
    }
    return static_cast<std::uint64_t>(v);
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) config_error(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) config_error(field, "must be finite");
    return v;
}

const std::string& as_string(const json& j, const std::string& field) {
    if (!j.is_string()) config_error(field, "expected a string");
    return j.get_ref<const std::string&>();
}

fs::path resolve(const std::string& raw, const fs::path& base_dir) {
    const fs::path p(raw);
    return p.is_absolute() ? p : base_dir / p;
}

fs::path input_path(const json& j, const std::string& field, const fs::path& base_dir) {
    const std::string& raw = as_string(j, field);
    if (raw.empty()) config_error(field, "empty path");
    fs::path p = resolve(raw, base_dir);
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) config_error(field, "no such file '" + p.string() + "'");
    return p;
}

fs::path output_path(const json& j, const std::string& field, const fs::path& base_dir) {
    const std::string& raw = as_string(j, field);
    if (raw.empty()) config_error(field, "empty path");
    return resolve(raw, base_dir);
}

Axes parse_axes(const json& j, const std::string& field, std::size_t d) {
    if (!j.is_array() || j.empty()) config_error(field, "expected a non-empty array of axis numbers");
    Axes axes;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto a = as_unsigned(j[k], field + "[" + std::to_string(k) + "]", 1);
        if (a > d) config_error(field, "axis " + std::to_string(a) + " exceeds d = " + std::to_string(d));
        axes.push_back(static_cast<std::size_t>(a - 1));
    }
    std::sort(axes.begin(), axes.end());
    if (std::adjacent_find(axes.begin(), axes.end()) != axes.end()) config_error(field, "repeated axis");
    return axes;
}

SolverConfig parse_solver(const json& j, const std::string& field) {
    expect_object(j, field, {"procedure", "epsilon", "max_cycles", "gis_inner_iters", "plateau"});
    SolverConfig cfg;
    if (j.contains("procedure")) {
        const std::string& p = as_string(j["procedure"], field + ".procedure");
        if (p == "gis") {
            cfg.procedure = Procedure::Gis;
        } else if (p == "tilt") {
            cfg.procedure = Procedure::Tilt;
        } else {
            config_error(field + ".procedure", "expected \"gis\" or \"tilt\", got \"" + p + "\"");
        }
    }
    if (j.contains("epsilon")) cfg.epsilon = as_number(j["epsilon"], field + ".epsilon");
    if (j.contains("max_cycles")) cfg.max_cycles = as_unsigned(j["max_cycles"], field + ".max_cycles", 1);
    if (j.contains("gis_inner_iters")) {
        cfg.gis_inner_iters = as_unsigned(j["gis_inner_iters"], field + ".gis_inner_iters", 1);
    }
    if (j.contains("plateau")) {
        const json& p = j["plateau"];
        expect_object(p, field + ".plateau", {"window", "rel_tol"});
        if (p.contains("window")) cfg.plateau.window = as_unsigned(p["window"], field + ".plateau.window", 2);
        if (p.contains("rel_tol")) cfg.plateau.rel_tol = as_number(p["rel_tol"], field + ".plateau.rel_tol");
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        config_error(field, e.message());
    }
    return cfg;
}

SampleRequest parse_samples(const json& j, const std::string& field, const fs::path& base_dir) {
    expect_object(j, field, {"count", "seed", "mode", "path"});
    SampleRequest req;
    req.count = as_unsigned(require(j, "count", field), field + ".count", 1);
    if (j.contains("seed")) req.seed = as_unsigned(j["seed"], field + ".seed", 0);
    if (j.contains("mode")) {
        const std::string& m = as_string(j["mode"], field + ".mode");
        if (m == "cell_centers") {
            req.mode = SampleMode::CellCenters;
        } else if (m == "continuous") {
            req.mode = SampleMode::Continuous;
        } else {
            config_error(field + ".mode", "expected \"cell_centers\" or \"continuous\", got \"" + m + "\"");
        }
    }
    req.path = output_path(require(j, "path", field), field + ".path", base_dir);
    return req;
}

RunConfig parse_document(const json& root, const fs::path& base_dir) {
    expect_object(root, "config", {"grid", "reference", "margins", "moments", "solver", "output"});
    RunConfig cfg;

    const json& grid = require(root, "grid", "config");
    expect_object(grid, "grid", {"d", "n"});
    cfg.d = as_unsigned(require(grid, "d", "grid"), "grid.d", 2);
    cfg.n = as_unsigned(require(grid, "n", "grid"), "grid.n", 2);
    std::size_t cells = 1;
    for (std::size_t k = 0; k < cfg.d; ++k) {
        if (cells > kMaxCells / cfg.n) config_error("grid", "n^d exceeds " + std::to_string(kMaxCells) + " cells");
        cells *= cfg.n;
    }

    if (root.contains("reference")) {
        const json& ref = root["reference"];
        if (ref.is_string()) {
            if (ref.get_ref<const std::string&>() != "uniform") {
                config_error("reference", "expected \"uniform\" or {\"file\": path}");
            }
        } else {
            expect_object(ref, "reference", {"file"});
            cfg.reference = input_path(require(ref, "file", "reference"), "reference.file", base_dir);
        }
    }

    if (root.contains("margins")) {
        const json& margins = root["margins"];
        if (!margins.is_array()) config_error("margins", "expected an array");
        for (std::size_t k = 0; k < margins.size(); ++k) {
            const std::string field = "margins[" + std::to_string(k) + "]";
            const json& m = margins[k];
            expect_object(m, field, {"axes", "source"});
            MarginEntry entry;
            entry.axes = parse_axes(require(m, "axes", field), field + ".axes", cfg.d);
            if (entry.axes.size() < 2) config_error(field + ".axes", "singleton margins are implicit");
            const json& src = require(m, "source", field);
            const std::string sfield = field + ".source";
            if (src.is_object() && src.contains("file")) {
                expect_object(src, sfield, {"file"});
                entry.source = FileSource{input_path(src["file"], sfield + ".file", base_dir)};
            } else {
                expect_object(src, sfield, {"family", "param"});
                FamilySource fam;
                fam.family = as_string(require(src, "family", sfield), sfield + ".family");
                if (src.contains("param")) fam.param = as_number(src["param"], sfield + ".param");
                entry.source = fam;
            }
            cfg.margins.push_back(std::move(entry));
        }
    }

    if (root.contains("moments")) {
        const json& moments = root["moments"];
        if (!moments.is_array()) config_error("moments", "expected an array");
        for (std::size_t k = 0; k < moments.size(); ++k) {
            const std::string field = "moments[" + std::to_string(k) + "]";
            const json& m = moments[k];
            expect_object(m, field, {"axes", "moment", "target"});
            MomentEntry entry;
            entry.axes = parse_axes(require(m, "axes", field), field + ".axes", cfg.d);
            if (entry.axes.size() < 2) config_error(field + ".axes", "a moment needs at least two axes");
            const json& mom = require(m, "moment", field);
            if (mom.is_string()) {
                if (mom.get_ref<const std::string&>() != "spearman_rho") {
                    config_error(field + ".moment", "expected \"spearman_rho\" or {\"file\": path}");
                }
                entry.moment = SpearmanMoment{};
            } else {
                expect_object(mom, field + ".moment", {"file"});
                entry.moment =
                    FileSource{input_path(require(mom, "file", field + ".moment"), field + ".moment.file", base_dir)};
            }
            entry.target = as_number(require(m, "target", field), field + ".target");
            cfg.moments.push_back(std::move(entry));
        }
    }

    if (root.contains("solver")) cfg.solver = parse_solver(root["solver"], "solver");

    if (root.contains("output")) {
        const json& out = root["output"];
        expect_object(out, "output", {"result", "trace", "summary", "samples"});
        if (out.contains("result")) cfg.output.result = output_path(out["result"], "output.result", base_dir);
        if (out.contains("trace")) cfg.output.trace = output_path(out["trace"], "output.trace", base_dir);
        if (out.contains("summary")) cfg.output.summary = output_path(out["summary"], "output.summary", base_dir);
        if (out.contains("samples")) cfg.output.samples = parse_samples(out["samples"], "output.samples", base_dir);
    }
    return cfg;
}

template <class F>
auto with_field(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), field + ": " + e.message());
    }
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigError, e.what());
    }
    try {
        return parse_document(root, base_dir);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, e.what());
    }
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), path.parent_path());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

ProblemSpec build_spec(const RunConfig& config) {
    const GridShape shape = with_field("grid", [&] { return GridShape(config.d, config.n); });
    std::optional<ProbArray> reference;
    if (config.reference) {
        reference = with_field("reference", [&] {
            ProbArray r = io::read_prob_array(*config.reference);
            if (!(r.shape() == shape)) {
                fail(ErrorKind::ShapeError, "array is " + to_string(r.shape()) + ", grid is " + to_string(shape));
            }
            return r;
        });
    }
    ProblemSpec spec(shape, std::move(reference));

    for (std::size_t k = 0; k < config.margins.size(); ++k) {
        const MarginEntry& entry = config.margins[k];
        with_field("margins[" + std::to_string(k) + "]", [&] {
            const GridShape sub(entry.axes.size(), config.n);
            ProbArray target = std::visit(
                [&](const auto& src) -> ProbArray {
                    using T = std::decay_t<decltype(src)>;
                    if constexpr (std::is_same_v<T, FamilySource>) {
                        return skeleton_from_copula(make_family(src.family, src.param, entry.axes.size()), sub);
                    } else {
                        ProbArray p = io::read_prob_array(src.path);
                        if (!(p.shape() == sub)) {
                            fail(ErrorKind::ShapeError,
                                 "array is " + to_string(p.shape()) + ", expected " + to_string(sub));
                        }
                        return p;
                    }
                },
                entry.source);
            spec.add_margin(MarginConstraint(entry.axes, std::move(target)));
        });
    }

    for (std::size_t k = 0; k < config.moments.size(); ++k) {
        const MomentEntry& entry = config.moments[k];
        with_field("moments[" + std::to_string(k) + "]", [&] {
            if (std::holds_alternative<SpearmanMoment>(entry.moment)) {
                if (entry.axes.size() != 2) fail(ErrorKind::InvalidAxes, "spearman_rho needs exactly two axes");
                spec.add_moment(MomentConstraint(entry.axes, spearman_moment_array(shape, entry.axes), entry.target));
                return;
            }
            auto data = io::read_array(std::get<FileSource>(entry.moment).path);
            const GridShape reduced(entry.axes.size(), config.n);
            if (data.shape == reduced) {
                spec.add_moment(MomentConstraint::from_reduced(shape, entry.axes, data.values, entry.target));
            } else if (data.shape == shape) {
                spec.add_moment(MomentConstraint(entry.axes, MomentArray(shape, std::move(data.values)), entry.target));
            } else {
                fail(ErrorKind::ShapeError, "moment array is " + to_string(data.shape) + ", expected " +
                                                to_string(reduced) + " or " + to_string(shape));
            }
        });
    }
    return spec;
}

}  // namespace mincop::cli
