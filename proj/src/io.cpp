#include "holdout/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace holdout::io {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw DataError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    return v;
}

std::string num(double v, int digits = 17) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<std::string> read_header(std::istream& in, const std::vector<std::string>& expected) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: missing header");
    auto cols = split(line);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= cols.size() || cols[i] != expected[i]) {
            std::string want;
            for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
            throw DataError("CSV header mismatch: expected '" + want + "', got '" + line + "'");
        }
    }
    return cols;
}

json null_if_not_finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double finite_or(const json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

json params_json(const DensityParams& p) {
    return {{"mu", p.mu},         {"sigma", p.sigma},   {"theta", p.theta}, {"alpha1", p.alpha1},
            {"alpha2", p.alpha2}, {"alpha3", p.alpha3}, {"alpha4", p.alpha4}};
}

DensityParams params_from(const json& j) {
    DensityParams p;
    p.mu = j.at("mu").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.theta = j.at("theta").get<double>();
    p.alpha1 = j.at("alpha1").get<double>();
    p.alpha2 = j.at("alpha2").get<double>();
    p.alpha3 = j.at("alpha3").get<double>();
    p.alpha4 = j.at("alpha4").get<double>();
    return p;
}

json model_json(const DensityModel& m) {
    json j = {{"params", params_json(m.params())},
              {"mass_left", m.mass_left()},
              {"mass_right", m.mass_right()},
              {"y_renorm", m.y_renorm()}};
    if (const auto& d = m.diagnostics()) {
        j["diagnostics"] = {{"nll", null_if_not_finite(d->nll)}, {"iterations", d->iterations},
                            {"evaluations", d->evaluations},    {"restarts", d->restarts},
                            {"seed", d->seed},                  {"converged", d->converged}};
    }
    return j;
}

DensityModel model_from(const json& j, const QuadratureSpec& grid, const ScaleRecord& scale) {
    DensityModel m = DensityModel::from_params(params_from(j.at("params")), grid, scale);
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        FitDiagnostics diag;
        diag.nll = finite_or(d.at("nll"), std::numeric_limits<double>::infinity());
        diag.iterations = d.at("iterations").get<int>();
        diag.evaluations = d.at("evaluations").get<int>();
        diag.restarts = d.at("restarts").get<int>();
        diag.seed = d.at("seed").get<std::uint64_t>();
        diag.converged = d.at("converged").get<bool>();
        m.set_diagnostics(diag);
    }
    return m;
}

json waterline_json(const Waterline& w) {
    json trace = json::array();
    for (const auto& s : w.trace) trace.push_back({{"zeta", s.zeta}, {"value", null_if_not_finite(s.value)}});
    return {{"target_x", w.target_x},
            {"z0", w.z0},
            {"z_pos", w.z_pos},
            {"z_neg", w.z_neg},
            {"eps_x", w.eps_x},
            {"max_iter", w.max_iter},
            {"iterations", w.iterations},
            {"converged", w.converged},
            {"unconstrained", w.unconstrained},
            {"c_set_detected", w.c_set_detected},
            {"c_mass_deficit", w.c_mass_deficit},
            {"c_band_low", w.c_band_low},
            {"c_keep_fraction", w.c_keep_fraction},
            {"accuracy_violated", w.accuracy_violated},
            {"bracket_width", w.bracket_width},
            {"trace", trace}};
}

Waterline waterline_from(const json& j) {
    Waterline w;
    w.target_x = j.at("target_x").get<double>();
    w.z0 = j.at("z0").get<double>();
    w.z_pos = j.at("z_pos").get<double>();
    w.z_neg = j.at("z_neg").get<double>();
    w.eps_x = j.at("eps_x").get<double>();
    w.max_iter = j.at("max_iter").get<int>();
    w.iterations = j.at("iterations").get<int>();
    w.converged = j.at("converged").get<bool>();
    w.unconstrained = j.at("unconstrained").get<bool>();
    w.c_set_detected = j.at("c_set_detected").get<bool>();
    w.c_mass_deficit = j.at("c_mass_deficit").get<double>();
    w.c_band_low = j.at("c_band_low").get<double>();
    w.c_keep_fraction = j.at("c_keep_fraction").get<double>();
    w.accuracy_violated = j.at("accuracy_violated").get<bool>();
    w.bracket_width = j.at("bracket_width").get<double>();
    for (const auto& s : j.at("trace"))
        w.trace.push_back({s.at("zeta").get<double>(), finite_or(s.at("value"), std::numeric_limits<double>::infinity())});
    return w;
}

json rate_json(const Rate& r) {
    return {{"successes", r.successes},
            {"trials", r.trials},
            {"value", null_if_not_finite(r.value)},
            {"ci_lower", r.ci.lower},
            {"ci_upper", r.ci.upper},
            {"defined", r.defined}};
}

json empirical_json(const EmpiricalMetrics& m) {
    return {{"true_positive", m.true_positive},
            {"false_positive", m.false_positive},
            {"true_negative", m.true_negative},
            {"false_negative", m.false_negative},
            {"held_positive", m.held_positive},
            {"held_negative", m.held_negative},
            {"sensitivity", rate_json(m.sensitivity)},
            {"specificity", rate_json(m.specificity)},
            {"accuracy", rate_json(m.accuracy)},
            {"holdout_positive", rate_json(m.holdout_positive)},
            {"holdout_negative", rate_json(m.holdout_negative)},
            {"holdout_all", rate_json(m.holdout_all)}};
}

std::string cell(const Rate& r, bool with_ci) {
    std::string s = format_rate(r);
    if (with_ci && r.defined) s += "  " + format_interval(r.ci);
    return s;
}

}  // namespace

std::vector<RawReading> read_raw_csv(std::istream& in) {
    const auto header = read_header(in, {"total_igg", "sars_igg_sum"});
    const bool has_label = header.size() > 2 && header[2] == "label";
    std::vector<RawReading> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (f.size() < 2) throw DataError("line " + std::to_string(line_no) + ": expected at least two columns");
        RawReading r;
        r.total_igg = parse_double(f[0], line_no);
        r.sars_igg_sum = parse_double(f[1], line_no);
        if (r.total_igg < 0.0 || r.sars_igg_sum < 0.0)
            throw DataError("line " + std::to_string(line_no) + ": readouts must be nonnegative");
        if (has_label && f.size() > 2) r.label = parse_label(f[2]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<RawReading> read_raw_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_raw_csv(in);
}

void write_raw_csv(std::ostream& out, const std::vector<RawReading>& rows) {
    out << "total_igg,sars_igg_sum,label\n";
    for (const auto& r : rows)
        out << num(r.total_igg) << ',' << num(r.sars_igg_sum) << ',' << (r.label ? to_string(*r.label) : "unknown")
            << '\n';
}

void write_decisions_csv(std::ostream& out, const std::vector<DecisionRow>& rows) {
    out << "x,y,class,z_star,region,label\n";
    for (const auto& r : rows)
        out << num(r.x) << ',' << num(r.y) << ',' << to_string(r.decision.klass) << ','
            << num(r.decision.local_accuracy) << ',' << to_string(r.decision.region) << ','
            << (r.label ? to_string(*r.label) : "unknown") << '\n';
}

std::vector<DecisionRow> read_decisions_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    read_header(in, {"x", "y", "class", "z_star", "region", "label"});
    std::vector<DecisionRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line);
        if (f.size() != 6) throw DataError("line " + std::to_string(line_no) + ": expected six columns");
        DecisionRow r;
        r.x = parse_double(f[0], line_no);
        r.y = parse_double(f[1], line_no);
        r.decision.klass = parse_klass(f[2]);
        r.decision.local_accuracy = parse_double(f[3], line_no);
        r.decision.region = parse_region(f[4]);
        r.label = parse_label(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::string model_to_json(const ModelFile& file) {
    const DensityModel& pos = file.positive;
    json j = {{"format_version", kModelFormatVersion},
              {"scale", {{"x_max_bits", pos.scale().x_max_bits}, {"y_divisor", pos.scale().y_divisor}}},
              {"grid", {{"n_x", pos.grid().n_x}, {"n_y", pos.grid().n_y}}},
              {"positive", model_json(file.positive)},
              {"negative", model_json(file.negative)}};
    if (file.prevalence) j["prevalence"] = *file.prevalence;
    if (file.waterline) j["waterline"] = waterline_json(*file.waterline);
    return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw DataError("unsupported model format version " + std::to_string(version));
        ScaleRecord scale{j.at("scale").at("x_max_bits").get<double>(), j.at("scale").at("y_divisor").get<double>()};
        QuadratureSpec grid{j.at("grid").at("n_x").get<int>(), j.at("grid").at("n_y").get<int>()};
        ModelFile f;
        f.positive = model_from(j.at("positive"), grid, scale);
        f.negative = model_from(j.at("negative"), grid, scale);
        if (j.contains("prevalence")) f.prevalence = j["prevalence"].get<double>();
        if (j.contains("waterline")) f.waterline = waterline_from(j["waterline"]);
        return f;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file is missing a field: ") + e.what());
    } catch (const DomainError& e) {
        throw DataError(std::string("model file holds invalid parameters: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& file) { write_file(path, model_to_json(file)); }

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

std::string sim_spec_to_json(const SimSpec& spec, const ScaleRecord& scale) {
    json j = {{"positive", params_json(spec.pos_params)},
              {"negative", params_json(spec.neg_params)},
              {"prevalence", spec.prevalence},
              {"n_samples", spec.n_samples},
              {"seed", spec.seed},
              {"censor_lower", spec.censor_lower},
              {"censor_upper", spec.censor_upper},
              {"rng", "mt19937_64 per sample, splitmix64 substream seeds"},
              {"scale", {{"x_max_bits", scale.x_max_bits}, {"y_divisor", scale.y_divisor}}}};
    return j.dump(2) + "\n";
}

SimSpec sim_spec_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        SimSpec s;
        s.pos_params = params_from(j.at("positive"));
        s.neg_params = params_from(j.at("negative"));
        s.prevalence = j.at("prevalence").get<double>();
        s.n_samples = j.at("n_samples").get<std::size_t>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.censor_lower = j.value("censor_lower", 0.0);
        s.censor_upper = j.value("censor_upper", 1.0);
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("simulation spec: ") + e.what());
    }
}

std::string report_to_json(const std::optional<ModelMetrics>& model, const EmpiricalMetrics& empirical,
                           const std::optional<Comparison>& comparison) {
    json j = {{"empirical", empirical_json(empirical)}};
    if (model) {
        j["model"] = {{"target_x", model->target_x},
                      {"mass_p", model->mass_p},
                      {"mass_n", model->mass_n},
                      {"mass_q", model->mass_q},
                      {"sensitivity", null_if_not_finite(model->sensitivity)},
                      {"specificity", null_if_not_finite(model->specificity)},
                      {"restricted_prevalence", null_if_not_finite(model->restricted_prevalence)},
                      {"achieved_accuracy", null_if_not_finite(model->achieved_accuracy)},
                      {"holdout_mass", model->holdout_mass},
                      {"error_total", model->error_total},
                      {"error_restricted", null_if_not_finite(model->error_restricted)}};
    }
    if (comparison) {
        j["rectilinear"] = empirical_json(comparison->rectilinear);
        j["holdout_reduction_percent"] = comparison->holdout_reduction_percent;
    }
    return j.dump(2) + "\n";
}

std::string report_table(const EmpiricalMetrics& optimal, const std::optional<Comparison>& comparison) {
    std::ostringstream out;
    auto row = [&](const std::string& name, const Rate& a, const Rate& b, const Rate& c, bool ci) {
        out << std::left << std::setw(30) << name << std::setw(36) << cell(a, ci) << std::setw(36) << cell(b, ci)
            << cell(c, ci) << '\n';
    };
    out << std::left << std::setw(30) << "" << std::setw(36) << "positive" << std::setw(36) << "negative"
        << "total\n";
    if (comparison) {
        const auto& r = comparison->rectilinear;
        row("holdouts (rectilinear)", r.holdout_positive, r.holdout_negative, r.holdout_all, false);
    }
    row("holdouts (optimal)", optimal.holdout_positive, optimal.holdout_negative, optimal.holdout_all, false);
    out << '\n';
    out << std::left << std::setw(30) << "" << std::setw(36) << "sensitivity" << std::setw(36) << "specificity"
        << "accuracy\n";
    if (comparison) {
        const auto& r = comparison->rectilinear;
        row("classification (rectilinear)", r.sensitivity, r.specificity, r.accuracy, true);
    }
    row("classification (optimal)", optimal.sensitivity, optimal.specificity, optimal.accuracy, true);
    if (comparison) {
        out << '\n' << "hold-out reduction vs rectilinear: " << num(comparison->holdout_reduction_percent, 4)
            << " %\n";
    }
    return out.str();
}

void write_certificate_csv(std::ostream& out, const AccuracyField& field, const Waterline& waterline,
                           const Certificate& cert) {
    out << "# target_x=" << num(cert.target_x) << " z0=" << num(waterline.z0) << " eps_grid=" << num(cert.eps_grid)
        << " passed=" << (cert.passed ? "true" : "false") << (cert.vacuous ? " vacuous" : "") << '\n';
    out << "# minima are taken over grid cells only and bound the discretized problem\n";
    out << "x,y,region,z_star,log_set_partial\n";
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double v = cert.log_set_partial.empty() ? std::nan("") : cert.log_set_partial[i];
        out << num(field.x[i], 10) << ',' << num(field.y[i], 10) << ',' << to_string(field.region[i]) << ','
            << num(field.z[i]) << ',' << (std::isnan(v) ? std::string("") : num(v)) << '\n';
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << contents;
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace holdout::io
