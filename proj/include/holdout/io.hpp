#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holdout/classify.hpp"
#include "holdout/metrics.hpp"
#include "holdout/model.hpp"
#include "holdout/simulate.hpp"
#include "holdout/validate.hpp"

namespace holdout::io {

inline constexpr int kModelFormatVersion = 1;

// total_igg,sars_igg_sum,label
std::vector<RawReading> read_raw_csv(const std::filesystem::path& path);
std::vector<RawReading> read_raw_csv(std::istream& in);
void write_raw_csv(std::ostream& out, const std::vector<RawReading>& rows);

struct DecisionRow {
    double x = 0.0;
    double y = 0.0;
    ClassDecision decision;
    std::optional<Label> label;
};

// x,y,class,z_star,region,label
void write_decisions_csv(std::ostream& out, const std::vector<DecisionRow>& rows);
std::vector<DecisionRow> read_decisions_csv(const std::filesystem::path& path);

struct ModelFile {
    DensityModel positive;
    DensityModel negative;
    std::optional<double> prevalence;
    std::optional<Waterline> waterline;
};

std::string model_to_json(const ModelFile& file);
ModelFile model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

std::string sim_spec_to_json(const SimSpec& spec, const ScaleRecord& scale);
SimSpec sim_spec_from_json(const std::string& text);

std::string report_to_json(const std::optional<ModelMetrics>& model, const EmpiricalMetrics& empirical,
                           const std::optional<Comparison>& comparison);
// Plain-text table: hold-outs, then sensitivity / specificity / accuracy.
std::string report_table(const EmpiricalMetrics& optimal, const std::optional<Comparison>& comparison);

void write_certificate_csv(std::ostream& out, const AccuracyField& field, const Waterline& waterline,
                           const Certificate& cert);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace holdout::io
