// report.hpp
// Result CSV schemas, parsing, and the summaries recomputed from them.
// Summaries depend on the CSV contents only.

#pragma once

#include "mublab/qaoa.hpp"
#include "mublab/qrao.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mublab {

struct SchemaError : Error {
    using Error::Error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; throws SchemaError when absent.
    std::size_t col(const std::string& name) const;
    void require(const std::vector<std::string>& columns) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);
std::string format_double(double x);  // round-trip exact

extern const std::vector<std::string> kQaoaColumns;
extern const std::vector<std::string> kQraoColumns;

std::vector<std::string> qaoa_csv_row(const MethodRecord& r, const std::string& config_hash);
std::vector<std::string> qrao_csv_row(const StrategyRecord& r, const std::string& config_hash);

/// Parses rows and checks that every row carries the same config hash,
/// returned through `config_hash`.
std::vector<MethodRecord> qaoa_records_from_csv(const CsvTable& t, std::string* config_hash = nullptr);
std::vector<StrategyRecord> qrao_records_from_csv(const CsvTable& t, std::string* config_hash = nullptr);

struct QaoaSummaryOptions {
    double bootstrap_level = 0.9;
    int bootstrap_resamples = 2000;
};

/// Paired statistics overall and per family, plus the MIS direction check
/// with a bootstrap interval. The bootstrap stream is keyed by the config hash.
nlohmann::json qaoa_summary(const std::vector<MethodRecord>& records, const std::string& config_hash,
                            const QaoaSummaryOptions& opt = {});
/// Per-strategy summaries overall and per (n, p) slice.
nlohmann::json qrao_summary(const std::vector<StrategyRecord>& records, const std::string& config_hash);

/// family,n,p,method,cases,mean_decoded_ratio,mean_postselected_ratio,solved_rate
CsvTable qaoa_facets(const std::vector<MethodRecord>& records);
/// n,p,strategy,cells,mean_alpha_r,mean_alpha_c,solved_rate,mean_family_evals
CsvTable qrao_facets(const std::vector<StrategyRecord>& records);

/// Replaces the runtime_s column with a fixed token so two result files can
/// be compared byte for byte.
CsvTable mask_runtime(CsvTable t);

}  // namespace mublab
