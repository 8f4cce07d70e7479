#ifndef LFCM_IO_HPP
#define LFCM_IO_HPP

#include "lfcm/discovery.hpp"
#include "lfcm/eval.hpp"
#include "lfcm/graph.hpp"
#include "lfcm/linalg.hpp"
#include "lfcm/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lfcm::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// {num_latent, observed_names, cluster_of, obs_to_latent}
nlohmann::json lfcm_to_json(const Lfcm& g);
Lfcm lfcm_from_json(const nlohmann::json& j);

// {nodes: [{name, kind}], edges: [[parent, child, weight]], noise_var}
nlohmann::json scm_to_json(const LinearScm& scm);
LinearScm scm_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const DiscoveryTrace& trace);

// Header row of names, then one row per sample. '.' decimals, LF endings.
void write_csv(std::ostream& out, const DataMatrix& data);
DataMatrix read_csv(std::istream& in);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
DataMatrix read_csv_file(const std::filesystem::path& path);
void write_csv_file(const std::filesystem::path& path, const DataMatrix& data);
nlohmann::json read_json_file(const std::filesystem::path& path);
// Two-space indent plus trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

enum class MetricKind { ClusterPairs, Edges };

struct MetricsRow {
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    Confusion confusion;
    MetricKind kind = MetricKind::ClusterPairs;
    std::string method;  // only written when the table has a method column
};

// alpha,seed,tp,fp,fn,tn,fpr,tpr,metric_kind[,method]; missing values as NA.
std::string metrics_csv(const std::vector<MetricsRow>& rows, bool with_method = false);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

}  // namespace lfcm::io

#endif  // LFCM_IO_HPP
