#pragma once

// On-disk formats: spectrum tables, eigenspace dumps, compressed operators,
// convergence reports, cluster tables and the run manifest. Reals are
// written with 17 significant digits so reruns are byte-identical.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gasket/clusters.hpp"
#include "gasket/decimation.hpp"
#include "gasket/eigenbasis.hpp"
#include "gasket/operators.hpp"
#include "gasket/szego.hpp"

namespace gasket::io {

inline constexpr const char* kVersion = "0.1.0";

std::string format_real(double x);

/// Header `value,series,birth,multiplicity,branches`, one row per record,
/// footer `# cutoff=<cutoff>,d_Lambda=<dimension>`.
void write_spectrum_csv(const SpectrumTable& table, const std::filesystem::path& path);

struct SpectrumCsv {
  std::vector<EigenvalueRecord> rows;  ///< value, series, birth, multiplicity, branches only
  double cutoff = 0.0;
  std::int64_t footer_dimension = 0;
};
SpectrumCsv read_spectrum_csv(const std::filesystem::path& path);

/// Binary dump: a text header line (level, record key, graph value in hex
/// float, rows, cols) followed by the row-major doubles.
void dump_bundle(const EigenspaceBundle& bundle, const std::filesystem::path& path);
EigenspaceBundle load_bundle(const std::filesystem::path& path);

/// Square matrix as CSV plus a JSON sidecar with basis metadata.
void write_operator(const CompressedOperator& op, const std::filesystem::path& csv,
                    const std::filesystem::path& sidecar);

/// `index,d,value,abs_error,head_mass,tail_mass`.
void write_report_csv(const ConvergenceReport& report, const std::filesystem::path& path);
nlohmann::json report_json(const ConvergenceReport& report);
/// log10 abs_error against index as an SVG polyline.
void write_report_svg(const ConvergenceReport& report, const std::filesystem::path& path);

/// `j,center,position,weight`.
void write_cluster_csv(const ClusterScan& scan, const std::filesystem::path& path);

struct MomentRow {
  int j = 0;
  int k = 0;
  double moment = 0.0;
  double target = 0.0;
};
/// `j,k,moment,target,abs_error`.
void write_moments_csv(const std::vector<MomentRow>& rows, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

std::string sha256_file(const std::filesystem::path& path);

/// manifest.json with the config echo, library versions, stage timings and
/// checksums of every listed output.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& config,
                    const std::vector<std::pair<std::string, double>>& timings,
                    const std::vector<std::filesystem::path>& outputs);

}  // namespace gasket::io
