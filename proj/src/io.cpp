#include "gasket/io.hpp"

#include <Eigen/Core>
#include <fmt/format.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gasket/error.hpp"

namespace gasket::io {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorKind::Structural, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorKind::Structural, "cannot read " + path.string());
  return in;
}

std::string index_text(double index) {
  if (index == std::floor(index) && std::abs(index) < 1e15) return fmt::format("{}", static_cast<long long>(index));
  return format_real(index);
}

EigenvalueRecord record_from_key(const std::string& key) {
  const auto a = key.find(':');
  const auto b = key.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw Error(ErrorKind::Structural, "malformed record key '" + key + "'");
  return make_record(std::stoi(key.substr(0, a)), std::stoi(key.substr(a + 1, b - a - 1)), key.substr(b + 1));
}

nlohmann::json basis_json(const BasisVector& v) {
  return {{"record", v.record_key}, {"index", v.index},     {"lambda", v.lambda},
          {"graph_value", v.graph_value}, {"birth", v.birth}, {"support", v.support.to_string()}};
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

void write_spectrum_csv(const SpectrumTable& table, const fs::path& path) {
  auto out = open_out(path);
  out << "value,series,birth,multiplicity,branches\n";
  for (const auto& r : table.records)
    out << format_real(r.value) << ',' << r.series << ',' << r.birth << ',' << r.multiplicity << ','
        << r.branches << '\n';
  out << "# cutoff=" << format_real(table.cutoff) << ",d_Lambda=" << table.dimension() << '\n';
}

SpectrumCsv read_spectrum_csv(const fs::path& path) {
  auto in = open_in(path);
  SpectrumCsv out;
  std::string line;
  std::getline(in, line);
  if (line != "value,series,birth,multiplicity,branches")
    throw Error(ErrorKind::Structural, "unexpected spectrum header in " + path.string());
  bool footer = false;
  while (std::getline(in, line)) {
    if (line.rfind("# cutoff=", 0) == 0) {
      const auto comma = line.find(",d_Lambda=");
      out.cutoff = std::stod(line.substr(9, comma - 9));
      out.footer_dimension = std::stoll(line.substr(comma + 10));
      footer = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() == 4) f.emplace_back();
    if (f.size() != 5) throw Error(ErrorKind::Structural, "malformed spectrum row '" + line + "'");
    EigenvalueRecord r;
    r.value = std::stod(f[0]);
    r.series = std::stoi(f[1]);
    r.birth = std::stoi(f[2]);
    r.multiplicity = std::stoll(f[3]);
    r.branches = f[4];
    out.rows.push_back(r);
  }
  if (!footer) throw Error(ErrorKind::Structural, "spectrum file lacks the cutoff footer");
  return out;
}

void dump_bundle(const EigenspaceBundle& bundle, const fs::path& path) {
  auto out = open_out(path, true);
  const auto& v = bundle.vectors;
  out << "gasket-bundle " << bundle.level << ' ' << bundle.record.key() << ' '
      << fmt::format("{:a}", bundle.graph_value) << ' ' << v.rows() << ' ' << v.cols() << '\n';
  out.write(reinterpret_cast<const char*>(v.data().data()),
            static_cast<std::streamsize>(v.data().size() * sizeof(double)));
}

EigenspaceBundle load_bundle(const fs::path& path) {
  auto in = open_in(path, true);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, key, graph;
  EigenspaceBundle b;
  std::size_t rows = 0, cols = 0;
  hs >> magic >> b.level >> key >> graph >> rows >> cols;
  if (magic != "gasket-bundle" || !hs) throw Error(ErrorKind::Structural, "not a bundle dump: " + path.string());
  b.record = record_from_key(key);
  b.graph_value = std::strtod(graph.c_str(), nullptr);
  b.vectors = Matrix(rows, cols);
  in.read(reinterpret_cast<char*>(b.vectors.data().data()),
          static_cast<std::streamsize>(rows * cols * sizeof(double)));
  if (!in) throw Error(ErrorKind::Structural, "truncated bundle dump: " + path.string());
  return b;
}

void write_operator(const CompressedOperator& op, const fs::path& csv, const fs::path& sidecar) {
  auto out = open_out(csv);
  for (std::size_t i = 0; i < op.matrix.rows(); ++i) {
    for (std::size_t j = 0; j < op.matrix.cols(); ++j) out << (j ? "," : "") << format_real(op.matrix(i, j));
    out << '\n';
  }
  nlohmann::json meta;
  meta["level"] = op.level;
  meta["symbol"] = op.symbol;
  meta["dimension"] = op.dimension();
  meta["asymmetry"] = op.asymmetry;
  meta["exact_rows"] = op.exact_rows;
  meta["basis"] = nlohmann::json::array();
  for (const auto& v : op.basis) meta["basis"].push_back(basis_json(v));
  meta["lambda_assignment"] = op.lambda_assignment;
  write_json(sidecar, meta);
}

void write_report_csv(const ConvergenceReport& report, const fs::path& path) {
  auto out = open_out(path);
  out << "index,d,value,abs_error,head_mass,tail_mass\n";
  for (const auto& s : report.samples)
    out << index_text(s.index) << ',' << s.d << ',' << format_real(s.value) << ',' << format_real(s.abs_error)
        << ',' << s.head_mass << ',' << s.tail_mass << '\n';
}

nlohmann::json report_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["symbol"] = report.symbol;
  j["function"] = report.function;
  j["level"] = report.level;
  j["cell_level"] = report.cell_level;
  j["generation"] = report.generation;
  j["target"] = report.target;
  j["target_tolerance"] = report.target_tolerance;
  j["samples"] = nlohmann::json::array();
  for (const auto& s : report.samples) {
    nlohmann::json row = {{"index", s.index},         {"d", s.d},
                          {"value", s.value},         {"abs_error", s.abs_error},
                          {"head_mass", s.head_mass}, {"tail_mass", s.tail_mass}};
    if (s.bound) row["bound"] = *s.bound;
    j["samples"].push_back(row);
  }
  j["monotone"] = report.monotone();
  j["last_is_smallest"] = report.last_is_smallest();
  j["verdict"] = report.verdict();
  return j;
}

void write_report_svg(const ConvergenceReport& report, const fs::path& path) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  auto out = open_out(path);
  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", W, H);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  std::string title = report.experiment + ": " + report.symbol;
  std::string escaped;
  for (char c : title) escaped += c == '<' ? "&lt;" : c == '>' ? "&gt;" : c == '&' ? "&amp;" : std::string(1, c);
  out << fmt::format("<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n", L, escaped);
  if (!report.samples.empty()) {
    std::vector<double> xs, ys;
    for (const auto& s : report.samples) {
      xs.push_back(s.index);
      ys.push_back(std::log10(std::max(s.abs_error, 1e-17)));
    }
    const bool log_x = xs.front() > 0 && xs.back() / xs.front() > 100;
    if (log_x)
      for (double& x : xs) x = std::log10(x);
    auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    const double x0 = *xlo, x1 = *xhi > *xlo ? *xhi : *xlo + 1;
    const double y0 = std::floor(*ylo), y1 = std::ceil(*yhi) > y0 ? std::ceil(*yhi) : y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    out << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, H - B, W - R, H - B);
    out << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, T, L, H - B);
    for (double y = y0; y <= y1; y += 1.0)
      out << fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n", L - 6,
                         py(y) + 4, static_cast<int>(y));
    out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">{}index</text>\n", (W + L) / 2 - 20, H - 12,
                       log_x ? "log10 " : "");
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out << fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(xs[i]), py(ys[i]));
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"steelblue\"/>\n", px(xs[i]), py(ys[i]));
  }
  out << "</svg>\n";
}

void write_cluster_csv(const ClusterScan& scan, const fs::path& path) {
  auto out = open_out(path);
  out << "j,center,position,weight\n";
  for (const auto& psi : scan.clusters)
    for (double x : psi.positions)
      out << psi.j << ',' << format_real(psi.center) << ',' << format_real(x) << ',' << format_real(psi.weight)
          << '\n';
}

void write_moments_csv(const std::vector<MomentRow>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "j,k,moment,target,abs_error\n";
  for (const auto& r : rows)
    out << r.j << ',' << r.k << ',' << format_real(r.moment) << ',' << format_real(r.target) << ','
        << format_real(std::abs(r.moment - r.target)) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& value) { write_text(path, value.dump(2) + "\n"); }

std::string sha256_file(const fs::path& path) {
  auto in = open_in(path, true);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::Numeric, "SHA-256 unavailable");
  }
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_manifest(const fs::path& dir, const nlohmann::json& config,
                    const std::vector<std::pair<std::string, double>>& timings,
                    const std::vector<fs::path>& outputs) {
  nlohmann::json m;
  m["tool"] = "gasket-szego";
  m["version"] = kVersion;
  m["config"] = config;
  m["versions"] = {
      {"gasket", kVersion},
      {"compiler", __VERSION__},
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
      {"openssl", OpenSSL_version(OPENSSL_VERSION)},
      {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                    NLOHMANN_JSON_VERSION_PATCH)},
  };
  m["timings_seconds"] = nlohmann::json::array();
  for (const auto& [stage, seconds] : timings) m["timings_seconds"].push_back({{"stage", stage}, {"seconds", seconds}});
  m["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs)
    m["outputs"].push_back({{"file", fs::relative(p, dir).generic_string()},
                            {"bytes", fs::file_size(p)},
                            {"sha256", sha256_file(p)}});
  write_json(dir / "manifest.json", m);
}

}  // namespace gasket::io
