#include "sae/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sae/error.hpp"

namespace sae {

using nlohmann::json;

namespace {

constexpr const char* kEnsembleMagic = "SAE-ENSEMBLE 1";
constexpr const char* kHeaderEnd = "END-HEADER";

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
  out.write(bytes.data(), 8);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) throw IoError("ensemble payload is truncated");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void put_vector(std::ostream& out, const ParamVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

ParamVector get_vector(std::istream& in, std::size_t n) {
  ParamVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get_f64(in);
  return v;
}

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> parse_row(const std::string& line, std::size_t row) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  std::size_t col = 0;
  while (std::getline(ss, cell, ',')) {
    ++col;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ConfigError("malformed value '" + cell + "' at (" + std::to_string(row) + "," + std::to_string(col) + ")");
    values.push_back(v);
  }
  return values;
}

}  // namespace

void write_ensemble(std::ostream& out, const Ensemble& ensemble, const json& config) {
  ensemble.validate();
  const auto& a = ensemble.arch;
  json header;
  header["architecture"] = {{"layer_sizes", a.layer_sizes}, {"activation", to_string(a.activation)},
                            {"task", to_string(a.task)}, {"noise_sigma", a.noise_sigma}, {"bias", a.bias}};
  header["parameter_count"] = a.parameter_count();
  header["member_count"] = ensemble.size();
  header["total_epochs"] = ensemble.total_epochs();
  header["likelihood_scaling"] = "sum over data; minibatch likelihood scaled by n/batch_size";
  header["payload"] = {{"scalar", "float64"},
                       {"endianness", "little"},
                       {"layout", {"prior_mean[P]", "prior_std[P]", "members[N]{params[P], anchor[P], final_loss}"}}};
  json prov = json::array();
  for (const auto& p : ensemble.provenance) {
    prov.push_back({{"chain", p.chain},
                    {"index", p.index},
                    {"epochs", p.epochs},
                    {"warm_started", p.warm_started},
                    {"carried_optimizer_state", p.carried_optimizer_state},
                    {"final_loss", p.final_loss}});
  }
  header["provenance"] = prov;
  header["config"] = config;

  out << kEnsembleMagic << '\n' << header.dump(2) << '\n' << kHeaderEnd << '\n';
  put_vector(out, ensemble.prior.mean);
  put_vector(out, ensemble.prior.std);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    put_vector(out, ensemble.members[i]);
    put_vector(out, ensemble.provenance[i].anchor);
    put_f64(out, ensemble.provenance[i].final_loss);
  }
  if (!out) throw IoError("failed writing ensemble");
}

Ensemble read_ensemble(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEnsembleMagic) throw IoError("not an ensemble file (bad magic line)");
  std::string header_text;
  while (std::getline(in, line) && line != kHeaderEnd) header_text += line + '\n';
  if (line != kHeaderEnd) throw IoError("ensemble header is not terminated");

  json h;
  try {
    h = json::parse(header_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("ensemble header is not valid JSON: ") + e.what());
  }
  Ensemble ens;
  try {
    const json& a = h.at("architecture");
    ens.arch.layer_sizes = a.at("layer_sizes").get<std::vector<int>>();
    ens.arch.activation = parse_activation(a.at("activation").get<std::string>());
    ens.arch.task = parse_task(a.at("task").get<std::string>());
    ens.arch.noise_sigma = a.at("noise_sigma").get<double>();
    ens.arch.bias = a.at("bias").get<bool>();
    ens.arch.validate();
    const auto P = h.at("parameter_count").get<std::size_t>();
    require_length("ensemble parameter_count", ens.arch.parameter_count(), P);
    const auto N = h.at("member_count").get<std::size_t>();
    const json& prov = h.at("provenance");
    require_length("ensemble provenance", N, prov.size());

    ens.prior.mean = get_vector(in, P);
    ens.prior.std = get_vector(in, P);
    for (std::size_t i = 0; i < N; ++i) {
      ens.members.push_back(get_vector(in, P));
      MemberProvenance p;
      p.anchor = get_vector(in, P);
      p.final_loss = get_f64(in);
      p.chain = prov[i].at("chain").get<int>();
      p.index = prov[i].at("index").get<int>();
      p.epochs = prov[i].at("epochs").get<int>();
      p.warm_started = prov[i].at("warm_started").get<bool>();
      p.carried_optimizer_state = prov[i].at("carried_optimizer_state").get<bool>();
      ens.provenance.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("ensemble header is incomplete: ") + e.what());
  }
  ens.validate();
  return ens;
}

void save_ensemble(const std::filesystem::path& path, const Ensemble& ensemble, const json& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_ensemble(out, ensemble, config);
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_ensemble(in);
}

void write_predictive(std::ostream& out, const PredictiveDensity& p) {
  const char prefix = p.task == Task::classification ? 'p' : 's';
  for (Eigen::Index j = 0; j < p.values.cols(); ++j) out << (j ? "," : "") << prefix << j;
  out << '\n';
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.values.cols(); ++j) out << (j ? "," : "") << real(p.values(i, j));
    out << '\n';
  }
}

PredictiveDensity read_predictive(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw IoError("predictive file is empty");
  PredictiveDensity p;
  if (line[0] == 'p') {
    p.task = Task::classification;
  } else if (line[0] == 's') {
    p.task = Task::regression;
  } else {
    throw IoError("predictive header must start with p0 or s0");
  }
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line, rows.size() + 1));
    require_length("predictive row " + std::to_string(rows.size()), cols, rows.back().size());
  }
  p.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return p;
}

void save_predictive(const std::filesystem::path& path, const PredictiveDensity& p) {
  std::ostringstream ss;
  write_predictive(ss, p);
  write_text_file(path, ss.str());
}

PredictiveDensity load_predictive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_predictive(in);
}

std::vector<LossTraceEntry> loss_trace(const Ensemble& ensemble) {
  std::vector<LossTraceEntry> trace;
  long long epoch = 0;
  for (std::size_t i = 0; i < ensemble.provenance.size(); ++i) {
    const auto& p = ensemble.provenance[i];
    for (double loss : p.loss_trace) trace.push_back({++epoch, p.chain, static_cast<int>(i), loss});
  }
  return trace;
}

void write_loss_trace(std::ostream& out, const std::vector<LossTraceEntry>& trace) {
  out << "cumulative_epoch,chain,member,loss\n";
  for (const auto& e : trace) out << e.cumulative_epoch << ',' << e.chain << ',' << e.member << ',' << real(e.loss) << '\n';
}

void write_chain_trace(std::ostream& out, const std::vector<ParamVector>& anchors) {
  out << "step";
  const Eigen::Index P = anchors.empty() ? 0 : anchors.front().size();
  for (Eigen::Index j = 0; j < P; ++j) out << ",theta" << j;
  out << '\n';
  for (std::size_t s = 0; s < anchors.size(); ++s) {
    out << s;
    for (Eigen::Index j = 0; j < anchors[s].size(); ++j) out << ',' << real(anchors[s](j));
    out << '\n';
  }
}

std::string format_report(const MetricsReport& r) {
  std::ostringstream out;
  if (r.agreement) out << "agreement=" << fixed6(*r.agreement) << '\n';
  if (r.total_variation) out << "total_variation=" << fixed6(*r.total_variation) << '\n';
  if (r.w2) out << "w2=" << fixed6(*r.w2) << '\n';
  out << "n_members=" << r.n_members << '\n';
  out << "total_epochs=" << r.total_epochs << '\n';
  out << "seed=" << r.seed << '\n';
  out << "method=" << r.method << '\n';
  out << "budget=" << r.budget << '\n';
  if (!r.config.empty()) out << "config=" << r.config << '\n';
  return out.str();
}

MetricsReport parse_report(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  bool has_members = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("report line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "agreement") r.agreement = std::stod(value);
      else if (key == "total_variation") r.total_variation = std::stod(value);
      else if (key == "w2") r.w2 = std::stod(value);
      else if (key == "n_members") { r.n_members = std::stoll(value); has_members = true; }
      else if (key == "total_epochs") r.total_epochs = std::stoll(value);
      else if (key == "seed") r.seed = std::stoull(value);
      else if (key == "method") r.method = value;
      else if (key == "budget") r.budget = std::stoll(value);
      else if (key == "config") r.config = value;
      else throw ConfigError("unknown report key '" + key + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("malformed report value for '" + key + "': " + value);
    }
  }
  require(has_members, "report is missing n_members");
  return r;
}

MetricsReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_report(ss.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace sae
