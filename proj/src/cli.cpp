#include "cqkd/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cqkd/error.hpp"
#include "cqkd/format.hpp"
#include "cqkd/security.hpp"

namespace cqkd::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

// Writes `data` in the chosen format. CSV output gets a sidecar
// `<output>.manifest.json`; JSON output embeds the manifest. Without an
// output path data goes to `out` and a CSV run's manifest to `err`.
void emit(Format format, const std::string& output, const json& data,
          const std::function<void(std::ostream&)>& write_csv, const RunManifest& manifest,
          std::ostream& out, std::ostream& err) {
  if (format == Format::Json) {
    const json doc{{"manifest", manifest.to_json()}, {"data", data}};
    if (output.empty()) {
      out << doc.dump(2) << '\n';
      return;
    }
    auto f = open_output(output);
    f << doc.dump(2) << '\n';
    finish(f, output);
    return;
  }
  if (output.empty()) {
    write_csv(out);
    err << manifest.to_json().dump(2) << '\n';
    return;
  }
  auto f = open_output(output);
  write_csv(f);
  finish(f, output);
  const std::string side = output + ".manifest.json";
  auto m = open_output(side);
  m << manifest.to_json().dump(2) << '\n';
  finish(m, side);
}

void emit_table(Format format, const std::string& output, const Table& table,
                const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  emit(format, output, table_to_json(table), [&](std::ostream& o) { write_table_csv(o, table); },
       manifest, out, err);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Options shared by the analysis commands.
struct Common {
  std::vector<std::size_t> quad{32, 64};
  std::string output;
  std::string format = "csv";

  void attach(CLI::App* app) {
    app->add_option("--quad", quad, "Quadrature nodes per sphere: polar azimuthal")
        ->expected(2)
        ->capture_default_str();
    app->add_option("-o,--output", output, "Output path (default: stdout)");
    app->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }

  [[nodiscard]] QuadratureSettings settings() const {
    if (quad.size() != 2 || quad[0] == 0 || quad[1] == 0) {
      throw PreconditionError("--quad needs two positive integers");
    }
    return QuadratureSettings{quad[0], quad[1]};
  }
  [[nodiscard]] Format fmt() const { return format == "json" ? Format::Json : Format::Csv; }

  void append_args(std::vector<std::string>& args) const {
    args.insert(args.end(), {"--quad", std::to_string(quad[0]), std::to_string(quad[1]),
                             "--format", format});
    if (!output.empty()) args.insert(args.end(), {"-o", output});
  }
};

json quad_json(const QuadratureSettings& q) {
  return json{{"polar_nodes", q.polar_nodes}, {"azimuthal_nodes", q.azimuthal_nodes}};
}

std::vector<double> uniform_axis(std::size_t steps) {
  // Same spacing as the optimal-line grid: 0 .. pi/4 inclusive.
  return optimal_line_grid(steps);
}

// ---------------------------------------------------------------------------

struct SurfaceCmd {
  Common common;
  std::size_t theta_steps = 17;
  std::size_t phi_steps = 17;

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    if (theta_steps < 2 || phi_steps < 2) throw PreconditionError("surface: steps must be >= 2");
    const SphereQuadrature quad(common.settings());
    Table table{{"theta", "phi", "i_ab", "i_ae", "i_be"}, {}};
    for (double theta : uniform_axis(theta_steps)) {
      for (double phi : uniform_axis(phi_steps)) {
        const InfoPoint pt = evaluate_attack(AttackParams{theta, phi}, false, quad);
        table.rows.push_back({theta, phi, pt.i_ab, pt.i_ae, pt.i_be});
      }
    }
    RunManifest m;
    m.command = "surface";
    m.args = {"surface", "--theta-steps", std::to_string(theta_steps), "--phi-steps",
              std::to_string(phi_steps)};
    common.append_args(m.args);
    m.parameters = {{"theta_steps", theta_steps}, {"phi_steps", phi_steps},
                    {"format", common.format}, {"output", common.output}};
    m.quadrature = common.settings();
    m.duration_seconds = seconds_since(start);
    emit_table(common.fmt(), common.output, table, m, out, err);
    return kOk;
  }
};

struct CurveCmd {
  Common common;
  std::size_t theta_steps = 33;
  bool reconciled = false;

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    if (theta_steps < 2) throw PreconditionError("curve: steps must be >= 2");
    const SphereQuadrature quad(common.settings());
    const auto grid = optimal_line_grid(theta_steps);
    const InfoCurve curve = sweep_curve(grid, reconciled, quad);
    const double i_max = curve.i_ab.front();
    Table table{{"theta", "i_ab", "i_ae", "i_be", "qber", "cier", "qber_sphere"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const AttackParams p = optimal_params(grid[k]);
      table.rows.push_back({grid[k], curve.i_ab[k], curve.i_ae[k], curve.i_be[k], qber(p),
                            cier(std::min(curve.i_ab[k], i_max), i_max), sphere_qber(p, quad)});
    }
    RunManifest m;
    m.command = "curve";
    m.args = {"curve", "--theta-steps", std::to_string(theta_steps)};
    if (reconciled) m.args.push_back("--reconciled");
    common.append_args(m.args);
    m.parameters = {{"theta_steps", theta_steps}, {"reconciled", reconciled},
                    {"format", common.format}, {"output", common.output}};
    m.quadrature = common.settings();
    m.duration_seconds = seconds_since(start);
    emit_table(common.fmt(), common.output, table, m, out, err);
    return kOk;
  }
};

json report_json(const SecurityReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"reconciled", r.reconciled},
              {"tolerance", r.tolerance},
              {"evaluations", r.evaluations},
              {"theta0", r.theta0},
              {"i0", r.i0},
              {"i_ae0", r.i_ae0},
              {"q0", r.q0},
              {"q0_sphere", r.q0_sphere},
              {"i_max", r.i_max},
              {"q_cier0", r.q_cier0},
              {"info_ratio", r.info_ratio},
              {"cier_nonselected_norm", opt(r.cier_nonselected_norm)},
              {"cier_selected_norm", opt(r.cier_selected_norm)},
              {"sin_theta0", r.sin_theta0},
              {"sin2_theta0", r.sin2_theta0}};
}

Table report_table(const SecurityReport& r) {
  const double nan = std::nan("");
  return Table{{"reconciled", "tolerance", "evaluations", "theta0", "i0", "i_ae0", "q0", "q0_sphere",
                "i_max", "q_cier0", "info_ratio", "cier_nonselected_norm", "cier_selected_norm",
                "sin_theta0", "sin2_theta0"},
               {{r.reconciled ? 1.0 : 0.0, r.tolerance, static_cast<double>(r.evaluations), r.theta0,
                 r.i0, r.i_ae0, r.q0, r.q0_sphere, r.i_max, r.q_cier0, r.info_ratio,
                 r.cier_nonselected_norm.value_or(nan), r.cier_selected_norm.value_or(nan),
                 r.sin_theta0, r.sin2_theta0}}};
}

struct CriticalCmd {
  Common common;
  bool reconciled = false;
  std::string tol_text = "1e-6";

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    const double tol = parse_angle(tol_text);
    if (!(tol > 0.0)) throw PreconditionError("critical: --tol must be positive");
    const SphereQuadrature quad(common.settings());
    const SecurityReport r = critical_point(reconciled, quad, tol);
    RunManifest m;
    m.command = "critical";
    m.args = {"critical", "--tol", format_double(tol)};
    if (reconciled) m.args.push_back("--reconciled");
    common.append_args(m.args);
    m.parameters = {{"reconciled", reconciled}, {"tol", tol}, {"format", common.format},
                    {"output", common.output}};
    m.quadrature = common.settings();
    m.duration_seconds = seconds_since(start);
    const Table t = report_table(r);
    emit(common.fmt(), common.output, report_json(r),
         [&](std::ostream& o) { write_table_csv(o, t); }, m, out, err);
    return kOk;
  }
};

struct DimsCmd {
  std::size_t d_max = 64;
  std::string output;
  std::string format = "csv";

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    if (d_max < 2) throw PreconditionError("dims: --d-max must be >= 2");
    Table table{{"d", "accessible_bits", "i_max_bits", "critical_cier"}, {}};
    for (const DimensionRow& r : dimension_table(d_max)) {
      table.rows.push_back({static_cast<double>(r.d), r.accessible_bits, r.i_max_bits, r.critical_cier});
    }
    RunManifest m;
    m.command = "dims";
    m.args = {"dims", "--d-max", std::to_string(d_max), "--format", format};
    if (!output.empty()) m.args.insert(m.args.end(), {"-o", output});
    m.parameters = {{"d_max", d_max}, {"format", format}, {"output", output}};
    m.duration_seconds = seconds_since(start);
    emit_table(format == "json" ? Format::Json : Format::Csv, output, table, m, out, err);
    return kOk;
  }
};

json transcript_json(std::span<const TranscriptEntry> entries) {
  json rows = json::array();
  for (const auto& e : entries) {
    const RoundRecord& r = e.record;
    rows.push_back({{"round", e.round},
                    {"disclosed", e.disclosed},
                    {"alice_u", r.alice_dir.u},
                    {"alice_phi", r.alice_dir.phi},
                    {"alice_bit", r.alice_bit},
                    {"bob_u", r.bob_dir.u},
                    {"bob_phi", r.bob_dir.phi},
                    {"bob_bit", r.bob_bit},
                    {"eve_bit", r.eve_bit}});
  }
  return rows;
}

struct SimulateCmd {
  std::vector<std::size_t> quad{32, 64};
  std::uint64_t rounds = 100000;
  std::string theta_text = "0";
  std::string phi_text = "45deg";
  std::size_t cells_u = 16;
  std::size_t cells_phi = 32;
  std::uint64_t seed = 1;
  double disclose = 0.5;
  std::string output;
  std::string summary;
  std::string format = "csv";

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    if (output.empty()) throw PreconditionError("simulate: --output is required");
    if (quad.size() != 2 || quad[0] == 0 || quad[1] == 0) {
      throw PreconditionError("--quad needs two positive integers");
    }
    ProtocolConfig cfg;
    cfg.rounds = rounds;
    cfg.attack = AttackParams{parse_angle(theta_text), parse_angle(phi_text)};
    cfg.cells_u = cells_u;
    cfg.cells_phi = cells_phi;
    cfg.seed = seed;
    cfg.disclose_fraction = disclose;
    cfg.validate();
    const QuadratureSettings qs{quad[0], quad[1]};
    const std::string summary_path = summary.empty() ? output + ".summary.json" : summary;

    const Transcript t = run_protocol(cfg);
    {
      auto f = open_output(output);
      if (format == "json") {
        f << json{{"data", transcript_json(t.entries)}}.dump(1) << '\n';
      } else {
        write_transcript_csv(f, t.entries);
      }
      finish(f, output);
    }

    const json s = summarize(t, qs);
    {
      auto f = open_output(summary_path);
      f << s.dump(2) << '\n';
      finish(f, summary_path);
    }

    RunManifest m;
    m.command = "simulate";
    m.args = {"simulate",  "--rounds",     std::to_string(rounds),   "--theta",
              format_double(cfg.attack.theta), "--phi", format_double(cfg.attack.phi),
              "--cells-u", std::to_string(cells_u), "--cells-phi", std::to_string(cells_phi),
              "--seed",    std::to_string(seed),    "--disclose", format_double(disclose),
              "--quad",    std::to_string(quad[0]), std::to_string(quad[1]),
              "--format",  format,                  "-o",         output,
              "--summary", summary_path};
    m.parameters = {{"rounds", rounds},
                    {"theta", cfg.attack.theta},
                    {"phi", cfg.attack.phi},
                    {"cells_u", cells_u},
                    {"cells_phi", cells_phi},
                    {"disclose_fraction", disclose},
                    {"format", format},
                    {"output", output},
                    {"summary", summary_path}};
    m.seed = seed;
    m.quadrature = qs;
    m.duration_seconds = seconds_since(start);
    const std::string side = output + ".manifest.json";
    auto mf = open_output(side);
    mf << m.to_json().dump(2) << '\n';
    finish(mf, side);

    out << s.dump(2) << '\n';
    (void)err;
    return kOk;
  }

  static json summarize(const Transcript& t, const QuadratureSettings& qs) {
    const ProtocolConfig& cfg = t.config;
    const SphereQuadrature quad(qs);
    const SiftingPartition partition(cfg.cells_u, cfg.cells_phi);
    const SiftingPartition whole(1, 1);

    const auto ab = alice_bob_pairs(t.entries);
    const auto ae = alice_eve_pairs(t.entries);
    const auto be = bob_eve_pairs(t.entries);
    const double unsifted_ab = tomographic_mi(ab, quad);
    const MiEstimate hist_ab = empirical_mi(ab, partition, partition, true);
    const MiEstimate hist_ae = empirical_mi(ae, partition, whole, true);
    const MiEstimate hist_be = empirical_mi(be, partition, whole, true);

    const auto sifted = sift(t.entries, partition);
    std::size_t key_rounds = 0;
    for (const auto& s : sifted) {
      if (!s.entry.disclosed) ++key_rounds;
    }
    json sifted_json{{"kept", sifted.size()},
                     {"keep_rate", static_cast<double>(sifted.size()) / static_cast<double>(cfg.rounds)},
                     {"expected_keep_rate", partition.acceptance_probability()},
                     {"key_rounds", key_rounds}};
    std::optional<double> sifted_mi;
    if (!sifted.empty()) {
      const auto pairs = sifted_bit_pairs(sifted);
      sifted_mi = empirical_mi(pairs, whole, whole, true).bits;
      sifted_json["mi_bits"] = *sifted_mi;
      sifted_json["error_rate"] = sifted_error_rate(sifted);
    } else {
      sifted_json["mi_bits"] = nullptr;
      sifted_json["error_rate"] = nullptr;
    }

    const BipartiteReductions red = attacked_reductions(cfg.attack);
    const double ref_ab = nonselected_information(red.ab, quad, quad);
    const double ref_ae = nonselected_information(red.ae, quad, quad);
    const double ref_be = nonselected_information(red.be, quad, quad);
    const double ref_rec = reconciled_i_ab(red.ab, quad);
    const double eve_bound = std::max(ref_ae, ref_be);
    const bool on_line = cfg.attack.theta >= 0.0 && cfg.attack.theta <= kQuarterPi &&
                         std::abs(cfg.attack.theta + cfg.attack.phi - kQuarterPi) < 1e-12;

    std::size_t disclosed = 0;
    for (const auto& e : t.entries) {
      if (e.disclosed) ++disclosed;
    }
    json reference{{"i_ab", ref_ab},          {"i_ae", ref_ae},
                   {"i_be", ref_be},          {"reconciled_i_ab", ref_rec},
                   {"qber", qber(cfg.attack)}, {"qber_sphere", sphere_qber(cfg.attack, quad)},
                   {"on_optimal_line", on_line}};
    if (on_line) {
      reference["unsifted_mi_deviation"] = unsifted_ab - ref_ab;
      if (sifted_mi) reference["sifted_mi_deviation"] = *sifted_mi - ref_rec;
    }
    return json{
        {"rounds", cfg.rounds},
        {"disclosed_rounds", disclosed},
        {"attack", {{"theta", cfg.attack.theta}, {"phi", cfg.attack.phi}}},
        {"partition", {{"cells_u", cfg.cells_u}, {"cells_phi", cfg.cells_phi}}},
        {"unsifted",
         {{"mi_ab_bits", unsifted_ab},
          {"mi_ab_estimator", "tomographic"},
          {"histogram_mi_ab_bits", hist_ab.bits},
          {"histogram_mi_ae_bits", hist_ae.bits},
          {"histogram_mi_be_bits", hist_be.bits},
          {"histogram_miller_madow", hist_ab.miller_madow}}},
        {"sifted", sifted_json},
        {"reference", reference},
        {"verdict",
         {{"eve_bound_bits", eve_bound},
          {"secure_unsifted", unsifted_ab > eve_bound},
          {"secure_sifted", sifted_mi.has_value() && *sifted_mi > eve_bound}}}};
  }
};

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  std::ifstream f(manifest_path);
  if (!f) throw IoError("cannot open manifest '" + manifest_path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw IoError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  const RunManifest m = RunManifest::from_json(j);
  if (m.args.empty() || m.args.front() == "replay") throw PreconditionError("replay: manifest has no command");
  return dispatch(m.args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-alphabet QKD analysis and protocol simulation", "cqkd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  SurfaceCmd surface;
  auto* s = app.add_subcommand("surface", "I_AB, I_AE, I_BE over the attack square [0, pi/4]^2");
  s->add_option("--theta-steps", surface.theta_steps)->capture_default_str();
  s->add_option("--phi-steps", surface.phi_steps)->capture_default_str();
  surface.common.attach(s);

  CurveCmd curve;
  auto* c = app.add_subcommand("curve", "Information curves along theta + phi = pi/4");
  c->add_option("--theta-steps", curve.theta_steps)->capture_default_str();
  c->add_flag("--reconciled", curve.reconciled, "Use sifted selected information for I_AB");
  curve.common.attach(c);

  CriticalCmd critical;
  auto* k = app.add_subcommand("critical", "Locate the crossing I_AB = I_AE");
  k->add_flag("--reconciled", critical.reconciled, "Use sifted selected information for I_AB");
  k->add_option("--tol", critical.tol_text, "Bisection tolerance in theta")->capture_default_str();
  critical.common.attach(k);

  DimsCmd dims;
  auto* d = app.add_subcommand("dims", "Accessible information and critical CIER versus dimension");
  d->add_option("--d-max", dims.d_max)->capture_default_str();
  d->add_option("-o,--output", dims.output, "Output path (default: stdout)");
  d->add_option("--format", dims.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SimulateCmd sim;
  auto* m = app.add_subcommand("simulate", "Monte Carlo run of the protocol with sifting");
  m->add_option("--rounds", sim.rounds)->capture_default_str();
  m->add_option("--theta", sim.theta_text, "Attack theta (radians, or e.g. 22.5deg)")->capture_default_str();
  m->add_option("--phi", sim.phi_text, "Attack phi (radians, or e.g. 22.5deg)")->capture_default_str();
  m->add_option("--cells-u", sim.cells_u, "Sifting bands in cos(theta)")->capture_default_str();
  m->add_option("--cells-phi", sim.cells_phi, "Sifting sectors in phi")->capture_default_str();
  m->add_option("--seed", sim.seed)->capture_default_str();
  m->add_option("--disclose", sim.disclose, "Disclosed fraction of rounds")->capture_default_str();
  m->add_option("--quad", sim.quad, "Quadrature nodes for the reference values")
      ->expected(2)
      ->capture_default_str();
  m->add_option("-o,--output", sim.output, "Transcript path")->required();
  m->add_option("--summary", sim.summary, "Summary path (default: <output>.summary.json)");
  m->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::string manifest_path;
  auto* r = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  r->add_option("manifest", manifest_path)->required();

  std::vector<std::string> argv_storage{"cqkd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (s->parsed()) return surface.run(out, err);
  if (c->parsed()) return curve.run(out, err);
  if (k->parsed()) return critical.run(out, err);
  if (d->parsed()) return dims.run(out, err);
  if (m->parsed()) return sim.run(out, err);
  if (r->parsed()) return replay(manifest_path, out, err);
  return kUsage;
}

}  // namespace

// ---------------------------------------------------------------------------

double parse_angle(std::string_view text) {
  std::string_view t = trim(text);
  double scale = 1.0;
  if (t.ends_with("deg")) {
    t.remove_suffix(3);
    scale = kPi / 180.0;
  } else if (t.ends_with("rad")) {
    t.remove_suffix(3);
  }
  double v = 0.0;
  try {
    v = parse_double(trim(t));
  } catch (const IoError&) {
    throw PreconditionError("cannot parse angle '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw PreconditionError("angle must be finite");
  return v * scale;
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

Table read_table_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("table: empty input");
  for (auto c : split_commas(line)) t.columns.emplace_back(c);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != t.columns.size()) throw IoError("table: ragged row");
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

json table_to_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  return json{{"columns", table.columns}, {"rows", rows}};
}

Table table_from_json(const json& data) {
  Table t;
  t.columns = data.at("columns").get<std::vector<std::string>>();
  for (const auto& obj : data.at("rows")) {
    std::vector<double> row;
    for (const auto& c : t.columns) {
      const auto& v = obj.at(c);
      row.push_back(v.is_null() ? std::nan("") : v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json RunManifest::to_json() const {
  json j{{"command", command},
         {"args", args},
         {"parameters", parameters},
         {"tool_version", tool_version},
         {"duration_seconds", duration_seconds}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["quadrature"] = quadrature ? quad_json(*quadrature) : json(nullptr);
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.parameters = j.value("parameters", json::object());
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.duration_seconds = j.value("duration_seconds", 0.0);
    if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("quadrature") && !j.at("quadrature").is_null()) {
      const auto& q = j.at("quadrature");
      m.quadrature = QuadratureSettings{q.at("polar_nodes").get<std::size_t>(),
                                        q.at("azimuthal_nodes").get<std::size_t>()};
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "I/O failure: " << e.what() << '\n';
    return kIo;
  } catch (const CompositionError& e) {
    err << "internal error: " << e.what() << '\n';
    return kNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cqkd::cli
