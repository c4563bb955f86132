#include "trilat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "trilat/arith.hpp"
#include "trilat/chebyshev.hpp"
#include "trilat/errors.hpp"
#include "trilat/jacobsthal.hpp"
#include "trilat/lattice.hpp"

namespace trilat::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// What a subcommand produces; rendered afterwards in the requested format.
struct Outcome {
  json config = json::object();
  json results = json::object();
  json violations = json::array();
  Table table;
  std::vector<std::string> text;
};

// Raw values bound by CLI11.
struct Args {
  std::string format = "json";
  std::string output;
  unsigned workers = 0;
  std::uint64_t sieve_limit = 0;
  bool quiet = false;
  bool timing = false;

  std::uint64_t from = 0;
  std::uint64_t to = 0;
  bool orbits = false;
  bool all_triples = false;

  std::uint64_t n = 0;
  std::uint64_t s = 0;
  std::uint64_t t = 0;
  bool full_scan = false;

  int k = 0;
  std::uint64_t limit = 0;

  unsigned q = 0;
  std::uint64_t x_max = 0;
  bool envelope = false;

  std::vector<std::string> inputs;
};

std::string str(std::uint64_t v) { return std::to_string(v); }

json fixed_json(Fixed60 v) { return json{{"value", v.to_double()}, {"raw", v.hex()}}; }

json families_json(lattice::FamilySet set) {
  json out = json::array();
  for (auto f : set.members()) out.push_back(std::string(lattice::to_string(f)));
  return out;
}

std::string families_cell(lattice::FamilySet set) {
  std::string out;
  for (auto f : set.members()) {
    if (!out.empty()) out += '|';
    out += lattice::to_string(f);
  }
  return out;
}

json optional_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::string> record_row(const lattice::TripleRecord& r) {
  return {str(r.triple.n), str(r.triple.s), str(r.triple.t), r.holds ? "true" : "false",
          r.witness ? str(*r.witness) : "", families_cell(r.families)};
}

const std::vector<std::string> kTripleHeader = {"n", "s", "t", "holds", "witness", "families"};

json gap_json(const jacobsthal::GapScanResult& r) {
  return json{{"n", r.n}, {"g", r.g}, {"x", r.x}, {"y", r.y}};
}

std::optional<std::uint64_t> env_number(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0' || v == 0 || raw[0] == '-') {
    throw UsageError(std::string(name) + " must be a positive integer, got '" + raw + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Subcommands

Outcome cmd_verify(const Args& args, const RunConfig& cfg, std::ostream& err) {
  lattice::VerifyOptions options;
  options.use_orbits = cfg.orbit_reduction;
  options.workers = cfg.workers;
  if (cfg.format == OutputFormat::csv) {
    options.recording = args.all_triples ? lattice::Recording::all : lattice::Recording::satisfying;
  }
  if (!cfg.quiet) {
    options.progress = [&err, step = std::max<std::uint64_t>(1, (args.to - args.from + 1) / 20)](
                           std::uint64_t done, std::uint64_t total) {
      if (done % step == 0 || done == total) err << "verify: " << done << "/" << total << " moduli\n";
    };
  }
  const auto report = lattice::verify_range(args.from, args.to, options);

  Outcome o;
  o.config = {{"subcommand", "verify"}, {"from", args.from}, {"to", args.to}, {"orbits", args.orbits}};
  json counts = json::array();
  for (std::size_t i = 0; i < report.counts.size(); ++i) {
    counts.push_back({{"n", report.n_from + i}, {"satisfying", report.counts[i]}});
  }
  json pattern_counts = json::object();
  for (auto p : {lattice::ViolationPattern::congruent_family, lattice::ViolationPattern::half_modulus,
                 lattice::ViolationPattern::other}) {
    pattern_counts[std::string(lattice::to_string(p))] =
        std::count_if(report.violations.begin(), report.violations.end(),
                      [p](const lattice::Violation& v) { return v.pattern == p; });
  }
  json exceptions = json::array();
  for (const auto& t : report.small_n_exceptions) exceptions.push_back({t.n, t.s, t.t});
  o.results = {{"range", {report.n_from, report.n_to}},
               {"total_satisfying", report.total_satisfying()},
               {"violation_count", report.violations.size()},
               {"violation_patterns", pattern_counts},
               {"small_n_exceptions", exceptions},
               {"counts", counts}};
  for (const auto& v : report.violations) {
    o.violations.push_back({{"check", "conjecture"},
                            {"n", v.triple.n},
                            {"s", v.triple.s},
                            {"t", v.triple.t},
                            {"families", families_json(v.families)},
                            {"pattern", std::string(lattice::to_string(v.pattern))},
                            {"min_sum", optional_json(v.report.min_sum)},
                            {"max_sum", optional_json(v.report.max_sum)}});
  }
  o.table.header = kTripleHeader;
  for (const auto& r : report.records) o.table.rows.push_back(record_row(r));
  o.text.push_back("verify n in [" + str(args.from) + ", " + str(args.to) + "]: " +
                   str(report.total_satisfying()) + " satisfying triples, " +
                   str(report.small_n_exceptions.size()) + " small-n exceptions, " + str(report.violations.size()) +
                   " violations");
  for (const auto& v : report.violations) {
    o.text.push_back("  violation (" + str(v.triple.n) + ", " + str(v.triple.s) + ", " + str(v.triple.t) + ") " +
                     std::string(lattice::to_string(v.pattern)));
  }
  return o;
}

Outcome cmd_check_triple(const Args& args) {
  const auto triple = lattice::make_triple(args.n, args.s, args.t);
  const auto mode = args.full_scan ? lattice::ScanMode::full_scan : lattice::ScanMode::early_exit;
  const auto report = lattice::check_condition(triple, mode);
  const auto families = lattice::classify_families(triple);

  Outcome o;
  o.config = {{"subcommand", "check-triple"}, {"n", args.n}, {"s", args.s}, {"t", args.t},
              {"full_scan", args.full_scan}};
  o.results = {{"n", triple.n},
               {"s", triple.s},
               {"t", triple.t},
               {"holds", report.holds},
               {"witness", optional_json(report.witness)},
               {"witness_sum", optional_json(report.witness_sum)},
               {"min_sum", optional_json(report.min_sum)},
               {"max_sum", optional_json(report.max_sum)},
               {"families", families_json(families)}};
  if (report.holds && triple.n > lattice::kSmallNThreshold && !families.has_algebraic()) {
    const auto full = lattice::check_condition(triple, lattice::ScanMode::full_scan);
    o.violations.push_back({{"check", "conjecture"},
                            {"n", triple.n},
                            {"s", triple.s},
                            {"t", triple.t},
                            {"families", families_json(families)},
                            {"pattern", std::string(lattice::to_string(lattice::violation_pattern(triple)))},
                            {"min_sum", optional_json(full.min_sum)},
                            {"max_sum", optional_json(full.max_sum)}});
  }
  o.table.header = kTripleHeader;
  o.table.rows.push_back(record_row({triple, report.holds, report.witness, families}));
  std::string line = "(" + str(triple.n) + ", " + str(triple.s) + ", " + str(triple.t) +
                     "): holds=" + (report.holds ? "true" : "false");
  if (report.witness) line += " witness a=" + str(*report.witness) + " sum=" + str(*report.witness_sum);
  if (report.min_sum) line += " min_sum=" + str(*report.min_sum) + " max_sum=" + str(*report.max_sum);
  line += " families=" + (families.empty() ? std::string("none") : families_cell(families));
  o.text.push_back(line);
  return o;
}

Outcome cmd_enumerate(const Args& args) {
  const auto triples = lattice::enumerate_satisfying(args.n);
  Outcome o;
  o.config = {{"subcommand", "enumerate"}, {"n", args.n}};
  json list = json::array();
  std::size_t unclassified = 0;
  o.table.header = kTripleHeader;
  for (const auto& t : triples) {
    const auto families = lattice::classify_families(t);
    list.push_back({{"s", t.s}, {"t", t.t}, {"families", families_json(families)}});
    o.table.rows.push_back(record_row({t, true, std::nullopt, families}));
    if (families.has_algebraic()) continue;
    ++unclassified;
    if (t.n > lattice::kSmallNThreshold) {
      const auto full = lattice::check_condition(t, lattice::ScanMode::full_scan);
      o.violations.push_back({{"check", "conjecture"},
                              {"n", t.n},
                              {"s", t.s},
                              {"t", t.t},
                              {"families", families_json(families)},
                              {"pattern", std::string(lattice::to_string(lattice::violation_pattern(t)))},
                              {"min_sum", optional_json(full.min_sum)},
                              {"max_sum", optional_json(full.max_sum)}});
    }
  }
  o.results = {{"n", args.n}, {"count", triples.size()}, {"unclassified", unclassified}, {"triples", list}};
  o.text.push_back("n=" + str(args.n) + ": " + str(triples.size()) + " satisfying triples, " + str(unclassified) +
                   " outside the algebraic families");
  for (const auto& t : triples) {
    o.text.push_back("  (" + str(t.n) + ", " + str(t.s) + ", " + str(t.t) + ") " +
                     families_cell(lattice::classify_families(t)));
  }
  return o;
}

Outcome cmd_jacobsthal_g(const Args& args) {
  jacobsthal::GapCache cache;
  const auto r = jacobsthal::jacobsthal_g(args.n, &cache);
  Outcome o;
  o.config = {{"subcommand", "jacobsthal g"}, {"n", args.n}};
  o.results = gap_json(r);
  o.results["radical"] = arith::factorize(args.n, arith::default_table()).radical();
  o.table = {{"n", "g", "x", "y"}, {{str(r.n), str(r.g), str(r.x), str(r.y)}}};
  o.text.push_back("g(" + str(r.n) + ") = " + str(r.g) + "  (consecutive coprime " + str(r.x) + ", " + str(r.y) +
                   ")");
  return o;
}

Outcome cmd_primorial(const Args& args) {
  const auto r = jacobsthal::primorial_g(args.k);
  Outcome o;
  o.config = {{"subcommand", "jacobsthal primorial"}, {"k", args.k}};
  o.results = {{"k", args.k}, {"primorial", r.n}, {"g", r.g}, {"x", r.x}, {"y", r.y}};
  o.table = {{"k", "primorial", "g", "x", "y"}, {{std::to_string(args.k), str(r.n), str(r.g), str(r.x), str(r.y)}}};
  o.text.push_back("g(P_" + std::to_string(args.k) + " = " + str(r.n) + ") = " + str(r.g));
  return o;
}

json omega_violation_json(int k, std::uint64_t reference, const jacobsthal::GapScanResult& v) {
  return {{"check", "g_omega_monotone"}, {"k", k},       {"n", v.n},
          {"g", v.g},                    {"x", v.x},     {"y", v.y},
          {"g_primorial", reference}};
}

Outcome cmd_omega_check(const Args& args, const RunConfig& cfg) {
  const auto reference = jacobsthal::primorial_g(args.k);
  const auto found = jacobsthal::check_g_omega_monotone(args.k, args.limit, cfg.workers);
  Outcome o;
  o.config = {{"subcommand", "jacobsthal omega-check"}, {"k", args.k}, {"limit", args.limit}};
  o.results = {{"k", args.k}, {"limit", args.limit}, {"g_primorial", reference.g}, {"violation_count", found.size()}};
  o.table.header = {"k", "n", "g", "x", "y", "g_primorial"};
  for (const auto& v : found) {
    o.violations.push_back(omega_violation_json(args.k, reference.g, v));
    o.table.rows.push_back({std::to_string(args.k), str(v.n), str(v.g), str(v.x), str(v.y), str(reference.g)});
  }
  o.text.push_back("omega(n) = " + std::to_string(args.k) + ", n <= " + str(args.limit) + ": g(n) <= g(P_k) = " +
                   str(reference.g) + ", " + str(found.size()) + " violations");
  return o;
}

Outcome cmd_f(const Args& args) {
  const auto f = jacobsthal::f_least(args.n);
  Outcome o;
  o.config = {{"subcommand", "f"}, {"n", args.n}};
  o.results = {{"n", args.n}, {"f", f}};
  o.table = {{"n", "f"}, {{str(args.n), str(f)}}};
  o.text.push_back("f(" + str(args.n) + ") = " + str(f));
  return o;
}

json f_violation_json(const jacobsthal::FBoundViolation& v) {
  const bool top = v.kind == jacobsthal::FBoundViolation::Kind::top_two_primes;
  return {{"check", top ? "f_top_two_primes" : "f_at_most_17"},
          {"n", v.n},
          {"f", v.f},
          {"p1", v.p1},
          {"p2", v.p2}};
}

Outcome cmd_f_bounds(const Args& args, const RunConfig& cfg) {
  const auto found = jacobsthal::check_f_bounds(args.limit, cfg.workers);
  Outcome o;
  o.config = {{"subcommand", "f-bounds"}, {"limit", args.limit}};
  o.results = {{"limit", args.limit}, {"violation_count", found.size()}};
  o.table.header = {"check", "n", "f", "p1", "p2"};
  for (const auto& v : found) {
    auto j = f_violation_json(v);
    o.table.rows.push_back({j["check"].get<std::string>(), str(v.n), str(v.f), str(v.p1), str(v.p2)});
    o.violations.push_back(std::move(j));
  }
  o.text.push_back("f bounds, n <= " + str(args.limit) + ": " + str(found.size()) + " violations");
  return o;
}

// Appends the per-residue summary and violation certificates of one modulus.
void add_progression(const chebyshev::ProgressionReport& report, json& residues, json& margin_events,
                     json& violations, Table& table) {
  const auto phi = chebyshev::euler_phi(report.q);
  for (const auto& r : report.residues) {
    residues.push_back({{"q", report.q},
                        {"a", r.a},
                        {"theta_at_x_max", fixed_json(r.theta_at_x_max)},
                        {"minimal_valid_x", r.minimal_valid_x},
                        {"lower_bound_violations", r.lower_bound_violations.size()},
                        {"envelope_violations", r.envelope_violations.size()}});
    table.rows.push_back({std::to_string(report.q), std::to_string(r.a), str(report.x_max),
                          std::to_string(r.theta_at_x_max.to_double()), str(r.minimal_valid_x),
                          str(r.lower_bound_violations.size()), str(r.envelope_violations.size())});
    for (const auto& v : r.lower_bound_violations) {
      Fixed60 doubled;
      doubled.raw = v.theta.raw * (2 * v.phi);
      violations.push_back({{"check", "theta_lower_bound"},
                            {"q", report.q},
                            {"a", r.a},
                            {"x", v.x},
                            {"theta", fixed_json(v.theta)},
                            {"lhs", fixed_json(doubled)},
                            {"rhs", v.x}});
    }
    for (const auto& v : r.envelope_violations) {
      violations.push_back({{"check", "theta_envelope"},
                            {"q", report.q},
                            {"a", r.a},
                            {"x", v.x},
                            {"theta", fixed_json(v.theta)},
                            {"phi", phi},
                            {"lhs", static_cast<double>(v.deviation)},
                            {"rhs", static_cast<double>(v.envelope)}});
    }
  }
  for (const auto& e : report.margin_events) {
    margin_events.push_back({{"check", std::string(chebyshev::to_string(e.check))},
                             {"q", e.q},
                             {"a", e.a},
                             {"x", e.x},
                             {"holds", e.holds_after_escalation}});
  }
}

const std::vector<std::string> kThetaHeader = {"q", "a", "x_max", "theta_at_x_max", "minimal_valid_x",
                                               "lower_bound_violations", "envelope_violations"};

arith::PrimeTable build_table(const RunConfig& cfg, std::uint64_t required, std::ostream& err) {
  const std::uint64_t limit = cfg.sieve_limit ? cfg.sieve_limit : required;
  if (!cfg.quiet) err << "sieving primes up to " << limit << "\n";
  return arith::sieve(std::max<std::uint64_t>(limit, 2), {.max_limit = cfg.sieve_cap});
}

Outcome cmd_theta(const Args& args, const RunConfig& cfg, std::ostream& err) {
  const auto table = build_table(cfg, args.x_max, err);
  const auto report = chebyshev::sweep_progression(
      args.q, args.x_max, table, {.lower_bound = true, .envelope = args.envelope, .workers = cfg.workers});
  Outcome o;
  o.config = {{"subcommand", "theta"}, {"q", args.q}, {"x_max", args.x_max}, {"envelope", args.envelope}};
  json residues = json::array();
  json margin_events = json::array();
  o.table.header = kThetaHeader;
  add_progression(report, residues, margin_events, o.violations, o.table);
  o.results = {{"q", args.q},
               {"phi", chebyshev::euler_phi(args.q)},
               {"x_max", args.x_max},
               {"envelope_checked", args.envelope},
               {"residues", residues},
               {"margin_events", margin_events}};
  o.text.push_back("theta, q = " + std::to_string(args.q) + ", x <= " + str(args.x_max) + ": " +
                   str(report.violation_count()) + " violations, " + str(report.margin_events.size()) +
                   " margin events");
  for (const auto& r : report.residues) {
    o.text.push_back("  a = " + std::to_string(r.a) + ": minimal_valid_x = " + str(r.minimal_valid_x) +
                     ", theta(x_max) = " + std::to_string(r.theta_at_x_max.to_double()));
  }
  return o;
}

Outcome cmd_lemmas(const Args& args, const RunConfig& cfg, std::ostream& err) {
  const std::uint64_t limit = args.limit;
  Outcome o;
  o.config = {{"subcommand", "lemmas"}, {"limit", limit}};
  o.table.header = {"check", "parameter", "value", "violations"};

  // Prime-number bounds in progressions.
  const auto table = build_table(cfg, limit, err);
  json residues = json::array();
  json margin_events = json::array();
  Table theta_rows;
  std::size_t theta_violations = 0;
  std::uint64_t worst_threshold = 0;
  for (unsigned q = 1; q <= chebyshev::kMaxModulus; ++q) {
    if (!cfg.quiet) err << "lemmas: theta sweep q = " << q << "\n";
    const auto report = chebyshev::sweep_progression(q, limit, table, {.workers = cfg.workers});
    theta_violations += report.violation_count();
    for (const auto& r : report.residues) worst_threshold = std::max(worst_threshold, r.minimal_valid_x);
    add_progression(report, residues, margin_events, o.violations, theta_rows);
  }
  o.table.rows.push_back({"theta", "max minimal_valid_x", str(worst_threshold), str(theta_violations)});

  if (!cfg.quiet) err << "lemmas: Jacobsthal linear bound\n";
  const auto g_found = jacobsthal::check_g_linear_bound(limit, cfg.workers);
  for (const auto& v : g_found) {
    o.violations.push_back({{"check", "g_linear_bound"}, {"n", v.n}, {"g", v.g}, {"x", v.x}, {"y", v.y}});
  }
  o.table.rows.push_back({"g_linear_bound", "limit", str(limit), str(g_found.size())});

  if (!cfg.quiet) err << "lemmas: f bounds\n";
  const auto f_found = jacobsthal::check_f_bounds(limit, cfg.workers);
  std::size_t top_two = 0;
  for (const auto& v : f_found) {
    top_two += v.kind == jacobsthal::FBoundViolation::Kind::top_two_primes;
    o.violations.push_back(f_violation_json(v));
  }
  o.table.rows.push_back({"f_top_two_primes", "limit", str(limit), str(top_two)});
  o.table.rows.push_back({"f_at_most_17", "limit", str(limit), str(f_found.size() - top_two)});

  if (!cfg.quiet) err << "lemmas: primorial checks\n";
  json primorials = json::array();
  for (int k = 1; k <= jacobsthal::kMaxPrimorialIndex; ++k) {
    const auto ref = jacobsthal::primorial_g(k);
    const auto found = jacobsthal::check_g_omega_monotone(k, limit, cfg.workers);
    primorials.push_back({{"k", k},
                          {"primorial", ref.n},
                          {"g", ref.g},
                          {"x", ref.x},
                          {"y", ref.y},
                          {"omega_violations", found.size()}});
    for (const auto& v : found) o.violations.push_back(omega_violation_json(k, ref.g, v));
    o.table.rows.push_back({"g_omega_monotone", "k=" + std::to_string(k), str(ref.g), str(found.size())});
  }

  o.results = {{"limit", limit},
               {"theta", {{"residues", residues}, {"margin_events", margin_events}}},
               {"g_linear_bound", {{"g_12", jacobsthal::jacobsthal_g(12).g}, {"violations", g_found.size()}}},
               {"f_bounds", {{"top_two_primes_violations", top_two}, {"at_most_17_violations", f_found.size() - top_two}}},
               {"primorials", primorials}};
  for (const auto& row : o.table.rows) {
    o.text.push_back(row[0] + " (" + row[1] + " " + row[2] + "): " + row[3] + " violations");
  }
  o.text.push_back("margin events: " + str(margin_events.size()));
  return o;
}

Outcome cmd_report(const Args& args) {
  Outcome o;
  o.config = {{"subcommand", "report"}, {"inputs", args.inputs}};
  json runs = json::array();
  o.table.header = {"input", "subcommand", "violations"};
  for (const auto& path : args.inputs) {
    std::ifstream in(path);
    if (!in) throw UsageError("report: cannot open " + path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("report: " + path + " is not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("violations") || !doc["violations"].is_array() || !doc.contains("config")) {
      throw UsageError("report: " + path + " is not a trilat report");
    }
    const std::string sub = doc["config"].value("subcommand", "");
    runs.push_back({{"input", path}, {"subcommand", sub}, {"violations", doc["violations"].size()}});
    o.table.rows.push_back({path, sub, str(doc["violations"].size())});
    for (auto v : doc["violations"]) {
      v["source"] = path;
      o.violations.push_back(std::move(v));
    }
    o.text.push_back(path + " (" + sub + "): " + str(doc["violations"].size()) + " violations");
  }
  o.results = {{"runs", runs}, {"violation_count", o.violations.size()}};
  return o;
}

// ---------------------------------------------------------------------------
// Rendering

std::string csv_cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const Table& table, std::ostream& os) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i]);
    os << "\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void render(const Outcome& o, const RunConfig& cfg, std::optional<std::int64_t> elapsed_ms, std::ostream& os) {
  switch (cfg.format) {
    case OutputFormat::json: {
      json doc;
      doc["tool_version"] = std::string(kToolVersion);
      doc["config"] = o.config;
      doc["results"] = o.results;
      doc["violations"] = o.violations;
      doc["elapsed_ms"] = elapsed_ms ? json(*elapsed_ms) : json(nullptr);
      os << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::csv:
      write_csv(o.table, os);
      break;
    case OutputFormat::text:
      for (const auto& line : o.text) os << line << "\n";
      os << (o.violations.empty() ? "PASS" : "VIOLATIONS: " + str(o.violations.size())) << "\n";
      break;
  }
}

RunConfig make_config(const Args& args, const std::string& subcommand) {
  RunConfig cfg;
  cfg.subcommand = subcommand;
  cfg.format = args.format == "csv" ? OutputFormat::csv : args.format == "text" ? OutputFormat::text : OutputFormat::json;
  if (!args.output.empty()) cfg.output_path = args.output;
  cfg.workers = args.workers ? args.workers : static_cast<unsigned>(env_number("TRILAT_WORKERS").value_or(1));
  cfg.sieve_cap = env_number("TRILAT_SIEVE_CAP").value_or(arith::kDefaultSieveCap);
  cfg.sieve_limit = args.sieve_limit;
  cfg.orbit_reduction = args.orbits;
  cfg.quiet = args.quiet;
  cfg.timing = args.timing;

  if (subcommand == "verify") {
    cfg.range_from = args.from;
    cfg.range_to = args.to;
    if (args.from < 1) throw UsageError("verify: --from must be at least 1");
    if (args.from > args.to) throw UsageError("verify: empty range [" + str(args.from) + ", " + str(args.to) + "]");
    if (args.to > lattice::kMaxVerifyN) {
      throw UsageError("verify: --to exceeds the cap " + str(lattice::kMaxVerifyN));
    }
  }
  if (args.all_triples && subcommand != "verify") throw UsageError("--all-triples applies to verify only");

  std::uint64_t required_sieve = 0;
  if (subcommand == "theta") {
    if (args.q < 1 || args.q > chebyshev::kMaxModulus) throw UsageError("theta: --q must be in [1, 10]");
    if (args.x_max < 2) throw UsageError("theta: --x-max must be at least 2");
    required_sieve = args.x_max;
  } else if (subcommand == "lemmas") {
    if (args.limit < chebyshev::kEnvelopeFrom) {
      throw UsageError("lemmas: --limit must be at least " + str(chebyshev::kEnvelopeFrom));
    }
    required_sieve = args.limit;
  }
  if (required_sieve) {
    cfg.range_from = 2;
    cfg.range_to = required_sieve;
    const std::uint64_t limit = cfg.sieve_limit ? cfg.sieve_limit : required_sieve;
    if (limit < required_sieve) {
      throw UsageError("sieve limit " + str(limit) + " is below the required " + str(required_sieve));
    }
    if (limit > cfg.sieve_cap) {
      throw UsageError("sieve limit " + str(limit) + " exceeds the sieve cap " + str(cfg.sieve_cap) +
                       " (raise TRILAT_SIEVE_CAP)");
    }
  }
  return cfg;
}

std::string single_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!msg.empty() && msg.back() == ' ') msg.pop_back();
  return msg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Args args;
  CLI::App app{"Finite verification of the residue-sum classification of lattice triangles"};
  app.name("trilat");
  app.require_subcommand(1);
  app.add_option("--format", args.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("-o,--output", args.output, "Write results to this file");
  app.add_option("-w,--workers", args.workers, "Worker threads (default: TRILAT_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--sieve-limit", args.sieve_limit, "Prime table limit (default: what the subcommand needs)");
  app.add_flag("-q,--quiet", args.quiet, "Suppress progress on stderr");
  app.add_flag("--timing", args.timing, "Report elapsed_ms (otherwise null, keeping output byte-stable)");

  std::vector<CLI::App*> subs;
  auto sub = [&](CLI::App& parent, const std::string& name, const std::string& help) {
    CLI::App* s = parent.add_subcommand(name, help);
    s->fallthrough();
    subs.push_back(s);
    return s;
  };

  auto* verify = sub(app, "verify", "Exhaustively check every triple with n in [from, to]");
  verify->add_option("--from", args.from)->required();
  verify->add_option("--to", args.to)->required();
  verify->add_flag("--orbits", args.orbits, "Evaluate the condition once per unit orbit");
  verify->add_flag("--all-triples", args.all_triples, "CSV: one row per triple, not just satisfying ones");

  auto* check = sub(app, "check-triple", "Evaluate the condition on one triple");
  check->add_option("N", args.n)->required();
  check->add_option("S", args.s)->required();
  check->add_option("T", args.t)->required();
  check->add_flag("--full-scan", args.full_scan, "Scan all units and report extremal sums");

  auto* enumerate = sub(app, "enumerate", "List every triple on N satisfying the condition");
  enumerate->add_option("N", args.n)->required();

  auto* jac = sub(app, "jacobsthal", "Jacobsthal's function");
  jac->require_subcommand(1);
  auto* jac_g = sub(*jac, "g", "g(N) with a certificate pair");
  jac_g->add_option("N", args.n)->required();
  auto* jac_p = sub(*jac, "primorial", "g(P_K) for the product of the first K primes");
  jac_p->add_option("K", args.k)->required();
  auto* jac_o = sub(*jac, "omega-check", "g(n) <= g(P_K) for all n <= limit with K distinct primes");
  jac_o->add_option("K", args.k)->required();
  jac_o->add_option("--limit", args.limit)->required();

  auto* f = sub(app, "f", "Least a with a(a+2) coprime to N");
  f->add_option("N", args.n)->required();
  auto* f_bounds = sub(app, "f-bounds", "Check the bounds on f for all n <= limit");
  f_bounds->add_option("--limit", args.limit)->required();

  auto* theta = sub(app, "theta", "Sweep theta(x, q, a) for every coprime residue a");
  theta->add_option("--q", args.q)->required();
  theta->add_option("--x-max", args.x_max)->required();
  theta->add_flag("--envelope", args.envelope, "Also check the 2.072 sqrt(x) envelope");

  auto* lemmas = sub(app, "lemmas", "Run every bound check up to limit");
  lemmas->add_option("--limit", args.limit)->required();

  auto* report = sub(app, "report", "Merge the violations of earlier JSON outputs");
  report->add_option("inputs", args.inputs)->required()->expected(1, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAllPassed;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kAllPassed;
  } catch (const CLI::ParseError& e) {
    err << "trilat: " << single_line(e.what()) << "\n";
    return kUsageError;
  }

  std::string name;
  for (CLI::App* s : subs) {
    if (!s->parsed() || s == jac) continue;
    name = s->get_parent() == jac ? "jacobsthal " + s->get_name() : s->get_name();
  }

  try {
    const RunConfig cfg = make_config(args, name);
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    if (name == "verify") {
      outcome = cmd_verify(args, cfg, err);
    } else if (name == "check-triple") {
      outcome = cmd_check_triple(args);
    } else if (name == "enumerate") {
      outcome = cmd_enumerate(args);
    } else if (name == "jacobsthal g") {
      outcome = cmd_jacobsthal_g(args);
    } else if (name == "jacobsthal primorial") {
      outcome = cmd_primorial(args);
    } else if (name == "jacobsthal omega-check") {
      outcome = cmd_omega_check(args, cfg);
    } else if (name == "f") {
      outcome = cmd_f(args);
    } else if (name == "f-bounds") {
      outcome = cmd_f_bounds(args, cfg);
    } else if (name == "theta") {
      outcome = cmd_theta(args, cfg, err);
    } else if (name == "lemmas") {
      outcome = cmd_lemmas(args, cfg, err);
    } else if (name == "report") {
      outcome = cmd_report(args);
    } else {
      throw UsageError("no subcommand given");
    }
    std::optional<std::int64_t> elapsed;
    if (cfg.timing) {
      elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    }

    if (cfg.output_path) {
      std::ofstream file(*cfg.output_path, std::ios::binary);
      if (!file) throw UsageError("cannot write " + *cfg.output_path);
      render(outcome, cfg, elapsed, file);
    } else {
      render(outcome, cfg, elapsed, out);
    }
    return outcome.violations.empty() ? kAllPassed : kViolationFound;
  } catch (const UsageError& e) {
    err << "trilat: " << single_line(e.what()) << "\n";
  } catch (const DomainError& e) {
    err << "trilat: " << single_line(e.what()) << "\n";
  } catch (const CapabilityError& e) {
    err << "trilat: " << single_line(e.what()) << "\n";
  } catch (const std::bad_alloc&) {
    err << "trilat: out of memory\n";
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("trilat");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trilat::cli
