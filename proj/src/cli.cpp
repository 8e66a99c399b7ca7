#include "ortho/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ortho/abelian.hpp"
#include "ortho/cert_io.hpp"
#include "ortho/construct.hpp"
#include "ortho/search.hpp"

namespace ortho::cli {

namespace {

enum class Format { Text, Json, Csv };

struct Common {
  Format format = Format::Text;
  int threads = 1;
  std::optional<uint64_t> budget;  // resolved against ORTHO_NODE_BUDGET
};

uint64_t default_budget() {
  if (const char* env = std::getenv("ORTHO_NODE_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return (uint64_t)v;
  }
  return search::kDefaultNodeBudget;
}

OrthoKind parse_kind(const std::string& s) { return kind_from_string(s); }

int cmd_exists(const Common& c, OrthoKind kind, int64_t n_max, std::ostream& out) {
  auto rows = search::existence_table(kind, n_max, c.budget.value_or(default_budget()), c.threads);
  bool any_unknown = false;
  if (c.format == Format::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
      arr.push_back({{"n", r.n}, {"status", search::to_string(r.status)}});
    out << arr.dump() << "\n";
  } else {
    if (c.format == Format::Csv) out << "n,status\n";
    for (const auto& r : rows) {
      if (c.format == Format::Csv)
        out << r.n << "," << search::to_string(r.status) << "\n";
      else
        out << "n=" << r.n << " " << search::to_string(r.status) << "\n";
    }
  }
  for (const auto& r : rows)
    if (r.status == search::Existence::Unknown) any_unknown = true;
  return any_unknown ? 4 : 0;
}

int cmd_count(const Common& c, OrthoKind kind, int64_t n, bool oracle, std::ostream& out) {
  if (oracle) {
    uint64_t cnt = search::naive_oracle(n, kind);
    if (c.format == Format::Json)
      out << nlohmann::json{{"n", n}, {"kind", to_string(kind)}, {"count", cnt}, {"exhausted", true}}
                 .dump()
          << "\n";
    else if (c.format == Format::Csv)
      out << "n,kind,count,exhausted\n" << n << "," << to_string(kind) << "," << cnt << ",true\n";
    else
      out << "count=" << cnt << " exhausted=true (oracle)\n";
    return 0;
  }
  search::SearchSpec spec;
  spec.n = n;
  spec.kind = kind;
  spec.mode = search::SearchMode::Count;
  spec.node_budget = c.budget;
  spec.threads = c.threads;
  auto res = search::enumerate(spec);
  if (c.format == Format::Json)
    out << nlohmann::json{{"n", n},
                          {"kind", to_string(kind)},
                          {"count", res.count},
                          {"exhausted", res.exhausted},
                          {"nodes", res.nodes}}
               .dump()
        << "\n";
  else if (c.format == Format::Csv)
    out << "n,kind,count,exhausted,nodes\n"
        << n << "," << to_string(kind) << "," << res.count << ","
        << (res.exhausted ? "true" : "false") << "," << res.nodes << "\n";
  else
    out << "count=" << res.count << " exhausted=" << (res.exhausted ? "true" : "false")
        << " nodes=" << res.nodes << "\n";
  return res.exhausted ? 0 : 4;
}

int cmd_enumerate(const Common& c, OrthoKind kind, int64_t n, std::optional<uint64_t> limit,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
  search::SearchSpec spec;
  spec.n = n;
  spec.kind = kind;
  spec.mode = search::SearchMode::EnumerateAll;
  spec.limit = limit;
  spec.node_budget = c.budget;
  spec.threads = c.threads;
  auto res = search::enumerate(spec);
  if (!out_path.empty() && out_path != "-") {
    std::ofstream f(out_path);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    write_certificates(f, res.certificates);
  } else {
    write_certificates(out, res.certificates);
  }
  err << "enumerated " << res.certificates.size() << " certificate(s), exhausted="
      << (res.exhausted ? "true" : "false") << "\n";
  bool limit_hit = limit && res.certificates.size() >= *limit;
  return res.exhausted || limit_hit ? 0 : 4;
}

int cmd_verify(const std::string& in_path, std::ostream& out, std::ostream& err) {
  std::ifstream file;
  std::istream* in = nullptr;
  if (in_path.empty() || in_path == "-") {
    in = &std::cin;
  } else {
    file.open(in_path);
    if (!file) throw std::invalid_argument("cannot open input file: " + in_path);
    in = &file;
  }
  size_t failures = 0;
  size_t total = for_each_certificate(*in, [&](const OrthoCertificate& cert, size_t line) {
    auto v = verify_certificate(cert);
    if (!v.ok) {
      ++failures;
      err << "line " << line << ": FAIL at x=" << v.failed_index << ": " << v.reason << "\n";
    }
  });
  out << "verified " << total << " certificate(s), " << failures << " failure(s)\n";
  return failures == 0 ? 0 : 3;
}

int cmd_construct(int64_t n, bool all, int threads, const std::string& out_path, std::ostream& out,
                  std::ostream& err) {
  std::vector<OrthoCertificate> certs;
  if (all) {
    certs = construct::generate_all(n, threads);
  } else {
    auto initial = construct::build_poset(n);
    auto walks = construct::enumerate_walks(n);
    auto fin = construct::run_walk(initial, walks.front());
    std::vector<abelian::Split> splits;
    for (size_t i = 0; i < fin.poset.divisors.size(); ++i) {
      int64_t e = (fin.poset.p - 1) / fin.poset.divisors[i];
      auto iso = abelian::unit_group(e);
      std::vector<int64_t> elts;
      for (int64_t v : fin.labels[i]) elts.push_back(iso.forward(v % e));
      splits.push_back(abelian::enumerate_splits(iso.group, elts).front());
    }
    certs.push_back(construct::realize_sigma(fin, splits));
  }
  if (!out_path.empty() && out_path != "-") {
    std::ofstream f(out_path);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    write_certificates(f, certs);
  } else {
    write_certificates(out, certs);
  }
  err << "constructed " << certs.size() << " certificate(s)\n";
  return 0;
}

int cmd_bound(const Common& c, int64_t n, std::ostream& out) {
  auto closed = construct::theorem3_bound(n);
  auto product = construct::theorem3_product_form(n);
  int k = (int)numth::factorize(n / 2 - 1).factors.size() - 1;
  bool equal = closed.num * product.den == product.num * closed.den;
  uint64_t walks = construct::enumerate_walks(n).size();
  if (c.format == Format::Json) {
    out << nlohmann::json{{"n", n},
                          {"k", k},
                          {"bound", closed.exact_string()},
                          {"bound_approx", closed.approx},
                          {"product_form", product.exact_string()},
                          {"forms_equal", equal},
                          {"walks", walks},
                          {"walks_by_construction", construct::walk_count_by_construction(k)},
                          {"walks_prefactor", construct::walk_count_prefactor(k)}}
               .dump()
        << "\n";
  } else {
    out << "n=" << n << " k=" << k << "\n";
    out << "bound = " << closed.exact_string() << " = " << closed.approx << "\n";
    out << "product form = " << product.exact_string() << " (equal: " << (equal ? "yes" : "no")
        << ")\n";
    out << "walks: enumerated=" << walks
        << " 3^(k+2)(k+1)!=" << construct::walk_count_by_construction(k)
        << " (k+2)!3^(k+1)=" << construct::walk_count_prefactor(k) << "\n";
  }
  return 0;
}

abelian::AbelianGroup parse_group(const std::string& spec) {
  std::vector<int64_t> orders;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    int64_t v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad group spec: " + spec);
    orders.push_back(v);
  }
  if (orders.empty()) throw std::invalid_argument("empty group spec");
  return abelian::AbelianGroup(orders);
}

int cmd_split(const Common& c, const std::string& group_spec, bool list, std::ostream& out) {
  auto g = parse_group(group_spec);
  uint64_t count = abelian::count_zero_sum_halves(g);
  double lb = abelian::split_lower_bound(g.order());
  bool meets = abelian::count_meets_split_lower_bound(count, g.order());
  if (c.format == Format::Json) {
    nlohmann::json j{{"group", g.name()},
                     {"order", g.order()},
                     {"zero_sum_halves", count},
                     {"lower_bound", lb},
                     {"meets_bound", meets}};
    if (list) {
      std::vector<int64_t> s;
      for (int64_t i = 0; i < g.order(); ++i) s.push_back(i);
      for (int64_t i = 0; i < g.order(); ++i) s.push_back(i);
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& sp : abelian::enumerate_splits(g, s))
        arr.push_back({{"left", sp.left}, {"right", sp.right}});
      j["splits"] = arr;
    }
    out << j.dump() << "\n";
  } else {
    out << "group " << g.name() << " (order " << g.order() << ")\n";
    out << "zero-sum halves: " << count << "\n";
    out << "lower bound: " << lb << " (met: " << (meets ? "yes" : "no") << ")\n";
    if (list) {
      std::vector<int64_t> s;
      for (int64_t i = 0; i < g.order(); ++i) s.push_back(i);
      for (int64_t i = 0; i < g.order(); ++i) s.push_back(i);
      for (const auto& sp : abelian::enumerate_splits(g, s)) {
        out << "left:";
        for (int i : sp.left) out << " " << s[i];
        out << "  right:";
        for (int i : sp.right) out << " " << s[i];
        out << "\n";
      }
    }
  }
  return 0;
}

int cmd_report(const Common& c, int64_t n_max, std::ostream& out) {
  uint64_t budget = c.budget.value_or(default_budget());
  nlohmann::json arr = nlohmann::json::array();
  if (c.format == Format::Csv)
    out << "n,additive,multiplicative,exponential,exp_count,bound,additive_ratio\n";
  else if (c.format == Format::Text)
    out << "   n  add mult  exp   exp_count        bound   add_ratio\n";
  for (int64_t n = 2; n <= n_max; ++n) {
    const char* ex[3];
    uint64_t counts[3] = {0, 0, 0};
    bool exact[3] = {false, false, false};
    OrthoKind kinds[3] = {OrthoKind::Additive, OrthoKind::Multiplicative,
                          OrthoKind::Exponential};
    for (int i = 0; i < 3; ++i) {
      search::SearchSpec spec;
      spec.n = n;
      spec.kind = kinds[i];
      spec.mode = search::SearchMode::Count;
      spec.node_budget = budget;
      spec.threads = c.threads;
      auto res = search::enumerate(spec);
      counts[i] = res.count;
      exact[i] = res.exhausted;
      ex[i] = res.count > 0 ? "yes" : (res.exhausted ? "no" : "?");
    }
    std::string exp_count = exact[2] ? std::to_string(counts[2]) : "-";
    std::string bound = construct::admissible(n) && numth::factorize(n / 2 - 1).factors.size() >= 2
                            ? construct::theorem3_bound(n).exact_string()
                            : "-";
    std::string ratio = "-";
    if (n % 2 == 1 && exact[0] && counts[0] > 0) {
      // count * n^n / (n!)^2, the scaled density of additive orthomorphisms
      double lg = std::log((double)counts[0]) + (double)n * std::log((double)n) -
                  2.0 * std::lgamma((double)n + 1.0);
      std::ostringstream os;
      os.precision(6);
      os << std::exp(lg);
      ratio = os.str();
    }
    if (c.format == Format::Json) {
      arr.push_back({{"n", n},
                     {"additive", ex[0]},
                     {"multiplicative", ex[1]},
                     {"exponential", ex[2]},
                     {"exp_count", exp_count},
                     {"bound", bound},
                     {"additive_ratio", ratio}});
    } else if (c.format == Format::Csv) {
      out << n << "," << ex[0] << "," << ex[1] << "," << ex[2] << "," << exp_count << "," << bound
          << "," << ratio << "\n";
    } else {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%4lld %4s %4s %4s %11s %12s %11s\n", (long long)n, ex[0],
                    ex[1], ex[2], exp_count.c_str(), bound.c_str(), ratio.c_str());
      out << buf;
    }
  }
  if (c.format == Format::Json) out << arr.dump() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"orthomorphisms of Z/n: search, counting, construction, verification"};
  app.require_subcommand(1);

  Common common;
  bool json = false, csv = false;
  app.add_flag("--json", json, "JSON output");
  app.add_flag("--csv", csv, "CSV output");
  app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  std::optional<uint64_t> budget_flag;
  app.add_option("--budget", budget_flag,
                 "node budget for searches (default from ORTHO_NODE_BUDGET or built-in)");

  std::string kind_str;
  int64_t n = 0, n_max = 0;
  bool oracle = false, all = false, list_splits = false;
  std::optional<uint64_t> limit;
  std::string out_path, in_path, group_spec;

  auto* c_exists = app.add_subcommand("exists", "existence table for 2..n-max");
  c_exists->add_option("kind", kind_str, "additive|multiplicative|exponential")->required();
  c_exists->add_option("--n-max", n_max, "largest modulus")->required()->check(CLI::Range((int64_t)2, (int64_t)1000000));

  auto* c_count = app.add_subcommand("count", "count orthomorphisms of Z/n");
  c_count->add_option("kind", kind_str, "additive|multiplicative|exponential")->required();
  c_count->add_option("--n", n, "modulus")->required()->check(CLI::Range((int64_t)2, (int64_t)1000000));
  c_count->add_flag("--oracle", oracle, "use the brute-force oracle (n <= 9)");

  auto* c_enum = app.add_subcommand("enumerate", "enumerate certificates as JSON lines");
  c_enum->add_option("kind", kind_str, "additive|multiplicative|exponential")->required();
  c_enum->add_option("--n", n, "modulus")->required()->check(CLI::Range((int64_t)2, (int64_t)1000000));
  c_enum->add_option("--limit", limit, "stop after this many certificates");
  c_enum->add_option("--out", out_path, "output file (default stdout)");

  auto* c_verify = app.add_subcommand("verify", "verify certificates from a JSONL file");
  c_verify->add_option("--in", in_path, "input file (default stdin, - for stdin)");

  auto* c_construct = app.add_subcommand("construct", "build certificates by the divisor walk");
  c_construct->add_option("--n", n, "modulus, 2p with p-1 squarefree")->required();
  c_construct->add_flag("--all", all, "all walks and splits, deduplicated");
  c_construct->add_option("--out", out_path, "output file (default stdout)");

  auto* c_bound = app.add_subcommand("bound", "lower bound and walk counts");
  c_bound->add_option("--n", n, "modulus, 2p with p-1 squarefree")->required();

  auto* c_split = app.add_subcommand("split", "zero-sum halvings of G + G");
  c_split->add_option("--group", group_spec, "invariant factors, e.g. 2,6")->required();
  c_split->add_flag("--enumerate", list_splits, "list the splits");

  auto* c_report = app.add_subcommand("report", "survey table over 2..n-max");
  c_report->add_option("--n-max", n_max, "largest modulus")->required()->check(CLI::Range((int64_t)2, (int64_t)1000000));

  // Global flags are accepted after the subcommand name too.
  for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) sc->fallthrough();

  std::vector<std::string> argv_store;
  argv_store.push_back("ortho");
  for (const auto& a : args) argv_store.push_back(a);
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    int code = app.exit(e, out, msg);
    err << msg.str();
    return code == 0 ? 0 : 2;
  }

  common.format = json ? Format::Json : (csv ? Format::Csv : Format::Text);
  common.budget = budget_flag;

  try {
    if (app.got_subcommand(c_exists)) return cmd_exists(common, parse_kind(kind_str), n_max, out);
    if (app.got_subcommand(c_count)) return cmd_count(common, parse_kind(kind_str), n, oracle, out);
    if (app.got_subcommand(c_enum))
      return cmd_enumerate(common, parse_kind(kind_str), n, limit, out_path, out, err);
    if (app.got_subcommand(c_verify)) return cmd_verify(in_path, out, err);
    if (app.got_subcommand(c_construct))
      return cmd_construct(n, all, common.threads, out_path, out, err);
    if (app.got_subcommand(c_bound)) return cmd_bound(common, n, out);
    if (app.got_subcommand(c_split)) return cmd_split(common, group_spec, list_splits, out);
    if (app.got_subcommand(c_report)) return cmd_report(common, n_max, out);
    err << "error: no command\n";
    return 2;
  } catch (const consistency_error& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ortho::cli
