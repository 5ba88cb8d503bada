// Command-line front end: ingest, enrich, the four analyses, serve and
// econ-cluster. Analysis subcommands take the same parameters as the HTTP
// API and write the same documents.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "newsbarrier/analysis.hpp"
#include "newsbarrier/barriers.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/remote.hpp"
#include "newsbarrier/service.hpp"

namespace nb = newsbarrier;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct DataOptions {
  std::string config;
  std::string corpus;
  std::string event;
  std::string publishers;
  std::string clusters;
  std::string valence;
  std::string intensifiers;
  std::string negations;
  std::string stopwords;

  void attach(CLI::App *cmd) {
    cmd->add_option("--config", config, "Config file naming corpora and barrier data");
    cmd->add_option("--corpus", corpus, "Corpus file (overrides the config's corpora)");
    cmd->add_option("--event", event, "Event tag");
    cmd->add_option("--publishers", publishers, "Publisher profiles CSV");
    cmd->add_option("--clusters", clusters, "Economic classes CSV");
    cmd->add_option("--valence", valence, "Sentiment lexicon TSV");
    cmd->add_option("--intensifiers", intensifiers, "Intensifier list");
    cmd->add_option("--negations", negations, "Negation list");
    cmd->add_option("--stopwords", stopwords, "Stopword list");
  }

  nb::SnapshotSources sources() const {
    nb::SnapshotSources s;
    if (!config.empty())
      s = nb::SnapshotSources::from_file(config);
    if (!corpus.empty()) {
      if (event.empty())
        throw nb::Error(nb::ErrorCode::ValidationError, "--corpus needs --event");
      s.corpora = {{event, corpus}};
    }
    auto override_with = [](std::string &target, const std::string &v) {
      if (!v.empty())
        target = v;
    };
    override_with(s.publishers, publishers);
    override_with(s.clusters, clusters);
    override_with(s.valence, valence);
    override_with(s.intensifiers, intensifiers);
    override_with(s.negations, negations);
    override_with(s.stopwords, stopwords);
    return s;
  }

  /// Explicit --event, else the only configured event.
  std::string resolve_event(const nb::Snapshot &snap) const {
    if (!event.empty())
      return event;
    if (snap.corpora.size() == 1)
      return snap.corpora.begin()->first;
    throw nb::Error(nb::ErrorCode::ValidationError, "--event is required with several corpora");
  }
};

/// String-valued flags mirroring the query parameters. Both the underscore
/// spelling (as in the API) and a dashed alias are accepted.
struct QueryOptions {
  std::map<std::string, std::string> values;
  bool cumulative = false;

  void attach(CLI::App *cmd, const std::vector<std::string> &names) {
    for (const auto &name : names) {
      std::string flags = "--" + name;
      if (name.find('_') != std::string::npos) {
        std::string dashed = name;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        flags += ",--" + dashed;
      }
      if (name == "cumulative")
        cmd->add_flag(flags, cumulative, "Prefix-sum each series");
      else
        cmd->add_option(flags, values[name], "Same as the '" + name + "' query parameter");
    }
  }

  nb::ParamMap params(const CLI::App *cmd, const std::string &event) const {
    nb::ParamMap p{{"event", event}};
    for (const auto &[name, value] : values)
      if (cmd->count("--" + name) > 0)
        p[name] = value;
    if (cumulative)
      p["cumulative"] = "true";
    return p;
  }
};

void write_output(const std::string &path, const std::string &bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw nb::Error(nb::ErrorCode::IoError, "cannot write " + path);
  out << bytes;
}

int run_ingest(const std::string &input, bool remote, const std::string &client_config,
               const std::vector<std::string> &categories,
               const std::vector<std::string> &concepts, const std::string &from,
               const std::string &to, const std::string &event, const std::string &out) {
  if (event.empty())
    throw nb::Error(nb::ErrorCode::ValidationError, "--event is required");
  if (out.empty())
    throw nb::Error(nb::ErrorCode::ValidationError, "--out is required");
  nb::LoadResult result;
  nlohmann::json report;
  if (remote) {
    if (client_config.empty())
      throw nb::Error(nb::ErrorCode::ValidationError, "--remote needs --client-config");
    nb::RemoteQuery q{categories, concepts, {}};
    if (from.empty() || to.empty())
      throw nb::Error(nb::ErrorCode::ValidationError, "--remote needs --from and --to");
    q.window = nb::make_window(nb::parse_timestamp(from), nb::parse_timestamp(to));
    nb::HttpArticleClient client(nb::ClientConfig::from(nb::KeyValueConfig::load(client_config)));
    std::vector<nb::Article> articles;
    const nb::FetchStats stats = client.fetch(q, [&](std::vector<nb::Article> &&page) {
      for (auto &a : page)
        articles.push_back(std::move(a));
    });
    result.report.raw_records = stats.received;
    result.report.malformed = stats.malformed;
    result.report.duplicates = nb::normalize_articles(articles);
    result.report.retained = articles.size();
    result.corpus = {event, std::move(articles)};
    report["pages"] = stats.pages;
  } else {
    if (input.empty())
      throw nb::Error(nb::ErrorCode::ValidationError, "--input or --remote is required");
    result = nb::ingest_file(input, event);
  }
  nb::write_corpus(result.corpus, out);
  report["event"] = event;
  report["raw_records"] = result.report.raw_records;
  report["malformed"] = result.report.malformed;
  report["duplicates"] = result.report.duplicates;
  report["retained"] = result.report.retained;
  report["problems"] = result.report.problems;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_serve(const std::string &config, const std::string &bind, const std::string &cache_dir,
              const std::string &static_dir) {
  nb::ServiceConfig sc = nb::ServiceConfig::from_file(config);
  if (!bind.empty()) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos)
      throw nb::Error(nb::ErrorCode::ConfigError, "--bind must be host:port");
    sc.host = bind.substr(0, colon);
    sc.port = std::stoi(bind.substr(colon + 1));
  }
  if (!cache_dir.empty())
    sc.cache_dir = cache_dir;
  if (!static_dir.empty())
    sc.static_dir = static_dir;

  // Reload re-reads the config so newly listed corpora are picked up too.
  nb::AnalysisService service(
      [config] { return nb::load_snapshot(nb::SnapshotSources::from_file(config)); },
      sc.cache_dir, sc.cache_capacity);
  httplib::Server server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop)
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  try {
    nb::serve(service, server, sc.host, sc.port, sc.static_dir, [&](int port) {
      std::cerr << "listening on http://" << sc.host << ":" << port << " (snapshot "
                << service.snapshot()->id << ")\n";
    });
  } catch (...) {
    g_stop = true;
    watcher.join();
    throw;
  }
  g_stop = true;
  watcher.join();
  std::cerr << "stopped\n";
  return 0;
}

int run_econ_cluster(const std::string &input, int k, std::uint64_t seed, bool standardize,
                     const std::string &out) {
  if (input.empty() || out.empty())
    throw nb::Error(nb::ErrorCode::ValidationError, "--input and --out are required");
  nb::KMeansOptions opts;
  opts.k = k;
  opts.seed = seed;
  opts.standardize = standardize;
  const nb::EconomicClusterMap map = nb::kmeans(nb::load_prosperity(input), opts);
  nb::write_clusters(map, out);
  nlohmann::json report = {{"k", map.k},
                           {"seed", map.seed},
                           {"inertia", map.inertia},
                           {"iterations", map.iterations},
                           {"countries", map.countries.size()}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"News propagation and barrier analytics"};
  app.require_subcommand(1);

  // ingest
  auto *ingest = app.add_subcommand("ingest", "Convert a local dump or fetch remotely into a corpus");
  std::string in_input, in_client, in_from, in_to, in_event, in_out;
  std::vector<std::string> in_categories, in_concepts;
  bool in_remote = false;
  ingest->add_option("--input", in_input, "Line-delimited article file");
  ingest->add_flag("--remote", in_remote, "Fetch from the remote news API");
  ingest->add_option("--client-config", in_client, "Remote client config (endpoint, api_key, page_size)");
  ingest->add_option("--category", in_categories, "Category filter (repeatable)");
  ingest->add_option("--concept", in_concepts, "Concept filter (repeatable)");
  ingest->add_option("--from", in_from, "Window start");
  ingest->add_option("--to", in_to, "Window end (exclusive)");
  ingest->add_option("--event", in_event, "Event tag");
  ingest->add_option("--out", in_out, "Output corpus file");

  // enrich
  auto *enrich = app.add_subcommand("enrich", "Report barrier label coverage");
  DataOptions enrich_data;
  std::string enrich_out;
  enrich_data.attach(enrich);
  enrich->add_option("--out", enrich_out, "Output file (default stdout)");

  // analyses
  struct AnalysisCommand {
    nb::AnalysisKind kind;
    CLI::App *cmd;
    DataOptions data;
    QueryOptions query;
    std::string out;
  };
  std::vector<std::unique_ptr<AnalysisCommand>> analyses;
  auto add_analysis = [&](const char *name, nb::AnalysisKind kind, const char *help,
                          std::vector<std::string> params) {
    auto ac = std::make_unique<AnalysisCommand>();
    ac->kind = kind;
    ac->cmd = app.add_subcommand(name, help);
    ac->data.attach(ac->cmd);
    params.insert(params.begin(), {"barrier", "from", "to"});
    ac->query.attach(ac->cmd, params);
    ac->cmd->add_option("--out", ac->out, "Output document (default stdout)");
    analyses.push_back(std::move(ac));
  };
  add_analysis("propagate", nb::AnalysisKind::Propagation, "Propagation graph with communities",
               {"tau", "max_lag", "mode", "communities", "max_nodes"});
  add_analysis("trends", nb::AnalysisKind::Trends, "Article counts per label over time",
               {"bin", "cumulative"});
  add_analysis("sentiment", nb::AnalysisKind::Sentiment, "Daily sentiment heatmap per label", {});
  add_analysis("topics", nb::AnalysisKind::Topics, "Hierarchical topic model",
               {"label", "k", "m", "min_df"});

  // serve
  auto *serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  std::string sv_config, sv_bind, sv_cache, sv_static;
  serve_cmd->add_option("--config", sv_config, "Config file")->required();
  serve_cmd->add_option("--bind", sv_bind, "host:port (overrides config)");
  serve_cmd->add_option("--cache-dir", sv_cache, "Cache directory (overrides config)");
  serve_cmd->add_option("--static-dir", sv_static, "Static files served at /");

  // econ-cluster
  auto *econ = app.add_subcommand("econ-cluster", "k-means over prosperity vectors");
  std::string ec_input, ec_out;
  int ec_k = 20;
  std::uint64_t ec_seed = 0;
  bool ec_standardize = false;
  econ->add_option("--input", ec_input, "CSV: country,d1..d12");
  econ->add_option("--k", ec_k, "Number of classes");
  econ->add_option("--seed", ec_seed, "Seed for k-means++");
  econ->add_flag("--standardize", ec_standardize, "z-score each dimension first");
  econ->add_option("--out", ec_out, "Output country,class CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (ingest->parsed())
      return run_ingest(in_input, in_remote, in_client, in_categories, in_concepts, in_from,
                        in_to, in_event, in_out);
    if (enrich->parsed()) {
      const nb::Snapshot snap = nb::load_snapshot(enrich_data.sources());
      const nb::Corpus &corpus = snap.corpus(enrich_data.resolve_event(snap));
      nlohmann::json report = nb::coverage_report(corpus, snap.db);
      report["warnings"] = snap.db.warnings;
      write_output(enrich_out, report.dump(2) + "\n");
      return 0;
    }
    for (const auto &ac : analyses) {
      if (!ac->cmd->parsed())
        continue;
      const auto started = std::chrono::steady_clock::now();
      const nb::Snapshot snap = nb::load_snapshot(ac->data.sources());
      const nb::AnalysisRequest req = nb::parse_request(
          ac->kind, ac->query.params(ac->cmd, ac->data.resolve_event(snap)), snap.defaults);
      write_output(ac->out, nb::render_document(nb::run_analysis(snap, req)));
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
      if (!ac->out.empty() && ac->out != "-")
        std::cerr << "wrote " << ac->out << " in " << ms << " ms\n";
      return 0;
    }
    if (serve_cmd->parsed())
      return run_serve(sv_config, sv_bind, sv_cache, sv_static);
    if (econ->parsed())
      return run_econ_cluster(ec_input, ec_k, ec_seed, ec_standardize, ec_out);
  } catch (const nb::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
