// gevi: group evolution analysis pipeline and viewer back end.
//
//   gevi ingest  --messages m.csv --actors a.csv -o slots.json
//   gevi detect  --slots slots.json --k 3 -o groups.csv
//   gevi evolve  --slots slots.json --groups groups.csv -o artifact.json
//   gevi layout  --artifact artifact.json [--svg out/]
//   gevi stats   --artifact artifact.json [--csv series.csv] [--charts out/]
//   gevi run     --config pipeline.json
//   gevi serve   --artifact artifact.json --listen 127.0.0.1:8080

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "gevi/pipeline.hpp"
#include "gevi/service.hpp"

namespace {

struct Overrides {
  std::optional<std::string> messages, actors, range_start, range_end, output, listen;
  std::optional<int> window_days, step_days, k, min_lifespan, sweeps;
  std::optional<double> th, sh;

  void apply(gevi::PipelineConfig& c) const {
    if (messages) c.messages_path = *messages;
    if (actors) c.actors_path = *actors;
    if (range_start) c.range_start = *range_start;
    if (range_end) c.range_end = *range_end;
    if (output) c.output_path = *output;
    if (listen) c.listen = *listen;
    if (window_days) c.window_days = *window_days;
    if (step_days) c.step_days = *step_days;
    if (k) c.k = *k;
    if (min_lifespan) c.evolution.min_lifespan = *min_lifespan;
    if (sweeps) c.sweeps = *sweeps;
    if (th) c.evolution.th = *th;
    if (sh) c.evolution.sh = *sh;
  }
};

void add_ingest_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--messages", o.messages, "messages CSV (sender,recipient,timestamp)");
  cmd->add_option("--actors", o.actors, "actor list, one identifier per line");
  cmd->add_option("--window-days", o.window_days, "slot length in days (default 30)");
  cmd->add_option("--step-days", o.step_days, "slot step in days (default 15)");
  cmd->add_option("--range-start", o.range_start, "first slot start (ISO-8601, default earliest message)");
  cmd->add_option("--range-end", o.range_end, "last slot start bound (ISO-8601, default latest message)");
}

void add_evolve_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--th", o.th, "modified Jaccard threshold for transitions (default 0.5)");
  cmd->add_option("--sh", o.sh, "size ratio threshold for addition/deletion (default 10)");
  cmd->add_option("--min-lifespan", o.min_lifespan, "slots a path must span for stable groups (default 3)");
}

void write_output(const std::optional<std::string>& path, const std::string& contents) {
  if (!path || *path == "-") {
    std::cout << contents;
  } else {
    gevi::write_file_atomic(*path, contents);
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void report_ingest(const gevi::IngestResult& r) {
  std::cerr << "rows: " << r.rows << ", messages after expansion: " << r.parsed_messages
            << ", malformed rows: " << r.issues.size() << ", after actor filter: " << r.messages.size()
            << ", slots: " << r.slots.size() << '\n';
  const std::size_t shown = std::min<std::size_t>(r.issues.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    std::cerr << "  line " << r.issues[i].line << ": " << r.issues[i].reason << '\n';
  }
  if (r.issues.size() > shown) std::cerr << "  ... " << r.issues.size() - shown << " more\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gevi - overlapping group evolution analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);

  Overrides o;
  std::optional<std::string> slots_path, groups_path, artifact_path, svg_dir, csv_path, charts_dir,
      static_dir;

  auto* ingest = app.add_subcommand("ingest", "parse messages and build per-slot interaction graphs");
  add_ingest_options(ingest, o);
  ingest->add_option("-o,--out", o.output, "slots document (default stdout)");

  auto* detect = app.add_subcommand("detect", "extract overlapping groups by clique percolation");
  detect->add_option("--slots", slots_path, "slots document from ingest")->required();
  detect->add_option("--k", o.k, "clique size (default 3)");
  detect->add_option("-o,--out", o.output, "groups file (default stdout)");

  auto* evolve = app.add_subcommand("evolve", "link groups across slots and classify events");
  evolve->add_option("--slots", slots_path, "slots document from ingest")->required();
  evolve->add_option("--groups", groups_path, "groups file from detect")->required();
  add_evolve_options(evolve, o);
  evolve->add_option("-o,--out", o.output, "artifact (default stdout)");

  auto* layout = app.add_subcommand("layout", "compute layered drawings of every hierarchy");
  layout->add_option("--artifact", artifact_path, "artifact to augment")->required();
  layout->add_option("--sweeps", o.sweeps, "crossing reduction iterations (default 4)");
  layout->add_option("-o,--out", o.output, "output artifact (default: rewrite input)");
  layout->add_option("--svg", svg_dir, "also write hierarchy-<id>.svg files into this directory");

  auto* stats = app.add_subcommand("stats", "per-slot series and summary figures");
  stats->add_option("--artifact", artifact_path, "artifact")->required();
  stats->add_option("--csv", csv_path, "write the per-slot series CSV here (default stdout)");
  stats->add_option("--charts", charts_dir, "write counts.svg and stability.svg into this directory");

  auto* run = app.add_subcommand("run", "ingest, detect, evolve, layout and stats in one go");
  add_ingest_options(run, o);
  run->add_option("--k", o.k, "clique size (default 3)");
  add_evolve_options(run, o);
  run->add_option("--sweeps", o.sweeps, "crossing reduction iterations (default 4)");
  run->add_option("-o,--out", o.output, "artifact path (default artifact.json)");

  auto* serve = app.add_subcommand("serve", "serve an artifact over the read-only HTTP API");
  serve->add_option("--artifact", artifact_path, "artifact to serve")->required();
  serve->add_option("--listen", o.listen, "host:port (default 127.0.0.1:8080)");
  serve->add_option("--static", static_dir, "directory of viewer assets mounted at /");

  CLI11_PARSE(app, argc, argv);

  try {
    gevi::PipelineConfig config = config_path.empty() ? gevi::PipelineConfig{} : gevi::load_config(config_path);
    const bool output_given = o.output.has_value();
    o.apply(config);
    config.validate();
    const std::optional<std::string> out = output_given ? o.output : std::nullopt;

    if (*ingest) {
      const auto result = gevi::ingest_files(config);
      report_ingest(result);
      write_output(out, gevi::slots_to_json(result).dump(1) + "\n");
    } else if (*detect) {
      const auto doc = gevi::slots_from_json(read_json(*slots_path));
      const auto groups = gevi::extract_groups(doc.graphs, config.k);
      std::ostringstream text;
      gevi::write_groups(text, groups);
      write_output(out, text.str());
      std::cerr << groups.size() << " groups\n";
    } else if (*evolve) {
      const auto doc = gevi::slots_from_json(read_json(*slots_path));
      std::ifstream gin(*groups_path);
      if (!gin) throw std::runtime_error("cannot open " + *groups_path);
      auto artifact = gevi::build_artifact(gevi::read_groups(gin), doc.slots(), doc.message_counts,
                                           config.evolution);
      artifact.config = gevi::config_echo(config);
      artifact.ingest = doc.counters;
      write_output(out, gevi::to_json(artifact).dump(1) + "\n");
      std::cerr << artifact.graph.groups().size() << " groups, " << artifact.graph.transitions().size()
                << " transitions, " << artifact.hierarchies.size() << " hierarchies\n";
    } else if (*layout) {
      auto artifact = gevi::load_artifact(*artifact_path);
      gevi::apply_layout(artifact, config.metrics, config.sweeps);
      write_output(out ? out : artifact_path, gevi::to_json(artifact).dump(1) + "\n");
      if (svg_dir) {
        std::filesystem::create_directories(*svg_dir);
        for (const auto& g : artifact.layouts) {
          const auto path = std::filesystem::path(*svg_dir) / ("hierarchy-" + std::to_string(g.hierarchy) + ".svg");
          gevi::write_file_atomic(path.string(), gevi::render_svg(g, artifact.graph, config.metrics));
        }
      }
    } else if (*stats) {
      const auto artifact = gevi::load_artifact(*artifact_path);
      write_output(csv_path, gevi::series_csv(artifact));
      std::cerr << gevi::summary_text(artifact);
      if (charts_dir) {
        std::filesystem::create_directories(*charts_dir);
        const std::filesystem::path dir(*charts_dir);
        gevi::write_file_atomic((dir / "counts.svg").string(), gevi::counts_chart_svg(artifact));
        gevi::write_file_atomic((dir / "stability.svg").string(), gevi::stability_chart_svg(artifact));
      }
    } else if (*run) {
      const auto artifact = gevi::run_pipeline(config);
      std::cerr << gevi::summary_text(artifact) << "artifact written to " << config.output_path << '\n';
    } else if (*serve) {
      const gevi::ApiRouter router(gevi::load_artifact(*artifact_path));
      const auto [host, port] = gevi::parse_listen_address(config.listen);
      gevi::ApiServer server(router, static_dir.value_or(""));
      const int bound = server.bind(host, port);
      std::cerr << "serving on http://" << host << ':' << bound << '\n';
      server.run();
    }
  } catch (const std::exception& e) {
    std::cerr << "gevi: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
