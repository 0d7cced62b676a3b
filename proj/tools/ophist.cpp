// ophist: opcode-histogram comparison and metamorphic mutation toolkit.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ophist/classify.hpp"
#include "ophist/digest.hpp"
#include "ophist/distance.hpp"
#include "ophist/histogram.hpp"
#include "ophist/mutation.hpp"

namespace fs = std::filesystem;
using namespace ophist;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Staged writes: every temp file lands before any final path appears, so
// a failure never leaves a partial output set behind.
void write_files(const std::vector<std::pair<fs::path, std::string>>& outputs) {
  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const fs::path& tmp : staged) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  };
  for (const auto& [path, content] : outputs) {
    fs::path tmp = path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out << content;
    if (!out) {
      cleanup();
      throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
    }
    out.close();
    staged.push_back(tmp);
  }
  for (std::size_t i = 0; i < outputs.size(); ++i)
    fs::rename(staged[i], outputs[i].first);
}

void write_file(const fs::path& path, std::string_view content) {
  write_files({{path, std::string(content)}});
}

Program load_program(const fs::path& path) {
  return parse_program(read_file(path), path.stem().string());
}

std::map<std::string, double> load_weights(const std::string& path) {
  std::map<std::string, double> weights;
  if (path.empty()) return weights;
  try {
    nlohmann::json doc = nlohmann::json::parse(read_file(path));
    for (const auto& [mnem, value] : doc.items())
      weights[mnem] = value.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error,
                std::string("malformed weights file: ") + e.what());
  }
  return weights;
}

// Features for one listing, honoring a .hist.json cache when its digest
// still matches the source. Cache-only inputs load as-is.
HistogramSet load_features(const fs::path& source, const fs::path& cache) {
  const bool have_source = !source.empty() && fs::exists(source);
  const bool have_cache = !cache.empty() && fs::exists(cache);
  if (have_cache) {
    CachedFeatures cached = cache_from_json(read_file(cache));
    if (!have_source) return cached.set;
    if (cached.source_digest == content_digest(read_file(source)))
      return cached.set;
    // stale cache: fall through and regenerate from the source
  }
  if (!have_source)
    throw Error(ErrorCode::io_error,
                "no usable input for '" + source.string() + "'");
  return extract_features(load_program(source));
}

struct MetricFlags {
  double r = 2.0;
  bool root = false;
  std::string weights_path;

  MetricSpec to_spec() const {
    MetricSpec spec;
    spec.r = r;
    spec.root = root;
    spec.weights = load_weights(weights_path);
    spec.validate();
    return spec;
  }
};

void add_metric_flags(CLI::App* cmd, MetricFlags& flags) {
  cmd->add_option("--r", flags.r, "Minkowski exponent (default 2)")
      ->check(CLI::Range(1.0, 64.0));
  cmd->add_flag("--root", flags.root, "apply the 1/r-th root");
  cmd->add_option("--weights", flags.weights_path,
                  "JSON file of per-mnemonic weights");
}

int run_parse(const std::vector<std::string>& inputs) {
  for (const auto& input : inputs) {
    Program p = load_program(input);
    std::size_t total = 0;
    for (const Subroutine& sub : p.subroutines) total += sub.body.size();
    std::printf("%s: %zu subroutines, %zu instructions\n", p.id.c_str(),
                p.subroutines.size(), total);
    for (const Subroutine& sub : p.subroutines) {
      std::printf("  %s: %zu instructions\n", sub.name.c_str(),
                  sub.body.size());
      if (sub.empty())
        std::printf("  warning: empty subroutine '%s'\n", sub.name.c_str());
    }
  }
  return 0;
}

int run_features(const std::vector<std::string>& inputs,
                 const std::string& out_dir) {
  // Compute everything before writing anything.
  std::vector<std::pair<fs::path, std::string>> outputs;
  for (const auto& input : inputs) {
    fs::path source(input);
    std::string text = read_file(source);
    Program p = parse_program(text, source.stem().string());
    std::vector<std::string> skipped;
    HistogramSet set = extract_features(p, &skipped);
    for (const auto& name : skipped)
      std::fprintf(stderr, "warning: %s: empty subroutine '%s' skipped\n",
                   p.id.c_str(), name.c_str());
    fs::path dir = out_dir.empty() ? source.parent_path() : fs::path(out_dir);
    outputs.emplace_back(dir / (source.stem().string() + ".hist.json"),
                         cache_to_json(set, content_digest(text)));
  }
  write_files(outputs);
  for (const auto& [path, content] : outputs)
    std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

HistogramSet load_input_features(const std::string& input) {
  fs::path path(input);
  if (path.extension() == ".json")  // .hist.json
    return load_features({}, path);
  fs::path cache = path.parent_path() / (path.stem().string() + ".hist.json");
  return load_features(path, cache);
}

int run_compare(const std::string& a, const std::string& b,
                const MetricFlags& metric_flags, bool as_json) {
  MetricSpec metric = metric_flags.to_spec();
  HistogramSet fa = load_input_features(a);
  HistogramSet fb = load_input_features(b);
  double ab = directed_distance(fa, fb, metric);
  double ba = directed_distance(fb, fa, metric);
  double sym = (ab + ba) / 2.0;
  if (as_json) {
    nlohmann::json doc = {{"first", fa.program_id},
                          {"second", fb.program_id},
                          {"directed_1_to_2", ab},
                          {"directed_2_to_1", ba},
                          {"symmetric", sym}};
    std::printf("%s\n", doc.dump(2).c_str());
  } else {
    std::printf("d(%s -> %s) = %.3f\n", fa.program_id.c_str(),
                fb.program_id.c_str(), ab);
    std::printf("d(%s -> %s) = %.3f\n", fb.program_id.c_str(),
                fa.program_id.c_str(), ba);
    std::printf("symmetric = %.3f\n", sym);
  }
  return 0;
}

DistanceMatrix matrix_of_directory(const std::string& dir,
                                   const MetricSpec& metric) {
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::io_error, "'" + dir + "' is not a directory");
  // stem -> (source listing, cache); label order is lexicographic by stem.
  std::map<std::string, std::pair<fs::path, fs::path>> entries;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path path = entry.path();
    std::string name = path.filename().string();
    if (name.size() > 5 && name.ends_with(".oasm"))
      entries[path.stem().string()].first = path;
    else if (name.size() > 10 && name.ends_with(".hist.json"))
      entries[name.substr(0, name.size() - 10)].second = path;
  }
  if (entries.size() < 2)
    throw Error(ErrorCode::io_error,
                "need at least two programs in '" + dir + "'");
  std::vector<HistogramSet> programs;
  for (const auto& [stem, paths] : entries) {
    HistogramSet set = load_features(paths.first, paths.second);
    set.program_id = stem;
    programs.push_back(std::move(set));
  }
  return distance_matrix(programs, metric);
}

int run_matrix(const std::string& dir, const MetricFlags& metric_flags,
               const std::string& csv_out, const std::string& json_out) {
  DistanceMatrix m = matrix_of_directory(dir, metric_flags.to_spec());
  write_files({{csv_out, matrix_to_csv(m)}, {json_out, matrix_to_json(m)}});
  std::printf("wrote %s and %s (%zu programs)\n", csv_out.c_str(),
              json_out.c_str(), m.labels.size());
  return 0;
}

int run_classify(const std::string& matrix_path, double threshold,
                 const std::string& out, const std::string& format) {
  DistanceMatrix m = matrix_from_json(read_file(matrix_path));
  Classification c = classify(m, ClassifierConfig{threshold});
  std::string json = classification_to_json(c);
  if (!out.empty()) write_file(out, json);
  if (format == "json") {
    std::printf("%s", json.c_str());
  } else {
    std::printf("%s", render_threshold_table(m, threshold).c_str());
    std::printf("\nthreshold %.6g: %zu pairs, %zu clusters\n", threshold,
                c.pairs.size(), c.clusters.size());
    for (const auto& cluster : c.clusters) {
      std::printf("  {");
      for (std::size_t i = 0; i < cluster.size(); ++i)
        std::printf("%s%s", i ? ", " : "", cluster[i].c_str());
      std::printf("}\n");
    }
  }
  return 0;
}

int run_mutate(const std::string& input, const std::string& technique,
               std::uint64_t seed, double density, const std::string& out) {
  auto t = technique_from_name(technique);
  if (!t) throw CLI::ValidationError("--technique", "unknown technique");
  Program p = load_program(input);
  MutationConfig cfg;
  cfg.technique = *t;
  cfg.seed = seed;
  cfg.density = density;
  Program mutant = apply_mutation(p, cfg);
  mutant.id = fs::path(out).stem().string();
  write_file(out, serialize_program(mutant));
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int run_family(const std::string& input, std::size_t n,
               const std::vector<std::string>& techniques, std::uint64_t seed,
               double density, const std::string& out_dir) {
  std::vector<MutationConfig> configs;
  for (const auto& name : techniques) {
    auto t = technique_from_name(name);
    if (!t) throw CLI::ValidationError("--technique", "unknown technique");
    configs.push_back({seed, *t, density, std::nullopt});
  }
  Program base = load_program(input);
  FamilyResult family = make_family(base, n, configs);

  fs::create_directories(out_dir);
  std::vector<std::pair<fs::path, std::string>> outputs;
  for (const Program& variant : family.variants)
    outputs.emplace_back(fs::path(out_dir) / (variant.id + ".oasm"),
                         serialize_program(variant));
  outputs.emplace_back(fs::path(out_dir) / "manifest.json",
                       family.manifest_json);
  write_files(outputs);
  std::printf("wrote %zu variants and manifest.json to %s\n",
              family.variants.size(), out_dir.c_str());
  return 0;
}

int run_calibrate(const std::string& matrix_path, const std::string& labels_path,
                  const std::string& out) {
  DistanceMatrix m = matrix_from_json(read_file(matrix_path));
  std::map<std::string, std::string> labels;
  try {
    nlohmann::json doc = nlohmann::json::parse(read_file(labels_path));
    for (const auto& [id, fam] : doc.items())
      labels[id] = fam.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error,
                std::string("malformed labels file: ") + e.what());
  }

  CalibrationResult r = calibrate_threshold(m, labels);
  if (!out.empty()) write_file(out, calibration_to_json(r));
  if (r.valid) {
    std::printf("threshold = %.6g (max intra %.6g < min inter %.6g)\n",
                r.threshold, r.max_intra, r.min_inter);
  } else {
    std::printf(
        "no valid threshold: families overlap (max intra %.6g >= min inter "
        "%.6g)\n",
        r.max_intra, r.min_inter);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opcode-histogram program comparison toolkit"};
  app.require_subcommand(1);

  // parse
  std::vector<std::string> parse_inputs;
  CLI::App* cmd_parse = app.add_subcommand("parse", "validate listings");
  cmd_parse->add_option("files", parse_inputs, "input .oasm files")
      ->required()
      ->expected(-1);

  // features
  std::vector<std::string> feature_inputs;
  std::string features_out;
  CLI::App* cmd_features =
      app.add_subcommand("features", "write .hist.json caches");
  cmd_features->add_option("files", feature_inputs, "input .oasm files")
      ->required()
      ->expected(-1);
  cmd_features->add_option("-o,--out-dir", features_out, "output directory");

  // compare
  std::string cmp_a, cmp_b;
  MetricFlags cmp_metric;
  bool cmp_json = false;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "directed and symmetric distance");
  cmd_compare->add_option("first", cmp_a)->required();
  cmd_compare->add_option("second", cmp_b)->required();
  add_metric_flags(cmd_compare, cmp_metric);
  cmd_compare->add_flag("--json", cmp_json, "full-precision JSON output");

  // matrix
  std::string matrix_dir, matrix_csv = "matrix.csv", matrix_json = "matrix.json";
  MetricFlags matrix_metric;
  CLI::App* cmd_matrix =
      app.add_subcommand("matrix", "pairwise distance matrix of a directory");
  cmd_matrix->add_option("dir", matrix_dir)->required();
  cmd_matrix->add_option("-o,--csv", matrix_csv, "CSV output (3 decimals)");
  cmd_matrix->add_option("--json", matrix_json, "JSON output (full precision)");
  add_metric_flags(cmd_matrix, matrix_metric);

  // classify
  std::string classify_matrix, classify_out, classify_format = "text";
  double classify_threshold = 0.057;
  CLI::App* cmd_classify =
      app.add_subcommand("classify", "threshold classification of a matrix");
  cmd_classify->add_option("matrix", classify_matrix, "matrix .json file")
      ->required();
  cmd_classify
      ->add_option("--threshold", classify_threshold, "inclusive threshold")
      ->check(CLI::NonNegativeNumber);
  cmd_classify->add_option("-o,--out", classify_out, "JSON output file");
  cmd_classify->add_option("--format", classify_format)
      ->check(CLI::IsMember({"text", "json"}));

  // mutate
  std::string mut_in, mut_technique, mut_out;
  std::uint64_t mut_seed = 0;
  double mut_density = 0.0;
  CLI::App* cmd_mutate = app.add_subcommand("mutate", "produce one variant");
  cmd_mutate->add_option("input", mut_in)->required();
  cmd_mutate->add_option("--technique", mut_technique)->required();
  cmd_mutate->add_option("--seed", mut_seed);
  cmd_mutate->add_option("--density", mut_density)->check(CLI::Range(0.0, 1.0));
  cmd_mutate->add_option("-o,--out", mut_out)->required();

  // family
  std::string fam_in, fam_out;
  std::vector<std::string> fam_techniques;
  std::size_t fam_n = 1;
  std::uint64_t fam_seed = 0;
  double fam_density = 0.0;
  CLI::App* cmd_family =
      app.add_subcommand("family", "variant family with lineage manifest");
  cmd_family->add_option("input", fam_in)->required();
  cmd_family->add_option("-n,--count", fam_n, "number of variants")
      ->check(CLI::PositiveNumber);
  cmd_family
      ->add_option("--technique", fam_techniques, "technique sequence")
      ->required();
  cmd_family->add_option("--seed", fam_seed);
  cmd_family->add_option("--density", fam_density)->check(CLI::Range(0.0, 1.0));
  cmd_family->add_option("-o,--out-dir", fam_out)->required();

  // calibrate
  std::string cal_matrix, cal_labels, cal_out;
  CLI::App* cmd_calibrate =
      app.add_subcommand("calibrate", "threshold report from labeled matrix");
  cmd_calibrate->add_option("matrix", cal_matrix)->required();
  cmd_calibrate->add_option("labels", cal_labels, "JSON {id: family}")
      ->required();
  cmd_calibrate->add_option("-o,--out", cal_out, "JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_parse->parsed()) return run_parse(parse_inputs);
    if (cmd_features->parsed()) return run_features(feature_inputs, features_out);
    if (cmd_compare->parsed())
      return run_compare(cmp_a, cmp_b, cmp_metric, cmp_json);
    if (cmd_matrix->parsed())
      return run_matrix(matrix_dir, matrix_metric, matrix_csv, matrix_json);
    if (cmd_classify->parsed())
      return run_classify(classify_matrix, classify_threshold, classify_out,
                          classify_format);
    if (cmd_mutate->parsed())
      return run_mutate(mut_in, mut_technique, mut_seed, mut_density, mut_out);
    if (cmd_family->parsed())
      return run_family(fam_in, fam_n, fam_techniques, fam_seed, fam_density,
                        fam_out);
    if (cmd_calibrate->parsed())
      return run_calibrate(cal_matrix, cal_labels, cal_out);
  } catch (const Error& e) {
    nlohmann::json record = {{"error",
                              {{"code", std::string(to_string(e.code()))},
                               {"message", e.what()}}}};
    if (e.line() > 0) record["error"]["line"] = e.line();
    std::fprintf(stderr, "%s\n", record.dump().c_str());
    return e.is_parse_error() ? 2 : 3;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json record = {
        {"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", record.dump().c_str());
    return 3;
  }
  return 0;
}
