// Copyright 2026 The vqsyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "vqsyn/vqsyn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInternal = 1;

// Carries an exit code up to main.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(std::string message) { throw Failure{kExitInput, std::move(message)}; }

void check(vqs_status status, const std::string& context) {
  if (status == VQS_OK) return;
  const int code = status == VQS_ERR_INTERNAL ? kExitInternal
                   : vqs_status_is_numeric(status) ? kExitNumeric
                                                   : kExitInput;
  throw Failure{code, context.empty() ? std::string(vqs_last_error())
                                      : fmt::format("{}: {}", context, vqs_last_error())};
}

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Ensemble = std::unique_ptr<vqs_ensemble, HandleDeleter<vqs_ensemble, vqs_ensemble_free>>;
using Codebook = std::unique_ptr<vqs_codebook, HandleDeleter<vqs_codebook, vqs_codebook_free>>;
using Dict = std::unique_ptr<vqs_dict, HandleDeleter<vqs_dict, vqs_dict_free>>;
using Tokens = std::unique_ptr<vqs_tokens, HandleDeleter<vqs_tokens, vqs_tokens_free>>;
using Reports = std::unique_ptr<vqs_reports, HandleDeleter<vqs_reports, vqs_reports_free>>;

class Buffer {
 public:
  Buffer() = default;
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  ~Buffer() { vqs_buffer_free(&buf_); }
  vqs_buffer* get() { return &buf_; }
  std::string_view view() const { return {buf_.data ? buf_.data : "", buf_.size}; }

 private:
  vqs_buffer buf_{nullptr, 0};
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_error(fmt::format("IoError: cannot open '{}'", path));
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) usage_error(fmt::format("IoError: cannot read '{}'", path));
  return data;
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) usage_error(fmt::format("IoError: cannot write '{}'", path));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) usage_error(fmt::format("IoError: cannot write '{}'", path));
}

std::string sha256(std::string_view data) {
  char hex[65];
  check(vqs_sha256_hex(data.data(), data.size(), hex), "checksum");
  return hex;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string format_param(double v) { return fmt::format("{}", v); }

// Options shared by every subcommand.
struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

// Parameter and checksum record written alongside every output.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void param(const std::string& key, const std::string& value) { params_[key] = value; }
  void param(const std::string& key, double value) { params_[key] = format_param(value); }
  template <typename Int>
    requires std::is_integral_v<Int>
  void param(const std::string& key, Int value) {
    params_[key] = std::to_string(value);
  }

  // Reads and checksums an input file.
  std::string input(const std::string& role, const std::string& path) {
    std::string data = read_file(path);
    inputs_.emplace_back(fmt::format("{}[{}]", role, inputs_.size()), fmt::format("{} sha256={}", path, sha256(data)));
    return data;
  }

  std::string render() const {
    std::string text = fmt::format("command={}\nversion={}\n", command_, vqs_version());
    for (const auto& [k, v] : params_) text += fmt::format("{}={}\n", k, v);
    for (const auto& [k, v] : inputs_) text += fmt::format("input.{}={}\n", k, v);
    return text;
  }

 private:
  std::string command_;
  std::map<std::string, std::string> params_;
  std::vector<std::pair<std::string, std::string>> inputs_;
};

// Writes the primary output to --out or stdout, then the manifest to
// <out>.manifest or stderr.
void emit(const Globals& g, const Manifest& manifest, std::string_view data) {
  if (g.out.empty()) {
    std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
    std::cout.flush();
    std::cerr << manifest.render();
  } else {
    write_file(g.out, data);
    write_file(g.out + ".manifest", manifest.render());
  }
}

struct StructureOptions {
  std::string chain;
  std::string models;
};

void add_structure_options(CLI::App* cmd, StructureOptions& opts) {
  cmd->add_option("--chain", opts.chain, "Chain identifier to read (default: first chain)");
  cmd->add_option("--models", opts.models, "1-based model range FIRST:LAST");
}

void record(Manifest& m, const StructureOptions& opts) {
  m.param("chain", opts.chain.empty() ? std::string("first") : opts.chain);
  m.param("models", opts.models.empty() ? std::string("all") : opts.models);
}

Ensemble load_structure(Manifest& m, const std::string& role, const std::string& path, const StructureOptions& opts) {
  const std::string text = m.input(role, path);
  char chain = 0;
  if (!opts.chain.empty()) {
    if (opts.chain.size() != 1) usage_error(fmt::format("InvalidArgument: chain '{}' must be one character", opts.chain));
    chain = opts.chain[0];
  }
  int first = 0, last = 0;
  if (!opts.models.empty()) {
    if (std::sscanf(opts.models.c_str(), "%d:%d", &first, &last) != 2 || first < 1 || last < first)
      usage_error(fmt::format("InvalidArgument: model range '{}' must be FIRST:LAST with 1 <= FIRST <= LAST", opts.models));
  }
  vqs_ensemble* e = nullptr;
  check(vqs_ensemble_parse_pdb(text.data(), text.size(), chain, first, last, stem(path).c_str(), &e), path);
  return Ensemble(e);
}

Codebook load_codebook(Manifest& m, const std::string& path) {
  const std::string data = m.input("codebook", path);
  vqs_codebook* cb = nullptr;
  check(vqs_codebook_load(data.data(), data.size(), VQS_CODEBOOK_AUTO, &cb), path);
  Codebook owned(cb);
  m.param("codebook_id", std::string(vqs_codebook_id(cb)));
  return owned;
}

Tokens load_tokens(Manifest& m, const std::string& path) {
  const std::string data = m.input("tokens", path);
  vqs_tokens* t = nullptr;
  check(vqs_tokens_parse(data.data(), data.size(), &t), path);
  return Tokens(t);
}

// Loads --dict when given, otherwise builds the dictionary at --tau.
Dict resolve_dict(Manifest& m, const vqs_codebook* cb, const std::string& dict_path, double tau, int threads) {
  vqs_dict* d = nullptr;
  if (!dict_path.empty()) {
    const std::string text = m.input("dict", dict_path);
    check(vqs_dict_parse_csv(text.data(), text.size(), cb, &d), dict_path);
    m.param("tau", std::string("from-dict"));
  } else {
    check(vqs_dict_build(cb, tau, threads, &d), "synonyms");
    m.param("tau", tau);
  }
  return Dict(d);
}

std::string na_or(double v) { return std::isnan(v) ? std::string("undefined") : fmt::format("{}", v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-token synonym swaps for conformational ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vqs_version()));

  Globals g;
  const auto add_globals = [&](CLI::App* cmd) {
    cmd->add_option("--seed", g.seed, "Master random seed")->capture_default_str();
    cmd->add_option("--threads", g.threads, "Worker threads, 0 for all cores")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", g.out, "Output path (default: stdout)");
  };

  // train-codebook
  std::vector<std::string> train_inputs;
  std::size_t train_codes = 16;
  int train_window = 5;
  int train_iters = 100;
  StructureOptions train_struct;
  auto* train = app.add_subcommand("train-codebook", "Train a k-means codebook over local window descriptors");
  train->add_option("--input", train_inputs, "Structure files")->required();
  train->add_option("--codes", train_codes, "Codebook size m")->capture_default_str();
  train->add_option("--window", train_window, "Odd window width")->capture_default_str();
  train->add_option("--iters", train_iters, "Maximum Lloyd iterations")->capture_default_str();
  add_structure_options(train, train_struct);
  add_globals(train);

  // synonyms / stats
  std::string cb_path;
  double tau = vqs_default_tau();
  auto* synonyms = app.add_subcommand("synonyms", "Write the synonym dictionary as CSV");
  synonyms->add_option("--codebook", cb_path, "Codebook file")->required();
  synonyms->add_option("--tau", tau, "Distance threshold")->capture_default_str();
  add_globals(synonyms);

  std::string pca_out, distances_out;
  auto* stats = app.add_subcommand("stats", "Redundancy statistics, 2-D projection and distance matrix");
  stats->add_option("--codebook", cb_path, "Codebook file")->required();
  stats->add_option("--tau", tau, "Distance threshold")->capture_default_str();
  stats->add_option("--pca-out", pca_out, "CSV path for the m x 2 projection");
  stats->add_option("--distances-out", distances_out, "CSV path for the m x m distance matrix");
  add_globals(stats);

  // encode / decode / perturb / ensemble
  std::vector<std::string> inputs;
  std::string input;
  int window = 0;
  StructureOptions struct_opts;
  auto* encode = app.add_subcommand("encode", "Encode structures into a token file");
  encode->add_option("--input", inputs, "Structure files")->required();
  encode->add_option("--codebook", cb_path, "Codebook file")->required();
  encode->add_option("--window", window, "Window width, 0 to infer from the codebook")->capture_default_str();
  add_structure_options(encode, struct_opts);
  add_globals(encode);

  std::string tokens_path;
  auto* decode = app.add_subcommand("decode", "Decode a token file into a multi-model PDB");
  decode->add_option("--tokens", tokens_path, "Token file")->required();
  decode->add_option("--codebook", cb_path, "Codebook file")->required();
  add_globals(decode);

  std::string dict_path;
  double swap_prob = 1.0;
  std::size_t num_samples = 1;
  auto* perturb = app.add_subcommand("perturb", "Swap tokens for random synonyms");
  perturb->add_option("--tokens", tokens_path, "Token file")->required();
  perturb->add_option("--codebook", cb_path, "Codebook file")->required();
  auto* perturb_dict = perturb->add_option("--dict", dict_path, "Synonym dictionary CSV");
  perturb->add_option("--tau", tau, "Distance threshold when no dictionary is given")
      ->capture_default_str()->excludes(perturb_dict);
  perturb->add_option("--swap-prob", swap_prob, "Per-position swap probability")->capture_default_str();
  perturb->add_option("--num-samples", num_samples, "Perturbed copies per sequence")->capture_default_str();
  add_globals(perturb);

  const vqs_swap_config defaults = vqs_swap_config_default();
  std::size_t ensemble_samples = defaults.num_samples;
  std::size_t member = 1;
  auto* ensemble = app.add_subcommand("ensemble", "Encode, swap synonyms and decode in one step");
  ensemble->add_option("--input", input, "Structure file")->required();
  ensemble->add_option("--codebook", cb_path, "Codebook file")->required();
  auto* ensemble_dict = ensemble->add_option("--dict", dict_path, "Synonym dictionary CSV");
  ensemble->add_option("--tau", tau, "Distance threshold when no dictionary is given")
      ->capture_default_str()->excludes(ensemble_dict);
  ensemble->add_option("--num-samples", ensemble_samples, "Ensemble size")->capture_default_str();
  ensemble->add_option("--swap-prob", swap_prob, "Per-position swap probability")->capture_default_str();
  ensemble->add_option("--window", window, "Window width, 0 to infer from the codebook")->capture_default_str();
  ensemble->add_option("--member", member, "1-based model of the input to perturb")->capture_default_str();
  add_structure_options(ensemble, struct_opts);
  add_globals(ensemble);

  // evaluate / report
  std::string generated_path, reference_path, jsonl_path, label;
  auto* evaluate = app.add_subcommand("evaluate", "Compare a generated ensemble with a reference ensemble");
  evaluate->add_option("--generated", generated_path, "Generated ensemble PDB")->required();
  evaluate->add_option("--reference", reference_path, "Reference ensemble PDB")->required();
  evaluate->add_option("--label", label, "Target label (default: reference file stem)");
  evaluate->add_option("--jsonl", jsonl_path, "Also write the report as JSON lines");
  add_structure_options(evaluate, struct_opts);
  add_globals(evaluate);

  std::vector<std::string> report_inputs;
  std::string rmsf_out;
  auto* report = app.add_subcommand("report", "Aggregate per-target reports");
  report->add_option("--inputs", report_inputs, "Report CSV files")->required();
  report->add_option("--rmsf-out", rmsf_out, "CSV path for per-residue RMSF");
  add_globals(report);

  // validate / roundtrip
  std::size_t repeats = 25;
  auto* validate = app.add_subcommand("validate", "Single-swap perturbation validation table");
  validate->add_option("--input", inputs, "Structure files")->required();
  validate->add_option("--codebook", cb_path, "Codebook file")->required();
  auto* validate_dict = validate->add_option("--dict", dict_path, "Synonym dictionary CSV");
  validate->add_option("--tau", tau, "Distance threshold when no dictionary is given")
      ->capture_default_str()->excludes(validate_dict);
  validate->add_option("--repeats", repeats, "Swaps averaged per chain")->capture_default_str();
  validate->add_option("--window", window, "Window width, 0 to infer from the codebook")->capture_default_str();
  add_structure_options(validate, struct_opts);
  add_globals(validate);

  auto* roundtrip = app.add_subcommand("roundtrip", "Encode and decode each chain and report the error");
  roundtrip->add_option("--input", inputs, "Structure files")->required();
  roundtrip->add_option("--codebook", cb_path, "Codebook file")->required();
  roundtrip->add_option("--window", window, "Window width, 0 to infer from the codebook")->capture_default_str();
  add_structure_options(roundtrip, struct_opts);
  add_globals(roundtrip);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    Manifest m(cmd->get_name());
    m.param("seed", g.seed);

    if (cmd == train) {
      m.param("codes", train_codes);
      m.param("window", train_window);
      m.param("iters", train_iters);
      record(m, train_struct);
      std::vector<Ensemble> owned;
      std::vector<const vqs_ensemble*> raw;
      for (const auto& path : train_inputs) {
        owned.push_back(load_structure(m, "structure", path, train_struct));
        raw.push_back(owned.back().get());
      }
      const vqs_train_params params{train_codes, train_window, train_iters, g.seed, g.threads};
      vqs_codebook* cb = nullptr;
      Buffer summary, bytes;
      check(vqs_codebook_train(raw.data(), raw.size(), &params, &cb, summary.get()), "train-codebook");
      Codebook owned_cb(cb);
      check(vqs_codebook_save(cb, bytes.get()), "train-codebook");
      emit(g, m, bytes.view());
      if (g.out.empty())
        std::cerr << summary.view();
      else
        write_file(g.out + ".summary", summary.view());
    } else if (cmd == synonyms) {
      Codebook cb = load_codebook(m, cb_path);
      m.param("tau", tau);
      vqs_dict* d = nullptr;
      check(vqs_dict_build(cb.get(), tau, g.threads, &d), "synonyms");
      Dict owned(d);
      Buffer csv;
      check(vqs_dict_write_csv(d, csv.get()), "synonyms");
      emit(g, m, csv.view());
    } else if (cmd == stats) {
      Codebook cb = load_codebook(m, cb_path);
      m.param("tau", tau);
      Buffer text;
      check(vqs_redundancy_stats(cb.get(), tau, g.threads, nullptr, text.get()), "stats");
      if (!pca_out.empty()) {
        Buffer csv;
        check(vqs_codebook_projection_csv(cb.get(), csv.get(), nullptr), "stats");
        write_file(pca_out, csv.view());
      }
      if (!distances_out.empty()) {
        Buffer csv;
        check(vqs_codebook_distances_csv(cb.get(), g.threads, csv.get()), "stats");
        write_file(distances_out, csv.view());
      }
      emit(g, m, text.view());
    } else if (cmd == encode) {
      Codebook cb = load_codebook(m, cb_path);
      record(m, struct_opts);
      m.param("window", window > 0 ? window : vqs_codebook_window(cb.get()));
      vqs_tokens* all = nullptr;
      for (const auto& path : inputs) {
        Ensemble e = load_structure(m, "structure", path, struct_opts);
        vqs_tokens* t = nullptr;
        check(vqs_tokens_encode(e.get(), cb.get(), window, g.threads, &t), path);
        Tokens part(t);
        if (all == nullptr) {
          all = part.release();
          continue;
        }
        for (std::size_t i = 0; i < vqs_tokens_count(t); ++i) {
          const int32_t* values = nullptr;
          std::size_t n = 0;
          check(vqs_tokens_get(t, i, &values, &n), path);
          check(vqs_tokens_append(all, values, n), path);
        }
      }
      Tokens owned(all);
      Buffer text;
      check(vqs_tokens_write(all, text.get()), "encode");
      emit(g, m, text.view());
    } else if (cmd == decode) {
      Codebook cb = load_codebook(m, cb_path);
      Tokens t = load_tokens(m, tokens_path);
      vqs_ensemble* e = nullptr;
      check(vqs_tokens_decode(t.get(), cb.get(), g.threads, &e), tokens_path);
      Ensemble owned(e);
      Buffer pdb;
      check(vqs_ensemble_write_pdb(e, pdb.get()), "decode");
      emit(g, m, pdb.view());
    } else if (cmd == perturb) {
      Codebook cb = load_codebook(m, cb_path);
      Tokens t = load_tokens(m, tokens_path);
      Dict d = resolve_dict(m, cb.get(), dict_path, tau, g.threads);
      m.param("swap_prob", swap_prob);
      m.param("num_samples", num_samples);
      vqs_tokens* out = nullptr;
      check(vqs_tokens_perturb(t.get(), d.get(), g.seed, swap_prob, num_samples, &out), "perturb");
      Tokens owned(out);
      Buffer text;
      check(vqs_tokens_write(out, text.get()), "perturb");
      emit(g, m, text.view());
    } else if (cmd == ensemble) {
      Codebook cb = load_codebook(m, cb_path);
      Ensemble e = load_structure(m, "structure", input, struct_opts);
      record(m, struct_opts);
      Dict d = resolve_dict(m, cb.get(), dict_path, tau, g.threads);
      if (member < 1 || member > vqs_ensemble_size(e.get()))
        usage_error(fmt::format("InvalidArgument: member {} outside 1..{}", member, vqs_ensemble_size(e.get())));
      m.param("member", member);
      m.param("num_samples", ensemble_samples);
      m.param("swap_prob", swap_prob);
      m.param("window", window > 0 ? window : vqs_codebook_window(cb.get()));
      const vqs_swap_config cfg{g.seed, swap_prob, ensemble_samples};
      vqs_ensemble* out = nullptr;
      check(vqs_generate_ensemble(e.get(), member - 1, cb.get(), d.get(), &cfg, window, g.threads, &out), input);
      Ensemble owned(out);
      Buffer pdb;
      check(vqs_ensemble_write_pdb(out, pdb.get()), "ensemble");
      emit(g, m, pdb.view());
    } else if (cmd == evaluate) {
      record(m, struct_opts);
      Ensemble gen = load_structure(m, "generated", generated_path, struct_opts);
      Ensemble ref = load_structure(m, "reference", reference_path, struct_opts);
      if (label.empty()) label = stem(reference_path);
      m.param("label", label);
      vqs_reports* r = nullptr;
      check(vqs_reports_create(&r), "evaluate");
      Reports owned(r);
      check(vqs_reports_evaluate(r, gen.get(), ref.get(), label.c_str(), g.threads), "evaluate");
      Buffer csv;
      check(vqs_reports_write_csv(r, csv.get()), "evaluate");
      if (!jsonl_path.empty()) {
        Buffer jsonl;
        check(vqs_reports_write_jsonl(r, jsonl.get()), "evaluate");
        write_file(jsonl_path, jsonl.view());
      }
      emit(g, m, csv.view());
    } else if (cmd == report) {
      vqs_reports* r = nullptr;
      check(vqs_reports_create(&r), "report");
      Reports owned(r);
      for (const auto& path : report_inputs) {
        const std::string text = m.input("report", path);
        check(vqs_reports_parse_csv(r, text.data(), text.size()), path);
      }
      vqs_corpus corpus{};
      Buffer csv;
      check(vqs_corpus_report(r, &corpus, csv.get()), "report");
      if (!rmsf_out.empty()) {
        Buffer rmsf;
        check(vqs_reports_write_rmsf_csv(r, rmsf.get()), "report");
        write_file(rmsf_out, rmsf.view());
      }
      emit(g, m, csv.view());
    } else if (cmd == validate) {
      Codebook cb = load_codebook(m, cb_path);
      record(m, struct_opts);
      Dict d = resolve_dict(m, cb.get(), dict_path, tau, g.threads);
      m.param("repeats", repeats);
      m.param("window", window > 0 ? window : vqs_codebook_window(cb.get()));
      std::vector<Ensemble> owned;
      std::vector<const vqs_ensemble*> raw;
      for (const auto& path : inputs) {
        owned.push_back(load_structure(m, "structure", path, struct_opts));
        raw.push_back(owned.back().get());
      }
      Buffer csv;
      check(vqs_perturbation_validation(raw.data(), raw.size(), cb.get(), d.get(), window, g.seed, repeats, g.threads,
                                        csv.get()),
            "validate");
      emit(g, m, csv.view());
    } else if (cmd == roundtrip) {
      Codebook cb = load_codebook(m, cb_path);
      record(m, struct_opts);
      m.param("window", window > 0 ? window : vqs_codebook_window(cb.get()));
      std::string csv = "label,member,rmsd,tm_score\n";
      for (const auto& path : inputs) {
        Ensemble e = load_structure(m, "structure", path, struct_opts);
        for (std::size_t i = 0; i < vqs_ensemble_size(e.get()); ++i) {
          double rmsd = 0, tm = 0;
          check(vqs_roundtrip(e.get(), i, cb.get(), window, &rmsd, &tm), path);
          csv += fmt::format("{},{},{},{}\n", stem(path), i + 1, rmsd, na_or(tm));
        }
      }
      emit(g, m, csv);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
