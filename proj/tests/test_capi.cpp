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
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "vqsyn/vqsyn.h"

namespace {

// Noisy helix traces, member-major xyz.
std::vector<double> helices(std::size_t members, std::size_t residues, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<double> xyz;
  for (std::size_t m = 0; m < members; ++m)
    for (std::size_t i = 0; i < residues; ++i) {
      const double t = static_cast<double>(i) * 100.0 * M_PI / 180.0;
      xyz.push_back(2.3 * std::cos(t) + g(rng));
      xyz.push_back(2.3 * std::sin(t) + g(rng));
      xyz.push_back(1.5 * static_cast<double>(i) + 0.02 * static_cast<double>(i * i) + g(rng));
    }
  return xyz;
}

struct Buf {
  vqs_buffer b{nullptr, 0};
  ~Buf() { vqs_buffer_free(&b); }
  std::string str() const { return std::string(b.data, b.size); }
};

std::vector<double> coords(const vqs_ensemble* e, std::size_t member) {
  std::vector<double> out(vqs_ensemble_residue_count(e) * 3);
  REQUIRE(vqs_ensemble_coords(e, member, out.data()) == VQS_OK);
  return out;
}

vqs_ensemble* make(const std::vector<double>& xyz, std::size_t members, std::size_t residues, const char* label) {
  vqs_ensemble* e = nullptr;
  REQUIRE(vqs_ensemble_from_coords(xyz.data(), members, residues, label, &e) == VQS_OK);
  return e;
}

}  // namespace

TEST_CASE("status names and classification") {
  CHECK(std::string(vqs_version()) == "1.0.0");
  CHECK(std::string(vqs_status_name(VQS_OK)) == "OK");
  CHECK(std::string(vqs_status_name(VQS_ERR_TOO_FEW_SAMPLES)) == "TooFewSamples");
  CHECK(vqs_status_is_numeric(VQS_ERR_DEGENERATE_GEOMETRY));
  CHECK(vqs_status_is_numeric(VQS_ERR_NON_SPD_COVARIANCE));
  CHECK_FALSE(vqs_status_is_numeric(VQS_ERR_MALFORMED_RECORD));
  CHECK_FALSE(vqs_status_is_numeric(VQS_ERR_INVALID_ARGUMENT));
  CHECK(vqs_default_tau() == 10.0);
  const auto cfg = vqs_swap_config_default();
  CHECK(cfg.num_samples == 250);
  CHECK(cfg.swap_prob == 1.0);
}

TEST_CASE("sha256 of a known message") {
  char hex[65];
  REQUIRE(vqs_sha256_hex("abc", 3, hex) == VQS_OK);
  CHECK(std::string(hex) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("null arguments are rejected with a message") {
  CHECK(vqs_ensemble_from_coords(nullptr, 1, 5, "x", nullptr) == VQS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vqs_last_error()) > 0);
  CHECK(vqs_codebook_save(nullptr, nullptr) == VQS_ERR_INVALID_ARGUMENT);
  double v = 0;
  CHECK(vqs_pearson(nullptr, nullptr, 3, &v) == VQS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("last error is per thread") {
  double out = 0;
  const double a[] = {1, 1, 1};
  const double b[] = {1, 2, 3};
  CHECK(vqs_pearson(a, b, 3, &out) == VQS_ERR_CONSTANT_INPUT);
  const std::string mine = vqs_last_error();
  std::thread([] {
    vqs_codebook* cb = nullptr;
    CHECK(vqs_codebook_load("XXXX", 4, VQS_CODEBOOK_BINARY, &cb) != VQS_OK);
  }).join();
  CHECK(std::string(vqs_last_error()) == mine);
}

TEST_CASE("structure text round trip") {
  const auto xyz = helices(3, 20, 0.2, 1);
  vqs_ensemble* e = make(xyz, 3, 20, "h");
  CHECK(vqs_ensemble_validate_chains(e) == VQS_OK);
  Buf pdb;
  REQUIRE(vqs_ensemble_write_pdb(e, &pdb.b) == VQS_OK);
  vqs_ensemble* back = nullptr;
  REQUIRE(vqs_ensemble_parse_pdb(pdb.b.data, pdb.b.size, 0, 0, 0, "h", &back) == VQS_OK);
  REQUIRE(vqs_ensemble_size(back) == 3);
  for (std::size_t m = 0; m < 3; ++m) {
    const auto c = coords(back, m);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - xyz[m * 60 + i]) <= 0.0005 + 1e-12);
  }
  vqs_ensemble* first = nullptr;
  REQUIRE(vqs_ensemble_parse_pdb(pdb.b.data, pdb.b.size, 0, 2, 2, "h", &first) == VQS_OK);
  CHECK(vqs_ensemble_size(first) == 1);
  CHECK(vqs_ensemble_parse_pdb("END\n", 4, 0, 0, 0, "h", &first) == VQS_ERR_NO_CALPHA);
  double r = -1;
  CHECK(vqs_rmsd(e, 0, e, 0, &r) == VQS_OK);
  CHECK(r == 0.0);
  CHECK(vqs_tm_score(e, 0, e, 0, &r) == VQS_OK);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vqs_rmsd(e, 0, e, 7, &r) == VQS_ERR_INVALID_ARGUMENT);
  vqs_ensemble_free(first);
  vqs_ensemble_free(back);
  vqs_ensemble_free(e);
}

TEST_CASE("codebook handles") {
  const double rows[] = {0, 0, 3, 0, 0, 4, 10, 10};
  vqs_codebook* cb = nullptr;
  REQUIRE(vqs_codebook_from_rows(rows, 4, 2, &cb) == VQS_OK);
  CHECK(vqs_codebook_size(cb) == 4);
  CHECK(vqs_codebook_dim(cb) == 2);
  CHECK(vqs_codebook_window(cb) == 0);
  CHECK(std::string(vqs_codebook_id(cb)).rfind("cb-", 0) == 0);
  int32_t tok = -1;
  const double q[] = {2.9, 0.2};
  REQUIRE(vqs_codebook_quantize(cb, q, 2, &tok) == VQS_OK);
  CHECK(tok == 1);
  CHECK(vqs_codebook_quantize(cb, q, 3, &tok) == VQS_ERR_DIMENSION_MISMATCH);

  Buf bin;
  REQUIRE(vqs_codebook_save(cb, &bin.b) == VQS_OK);
  vqs_codebook* back = nullptr;
  REQUIRE(vqs_codebook_load(bin.b.data, bin.b.size, VQS_CODEBOOK_AUTO, &back) == VQS_OK);
  CHECK(std::string(vqs_codebook_id(back)) == vqs_codebook_id(cb));

  std::vector<double> d(16);
  REQUIRE(vqs_codebook_distances(cb, 1, d.data()) == VQS_OK);
  CHECK(d[1] == 3.0);
  CHECK(d[2] == 4.0);
  CHECK(d[1 * 4 + 2] == 5.0);

  vqs_dict* dict = nullptr;
  REQUIRE(vqs_dict_build(cb, 5.0, 1, &dict) == VQS_OK);
  const int32_t* members = nullptr;
  std::size_t count = 0;
  REQUIRE(vqs_dict_entry(dict, 1, &members, &count) == VQS_OK);
  CHECK(std::vector<int32_t>(members, members + count) == std::vector<int32_t>{0, 1});
  REQUIRE(vqs_dict_entry(dict, 0, &members, &count) == VQS_OK);
  CHECK(std::vector<int32_t>(members, members + count) == std::vector<int32_t>{0, 1, 2});
  Buf csv;
  REQUIRE(vqs_dict_write_csv(dict, &csv.b) == VQS_OK);
  vqs_dict* parsed = nullptr;
  REQUIRE(vqs_dict_parse_csv(csv.b.data, csv.b.size, cb, &parsed) == VQS_OK);
  CHECK(vqs_dict_size(parsed) == 4);
  vqs_dict* neg = nullptr;
  CHECK(vqs_dict_build(cb, -1.0, 1, &neg) == VQS_ERR_NEGATIVE_TAU);

  vqs_redundancy red{};
  REQUIRE(vqs_redundancy_stats(cb, 5.0, 1, &red, nullptr) == VQS_OK);
  CHECK(red.synonym_fraction == 0.75);
  CHECK(red.component_count == 2);

  vqs_dict_free(parsed);
  vqs_dict_free(dict);
  vqs_codebook_free(back);
  vqs_codebook_free(cb);
}

TEST_CASE("training reports the sample shortfall") {
  const auto xyz = helices(1, 20, 0.2, 2);
  vqs_ensemble* e = make(xyz, 1, 20, "h");
  const vqs_ensemble* inputs[] = {e};
  vqs_train_params p{64, 5, 50, 0, 1};
  vqs_codebook* cb = nullptr;
  CHECK(vqs_codebook_train(inputs, 1, &p, &cb, nullptr) == VQS_ERR_TOO_FEW_SAMPLES);
  const std::string msg = vqs_last_error();
  CHECK(msg.find("64") != std::string::npos);
  CHECK(msg.find("20") != std::string::npos);
  p.window = 6;
  CHECK(vqs_codebook_train(inputs, 1, &p, &cb, nullptr) == VQS_ERR_EVEN_WINDOW);
  vqs_ensemble_free(e);
}

TEST_CASE("pipeline through the C interface") {
  const std::size_t n = 40;
  const auto corpus = helices(20, n, 0.4, 3);
  vqs_ensemble* train = make(corpus, 20, n, "train");
  const vqs_ensemble* inputs[] = {train};
  vqs_train_params p{32, 5, 100, 7, 0};
  vqs_codebook* cb = nullptr;
  Buf summary;
  REQUIRE(vqs_codebook_train(inputs, 1, &p, &cb, &summary.b) == VQS_OK);
  CHECK(summary.str().find("inertia") != std::string::npos);
  CHECK(vqs_codebook_window(cb) == 5);

  vqs_dict* dict = nullptr;
  REQUIRE(vqs_dict_build(cb, vqs_default_tau(), 0, &dict) == VQS_OK);

  const auto target_xyz = helices(1, n, 0.4, 99);
  vqs_ensemble* target = make(target_xyz, 1, n, "target");
  vqs_swap_config cfg = vqs_swap_config_default();
  cfg.seed = 11;
  cfg.num_samples = 30;
  vqs_ensemble* g1 = nullptr;
  vqs_ensemble* g8 = nullptr;
  REQUIRE(vqs_generate_ensemble(target, 0, cb, dict, &cfg, 0, 1, &g1) == VQS_OK);
  REQUIRE(vqs_generate_ensemble(target, 0, cb, dict, &cfg, 0, 8, &g8) == VQS_OK);
  REQUIRE(vqs_ensemble_size(g1) == 30);
  for (std::size_t m = 0; m < 30; ++m) CHECK(coords(g1, m) == coords(g8, m));

  vqs_tokens* toks = nullptr;
  REQUIRE(vqs_tokens_encode(target, cb, 0, 1, &toks) == VQS_OK);
  CHECK(std::string(vqs_tokens_codebook_id(toks)) == vqs_codebook_id(cb));
  vqs_tokens* swapped = nullptr;
  REQUIRE(vqs_tokens_perturb(toks, dict, cfg.seed, cfg.swap_prob, cfg.num_samples, &swapped) == VQS_OK);
  vqs_ensemble* decoded = nullptr;
  REQUIRE(vqs_tokens_decode(swapped, cb, 1, &decoded) == VQS_OK);
  for (std::size_t m = 0; m < 30; ++m) CHECK(coords(decoded, m) == coords(g1, m));

  Buf text;
  REQUIRE(vqs_tokens_write(swapped, &text.b) == VQS_OK);
  vqs_tokens* reread = nullptr;
  REQUIRE(vqs_tokens_parse(text.b.data, text.b.size, &reread) == VQS_OK);
  CHECK(vqs_tokens_count(reread) == 30);
  CHECK(vqs_tokens_window(reread) == 5);

  double rmsd = 0, tm = 0;
  REQUIRE(vqs_roundtrip(target, 0, cb, 0, &rmsd, &tm) == VQS_OK);
  CHECK(rmsd > 0.0);
  CHECK(tm > 0.0);
  CHECK(tm <= 1.0);

  vqs_ensemble* ref = make(helices(30, n, 0.6, 5), 30, n, "ref");
  vqs_reports* reports = nullptr;
  REQUIRE(vqs_reports_create(&reports) == VQS_OK);
  REQUIRE(vqs_reports_evaluate(reports, g1, ref, "t", 1) == VQS_OK);
  REQUIRE(vqs_reports_evaluate(reports, ref, ref, "self", 1) == VQS_OK);
  vqs_report_summary s{};
  REQUIRE(vqs_reports_get(reports, 1, &s) == VQS_OK);
  CHECK(std::string(s.label) == "self");
  CHECK(s.per_target_rmsf_r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.md_pca_w2 == 0.0);
  CHECK(s.joint_pca_w2 == 0.0);
  CHECK(s.residue_count == n);
  vqs_corpus corpus_out{};
  Buf corpus_csv;
  REQUIRE(vqs_corpus_report(reports, &corpus_out, &corpus_csv.b) == VQS_OK);
  CHECK(corpus_out.targets == 2);
  Buf reports_csv;
  REQUIRE(vqs_reports_write_csv(reports, &reports_csv.b) == VQS_OK);
  vqs_reports* parsed = nullptr;
  REQUIRE(vqs_reports_create(&parsed) == VQS_OK);
  REQUIRE(vqs_reports_parse_csv(parsed, reports_csv.b.data, reports_csv.b.size) == VQS_OK);
  CHECK(vqs_reports_count(parsed) == 2);

  Buf val;
  const vqs_ensemble* chains[] = {target};
  REQUIRE(vqs_perturbation_validation(chains, 1, cb, dict, 0, 1, 5, 1, &val.b) == VQS_OK);
  CHECK(val.str().find("\nmean,") != std::string::npos);

  vqs_reports_free(parsed);
  vqs_reports_free(reports);
  vqs_ensemble_free(ref);
  vqs_tokens_free(reread);
  vqs_ensemble_free(decoded);
  vqs_tokens_free(swapped);
  vqs_tokens_free(toks);
  vqs_ensemble_free(g8);
  vqs_ensemble_free(g1);
  vqs_ensemble_free(target);
  vqs_dict_free(dict);
  vqs_codebook_free(cb);
  vqs_ensemble_free(train);
}

TEST_CASE("metric entry points") {
  const double m1[] = {0, 0};
  const double m2[] = {3, 1};
  const double id[] = {1, 0, 0, 1};
  double w = 0;
  REQUIRE(vqs_w2_gaussian(m1, id, m2, id, 2, &w) == VQS_OK);
  CHECK(w == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  const double bad[] = {1, 2, 2, 1};
  CHECK(vqs_w2_gaussian(m1, bad, m2, id, 2, &w) == VQS_ERR_NON_SPD_COVARIANCE);

  vqs_ensemble* one = make(helices(1, 10, 0.2, 1), 1, 10, "one");
  std::vector<double> rmsf(10);
  CHECK(vqs_rmsf(one, 0, rmsf.data()) == VQS_ERR_SINGLE_CONFORMATION);
  double mp = 0;
  CHECK(vqs_mean_pairwise_rmsd(one, 1, &mp) == VQS_ERR_SINGLE_CONFORMATION);
  vqs_ensemble_free(one);
}
