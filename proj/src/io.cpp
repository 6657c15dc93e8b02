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

#include "vqsyn/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>

#include <fmt/format.h>
#include "json.hpp"

#include "vqsyn/error.hpp"

namespace vqsyn {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    out.push_back(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    std::size_t end = s.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view column(std::string_view line, std::size_t first, std::size_t last) {
  // 1-based inclusive PDB column range.
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  fail(ErrorCode::MalformedRecord, fmt::format("line {}: {}", line, what));
}

struct ResidueKey {
  int seq = 0;
  char icode = ' ';

  auto order() const { return std::make_pair(seq, icode == ' ' ? '\0' : icode); }
  friend bool operator<(const ResidueKey& a, const ResidueKey& b) { return a.order() < b.order(); }
  friend bool operator==(const ResidueKey& a, const ResidueKey& b) { return a.order() == b.order(); }
};

struct CaAtom {
  char altloc = ' ';
  std::string name;
  Vec3 xyz;
};

int altloc_rank(char altloc) { return altloc == ' ' ? 0 : (altloc == 'A' ? 1 : 2); }

struct PdbModel {
  int ordinal = 0;
  std::map<ResidueKey, CaAtom> atoms;
};

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

Codebook load_codebook_binary(std::span<const unsigned char> bytes) {
  constexpr std::size_t kHeader = 4 + 2 + 4 + 4;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCodebookMagic.data(), 4) != 0)
    fail(ErrorCode::BadMagic, "codebook does not start with \"TKCB\"");
  if (bytes.size() < kHeader) fail(ErrorCode::TruncatedFile, fmt::format("{} bytes, header needs {}", bytes.size(), kHeader));
  const auto version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kCodebookVersion) fail(ErrorCode::UnsupportedVersion, fmt::format("codebook version {}", version));
  const std::uint32_t m = get_u32(bytes.data() + 6);
  const std::uint32_t d = get_u32(bytes.data() + 10);
  const std::uint64_t expected = kHeader + 4ULL * m * d;
  if (bytes.size() < expected)
    fail(ErrorCode::TruncatedFile, fmt::format("{} bytes, {}x{} codebook needs {}", bytes.size(), m, d, expected));
  if (bytes.size() > expected)
    fail(ErrorCode::MalformedRecord, fmt::format("{} trailing bytes after {}x{} codebook", bytes.size() - expected, m, d));
  RowMatrix vectors(m, d);
  const unsigned char* p = bytes.data() + kHeader;
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < d; ++j, p += 4) vectors(i, j) = static_cast<double>(std::bit_cast<float>(get_u32(p)));
  return make_codebook(std::move(vectors));
}

Codebook load_codebook_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool first_row = true;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const auto fields = split(lines[ln], ',');
    std::vector<double> row;
    row.reserve(fields.size());
    std::optional<std::size_t> bad;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = to_double(fields[c]);
      if (!v) {
        bad = c;
        break;
      }
      row.push_back(*v);
    }
    if (bad) {
      if (first_row) {
        first_row = false;
        continue;  // header
      }
      malformed(ln + 1, fmt::format("field {} is not a number", *bad + 1));
    }
    first_row = false;
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      fail(ErrorCode::RaggedRows, fmt::format("line {}: {} columns, expected {}", ln + 1, row.size(), width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "codebook CSV has no data rows");
  RowMatrix vectors(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return make_codebook(std::move(vectors));
}

std::string join_values(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(values[i]);
  }
  return out;
}

std::optional<double> parse_optional(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field == kUndefined) return std::nullopt;
  const auto v = to_double(field);
  if (!v) malformed(line, fmt::format("'{}' is neither a number nor '{}'", field, kUndefined));
  return v;
}

std::vector<double> parse_vector(std::string_view field, std::size_t line) {
  std::vector<double> out;
  field = trim(field);
  if (field.empty()) return out;
  for (auto part : split(field, ';')) {
    const auto v = to_double(part);
    if (!v) malformed(line, fmt::format("'{}' is not a number", part));
    out.push_back(*v);
  }
  return out;
}

constexpr std::string_view kReportHeader =
    "label,per_target_rmsf_r,mean_pairwise_rmsd_generated,mean_pairwise_rmsd_reference,md_pca_w2,joint_pca_w2,"
    "rmsf_generated,rmsf_reference";

std::string csv_label(const std::string& label) {
  if (label.find_first_of(",\"\n") != std::string::npos)
    fail(ErrorCode::InvalidArgument, fmt::format("label '{}' contains CSV delimiters", label));
  return label;
}

nlohmann::json json_optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(std::string(kUndefined));
}

}  // namespace

Ensemble parse_structure(std::string_view text, const StructureFileOptions& opts, std::string_view label) {
  if (opts.model_range && opts.model_range->first > opts.model_range->second)
    fail(ErrorCode::InvalidArgument, fmt::format("model range {}-{} is reversed", opts.model_range->first,
                                                 opts.model_range->second));
  std::vector<PdbModel> models;
  std::optional<char> chain = opts.chain_id;
  bool explicit_models = false;
  bool in_model = false;
  int ordinal = 0;
  bool skipping = false;

  auto included = [&](int k) {
    return !opts.model_range || (k >= opts.model_range->first && k <= opts.model_range->second);
  };

  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t ln = idx + 1;
    const std::string_view line = lines[idx];
    const std::string_view rec = line.substr(0, std::min<std::size_t>(6, line.size()));
    if (rec.starts_with("MODEL")) {
      if (in_model) malformed(ln, "MODEL before ENDMDL");
      if (!explicit_models && !models.empty()) malformed(ln, "MODEL after atoms outside any model");
      explicit_models = true;
      in_model = true;
      ++ordinal;
      skipping = !included(ordinal);
      if (!skipping) models.push_back({ordinal, {}});
      continue;
    }
    if (rec.starts_with("ENDMDL")) {
      if (!in_model) malformed(ln, "ENDMDL without MODEL");
      in_model = false;
      continue;
    }
    if (rec != "ATOM  " && rec != "ATOM") continue;
    if (trim(column(line, 13, 16)) != "CA") continue;
    if (explicit_models && !in_model) malformed(ln, "ATOM outside MODEL/ENDMDL");
    if (!explicit_models && models.empty()) {
      ordinal = 1;
      skipping = !included(1);
      if (!skipping) models.push_back({1, {}});
      else models.push_back({-1, {}});
    }
    if (skipping) continue;
    if (line.size() < 54) malformed(ln, fmt::format("CA record has {} columns, need 54", line.size()));

    const char chain_id = line[21];
    if (!chain) chain = chain_id;
    if (chain_id != *chain) continue;

    const auto seq = to_int<int>(column(line, 23, 26));
    if (!seq) malformed(ln, fmt::format("residue number '{}' in columns 23-26", column(line, 23, 26)));
    const auto x = to_double(column(line, 31, 38));
    const auto y = to_double(column(line, 39, 46));
    const auto z = to_double(column(line, 47, 54));
    if (!x || !y || !z) malformed(ln, "coordinates in columns 31-54 are not three numbers");

    CaAtom atom{line[16], std::string(trim(column(line, 18, 20))), Vec3(*x, *y, *z)};
    const ResidueKey key{*seq, line[26]};
    auto& atoms = models.back().atoms;
    auto it = atoms.find(key);
    if (it == atoms.end()) {
      atoms.emplace(key, std::move(atom));
    } else if (it->second.altloc == atom.altloc) {
      malformed(ln, fmt::format("duplicate CA for residue {}{}", key.seq, key.icode == ' ' ? "" : std::string(1, key.icode)));
    } else if (altloc_rank(atom.altloc) < altloc_rank(it->second.altloc)) {
      it->second = std::move(atom);
    }
  }
  if (in_model) fail(ErrorCode::MalformedRecord, "file ends inside a MODEL block");
  std::erase_if(models, [](const PdbModel& m) { return m.ordinal < 0; });

  const bool any = std::any_of(models.begin(), models.end(), [](const PdbModel& m) { return !m.atoms.empty(); });
  if (!any) fail(ErrorCode::NoCalpha, chain ? fmt::format("no CA atoms for chain '{}'", *chain) : "no CA atoms");

  const auto& first = models.front();
  for (const auto& model : models) {
    bool same = model.atoms.size() == first.atoms.size();
    for (auto a = model.atoms.begin(), b = first.atoms.begin(); same && a != model.atoms.end(); ++a, ++b)
      same = a->first == b->first;
    if (!same)
      fail(ErrorCode::InconsistentModels, fmt::format("model {} has {} CA residues, model {} has {} or a different numbering",
                                                      model.ordinal, model.atoms.size(), first.ordinal, first.atoms.size()));
  }

  Ensemble e;
  e.source = EnsembleSource::Reference;
  e.chain_id = *chain;
  for (const auto& [key, atom] : first.atoms) e.residues.push_back({key.seq, key.icode, atom.name});
  const std::string base(label.empty() ? std::string_view("structure") : label);
  for (const auto& model : models) {
    Chain c;
    c.label = models.size() > 1 ? fmt::format("{}_m{}", base, model.ordinal) : base;
    c.coords.reserve(model.atoms.size());
    for (const auto& [key, atom] : model.atoms) c.coords.push_back(atom.xyz);
    e.conformations.push_back(std::move(c));
  }
  return e;
}

std::string write_structure(const Ensemble& e) {
  validate_ensemble(e);
  auto coord = [](double v) {
    std::string s = fmt::format("{:8.3f}", v);
    if (s.size() != 8 || !std::isfinite(v))
      fail(ErrorCode::CoordinateOverflow, fmt::format("coordinate {} does not fit columns of width 8", v));
    return s;
  };
  std::string out;
  const std::size_t n = e.residue_count();
  for (std::size_t k = 0; k < e.size(); ++k) {
    out += fmt::format("MODEL     {:>4}\n", k + 1);
    const Chain& c = e.conformations[k];
    for (std::size_t i = 0; i < n; ++i) {
      const ResidueId res = e.residues.empty() ? ResidueId{static_cast<int>(i + 1), ' ', "GLY"} : e.residues[i];
      if (res.seq < -999 || res.seq > 9999)
        fail(ErrorCode::InvalidArgument, fmt::format("residue number {} does not fit 4 columns", res.seq));
      const std::string name = res.name.substr(0, 3);
      out += fmt::format("ATOM  {:>5}  CA  {:>3} {}{:>4}{}   {}{}{}  1.00  0.00           C  \n", (i + 1) % 100000,
                         name, e.chain_id, res.seq, res.icode, coord(c.coords[i].x()), coord(c.coords[i].y()),
                         coord(c.coords[i].z()));
    }
    out += "ENDMDL\n";
  }
  out += "END\n";
  return out;
}

Codebook load_codebook(std::span<const unsigned char> bytes, CodebookFormat format) {
  if (format == CodebookFormat::Auto)
    format = bytes.size() >= 4 && std::memcmp(bytes.data(), kCodebookMagic.data(), 4) == 0 ? CodebookFormat::Binary
                                                                                          : CodebookFormat::Csv;
  if (format == CodebookFormat::Binary) return load_codebook_binary(bytes);
  return load_codebook_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Codebook load_codebook(std::string_view bytes, CodebookFormat format) {
  return load_codebook(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()), format);
}

std::string save_codebook_binary(const Codebook& cb) {
  std::string out(kCodebookMagic);
  put_u16(out, kCodebookVersion);
  put_u32(out, static_cast<std::uint32_t>(cb.size()));
  put_u32(out, static_cast<std::uint32_t>(cb.dim()));
  out.reserve(out.size() + 4 * cb.size() * cb.dim());
  for (std::size_t i = 0; i < cb.size(); ++i)
    for (double v : cb.row(i)) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

TokenFile load_tokens(std::string_view text) {
  TokenFile file;
  bool have_header = false;
  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t ln = idx + 1;
    const std::string_view line = lines[idx];
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto words = split_ws(body);
      if (!have_header && words.size() == 5 && words[0] == "#" && words[1] == "codebook:" && words[3] == "window:") {
        const auto w = to_int<int>(words[4]);
        if (!w) malformed(ln, fmt::format("window '{}' is not an integer", words[4]));
        file.codebook_id = std::string(words[2]);
        file.window = *w;
        have_header = true;
      }
      continue;
    }
    if (!have_header)
      fail(ErrorCode::MissingHeader, fmt::format("line {}: tokens before the '# codebook: <id> window: <w>' header", ln));
    TokenSeq seq;
    seq.codebook_id = file.codebook_id;
    seq.window = file.window;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const std::size_t start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      std::size_t end = line.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = line.size();
      const std::string_view word = line.substr(start, end - start);
      const bool digits = std::all_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; });
      const auto v = digits ? to_int<Token>(word) : std::nullopt;
      if (!v)
        fail(ErrorCode::NonIntegerToken, fmt::format("line {} column {}: '{}' is not a non-negative integer", ln, start + 1, word));
      seq.tokens.push_back(*v);
      pos = end;
    }
    file.sequences.push_back(std::move(seq));
  }
  if (!have_header) fail(ErrorCode::MissingHeader, "no '# codebook: <id> window: <w>' header line");
  return file;
}

std::string save_tokens(const TokenFile& file) {
  if (file.codebook_id.empty() || file.codebook_id.find_first_of(" \t\n") != std::string::npos)
    fail(ErrorCode::InvalidArgument, fmt::format("codebook id '{}' must be a single non-empty word", file.codebook_id));
  std::string out = fmt::format("# codebook: {} window: {}\n", file.codebook_id, file.window);
  for (const auto& seq : file.sequences) {
    if (seq.codebook_id != file.codebook_id || seq.window != file.window)
      fail(ErrorCode::MismatchedCodebook, fmt::format("sequence bound to '{}' (window {}) in a '{}' (window {}) file",
                                                      seq.codebook_id, seq.window, file.codebook_id, file.window));
    if (seq.tokens.empty()) fail(ErrorCode::InvalidArgument, "empty token sequence");
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
      if (seq.tokens[i] < 0) fail(ErrorCode::TokenOutOfRange, fmt::format("negative token {}", seq.tokens[i]));
      if (i) out.push_back(' ');
      out += std::to_string(seq.tokens[i]);
    }
    out.push_back('\n');
  }
  return out;
}

std::string write_synonym_csv(const SynonymDict& dict) {
  std::string out = fmt::format("# codebook: {} tau: {}\ntoken,synonyms\n", dict.codebook_id, format_double(dict.tau));
  for (std::size_t k = 0; k < dict.entries.size(); ++k) {
    out += fmt::format("{},", k);
    for (std::size_t i = 0; i < dict.entries[k].size(); ++i) {
      if (i) out.push_back(' ');
      out += std::to_string(dict.entries[k][i]);
    }
    out.push_back('\n');
  }
  return out;
}

SynonymDict parse_synonym_csv(std::string_view text, const Codebook& cb) {
  SynonymDict dict;
  dict.codebook_id = cb.id;
  dict.code_count = cb.size();
  dict.tau = std::nan("");
  dict.entries.resize(cb.size());
  std::vector<unsigned char> seen(cb.size(), 0);
  bool header_row = false;
  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t ln = idx + 1;
    const std::string_view line = trim(lines[idx]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto words = split_ws(line);
      if (words.size() == 5 && words[1] == "codebook:" && words[3] == "tau:") {
        if (words[2] != cb.id)
          fail(ErrorCode::MismatchedCodebook, fmt::format("dictionary built over '{}', codebook is '{}'", words[2], cb.id));
        if (const auto t = to_double(words[4])) dict.tau = *t;
      }
      continue;
    }
    if (!header_row) {
      if (line != "token,synonyms") malformed(ln, "expected header 'token,synonyms'");
      header_row = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 2) malformed(ln, "expected 'token,synonyms'");
    const auto k = to_int<Token>(fields[0]);
    if (!k || *k < 0 || static_cast<std::size_t>(*k) >= cb.size())
      fail(ErrorCode::TokenOutOfRange, fmt::format("line {}: token '{}' outside [0, {})", ln, fields[0], cb.size()));
    auto& entry = dict.entries[static_cast<std::size_t>(*k)];
    if (seen[static_cast<std::size_t>(*k)]) malformed(ln, fmt::format("token {} listed twice", *k));
    seen[static_cast<std::size_t>(*k)] = 1;
    for (auto word : split_ws(fields[1])) {
      const auto s = to_int<Token>(word);
      if (!s || *s < 0 || static_cast<std::size_t>(*s) >= cb.size())
        fail(ErrorCode::TokenOutOfRange, fmt::format("line {}: synonym '{}' outside [0, {})", ln, word, cb.size()));
      entry.push_back(*s);
    }
    std::sort(entry.begin(), entry.end());
    entry.erase(std::unique(entry.begin(), entry.end()), entry.end());
    if (!std::binary_search(entry.begin(), entry.end(), *k))
      malformed(ln, fmt::format("token {} is missing from its own synonym set", *k));
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) fail(ErrorCode::MalformedRecord, fmt::format("no row for token {}", k));
  return dict;
}

std::string format_double(double v) { return fmt::format("{}", v); }

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(kUndefined); }

std::string write_reports_csv(std::span<const EnsembleReport> reports) {
  std::string out(kReportHeader);
  out.push_back('\n');
  for (const auto& r : reports) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_label(r.label), format_optional(r.per_target_rmsf_r),
                       format_optional(r.mean_pairwise_rmsd_generated), format_optional(r.mean_pairwise_rmsd_reference),
                       format_optional(r.md_pca_w2), format_optional(r.joint_pca_w2), join_values(r.rmsf_generated, ';'),
                       join_values(r.rmsf_reference, ';'));
  }
  return out;
}

std::vector<EnsembleReport> parse_reports_csv(std::string_view text) {
  std::vector<EnsembleReport> out;
  bool header = false;
  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t ln = idx + 1;
    const std::string_view line = lines[idx];
    if (trim(line).empty()) continue;
    if (!header) {
      if (trim(line) != kReportHeader) malformed(ln, "unexpected report header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) malformed(ln, fmt::format("{} fields, expected 8", f.size()));
    EnsembleReport r;
    r.label = std::string(trim(f[0]));
    r.per_target_rmsf_r = parse_optional(f[1], ln);
    r.mean_pairwise_rmsd_generated = parse_optional(f[2], ln);
    r.mean_pairwise_rmsd_reference = parse_optional(f[3], ln);
    r.md_pca_w2 = parse_optional(f[4], ln);
    r.joint_pca_w2 = parse_optional(f[5], ln);
    r.rmsf_generated = parse_vector(f[6], ln);
    r.rmsf_reference = parse_vector(f[7], ln);
    out.push_back(std::move(r));
  }
  if (!header) fail(ErrorCode::MalformedRecord, "empty report file");
  return out;
}

std::string write_reports_jsonl(std::span<const EnsembleReport> reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["per_target_rmsf_r"] = json_optional(r.per_target_rmsf_r);
    j["mean_pairwise_rmsd_generated"] = json_optional(r.mean_pairwise_rmsd_generated);
    j["mean_pairwise_rmsd_reference"] = json_optional(r.mean_pairwise_rmsd_reference);
    j["md_pca_w2"] = json_optional(r.md_pca_w2);
    j["joint_pca_w2"] = json_optional(r.joint_pca_w2);
    j["rmsf_generated"] = r.rmsf_generated;
    j["rmsf_reference"] = r.rmsf_reference;
    j["errors"] = r.errors;
    j["metadata"] = report_metadata();
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::string write_corpus_csv(const CorpusReport& c) {
  return fmt::format(
      "targets,median_per_target_rmsf_r,pairwise_rmsd_r,global_rmsf_r,median_md_pca_w2,median_joint_pca_w2\n"
      "{},{},{},{},{},{}\n",
      c.targets, format_optional(c.median_per_target_rmsf_r), format_optional(c.pairwise_rmsd_r),
      format_optional(c.global_rmsf_r), format_optional(c.median_md_pca_w2), format_optional(c.median_joint_pca_w2));
}

std::string write_rmsf_csv(std::span<const EnsembleReport> reports) {
  std::string out = "target,residue,rmsf_generated,rmsf_reference\n";
  for (const auto& r : reports) {
    const std::size_t n = std::max(r.rmsf_generated.size(), r.rmsf_reference.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto g = i < r.rmsf_generated.size() ? format_double(r.rmsf_generated[i]) : std::string(kUndefined);
      const auto f = i < r.rmsf_reference.size() ? format_double(r.rmsf_reference[i]) : std::string(kUndefined);
      out += fmt::format("{},{},{},{}\n", csv_label(r.label), i + 1, g, f);
    }
  }
  return out;
}

std::string write_validation_csv(const ValidationTable& table) {
  std::string out = fmt::format(
      "label,tm_vs_decoded,rmsd_vs_decoded,tm_vs_original,rmsd_vs_original,mean{0}_tm_vs_decoded,"
      "mean{0}_rmsd_vs_decoded\n",
      table.repeats);
  auto row = [&](const ValidationRow& r) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_label(r.label), format_optional(r.tm_vs_decoded),
                       format_double(r.rmsd_vs_decoded), format_optional(r.tm_vs_original),
                       format_double(r.rmsd_vs_original), format_optional(r.mean_tm_vs_decoded),
                       format_double(r.mean_rmsd_vs_decoded));
  };
  for (const auto& r : table.rows) row(r);
  row(table.mean);
  return out;
}

std::string write_stats_text(const RedundancyStats& stats, std::size_t code_count) {
  std::string out;
  out += fmt::format("code_count={}\n", code_count);
  out += fmt::format("tau={}\n", format_double(stats.tau));
  out += fmt::format("synonym_fraction={}\n", format_double(stats.synonym_fraction));
  out += fmt::format("component_count={}\n", stats.component_count);
  for (const auto& [size, count] : stats.set_size_histogram) out += fmt::format("set_size[{}]={}\n", size, count);
  for (const auto& [p, d] : stats.distance_quantiles) out += fmt::format("distance_quantile[{}]={}\n", p, format_double(d));
  return out;
}

std::string write_projection_csv(const Projection2D& projection) {
  std::string out = "token,pc1,pc2\n";
  for (Eigen::Index i = 0; i < projection.coords.rows(); ++i)
    out += fmt::format("{},{},{}\n", i, format_double(projection.coords(i, 0)), format_double(projection.coords(i, 1)));
  return out;
}

std::string write_matrix_csv(const Eigen::MatrixXd& matrix) {
  std::string out;
  out.reserve(static_cast<std::size_t>(matrix.size()) * 10);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out.push_back(',');
      fmt::format_to(std::back_inserter(out), "{:.6f}", matrix(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

std::string write_training_summary(const KMeansResult& result) {
  std::string out;
  out += fmt::format("codebook_id={}\n", result.codebook.id);
  out += fmt::format("codes={}\n", result.codebook.size());
  out += fmt::format("dimension={}\n", result.codebook.dim());
  out += fmt::format("iterations={}\n", result.iterations);
  out += fmt::format("converged={}\n", result.converged ? "true" : "false");
  for (std::size_t i = 0; i < result.inertia.size(); ++i)
    out += fmt::format("inertia[{}]={}\n", i, format_double(result.inertia[i]));
  for (std::size_t k = 0; k < result.cluster_sizes.size(); ++k)
    out += fmt::format("cluster_size[{}]={}\n", k, result.cluster_sizes[k]);
  return out;
}

}  // namespace vqsyn
