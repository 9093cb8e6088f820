#include "perpcor/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  if (s.empty()) throw ValidationError(context + ": empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size())
    throw ValidationError(context + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
  if (s.empty()) throw ValidationError(context + ": empty integer field");
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size())
    throw ValidationError(context + ": bad integer '" + s + "'");
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  return out;
}

// On descending value, ties by ascending domain_id.
std::vector<std::size_t> weight_output_order(const WeightVector& w) {
  std::vector<std::size_t> order(w.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (w.values[a] != w.values[b]) return w.values[a] > w.values[b];
    return w.domain_ids[a] < w.domain_ids[b];
  });
  return order;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LossMatrix read_loss_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("loss CSV: empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "model_id")
    throw ValidationError("loss CSV: header must be model_id,<domain>,...");
  std::vector<std::string> domain_ids(header.begin() + 1, header.end());

  std::vector<std::string> model_ids;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "loss CSV line " + std::to_string(line_no);
    if (fields.size() != header.size())
      throw ValidationError(context + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    model_ids.push_back(fields[0]);
    for (std::size_t j = 1; j < fields.size(); ++j)
      values.push_back(parse_double(fields[j], context));
  }
  return LossMatrix::create(std::move(model_ids), std::move(domain_ids),
                            std::move(values));
}

LossMatrix read_loss_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_loss_csv(in);
}

void write_loss_csv(std::ostream& out, const LossMatrix& X) {
  out << "model_id";
  for (const auto& d : X.domain_ids) out << ',' << d;
  out << '\n';
  for (std::size_t i = 0; i < X.n_models(); ++i) {
    out << X.model_ids[i];
    for (std::size_t j = 0; j < X.n_domains(); ++j)
      out << ',' << format_double(X.at(i, j));
    out << '\n';
  }
}

void write_loss_csv_file(const std::string& path, const LossMatrix& X) {
  auto out = open_output(path);
  write_loss_csv(out, X);
}

BenchmarkScores read_benchmark_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("benchmark CSV: empty file");
  if (split_csv_line(line) != std::vector<std::string>{"model_id", "score",
                                                       "kind"})
    throw ValidationError("benchmark CSV: header must be model_id,score,kind");

  std::vector<std::string> model_ids;
  std::vector<double> raw;
  std::string kind_seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "benchmark CSV line " + std::to_string(line_no);
    if (fields.size() != 3)
      throw ValidationError(context + ": expected 3 fields");
    model_ids.push_back(fields[0]);
    raw.push_back(parse_double(fields[1], context));
    if (kind_seen.empty())
      kind_seen = fields[2];
    else if (kind_seen != fields[2])
      throw ValidationError(context + ": mixed benchmark kinds");
  }
  if (model_ids.empty()) throw ValidationError("benchmark CSV: no rows");
  return normalize_benchmark(std::move(model_ids), raw,
                             benchmark_kind_from_string(kind_seen));
}

BenchmarkScores read_benchmark_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_benchmark_csv(in);
}

std::vector<ChunkLossRecord> read_chunks_jsonl(std::istream& in) {
  std::vector<ChunkLossRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = "chunks JSONL line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(context + ": " + e.what());
    }
    try {
      ChunkLossRecord rec;
      rec.domain_id = obj.at("domain").get<std::string>();
      rec.page_id = obj.at("page_id").get<std::string>();
      rec.chunk_index = obj.at("chunk_index").get<std::int64_t>();
      rec.token_count = obj.at("token_count").get<std::int64_t>();
      rec.byte_count = obj.at("byte_count").get<std::int64_t>();
      rec.mean_token_ce = obj.at("mean_token_ce").get<double>();
      rec.validate();
      records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw ValidationError(context + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(context + ": " + e.what());
    }
  }
  if (records.empty()) throw ValidationError("chunks JSONL: no records");
  return records;
}

std::vector<ChunkLossRecord> read_chunks_jsonl_file(const std::string& path) {
  auto in = open_input(path);
  return read_chunks_jsonl(in);
}

DomainInventory read_inventory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("inventory CSV: empty file");
  if (split_csv_line(line) != std::vector<std::string>{"domain_id", "tokens"})
    throw ValidationError("inventory CSV: header must be domain_id,tokens");
  std::vector<std::string> ids;
  std::vector<std::int64_t> tokens;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "inventory CSV line " + std::to_string(line_no);
    if (fields.size() != 2)
      throw ValidationError(context + ": expected 2 fields");
    ids.push_back(fields[0]);
    tokens.push_back(parse_int(fields[1], context));
  }
  return DomainInventory::create(std::move(ids), std::move(tokens));
}

DomainInventory read_inventory_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_inventory_csv(in);
}

void write_weights_csv(std::ostream& out, const WeightVector& w) {
  out << "domain_id,value,tag\n";
  for (std::size_t idx : weight_output_order(w))
    out << w.domain_ids[idx] << ',' << format_double(w.values[idx]) << ','
        << to_string(w.tag) << '\n';
}

void write_weights_csv_file(const std::string& path, const WeightVector& w) {
  auto out = open_output(path);
  write_weights_csv(out, w);
}

WeightVector read_weights_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("weights CSV: empty file");
  if (split_csv_line(line) !=
      std::vector<std::string>{"domain_id", "value", "tag"})
    throw ValidationError("weights CSV: header must be domain_id,value,tag");
  WeightVector w;
  bool tag_set = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "weights CSV line " + std::to_string(line_no);
    if (fields.size() != 3)
      throw ValidationError(context + ": expected 3 fields");
    w.domain_ids.push_back(fields[0]);
    w.values.push_back(parse_double(fields[1], context));
    const WeightTag tag = weight_tag_from_string(fields[2]);
    if (!tag_set) {
      w.tag = tag;
      tag_set = true;
    } else if (tag != w.tag) {
      throw ValidationError(context + ": mixed weight tags");
    }
  }
  if (w.domain_ids.empty()) throw ValidationError("weights CSV: no rows");
  return w;
}

WeightVector read_weights_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_weights_csv(in);
}

void write_caps_csv(std::ostream& out, const CapVector& caps) {
  out << "domain_id,tau\n";
  for (std::size_t i = 0; i < caps.domain_ids.size(); ++i)
    out << caps.domain_ids[i] << ',' << format_double(caps.tau[i]) << '\n';
}

void write_caps_csv_file(const std::string& path, const CapVector& caps) {
  auto out = open_output(path);
  write_caps_csv(out, caps);
}

CapVector read_caps_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("caps CSV: empty file");
  if (split_csv_line(line) != std::vector<std::string>{"domain_id", "tau"})
    throw ValidationError("caps CSV: header must be domain_id,tau");
  CapVector caps;
  std::size_t line_no = 1;
  double total = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "caps CSV line " + std::to_string(line_no);
    if (fields.size() != 2)
      throw ValidationError(context + ": expected 2 fields");
    caps.domain_ids.push_back(fields[0]);
    const double tau = parse_double(fields[1], context);
    if (tau <= 0.0)
      throw ValidationError(context + ": tau must be positive");
    caps.tau.push_back(tau);
    total += tau;
  }
  if (caps.domain_ids.empty()) throw ValidationError("caps CSV: no rows");
  caps.infeasible = total < 1.0;
  return caps;
}

CapVector read_caps_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_caps_csv(in);
}

void write_plan_csv(std::ostream& out, const SelectionPlan& plan) {
  out << "domain_id,gamma,rank,tokens_available,tokens_selected\n";
  for (const auto& row : plan.rows)
    out << row.domain_id << ',' << format_double(row.gamma) << ',' << row.rank
        << ',' << row.tokens_available << ',' << row.tokens_selected << '\n';
}

void write_plan_csv_file(const std::string& path, const SelectionPlan& plan) {
  auto out = open_output(path);
  write_plan_csv(out, plan);
}

std::vector<Page> read_pages_jsonl(std::istream& in) {
  std::vector<Page> pages;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = "pages JSONL line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(context + ": " + e.what());
    }
    try {
      Page page;
      page.domain_id = obj.value("domain", "");
      page.page_id = obj.at("page_id").get<std::string>();
      page.text = obj.at("text").get<std::string>();
      page.token_count = obj.at("token_count").get<std::int64_t>();
      if (page.text.empty())
        throw ValidationError("empty text");
      if (page.token_count < 1)
        throw ValidationError("token_count < 1");
      pages.push_back(std::move(page));
    } catch (const json::exception& e) {
      throw ValidationError(context + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(context + ": " + e.what());
    }
  }
  if (pages.empty()) throw ValidationError("pages JSONL: no pages");
  return pages;
}

std::vector<Page> read_pages_jsonl_file(const std::string& path) {
  auto in = open_input(path);
  return read_pages_jsonl(in);
}

}  // namespace perpcor
