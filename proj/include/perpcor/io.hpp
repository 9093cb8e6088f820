#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "perpcor/classifier.hpp"
#include "perpcor/estimators.hpp"
#include "perpcor/projection.hpp"
#include "perpcor/selection.hpp"
#include "perpcor/types.hpp"

namespace perpcor {

// Schema versions stamped into JSON reports and --version output.
inline constexpr const char* kLossSchemaVersion = "1";
inline constexpr const char* kReportSchemaVersion = "1";

// Doubles round-trip exactly: printed with %.17g.
std::string format_double(double v);

// loss CSV: header "model_id,<domain>,<domain>,..."; one row per model.
LossMatrix read_loss_csv(std::istream& in);
LossMatrix read_loss_csv_file(const std::string& path);
void write_loss_csv(std::ostream& out, const LossMatrix& X);
void write_loss_csv_file(const std::string& path, const LossMatrix& X);

// benchmark CSV: header "model_id,score,kind".
BenchmarkScores read_benchmark_csv(std::istream& in);
BenchmarkScores read_benchmark_csv_file(const std::string& path);

// chunk JSONL: one object per line with keys domain, page_id, chunk_index,
// token_count, byte_count, mean_token_ce.
std::vector<ChunkLossRecord> read_chunks_jsonl(std::istream& in);
std::vector<ChunkLossRecord> read_chunks_jsonl_file(const std::string& path);

// inventory CSV: header "domain_id,tokens".
DomainInventory read_inventory_csv(std::istream& in);
DomainInventory read_inventory_csv_file(const std::string& path);

// weights CSV: header "domain_id,value,tag"; rows sorted by descending
// value, ties by ascending domain_id. All rows carry the same tag.
void write_weights_csv(std::ostream& out, const WeightVector& w);
void write_weights_csv_file(const std::string& path, const WeightVector& w);
WeightVector read_weights_csv(std::istream& in);
WeightVector read_weights_csv_file(const std::string& path);

// caps CSV: header "domain_id,tau".
void write_caps_csv(std::ostream& out, const CapVector& caps);
void write_caps_csv_file(const std::string& path, const CapVector& caps);
CapVector read_caps_csv(std::istream& in);
CapVector read_caps_csv_file(const std::string& path);

// plan CSV: header
// "domain_id,gamma,rank,tokens_available,tokens_selected", rank order.
void write_plan_csv(std::ostream& out, const SelectionPlan& plan);
void write_plan_csv_file(const std::string& path, const SelectionPlan& plan);

// pages JSONL: one object per line with keys page_id, text, token_count.
std::vector<Page> read_pages_jsonl(std::istream& in);
std::vector<Page> read_pages_jsonl_file(const std::string& path);

}  // namespace perpcor
