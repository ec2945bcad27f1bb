#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agr/harness.hpp"

namespace agr {

// instance files: one JSON object per instance, stable key order
std::string instance_to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const std::string& text);
void write_instances(const std::filesystem::path& dir,
                     std::span<const InstanceSpec> specs);
InstanceSpec load_instance(const std::filesystem::path& file);
// every *.json under dir, sorted by filename
std::vector<InstanceSpec> load_instances(const std::filesystem::path& dir);

// trace: one meta line, then one JSON line per step
std::string episode_trace_jsonl(const EpisodeRecord& rec);

void write_results_csv(const std::filesystem::path& file,
                       std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& file);

void write_ablation_csv(const std::filesystem::path& file,
                        std::span<const AblationRow> rows);
std::vector<AblationRow> read_ablation_csv(const std::filesystem::path& file);

}  // namespace agr
