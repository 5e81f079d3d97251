/**
 * Copyright (c) dsaplan contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

/// \file
/// JSON documents: plan files and verification reports.
///
/// A plan file carries the instance it was solved for:
///
///     {"peak": 6, "capacity": 9, "alignment": 1, "provenance": "BestFit",
///      "blocks": [{"id": 1, "size": 4, "alloc_time": 1, "free_time": 3,
///                  "offset": 2, "label": ""}, ...]}

#include <string>
#include <string_view>

#include <json.hpp>

#include "dsaplan/core.hpp"
#include "dsaplan/verifier.hpp"

namespace dsaplan {

using ojson = nlohmann::ordered_json;

struct PlanFile {
  DsaInstance instance;
  Plan plan;

  bool operator==(const PlanFile &) const = default;
};

inline ojson plan_to_json(const DsaInstance &inst, const Plan &plan) {
  ojson doc;
  doc["peak"] = plan.peak;
  doc["capacity"] = inst.capacity();
  doc["alignment"] = inst.alignment();
  doc["provenance"] = std::string(to_string(plan.provenance));
  ojson blocks = ojson::array();
  for (const auto &b : inst.blocks()) {
    ojson jb;
    jb["id"] = b.id;
    jb["size"] = b.size;
    jb["alloc_time"] = b.alloc_time;
    jb["free_time"] = b.free_time;
    jb["offset"] = plan.offsets.at(b.id - 1);
    jb["label"] = b.label;
    blocks.push_back(std::move(jb));
  }
  doc["blocks"] = std::move(blocks);
  return doc;
}

inline std::string serialize_plan(const DsaInstance &inst, const Plan &plan) {
  return plan_to_json(inst, plan).dump(2) + "\n";
}

inline Provenance provenance_from_string(std::string_view s) {
  if (s == "BestFit") return Provenance::BestFit;
  if (s == "Exact") return Provenance::Exact;
  if (s == "ExactTimeout") return Provenance::ExactTimeout;
  throw Error(ErrorCode::FormatError,
              "unknown provenance '" + std::string(s) + "'");
}

inline PlanFile parse_plan(std::string_view text) {
  try {
    auto doc = ojson::parse(text);
    std::vector<BlockRequest> blocks;
    Plan plan;
    for (const auto &jb : doc.at("blocks")) {
      BlockRequest b;
      b.id = jb.at("id").get<BlockId>();
      b.size = jb.at("size").get<Bytes>();
      b.alloc_time = jb.at("alloc_time").get<Tick>();
      b.free_time = jb.at("free_time").get<Tick>();
      if (jb.contains("label") && !jb["label"].is_null())
        b.label = jb["label"].get<std::string>();
      plan.offsets.push_back(jb.at("offset").get<Bytes>());
      blocks.push_back(std::move(b));
    }
    plan.peak = doc.at("peak").get<Bytes>();
    plan.provenance =
        provenance_from_string(doc.at("provenance").get<std::string>());
    PlanFile file;
    file.instance = DsaInstance::from_parts(std::move(blocks),
                                            doc.at("capacity").get<Bytes>(),
                                            doc.at("alignment").get<Bytes>());
    file.plan = std::move(plan);
    return file;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::FormatError, e.what());
  }
}

inline ojson report_to_json(const VerifyReport &report) {
  ojson doc;
  doc["valid"] = report.valid;
  doc["peak_recomputed"] = report.peak_recomputed;
  doc["peak_matches"] = report.peak_matches;
  doc["capacity_ok"] = report.capacity_ok;
  doc["utilization"] = report.utilization;
  ojson violations = ojson::array();
  for (const auto &v : report.violations)
    violations.push_back({{"first", v.first},
                          {"second", v.second},
                          {"overlap_bytes", v.overlap_bytes},
                          {"overlap_ticks", v.overlap_ticks}});
  doc["violations"] = std::move(violations);
  return doc;
}

}  // namespace dsaplan
