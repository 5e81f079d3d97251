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
/// Packing diagram: time on x, address on y, one rectangle per block.

#include <cstdio>
#include <set>
#include <string>

#include "dsaplan/core.hpp"
#include "dsaplan/verifier.hpp"

namespace dsaplan {

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Blocks named in `report`'s violations get class "block violation".
inline std::string render_svg(const DsaInstance &inst, const Plan &plan,
                              const VerifyReport *report = nullptr) {
  constexpr double width = 800, height = 500, margin = 60;
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  using detail::fmt2;

  Bytes peak = plan_peak(inst, plan.offsets);
  Bytes y_max = peak;
  bool capacity_on_scale = inst.capacity() <= 2 * peak && inst.capacity() > 0;
  if (capacity_on_scale) y_max = std::max(y_max, inst.capacity());
  double y_top = y_max == 0 ? 1.0 : static_cast<double>(y_max) * 1.05;
  Tick t0 = inst.min_time(), t1 = inst.max_time();
  double t_span = t1 > t0 ? static_cast<double>(t1 - t0) : 1.0;

  auto sx = [&](Tick t) {
    return margin + static_cast<double>(t - t0) / t_span * plot_w;
  };
  auto sy = [&](Bytes a) {
    return margin + plot_h - static_cast<double>(a) / y_top * plot_h;
  };

  std::set<BlockId> bad;
  if (report)
    for (const auto &v : report->violations) {
      bad.insert(v.first);
      bad.insert(v.second);
    }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) +
         "\" height=\"" + fmt2(height) + "\" viewBox=\"0 0 " + fmt2(width) +
         " " + fmt2(height) + "\">\n";
  svg +=
      "<style>.block{stroke:#333;stroke-width:0.5}"
      ".violation{stroke:#d00;stroke-width:2;fill-opacity:0.6}"
      ".peak{stroke:#06c;stroke-dasharray:6 3}"
      ".capacity{stroke:#c60;stroke-dasharray:2 2}"
      ".axis{stroke:#000}text{font:12px sans-serif}</style>\n";
  svg += "<line class=\"axis\" x1=\"" + fmt2(margin) + "\" y1=\"" +
         fmt2(margin + plot_h) + "\" x2=\"" + fmt2(margin + plot_w) +
         "\" y2=\"" + fmt2(margin + plot_h) + "\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + fmt2(margin) + "\" y1=\"" +
         fmt2(margin) + "\" x2=\"" + fmt2(margin) + "\" y2=\"" +
         fmt2(margin + plot_h) + "\"/>\n";
  svg += "<text x=\"" + fmt2(margin + plot_w / 2) + "\" y=\"" +
         fmt2(height - 20) + "\">time</text>\n";
  svg += "<text x=\"10\" y=\"" + fmt2(margin - 20) + "\">offset (bytes)</text>\n";

  for (const auto &b : inst.blocks()) {
    Bytes x = plan.offsets.at(b.id - 1);
    unsigned hue = (b.id * 137u) % 360u;
    std::string cls = bad.count(b.id) ? "block violation" : "block";
    svg += "<rect class=\"" + cls + "\" x=\"" + fmt2(sx(b.alloc_time)) +
           "\" y=\"" + fmt2(sy(x + b.size)) + "\" width=\"" +
           fmt2(sx(b.free_time) - sx(b.alloc_time)) + "\" height=\"" +
           fmt2(sy(x) - sy(x + b.size)) + "\" fill=\"hsl(" +
           std::to_string(hue) + ",60%,70%)\">";
    svg += "<title>block " + std::to_string(b.id) +
           (b.label.empty() ? "" : " " + detail::xml_escape(b.label)) +
           ": size " + std::to_string(b.size) + ", lifetime [" +
           std::to_string(b.alloc_time) + "," + std::to_string(b.free_time) +
           "), offset " + std::to_string(x) + "</title></rect>\n";
  }

  svg += "<line class=\"peak\" x1=\"" + fmt2(margin) + "\" y1=\"" +
         fmt2(sy(peak)) + "\" x2=\"" + fmt2(margin + plot_w) + "\" y2=\"" +
         fmt2(sy(peak)) + "\"/>\n";
  svg += "<text x=\"" + fmt2(margin + plot_w + 4) + "\" y=\"" +
         fmt2(sy(peak)) + "\">peak " + std::to_string(peak) + "</text>\n";
  if (capacity_on_scale) {
    svg += "<line class=\"capacity\" x1=\"" + fmt2(margin) + "\" y1=\"" +
           fmt2(sy(inst.capacity())) + "\" x2=\"" + fmt2(margin + plot_w) +
           "\" y2=\"" + fmt2(sy(inst.capacity())) + "\"/>\n";
    svg += "<text x=\"" + fmt2(margin + plot_w + 4) + "\" y=\"" +
           fmt2(sy(inst.capacity()) - 12) + "\">capacity " +
           std::to_string(inst.capacity()) + "</text>\n";
  } else {
    svg += "<text x=\"" + fmt2(margin + plot_w - 200) + "\" y=\"" +
           fmt2(margin - 20) + "\">capacity " +
           std::to_string(inst.capacity()) + " (off scale)</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dsaplan
