// Copyright 2026 The Lawforge Authors.
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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lawforge/analytics.hpp"

namespace lawforge::analytics {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
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

class Canvas {
 public:
  Canvas(const std::string& title, double lo, double hi) : lo_(lo), hi_(hi > lo ? hi : lo + 1.0) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
         << escape(title) << "</text>\n";
    const double y0 = y(lo_), y1 = y(hi_);
    out_ << "<line x1=\"" << kLeft << "\" y1=\"" << y0 << "\" x2=\"" << kLeft << "\" y2=\"" << y1
         << "\" stroke=\"black\"/>\n"
         << "<line x1=\"" << kLeft << "\" y1=\"" << y0 << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << y0
         << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = lo_ + (hi_ - lo_) * i / 4.0;
      out_ << "<text x=\"" << kLeft - 4 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
  }

  double y(double v) const { return kHeight - kBottom - (v - lo_) / (hi_ - lo_) * (kHeight - kTop - kBottom); }

  void line(double x1, double y1, double x2, double y2) {
    out_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
         << "\" stroke=\"black\"/>\n";
  }
  void rect(double x, double top, double w, double h, const char* fill) {
    out_ << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << std::max(h, 0.0)
         << "\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
  }
  void label(double x, const std::string& text) {
    out_ << "<text x=\"" << x << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
         << escape(text) << "</text>\n";
  }

  void save(const std::filesystem::path& path) {
    out_ << "</svg>\n";
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << out_.str();
  }

 private:
  double lo_;
  double hi_;
  std::ostringstream out_;
};

double slot_width(std::size_t n) { return (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(n, 1)); }

}  // namespace

void write_box_plot(const std::map<std::string, std::array<double, 5>>& boxes, const std::string& title,
                    const std::filesystem::path& path) {
  double lo = 0.0, hi = 0.0;
  for (const auto& [k, b] : boxes) hi = std::max(hi, b[4]);
  Canvas c(title, lo, hi);
  const double w = slot_width(boxes.size());
  std::size_t i = 0;
  for (const auto& [k, b] : boxes) {
    const double cx = kLeft + w * (static_cast<double>(i) + 0.5);
    const double half = w * 0.25;
    c.line(cx, c.y(b[0]), cx, c.y(b[1]));
    c.line(cx, c.y(b[3]), cx, c.y(b[4]));
    c.line(cx - half / 2, c.y(b[0]), cx + half / 2, c.y(b[0]));
    c.line(cx - half / 2, c.y(b[4]), cx + half / 2, c.y(b[4]));
    c.rect(cx - half, c.y(b[3]), 2 * half, c.y(b[1]) - c.y(b[3]), "#9ecae1");
    c.line(cx - half, c.y(b[2]), cx + half, c.y(b[2]));
    c.label(cx, k);
    ++i;
  }
  c.save(path);
}

void write_bar_chart(const std::map<std::string, double>& bars, const std::string& title,
                     const std::filesystem::path& path) {
  double hi = 0.0;
  for (const auto& [k, v] : bars) hi = std::max(hi, v);
  Canvas c(title, 0.0, hi);
  const double w = slot_width(bars.size());
  std::size_t i = 0;
  for (const auto& [k, v] : bars) {
    const double x = kLeft + w * static_cast<double>(i);
    c.rect(x + w * 0.15, c.y(v), w * 0.7, c.y(0.0) - c.y(v), "#fdae6b");
    c.label(x + w / 2, k);
    ++i;
  }
  c.save(path);
}

}  // namespace lawforge::analytics
