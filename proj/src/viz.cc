// Copyright 2026 The Penstream Authors
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


#include "penstream/viz.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/text_table.h"

namespace penstream {
namespace {

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

// Maps device coordinates into a box, preserving aspect ratio and flipping y.
class Frame {
 public:
  Frame(const std::vector<const PenSample *> &points, double x0, double y0, double w, double h) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const PenSample *p : points) {
      min_x = std::min(min_x, p->x);
      max_x = std::max(max_x, p->x);
      min_y = std::min(min_y, p->y);
      max_y = std::max(max_y, p->y);
    }
    const double bw = max_x - min_x, bh = max_y - min_y;
    if (bw > 0 && bh > 0) {
      scale_ = std::min(w / bw, h / bh);
    } else if (bw > 0) {
      scale_ = w / bw;
    } else if (bh > 0) {
      scale_ = h / bh;
    }
    min_x_ = min_x;
    max_y_ = max_y;
    off_x_ = x0 + (w - bw * scale_) / 2;
    off_y_ = y0 + (h - bh * scale_) / 2;
  }

  double x(double device_x) const { return off_x_ + (device_x - min_x_) * scale_; }
  double y(double device_y) const { return off_y_ + (max_y_ - device_y) * scale_; }
  std::string point(const PenSample &s) const { return num(x(s.x)) + "," + num(y(s.y)); }

 private:
  double scale_ = 1;
  double min_x_ = 0, max_y_ = 0, off_x_ = 0, off_y_ = 0;
};

std::vector<const PenSample *> pressed_points(const TrialRecord &trial, const SegmentTree &tree) {
  std::vector<const PenSample *> out;
  for (const TreeStroke &s : tree.strokes) {
    for (std::size_t i = s.span.first_index; i <= s.span.last_index; ++i) {
      out.push_back(&trial.samples[i]);
    }
  }
  return out;
}

std::string polyline(const TrialRecord &trial, const TreeStroke &stroke, const Frame &frame,
                     std::string_view cls, std::string_view color, double width,
                     std::size_t label) {
  std::string points;
  for (std::size_t i = stroke.onset_index; i <= stroke.span.last_index; ++i) {
    if (!points.empty()) points += ' ';
    points += frame.point(trial.samples[i]);
  }
  return fmt::format(
      "<polyline class=\"{}\" data-stroke=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
      "stroke-width=\"{}\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n",
      cls, label, points, color, num(width));
}

std::string svg_open(double width, double height, std::string_view title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n<title>{2}</title>\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      num(width), num(height), escape(title));
}

std::string hex_color(double r, double g, double b) {
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255)); };
  return fmt::format("#{:02x}{:02x}{:02x}", c(r), c(g), c(b));
}

}  // namespace

void validate_plot_spec(const PlotSpec &spec) {
  if (!(spec.width > 0) || !(spec.height > 0) || !(spec.margin >= 0) ||
      !(spec.font_size > 0) || !(spec.line_width > 0) || !(spec.dot_radius > 0) ||
      spec.panel_columns < 1) {
    throw ConfigError("plot dimensions must be positive");
  }
  if (2 * spec.margin >= std::min(spec.width, spec.height)) {
    throw ConfigError("plot margins leave no drawing area");
  }
}

std::string plot_file_stem(const TrialRecord &trial) {
  std::string stem = fmt::format("{}_{}_{}", trial.subject_id, trial.row_index, trial.target);
  for (char &c : stem) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '-';
  }
  return stem;
}

std::string render_character(const TrialRecord &trial, const SegmentTree &tree,
                             const PlotSpec &spec) {
  if (tree.empty()) throw EmptyTree();
  validate_plot_spec(spec);
  const Frame frame(pressed_points(trial, tree), spec.margin, spec.margin,
                    spec.width - 2 * spec.margin, spec.height - 2 * spec.margin);
  std::string out = svg_open(spec.width, spec.height, plot_file_stem(trial));
  for (std::size_t s = 0; s < tree.strokes.size(); ++s) {
    out += polyline(trial, tree.strokes[s], frame, "stroke", spec.stroke_color, spec.line_width,
                    s + 1);
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::string> panel_values(const MetricRow &row) {
  const StrokeMetrics &m = row.stroke;
  return {export_time(m.abs_rt),
          export_pressure(m.stroke_press_avg),
          export_length(m.stroke_len),
          export_maybe(m.stroke_dist, export_length),
          export_maybe(m.stroke_rt_rel, export_time),
          export_time(m.stroke_dur)};
}

std::string render_stroke_panels(const TrialRecord &trial, const SegmentTree &tree,
                                 const std::vector<MetricRow> &rows, const PlotSpec &spec) {
  if (tree.empty()) throw EmptyTree();
  validate_plot_spec(spec);
  if (rows.size() != tree.strokes.size()) {
    throw DataError("metric rows do not match the segment tree");
  }
  const std::size_t n = tree.strokes.size();
  const std::size_t cols = std::min<std::size_t>(static_cast<std::size_t>(spec.panel_columns), n);
  const std::size_t panel_rows = (n + cols - 1) / cols;
  const double line_h = spec.font_size * 1.3;
  const double text_h = line_h * static_cast<double>(kPanelLabels.size()) + spec.margin / 2;
  const double draw_h = std::max(spec.height - 2 * spec.margin - text_h, spec.height / 4);

  std::vector<const PenSample *> all;
  for (const PenSample &s : trial.samples) all.push_back(&s);
  const Frame frame(all, spec.margin, spec.margin, spec.width - 2 * spec.margin, draw_h);

  std::string out = svg_open(spec.width * static_cast<double>(cols),
                             spec.height * static_cast<double>(panel_rows),
                             plot_file_stem(trial));
  for (std::size_t k = 0; k < n; ++k) {
    const TreeStroke &cur = tree.strokes[k];
    const double px = spec.width * static_cast<double>(k % cols);
    const double py = spec.height * static_cast<double>(k / cols);
    out += fmt::format("<g class=\"panel\" data-stroke=\"{}\" transform=\"translate({},{})\">\n",
                       k + 1, num(px), num(py));
    out += fmt::format(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#e0e0e0\"/>\n",
        num(spec.width), num(spec.height));
    for (std::size_t j = 0; j < k; ++j) {
      out += polyline(trial, tree.strokes[j], frame, "prior", spec.faded_color, spec.line_width,
                      j + 1);
    }
    if (k > 0) {
      const PenSample &prev_end = trial.samples[tree.strokes[k - 1].span.last_index];
      const PenSample &onset = trial.samples[cur.onset_index];
      for (std::size_t i = tree.strokes[k - 1].span.last_index + 1; i < cur.onset_index; ++i) {
        const PenSample &s = trial.samples[i];
        if (s.pressed()) continue;
        out += fmt::format("<circle class=\"air\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                           num(frame.x(s.x)), num(frame.y(s.y)), num(spec.dot_radius),
                           spec.air_color);
      }
      if (!cur.continuation) {
        out += fmt::format(
            "<line class=\"link\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
            "stroke-width=\"{}\"/>\n",
            num(frame.x(prev_end.x)), num(frame.y(prev_end.y)), num(frame.x(onset.x)),
            num(frame.y(onset.y)), spec.link_color, num(spec.line_width / 2));
      }
    }
    out += polyline(trial, cur, frame, "current", spec.current_color, spec.line_width, k + 1);
    const PenSample &onset = trial.samples[cur.onset_index];
    out += fmt::format("<circle class=\"onset\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                       num(frame.x(onset.x)), num(frame.y(onset.y)),
                       num(spec.dot_radius * 2), spec.onset_color);
    const auto values = panel_values(rows[k]);
    for (std::size_t l = 0; l < kPanelLabels.size(); ++l) {
      const double ty = spec.margin + draw_h + spec.margin / 2 + line_h * static_cast<double>(l + 1);
      out += fmt::format(
          "<text class=\"annotation\" data-label=\"{0}\" x=\"{1}\" y=\"{2}\" font-size=\"{3}\" "
          "font-family=\"sans-serif\">{0}: {4}</text>\n",
          kPanelLabels[l], num(spec.margin), num(ty), num(spec.font_size), values[l]);
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_correlation_heatmap(const CorrelationMatrix &matrix, const PlotSpec &spec) {
  validate_plot_spec(spec);
  const Eigen::Index k = matrix.r.rows();
  if (matrix.r.cols() != k || matrix.p.rows() != k || matrix.p.cols() != k ||
      matrix.names.size() != static_cast<std::size_t>(k)) {
    throw NonSquare();
  }
  const double cell = spec.font_size * 4;
  const double label_w = spec.font_size * 12;
  const double size = label_w + cell * static_cast<double>(k) + spec.margin;
  std::string out = svg_open(size, size, "correlations");
  for (Eigen::Index i = 0; i < k; ++i) {
    const double y = label_w + cell * static_cast<double>(i);
    const double x = label_w + cell * static_cast<double>(i);
    const auto &name = escape(matrix.names[static_cast<std::size_t>(i)]);
    out += fmt::format(
        "<text class=\"row-label\" x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"end\" "
        "font-family=\"sans-serif\">{}</text>\n",
        num(label_w - 4), num(y + cell / 2), num(spec.font_size), name);
    out += fmt::format(
        "<text class=\"col-label\" x=\"{0}\" y=\"{1}\" font-size=\"{2}\" "
        "transform=\"rotate(-60 {0} {1})\" font-family=\"sans-serif\">{3}</text>\n",
        num(x + cell / 2), num(label_w - 4), num(spec.font_size), name);
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double r = std::clamp(matrix.r(i, j), -1.0, 1.0);
      const std::string fill =
          r >= 0 ? hex_color(1, 1 - r, 1 - r) : hex_color(1 + r, 1 + r, 1);
      const double x = label_w + cell * static_cast<double>(j);
      const double y = label_w + cell * static_cast<double>(i);
      out += fmt::format(
          "<g class=\"cell\" data-row=\"{}\" data-col=\"{}\"><rect x=\"{}\" y=\"{}\" "
          "width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#ffffff\"/>"
          "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\">{}</text></g>\n",
          i + 1, j + 1, num(x), num(y), num(cell), num(cell), fill, num(x + cell / 2),
          num(y + cell / 2 + spec.font_size / 3), num(spec.font_size * 0.8),
          matrix.cell_text(i, j));
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace penstream
