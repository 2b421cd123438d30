#include "siqa/report.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "siqa/errors.hpp"
#include "siqa/netpbm.hpp"

namespace siqa {

namespace {
constexpr const char* kClassNames[3] = {"good", "usable", "reject"};
constexpr const char* kClassColors[3] = {"#2e8b57", "#e09f3e", "#c1121f"};
}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos &&
      s.find_first_of("naif") == std::string::npos) {
    s += ".0";
  }
  return s;
}

namespace {

void write_metrics_csv(const Metrics& m, const std::filesystem::path& path) {
  std::string csv = "metric,value\n";
  csv += "acc," + fmt_double(m.acc) + "\n";
  for (int k = 0; k < 3; ++k) {
    csv += std::string("precision_") + kClassNames[k] + "," +
           fmt_double(m.precision[k]) + "\n";
  }
  for (int k = 0; k < 3; ++k) {
    csv += std::string("recall_") + kClassNames[k] + "," +
           fmt_double(m.recall[k]) + "\n";
  }
  for (int k = 0; k < 3; ++k) {
    csv += std::string("f_") + kClassNames[k] + "," + fmt_double(m.f_score[k]) +
           "\n";
  }
  csv += "macro_precision," + fmt_double(m.macro_precision) + "\n";
  csv += "macro_recall," + fmt_double(m.macro_recall) + "\n";
  csv += "macro_f," + fmt_double(m.macro_f) + "\n";
  write_file(path, csv);
}

void write_confusion_csv(const ConfusionMatrix& cm,
                         const std::filesystem::path& path) {
  std::string csv = "truth,pred_good,pred_usable,pred_reject\n";
  for (int t = 0; t < 3; ++t) {
    csv += kClassNames[t];
    for (int p = 0; p < 3; ++p) {
      csv += "," + std::to_string(cm.counts[t][p]);
    }
    csv += "\n";
  }
  write_file(path, csv);
}

void write_confusion_svg(const ConfusionMatrix& cm,
                         const std::filesystem::path& path) {
  constexpr int kCell = 70, kMargin = 60;
  const int size = kMargin + 3 * kCell + 20;
  std::int64_t max_count = 1;
  for (const auto& row : cm.counts) {
    for (std::int64_t v : row) max_count = std::max(max_count, v);
  }

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      std::to_string(size) + "\" height=\"" + std::to_string(size) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int t = 0; t < 3; ++t) {
    for (int p = 0; p < 3; ++p) {
      const double frac =
          static_cast<double>(cm.counts[t][p]) / static_cast<double>(max_count);
      const int shade = 255 - static_cast<int>(frac * 190.0);
      const int x = kMargin + p * kCell;
      const int y = kMargin + t * kCell;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
             "\" width=\"" + std::to_string(kCell) + "\" height=\"" +
             std::to_string(kCell) + "\" fill=\"rgb(" + std::to_string(shade) +
             "," + std::to_string(shade) + ",255)\" stroke=\"#444\"/>\n";
      svg += "<text x=\"" + std::to_string(x + kCell / 2) + "\" y=\"" +
             std::to_string(y + kCell / 2 + 5) +
             "\" text-anchor=\"middle\" font-size=\"16\">" +
             std::to_string(cm.counts[t][p]) + "</text>\n";
    }
  }
  for (int k = 0; k < 3; ++k) {
    svg += "<text x=\"" + std::to_string(kMargin + k * kCell + kCell / 2) +
           "\" y=\"" + std::to_string(kMargin - 10) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + kClassNames[k] +
           "</text>\n";
    svg += "<text x=\"" + std::to_string(kMargin - 10) + "\" y=\"" +
           std::to_string(kMargin + k * kCell + kCell / 2 + 4) +
           "\" text-anchor=\"end\" font-size=\"13\">" + kClassNames[k] +
           "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(kMargin + 3 * kCell / 2) +
         "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">predicted"
         "</text>\n";
  svg += "</svg>\n";
  write_file(path, svg);
}

void write_cdf_csv(const std::array<std::vector<std::int64_t>, 3>& sizes,
                   const MtsCdf& cdf, const std::filesystem::path& path) {
  std::set<std::int64_t> grid{0};
  for (const auto& v : sizes) {
    for (std::int64_t s : v) {
      grid.insert(s);
      grid.insert(s + 1);
    }
  }
  std::string csv = "t,class,value\n";
  for (int k = 0; k < 3; ++k) {
    if (sizes[k].empty()) continue;
    for (std::int64_t t : grid) {
      csv += std::to_string(t) + "," + kClassNames[k] + "," +
             fmt_double(cdf.cdf(k, t)) + "\n";
    }
  }
  write_file(path, csv);
}

void write_cdf_svg(const std::array<std::vector<std::int64_t>, 3>& sizes,
                   const MtsCdf& cdf, const std::filesystem::path& path) {
  constexpr int kW = 480, kH = 320, kMargin = 45;
  std::int64_t max_size = 1;
  for (const auto& v : sizes) {
    if (!v.empty()) max_size = std::max(max_size, v.back());
  }

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kW) +
      "\" height=\"" + std::to_string(kH) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + std::to_string(kMargin) + "\" y1=\"" +
         std::to_string(kH - kMargin) + "\" x2=\"" + std::to_string(kW - 10) +
         "\" y2=\"" + std::to_string(kH - kMargin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(kMargin) + "\" y1=\"10\" x2=\"" +
         std::to_string(kMargin) + "\" y2=\"" + std::to_string(kH - kMargin) +
         "\" stroke=\"black\"/>\n";

  auto sx = [&](std::int64_t t) {
    return kMargin + (static_cast<double>(t) / static_cast<double>(max_size)) *
                         (kW - kMargin - 10);
  };
  auto sy = [&](double v) { return (kH - kMargin) - v * (kH - kMargin - 10); };

  for (int k = 0; k < 3; ++k) {
    if (sizes[k].empty()) continue;
    std::string points = fmt_double(sx(0)) + "," + fmt_double(sy(0.0));
    double prev = 0.0;
    for (std::int64_t s : sizes[k]) {
      const double v = cdf.cdf(k, s + 1);
      points += " " + fmt_double(sx(s)) + "," + fmt_double(sy(prev));
      points += " " + fmt_double(sx(s)) + "," + fmt_double(sy(v));
      prev = v;
    }
    points += " " + fmt_double(sx(max_size)) + "," + fmt_double(sy(prev));
    svg += std::string("<polyline fill=\"none\" stroke=\"") + kClassColors[k] +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    svg += std::string("<text x=\"") + std::to_string(kW - 110) + "\" y=\"" +
           std::to_string(30 + 18 * k) + "\" font-size=\"13\" fill=\"" +
           kClassColors[k] + "\">" + kClassNames[k] + "</text>\n";
  }
  svg += "</svg>\n";
  write_file(path, svg);
}

}  // namespace

void render_cdf(const std::array<std::vector<std::int64_t>, 3>& mts_sizes,
                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create " + out_dir.string());

  std::vector<std::pair<std::int64_t, int>> flat;
  for (int k = 0; k < 3; ++k) {
    for (std::int64_t s : mts_sizes[k]) flat.emplace_back(s, k);
  }
  if (!flat.empty()) {
    std::array<std::vector<std::int64_t>, 3> sorted = mts_sizes;
    for (auto& v : sorted) std::sort(v.begin(), v.end());
    const MtsCdf cdf(flat);
    write_cdf_csv(sorted, cdf, out_dir / "mts_cdf.csv");
    write_cdf_svg(sorted, cdf, out_dir / "mts_cdf.svg");
  } else {
    write_file(out_dir / "mts_cdf.csv", std::string("t,class,value\n"));
  }
}

void render_report(const Metrics& metrics, const ConfusionMatrix& cm,
                   const std::array<std::vector<std::int64_t>, 3>& mts_sizes,
                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create " + out_dir.string());

  write_metrics_csv(metrics, out_dir / "metrics.csv");
  write_confusion_csv(cm, out_dir / "confusion.csv");
  write_confusion_svg(cm, out_dir / "confusion_heatmap.svg");
  render_cdf(mts_sizes, out_dir);
}

}  // namespace siqa
