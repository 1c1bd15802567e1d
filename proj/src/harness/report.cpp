#include "tploc/harness/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "tploc/errors.hpp"
#include "tploc/harness/evaluation.hpp"

namespace tploc::harness {

using nlohmann::json;

namespace {

json curve_json(const std::vector<EpochLoss>& curve, bool coarse) {
  json out = json::array();
  for (const auto& e : curve) {
    json row{{"epoch", e.epoch}, {"total", e.total}};
    if (coarse) {
      row["global"] = e.global;
      row["spatial"] = e.spatial;
      row["object"] = e.object;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed << v;
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("report: cannot write " + path.string());
  out << text;
}

}  // namespace

json to_json(const MetricsReport& r) {
  json j{{"command", r.command},
         {"seed", r.config.seed},
         {"config", to_json(r.config)},
         {"config_hash", r.config.hash()},
         {"corpus_checksum", r.corpus_checksum},
         {"loss_curves", {{"coarse", curve_json(r.coarse_curve, true)}, {"fine", curve_json(r.fine_curve, false)}}}};
  if (r.retrieval_recall) {
    json rec = json::object();
    for (auto [k, v] : *r.retrieval_recall) rec[std::to_string(k)] = v;
    j["retrieval_recall"] = rec;
  } else {
    j["retrieval_recall"] = nullptr;
  }
  if (r.localization_recall) {
    json rows = json::array();
    for (const auto& [key, v] : *r.localization_recall) {
      rows.push_back({{"k", key.first}, {"epsilon", key.second}, {"recall", v}});
    }
    j["localization_recall"] = rows;
  } else {
    j["localization_recall"] = nullptr;
  }
  j["fine_error"] = r.fine_error ? json(*r.fine_error) : json(nullptr);
  j["center_error"] = r.center_error ? json(*r.center_error) : json(nullptr);
  return j;
}

std::string retrieval_csv(const std::map<std::size_t, double>& recall) {
  std::string out = "k,recall\n";
  for (auto [k, v] : recall) out += std::to_string(k) + "," + fixed(v) + "\n";
  return out;
}

std::string localization_csv(const std::optional<finestage::RecallTable>& table) {
  std::string out = "k";
  for (double eps : kLocalizationEpsilons) out += ",eps" + std::to_string(static_cast<int>(eps));
  out += "\n";
  for (std::size_t k : kLocalizationKs) {
    out += std::to_string(k);
    for (double eps : kLocalizationEpsilons) {
      out += ",";
      if (!table) {
        out += "absent";
        continue;
      }
      auto it = table->find({k, eps});
      out += it == table->end() ? "absent" : fixed(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string recall_svg(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != "k,recall") throw DataError("recall_svg: unexpected header '" + line + "'");
  std::vector<std::pair<std::string, double>> bars;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("recall_svg: bad row '" + line + "'");
    try {
      bars.emplace_back(line.substr(0, comma), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DataError("recall_svg: bad row '" + line + "'");
    }
  }
  const int width = 60 + 70 * static_cast<int>(bars.size()), height = 240, base = 200, scale = 160;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "  <line x1=\"40\" y1=\"" << base << "\" x2=\"" << width - 10 << "\" y2=\"" << base
      << "\" stroke=\"black\"/>\n";
  svg << "  <text x=\"5\" y=\"" << base - scale << "\" font-size=\"11\">1.0</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    int x = 50 + 70 * static_cast<int>(i);
    int h = static_cast<int>(bars[i].second * scale + 0.5);
    svg << "  <rect x=\"" << x << "\" y=\"" << base - h << "\" width=\"50\" height=\"" << h
        << "\" fill=\"steelblue\"/>\n";
    svg << "  <text x=\"" << x + 10 << "\" y=\"" << base + 15 << "\" font-size=\"12\">k=" << bars[i].first
        << "</text>\n";
    svg << "  <text x=\"" << x + 5 << "\" y=\"" << base - h - 4 << "\" font-size=\"11\">" << fixed(bars[i].second).substr(0, 5)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_report(const MetricsReport& report, const Timing& timing, const std::filesystem::path& dir, bool svg) {
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.json", to_json(report).dump(2) + "\n");
  json t = json::object();
  for (const auto& [phase, s] : timing.seconds) t[phase] = s;
  write_text(dir / "timing.json", json{{"wall_seconds", t}}.dump(2) + "\n");
  if (report.retrieval_recall) {
    std::string csv = retrieval_csv(*report.retrieval_recall);
    write_text(dir / "retrieval_recall.csv", csv);
    if (svg) write_text(dir / "recall.svg", recall_svg(csv));
  }
  write_text(dir / "localization_recall.csv", localization_csv(report.localization_recall));
}

}  // namespace tploc::harness
