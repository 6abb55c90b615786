#pragma once

// Result tables: CSV rows per batch, grouped-bar SVG charts per profile,
// and the textual comparison report with its pass/fail thresholds.

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/sim.hpp"

namespace aware {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResultRow {
    std::string profile;
    std::string controller;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    double stop_in[5] = {0, 0, 0, 0, 0};  // index n = StopIn(n), 1..4 used
    double infeasible = 0;
};

inline ResultRow row_of(const Histogram& h) {
    ResultRow r;
    r.profile = h.profile;
    r.controller = h.controller;
    r.runs = h.runs;
    r.seed = h.seed;
    for (int n = 1; n <= 4 && n <= h.horizon; ++n) r.stop_in[n] = h.stop_fraction(n);
    r.infeasible = h.infeasible_fraction();
    return r;
}

inline const char* kCsvHeader =
    "profile,controller,runs,seed,stop_in_4,stop_in_3,stop_in_2,stop_in_1,infeasible";

inline std::string write_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << kCsvHeader << "\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.profile << ',' << r.controller << ',' << r.runs << ',' << r.seed;
        for (int n = 4; n >= 1; --n) {
            std::snprintf(buf, sizeof buf, ",%.6f", r.stop_in[n]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.6f", r.infeasible);
        out << buf << "\n";
    }
    return out.str();
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty CSV");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != kCsvHeader) throw CsvError("unexpected CSV header: " + line);

    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw CsvError("line " + std::to_string(lineno) + ": expected 9 fields");
        ResultRow r;
        r.profile = fields[0];
        r.controller = fields[1];
        try {
            r.runs = std::stoul(fields[2]);
            r.seed = std::stoull(fields[3]);
            for (int n = 4, i = 4; n >= 1; --n, ++i) r.stop_in[n] = std::stod(fields[i]);
            r.infeasible = std::stod(fields[8]);
        } catch (const std::exception&) {
            throw CsvError("line " + std::to_string(lineno) + ": malformed number");
        }
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Grouped-bar SVG, one chart per profile: x axis runs stop_in_4 .. stop_in_1
// then infeasible, one bar per controller in each group.

inline std::string svg_chart(const std::string& profile, const std::vector<ResultRow>& rows) {
    const int width = 720, height = 420;
    const int left = 60, right = 20, top = 48, bottom = 48;
    const int plot_w = width - left - right, plot_h = height - top - bottom;
    const char* colors[] = {"#7a7a7a", "#4a7fb5", "#d08a2e", "#5aa469", "#b5564a"};

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << "profile #" << profile << ": fraction of behaviours per verdict</text>\n";

    char buf[160];
    for (int tick = 0; tick <= 4; ++tick) {
        double frac = tick / 4.0;
        int y = top + plot_h - static_cast<int>(frac * plot_h);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#dddddd\"/>\n",
                      left, y, left + plot_w, y);
        s << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"end\">%.2f</text>\n",
                      left - 6, y + 4, frac);
        s << buf;
    }

    const char* columns[] = {"stop_in_4", "stop_in_3", "stop_in_2", "stop_in_1", "infeasible"};
    const int groups = 5;
    const int group_w = plot_w / groups;
    const int bar_w = rows.empty() ? group_w : std::max(6, (group_w - 16) / static_cast<int>(rows.size()));

    for (int g = 0; g < groups; ++g) {
        for (std::size_t c = 0; c < rows.size(); ++c) {
            double frac = g < 4 ? rows[c].stop_in[4 - g] : rows[c].infeasible;
            int h = static_cast<int>(std::lround(frac * plot_h));
            int x = left + g * group_w + 8 + static_cast<int>(c) * bar_w;
            int y = top + plot_h - h;
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                          x, y, bar_w - 2, h, colors[c % 5]);
            s << buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      left + g * group_w + group_w / 2, top + plot_h + 18, columns[g]);
        s << buf;
    }

    int ly = top - 14;
    int lx = left + plot_w - 100 * static_cast<int>(rows.size());
    for (std::size_t c = 0; c < rows.size(); ++c) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                      lx + static_cast<int>(c) * 100, ly, colors[c % 5],
                      lx + static_cast<int>(c) * 100 + 16, ly + 11, rows[c].controller.c_str());
        s << buf;
    }
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    s << "</svg>\n";
    return s.str();
}

// ---------------------------------------------------------------------------
// Comparison report with the reproduction thresholds.

struct ThresholdCheck {
    std::string name;
    bool applicable = false;
    bool pass = false;
    std::string detail;
};

inline const ResultRow* find_row(const std::vector<ResultRow>& rows, const std::string& profile,
                                 const std::string& controller) {
    for (const auto& r : rows)
        if (r.profile == profile && r.controller == controller) return &r;
    return nullptr;
}

inline std::vector<ThresholdCheck> threshold_checks(const std::vector<ResultRow>& rows) {
    std::vector<ThresholdCheck> out;
    char buf[160];
    auto add = [&](const std::string& name, bool applicable, bool pass, std::string detail) {
        out.push_back({name, applicable, pass, std::move(detail)});
    };

    const ResultRow* a2 = find_row(rows, "2", "aware");
    add("profile2.aware.no_missed_stop", a2 != nullptr, a2 && a2->infeasible == 0.0,
        a2 ? "infeasible = " + std::to_string(a2->infeasible) : "row missing");

    const ResultRow* b2 = find_row(rows, "2", "base");
    if (b2) {
        bool in_band = b2->infeasible >= 0.5 && b2->infeasible <= 0.8;
        double late_mass = b2->stop_in[1];
        double other_mass = b2->stop_in[2] + b2->stop_in[3] + b2->stop_in[4];
        bool last_column = other_mass < 1e-9 && std::abs(late_mass + b2->infeasible - 1.0) < 1e-6;
        std::snprintf(buf, sizeof buf, "infeasible %.4f in [0.50,0.80]; last-column mass %.4f",
                      b2->infeasible, late_mass);
        add("profile2.base.late_detection", true, in_band && last_column, buf);
    } else {
        add("profile2.base.late_detection", false, false, "row missing");
    }

    const ResultRow* b3 = find_row(rows, "3", "base");
    const ResultRow* p3 = find_row(rows, "3", "ptree");
    const ResultRow* a3 = find_row(rows, "3", "aware");
    if (b3 && p3 && a3) {
        bool order = b3->infeasible > p3->infeasible && p3->infeasible > a3->infeasible;
        bool bands = b3->infeasible >= 0.75 && p3->infeasible >= 0.65 && p3->infeasible <= 0.95 &&
                     a3->infeasible >= 0.35 && a3->infeasible <= 0.65;
        std::snprintf(buf, sizeof buf, "base %.4f > ptree %.4f > aware %.4f", b3->infeasible,
                      p3->infeasible, a3->infeasible);
        add("profile3.ordering", true, order, buf);
        add("profile3.bands", true, bands, buf);
    } else {
        add("profile3.ordering", false, false, "rows missing");
        add("profile3.bands", false, false, "rows missing");
    }

    const ResultRow* b1 = find_row(rows, "1", "base");
    const ResultRow* p1 = find_row(rows, "1", "ptree");
    const ResultRow* a1 = find_row(rows, "1", "aware");
    if (b1 && p1 && a1) {
        bool safer = p1->infeasible < b1->infeasible && a1->infeasible < b1->infeasible;
        std::snprintf(buf, sizeof buf, "base %.4f, ptree %.4f, aware %.4f", b1->infeasible,
                      p1->infeasible, a1->infeasible);
        add("profile1.safety_improvement", true, safer, buf);
        double gap = a1->stop_in[3] - p1->stop_in[3];
        std::snprintf(buf, sizeof buf, "aware stop_in_3 %.4f - ptree %.4f = %.4f (need >= 0.05)",
                      a1->stop_in[3], p1->stop_in[3], gap);
        add("profile1.smoothness_gap", true, gap >= 0.05, buf);
    } else {
        add("profile1.safety_improvement", false, false, "rows missing");
        add("profile1.smoothness_gap", false, false, "rows missing");
    }
    return out;
}

inline std::string report_text(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    std::map<std::string, std::vector<ResultRow>> by_profile;
    for (const auto& r : rows) by_profile[r.profile].push_back(r);

    char buf[64];
    for (const auto& [profile, prows] : by_profile) {
        out << "profile #" << profile << " (runs " << (prows.empty() ? 0 : prows.front().runs)
            << ")\n";
        out << "  controller  stop_in_4  stop_in_3  stop_in_2  stop_in_1  infeasible\n";
        for (const auto& r : prows) {
            out << "  " << r.controller;
            for (std::size_t pad = r.controller.size(); pad < 10; ++pad) out << ' ';
            for (int n = 4; n >= 1; --n) {
                std::snprintf(buf, sizeof buf, "  %9.4f", r.stop_in[n]);
                out << buf;
            }
            std::snprintf(buf, sizeof buf, "  %10.4f", r.infeasible);
            out << buf << "\n";
        }
        if (prows.size() > 1) {
            out << "  deltas vs " << prows.front().controller << ":";
            for (std::size_t i = 1; i < prows.size(); ++i) {
                std::snprintf(buf, sizeof buf, " %s %+0.4f", prows[i].controller.c_str(),
                              prows[i].infeasible - prows.front().infeasible);
                out << buf;
            }
            out << " (infeasible)\n";
        }
        out << "\n";
    }
    for (const auto& c : threshold_checks(rows)) {
        if (!c.applicable) continue;
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.detail << "]\n";
        if (!c.pass && c.name == "profile1.smoothness_gap")
            out << "      note: the default linear pdf caps any early reactor's stop_in_3 mass;"
                   " rerun simulate with --p1-sign-start 0 for the calibrated comparison\n";
    }
    return out.str();
}

} // namespace aware
