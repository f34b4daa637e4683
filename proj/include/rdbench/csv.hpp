#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rdbench/errors.hpp"
#include "rdbench/rd_types.hpp"

namespace rdbench::csv {

// Dialect: comma-separated, mandatory header row, UTF-8, '.' decimals, no
// thousands separators. Double quotes protect embedded commas/quotes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // same arity as header

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw config_error("missing column: " + name);
    }
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty()) throw parse_error("unexpected quote", line_no);
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw parse_error("unterminated quote", line_no);
    out.push_back(field);
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace detail

inline Table parse(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_line(line, line_no);
        if (t.header.empty()) {
            for (auto& f : fields) t.header.push_back(detail::trim(f));
            continue;
        }
        if (fields.size() != t.header.size())
            throw parse_error("expected " + std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              line_no);
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw parse_error("empty file: header row required", 1);
    return t;
}

inline Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open " + path.string());
    return parse(in);
}

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << quote_field(t.header[i]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << quote_field(row[i]);
        out << '\n';
    }
}

// Crash-safe write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline double parse_double(const std::string& s, std::size_t line_no) {
    std::string t = detail::trim(s);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);  // from_chars rejects '+'
    double v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw parse_error("bad number: '" + s + "'", line_no);
    return v;
}

inline int parse_int(const std::string& s, std::size_t line_no) {
    std::string t = detail::trim(s);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    int v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw parse_error("bad integer: '" + s + "'", line_no);
    return v;
}

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Maps canonical column names onto whatever the file uses. Built-in aliases
// cover common spellings; config can extend them so external CSVs load
// unmodified.
using AliasTable = std::map<std::string, std::vector<std::string>>;

inline AliasTable default_aliases() {
    return {
        {"sequence", {"sequence", "sequence_id", "seq", "clip", "video", "name"}},
        {"variant", {"variant", "variant_id", "leg", "condition", "codec"}},
        {"qp", {"qp", "QP"}},
        {"bitrate_kbps", {"bitrate_kbps", "bitrate", "kbps", "rate_kbps", "bitrate_kb_s"}},
        {"vmaf", {"vmaf", "VMAF"}},
        {"vmaf_neg", {"vmaf_neg", "vmaf-neg", "vmafneg", "VMAF-NEG", "vmaf_neg_score"}},
        {"psnr_y", {"psnr_y", "psnr", "psnr-y", "PSNR-Y", "psnr_y_db"}},
        {"ms_ssim", {"ms_ssim", "ms-ssim", "msssim", "MS-SSIM"}},
        {"bd_vmaf", {"bd_vmaf", "bd-vmaf", "BD-VMAF", "bd_rate_vmaf"}},
        {"bd_vmaf_neg", {"bd_vmaf_neg", "bd-vmaf-neg", "BD-VMAF-NEG", "bd_rate_vmaf_neg"}},
        {"bd_psnr_y", {"bd_psnr_y", "bd-psnr-y", "BD-PSNR-Y", "bd_psnr", "bd_rate_psnr_y"}},
        {"bd_ms_ssim", {"bd_ms_ssim", "bd-ms-ssim", "BD-MS-SSIM", "bd_rate_ms_ssim"}},
    };
}

// Lowercase ASCII fold for alias comparison.
inline std::string fold(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::optional<std::size_t> find_column(const Table& t, const std::string& canonical,
                                              const AliasTable& aliases) {
    auto it = aliases.find(canonical);
    std::vector<std::string> names{canonical};
    if (it != aliases.end()) names.insert(names.end(), it->second.begin(), it->second.end());
    for (std::size_t i = 0; i < t.header.size(); ++i)
        for (const auto& n : names)
            if (fold(t.header[i]) == fold(n)) return i;
    return std::nullopt;
}

inline std::size_t require_column(const Table& t, const std::string& canonical,
                                  const AliasTable& aliases) {
    auto c = find_column(t, canonical, aliases);
    if (!c)
        throw config_error("missing column '" + canonical +
                           "' (no alias matched the header)");
    return *c;
}

// One row of a per-QP measurement file.
struct PerQpRow {
    std::string sequence;
    std::string variant;
    int qp = 0;
    double bitrate_kbps = 0.0;
    double vmaf = 0.0;
    double vmaf_neg = 0.0;
    double psnr_y = 0.0;
    double ms_ssim = 0.0;
};

inline std::vector<PerQpRow> read_per_qp(const Table& t,
                                         const AliasTable& aliases = default_aliases()) {
    std::size_t c_seq = require_column(t, "sequence", aliases);
    std::size_t c_var = require_column(t, "variant", aliases);
    std::size_t c_qp = require_column(t, "qp", aliases);
    std::size_t c_rate = require_column(t, "bitrate_kbps", aliases);
    std::size_t c_vmaf = require_column(t, "vmaf", aliases);
    std::size_t c_neg = require_column(t, "vmaf_neg", aliases);
    std::size_t c_psnr = require_column(t, "psnr_y", aliases);
    std::size_t c_ssim = require_column(t, "ms_ssim", aliases);
    std::vector<PerQpRow> rows;
    rows.reserve(t.rows.size());
    std::map<std::tuple<std::string, std::string, int>, std::size_t> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        std::size_t line_no = i + 2;  // header is line 1
        PerQpRow row;
        row.sequence = detail::trim(r[c_seq]);
        row.variant = detail::trim(r[c_var]);
        row.qp = parse_int(r[c_qp], line_no);
        row.bitrate_kbps = parse_double(r[c_rate], line_no);
        row.vmaf = parse_double(r[c_vmaf], line_no);
        row.vmaf_neg = parse_double(r[c_neg], line_no);
        row.psnr_y = parse_double(r[c_psnr], line_no);
        row.ms_ssim = parse_double(r[c_ssim], line_no);
        auto key = std::tuple{row.sequence, row.variant, row.qp};
        auto [it, fresh] = seen.emplace(key, line_no);
        if (!fresh)
            throw parse_error("duplicate (sequence, variant, qp) also on line " +
                                  std::to_string(it->second),
                              line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Table to_table(const std::vector<PerQpRow>& rows) {
    Table t;
    t.header = {"sequence", "variant", "qp",     "bitrate_kbps",
                "vmaf",     "vmaf_neg", "psnr_y", "ms_ssim"};
    for (const auto& r : rows)
        t.rows.push_back({r.sequence, r.variant, std::to_string(r.qp),
                          fixed(r.bitrate_kbps, 3), fixed(r.vmaf, 4), fixed(r.vmaf_neg, 4),
                          fixed(r.psnr_y, 4), fixed(r.ms_ssim, 5)});
    return t;
}

// Groups per-QP rows into RDCurves keyed by (sequence, variant), each sorted
// by ascending qp.
inline std::map<std::pair<std::string, std::string>, RDCurve> group_curves(
    const std::vector<PerQpRow>& rows) {
    std::map<std::pair<std::string, std::string>, RDCurve> out;
    for (const auto& r : rows) {
        auto& curve = out[{r.sequence, r.variant}];
        curve.sequence_id = r.sequence;
        curve.variant_id = r.variant;
        RDPoint p;
        p.qp = r.qp;
        p.bitrate_kbps = r.bitrate_kbps;
        p.scores[MetricKind::vmaf] = r.vmaf;
        p.scores[MetricKind::vmaf_neg] = r.vmaf_neg;
        p.scores[MetricKind::psnr_y] = r.psnr_y;
        p.scores[MetricKind::ms_ssim] = r.ms_ssim;
        curve.points.push_back(p);
    }
    for (auto& [key, curve] : out)
        std::sort(curve.points.begin(), curve.points.end(),
                  [](const RDPoint& a, const RDPoint& b) { return a.qp < b.qp; });
    return out;
}

// One row of a BD summary file; values in percent.
struct SummaryRow {
    std::string sequence;
    std::map<MetricKind, double> bd;
};

inline std::vector<SummaryRow> read_summary(const Table& t,
                                            const AliasTable& aliases = default_aliases()) {
    std::size_t c_seq = require_column(t, "sequence", aliases);
    std::size_t c_vmaf = require_column(t, "bd_vmaf", aliases);
    std::size_t c_neg = require_column(t, "bd_vmaf_neg", aliases);
    auto c_psnr = find_column(t, "bd_psnr_y", aliases);
    auto c_ssim = find_column(t, "bd_ms_ssim", aliases);
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        std::size_t line_no = i + 2;
        SummaryRow row;
        row.sequence = detail::trim(r[c_seq]);
        row.bd[MetricKind::vmaf] = parse_double(r[c_vmaf], line_no);
        row.bd[MetricKind::vmaf_neg] = parse_double(r[c_neg], line_no);
        if (c_psnr) row.bd[MetricKind::psnr_y] = parse_double(r[*c_psnr], line_no);
        if (c_ssim) row.bd[MetricKind::ms_ssim] = parse_double(r[*c_ssim], line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

// Summary rows render at 2-decimal display precision; aggregation always
// happens upstream on the full-precision values.
inline Table to_table(const std::vector<SummaryRow>& rows) {
    Table t;
    t.header = {"sequence", "bd_vmaf", "bd_vmaf_neg", "bd_psnr_y", "bd_ms_ssim"};
    for (const auto& r : rows) {
        std::vector<std::string> fields{r.sequence};
        for (MetricKind m : all_metrics) {
            auto it = r.bd.find(m);
            fields.push_back(it == r.bd.end() ? "" : fixed(it->second, 2));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

}  // namespace rdbench::csv
