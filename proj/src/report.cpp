#include "palette/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace palette::eval {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) raise(Errc::io, "failed to format a double");
    return std::string(buf, ptr);
}

std::string emit_report(std::span<const ReportRow> rows, ReportFormat format) {
    if (rows.empty()) raise(Errc::empty_report, "no rows to emit");

    if (format == ReportFormat::tabular) {
        std::string out = "strategy,param,score_mean,score_std,ppl_mean,seed\n";
        for (const auto& r : rows) {
            out += r.strategy;
            out += ',';
            out += format_double(r.param);
            out += ',';
            out += format_double(r.score_mean);
            out += ',';
            out += format_double(r.score_std);
            out += ',';
            out += format_double(r.ppl_mean);
            out += ',';
            out += std::to_string(r.seed);
            out += '\n';
        }
        return out;
    }

    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& r : rows) {
        nlohmann::ordered_json cell = {
            {"strategy", r.strategy},   {"param", r.param},
            {"score_mean", r.score_mean}, {"score_std", r.score_std},
            {"ppl_mean", r.ppl_mean},   {"seed", r.seed},
        };
        doc[r.strategy][format_double(r.param)] = std::move(cell);
    }
    return doc.dump(2) + "\n";
}

}  // namespace palette::eval

namespace palette {

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(Errc::io, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::remove(tmp.string().c_str());
            raise(Errc::io, "short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.string().c_str());
        raise(Errc::io, "cannot rename " + tmp.string() + " to " + path.string() + ": " +
                            ec.message());
    }
}

}  // namespace palette
