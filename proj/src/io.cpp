#include "bidomain/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bidomain {

namespace {
void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}
}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) fail("cannot open for writing", path);
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\r\n";
    char buf[32];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << buf << (i + 1 < row.size() ? "," : "");
        }
        out << "\r\n";
    }
    if (!out) fail("write failed", path);
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
    std::vector<std::string> header = {"time",        "v_norm_sq",   "w_norm_sq",
                                       "ui_eps_sq",   "ue_eps_sq",   "dissipation_int",
                                       "grad_i_int",  "grad_e_int",  "l4_int"};
    std::vector<std::vector<double>> rows;
    const bool has_ue = rec.ci_s.rows() > 0;
    for (int s = 0; s < rec.snapshots(); ++s) {
        rows.push_back({rec.times(s), rec.c.col(s).squaredNorm(), rec.a.col(s).squaredNorm(),
                        has_ue ? rec.ci_s.col(s).squaredNorm() : 0.0,
                        has_ue ? rec.ce_s.col(s).squaredNorm() : 0.0,
                        rec.cum_dissipation(s), rec.cum_grad_i(s), rec.cum_grad_e(s),
                        rec.cum_l4(s)});
    }
    write_csv(path, header, rows);
}

void write_coefficients_csv(const std::string& path, const TrajectoryRecord& rec) {
    const int n = static_cast<int>(rec.c.rows());
    const bool has_ue = rec.ci_s.rows() > 0;
    std::vector<std::string> header = {"time"};
    auto block = [&](const char* tag) {
        for (int l = 0; l < n; ++l) header.push_back(std::string(tag) + std::to_string(l));
    };
    block("c_");
    if (has_ue) {
        block("ci_s_");
        block("ce_s_");
    }
    block("a_");
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < rec.snapshots(); ++s) {
        std::vector<double> row = {rec.times(s)};
        for (int l = 0; l < n; ++l) row.push_back(rec.c(l, s));
        if (has_ue) {
            for (int l = 0; l < n; ++l) row.push_back(rec.ci_s(l, s));
            for (int l = 0; l < n; ++l) row.push_back(rec.ce_s(l, s));
        }
        for (int l = 0; l < n; ++l) row.push_back(rec.a(l, s));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_matrix_csv(const std::string& path, const MatrixXd& M) {
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < M.cols(); ++j) header.push_back("col" + std::to_string(j));
    std::vector<std::vector<double>> rows(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) rows[i].push_back(M(i, j));
    write_csv(path, header, rows);
}

void write_meta_sidecar(const std::string& artifact_path, const std::string& config_json,
                        std::uint64_t master_seed) {
    nlohmann::json meta;
    meta["artifact"] = artifact_path;
    meta["master_seed"] = master_seed;
    meta["config"] = nlohmann::json::parse(config_json);
    std::ofstream out(artifact_path + ".meta.json");
    if (!out) fail("cannot open for writing", artifact_path + ".meta.json");
    out << meta.dump(2) << "\n";
}

namespace {
constexpr char kMagic[8] = {'B', 'W', 'I', 'N', 'C', 'R', '0', '1'};
}

void dump_increments(const std::string& path, const WienerIncrements& inc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open for writing", path);
    const std::uint64_t n = inc.modes(), steps = inc.steps();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&steps), 8);
    out.write(reinterpret_cast<const char*>(&inc.dt), 8);
    out.write(reinterpret_cast<const char*>(&inc.seed), 8);
    // column-major (n x steps) is exactly step-major on disk
    out.write(reinterpret_cast<const char*>(inc.dW_v.data()),
              static_cast<std::streamsize>(n * steps * 8));
    out.write(reinterpret_cast<const char*>(inc.dW_w.data()),
              static_cast<std::streamsize>(n * steps * 8));
    if (!out) fail("write failed", path);

    nlohmann::json side;
    side["format"] = "BWINCR01";
    side["n"] = n;
    side["steps"] = steps;
    side["dt"] = inc.dt;
    side["seed"] = inc.seed;
    side["layout"] = "f64le, dW_v then dW_w, step-major";
    std::ofstream sc(path + ".json");
    if (!sc) fail("cannot open for writing", path + ".json");
    sc << side.dump(2) << "\n";
}

WienerIncrements load_increments(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open", path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) fail("bad increment file magic", path);
    std::uint64_t n = 0, steps = 0;
    WienerIncrements inc;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&steps), 8);
    in.read(reinterpret_cast<char*>(&inc.dt), 8);
    in.read(reinterpret_cast<char*>(&inc.seed), 8);
    inc.dW_v.resize(n, steps);
    inc.dW_w.resize(n, steps);
    in.read(reinterpret_cast<char*>(inc.dW_v.data()), static_cast<std::streamsize>(n * steps * 8));
    in.read(reinterpret_cast<char*>(inc.dW_w.data()), static_cast<std::streamsize>(n * steps * 8));
    if (!in) fail("truncated increment file", path);
    return inc;
}

}  // namespace bidomain
