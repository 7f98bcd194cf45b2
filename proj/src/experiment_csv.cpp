#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "d2dcache/experiment.hpp"

namespace d2dcache {

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string csv_string(const ResultTable& table) {
    std::vector<ResultRow> rows = table.rows;
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        if (a.policy != b.policy) return a.policy < b.policy;
        if (a.replicate != b.replicate) return a.replicate < b.replicate;
        return a.metric < b.metric;
    });
    std::string out = "scenario,sweep_param,sweep_value,policy,metric,value,seed,replicate\n";
    char seed_buf[32];
    for (const auto& row : rows) {
        std::snprintf(seed_buf, sizeof seed_buf, "%" PRIu64, row.seed);
        out += table.scenario;
        out += ',';
        out += table.sweep_param;
        out += ',';
        out += format_full(row.sweep_value);
        out += ',';
        out += row.policy;
        out += ',';
        out += row.metric;
        out += ',';
        out += format_full(row.value);
        out += ',';
        out += seed_buf;
        out += ',';
        out += std::to_string(row.replicate);
        out += '\n';
    }
    return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    const std::string text = csv_string(table);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

ResultTable parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    ResultTable table;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("csv file is empty (missing header): " + path);
    bool first_row = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) throw std::runtime_error("malformed csv row: " + line);
        if (first_row) {
            table.scenario = fields[0];
            table.sweep_param = fields[1];
            first_row = false;
        }
        ResultRow row;
        row.sweep_value = std::stod(fields[2]);
        row.policy = fields[3];
        row.metric = fields[4];
        row.value = std::stod(fields[5]);
        row.seed = std::stoull(fields[6]);
        row.replicate = std::stoi(fields[7]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace d2dcache
