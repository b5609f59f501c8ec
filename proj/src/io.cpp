/*
 * Copyright 2026 The storedispatch Authors
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

#include "storedispatch/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "storedispatch/error.hpp"

namespace storedispatch::io {

namespace {

using json = nlohmann::json;

[[noreturn]] void parse_error(const std::string& where, const std::string& msg) {
    throw Error(ErrorCode::Parse, where + ": " + msg);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return in;
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> to_number(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
    return v;
}

struct CsvLine {
    std::size_t number;
    std::vector<std::string_view> cells;
};

// Non-blank lines of a stream, split on commas. `storage` owns the text.
std::vector<CsvLine> read_csv(std::istream& in, std::vector<std::string>& storage) {
    std::string line;
    std::vector<std::pair<std::size_t, std::size_t>> where;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (trim(line).empty()) continue;
        storage.push_back(line);
        where.emplace_back(no, storage.size() - 1);
    }
    std::vector<CsvLine> out;
    out.reserve(where.size());
    for (auto [no, idx] : where) out.push_back({no, split(storage[idx])});
    return out;
}

double cell_number(const std::string& source, const CsvLine& line, std::size_t col) {
    const auto v = to_number(line.cells[col]);
    if (!v) {
        parse_error(source + ":" + std::to_string(line.number),
                    "row " + std::to_string(line.number) + ": '" + std::string(line.cells[col]) +
                        "' is not a number");
    }
    return *v;
}

void check_step_index(const std::string& source, const CsvLine& line, std::size_t expected) {
    const double idx = cell_number(source, line, 0);
    if (idx != static_cast<double>(expected))
        parse_error(source + ":" + std::to_string(line.number),
                    "row " + std::to_string(line.number) + ": expected step_index " + std::to_string(expected));
}

void check_count(const std::string& source, std::size_t rows, std::optional<std::size_t> expected) {
    if (rows == 0) parse_error(source, "no data rows");
    if (expected && *expected != rows)
        throw Error(ErrorCode::DimensionMismatch, source + ": has " + std::to_string(rows) +
                                                      " steps but the grid has " + std::to_string(*expected));
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) parse_error(where, std::string("missing key '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        parse_error(where, std::string("key '") + key + "' has the wrong type");
    }
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

FleetConfig parse_fleet_config(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_error(source, e.what());
    }
    if (!doc.is_object()) parse_error(source, "top level must be an object");

    FleetConfig cfg;
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        if (!g.is_object()) parse_error(source, "'grid' must be an object");
        if (g.contains("step_hours")) cfg.step_h = get_field<double>(g, "step_hours", source + ": grid");
        if (g.contains("n_steps")) cfg.n_steps = get_field<std::size_t>(g, "n_steps", source + ": grid");
    }
    if (!doc.contains("stores") || !doc["stores"].is_array()) parse_error(source, "missing 'stores' array");

    std::vector<Store> stores;
    std::size_t k = 0;
    for (const auto& s : doc["stores"]) {
        const auto where = source + ": stores[" + std::to_string(k++) + "]";
        if (!s.is_object()) parse_error(where, "store must be an object");
        stores.push_back(make_store(get_field<std::string>(s, "id", where), get_field<double>(s, "power_mw", where),
                                    get_field<double>(s, "energy_mwh", where)));
    }
    cfg.fleet = Fleet(std::move(stores));
    return cfg;
}

FleetConfig read_fleet_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fleet_config(ss.str(), path.string());
}

DemandTrace parse_demand_csv(std::istream& in, const std::string& source, double step_h,
                             std::optional<std::size_t> expected_steps) {
    std::vector<std::string> storage;
    const auto lines = read_csv(in, storage);
    if (lines.empty()) parse_error(source, "empty file");
    const auto& header = lines.front();
    if (header.cells.size() != 2 || header.cells[0] != "step_index" || header.cells[1] != "demand_mw")
        parse_error(source + ":" + std::to_string(header.number), "header must be 'step_index,demand_mw'");

    std::vector<double> values;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& line = lines[r];
        if (line.cells.size() != 2)
            parse_error(source + ":" + std::to_string(line.number),
                        "row " + std::to_string(line.number) + ": expected 2 columns");
        check_step_index(source, line, values.size());
        values.push_back(cell_number(source, line, 1));
    }
    check_count(source, values.size(), expected_steps);
    const TimeGrid grid = make_grid(step_h, values.size());
    return DemandTrace(grid, std::move(values));
}

DemandTrace read_demand_csv(const std::filesystem::path& path, double step_h,
                            std::optional<std::size_t> expected_steps) {
    auto in = open_input(path);
    return parse_demand_csv(in, path.string(), step_h, expected_steps);
}

ScenarioSet parse_scenarios_csv(std::istream& in, const std::string& source, double step_h,
                                std::optional<std::size_t> expected_steps, bool force_uniform) {
    std::vector<std::string> storage;
    const auto lines = read_csv(in, storage);
    if (lines.empty()) parse_error(source, "empty file");
    const auto& header = lines.front();
    const std::size_t cols = header.cells.size();
    if (cols < 2 || header.cells[0] != "step_index")
        parse_error(source + ":" + std::to_string(header.number),
                    "header must be 'step_index,scenario_0,scenario_1,...'");
    for (std::size_t c = 1; c < cols; ++c)
        if (header.cells[c] != "scenario_" + std::to_string(c - 1))
            parse_error(source + ":" + std::to_string(header.number),
                        "header column " + std::to_string(c) + " must be 'scenario_" + std::to_string(c - 1) + "'");

    const std::size_t n_scen = cols - 1;
    std::vector<std::vector<double>> values(n_scen);
    std::optional<std::vector<double>> probs;
    std::size_t rows = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& line = lines[r];
        const auto where = source + ":" + std::to_string(line.number);
        if (line.cells.size() != cols)
            parse_error(where, "row " + std::to_string(line.number) + ": expected " + std::to_string(cols) + " columns");
        if (line.cells[0] == "probability") {
            if (probs) parse_error(where, "duplicate probability row");
            probs.emplace();
            for (std::size_t c = 1; c < cols; ++c) probs->push_back(cell_number(source, line, c));
            continue;
        }
        check_step_index(source, line, rows);
        for (std::size_t c = 1; c < cols; ++c) values[c - 1].push_back(cell_number(source, line, c));
        ++rows;
    }
    check_count(source, rows, expected_steps);

    const TimeGrid grid = make_grid(step_h, rows);
    std::vector<DemandTrace> traces;
    traces.reserve(n_scen);
    for (auto& v : values) traces.emplace_back(grid, std::move(v));
    if (force_uniform || !probs) return ScenarioSet::uniform(std::move(traces));
    return ScenarioSet(std::move(traces), std::move(*probs));
}

ScenarioSet read_scenarios_csv(const std::filesystem::path& path, double step_h,
                               std::optional<std::size_t> expected_steps, bool force_uniform) {
    auto in = open_input(path);
    return parse_scenarios_csv(in, path.string(), step_h, expected_steps, force_uniform);
}

std::vector<PwlPiece> read_pwl_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<PwlPiece> pieces;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        auto body = trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto cells = split(body);
        const auto where = path.string() + ":" + std::to_string(no);
        if (cells.size() != 2) parse_error(where, "expected 'breakpoint,slope'");
        const auto b = to_number(cells[0]);
        const auto s = to_number(cells[1]);
        if (!b || !s) {
            if (pieces.empty() && !b && !s) continue;  // header
            parse_error(where, "expected two numbers");
        }
        pieces.push_back({*b, *s});
    }
    return pieces;
}

CostFunction parse_cost_spec(std::string_view spec) {
    spec = trim(spec);
    if (spec == "linear") return CostFunction::linear();
    if (spec.rfind("power:", 0) == 0) {
        const auto p = to_number(spec.substr(6));
        if (!p) throw Error(ErrorCode::Parse, "cost spec '" + std::string(spec) + "': bad exponent");
        return CostFunction::power(*p);
    }
    if (spec.rfind("pwl:", 0) == 0) return CostFunction::piecewise_linear(read_pwl_file(std::string(spec.substr(4))));
    throw Error(ErrorCode::Parse, "unknown cost spec '" + std::string(spec) + "' (linear | power:<p> | pwl:<file>)");
}

void write_schedule_csv(std::ostream& out, const Fleet& fleet, const DispatchSchedule& schedule) {
    if (schedule.n_stores() != fleet.size())
        throw Error(ErrorCode::DimensionMismatch, "schedule and fleet sizes differ");
    out << "step_index";
    for (const auto& s : fleet.stores()) out << ',' << s.id;
    out << ",firm,residual\n";
    for (std::size_t t = 0; t < schedule.grid.n_steps; ++t) {
        out << t;
        for (const auto& row : schedule.rates_mw) out << ',' << format_number(row[t]);
        out << ',' << format_number(schedule.firm_mw.empty() ? 0.0 : schedule.firm_mw[t]) << ','
            << format_number(schedule.residual_mw[t]) << '\n';
    }
}

DispatchSchedule read_schedule_csv(const std::filesystem::path& path, const Fleet& fleet,
                                   const DemandTrace& demand) {
    auto in = open_input(path);
    const std::string source = path.string();
    std::vector<std::string> storage;
    const auto lines = read_csv(in, storage);
    if (lines.empty()) parse_error(source, "empty file");

    const auto& header = lines.front();
    const std::size_t cols = fleet.size() + 3;
    bool ok = header.cells.size() == cols && header.cells[0] == "step_index" &&
              header.cells[cols - 2] == "firm" && header.cells[cols - 1] == "residual";
    for (std::size_t i = 0; ok && i < fleet.size(); ++i) ok = header.cells[i + 1] == fleet[i].id;
    if (!ok) parse_error(source + ":" + std::to_string(header.number), "header does not match the fleet");

    std::vector<std::vector<double>> rates(fleet.size());
    std::vector<double> firm;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& line = lines[r];
        if (line.cells.size() != cols)
            parse_error(source + ":" + std::to_string(line.number),
                        "row " + std::to_string(line.number) + ": expected " + std::to_string(cols) + " columns");
        check_step_index(source, line, firm.size());
        for (std::size_t i = 0; i < fleet.size(); ++i) rates[i].push_back(cell_number(source, line, i + 1));
        firm.push_back(cell_number(source, line, cols - 2));
    }
    check_count(source, firm.size(), demand.size());
    return make_schedule(demand, std::move(rates), std::move(firm));
}

void write_cumulative_csv(std::ostream& out, const FeasibilityResult& result) {
    out << "t_hours,cum_storage_mwh,cum_demand_mwh\n";
    for (const auto& p : result.curve)
        out << format_number(p.t_h) << ',' << format_number(p.storage_mwh) << ',' << format_number(p.demand_mwh)
            << '\n';
}

void write_certificate_csv(std::ostream& out, const Fleet& fleet, const ThresholdCertificate& cert) {
    out << "position,store_id,threshold_mw,composite_mw,multiplier\n";
    for (std::size_t pos = 0; pos < cert.order.size(); ++pos) {
        const auto i = cert.order[pos];
        out << pos << ',' << fleet[i].id << ',' << format_number(cert.thresholds_mw[i]) << ','
            << format_number(cert.composite_mw[i]) << ',' << format_number(cert.multipliers[i]) << '\n';
    }
}

}  // namespace storedispatch::io
