#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "physmom/errors.hpp"
#include "physmom/market_data.hpp"

namespace physmom {

namespace fs = std::filesystem;

namespace {

std::string trimmed(std::string s) {
    const char* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trimmed(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DataError(where + ": bad numeric field '" + s + "'");
    return v;
}

struct CsvFile {
    std::ifstream in;
    std::string path;
    int line_no = 0;

    explicit CsvFile(const fs::path& p) : in(p), path(p.string()) {
        if (!in.is_open()) throw DataError("cannot open " + path);
    }
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            line = trimmed(line);
            if (line.empty()) continue;
            fields = split_csv(line);
            return true;
        }
        return false;
    }
    std::string at() const { return path + ":" + std::to_string(line_no); }
};

void expect_header(CsvFile& f, const std::vector<std::string>& want) {
    std::vector<std::string> fields;
    if (!f.next(fields)) throw DataError(f.path + ": empty file");
    if (fields != want) {
        std::string w;
        for (const auto& c : want) w += (w.empty() ? "" : ",") + c;
        throw DataError(f.at() + ": expected header '" + w + "'");
    }
}

} // namespace

AssetPanel load_panel(const fs::path& data_dir, const fs::path& benchmark_file,
                      AssetPanel::CalendarPolicy policy, LoadReport* report) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;

    if (!fs::is_directory(data_dir))
        throw DataError("data directory not found: " + data_dir.string());

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(data_dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("empty universe: no CSV files in " + data_dir.string());

    AssetPanel::Input in;
    for (const auto& path : files) {
        CsvFile f(path);
        expect_header(f, {"date", "open", "close", "volume", "shares_outstanding"});
        std::vector<Bar> bars;
        std::vector<std::string> fields;
        while (f.next(fields)) {
            if (fields.size() != 5)
                throw DataError(f.at() + ": expected 5 columns, got " +
                                std::to_string(fields.size()));
            auto date = Date::try_parse(fields[0]);
            if (!date) throw DataError(f.at() + ": bad date '" + fields[0] + "'");
            Bar b;
            b.date = *date;
            b.open = parse_number(fields[1], f.at());
            b.close = parse_number(fields[2], f.at());
            b.volume = parse_number(fields[3], f.at());
            b.shares_outstanding = parse_number(fields[4], f.at());
            if (!b.plausible()) {
                rep.warnings.push_back(f.at() + ": rejected row (non-positive price/shares "
                                                "or negative volume)");
                ++rep.rows_rejected;
                continue;
            }
            bars.push_back(b);
            ++rep.rows_loaded;
        }
        in.symbols.push_back(path.stem().string());
        in.bars.push_back(std::move(bars));
    }

    {
        CsvFile f(benchmark_file);
        expect_header(f, {"date", "close"});
        std::vector<std::string> fields;
        while (f.next(fields)) {
            if (fields.size() != 2)
                throw DataError(f.at() + ": expected 2 columns, got " +
                                std::to_string(fields.size()));
            auto date = Date::try_parse(fields[0]);
            if (!date) throw DataError(f.at() + ": bad date '" + fields[0] + "'");
            const double close = parse_number(fields[1], f.at());
            if (!(close > 0.0)) {
                rep.warnings.push_back(f.at() + ": rejected benchmark row (non-positive close)");
                ++rep.rows_rejected;
                continue;
            }
            in.benchmark.emplace_back(*date, close);
        }
    }

    return AssetPanel::build(std::move(in), policy);
}

void write_panel(const AssetPanel& panel, const fs::path& dir) {
    // Layout: <dir>/symbols/<SYM>.csv plus <dir>/benchmark.csv, so the symbol
    // directory can be fed straight back into load_panel.
    fs::create_directories(dir / "symbols");
    const int n = panel.num_dates();
    for (int s = 0; s < panel.num_symbols(); ++s) {
        std::ofstream out(dir / "symbols" / (panel.symbols()[static_cast<size_t>(s)] + ".csv"));
        out << "date,open,close,volume,shares_outstanding\n";
        auto open = panel.open(s), close = panel.close(s);
        auto vol = panel.volume(s), shares = panel.shares(s);
        char buf[160];
        for (int t = 0; t < n; ++t) {
            if (!panel.valid(s, t)) continue;
            const auto ui = static_cast<size_t>(t);
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n",
                          panel.calendar().date(t).to_string().c_str(), open[ui], close[ui],
                          vol[ui], shares[ui]);
            out << buf;
        }
    }
    std::ofstream out(dir / "benchmark.csv");
    out << "date,close\n";
    char buf[80];
    for (int t = 0; t < n; ++t) {
        if (!panel.benchmark_valid(t)) continue;
        std::snprintf(buf, sizeof buf, "%s,%.17g\n", panel.calendar().date(t).to_string().c_str(),
                      panel.benchmark_close()[static_cast<size_t>(t)]);
        out << buf;
    }
}

Membership Membership::load(const fs::path& file) {
    Membership m;
    CsvFile f(file);
    expect_header(f, {"date", "symbol", "action"});
    std::vector<std::string> fields;
    while (f.next(fields)) {
        if (fields.size() != 3)
            throw DataError(f.at() + ": expected 3 columns, got " +
                            std::to_string(fields.size()));
        auto date = Date::try_parse(fields[0]);
        if (!date) throw DataError(f.at() + ": bad date '" + fields[0] + "'");
        bool is_add;
        if (fields[2] == "ADD")
            is_add = true;
        else if (fields[2] == "DROP")
            is_add = false;
        else
            throw DataError(f.at() + ": action must be ADD or DROP, got '" + fields[2] + "'");
        m.add_event(fields[1], *date, is_add);
    }
    return m;
}

} // namespace physmom
