#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "physmom/errors.hpp"
#include "physmom/market_data.hpp"
#include "physmom/synth.hpp"

using namespace physmom;
namespace fs = std::filesystem;

namespace {

Date d(const char* iso) { return Date::parse(iso); }

fs::path fresh_dir(const char* name) {
    fs::path p = fs::temp_directory_path() / "physmom_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AssetPanel::Input two_symbol_input() {
    AssetPanel::Input in;
    in.symbols = {"AAA", "BBB"};
    auto mk = [](const char* date, double o, double c, double v, double sh) {
        return Bar{Date::parse(date), o, c, v, sh};
    };
    in.bars = {
        {mk("2014-01-02", 10, 11, 100, 1000), mk("2014-01-03", 11, 12, 110, 1000),
         mk("2014-01-06", 12, 13, 120, 1000)},
        {mk("2014-01-02", 20, 21, 200, 2000), mk("2014-01-03", 21, 22, 210, 2000),
         mk("2014-01-06", 22, 23, 220, 2000)},
    };
    in.benchmark = {{d("2014-01-02"), 100.0}, {d("2014-01-03"), 101.0}, {d("2014-01-06"), 102.0}};
    return in;
}

} // namespace

TEST_CASE("date parsing, formatting and arithmetic") {
    const Date x = d("2014-01-02");
    CHECK(x.to_string() == "2014-01-02");
    CHECK(x.year() == 2014);
    CHECK(x.month() == 1);
    CHECK(x.day() == 2);
    CHECK(x.weekday() == 3); // Thursday
    CHECK((x + 1).to_string() == "2014-01-03");
    CHECK(d("2014-01-06").weekday() == 0); // Monday
    CHECK_THROWS_AS(Date::parse("2014-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("20140101"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("2015-02-29"), std::invalid_argument);
    CHECK(Date::parse("2016-02-29").to_string() == "2016-02-29");
}

TEST_CASE("iso week numbering") {
    CHECK(d("2014-01-01").iso_week() == Date::IsoWeek{2014, 1});
    CHECK(d("2014-01-05").iso_week() == Date::IsoWeek{2014, 1}); // Sunday of week 1
    CHECK(d("2014-01-06").iso_week() == Date::IsoWeek{2014, 2});
    CHECK(d("2016-01-01").iso_week() == Date::IsoWeek{2015, 53});
    CHECK(d("2021-01-01").iso_week() == Date::IsoWeek{2020, 53});
    CHECK(d("2021-01-04").iso_week() == Date::IsoWeek{2021, 1});
    CHECK(d("2014-12-29").iso_week() == Date::IsoWeek{2015, 1}); // Monday of W1 2015
    CHECK(d("2015-12-28").iso_week() == Date::IsoWeek{2015, 53});
}

TEST_CASE("log_price") {
    CHECK(log_price(1.0) == 0.0);
    CHECK(log_price(2.718281828459045) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(log_price(100.0) == doctest::Approx(4.605170185988092).epsilon(1e-15));
    CHECK_THROWS_AS(log_price(0.0), std::domain_error);
    CHECK_THROWS_AS(log_price(-5.0), std::domain_error);
}

TEST_CASE("trading calendar rejects disorder and looks up dates") {
    CHECK_THROWS_AS(TradingCalendar({d("2014-01-03"), d("2014-01-02")}), DataError);
    CHECK_THROWS_AS(TradingCalendar({d("2014-01-02"), d("2014-01-02")}), DataError);
    TradingCalendar cal({d("2014-01-02"), d("2014-01-03"), d("2014-01-06")});
    CHECK(cal.size() == 3);
    CHECK(cal.index_of(d("2014-01-03")) == 1);
    CHECK(!cal.index_of(d("2014-01-04")));
}

TEST_CASE("panel build: intersection policy with fully aligned input") {
    const AssetPanel p = AssetPanel::build(two_symbol_input(),
                                           AssetPanel::CalendarPolicy::intersection);
    CHECK(p.num_symbols() == 2);
    CHECK(p.num_dates() == 3);
    int missing = 0;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 3; ++t)
            if (!p.valid(s, t)) ++missing;
    CHECK(missing == 0);
    CHECK(p.symbols()[0] == "AAA");
    CHECK(p.close(1)[2] == 23.0);
}

TEST_CASE("panel build: union policy marks the gap") {
    auto in = two_symbol_input();
    in.bars[1].erase(in.bars[1].begin() + 1); // BBB loses 2014-01-03
    const AssetPanel p = AssetPanel::build(std::move(in),
                                           AssetPanel::CalendarPolicy::union_dates);
    CHECK(p.num_dates() == 3);
    const int bbb = *p.symbol_index("BBB");
    CHECK(!p.valid(bbb, 1));
    CHECK(std::isnan(p.close(bbb)[1]));
    CHECK(p.valid(bbb, 0));
    CHECK(p.all_valid(bbb, 0, 0));
    CHECK(!p.all_valid(bbb, 0, 2));
    CHECK(p.last_valid_at_or_before(bbb, 1) == 0);
}

TEST_CASE("panel build: intersection keeps only benchmark dates") {
    auto in = two_symbol_input();
    in.benchmark.erase(in.benchmark.begin() + 1); // benchmark lacks 2014-01-03
    const AssetPanel p = AssetPanel::build(std::move(in),
                                           AssetPanel::CalendarPolicy::intersection);
    CHECK(p.num_dates() == 2);
    CHECK(p.calendar().date(1) == d("2014-01-06"));
}

TEST_CASE("panel build: empty universe") {
    AssetPanel::Input in;
    CHECK_THROWS_AS(AssetPanel::build(std::move(in), AssetPanel::CalendarPolicy::union_dates),
                    DataError);
}

TEST_CASE("csv loader: happy path and rejected rows") {
    const fs::path dir = fresh_dir("loader");
    fs::create_directories(dir / "symbols");
    write_file(dir / "symbols" / "AAA.csv",
               "date,open,close,volume,shares_outstanding\n"
               "2014-01-02,10,11,100,1000\n"
               "2014-01-03,-1,12,110,1000\n" // rejected: non-positive open
               "2014-01-06,12,13,120,1000\n");
    write_file(dir / "benchmark.csv", "date,close\n2014-01-02,100\n2014-01-06,102\n");

    LoadReport rep;
    const AssetPanel p = load_panel(dir / "symbols", dir / "benchmark.csv",
                                    AssetPanel::CalendarPolicy::union_dates, &rep);
    CHECK(p.num_symbols() == 1);
    CHECK(p.num_dates() == 2); // the rejected row's date vanishes from the union
    CHECK(rep.rows_rejected == 1);
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("AAA.csv:3") != std::string::npos);
}

TEST_CASE("csv loader: malformed rows report file and line") {
    const fs::path dir = fresh_dir("loader_bad");
    fs::create_directories(dir / "symbols");
    write_file(dir / "symbols" / "AAA.csv",
               "date,open,close,volume,shares_outstanding\n"
               "2014-01-02,10,11,100,1000\n"
               "2014-01-03,ten,12,110,1000\n");
    write_file(dir / "benchmark.csv", "date,close\n2014-01-02,100\n");
    try {
        load_panel(dir / "symbols", dir / "benchmark.csv",
                   AssetPanel::CalendarPolicy::union_dates);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("AAA.csv:3") != std::string::npos);
    }
}

TEST_CASE("csv loader: wrong header and empty directory") {
    const fs::path dir = fresh_dir("loader_hdr");
    fs::create_directories(dir / "symbols");
    write_file(dir / "benchmark.csv", "date,close\n2014-01-02,100\n");
    CHECK_THROWS_AS(load_panel(dir / "symbols", dir / "benchmark.csv",
                               AssetPanel::CalendarPolicy::union_dates),
                    DataError);
    write_file(dir / "symbols" / "AAA.csv",
               "date,open,high,low,close\n2014-01-02,1,2,3,4\n");
    CHECK_THROWS_AS(load_panel(dir / "symbols", dir / "benchmark.csv",
                               AssetPanel::CalendarPolicy::union_dates),
                    DataError);
}

TEST_CASE("panel round-trip is bitwise exact") {
    SynthSpec spec;
    spec.num_symbols = 6;
    spec.num_days = 40;
    spec.missing_prob = 0.05;
    const AssetPanel p = synth_panel(spec, 11);

    const fs::path dir = fresh_dir("roundtrip");
    write_panel(p, dir);
    const AssetPanel q = load_panel(dir / "symbols", dir / "benchmark.csv",
                                    AssetPanel::CalendarPolicy::union_dates);

    REQUIRE(q.num_symbols() == p.num_symbols());
    REQUIRE(q.num_dates() == p.num_dates());
    for (int t = 0; t < p.num_dates(); ++t)
        CHECK(q.calendar().date(t) == p.calendar().date(t));
    for (int s = 0; s < p.num_symbols(); ++s) {
        CHECK(q.symbols()[static_cast<size_t>(s)] == p.symbols()[static_cast<size_t>(s)]);
        for (int t = 0; t < p.num_dates(); ++t) {
            REQUIRE(q.valid(s, t) == p.valid(s, t));
            if (!p.valid(s, t)) continue;
            const auto u = static_cast<size_t>(t);
            CHECK(std::memcmp(&q.open(s)[u], &p.open(s)[u], sizeof(double)) == 0);
            CHECK(std::memcmp(&q.close(s)[u], &p.close(s)[u], sizeof(double)) == 0);
            CHECK(std::memcmp(&q.volume(s)[u], &p.volume(s)[u], sizeof(double)) == 0);
            CHECK(std::memcmp(&q.shares(s)[u], &p.shares(s)[u], sizeof(double)) == 0);
        }
    }
    // second write is byte-identical
    const fs::path dir2 = fresh_dir("roundtrip2");
    write_panel(q, dir2);
    for (const auto& e : fs::directory_iterator(dir / "symbols"))
        CHECK(read_file(e.path()) == read_file(dir2 / "symbols" / e.path().filename()));
    CHECK(read_file(dir / "benchmark.csv") == read_file(dir2 / "benchmark.csv"));
}

TEST_CASE("membership: latest action on or before the date wins") {
    Membership m;
    CHECK(m.is_member("AAA", d("2014-01-02"))); // empty membership admits everyone
    m.add_event("AAA", d("2014-01-10"), true);
    m.add_event("AAA", d("2014-03-01"), false);
    m.add_event("BBB", d("2014-01-01"), true);
    CHECK(!m.is_member("AAA", d("2014-01-02")));
    CHECK(m.is_member("AAA", d("2014-01-10")));
    CHECK(m.is_member("AAA", d("2014-02-28")));
    CHECK(!m.is_member("AAA", d("2014-03-01")));
    CHECK(m.is_member("BBB", d("2020-01-01")));
    CHECK(!m.is_member("CCC", d("2020-01-01"))); // unlisted symbols are out
}

TEST_CASE("membership file loads") {
    const fs::path dir = fresh_dir("members");
    write_file(dir / "members.csv",
               "date,symbol,action\n2014-01-10,AAA,ADD\n2014-03-01,AAA,DROP\n");
    const Membership m = Membership::load(dir / "members.csv");
    CHECK(m.is_member("AAA", d("2014-01-15")));
    CHECK(!m.is_member("AAA", d("2014-03-02")));
    write_file(dir / "bad.csv", "date,symbol,action\n2014-01-10,AAA,HOLD\n");
    CHECK_THROWS_AS(Membership::load(dir / "bad.csv"), DataError);
}

TEST_CASE("period starts per timescale") {
    std::vector<Date> days;
    for (Date x = d("2014-01-01"); x <= d("2014-03-31"); x = x + 1)
        if (x.weekday() < 5) days.push_back(x);
    TradingCalendar cal(days);

    auto day_grid = cal.period_starts(Timescale::day);
    CHECK(static_cast<int>(day_grid.size()) == cal.size());

    auto month_grid = cal.period_starts(Timescale::month);
    REQUIRE(month_grid.size() == 3);
    CHECK(cal.date(month_grid[0]) == d("2014-01-01"));
    CHECK(cal.date(month_grid[1]) == d("2014-02-03")); // Feb 1-2 is a weekend
    CHECK(cal.date(month_grid[2]) == d("2014-03-03"));

    auto year_grid = cal.period_starts(Timescale::year);
    REQUIRE(year_grid.size() == 1);
    CHECK(cal.date(year_grid[0]) == d("2014-01-01"));
}
