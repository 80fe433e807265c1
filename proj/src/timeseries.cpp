#include "sea/timeseries.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sea {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return days[m - 1];
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
}

double parse_double_field(const std::string& field, int line_no, const char* column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + field +
                         "' in column " + column);
    }
    if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value in column " +
                         column);
    }
    return value;
}

} // namespace

HourStamp HourStamp::from_ymdh(int year, int month, int day, int hour) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour < 0 ||
        hour > 23) {
        throw ParseError("invalid calendar components " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day) + " " +
                         std::to_string(hour) + ":00");
    }
    return HourStamp(days_from_civil(year, month, day) * 24 + hour);
}

HourStamp HourStamp::parse(const std::string& text) {
    // "YYYY-MM-DDTHH:00" is exactly 16 characters.
    const bool shape_ok = text.size() == 16 && text[4] == '-' && text[7] == '-' &&
                          text[10] == 'T' && text[13] == ':' && all_digits(text, 0, 4) &&
                          all_digits(text, 5, 7) && all_digits(text, 8, 10) &&
                          all_digits(text, 11, 13) && text[14] == '0' && text[15] == '0';
    if (!shape_ok) {
        throw ParseError("timestamp '" + text + "' does not match YYYY-MM-DDTHH:00");
    }
    const int y = std::stoi(text.substr(0, 4));
    const int mo = std::stoi(text.substr(5, 2));
    const int d = std::stoi(text.substr(8, 2));
    const int h = std::stoi(text.substr(11, 2));
    return from_ymdh(y, mo, d, h);
}

std::string HourStamp::to_string() const {
    std::int64_t days = hours_ / 24;
    int hour = static_cast<int>(hours_ % 24);
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    int y = 0, m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", y, m, d, hour);
    return buf;
}

TimeSeries::TimeSeries(HourStamp start, std::vector<double> values, std::string name)
    : start_(start), values_(std::move(values)), name_(std::move(name)) {
    if (values_.empty()) {
        throw DegenerateSeries("time series '" + name_ + "' must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DegenerateSeries("time series '" + name_ + "' has non-finite value at index " +
                                   std::to_string(i));
        }
    }
}

Dataset::Dataset(TimeSeries demand, std::vector<ExogenousRecord> exogenous)
    : demand_(std::move(demand)), exogenous_(std::move(exogenous)) {
    if (exogenous_.size() != demand_.size()) {
        throw LengthMismatch("exogenous records (" + std::to_string(exogenous_.size()) +
                             ") must align with demand (" + std::to_string(demand_.size()) + ")");
    }
    for (std::size_t i = 0; i < exogenous_.size(); ++i) {
        const auto& r = exogenous_[i];
        if (!std::isfinite(r.ambient_temperature_c) || !std::isfinite(r.solar_radiation_wm2) ||
            !std::isfinite(r.wind_speed_ms)) {
            throw DegenerateSeries("non-finite exogenous value at index " + std::to_string(i));
        }
        if (r.solar_radiation_wm2 < 0.0 || r.wind_speed_ms < 0.0) {
            throw DegenerateSeries("negative solar radiation or wind speed at index " +
                                   std::to_string(i));
        }
    }
}

Normalizer::Normalizer(double mean, double std) : mean_(mean), std_(std) {
    if (!(std_ > 0.0) || !std::isfinite(mean_) || !std::isfinite(std_)) {
        throw DegenerateSeries("normalizer requires finite mean and std > 0");
    }
}

Normalizer Normalizer::fit(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw DegenerateSeries("cannot fit normalizer on fewer than 2 values");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ssq = 0.0;
    for (double v : values) ssq += (v - mean) * (v - mean);
    const double std = std::sqrt(ssq / static_cast<double>(values.size()));
    if (std == 0.0) {
        throw DegenerateSeries("cannot fit normalizer on a constant series");
    }
    return Normalizer(mean, std);
}

std::vector<double> Normalizer::normalize(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = normalize(xs[i]);
    return out;
}

std::vector<double> Normalizer::denormalize(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = denormalize(xs[i]);
    return out;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    static const std::string kHeader =
        "timestamp,heat_demand_mw,ambient_temp_c,solar_radiation_wm2,wind_speed_ms";
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("empty file: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw SchemaError("unexpected header '" + line + "', expected '" + kHeader + "'");
    }

    std::vector<double> values;
    std::vector<ExogenousRecord> exo;
    HourStamp start;
    HourStamp prev;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string, 5> fields;
        std::size_t field = 0;
        std::size_t pos = 0;
        while (field < 5) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields[field++] = line.substr(pos);
                pos = line.size() + 1;
                break;
            }
            fields[field++] = line.substr(pos, comma - pos);
            pos = comma + 1;
        }
        if (field != 5 || pos <= line.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
        }

        HourStamp ts;
        try {
            ts = HourStamp::parse(fields[0]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (values.empty()) {
            start = ts;
        } else if (ts != prev + 1) {
            throw GapError("line " + std::to_string(line_no) + ": expected " +
                           (prev + 1).to_string() + ", got " + ts.to_string());
        }
        prev = ts;

        const double demand = parse_double_field(fields[1], line_no, "heat_demand_mw");
        ExogenousRecord r;
        r.ambient_temperature_c = parse_double_field(fields[2], line_no, "ambient_temp_c");
        r.solar_radiation_wm2 = parse_double_field(fields[3], line_no, "solar_radiation_wm2");
        r.wind_speed_ms = parse_double_field(fields[4], line_no, "wind_speed_ms");
        if (r.solar_radiation_wm2 < 0.0) {
            throw ParseError("line " + std::to_string(line_no) + ": negative solar radiation");
        }
        if (r.wind_speed_ms < 0.0) {
            throw ParseError("line " + std::to_string(line_no) + ": negative wind speed");
        }
        values.push_back(demand);
        exo.push_back(r);
    }
    if (values.empty()) {
        throw ParseError("file has no data rows: " + path);
    }
    return Dataset(TimeSeries(start, std::move(values), "heat_demand_mw"), std::move(exo));
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open file for writing: " + path);
    }
    out << "timestamp,heat_demand_mw,ambient_temp_c,solar_radiation_wm2,wind_speed_ms\n";
    char buf[160];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const HourStamp ts = dataset.demand().start() + static_cast<std::int64_t>(i);
        const auto& r = dataset.exogenous()[i];
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n", ts.to_string().c_str(),
                      dataset.demand()[i], r.ambient_temperature_c, r.solar_radiation_wm2,
                      r.wind_speed_ms);
        out << buf;
    }
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, HourStamp boundary) {
    const HourStamp start = dataset.demand().start();
    const HourStamp end = dataset.demand().end();
    if (boundary <= start || boundary > end) {
        throw OutOfRange("split boundary " + boundary.to_string() + " not strictly inside [" +
                         start.to_string() + ", " + end.to_string() + "]");
    }
    const auto cut = static_cast<std::size_t>(boundary - start);
    const auto& v = dataset.demand().values();
    const auto& e = dataset.exogenous();
    const std::string& name = dataset.demand().name();

    TimeSeries head(start, std::vector<double>(v.begin(), v.begin() + cut), name);
    TimeSeries tail(boundary, std::vector<double>(v.begin() + cut, v.end()), name);
    std::vector<ExogenousRecord> head_exo(e.begin(), e.begin() + cut);
    std::vector<ExogenousRecord> tail_exo(e.begin() + cut, e.end());
    return {Dataset(std::move(head), std::move(head_exo)),
            Dataset(std::move(tail), std::move(tail_exo))};
}

} // namespace sea
