#ifndef SEA_TIMESERIES_HPP
#define SEA_TIMESERIES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sea/errors.hpp"

namespace sea {

// Hour-resolution calendar timestamp, stored as whole hours since
// 1970-01-01T00:00 (proleptic Gregorian, no timezone).
class HourStamp {
public:
    HourStamp() = default;
    explicit HourStamp(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}

    static HourStamp from_ymdh(int year, int month, int day, int hour);

    // Parses the exact format "YYYY-MM-DDTHH:00"; throws ParseError otherwise.
    static HourStamp parse(const std::string& text);

    std::string to_string() const;

    std::int64_t hours() const { return hours_; }

    HourStamp operator+(std::int64_t h) const { return HourStamp(hours_ + h); }
    std::int64_t operator-(HourStamp other) const { return hours_ - other.hours_; }
    bool operator==(const HourStamp&) const = default;
    auto operator<=>(const HourStamp&) const = default;

private:
    std::int64_t hours_ = 0;
};

// Uniformly sampled hourly series. Index i corresponds to start() + i hours.
class TimeSeries {
public:
    TimeSeries(HourStamp start, std::vector<double> values, std::string name);

    HourStamp start() const { return start_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& name() const { return name_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    // Timestamp of the last observation.
    HourStamp end() const { return start_ + (static_cast<std::int64_t>(values_.size()) - 1); }

private:
    HourStamp start_;
    std::vector<double> values_;
    std::string name_;
};

struct ExogenousRecord {
    double ambient_temperature_c = 0.0;
    double solar_radiation_wm2 = 0.0;
    double wind_speed_ms = 0.0;
};

// Demand series with index-aligned weather records.
class Dataset {
public:
    Dataset(TimeSeries demand, std::vector<ExogenousRecord> exogenous);

    const TimeSeries& demand() const { return demand_; }
    const std::vector<ExogenousRecord>& exogenous() const { return exogenous_; }
    std::size_t size() const { return demand_.size(); }

private:
    TimeSeries demand_;
    std::vector<ExogenousRecord> exogenous_;
};

// z-score parameters fitted on training data. std is the population
// standard deviation (divide by n).
class Normalizer {
public:
    Normalizer(double mean, double std);

    // Throws DegenerateSeries if values has fewer than 2 entries or zero variance.
    static Normalizer fit(const std::vector<double>& values);

    double mean() const { return mean_; }
    double std() const { return std_; }

    double normalize(double x) const { return (x - mean_) / std_; }
    double denormalize(double x) const { return x * std_ + mean_; }
    std::vector<double> normalize(const std::vector<double>& xs) const;
    std::vector<double> denormalize(const std::vector<double>& xs) const;

private:
    double mean_;
    double std_;
};

// CSV schema: header `timestamp,heat_demand_mw,ambient_temp_c,solar_radiation_wm2,wind_speed_ms`,
// rows in strictly ascending gap-free hourly order.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& dataset, const std::string& path);

// Splits into [start, boundary) and [boundary, end]. The boundary must lie
// strictly inside the dataset's time range.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, HourStamp boundary);

} // namespace sea

#endif // SEA_TIMESERIES_HPP
