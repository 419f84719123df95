#include "excast/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "excast/rng.hpp"

namespace excast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
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

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    int y, mo, d, h, mi, s;
    if (std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6 ||
        mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60) {
        throw std::invalid_argument("unparseable timestamp: '" + text + "'");
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t unix_seconds) {
    std::int64_t days = unix_seconds / 86400;
    std::int64_t rem = unix_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

void TimeSeriesFrame::validate() const {
    if (channels.size() != channel_names.size())
        throw std::invalid_argument("channel/name count mismatch");
    if (target_index >= channels.size())
        throw std::invalid_argument("target channel index out of range");
    for (const auto& ch : channels)
        if (ch.size() != timestamps.size())
            throw std::invalid_argument("channel length differs from timestamp count");
    for (std::size_t t = 1; t < timestamps.size(); ++t)
        if (timestamps[t] - timestamps[t - 1] != kStepSeconds)
            throw std::invalid_argument("timestamps are not a constant hourly grid");
}

int TimeSeriesFrame::day_of_year(std::size_t t) const {
    std::int64_t days = timestamps[t] / 86400;
    if (timestamps[t] % 86400 < 0) --days;
    int y, m, d;
    civil_from_days(days, y, m, d);
    return static_cast<int>(days - days_from_civil(y, 1, 1)) + 1;
}

TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    if (schema.channel_columns.empty())
        throw std::invalid_argument("schema lists no channel columns");
    if (std::find(schema.channel_columns.begin(), schema.channel_columns.end(),
                  schema.target_channel) == schema.channel_columns.end())
        throw std::invalid_argument("target channel '" + schema.target_channel +
                                    "' is not among the schema channels");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    const auto header = split_csv_line(line);

    auto column_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw std::invalid_argument("CSV header lacks column '" + name + "'");
    };
    const std::size_t ts_col = column_of(schema.timestamp_column);
    std::vector<std::size_t> chan_cols;
    for (const auto& name : schema.channel_columns) chan_cols.push_back(column_of(name));

    TimeSeriesFrame frame;
    frame.channel_names = schema.channel_columns;
    frame.channels.resize(chan_cols.size());
    frame.target_index = static_cast<std::size_t>(
        std::find(schema.channel_columns.begin(), schema.channel_columns.end(),
                  schema.target_channel) -
        schema.channel_columns.begin());

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("CSV row has wrong field count");
        const std::int64_t ts = parse_timestamp(trim(fields[ts_col]));
        if (!frame.timestamps.empty()) {
            const std::int64_t gap = ts - frame.timestamps.back();
            if (gap <= 0)
                throw std::runtime_error("timestamps are not strictly increasing");
            if (gap % TimeSeriesFrame::kStepSeconds != 0)
                throw std::runtime_error("timestamp off the hourly grid: " +
                                         format_timestamp(ts));
            // Materialize gap rows as missing so the step stays constant.
            for (std::int64_t g = TimeSeriesFrame::kStepSeconds; g < gap;
                 g += TimeSeriesFrame::kStepSeconds) {
                frame.timestamps.push_back(frame.timestamps.back() +
                                           TimeSeriesFrame::kStepSeconds);
                for (auto& ch : frame.channels) ch.push_back(kNaN);
            }
        }
        frame.timestamps.push_back(ts);
        for (std::size_t c = 0; c < chan_cols.size(); ++c) {
            const std::string cell = trim(fields[chan_cols[c]]);
            if (cell.empty()) {
                frame.channels[c].push_back(kNaN);
            } else {
                double v;
                auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || p != cell.data() + cell.size())
                    throw std::runtime_error("unparseable numeric cell: '" + cell + "'");
                frame.channels[c].push_back(v);
            }
        }
    }
    if (frame.timestamps.empty()) throw std::runtime_error("CSV has no data rows: " + path);
    frame.validate();
    return frame;
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    out << "timestamp";
    for (const auto& name : frame.channel_names) out << ',' << name;
    out << '\n';
    char buf[40];
    for (std::size_t t = 0; t < frame.length(); ++t) {
        out << format_timestamp(frame.timestamps[t]);
        for (const auto& ch : frame.channels) {
            out << ',';
            if (!TimeSeriesFrame::is_missing(ch[t])) {
                auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), ch[t]);
                out.write(buf, p - buf);
                (void)ec;
            }
        }
        out << '\n';
    }
}

double ar_spectral_radius(const std::vector<double>& coefficients) {
    const std::size_t p = coefficients.size();
    if (p == 0) return 0.0;
    // Power iteration on the companion matrix of the AR recursion.
    std::vector<double> v(p, 1.0 / std::sqrt(static_cast<double>(p)));
    double radius = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<double> w(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) w[0] += coefficients[j] * v[j];
        for (std::size_t j = 1; j < p; ++j) w[j] = v[j - 1];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (double& x : w) x /= norm;
        v = std::move(w);
        radius = norm;
    }
    return radius;
}

TimeSeriesFrame generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.length == 0) throw std::invalid_argument("synthetic length must be positive");
    if (cfg.noise_shape <= 0 || cfg.noise_scale <= 0)
        throw std::invalid_argument("noise shape and scale must be positive");
    if (cfg.seasonal_amplitude < 0)
        throw std::invalid_argument("seasonal amplitude must be nonnegative");
    if (ar_spectral_radius(cfg.ar_coefficients) >= 1.0)
        throw std::invalid_argument("AR coefficients are non-stationary (spectral radius >= 1)");

    std::mt19937_64 gen(rng::mix(cfg.seed));
    const std::size_t p = cfg.ar_coefficients.size();

    TimeSeriesFrame frame;
    frame.timestamps.resize(cfg.length);
    const std::int64_t start = days_from_civil(2000, 1, 1) * 86400;
    for (std::size_t t = 0; t < cfg.length; ++t)
        frame.timestamps[t] = start + static_cast<std::int64_t>(t) *
                                          TimeSeriesFrame::kStepSeconds;

    std::vector<double> target(cfg.length);
    std::vector<double> latent(cfg.length);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t t = 0; t < cfg.length; ++t) {
        double z = rng::weibull(gen, cfg.noise_shape, cfg.noise_scale);
        for (std::size_t j = 0; j < p && j < t; ++j)
            z += cfg.ar_coefficients[j] * latent[t - 1 - j];
        latent[t] = z;
        double season = 0.0;
        if (cfg.seasonal_amplitude > 0 && cfg.seasonal_period_hours > 0)
            season = cfg.seasonal_amplitude * 0.5 *
                     (1.0 + std::sin(two_pi * static_cast<double>(t) /
                                     cfg.seasonal_period_hours));
        target[t] = std::max(z + season, 1e-12);
    }

    frame.channel_names.push_back(cfg.target_channel);
    frame.channels.push_back(std::move(target));
    frame.target_index = 0;

    for (std::size_t c = 0; c < cfg.covariate_coupling.size(); ++c) {
        std::vector<double> cov(cfg.length);
        for (std::size_t t = 0; t < cfg.length; ++t) {
            const double base = t > 0 ? frame.channels[0][t - 1] : frame.channels[0][0];
            cov[t] = std::max(cfg.covariate_coupling[c] * base +
                                  rng::weibull(gen, cfg.noise_shape, cfg.noise_scale),
                              1e-12);
        }
        frame.channel_names.push_back("cov" + std::to_string(c + 1));
        frame.channels.push_back(std::move(cov));
    }
    frame.validate();
    return frame;
}

}  // namespace excast
